//! Deterministic SVG charts rebuilt from a report directory.
//!
//! Every plotted series carries its exact values in a `data-values`
//! attribute so charts can be checked against the CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{CliError, RunSummary};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

/// Tables of one run as written by the `run` command.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportData {
    /// `(code, grid cap, [P_gr], [P_c], [P_a])`.
    pub power: Vec<(String, f64, Vec<f64>, Vec<f64>, Vec<f64>)>,
    /// `(code, [step][bucket] total vehicles)`.
    pub fleets: Vec<(String, Vec<Vec<f64>>)>,
    /// `(aircraft id, [E_b])`.
    pub aircraft: Vec<(usize, Vec<f64>)>,
}

fn read_table(path: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
    Ok(text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect())
}

fn number(path: &Path, cell: Option<&String>) -> Result<f64, CliError> {
    cell.and_then(|c| c.parse().ok())
        .ok_or_else(|| CliError::Report(format!("{}: bad number `{}`", path.display(), cell.map_or("", |c| c.as_str()))))
}

impl ReportData {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let summary = RunSummary::load(dir)?;
        let mut data = ReportData::default();
        for a in &summary.airports {
            let path = dir.join(format!("power_{}.csv", a.code));
            let rows = read_table(&path)?;
            let col = |i: usize| rows.iter().map(|r| number(&path, r.get(i))).collect::<Result<Vec<_>, _>>();
            data.power.push((a.code.clone(), a.grid_cap_mw, col(1)?, col(2)?, col(3)?));

            let path = dir.join(format!("fleet_{}.csv", a.code));
            if path.exists() {
                let mut grid: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
                for r in read_table(&path)? {
                    let k = number(&path, r.first())? as usize;
                    let total = number(&path, r.get(2))? + number(&path, r.get(3))? + number(&path, r.get(4))?;
                    grid.entry(k).or_default().push(total);
                }
                data.fleets.push((a.code.clone(), grid.into_values().collect()));
            }
        }
        let mut files: Vec<(usize, PathBuf)> = fs::read_dir(dir)
            .map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter_map(|p| {
                let id = p.file_name()?.to_str()?.strip_prefix("aircraft_")?.strip_suffix(".csv")?.parse().ok()?;
                Some((id, p))
            })
            .collect();
        files.sort();
        for (id, path) in files {
            let energy = read_table(&path)?.iter().map(|r| number(&path, r.get(1))).collect::<Result<_, _>>()?;
            data.aircraft.push((id, energy));
        }
        Ok(data)
    }
}

struct Frame {
    steps: usize,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn new(steps: usize, values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = values.fold((0.0f64, 0.0f64), |(l, h), v| (l.min(v), h.max(v)));
        if hi - lo < 1e-12 {
            hi = lo + 1.0;
        }
        let pad = 0.05 * (hi - lo);
        if lo < 0.0 {
            lo -= pad;
        }
        hi += pad;
        Self { steps: steps.max(1), lo, hi }
    }

    fn x(&self, k: f64) -> f64 {
        MARGIN + k / self.steps as f64 * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.lo) / (self.hi - self.lo) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <title>{title}</title>\n\
         <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{MARGIN}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">{title}</text>\n"
    )
}

fn axes(out: &mut String, f: &Frame, y_label: &str) {
    let (x0, x1) = (f.x(0.0), f.x(f.steps as f64));
    let (y0, y1) = (f.y(f.lo), f.y(f.hi));
    let _ = writeln!(out, "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">");
    let _ = writeln!(out, "<line x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{x1:.3}\" y2=\"{y0:.3}\"/>");
    let _ = writeln!(out, "<line x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{x0:.3}\" y2=\"{y1:.3}\"/>");
    if f.lo < 0.0 {
        let z = f.y(0.0);
        let _ = writeln!(out, "<line x1=\"{x0:.3}\" y1=\"{z:.3}\" x2=\"{x1:.3}\" y2=\"{z:.3}\" stroke=\"#999\"/>");
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        "<g font-family=\"sans-serif\" font-size=\"10\">\n<text x=\"{x0:.3}\" y=\"{:.3}\">0</text>\n<text x=\"{x1:.3}\" y=\"{:.3}\" text-anchor=\"end\">step {}</text>\n<text x=\"4\" y=\"{y1:.3}\">{:.3}</text>\n<text x=\"4\" y=\"{y0:.3}\">{:.3}</text>\n<text x=\"4\" y=\"{:.3}\">{y_label}</text>\n</g>",
        y0 + 14.0,
        y0 + 14.0,
        f.steps,
        f.hi,
        f.lo,
        HEIGHT / 2.0
    );
}

fn values_attr(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Stacked apron and fleet power bars with the grid draw and cap on top.
pub fn power_svg(code: &str, cap: f64, grid: &[f64], fleet: &[f64], apron: &[f64]) -> String {
    let n = grid.len();
    let f = Frame::new(n, grid.iter().chain(fleet).chain(apron).copied().chain([cap]).chain((0..n).map(|k| apron[k] + fleet[k])));
    let mut out = header(&format!("Power at {code} [MW]"));
    axes(&mut out, &f, "MW");
    let w = f.x(1.0) - f.x(0.0);
    let _ = writeln!(out, "<g data-series=\"P_a\" data-values=\"{}\" fill=\"#4e79a7\">", values_attr(apron));
    for (k, &a) in apron.iter().enumerate() {
        let (top, bottom) = (f.y(a.max(0.0)), f.y(a.min(0.0)));
        let _ = writeln!(out, "<rect x=\"{:.3}\" y=\"{top:.3}\" width=\"{w:.3}\" height=\"{:.3}\"/>", f.x(k as f64), bottom - top);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "<g data-series=\"P_c\" data-values=\"{}\" fill=\"#f28e2b\" fill-opacity=\"0.8\">", values_attr(fleet));
    for (k, (&a, &c)) in apron.iter().zip(fleet).enumerate() {
        let (top, bottom) = (f.y(a.max(a + c)), f.y(a.min(a + c)));
        let _ = writeln!(out, "<rect x=\"{:.3}\" y=\"{top:.3}\" width=\"{w:.3}\" height=\"{:.3}\"/>", f.x(k as f64), bottom - top);
    }
    let _ = writeln!(out, "</g>");
    let mut path = String::new();
    for (k, &g) in grid.iter().enumerate() {
        let _ = write!(path, "{}{:.3},{:.3} H{:.3} ", if k == 0 { "M" } else { "L" }, f.x(k as f64), f.y(g), f.x(k as f64 + 1.0));
    }
    let _ = writeln!(
        out,
        "<path data-series=\"P_gr\" data-values=\"{}\" d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>",
        values_attr(grid),
        path.trim_end()
    );
    let y = f.y(cap);
    let _ = writeln!(
        out,
        "<line data-series=\"grid_cap\" data-values=\"{cap}\" x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{:.3}\" y2=\"{y:.3}\" stroke=\"#e15759\" stroke-dasharray=\"6 3\"/>",
        f.x(0.0),
        f.x(n as f64)
    );
    out + "</svg>\n"
}

/// Vehicles per SoC bucket and step as a heat map.
pub fn fleet_svg(code: &str, counts: &[Vec<f64>]) -> String {
    let steps = counts.len();
    let buckets = counts.first().map_or(0, Vec::len);
    let f = Frame::new(steps, [0.0, buckets as f64].into_iter());
    let peak = counts.iter().flatten().copied().fold(0.0f64, f64::max);
    let mut out = header(&format!("Parked vehicles at {code} by SoC bucket"));
    axes(&mut out, &f, "bucket");
    let w = f.x(1.0) - f.x(0.0);
    for b in 0..buckets {
        let series: Vec<f64> = counts.iter().map(|row| row[b]).collect();
        let _ = writeln!(out, "<g data-series=\"bucket_{}\" data-values=\"{}\">", b + 1, values_attr(&series));
        let (top, bottom) = (f.y(b as f64 + 1.0), f.y(b as f64));
        for (k, &v) in series.iter().enumerate() {
            let shade = if peak > 0.0 { v / peak } else { 0.0 };
            let _ = writeln!(
                out,
                "<rect x=\"{:.3}\" y=\"{top:.3}\" width=\"{w:.3}\" height=\"{:.3}\" fill=\"#2a6f97\" fill-opacity=\"{shade:.4}\"/>",
                f.x(k as f64),
                bottom - top
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out + "</svg>\n"
}

/// Battery energy of every aircraft as step lines.
pub fn aircraft_svg(aircraft: &[(usize, Vec<f64>)]) -> String {
    let steps = aircraft.iter().map(|(_, e)| e.len().saturating_sub(1)).max().unwrap_or(0);
    let f = Frame::new(steps, aircraft.iter().flat_map(|(_, e)| e.iter().copied()));
    let mut out = header("Aircraft battery energy [MWh]");
    axes(&mut out, &f, "MWh");
    for (id, energy) in aircraft {
        let mut d = String::new();
        for (k, &e) in energy.iter().enumerate() {
            if k == 0 {
                let _ = write!(d, "M{:.3},{:.3}", f.x(0.0), f.y(e));
            } else {
                let _ = write!(d, " H{:.3} V{:.3}", f.x(k as f64), f.y(e));
            }
        }
        let _ = writeln!(
            out,
            "<path data-series=\"E_b_{id}\" data-values=\"{}\" d=\"{d}\" fill=\"none\" stroke=\"#59a14f\" stroke-width=\"1\"/>",
            values_attr(energy)
        );
    }
    out + "</svg>\n"
}

/// Writes every chart for `data` into `dir`; returns the files written.
pub fn emit_plots(data: &ReportData, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
    let mut charts = Vec::new();
    for (code, cap, grid, fleet, apron) in &data.power {
        charts.push((format!("power_{code}.svg"), power_svg(code, *cap, grid, fleet, apron)));
    }
    for (code, counts) in &data.fleets {
        charts.push((format!("fleet_{code}.svg"), fleet_svg(code, counts)));
    }
    charts.push(("aircraft.svg".into(), aircraft_svg(&data.aircraft)));
    let mut written = Vec::new();
    for (name, svg) in charts {
        let path = dir.join(name);
        fs::write(&path, svg).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
        written.push(path);
    }
    Ok(written)
}

/// Values of the element tagged `data-series="<name>"`, for checking charts.
pub fn series_values(svg: &str, name: &str) -> Option<Vec<f64>> {
    let tag = format!("data-series=\"{name}\" data-values=\"");
    let start = svg.find(&tag)? + tag.len();
    let end = start + svg[start..].find('"')?;
    let raw = &svg[start..end];
    if raw.is_empty() {
        return Some(Vec::new());
    }
    raw.split(' ').map(|v| v.parse().ok()).collect()
}
