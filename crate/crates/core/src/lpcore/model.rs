use std::fmt;

use super::VarIndex;

/// Constraint families of the grid-cost problem, used for residual reporting and row names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RowGroup {
    /// Battery must hold reserve plus trip energy when the aircraft leaves.
    DepartureEnergy,
    /// Trip energy is removed between departure and arrival.
    FlightEnergy,
    /// Stored energy grows at most by the charging energy of a step.
    EnergyBalance,
    /// Apron demand equals the sum of parked aircraft charging power.
    AirsideAggregation,
    /// Grid draw covers apron demand plus parked-fleet power.
    PowerSplit,
    ChargingTransport,
    IdleBalance,
    DischargingTransport,
    FleetPower,
    /// Cumulative departures per SoC bucket meet owner requirements.
    DepartureSoc,
    DepartureTotal,
    ChargerCapacity,
    AircraftPeriodicity,
    FleetPeriodicity,
    /// Grid cap with a relaxation variable, only in the feasibility-diagnosis model.
    GridCapRelaxed,
    /// Rows read from an external file without a recognised prefix.
    Other,
}

impl RowGroup {
    pub const ALL: [RowGroup; 16] = [
        RowGroup::DepartureEnergy,
        RowGroup::FlightEnergy,
        RowGroup::EnergyBalance,
        RowGroup::AirsideAggregation,
        RowGroup::PowerSplit,
        RowGroup::ChargingTransport,
        RowGroup::IdleBalance,
        RowGroup::DischargingTransport,
        RowGroup::FleetPower,
        RowGroup::DepartureSoc,
        RowGroup::DepartureTotal,
        RowGroup::ChargerCapacity,
        RowGroup::AircraftPeriodicity,
        RowGroup::FleetPeriodicity,
        RowGroup::GridCapRelaxed,
        RowGroup::Other,
    ];

    /// Short prefix used in row names.
    pub fn code(self) -> &'static str {
        match self {
            RowGroup::DepartureEnergy => "depE",
            RowGroup::FlightEnergy => "fltE",
            RowGroup::EnergyBalance => "ebal",
            RowGroup::AirsideAggregation => "air",
            RowGroup::PowerSplit => "split",
            RowGroup::ChargingTransport => "xc",
            RowGroup::IdleBalance => "xi",
            RowGroup::DischargingTransport => "xd",
            RowGroup::FleetPower => "pc",
            RowGroup::DepartureSoc => "dsoc",
            RowGroup::DepartureTotal => "dtot",
            RowGroup::ChargerCapacity => "chg",
            RowGroup::AircraftPeriodicity => "perE",
            RowGroup::FleetPeriodicity => "perX",
            RowGroup::GridCapRelaxed => "gcap",
            RowGroup::Other => "row",
        }
    }

    pub fn from_row_name(name: &str) -> Self {
        let prefix = name.split('_').next().unwrap_or("");
        Self::ALL.into_iter().find(|g| g.code() == prefix).unwrap_or(RowGroup::Other)
    }
}

impl fmt::Display for RowGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// A linear program `min cᵀx  s.t.  row_lo ≤ Ax ≤ row_hi,  col_lo ≤ x ≤ col_hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    pub columns: usize,
    pub triplets: Vec<Triplet>,
    pub row_bounds: Vec<(f64, f64)>,
    pub col_bounds: Vec<(f64, f64)>,
    pub objective: Vec<f64>,
    pub row_groups: Vec<RowGroup>,
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    /// Present for models assembled from a scenario.
    pub index: Option<VarIndex>,
}

impl LpModel {
    pub fn new(columns: usize) -> Self {
        Self {
            columns,
            triplets: Vec::new(),
            row_bounds: Vec::new(),
            col_bounds: vec![(0.0, f64::INFINITY); columns],
            objective: vec![0.0; columns],
            row_groups: Vec::new(),
            row_names: Vec::new(),
            col_names: (0..columns).map(|j| format!("C{j}")).collect(),
            index: None,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_bounds.len()
    }

    pub fn add_column(&mut self, name: impl Into<String>, lower: f64, upper: f64, cost: f64) -> usize {
        self.columns += 1;
        self.col_bounds.push((lower, upper));
        self.objective.push(cost);
        self.col_names.push(name.into());
        self.columns - 1
    }

    pub fn add_row(
        &mut self,
        group: RowGroup,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, f64)>,
        lower: f64,
        upper: f64,
    ) -> usize {
        let row = self.rows();
        self.triplets.extend(
            terms.into_iter().filter(|(_, v)| *v != 0.0).map(|(col, value)| Triplet { row, col, value }),
        );
        self.row_bounds.push((lower, upper));
        self.row_groups.push(group);
        self.row_names.push(name.into());
        row
    }

    /// Row activities `Ax`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.rows()];
        for t in &self.triplets {
            ax[t.row] += t.value * x[t.col];
        }
        ax
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Entries grouped by row, each row's entries in insertion order.
    pub fn row_entries(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.rows()];
        for t in &self.triplets {
            rows[t.row].push((t.col, t.value));
        }
        rows
    }

    /// Entries grouped by column.
    pub fn column_entries(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.columns];
        for t in &self.triplets {
            cols[t.col].push((t.row, t.value));
        }
        cols
    }

    /// Checks every triplet and bound for consistency.
    pub fn well_formed(&self) -> Result<(), String> {
        let m = self.rows();
        if let Some(t) = self.triplets.iter().find(|t| t.row >= m || t.col >= self.columns || !t.value.is_finite()) {
            return Err(format!("bad matrix entry {t:?}"));
        }
        if self.col_bounds.len() != self.columns || self.objective.len() != self.columns {
            return Err("column data length mismatch".into());
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(format!("non-finite cost on column {}", self.col_names[j]));
        }
        for (j, &(l, u)) in self.col_bounds.iter().enumerate() {
            if l > u || l == f64::INFINITY || u == f64::NEG_INFINITY || l.is_nan() || u.is_nan() {
                return Err(format!("empty bounds [{l}, {u}] on column {}", self.col_names[j]));
            }
        }
        for (i, &(l, u)) in self.row_bounds.iter().enumerate() {
            if l > u || l.is_nan() || u.is_nan() {
                return Err(format!("empty bounds [{l}, {u}] on row {}", self.row_names[i]));
            }
        }
        Ok(())
    }
}
