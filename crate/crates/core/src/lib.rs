//! Cost-optimal charging of battery-electric aircraft across a flight network,
//! with aggregated landside vehicle fleets acting as bidirectional buffers.

pub mod cli;
pub mod evfleet;
pub mod fixtures;
pub mod lpcore;
pub mod scenario;
pub mod solver;
pub mod schedule;
