//! Metric, phase, curvature, connection and flow diagnostics of the deformed submanifolds.

pub mod metric;
pub mod phase;
pub mod connection;
pub mod hamiltonian;
pub mod sweeps;
