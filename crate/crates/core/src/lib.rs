//! Desk-scale verification lab for glued Lagrangian deformations of a branched
//! special Lagrangian cover in the flat local model `R^2 x S^1 x R^3`.

pub mod asymptotics;
pub mod config;
pub mod error;
pub mod flat_model;
pub mod geometry;
pub mod gluing;
pub mod jet;
pub mod params;
pub mod report;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
pub use params::ModelParams;
