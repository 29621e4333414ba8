//! Norm quadrature, region tables, exponent fits and the scaling reports.

pub mod criteria;
pub mod fit;
pub mod regions;
pub mod norms;
pub mod partition;
pub mod quadrature;
