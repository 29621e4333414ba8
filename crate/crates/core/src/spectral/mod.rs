//! Discrete Laplacians on branched solid-torus meshes and the eigenvalue,
//! Poincaré and Sobolev checks built on them.

pub mod analysis;
pub mod mesh;
pub mod operator;
