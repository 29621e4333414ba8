//! Cutoff, glued profile and the glued immersion in the flat chart.

pub mod cutoff;
pub mod profile;

pub use cutoff::SmoothCutoff;
pub use profile::{
    cutoff_for, exact_graph_immersion, glued_immersion, glued_profile, polar_immersion, region_of, region_of_radius,
    Profile, RegionLabel,
};
