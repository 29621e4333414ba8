//! Structured product grids with a diagonal metric depending on the first
//! coordinate, and the branched solid-torus meshes built on them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndCondition {
    Dirichlet,
    /// zero flux; also the correct condition at an axis where the density vanishes
    Natural,
}

/// First coordinate: cell-centred on `[lo, hi]`, either periodic or with end conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FirstAxis {
    Periodic { period: f64 },
    Bounded { lo: f64, hi: f64, lo_bc: EndCondition, hi_bc: EndCondition },
}

/// `n[k]` cells along each axis; axes 1 and 2 are periodic with the given periods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: [usize; 3],
    pub first: FirstAxis,
    pub periods: [f64; 2],
    /// `diag(g00, g11, g22)` at the cell centres of axis 0
    pub centre_metric: Vec<[f64; 3]>,
    /// the same at the `n0 + 1` faces of axis 0 (the last face wraps in the periodic case)
    pub face_metric: Vec<[f64; 3]>,
}

impl Grid {
    pub fn new<F: Fn(f64) -> [f64; 3]>(n: [usize; 3], first: FirstAxis, periods: [f64; 2], metric: F) -> Result<Self> {
        if n.iter().any(|&k| k == 0) {
            return Err(Error::InvalidParameter(format!("grid resolution {n:?} has an empty axis")));
        }
        if let FirstAxis::Bounded { lo, hi, .. } = first {
            if !(hi > lo) {
                return Err(Error::InvalidParameter(format!("empty first axis [{lo}, {hi}]")));
            }
        }
        let g = Grid { n, first, periods, centre_metric: Vec::new(), face_metric: Vec::new() };
        let centre_metric = (0..n[0]).map(|i| metric(g.centre(i))).collect();
        let face_metric = (0..=n[0]).map(|i| metric(g.face(i))).collect();
        let g = Grid { centre_metric, face_metric, ..g };
        for m in g.centre_metric.iter() {
            if m.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::InvalidParameter(format!("metric {m:?} is not positive definite")));
            }
        }
        Ok(g)
    }

    pub fn spacing(&self) -> [f64; 3] {
        let d0 = match self.first {
            FirstAxis::Periodic { period } => period / self.n[0] as f64,
            FirstAxis::Bounded { lo, hi, .. } => (hi - lo) / self.n[0] as f64,
        };
        [d0, self.periods[0] / self.n[1] as f64, self.periods[1] / self.n[2] as f64]
    }

    fn lo(&self) -> f64 {
        match self.first {
            FirstAxis::Periodic { .. } => 0.0,
            FirstAxis::Bounded { lo, .. } => lo,
        }
    }

    pub fn centre(&self, i: usize) -> f64 {
        self.lo() + (i as f64 + 0.5) * self.spacing()[0]
    }

    pub fn face(&self, i: usize) -> f64 {
        self.lo() + i as f64 * self.spacing()[0]
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }

    /// `(i, j, k)` of a flat index.
    pub fn cell(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.n[2];
        let j = (idx / self.n[2]) % self.n[1];
        (idx / (self.n[1] * self.n[2]), j, k)
    }

    /// `sqrt(det g)`.
    pub fn density(g: &[f64; 3]) -> f64 {
        (g[0] * g[1] * g[2]).sqrt()
    }

    pub fn cell_volume(&self, i: usize) -> f64 {
        let d = self.spacing();
        Self::density(&self.centre_metric[i]) * d[0] * d[1] * d[2]
    }

    pub fn volume(&self) -> f64 {
        (0..self.n[0]).map(|i| self.cell_volume(i)).sum::<f64>() * (self.n[1] * self.n[2]) as f64
    }

    /// No Dirichlet end: constants lie in the kernel.
    pub fn is_closed(&self) -> bool {
        match self.first {
            FirstAxis::Periodic { .. } => true,
            FirstAxis::Bounded { lo_bc, hi_bc, .. } => lo_bc == EndCondition::Natural && hi_bc == EndCondition::Natural,
        }
    }
}

/// Increasing degree-5 smoothstep from `1/m` on `(0, eps/3)` to 1 on `(2 eps/3, eps)`.
pub fn h_profile(r: f64, m: u32, eps: f64) -> f64 {
    let x = ((r - eps / 3.0) / (eps / 3.0)).clamp(0.0, 1.0);
    let s = x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
    let lo = 1.0 / m as f64;
    lo + (1.0 - lo) * s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    /// the pulled-back flat metric `dr^2 + m^2 r^2 dphi^2 + (l/2 pi)^2 dtheta^2`
    Pullback,
    /// `m` in the angular term replaced by `h m`; smooth across the axis
    Smoothed,
}

/// Solid torus `[r_in, eps] x [0, 2 pi) x [0, 2 pi)` over one branch component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchedMesh {
    pub m: u32,
    pub l: f64,
    pub eps_outer: f64,
    /// inner Dirichlet wall `1/(j + j0)`, or `None` when the mesh reaches the axis
    pub inner: Option<f64>,
    pub exhaustion: Option<u32>,
    pub n: [usize; 3],
    /// radial cell centres
    pub radii: Vec<f64>,
    pub pullback: Grid,
    pub smoothed: Grid,
}

pub fn branched_metric(w: Weighting, r: f64, m: u32, l: f64, eps: f64) -> [f64; 3] {
    let mf = m as f64;
    let ang = match w {
        Weighting::Pullback => mf * r,
        Weighting::Smoothed => h_profile(r, m, eps) * mf * r,
    };
    let lt = l / (2.0 * PI);
    [1.0, ang * ang, lt * lt]
}

/// Inner cutoff radius of the `j`-th exhaustion domain.
pub fn exhaustion_radius(j: u32, j0: u32) -> f64 {
    1.0 / (j + j0) as f64
}

/// `exhaustion = Some((j, j0))` puts a Dirichlet wall at `1/(j + j0)`; the outer wall `r = eps` is Dirichlet.
pub fn build_branched_mesh(m: u32, l: f64, eps_outer: f64, n: [usize; 3], exhaustion: Option<(u32, u32)>) -> Result<BranchedMesh> {
    if n.iter().any(|&k| k < 4) {
        return Err(Error::InvalidParameter(format!("mesh resolutions {n:?} must be >= 4")));
    }
    if m < 1 || !(l > 0.0) {
        return Err(Error::InvalidParameter(format!("need m >= 1 and l > 0 (m = {m}, l = {l})")));
    }
    let inner = exhaustion.map(|(j, j0)| exhaustion_radius(j, j0));
    if let Some(r) = inner {
        if !(eps_outer > r) {
            return Err(Error::InvalidParameter(format!("eps_outer = {eps_outer} must exceed the inner cutoff {r}")));
        }
    } else if !(eps_outer > 0.0) {
        return Err(Error::InvalidParameter(format!("eps_outer = {eps_outer} must be > 0")));
    }
    let (lo, lo_bc) = match inner {
        Some(r) => (r, EndCondition::Dirichlet),
        None => (0.0, EndCondition::Natural),
    };
    let first = FirstAxis::Bounded { lo, hi: eps_outer, lo_bc, hi_bc: EndCondition::Dirichlet };
    let periods = [2.0 * PI, 2.0 * PI];
    let grid = |w| Grid::new(n, first, periods, |r| branched_metric(w, r, m, l, eps_outer));
    let pullback = grid(Weighting::Pullback);
    let smoothed = grid(Weighting::Smoothed);
    // the axis face has zero density; only the centres need to be positive
    let (pullback, smoothed) = (pullback?, smoothed?);
    let radii = (0..n[0]).map(|i| pullback.centre(i)).collect();
    Ok(BranchedMesh {
        m,
        l,
        eps_outer,
        inner,
        exhaustion: exhaustion.map(|e| e.0),
        n,
        radii,
        pullback,
        smoothed,
    })
}

impl BranchedMesh {
    pub fn grid(&self, w: Weighting) -> &Grid {
        match w {
            Weighting::Pullback => &self.pullback,
            Weighting::Smoothed => &self.smoothed,
        }
    }

    /// Largest eigenvalue ratio between the two metrics over all cells, in both directions.
    pub fn max_dilatation(&self) -> f64 {
        self.pullback
            .centre_metric
            .iter()
            .zip(&self.smoothed.centre_metric)
            .flat_map(|(a, b)| (0..3).map(move |k| (a[k] / b[k]).max(b[k] / a[k])))
            .fold(1.0, f64::max)
    }

    /// `m pi eps^2 l` minus the removed core, the pull-back volume of the flat solid torus.
    pub fn flat_volume(&self) -> f64 {
        let r_in = self.inner.unwrap_or(0.0);
        self.m as f64 * PI * (self.eps_outer.powi(2) - r_in * r_in) * self.l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unbranched_weights_agree() {
        let mesh = build_branched_mesh(1, 1.0, 1.0, [8, 8, 4], None).unwrap();
        assert_eq!(mesh.pullback.centre_metric, mesh.smoothed.centre_metric);
    }

    #[test]
    fn dilatation_bounded_by_c_squared() {
        for m in [2, 3] {
            let mesh = build_branched_mesh(m, 1.0, 1.0, [32, 8, 4], Some((1, 10))).unwrap();
            let d = mesh.max_dilatation();
            assert!(d <= (m * m) as f64 + 1e-12, "{d}");
            assert!(d > 1.0);
        }
    }

    #[test]
    fn volume_matches_closed_form() {
        let mesh = build_branched_mesh(2, 1.5, 0.8, [32, 8, 8], None).unwrap();
        let v = mesh.pullback.volume();
        assert!((v / mesh.flat_volume() - 1.0).abs() <= 0.02, "{v}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_branched_mesh(2, 1.0, 1.0, [3, 8, 8], None).is_err());
        assert!(build_branched_mesh(2, 1.0, 0.05, [8, 8, 8], Some((1, 10))).is_err());
    }

    #[test]
    fn h_profile_shape() {
        assert_eq!(h_profile(0.1, 3, 1.0), 1.0 / 3.0);
        assert_eq!(h_profile(0.9, 3, 1.0), 1.0);
        let mut prev = 0.0;
        for i in 0..100 {
            let v = h_profile(i as f64 / 100.0, 3, 1.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}
