//! Eigenvalue comparison between the singular and smoothed metrics, the
//! Poincaré ratio, reference problems and the exploratory Sobolev probe.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::{build_branched_mesh, BranchedMesh, EndCondition, FirstAxis, Grid, Weighting};
use super::operator::{assemble, first_eigenvalue, lowest_eigenpairs, DiscreteOperator, EigenPair};
use crate::error::{Error, Result};
use crate::geometry::metric::metric_diag;
use crate::gluing::Profile;
use crate::params::ModelParams;

/// Dimension of the branched manifold.
pub const DIM: i32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub m: u32,
    pub n: [usize; 3],
    pub exhaustion: Option<u32>,
    pub c: f64,
    pub lambda_pullback: f64,
    pub lambda_smoothed: f64,
    /// `c^(2 DIM + 2)`
    pub divisor: f64,
    pub pass: bool,
}

/// `lambda_1(g') >= lambda_1(g) / c^8` on the same mesh and boundary conditions, `c = m`.
pub fn eigenvalue_comparison(mesh: &BranchedMesh) -> Result<Comparison> {
    let lp = first_eigenvalue(&assemble(mesh.grid(Weighting::Pullback)))?.value;
    let ls = first_eigenvalue(&assemble(mesh.grid(Weighting::Smoothed)))?.value;
    let c = mesh.m as f64;
    let divisor = c.powi(2 * DIM + 2);
    Ok(Comparison {
        m: mesh.m,
        n: mesh.n,
        exhaustion: mesh.exhaustion,
        c,
        lambda_pullback: lp,
        lambda_smoothed: ls,
        divisor,
        pass: lp >= ls / divisor,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub trials: usize,
    pub worst_ratio: f64,
    /// `c^(DIM + 1) / sqrt(lambda_1(g))` with `lambda_1(g)` on the full solid torus
    pub bound: f64,
    /// ratio of the first eigenfunction of `g'`, the extremal case
    pub eigen_ratio: f64,
    pub lambda_pullback: f64,
    pub pass: bool,
}

/// `||u||_2 / ||du||_2` under `g'` for one vector; constants are rejected.
pub fn poincare_ratio(op: &DiscreteOperator, u: &[f64]) -> Result<f64> {
    let e = op.energy(u);
    if !(e > 1e-300) {
        return Err(Error::InvalidParameter("vector has zero discrete gradient".into()));
    }
    Ok(op.inner(u, u).sqrt() / e.sqrt())
}

/// Random mean-zero `u` (per-cell standard normal, seeded) on the `g'` weighting of `mesh`;
/// the bound uses `lambda_1` of the smoothed metric on the mesh reaching the axis.
pub fn poincare_check(mesh: &BranchedMesh, trials: usize, seed: u64) -> Result<PoincareReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let op = assemble(mesh.grid(Weighting::Pullback));
    let full = build_branched_mesh(mesh.m, mesh.l, mesh.eps_outer, mesh.n, None)?;
    let lambda_g = first_eigenvalue(&assemble(full.grid(Weighting::Smoothed)))?.value;
    let bound = (mesh.m as f64).powi(DIM + 1) / lambda_g.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<f64>> = (0..trials)
        .map(|_| (0..op.len()).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let ratios = samples
        .into_par_iter()
        .map(|mut u| {
            op.project_mean_zero(&mut u);
            poincare_ratio(&op, &u)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    let first = first_eigenvalue(&op)?;
    let eigen_ratio = poincare_ratio(&op, &first.vector)?;
    Ok(PoincareReport {
        trials,
        worst_ratio: worst,
        bound,
        eigen_ratio,
        lambda_pullback: first.value,
        pass: worst <= bound && eigen_ratio <= bound,
    })
}

/// Dirichlet `lambda_1` of `g'` on the exhaustion domains `j = 1..=js`.
pub fn exhaustion_sequence(m: u32, l: f64, eps: f64, n: [usize; 3], j0: u32, js: u32) -> Result<Vec<(u32, f64)>> {
    (1..=js)
        .into_par_iter()
        .map(|j| {
            let mesh = build_branched_mesh(m, l, eps, n, Some((j, j0)))?;
            Ok((j, first_eigenvalue(&assemble(mesh.grid(Weighting::Pullback)))?.value))
        })
        .collect()
}

/// Flat periodic box `[0, side]^3`.
pub fn flat_torus_operator(n: usize, side: f64) -> Result<DiscreteOperator> {
    let g = Grid::new([n, n, n], FirstAxis::Periodic { period: side }, [side, side], |_| [1.0, 1.0, 1.0])?;
    Ok(assemble(&g))
}

/// `[0, pi]` with Dirichlet ends, `lambda_1 = 1`.
pub fn interval_operator(n: usize) -> Result<DiscreteOperator> {
    let first = FirstAxis::Bounded { lo: 0.0, hi: PI, lo_bc: EndCondition::Dirichlet, hi_bc: EndCondition::Dirichlet };
    Ok(assemble(&Grid::new([n, 1, 1], first, [1.0, 1.0], |_| [1.0, 1.0, 1.0])?))
}

/// First zero of `J_0`.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// `lambda_1` of `g'` on the full solid torus of radius `eps` with Dirichlet wall: `(j_{0,1}/eps)^2`,
/// independent of `m` since the lowest mode is rotationally symmetric.
pub fn solid_torus_exact(eps: f64) -> f64 {
    (J0_FIRST_ZERO / eps).powi(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub resolutions: Vec<usize>,
    pub values: Vec<f64>,
    pub exact: f64,
    pub errors: Vec<f64>,
    /// `log2(e_h / e_{h/2})` per refinement
    pub orders: Vec<f64>,
    pub pass: bool,
}

/// Radial refinement of the `g'` solid torus against the Bessel closed form.
pub fn convergence_study(m: u32, eps: f64, radial: &[usize]) -> Result<Convergence> {
    let values = radial
        .par_iter()
        .map(|&nr| {
            let mesh = build_branched_mesh(m, 1.0, eps, [nr, 4, 4], None)?;
            Ok(first_eigenvalue(&assemble(mesh.grid(Weighting::Pullback)))?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let exact = solid_torus_exact(eps);
    let errors: Vec<f64> = values.iter().map(|v| (v - exact).abs()).collect();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = !orders.is_empty() && orders.iter().all(|&p| p >= 1.8);
    Ok(Convergence { resolutions: radial.to_vec(), values, exact, errors, orders, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevProbe {
    /// `sup ||v||_6 / ||dv||_2` over the probed span
    pub a7: f64,
    pub modes: usize,
    pub starts: usize,
    pub eigen_converged: bool,
    pub minimiser_converged: bool,
}

/// Maximises `||v||_6 / ||dv||_2` over the span of the lowest `modes`
/// nonconstant eigenfunctions, by projected gradient ascent from `starts` seeds.
pub fn sobolev_probe_on(op: &DiscreteOperator, modes: usize, starts: usize, seed: u64) -> Result<SobolevProbe> {
    let (pairs, eigen_converged) = lowest_eigenpairs(op, modes, 150)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inits: Vec<Vec<f64>> = (0..starts)
        .map(|_| (0..pairs.len()).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let results: Vec<(f64, bool)> = inits.into_par_iter().map(|c| ascend(op, &pairs, c)).collect();
    let best = results.iter().map(|r| r.0).fold(0.0, f64::max);
    Ok(SobolevProbe {
        a7: best,
        modes: pairs.len(),
        starts,
        eigen_converged,
        minimiser_converged: results.iter().all(|r| r.1),
    })
}

fn combine(pairs: &[EigenPair], c: &[f64]) -> Vec<f64> {
    let n = pairs[0].vector.len();
    let mut v = vec![0.0; n];
    for (p, &ci) in pairs.iter().zip(c) {
        for (x, y) in v.iter_mut().zip(&p.vector) {
            *x += ci * y;
        }
    }
    v
}

/// `log ||v||_6 - log ||dv||_2` and its gradient in the coefficients.
fn objective(op: &DiscreteOperator, pairs: &[EigenPair], c: &[f64]) -> (f64, Vec<f64>) {
    let v = combine(pairs, c);
    let e: f64 = pairs.iter().zip(c).map(|(p, ci)| p.value * ci * ci).sum();
    let s6: f64 = v.iter().zip(&op.mass).map(|(x, m)| x.powi(6) * m).sum();
    let w: Vec<f64> = v.iter().zip(&op.mass).map(|(x, m)| x.powi(5) * m).collect();
    let grad = pairs
        .iter()
        .zip(c)
        .map(|(p, ci)| {
            let d6: f64 = p.vector.iter().zip(&w).map(|(a, b)| a * b).sum();
            d6 / s6 - p.value * ci / e
        })
        .collect();
    (s6.ln() / 6.0 - 0.5 * e.ln(), grad)
}

fn ascend(op: &DiscreteOperator, pairs: &[EigenPair], mut c: Vec<f64>) -> (f64, bool) {
    let norm = |c: &[f64]| c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (mut f, mut g) = objective(op, pairs, &c);
    let mut step = 0.5;
    for _ in 0..400 {
        let gn = norm(&g) * norm(&c);
        if gn <= 1e-7 {
            return (f.exp(), true);
        }
        let scale = norm(&c);
        loop {
            let trial: Vec<f64> = c.iter().zip(&g).map(|(x, d)| x + step * scale * d / norm(&g)).collect();
            let (ft, gt) = objective(op, pairs, &trial);
            if ft > f {
                let s = norm(&trial);
                c = trial.iter().map(|x| x / s).collect();
                f = ft;
                g = gt.iter().map(|x| x * s).collect();
                step = (step * 1.5).min(1.0);
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                return (f.exp(), true);
            }
        }
    }
    (f.exp(), false)
}

/// `v = cos(2 pi x)` on the unit flat torus: `||v||_6 / ||dv||_2 = (5/16)^(1/6) / (sqrt(2) pi)`.
pub fn flat_single_mode_ratio() -> f64 {
    (5.0f64 / 16.0).powf(1.0 / 6.0) / (2.0f64.sqrt() * PI)
}

/// Mesh of the glued chart in `(log r1, theta1, u3)` from `t r0'` to the outer edge
/// of the flat collar `r0`, with the induced `g^t` weights and zero-flux ends.
pub fn glued_chart_grid(prm: &ModelParams, t: f64, n: [usize; 3]) -> Result<Grid> {
    let prof = Profile::new(t, prm)?;
    let lo = (t * prm.r0_prime).ln();
    let hi = prm.r0.ln();
    let first = FirstAxis::Bounded { lo, hi, lo_bc: EndCondition::Natural, hi_bc: EndCondition::Natural };
    Grid::new(n, first, [2.0 * PI * prm.mf(), prm.l], |x| {
        let r = x.exp();
        let g = metric_diag(&prof, r);
        [g[0] * r * r, g[1], g[2]]
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrend {
    pub samples: Vec<(f64, SobolevProbe)>,
    /// log-log slope of `A7` against `t`
    pub slope: f64,
}

pub fn sobolev_constant_probe(prm: &ModelParams, t: f64, n: [usize; 3], seed: u64) -> Result<SobolevProbe> {
    let op = assemble(&glued_chart_grid(prm, t, n)?);
    sobolev_probe_on(&op, 20, 6, seed)
}

pub fn sobolev_probe_trend(prm: &ModelParams, ts: &[f64], n: [usize; 3], seed: u64) -> Result<ProbeTrend> {
    let samples = ts
        .iter()
        .map(|&t| sobolev_constant_probe(prm, t, n, seed).map(|p| (t, p)))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.a7.ln()).collect();
    let slope = crate::asymptotics::fit::linear_fit(&xs, &ys).slope;
    Ok(ProbeTrend { samples, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_torus_eigenvalue() {
        let op = flat_torus_operator(16, 1.0).unwrap();
        let e = first_eigenvalue(&op).unwrap();
        let exact = 4.0 * PI * PI;
        assert!((e.value / exact - 1.0).abs() <= 0.02, "{}", e.value);
    }

    #[test]
    fn identical_weights_identical_eigenvalues() {
        let mesh = build_branched_mesh(1, 1.0, 1.0, [8, 8, 4], Some((1, 4))).unwrap();
        let c = eigenvalue_comparison(&mesh).unwrap();
        assert_eq!(c.lambda_pullback, c.lambda_smoothed);
        assert!(c.pass);
    }

    #[test]
    fn eigenfunction_is_extremal() {
        let mesh = build_branched_mesh(2, 1.0, 1.0, [8, 8, 4], Some((1, 4))).unwrap();
        let r = poincare_check(&mesh, 10, 7).unwrap();
        assert!((r.eigen_ratio - r.lambda_pullback.powf(-0.5)).abs() <= 1e-6 * r.eigen_ratio);
        assert!(r.worst_ratio <= r.eigen_ratio * (1.0 + 1e-9));
        assert!(r.pass);
    }

    #[test]
    fn constant_rejected() {
        let op = flat_torus_operator(4, 1.0).unwrap();
        assert!(poincare_ratio(&op, &vec![1.0; op.len()]).is_err());
    }

    #[test]
    fn cone_eigenvalue_is_bessel() {
        let c = convergence_study(2, 1.0, &[8, 16, 32]).unwrap();
        assert!(c.pass, "{c:?}");
        assert!((c.values[2] / c.exact - 1.0).abs() <= 0.01);
    }
}
