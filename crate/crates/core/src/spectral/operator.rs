//! Finite-volume Laplacian on a [`Grid`]: sparse stiffness, lumped mass, and
//! the eigen solvers built on preconditioned conjugate gradients.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sprs::{CsMat, TriMat};

use super::mesh::{EndCondition, FirstAxis, Grid};
use crate::asymptotics::quadrature::pairwise;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    pub stiffness: CsMat<f64>,
    /// lumped, one entry per cell
    pub mass: Vec<f64>,
    /// constants are in the kernel
    pub closed: bool,
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

/// `K u = lambda M u` with `K_ij` the face conductances of the 7-point stencil.
pub fn assemble(grid: &Grid) -> DiscreteOperator {
    let n = grid.n;
    let d = grid.spacing();
    let len = grid.len();
    let mut tri = TriMat::with_capacity((len, len), 7 * len);
    let mut diag = vec![0.0; len];
    let edge = |tri: &mut TriMat<f64>, diag: &mut [f64], a: usize, b: usize, w: f64| {
        if a == b || w == 0.0 {
            return;
        }
        tri.add_triplet(a, b, -w);
        tri.add_triplet(b, a, -w);
        diag[a] += w;
        diag[b] += w;
    };
    let periodic0 = matches!(grid.first, FirstAxis::Periodic { .. });
    for i in 0..n[0] {
        let gc = grid.centre_metric[i];
        let rho = Grid::density(&gc);
        let w1 = rho / gc[1] * d[0] * d[2] / d[1];
        let w2 = rho / gc[2] * d[0] * d[1] / d[2];
        let gf = grid.face_metric[i + 1];
        let w0 = Grid::density(&gf) / gf[0] * d[1] * d[2] / d[0];
        for j in 0..n[1] {
            for k in 0..n[2] {
                let c = grid.index(i, j, k);
                if n[1] > 1 {
                    edge(&mut tri, &mut diag, c, grid.index(i, (j + 1) % n[1], k), w1);
                }
                if n[2] > 1 {
                    edge(&mut tri, &mut diag, c, grid.index(i, j, (k + 1) % n[2]), w2);
                }
                if i + 1 < n[0] {
                    edge(&mut tri, &mut diag, c, grid.index(i + 1, j, k), w0);
                } else if periodic0 && n[0] > 1 {
                    edge(&mut tri, &mut diag, c, grid.index(0, j, k), w0);
                }
            }
        }
    }
    if let FirstAxis::Bounded { lo_bc, hi_bc, .. } = grid.first {
        for (bc, i, face) in [(lo_bc, 0, 0), (hi_bc, n[0] - 1, n[0])] {
            if bc == EndCondition::Dirichlet {
                let gf = grid.face_metric[face];
                let w = 2.0 * Grid::density(&gf) / gf[0] * d[1] * d[2] / d[0];
                for j in 0..n[1] {
                    for k in 0..n[2] {
                        diag[grid.index(i, j, k)] += w;
                    }
                }
            }
        }
    }
    for (i, v) in diag.into_iter().enumerate() {
        tri.add_triplet(i, i, v);
    }
    let mass = (0..len).map(|c| grid.cell_volume(grid.cell(c).0)).collect();
    let stiffness: CsMat<f64> = tri.to_csr();
    let (rows, cols, vals) = stiffness.clone().into_raw_storage();
    DiscreteOperator { stiffness, mass, closed: grid.is_closed(), rows, cols, vals }
}

impl DiscreteOperator {
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .with_min_len(1024)
            .map(|i| (self.rows[i]..self.rows[i + 1]).map(|e| self.vals[e] * u[self.cols[e]]).sum())
            .collect()
    }

    /// `u^T K u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let ku = self.apply(u);
        dot(&ku, u)
    }

    /// `u^T M v`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let w: Vec<f64> = u.iter().zip(v).zip(&self.mass).map(|((a, b), m)| a * b * m).collect();
        pairwise(&w)
    }

    /// `(int |u|^p dV)^(1/p)` with the lumped mass.
    pub fn lp_norm(&self, u: &[f64], p: f64) -> f64 {
        let w: Vec<f64> = u.iter().zip(&self.mass).map(|(a, m)| a.abs().powf(p) * m).collect();
        pairwise(&w).powf(1.0 / p)
    }

    /// Removes the `M`-mean.
    pub fn project_mean_zero(&self, u: &mut [f64]) {
        let vol = pairwise(&self.mass);
        let mean = self.inner(u, &vec![1.0; u.len()]) / vol;
        for x in u.iter_mut() {
            *x -= mean;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.len()).map(|i| *self.stiffness.get(i, i).unwrap_or(&0.0)).collect()
    }

    /// Solves `K x = M b` by Jacobi-preconditioned CG; in the closed case `b`
    /// is projected to mean zero first and so is `x`.
    pub fn solve(&self, b: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let mut rhs: Vec<f64> = b.to_vec();
        if self.closed {
            self.project_mean_zero(&mut rhs);
        }
        let f: Vec<f64> = rhs.iter().zip(&self.mass).map(|(x, m)| x * m).collect();
        let pre: Vec<f64> = self.diagonal().iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect();
        let norm_f = dot(&f, &f).sqrt();
        let mut x = vec![0.0; f.len()];
        if norm_f == 0.0 {
            return Ok(x);
        }
        let mut r = f.clone();
        let mut z: Vec<f64> = r.iter().zip(&pre).map(|(a, p)| a * p).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            let kp = self.apply(&p);
            let alpha = rz / dot(&p, &kp);
            for i in 0..x.len() {
                x[i] += alpha * p[i];
                r[i] -= alpha * kp[i];
            }
            if dot(&r, &r).sqrt() <= rel_tol * norm_f {
                if self.closed {
                    self.project_mean_zero(&mut x);
                }
                return Ok(x);
            }
            for i in 0..z.len() {
                z[i] = r[i] * pre[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..p.len() {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::NoConvergence(format!("CG did not reach {rel_tol:e} in {max_iter} iterations")))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let w: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise(&w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    /// `M`-normalised
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Seeded Gaussian start vector.
fn start_vector(n: usize, salt: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ salt as u64);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Smallest nonzero eigenvalue by inverse iteration; CG inner solves to `1e-8`.
pub fn first_eigenvalue(op: &DiscreteOperator) -> Result<EigenPair> {
    first_eigenvalue_with(op, 1e-8, 1e-10, 500)
}

pub fn first_eigenvalue_with(op: &DiscreteOperator, cg_tol: f64, tol: f64, max_outer: usize) -> Result<EigenPair> {
    let n = op.len();
    let mut u = start_vector(n, 0);
    if op.closed {
        op.project_mean_zero(&mut u);
    }
    normalise(op, &mut u);
    let mut lambda = op.energy(&u);
    let cg_iter = 20 * n + 100;
    for it in 1..=max_outer {
        let mut w = op.solve(&u, cg_tol, cg_iter)?;
        normalise(op, &mut w);
        let next = op.energy(&w);
        u = w;
        if (next - lambda).abs() <= tol * next.abs() {
            return Ok(EigenPair { value: next, vector: u, iterations: it });
        }
        lambda = next;
    }
    Err(Error::NoConvergence(format!("inverse iteration: no convergence in {max_outer} steps (last {lambda})")))
}

fn normalise(op: &DiscreteOperator, u: &mut [f64]) {
    let s = op.inner(u, u).sqrt();
    for x in u.iter_mut() {
        *x /= s;
    }
}

/// Lowest `k` nonzero eigenpairs by block inverse iteration with Rayleigh-Ritz.
pub fn lowest_eigenpairs(op: &DiscreteOperator, k: usize, max_outer: usize) -> Result<(Vec<EigenPair>, bool)> {
    let n = op.len();
    let block = (k + k / 2 + 2).min(n - usize::from(op.closed));
    if k > block {
        return Err(Error::InvalidParameter(format!("{k} eigenpairs requested from {n} cells")));
    }
    let mut basis: Vec<Vec<f64>> = (0..block).map(|s| start_vector(n, s + 1)).collect();
    let mut prev: Vec<f64> = vec![f64::INFINITY; k];
    let cg_iter = 20 * n + 100;
    for it in 1..=max_outer {
        let solved: Vec<Vec<f64>> = basis.par_iter().map(|b| op.solve(b, 1e-10, cg_iter)).collect::<Result<_>>()?;
        let q = m_orthonormalise(op, solved);
        let ku: Vec<Vec<f64>> = q.par_iter().map(|v| op.apply(v)).collect();
        let b = q.len();
        let h = DMatrix::from_fn(b, b, |i, j| dot(&q[i], &ku[j]));
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..b).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        basis = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (i, qi) in q.iter().enumerate() {
                    let s = eig.eigenvectors[(i, c)];
                    for (x, y) in v.iter_mut().zip(qi) {
                        *x += s * y;
                    }
                }
                v
            })
            .collect();
        let vals: Vec<f64> = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        if vals.len() < k {
            return Err(Error::NoConvergence(format!("block iteration lost rank ({} of {k} vectors)", vals.len())));
        }
        let done = vals.iter().zip(&prev).take(k).all(|(a, b)| (a - b).abs() <= 1e-8 * a.abs());
        prev = vals[..k].to_vec();
        if done || it == max_outer {
            let pairs = basis
                .into_iter()
                .zip(vals)
                .take(k)
                .map(|(vector, value)| EigenPair { value, vector, iterations: it })
                .collect();
            return Ok((pairs, done));
        }
    }
    unreachable!("loop returns on the last iteration")
}

/// Modified Gram-Schmidt in the `M` inner product, dropping dependent vectors.
fn m_orthonormalise(op: &DiscreteOperator, vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    for mut v in vs {
        if op.closed {
            op.project_mean_zero(&mut v);
        }
        for _ in 0..2 {
            for q in &out {
                let c = op.inner(&v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let s = op.inner(&v, &v).sqrt();
        if s > 1e-12 {
            v.iter_mut().for_each(|x| *x /= s);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn interval(n: usize) -> DiscreteOperator {
        let first = FirstAxis::Bounded { lo: 0.0, hi: PI, lo_bc: EndCondition::Dirichlet, hi_bc: EndCondition::Dirichlet };
        assemble(&Grid::new([n, 1, 1], first, [1.0, 1.0], |_| [1.0, 1.0, 1.0]).unwrap())
    }

    #[test]
    fn stiffness_is_symmetric_with_constant_kernel() {
        let g = Grid::new([5, 4, 3], FirstAxis::Periodic { period: 1.0 }, [1.0, 2.0], |x| [1.0 + x, 2.0, 0.5]).unwrap();
        let op = assemble(&g);
        let k = &op.stiffness;
        for (v, (i, j)) in k.iter() {
            assert!((k.get(j, i).unwrap() - v).abs() <= 1e-14);
        }
        let ones = vec![1.0; op.len()];
        assert!(op.apply(&ones).iter().all(|x| x.abs() <= 1e-12));
        assert!(op.closed);
    }

    #[test]
    fn interval_dirichlet() {
        let e = first_eigenvalue(&interval(200)).unwrap();
        assert!((e.value - 1.0).abs() <= 0.005, "{}", e.value);
    }

    #[test]
    fn block_solver_matches_single() {
        let op = interval(60);
        let (pairs, ok) = lowest_eigenpairs(&op, 3, 200).unwrap();
        assert!(ok);
        for (k, p) in pairs.iter().enumerate() {
            let want = ((k + 1) * (k + 1)) as f64;
            assert!((p.value / want - 1.0).abs() <= 0.01, "{k}: {}", p.value);
        }
        let single = first_eigenvalue(&op).unwrap();
        assert!((single.value - pairs[0].value).abs() <= 1e-8 * single.value);
    }
}
