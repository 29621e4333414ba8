//! Time-`T` flow of `f(q, p) = 1/2 p^T A(q) p` on `T*R^3` with its exact Jacobian.

use nalgebra::{DMatrix, Matrix6};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};

pub type M3 = [[f64; 3]; 3];

/// Symmetric quadratic form field `A(q) = A0 + sum_k q_k A_k`.
#[derive(Clone, Debug)]
pub struct QuadraticField {
    pub a0: M3,
    pub grad: [M3; 3],
}

impl QuadraticField {
    pub fn constant(a0: M3) -> Self {
        QuadraticField { a0, grad: [[[0.0; 3]; 3]; 3] }
    }

    pub fn is_symmetric(&self) -> bool {
        let sym = |m: &M3| (0..3).all(|i| (0..3).all(|j| m[i][j] == m[j][i]));
        sym(&self.a0) && self.grad.iter().all(sym)
    }

    pub fn at<S: Scalar>(&self, q: &[S; 3]) -> [[S; 3]; 3] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut v = S::cst(self.a0[i][j]);
                for k in 0..3 {
                    v = v + q[k] * self.grad[k][i][j];
                }
                v
            })
        })
    }

    pub fn value_at(&self, q: &[f64; 3]) -> M3 {
        self.at(q)
    }

    /// Hamilton's equations `q' = A p`, `p'_k = -1/2 p^T (d_k A) p`.
    fn rhs<S: Scalar>(&self, y: &[S; 6]) -> [S; 6] {
        let q = [y[0], y[1], y[2]];
        let p = [y[3], y[4], y[5]];
        let a = self.at(&q);
        let mut out = [S::cst(0.0); 6];
        for i in 0..3 {
            for j in 0..3 {
                out[i] = out[i] + a[i][j] * p[j];
            }
        }
        for k in 0..3 {
            let mut s = S::cst(0.0);
            for i in 0..3 {
                for j in 0..3 {
                    s = s + p[i] * p[j] * self.grad[k][i][j];
                }
            }
            out[3 + k] = -(s * 0.5);
        }
        out
    }
}

const SQ3: f64 = 0.288_675_134_594_812_9;
const GL_A: [[f64; 2]; 2] = [[0.25, 0.25 - SQ3], [0.25 + SQ3, 0.25]];
const GL_B: [f64; 2] = [0.5, 0.5];

/// Two-stage Gauss-Legendre step (symplectic, order 4).
fn gl_step(f: &QuadraticField, y: &[Jet<6>; 6], h: f64) -> Result<[Jet<6>; 6]> {
    let mut k = [f.rhs(y), f.rhs(y)];
    let mut settled = 0;
    for _ in 0..200 {
        let mut next = k;
        for s in 0..2 {
            let ys: [Jet<6>; 6] = std::array::from_fn(|i| y[i] + (k[0][i] * GL_A[s][0] + k[1][i] * GL_A[s][1]) * h);
            next[s] = f.rhs(&ys);
        }
        let delta = (0..2)
            .flat_map(|s| (0..6).map(move |i| (s, i)))
            .map(|(s, i)| {
                let d = next[s][i] - k[s][i];
                d.value().abs().max(d.gradient().iter().fold(0.0f64, |m, v| m.max(v.abs())))
            })
            .fold(0.0, f64::max);
        k = next;
        if delta <= 1e-15 {
            settled += 1;
            if settled >= 2 {
                return Ok(std::array::from_fn(|i| y[i] + (k[0][i] * GL_B[0] + k[1][i] * GL_B[1]) * h));
            }
        }
    }
    Err(Error::NoConvergence("Gauss-Legendre stage iteration".into()))
}

#[derive(Clone, Debug)]
pub struct FlowSample {
    pub seed: [f64; 6],
    pub end: [f64; 6],
    /// `D Phi` with rows indexed by output and columns by input
    pub jacobian: Matrix6<f64>,
    pub symplectic_defect: f64,
    pub tangency_angle: f64,
}

fn j_matrix() -> Matrix6<f64> {
    let mut j = Matrix6::zeros();
    for i in 0..3 {
        j[(i, i + 3)] = 1.0;
        j[(i + 3, i)] = -1.0;
    }
    j
}

/// Largest sine of the principal angles between `span(a)` and `span(b)`.
pub fn subspace_angle(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let qa = a.clone().qr().q();
    let qb = b.clone().qr().q();
    let resid = &qa - &qb * (qb.transpose() * &qa);
    resid.svd(false, false).singular_values.max().min(1.0).asin()
}

pub fn flow(field: &QuadraticField, seed: [f64; 6], time: f64, steps: usize) -> Result<FlowSample> {
    if !field.is_symmetric() {
        return Err(Error::InvalidParameter("A(q) must be symmetric".into()));
    }
    let mut y = Jet::<6>::seed(seed).map(|v| v.with_order(1));
    let h = time / steps as f64;
    for _ in 0..steps {
        y = gl_step(field, &y, h)?;
    }
    let jac = Matrix6::from_fn(|i, j| y[i].derivative(&[j]));
    let jm = j_matrix();
    let symplectic_defect = (jac.transpose() * jm * jac - jm).abs().max();
    let q = [seed[0], seed[1], seed[2]];
    let a = field.value_at(&q);
    let pushed = DMatrix::from_fn(6, 3, |i, j| jac[(i, 3 + j)]);
    let target = DMatrix::from_fn(6, 3, |i, j| if i < 3 { a[i][j] * time } else { (i - 3 == j) as u8 as f64 });
    Ok(FlowSample {
        seed,
        end: std::array::from_fn(|i| y[i].value()),
        jacobian: jac,
        symplectic_defect,
        tangency_angle: subspace_angle(&pushed, &target),
    })
}

/// Flow from the zero section at `q` together with a few nonzero fibre seeds.
pub fn hamiltonian_neighborhood(field: &QuadraticField, q: [f64; 3], radius: f64, time: f64, steps: usize) -> Result<Vec<FlowSample>> {
    let dirs = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.48, -0.6, 0.64]];
    dirs.iter()
        .map(|d| flow(field, [q[0], q[1], q[2], d[0] * radius, d[1] * radius, d[2] * radius], time, steps))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd() -> M3 {
        [[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.0]]
    }

    #[test]
    fn identity_field_endpoint() {
        let f = QuadraticField::constant([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        let s = flow(&f, [0.0, 0.0, 0.0, 1.0, 0.0, 0.0], 1.0, 8).unwrap();
        assert!((s.end[0] - 1.0).abs() <= 1e-12 && s.end[1].abs() <= 1e-14);
    }

    #[test]
    fn constant_field_is_shear() {
        let a = spd();
        let f = QuadraticField::constant(a);
        let seed = [0.1, -0.2, 0.3, 0.05, 0.02, -0.04];
        let s = flow(&f, seed, 1.0, 10).unwrap();
        for i in 0..3 {
            let want = seed[i] + (0..3).map(|j| a[i][j] * seed[3 + j]).sum::<f64>();
            assert!((s.end[i] - want).abs() <= 1e-10);
            assert!((s.end[3 + i] - seed[3 + i]).abs() <= 1e-14);
        }
        assert!(s.symplectic_defect <= 1e-10);
        assert!(s.tangency_angle <= 1e-8);
    }

    #[test]
    fn linear_field_diagnostics() {
        let g = [[[0.2, 0.0, 0.1], [0.0, -0.1, 0.0], [0.1, 0.0, 0.3]], [[0.0; 3]; 3], [[0.0, 0.1, 0.0], [0.1, 0.0, 0.0], [0.0, 0.0, 0.2]]];
        let f = QuadraticField { a0: spd(), grad: g };
        for s in hamiltonian_neighborhood(&f, [0.2, 0.1, -0.3], 0.1, 1.0, 40).unwrap() {
            assert!(s.symplectic_defect <= 1e-8, "{}", s.symplectic_defect);
            if s.seed[3..].iter().all(|v| *v == 0.0) {
                assert!(s.tangency_angle <= 1e-6, "{}", s.tangency_angle);
            }
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let mut a = spd();
        a[0][1] = 0.7;
        assert!(flow(&QuadraticField::constant(a), [0.0; 6], 1.0, 4).is_err());
    }
}
