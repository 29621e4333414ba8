//! Induced metric `g^t`, Christoffel symbols and curvature in the chart `(r1, theta1, u3)`.

use crate::error::{Error, Result};
use crate::flat_model::DomainPoint;
use crate::gluing::{region_of_radius, Profile, RegionLabel};
use crate::jet::{Jet, Scalar};

pub type Mat3 = [[f64; 3]; 3];
pub type Christoffel = [[[f64; 3]; 3]; 3];
pub type Riemann = [[[[f64; 3]; 3]; 3]; 3];

#[derive(Clone, Debug)]
pub struct MetricSample {
    /// `(r1, theta1, u3)`
    pub point: [f64; 3],
    pub region: RegionLabel,
    pub g: Mat3,
    pub sqrt_det_g: f64,
    pub christoffel: Christoffel,
    pub riemann_norm: f64,
    /// Gaussian curvature of the `(r1, theta1)` factor
    pub gauss: f64,
}

/// `A = 1 + r2'^2` and `B = r1^2 + r2^2/m^2` as functions of `r1`.
pub fn chart_coefficients<S: Scalar>(prof: &Profile, r1: S) -> (S, S)
where
    S: ProfileDerivative,
{
    let (r2, r2p) = S::profile_and_slope(prof, r1);
    let m = prof.m as f64;
    (r2p * r2p + 1.0, r1 * r1 + r2 * r2 / (m * m))
}

/// Scalars that can carry `r2` together with `r2'`.
pub trait ProfileDerivative: Scalar {
    fn profile_and_slope(prof: &Profile, r1: Self) -> (Self, Self);
}

impl ProfileDerivative for f64 {
    fn profile_and_slope(prof: &Profile, r1: f64) -> (f64, f64) {
        (prof.r2(r1), prof.r2_prime(r1))
    }
}

impl ProfileDerivative for Jet<1> {
    fn profile_and_slope(prof: &Profile, r1: Self) -> (Self, Self) {
        let r2 = prof.r2(r1);
        (r2, r2.partial(0))
    }
}

/// `diag(A, B, 1)` on `Q` and `P`, `diag(1, r1^2, 1)` on `K`.
pub fn metric_diag(prof: &Profile, r1: f64) -> [f64; 3] {
    match region_of_radius(r1, &prof.cut) {
        RegionLabel::K => [1.0, r1 * r1, 1.0],
        _ => {
            let (a, b) = chart_coefficients(prof, r1);
            [a, b, 1.0]
        }
    }
}

/// The metric on `P` in the chart `(r2, theta2, u3)`:
/// `diag(A~, r2^2 A~, 1)`, `A~ = 1 + m^2 a^-2 t^(2(1-m)) r2^(2(m-1))`.
pub fn p_chart_metric(prof: &Profile, r2: f64) -> [f64; 3] {
    let m = prof.m as f64;
    let x = m / prof.a * prof.t.powf(1.0 - m) * r2.powf(m - 1.0);
    let at = 1.0 + x * x;
    [at, r2 * r2 * at, 1.0]
}

/// `A = 1 + m^-2 a^(2/m) r^(2(1-m)/m)`, `B = r^2 A` for the special Lagrangian `L'^a`.
pub fn pure_sl_coefficients<S: Scalar>(a: f64, m: u32, r: S) -> (S, S) {
    let m = m as f64;
    let aa = r.powf(2.0 * (1.0 - m) / m) * (a.powf(2.0 / m) / (m * m)) + 1.0;
    (aa, r * r * aa)
}

/// Christoffel symbols and Riemann tensor `R^i_{jkl}` of a metric given as order-2 jets.
pub fn curvature_from_jets(g: &[[Jet<3>; 3]; 3]) -> (Christoffel, Riemann, Mat3, Mat3) {
    let inv = inverse_jet(g);
    let dg: [[[Jet<3>; 3]; 3]; 3] = std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].partial(k))));
    let gam: [[[Jet<3>; 3]; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let mut s = Jet::<3>::constant(0.0).with_order(1);
                for l in 0..3 {
                    s += inv[i][l].with_order(1) * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]) * 0.5;
                }
                s
            })
        })
    });
    let mut riem = [[[[0.0; 3]; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut v = gam[i][l][j].derivative(&[k]) - gam[i][k][j].derivative(&[l]);
                    for p in 0..3 {
                        v += gam[i][k][p].value() * gam[p][l][j].value() - gam[i][l][p].value() * gam[p][k][j].value();
                    }
                    riem[i][j][k][l] = v;
                }
            }
        }
    }
    let christ = std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| gam[i][j][k].value())));
    let gv = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].value()));
    let iv = std::array::from_fn(|i| std::array::from_fn(|j| inv[i][j].value()));
    (christ, riem, gv, iv)
}

/// `|R|_g = (R_{ijkl} R^{ijkl})^(1/2)`.
pub fn riemann_norm(r: &Riemann, g: &Mat3, inv: &Mat3) -> f64 {
    let mut low = [[[[0.0; 3]; 3]; 3]; 3];
    for a in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    low[a][j][k][l] = (0..3).map(|i| g[a][i] * r[i][j][k][l]).sum();
                }
            }
        }
    }
    let mut s = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let mut up = 0.0;
                    for (e, f, h, q) in itertools(a, b, c, d) {
                        up += inv[a][e] * inv[b][f] * inv[c][h] * inv[d][q] * low[e][f][h][q];
                    }
                    s += low[a][b][c][d] * up;
                }
            }
        }
    }
    s.max(0.0).sqrt()
}

fn itertools(_: usize, _: usize, _: usize, _: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..81).map(|n| (n / 27, (n / 9) % 3, (n / 3) % 3, n % 3))
}

fn inverse_jet(g: &[[Jet<3>; 3]; 3]) -> [[Jet<3>; 3]; 3] {
    let c = |i: usize, j: usize| {
        let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
        let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
        g[i1][j1] * g[i2][j2] - g[i1][j2] * g[i2][j1]
    };
    let det = g[0][0] * c(0, 0) + g[0][1] * c(0, 1) + g[0][2] * c(0, 2);
    let rd = det.recip();
    std::array::from_fn(|i| std::array::from_fn(|j| c(j, i) * rd))
}

/// Gaussian curvature of `A(r) dr^2 + B(r) dtheta^2`:
/// `K = -(1/(2 sqrt(AB))) d/dr (B' / sqrt(AB))`.
pub fn gauss_curvature(prof: &Profile, r1: f64) -> f64 {
    if region_of_radius(r1, &prof.cut) == RegionLabel::K {
        return 0.0;
    }
    let (a, b) = chart_coefficients(prof, Jet::<1>::variable(0, r1).with_order(2));
    let s = (a * b).sqrt();
    let q = b.partial(0) / s;
    -q.derivative(&[0]) / (2.0 * s.value())
}

pub fn induced_metric(r1: f64, theta1: f64, u3: f64, prof: &Profile) -> Result<MetricSample> {
    if !(r1 > 0.0) {
        return Err(Error::BranchCore);
    }
    let region = region_of_radius(r1, &prof.cut);
    let x = Jet::<3>::seed([r1, theta1, u3]).map(|v| v.with_order(2));
    let (a, b) = if region == RegionLabel::K {
        (Jet::constant(1.0).with_order(2), x[0] * x[0])
    } else {
        let r = Jet::<1>::variable(0, r1).with_order(3);
        let (a1, b1) = chart_coefficients(prof, r);
        let lift = |j: Jet<1>| x[0].compose(&[j.value(), j.derivative(&[0]), j.derivative(&[0, 0]), 0.0]);
        (lift(a1), lift(b1))
    };
    let zero = Jet::<3>::constant(0.0).with_order(2);
    let one = Jet::<3>::constant(1.0).with_order(2);
    let gj = [[a, zero, zero], [zero, b, zero], [zero, zero, one]];
    let (christoffel, riem, g, inv) = curvature_from_jets(&gj);
    let det = g[0][0] * g[1][1] * g[2][2];
    if !(det > 0.0) {
        return Err(Error::DegenerateFrame(det));
    }
    Ok(MetricSample {
        point: [r1, theta1, u3],
        region,
        g,
        sqrt_det_g: det.sqrt(),
        christoffel,
        riemann_norm: riemann_norm(&riem, &g, &inv),
        gauss: gauss_curvature(prof, r1),
    })
}

/// Riemann tensor of the chart metric at a point (for structural checks).
pub fn riemann_tensor(r1: f64, prof: &Profile) -> Riemann {
    let x = Jet::<3>::seed([r1, 0.0, 0.0]).map(|v| v.with_order(2));
    let r = Jet::<1>::variable(0, r1).with_order(3);
    let (a1, b1) = chart_coefficients(prof, r);
    let lift = |j: Jet<1>| x[0].compose(&[j.value(), j.derivative(&[0]), j.derivative(&[0, 0]), 0.0]);
    let zero = Jet::<3>::constant(0.0).with_order(2);
    let one = Jet::<3>::constant(1.0).with_order(2);
    curvature_from_jets(&[[lift(a1), zero, zero], [zero, lift(b1), zero], [zero, zero, one]]).1
}

/// Metric in the `(r1, theta1, u3)` chart from the Jacobian Gram matrix of the glued immersion.
pub fn gram_metric(x: &DomainPoint, prof: &Profile) -> Result<Mat3> {
    let w = x.w();
    let n2 = w.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::BranchCore);
    }
    let f = prof.immersion_generic(Jet::<3>::seed(x.x).map(|v| v.with_order(1)));
    let e: [[f64; 6]; 3] = std::array::from_fn(|j| std::array::from_fn(|k| f[k].derivative(&[j])));
    let gx: Mat3 = std::array::from_fn(|i| std::array::from_fn(|j| (0..6).map(|k| e[i][k] * e[j][k]).sum()));
    let m = prof.m as f64;
    let n = n2.sqrt();
    let jac = nalgebra::Matrix3::new(
        m * n.powf(m - 2.0) * x.x[0],
        m * n.powf(m - 2.0) * x.x[1],
        0.0,
        -m * x.x[1] / n2,
        m * x.x[0] / n2,
        0.0,
        0.0,
        0.0,
        1.0,
    );
    let ji = jac.try_inverse().ok_or(Error::DegenerateFrame(0.0))?;
    let gxm = nalgebra::Matrix3::from_fn(|i, j| gx[i][j]);
    let gc = ji.transpose() * gxm * ji;
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| gc[(i, j)])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use approx::assert_relative_eq;

    fn prof(m: u32, t: f64) -> Profile {
        Profile::new(t, &ModelParams { m, ..Default::default() }).unwrap()
    }

    #[test]
    fn pure_sl_value() {
        let (a, b) = pure_sl_coefficients(1.0, 2, 1.0);
        assert_eq!((a, b), (1.25, 1.25));
    }

    #[test]
    fn k_region_is_flat_polar() {
        let p = prof(2, 0.01);
        let r = 1.5 * p.cut.b2;
        let s = induced_metric(r, 0.3, 0.1, &p).unwrap();
        assert_eq!(s.g, [[1.0, 0.0, 0.0], [0.0, r * r, 0.0], [0.0, 0.0, 1.0]]);
        assert!(s.riemann_norm <= 1e-10);
    }

    #[test]
    fn p_chart_is_change_of_variables() {
        let p = prof(3, 0.05);
        let r1 = 0.5 * p.cut.b1;
        let r2 = p.r2(r1);
        let [a, b, _] = metric_diag(&p, r1);
        let [at, bt, _] = p_chart_metric(&p, r2);
        let dr1 = p.r2_prime(r1).recip();
        assert_relative_eq!(a * dr1 * dr1, at, max_relative = 1e-10);
        assert_relative_eq!(b * 9.0, bt, max_relative = 1e-10);
    }

    #[test]
    fn gram_agrees_with_formula() {
        let p = prof(2, 0.01);
        for f in [0.3, 0.9, 1.2, 2.0, 5.0, 20.0, 30.0] {
            let r1 = p.cut.b1 * f;
            let rad = r1.sqrt();
            let x = DomainPoint::new(rad * 0.6, rad * 0.8, 0.2, 1.0);
            let g = gram_metric(&x, &p).unwrap();
            let d = metric_diag(&p, r1);
            for i in 0..3 {
                assert_relative_eq!(g[i][i], d[i], max_relative = 1e-8);
            }
            assert!(g[0][1].abs() <= 1e-8 * (d[0] * d[1]).sqrt());
        }
    }

    #[test]
    fn riemann_matches_gauss_and_product() {
        let p = prof(3, 0.02);
        let r1 = 0.4 * p.cut.b2;
        let s = induced_metric(r1, 0.0, 0.0, &p).unwrap();
        assert_relative_eq!(s.riemann_norm, 2.0 * s.gauss.abs(), max_relative = 1e-8);
        let r = riemann_tensor(r1, &p);
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        if [i, j, k, l].contains(&2) {
                            worst = worst.max(r[i][j][k][l].abs());
                        }
                    }
                }
            }
        }
        assert!(worst <= 1e-9);
    }

    #[test]
    fn symmetric_christoffels() {
        let p = prof(2, 0.01);
        let s = induced_metric(0.3 * p.cut.b2, 0.1, 0.0, &p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(s.christoffel[i][j][k], s.christoffel[i][k][j]);
                }
            }
        }
    }
}
