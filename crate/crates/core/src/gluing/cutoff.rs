//! The C^3 cutoff `chi^t`: one on `(0, b1]`, zero on `[b2, R0)`.
//!
//! The third derivative is a piecewise-linear sum of three tents, convolved
//! with the bump `phi_h(y) = 3/(4h) (1 - (y/h)^2)`. Writing the tent sum as
//! `sum_j s_j (x - k_j)_+`, every lower derivative is `sum_j s_j R_n(x - k_j)`
//! with `R_n(x) = E[(x - Y)_+^(n+1)] / (n+1)!`, `Y ~ phi_h`. Everything is
//! built at unit scale `b2 = 1` and rescaled.

use crate::error::{Error, Result};

const GL_X: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL_W: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];

#[derive(Clone, Debug)]
pub struct SmoothCutoff {
    pub t: f64,
    pub b1: f64,
    pub b2: f64,
    pub r0: f64,
    /// mollifier half-width at unit scale
    h: f64,
    knots: [f64; 7],
    slopes: [f64; 7],
    /// tent heights `a1, a2, a3` at unit scale
    pub amplitudes: [f64; 3],
    /// `max_k sup |chi^(k)| b2^k`, `k = 1, 2, 3`, over dense samples
    pub c0: f64,
}

fn bump(h: f64, y: f64) -> f64 {
    if y.abs() >= h {
        0.0
    } else {
        0.75 / h * (1.0 - (y / h).powi(2))
    }
}

fn bump_cdf(h: f64, x: f64) -> f64 {
    if x <= -h {
        0.0
    } else if x >= h {
        1.0
    } else {
        let s = x / h;
        0.5 + 0.75 * (s - s * s * s / 3.0)
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).product::<u32>() as f64
}

/// `R_n(x)` for `n = 0..=3`; exact since the integrand has degree `<= 6`.
fn ramp_antiderivative(h: f64, n: u32, x: f64) -> f64 {
    if x <= -h {
        return 0.0;
    }
    let hi = x.min(h);
    let (mid, half) = (0.5 * (hi - h), 0.5 * (hi + h));
    let p = n as i32 + 1;
    let s: f64 = GL_X
        .iter()
        .zip(GL_W)
        .map(|(&g, w)| {
            let y = mid + half * g;
            w * bump(h, y) * (x - y).powi(p)
        })
        .sum();
    s * half / factorial(n + 1)
}

/// Slope jumps of the tent sum with unit heights, one row per tent.
fn unit_slope_jumps(k: &[f64; 7]) -> [[f64; 7]; 3] {
    let mut out = [[0.0; 7]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        let (l, c, r) = (k[2 * i], k[2 * i + 1], k[2 * i + 2]);
        let (up, down) = (1.0 / (c - l), -1.0 / (r - c));
        row[2 * i] = up;
        row[2 * i + 1] = down - up;
        row[2 * i + 2] = -down;
    }
    out
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let m = nalgebra::Matrix3::from_fn(|i, j| a[i][j]);
    m.lu().solve(&nalgebra::Vector3::from(b)).map(|v| [v[0], v[1], v[2]])
}

impl SmoothCutoff {
    pub fn new(t: f64, b1: f64, b2: f64, r0: f64) -> Result<Self> {
        if !(b1 > 0.0 && b1 < b2 / 8.0 && b2 < r0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff needs 0 < b1 < b2/8 < b2 < R0 (b1 = {b1:e}, b2 = {b2:e}, R0 = {r0})"
            )));
        }
        let beta = b1 / b2;
        let h = (1.0 / 64.0f64).min((0.125 - beta) / 2.0);
        let knots = [beta + h, 0.125, 0.25, 0.5, 0.75, 0.875, 1.0 - h];
        let unit = unit_slope_jumps(&knots);
        let mut a = [[0.0; 3]; 3];
        for (q, row) in a.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                *cell = (0..7).map(|j| unit[i][j] * knots[j].powi(q as i32 + 2)).sum();
            }
        }
        let amps = solve3(a, [0.0, 0.0, -24.0]).ok_or_else(|| Error::Internal("singular cutoff moment system".into()))?;
        let slopes = std::array::from_fn(|j| (0..3).map(|i| amps[i] * unit[i][j]).sum());
        let mut c = SmoothCutoff { t, b1, b2, r0, h, knots, slopes, amplitudes: amps, c0: 0.0 };
        c.c0 = c.certify(10_000);
        Ok(c)
    }

    /// Derivatives of order `0..=5` at unit scale.
    fn unit_derivs(&self, x: f64) -> [f64; 6] {
        let mut d = [0.0; 6];
        d[0] = 1.0;
        for (&k, &s) in self.knots.iter().zip(&self.slopes) {
            let y = x - k;
            for n in 0..4u32 {
                d[3 - n as usize] += s * ramp_antiderivative(self.h, n, y);
            }
            d[4] += s * bump_cdf(self.h, y);
            d[5] += s * bump(self.h, y);
        }
        d
    }

    /// `chi^(k)(r)` for `k = 0..=5`, exactly constant outside `(b1, b2)`.
    pub fn derivs(&self, r: f64) -> [f64; 6] {
        if r <= self.b1 {
            return [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        }
        if r >= self.b2 {
            return [0.0; 6];
        }
        let mut d = self.unit_derivs(r / self.b2);
        let mut s = 1.0;
        for v in d.iter_mut().skip(1) {
            s /= self.b2;
            *v *= s;
        }
        d
    }

    pub fn value(&self, r: f64) -> f64 {
        self.derivs(r)[0]
    }

    /// `max_k sup |chi^(k)| b2^k` over `n` uniform samples of `[b1, b2]`.
    pub fn certify(&self, n: usize) -> f64 {
        let beta = self.b1 / self.b2;
        (0..=n)
            .map(|i| {
                let d = self.unit_derivs(beta + (1.0 - beta) * i as f64 / n as f64);
                d[1].abs().max(d[2].abs()).max(d[3].abs())
            })
            .fold(0.0, f64::max)
    }

    /// Smallest and largest sampled value of `chi`.
    pub fn range(&self, n: usize) -> (f64, f64) {
        let beta = self.b1 / self.b2;
        (0..=n)
            .map(|i| self.unit_derivs(beta + (1.0 - beta) * i as f64 / n as f64)[0])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }

    /// All seven knots of the third derivative, scaled to `[b1, b2]`.
    pub fn knots(&self) -> [f64; 7] {
        self.knots.map(|k| k * self.b2)
    }

    /// Knot radii `r_1 .. r_5` of the piecewise-linear third derivative.
    pub fn inner_knots(&self) -> [f64; 5] {
        std::array::from_fn(|i| self.knots[i + 1] * self.b2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_bad_ordering() {
        assert!(SmoothCutoff::new(0.1, 0.2, 1.0, 2.0).is_err());
        assert!(SmoothCutoff::new(0.1, 0.01, 1.0, 0.5).is_err());
    }

    #[test]
    fn endpoints_are_exact() {
        let c = SmoothCutoff::new(0.01, 0.1, 4.0, 16.0).unwrap();
        assert_eq!(c.derivs(0.05), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.derivs(4.0), [0.0; 6]);
        let lo = c.unit_derivs(c.b1 / c.b2 + 1e-12);
        let hi = c.unit_derivs(1.0 - 1e-12);
        for k in 0..6 {
            let tol = if k < 4 { 1e-9 } else { 1e-4 };
            assert_abs_diff_eq!(lo[k], (k == 0) as u8 as f64, epsilon = tol);
            assert_abs_diff_eq!(hi[k], 0.0, epsilon = tol);
        }
    }

    #[test]
    fn derivatives_are_consistent() {
        let c = SmoothCutoff::new(0.01, 0.01, 1.0, 16.0).unwrap();
        let eps = 1e-6;
        for &r in &[0.05, 0.13, 0.3, 0.52, 0.8, 0.97] {
            let (a, b, d) = (c.derivs(r - eps), c.derivs(r + eps), c.derivs(r));
            for k in 0..5 {
                let fd = (b[k] - a[k]) / (2.0 * eps);
                assert!((fd - d[k + 1]).abs() <= 1e-5 * (1.0 + d[k + 1].abs()), "k={k} r={r}: {fd} vs {}", d[k + 1]);
            }
        }
    }

    #[test]
    fn stays_in_unit_interval() {
        let c = SmoothCutoff::new(0.01, 0.001, 1.0, 16.0).unwrap();
        let (lo, hi) = c.range(5000);
        assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12, "{lo} {hi}");
    }

    #[test]
    fn signs_of_tents() {
        let c = SmoothCutoff::new(0.01, 0.001, 1.0, 16.0).unwrap();
        let [a1, a2, a3] = c.amplitudes;
        assert!(a1 < 0.0 && a2 > 0.0 && a3 < 0.0, "{a1} {a2} {a3}");
    }

    #[test]
    fn ramp_matches_closed_form_away_from_support() {
        let h: f64 = 0.1;
        for n in 0..4u32 {
            let x: f64 = 0.7;
            let p = n as i32 + 1;
            // E[(x - Y)^p] with E[Y^2] = h^2/5, E[Y^4] = 3h^4/35
            let m2 = h * h / 5.0;
            let m4 = 3.0 * h.powi(4) / 35.0;
            let e = match p {
                1 => x,
                2 => x * x + m2,
                3 => x.powi(3) + 3.0 * x * m2,
                _ => x.powi(4) + 6.0 * x * x * m2 + m4,
            };
            assert_abs_diff_eq!(ramp_antiderivative(h, n, x), e / factorial(n + 1), epsilon = 1e-15);
        }
    }
}
