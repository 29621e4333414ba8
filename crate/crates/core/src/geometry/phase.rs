//! Phase function `eps^t = Im Omega' / dV` and its differential.

use serde::{Deserialize, Serialize};

use crate::flat_model::{gram_det, holomorphic_volume};
use crate::gluing::{region_of_radius, Profile, RegionLabel};
use crate::jet::{Jet, Scalar};

/// Which field is integrated on `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseField {
    /// the phase of the glued immersion itself (identically zero on `P`)
    Exact,
    /// the first-order model `eps = r1 + r2`, `|d eps| = 1 + m a^-1 t^(1-m) r2^(m-1)` on `P`
    TaylorModel,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSample {
    /// `(r1, theta1)`
    pub point: [f64; 2],
    pub region: RegionLabel,
    pub eps: f64,
    pub grad_eps_norm: f64,
}

/// `eps = -cos((1 + 1/m) theta1) (r2/m - r1 r2') / sqrt((1 + r2'^2)(r1^2 + r2^2/m^2))`.
pub fn eps_closed_form<S: Scalar>(prof: &Profile, r1: S, theta1: S, r2: S, r2p: S) -> S {
    let m = prof.m as f64;
    let num = (theta1 * (1.0 + 1.0 / m)).cos() * (r2 / m - r1 * r2p);
    let den = ((r2p * r2p + 1.0) * (r1 * r1 + r2 * r2 / (m * m))).sqrt();
    -(num / den)
}

/// The glued immersion in the chart `(r1, theta1, u3)`.
pub fn chart_immersion<S: Scalar>(prof: &Profile, x: [S; 3]) -> [S; 6] {
    let m = prof.m as f64;
    let (r, th) = (x[0], x[1]);
    let r2 = prof.r2(r);
    let ph = th / m;
    [r * th.cos(), r * th.sin(), x[2], r2 * ph.cos(), -(r2 * ph.sin()), S::cst(0.0)]
}

/// `Im Omega'(e1, e2, e3) / sqrt(det Gram)` for the chart frame of the glued immersion.
pub fn eps_from_frame(prof: &Profile, r1: f64, theta1: f64) -> f64 {
    let f = chart_immersion(prof, Jet::<3>::seed([r1, theta1, 0.0]).map(|v| v.with_order(1)));
    let e: [[f64; 6]; 3] = std::array::from_fn(|j| std::array::from_fn(|k| f[k].derivative(&[j])));
    holomorphic_volume(&e).im / gram_det(&e).sqrt()
}

fn exact(prof: &Profile, r1: f64, theta1: f64) -> (f64, f64) {
    let x = Jet::<2>::seed([r1, theta1]).map(|v| v.with_order(2));
    let r2 = prof.r2(x[0]);
    let r2p = r2.partial(0);
    let e = eps_closed_form(prof, x[0].with_order(1), x[1].with_order(1), r2.with_order(1), r2p);
    let (a, b) = {
        let s = r2p.value();
        let m = prof.m as f64;
        (1.0 + s * s, r1 * r1 + r2.value().powi(2) / (m * m))
    };
    let [dr, dt] = e.gradient();
    (e.value(), (dr * dr / a + dt * dt / b).sqrt())
}

pub fn phase(r1: f64, theta1: f64, prof: &Profile, field: PhaseField) -> PhaseSample {
    let region = region_of_radius(r1, &prof.cut);
    let (eps, grad) = match (region, field) {
        (RegionLabel::K, _) => (0.0, 0.0),
        (RegionLabel::P, PhaseField::Exact) => (0.0, 0.0),
        (RegionLabel::P, PhaseField::TaylorModel) => taylor_model(prof, prof.r2(r1)),
        (RegionLabel::Q, _) => exact(prof, r1, theta1),
    };
    PhaseSample { point: [r1, theta1], region, eps, grad_eps_norm: grad }
}

/// The model field on `P` in terms of `r2`.
pub fn taylor_model(prof: &Profile, r2: f64) -> (f64, f64) {
    let m = prof.m as f64;
    let r1 = r2.powf(m) / (prof.a * prof.t.powf(m - 1.0));
    let x = m / prof.a * prof.t.powf(1.0 - m) * r2.powf(m - 1.0);
    (r1 + r2, 1.0 + x)
}

/// Closed-form `eps` evaluated with `f64` (used by norm integrators).
pub fn eps_q(prof: &Profile, r1: f64, theta1: f64) -> f64 {
    eps_closed_form(prof, r1, theta1, prof.r2(r1), prof.r2_prime(r1))
}

/// `|d eps|_g` on `Q` at `(r1, theta1)`.
pub fn grad_eps_q(prof: &Profile, r1: f64, theta1: f64) -> f64 {
    exact(prof, r1, theta1).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ModelParams;
    use approx::assert_abs_diff_eq;

    fn prof(m: u32, t: f64) -> Profile {
        Profile::new(t, &ModelParams { m, ..Default::default() }).unwrap()
    }

    #[test]
    fn closed_form_matches_frame() {
        for m in [2, 3, 4] {
            let p = prof(m, 0.01);
            for f in [0.05, 0.2, 0.5, 0.7, 0.95] {
                for th in [0.1, 1.3, 2.9, 5.0] {
                    let r1 = p.cut.b2 * f;
                    assert_abs_diff_eq!(eps_q(&p, r1, th), eps_from_frame(&p, r1, th), epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_on_k_and_exact_sl() {
        let p = prof(2, 0.01);
        assert_eq!(phase(2.0 * p.cut.b2, 0.4, &p, PhaseField::Exact).eps, 0.0);
        let r1 = 0.5 * p.cut.b1;
        assert!(eps_from_frame(&p, r1, 0.7).abs() <= 1e-10);
        assert!(eps_q(&p, r1, 0.7).abs() <= 1e-10);
    }

    #[test]
    fn gradient_matches_differences() {
        let p = prof(3, 0.02);
        let (r1, th) = (0.4 * p.cut.b2, 0.9);
        let h = 1e-6 * r1;
        let dr = (eps_q(&p, r1 + h, th) - eps_q(&p, r1 - h, th)) / (2.0 * h);
        let dt = (eps_q(&p, r1, th + 1e-6) - eps_q(&p, r1, th - 1e-6)) / 2e-6;
        let [a, b, _] = crate::geometry::metric::metric_diag(&p, r1);
        let fd = (dr * dr / a + dt * dt / b).sqrt();
        let g = grad_eps_q(&p, r1, th);
        assert!((fd - g).abs() <= 1e-5 * g.max(1e-12), "{fd} {g}");
    }

    #[test]
    fn bounded_by_one() {
        let p = prof(2, 0.001);
        for i in 1..400 {
            let r1 = p.cut.b1 + (p.cut.b2 - p.cut.b1) * i as f64 / 400.0;
            assert!(phase(r1, 0.3 * i as f64, &p, PhaseField::Exact).eps.abs() <= 1.0);
        }
    }
}
