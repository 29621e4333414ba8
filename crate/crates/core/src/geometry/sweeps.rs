//! Radial sweeps: curvature supremum, conjugate-radius proxy, fibre-radius slope
//! and the three summands of the quasi-isometry estimate.

use std::f64::consts::PI;

use crate::geometry::metric::{gauss_curvature, induced_metric};
use crate::gluing::Profile;
use crate::params::ModelParams;

pub fn log_mesh(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp()).collect()
}

/// Radial mesh of `[t R0', b2]`, densified inside the cutoff annulus.
pub fn radial_mesh(prof: &Profile, r_min: f64, n: usize) -> Vec<f64> {
    let c = &prof.cut;
    let mut v = log_mesh(r_min, c.b1, n / 2);
    let m = n - n / 2;
    v.extend((1..=m).map(|i| c.b1 + (c.b2 - c.b1) * i as f64 / m as f64));
    v.retain(|&r| r < c.b2);
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureSweep {
    pub sup_riemann: f64,
    pub sup_abs_gauss: f64,
    pub sup_gauss: f64,
}

pub fn curvature_sweep(prof: &Profile, r_min: f64, n: usize) -> CurvatureSweep {
    let mut out = CurvatureSweep { sup_riemann: 0.0, sup_abs_gauss: 0.0, sup_gauss: f64::NEG_INFINITY };
    for r in radial_mesh(prof, r_min, n) {
        if let Ok(s) = induced_metric(r, 0.0, 0.0, prof) {
            out.sup_riemann = out.sup_riemann.max(s.riemann_norm);
        }
        let k = gauss_curvature(prof, r);
        out.sup_abs_gauss = out.sup_abs_gauss.max(k.abs());
        out.sup_gauss = out.sup_gauss.max(k);
    }
    out
}

/// `pi / sqrt(sup |K|)`, infinite when the sampled metric is flat.
pub fn conjugate_radius_proxy(prof: &Profile, r_min: f64, n: usize) -> f64 {
    let k = curvature_sweep(prof, r_min, n).sup_abs_gauss;
    if k > 0.0 {
        PI / k.sqrt()
    } else {
        f64::INFINITY
    }
}

/// `min 1/sqrt(1 + r2'^2)` over `[t R0', b2]`, divided by `t`.
pub fn fiber_radius_check(prof: &Profile, prm: &ModelParams, n: usize) -> f64 {
    let t = prof.t;
    radial_mesh(prof, t * prm.r0_prime, n)
        .into_iter()
        .map(|r| 1.0 / (1.0 + prof.r2_prime(r).powi(2)).sqrt())
        .fold(1.0, f64::min)
        / t
}

/// Suprema over `[b1, min(t^a, b2)]` of `a^(1/m) tau m/(m+1) |chi''|`,
/// `a^(1/m) tau |chi'| r^(1/m)` and `a^(1/m) tau chi r^((1-m)/m) / m`.
pub fn quasi_isometry_summands(prof: &Profile, part_a: f64, n: usize) -> [f64; 3] {
    let m = prof.m as f64;
    let c = &prof.cut;
    let hi = prof.t.powf(part_a).min(c.b2);
    if hi <= c.b1 {
        return [0.0; 3];
    }
    let mut s = [0.0f64; 3];
    for i in 0..=n {
        let r = c.b1 + (hi - c.b1) * i as f64 / n as f64;
        let d = c.derivs(r);
        s[0] = s[0].max(prof.scale * m / (m + 1.0) * d[2].abs());
        s[1] = s[1].max(prof.scale * d[1].abs() * r.powf(1.0 / m));
        s[2] = s[2].max(prof.scale * d[0] * r.powf((1.0 - m) / m) / m);
    }
    s
}

/// Predicted exponents `2 eta2 - 1 - 1/m`, `eta2 - (1 - a)/m`, `(1 - 1/m) eta1`.
pub fn quasi_isometry_exponents(prm: &ModelParams) -> [f64; 3] {
    let m = prm.mf();
    [2.0 * prm.eta2 - 1.0 - 1.0 / m, prm.eta2 - (1.0 - prm.part_a) / m, (1.0 - 1.0 / m) * prm.eta1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::JoinSchedule;

    fn eta_params() -> ModelParams {
        ModelParams {
            m: 2,
            schedule: JoinSchedule::Eta,
            eta1: 0.5,
            eta2: 0.8,
            part_a: 0.1,
            c_eta1: 1.0,
            c_eta2: 8.0,
            r0_prime: 0.5,
            ..Default::default()
        }
    }

    #[test]
    fn flat_slope_is_one() {
        let prm = ModelParams::default();
        let p = Profile::new(0.01, &prm).unwrap();
        assert_eq!(1.0 / (1.0 + p.r2_prime(2.0 * p.cut.b2).powi(2)).sqrt(), 1.0);
    }

    #[test]
    fn summands_decay() {
        let prm = eta_params();
        let s: Vec<[f64; 3]> = [1e-3, 1e-5, 1e-7]
            .iter()
            .map(|&t| quasi_isometry_summands(&Profile::new(t, &prm).unwrap(), prm.part_a, 2000))
            .collect();
        for k in 0..3 {
            assert!(s[2][k] < s[1][k] && s[1][k] < s[0][k], "{k}: {s:?}");
        }
    }

    #[test]
    fn proxy_refines() {
        let prm = ModelParams::default();
        let p = Profile::new(2f64.powi(-8), &prm).unwrap();
        let r0 = p.t * prm.r0_prime;
        let a = conjugate_radius_proxy(&p, r0, 400);
        let b = conjugate_radius_proxy(&p, r0, 800);
        assert!(((a - b) / b).abs() <= 0.05);
    }
}
