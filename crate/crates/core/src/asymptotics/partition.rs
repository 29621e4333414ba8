//! The cutoff `F = G(log r / log t)` between the glued region and the
//! rescaled model, and its two Sobolev rates.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::{assemble, NormCurve};
use super::quadrature::adaptive;
use super::regions::{BoundKind, Quantity};
use crate::error::{Error, Result};
use crate::params::ModelParams;

const MAX_PANELS: usize = 20_000;

/// Profile `G` on `[a, b]`: equal to 1 below `a`, 0 above `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionProfile {
    /// `1 - S((s - a)/(b - a))` with the degree-7 smoothstep `S`
    Smoothstep,
    /// `G = 1` on `[a, b]`: the partition jumps at `r = t^b` and `dF = 0` elsewhere
    One,
}

pub fn smoothstep7(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x.powi(4) * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x.powi(3))
}

pub fn smoothstep7_prime(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    140.0 * (x * (1.0 - x)).powi(3)
}

impl PartitionProfile {
    pub fn g(&self, s: f64, a: f64, b: f64) -> f64 {
        match self {
            PartitionProfile::One => {
                if s <= b {
                    1.0
                } else {
                    0.0
                }
            }
            PartitionProfile::Smoothstep => 1.0 - smoothstep7((s - a) / (b - a)),
        }
    }

    pub fn g_prime(&self, s: f64, a: f64, b: f64) -> f64 {
        match self {
            PartitionProfile::One => 0.0,
            PartitionProfile::Smoothstep => -smoothstep7_prime((s - a) / (b - a)) / (b - a),
        }
    }
}

fn check(a: f64, b: f64, t: f64) -> Result<()> {
    if !(0.0 < a && a < b && b < 1.0) {
        return Err(Error::InvalidParameter(format!("need 0 < a < b < 1 (a = {a}, b = {b})")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} outside (0, 1)")));
    }
    Ok(())
}

fn s_breaks(a: f64, b: f64) -> Vec<f64> {
    (0..=16).map(|i| a + (b - a) * i as f64 / 16.0).collect()
}

/// `||dF||_{L^3}` on the flat chart, `r in [t^b, t^a]`, `theta in [0, 2 m pi)`.
///
/// In `s = log r / log t` the integral is `|log t|^-2 int_a^b |G'(s)|^3 t^-s ds`.
pub fn df_l3(t: f64, prm: &ModelParams, profile: PartitionProfile) -> Result<f64> {
    let (a, b) = (prm.part_a, prm.part_b);
    check(a, b, t)?;
    if profile == PartitionProfile::One {
        return Ok(0.0);
    }
    let lt = -t.ln();
    // scaled by t^b to keep the integrand O(1)
    let f = |s: f64| profile.g_prime(s, a, b).abs().powi(3) * ((s - b) * lt).exp();
    let q = adaptive(&f, &s_breaks(a, b), prm.quad_tol, 1e-300, MAX_PANELS)?;
    let total = q.value * 2.0 * PI * prm.mf() * prm.l / (lt * lt);
    Ok(((total.ln() + b * lt) / 3.0).exp())
}

/// `||1 - F||_{L^{6/5}}` on the rescaled model with density
/// `r (1 + m^-2 a^(2/m) r^(2(1-m)/m))`, using the unscaled amplitude `a`.
pub fn one_minus_f_l65(t: f64, prm: &ModelParams, profile: PartitionProfile) -> Result<f64> {
    let (a, b) = (prm.part_a, prm.part_b);
    check(a, b, t)?;
    let m = prm.mf();
    let c = prm.a.powf(2.0 / m) / (m * m);
    let lt = -t.ln();
    let e = 2.0 / m;
    // below t^b, 1 - F = 1 and the radial integral is closed-form
    let inner = t.powf(2.0 * b) / 2.0 + c * t.powf(e * b) / e;
    // dr = r |log t| ds with r = t^s
    let f = |s: f64| {
        let w = 1.0 - profile.g(s, a, b);
        w.abs().powf(1.2) * (t.powf(2.0 * s) + c * t.powf(e * s)) * lt
    };
    let q = adaptive(&f, &s_breaks(a, b), prm.quad_tol, 1e-300, MAX_PANELS)?;
    let total = (inner + q.value) * 2.0 * PI * m * prm.l;
    Ok(total.powf(5.0 / 6.0))
}

/// The midpoint of the upper third of `[a, b]` used for the lower rate.
pub fn b_prime(a: f64, b: f64) -> f64 {
    a + 2.0 * (b - a) / 3.0
}

/// Accepted window for the log-corrected `dF` exponent.
pub fn df_window(prm: &ModelParams) -> (f64, f64) {
    let (a, b) = (prm.part_a, prm.part_b);
    (-b / 3.0 - 0.05, -b_prime(a, b) / 3.0 + 0.05)
}

pub fn one_minus_f_rate(prm: &ModelParams) -> f64 {
    5.0 * prm.part_a / (3.0 * prm.mf())
}

pub fn partition_curve(quantity: Quantity, prm: &ModelParams) -> Result<NormCurve> {
    partition_curve_with(quantity, prm, PartitionProfile::Smoothstep)
}

pub fn partition_curve_with(quantity: Quantity, prm: &ModelParams, profile: PartitionProfile) -> Result<NormCurve> {
    let (f, pred, kind, log_power): (fn(f64, &ModelParams, PartitionProfile) -> Result<f64>, _, _, _) = match quantity {
        Quantity::DfL3 => (df_l3, -prm.part_b / 3.0, BoundKind::UpperBound, -1.0),
        Quantity::OneMinusFL65 => (one_minus_f_l65, one_minus_f_rate(prm), BoundKind::EqualityOrder, 0.0),
        other => return Err(Error::InvalidParameter(format!("{other} is not a partition quantity"))),
    };
    let samples = prm
        .t_grid
        .par_iter()
        .map(|&t| f(t, prm, profile).map(|v| (t, v)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(quantity, "L'".into(), prm, samples, Some(pred), kind, log_power))
}

/// Both partition curves for the current `part_a`, `part_b`.
pub fn sobolev_partition_curves(prm: &ModelParams, profile: PartitionProfile) -> Result<(NormCurve, NormCurve)> {
    Ok((
        partition_curve_with(Quantity::DfL3, prm, profile)?,
        partition_curve_with(Quantity::OneMinusFL65, prm, profile)?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionVerdict {
    pub df_exponent: f64,
    pub df_window: (f64, f64),
    pub df_pass: bool,
    pub one_minus_f_exponent: f64,
    pub one_minus_f_predicted: f64,
    pub one_minus_f_pass: bool,
}

pub fn judge_partition(df: &NormCurve, omf: &NormCurve, prm: &ModelParams) -> PartitionVerdict {
    let w = df_window(prm);
    let pred = one_minus_f_rate(prm);
    PartitionVerdict {
        df_exponent: df.fitted_exponent,
        df_window: w,
        df_pass: df.fitted_exponent >= w.0 && df.fitted_exponent <= w.1,
        one_minus_f_exponent: omf.fitted_exponent,
        one_minus_f_predicted: pred,
        one_minus_f_pass: (omf.fitted_exponent - pred).abs() <= 0.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep7(0.0), 0.0);
        assert_relative_eq!(smoothstep7(1.0), 1.0);
        assert_relative_eq!(smoothstep7(0.5), 0.5);
        let h = 1e-6;
        for x in [0.1, 0.4, 0.77] {
            let fd = (smoothstep7(x + h) - smoothstep7(x - h)) / (2.0 * h);
            assert!((fd - smoothstep7_prime(x)).abs() < 1e-7);
        }
    }

    #[test]
    fn df_matches_radial_quadrature() {
        let prm = ModelParams::default();
        let t: f64 = 0.01;
        let v = df_l3(t, &prm, PartitionProfile::Smoothstep).unwrap();
        // direct integral in r
        let (lo, hi) = (t.powf(prm.part_b), t.powf(prm.part_a));
        let lt = t.ln();
        let n = 200_000;
        let h = (hi - lo) / n as f64;
        let s: f64 = (0..=n)
            .map(|i| {
                let r = lo + h * i as f64;
                let g = PartitionProfile::Smoothstep.g_prime(r.ln() / lt, prm.part_a, prm.part_b);
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * (g / (lt * r)).abs().powi(3) * r
            })
            .sum::<f64>()
            * h
            * 2.0
            * PI
            * 2.0;
        assert_relative_eq!(v, s.cbrt(), max_relative = 1e-6);
    }

    #[test]
    fn constant_profile_has_zero_gradient() {
        let prm = ModelParams::default();
        assert_eq!(df_l3(0.01, &prm, PartitionProfile::One).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_order() {
        let prm = ModelParams { part_a: 0.7, part_b: 0.6, ..Default::default() };
        assert!(df_l3(0.01, &prm, PartitionProfile::Smoothstep).is_err());
    }

    #[test]
    fn rates_for_default_config() {
        let prm = ModelParams::default();
        let (df, omf) = sobolev_partition_curves(&prm, PartitionProfile::Smoothstep).unwrap();
        let v = judge_partition(&df, &omf, &prm);
        assert!(v.df_pass, "{v:?}");
        assert!(v.one_minus_f_pass, "{v:?}");
    }
}
