//! `L^p` and sup norms of the phase and its differential on `P`, `Q`, `K`,
//! the per-quantity t-sweeps and their verdicts.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{bounded_tail, fit_exponent, Extremum};
use super::partition;
use super::quadrature::{adaptive, graded_breaks, graded_from_zero, mean_abs_cos_pow, pairwise, trapezoid_periodic};
use super::regions::{predicted_exponent, BoundKind, Quantity};
use crate::error::{Error, Result};
use crate::geometry::metric::{chart_coefficients, p_chart_metric};
use crate::geometry::phase::{eps_q, grad_eps_q, taylor_model};
use crate::gluing::{Profile, RegionLabel};
use crate::params::ModelParams;

const MAX_PANELS: usize = 20_000;

/// Scalar fields on the glued domain. On `P` the phase fields use the
/// first-order model of the deformation (the glued immersion is exactly
/// special Lagrangian there).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Field {
    Eps,
    GradEps,
    Constant(f64),
}

fn check_p(p: f64) -> Result<()> {
    if [1.0, 1.2, 2.0, 3.0, 6.0].iter().any(|&q| (p - q).abs() < 1e-12) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p = {p} not in {{1, 6/5, 2, 3, 6}}")))
    }
}

/// Nodes of the periodic rule in `theta1`; exact for `|d eps|^6`, a trigonometric
/// polynomial of degree `6(m+1)` in `theta1/m`.
pub fn theta_nodes(m: u32) -> usize {
    12 * (m as usize + 1)
}

/// `r2` at the inner join radius: the outer edge of `P` in its own chart.
pub fn p_extent(prof: &Profile) -> f64 {
    prof.r2(prof.cut.b1)
}

/// Radius where `m a^-1 t^(1-m) r2^(m-1) = 1`.
fn p_transition(prof: &Profile) -> f64 {
    let m = prof.m as f64;
    if prof.m == 1 {
        return 0.0;
    }
    ((prof.a / m).ln() / (m - 1.0) + prof.t.ln()).exp()
}

/// `(int |field|^p dV)^(1/p)` over one piece of the glued domain.
pub fn integrate_norm(field: Field, region: RegionLabel, p: f64, t: f64, prm: &ModelParams) -> Result<f64> {
    check_p(p)?;
    let prof = Profile::new(t, prm)?;
    integrate_norm_on(&prof, field, region, p, prm)
}

pub fn integrate_norm_on(prof: &Profile, field: Field, region: RegionLabel, p: f64, prm: &ModelParams) -> Result<f64> {
    let m = prof.m as f64;
    let l = prm.l;
    let tol = prm.quad_tol;
    let cut = &prof.cut;
    let total = match (region, field) {
        (RegionLabel::P, _) => {
            let hi = p_extent(prof);
            let breaks = graded_from_zero(hi, 1e-12, 2.0, &[p_transition(prof)]);
            let f = |r2: f64| {
                let v = match field {
                    Field::Eps => taylor_model(prof, r2).0,
                    Field::GradEps => taylor_model(prof, r2).1,
                    Field::Constant(c) => c,
                };
                let g = p_chart_metric(prof, r2);
                v.abs().powf(p) * (g[0] * g[1]).sqrt()
            };
            adaptive(&f, &breaks, tol, 1e-300, MAX_PANELS)?.value * 2.0 * PI * l
        }
        (RegionLabel::Q, _) => {
            let breaks = graded_breaks(cut.b1, cut.b2, 2.0, &cut.knots());
            let period = 2.0 * PI * m;
            let n = theta_nodes(prof.m);
            let mean_cos = mean_abs_cos_pow(p);
            let f = |r1: f64| {
                let (a, b) = chart_coefficients(prof, r1);
                let dens = (a * b).sqrt();
                let ang = match field {
                    // eps = -cos((1 + 1/m) theta1) F(r1) over m + 1 full periods
                    Field::Eps => eps_q(prof, r1, 0.0).abs().powf(p) * period * mean_cos,
                    Field::GradEps => trapezoid_periodic(|th| grad_eps_q(prof, r1, th).powf(p), period, n),
                    Field::Constant(c) => c.abs().powf(p) * period,
                };
                ang * dens
            };
            adaptive(&f, &breaks, tol, 1e-300, MAX_PANELS)?.value * l
        }
        (RegionLabel::K, Field::Constant(c)) => {
            let breaks = graded_breaks(cut.b2, prm.r0, 2.0, &[]);
            let f = |r1: f64| c.abs().powf(p) * r1;
            adaptive(&f, &breaks, tol, 1e-300, MAX_PANELS)?.value * 2.0 * PI * m * l
        }
        (RegionLabel::K, _) => 0.0,
    };
    Ok(total.powf(1.0 / p))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    /// relative change between the last two refinement levels
    pub delta: f64,
    pub converged: bool,
}

/// Maximum of `|field|` on one piece, on three nested meshes, each followed by
/// a local zoom around the current maximiser.
pub fn sup_norm(field: Field, region: RegionLabel, t: f64, prm: &ModelParams) -> Result<SupNorm> {
    let prof = Profile::new(t, prm)?;
    Ok(sup_norm_on(&prof, field, region))
}

pub fn sup_norm_on(prof: &Profile, field: Field, region: RegionLabel) -> SupNorm {
    let cut = &prof.cut;
    let m = prof.m;
    let eval = |r: f64, th: f64| -> f64 {
        match (region, field) {
            (_, Field::Constant(c)) => c.abs(),
            (RegionLabel::K, _) => 0.0,
            (RegionLabel::P, Field::Eps) => taylor_model(prof, r).0.abs(),
            (RegionLabel::P, Field::GradEps) => taylor_model(prof, r).1.abs(),
            (RegionLabel::Q, Field::Eps) => eps_q(prof, r, th).abs(),
            (RegionLabel::Q, Field::GradEps) => grad_eps_q(prof, r, th),
        }
    };
    let (lo, hi) = match region {
        RegionLabel::P => (p_extent(prof) * 1e-9, p_extent(prof)),
        RegionLabel::Q => (cut.b1, cut.b2),
        RegionLabel::K => (cut.b2, cut.r0.max(cut.b2 * 2.0)),
    };
    let angular = matches!((region, field), (RegionLabel::Q, Field::Eps | Field::GradEps));
    let period = 2.0 * PI * m as f64;
    let mut levels = Vec::new();
    for level in 0..3 {
        let nr = 64usize << level;
        let nt = if angular { (theta_nodes(m) / 2) << level } else { 1 };
        let rs: Vec<f64> = (0..=nr).map(|i| lo * (hi / lo).powf(i as f64 / nr as f64)).collect();
        let mut best = (0.0, 0usize, 0usize);
        for (i, &r) in rs.iter().enumerate() {
            for j in 0..nt {
                let v = eval(r, period * j as f64 / nt as f64);
                if v > best.0 {
                    best = (v, i, j);
                }
            }
        }
        // zoom on the neighbouring cells of the maximiser
        let (i, j) = (best.1, best.2);
        let r_lo = rs[i.saturating_sub(1)];
        let r_hi = rs[(i + 1).min(nr)];
        let dth = if angular { period / nt as f64 } else { 0.0 };
        let th0 = period * j as f64 / nt.max(1) as f64;
        let mut v = best.0;
        for a in 0..=32 {
            let r = r_lo + (r_hi - r_lo) * a as f64 / 32.0;
            let nb = if angular { 32 } else { 0 };
            for b in 0..=nb {
                let th = th0 - dth + 2.0 * dth * b as f64 / 32.0;
                v = v.max(eval(r, th));
            }
        }
        levels.push(v);
    }
    let (v1, v2) = (levels[1], levels[2]);
    let delta = if v2 > 0.0 { (v2 - v1).abs() / v2 } else { 0.0 };
    SupNorm { value: v2, delta, converged: delta <= 1e-3 }
}

/// A quantity swept over the t-grid together with its fitted exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormCurve {
    pub quantity: Quantity,
    /// `"P"`, `"Q(7)"`, `"Q(7)_2"`, `"L'"`, ...
    pub region: String,
    pub m: u32,
    pub c1: f64,
    pub c2: f64,
    /// strictly decreasing in `t`
    pub samples: Vec<(f64, f64)>,
    pub fitted_exponent: f64,
    pub log_corrected: bool,
    pub log_power: f64,
    /// `None` for quantities without a closed-form prediction
    pub predicted_exponent: Option<f64>,
    pub bound_kind: BoundKind,
    pub r_squared: f64,
    /// exact zeros skipped by the fit
    pub zeros: usize,
}

impl NormCurve {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }
}

fn check_grid(prm: &ModelParams) -> Result<()> {
    let g = &prm.t_grid;
    let span = g.first().copied().unwrap_or(1.0) / g.last().copied().unwrap_or(1.0);
    if g.len() < 6 || span < 1e3 {
        return Err(Error::InvalidParameter(format!(
            "t grid needs >= 6 points spanning >= 3 decades (got {} points, ratio {span:.3e})",
            g.len()
        )));
    }
    Ok(())
}

/// One sample of a phase quantity at `t`.
pub fn phase_value(quantity: Quantity, t: f64, prm: &ModelParams) -> Result<f64> {
    let prof = Profile::new(t, prm)?;
    use RegionLabel::{P, Q};
    let v = match quantity {
        Quantity::EpsC0P => sup_norm_on(&prof, Field::Eps, P).value,
        Quantity::EpsC0Q => sup_norm_on(&prof, Field::Eps, Q).value,
        Quantity::EpsL65P => integrate_norm_on(&prof, Field::Eps, P, 1.2, prm)?,
        Quantity::EpsL65Q => integrate_norm_on(&prof, Field::Eps, Q, 1.2, prm)?,
        Quantity::EpsL1P => integrate_norm_on(&prof, Field::Eps, P, 1.0, prm)?,
        Quantity::EpsL1Q => integrate_norm_on(&prof, Field::Eps, Q, 1.0, prm)?,
        Quantity::DepsL6P => integrate_norm_on(&prof, Field::GradEps, P, 6.0, prm)?,
        Quantity::DepsL6Q => integrate_norm_on(&prof, Field::GradEps, Q, 6.0, prm)?,
        other => return Err(Error::InvalidParameter(format!("{other} is not a phase quantity"))),
    };
    Ok(v)
}

/// Sweeps `quantity` over the t-grid and fits its exponent on the fit samples.
pub fn norm_curve(quantity: Quantity, prm: &ModelParams) -> Result<NormCurve> {
    prm.validate()?;
    check_grid(prm)?;
    match quantity {
        Quantity::DfL3 | Quantity::OneMinusFL65 => return partition::partition_curve(quantity, prm),
        q if q.piece().is_none() => {
            return Err(Error::InvalidParameter(format!("{q} is produced by the criteria report")))
        }
        _ => {}
    }
    let pred = predicted_exponent(quantity, prm.c1, prm.c2, prm.m)?;
    let values: Vec<Result<f64>> = prm.t_grid.par_iter().map(|&t| phase_value(quantity, t, prm)).collect();
    let samples: Vec<(f64, f64)> = prm
        .t_grid
        .iter()
        .zip(values)
        .map(|(&t, v)| v.map(|v| (t, v)))
        .collect::<Result<_>>()?;
    let piece = quantity.piece().expect("phase quantity").name();
    let region = match pred.region {
        Some(id) => format!("{piece}{id}"),
        None => piece.to_string(),
    };
    Ok(assemble(
        quantity,
        region,
        prm,
        samples,
        Some(pred.exponent_f64()),
        pred.kind,
        super::regions::to_f64(pred.log_power),
    ))
}

pub(crate) fn assemble(
    quantity: Quantity,
    region: String,
    prm: &ModelParams,
    samples: Vec<(f64, f64)>,
    predicted: Option<f64>,
    kind: BoundKind,
    log_power: f64,
) -> NormCurve {
    let fit_ts = prm.fit_samples();
    let (ts, vs): (Vec<f64>, Vec<f64>) = samples.iter().filter(|s| fit_ts.contains(&s.0)).copied().unzip();
    let fit = fit_exponent(&ts, &vs, log_power);
    let zeros = samples.iter().filter(|s| s.1 == 0.0).count();
    NormCurve {
        quantity,
        region,
        m: prm.m,
        c1: prm.c1,
        c2: prm.c2,
        samples,
        fitted_exponent: fit.map_or(f64::NAN, |f| f.exponent),
        log_corrected: log_power != 0.0,
        log_power,
        predicted_exponent: predicted,
        bound_kind: kind,
        r_squared: fit.map_or(0.0, |f| f.r_squared),
        zeros,
    }
}

/// Outcome of comparing a curve with its prediction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub quantity: Quantity,
    pub region: String,
    pub predicted: Option<f64>,
    pub fitted: f64,
    pub bound_kind: BoundKind,
    pub tolerance: f64,
    /// `max value / (t^pred |log t|^q)` over the grid
    pub max_ratio: f64,
    /// relative growth of the running maximum of that ratio over the last half of the grid
    pub ratio_growth: f64,
    pub pass: bool,
    pub detail: String,
}

/// Equality-order rows: `|fitted - predicted| <= tol`. Upper-bound rows:
/// `fitted >= predicted - tol` and `value / t^predicted` stays bounded.
pub fn judge(curve: &NormCurve, tol: f64) -> Verdict {
    let pred = curve.predicted_exponent;
    let mut v = Verdict {
        quantity: curve.quantity,
        region: curve.region.clone(),
        predicted: pred,
        fitted: curve.fitted_exponent,
        bound_kind: curve.bound_kind,
        tolerance: tol,
        max_ratio: f64::NAN,
        ratio_growth: f64::NAN,
        pass: false,
        detail: String::new(),
    };
    let Some(p) = pred else {
        v.detail = "no prediction".into();
        return v;
    };
    let ratios: Vec<f64> = curve
        .samples
        .iter()
        .map(|&(t, x)| x / (t.powf(p) * (-t.ln()).powf(curve.log_power)))
        .collect();
    let b = bounded_tail(&ratios, Extremum::Max);
    v.max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    v.ratio_growth = b.variation;
    let fitted = curve.fitted_exponent;
    match curve.bound_kind {
        BoundKind::EqualityOrder => {
            v.pass = (fitted - p).abs() <= tol;
            v.detail = format!("|{fitted:.4} - {p:.4}| <= {tol}");
        }
        BoundKind::UpperBound => {
            let slope_ok = fitted >= p - tol;
            v.pass = slope_ok && b.bounded;
            v.detail = format!(
                "fitted {fitted:.4} >= {:.4}: {slope_ok}; ratio running max growth {:.3} <= 0.2: {}",
                p - tol,
                b.variation,
                b.bounded
            );
        }
    }
    if !fitted.is_finite() {
        v.pass = curve.bound_kind == BoundKind::UpperBound && b.bounded && curve.zeros > 0;
        v.detail = format!("no finite fit ({} zero samples); bounded: {}", curve.zeros, b.bounded);
    }
    v
}

pub fn verify_quantity(quantity: Quantity, prm: &ModelParams) -> Result<Verdict> {
    let curve = norm_curve(quantity, prm)?;
    Ok(judge(&curve, prm.fit_tol))
}

/// `pi (R0^2 - b2^2) l` per sheet; the `K` piece covers the annulus `m` times.
pub fn flat_annulus_volume(prof: &Profile, prm: &ModelParams) -> f64 {
    let b2 = prof.cut.b2;
    PI * (prm.r0 * prm.r0 - b2 * b2) * prm.l * prof.m as f64
}

/// `sum` in fixed pairwise order, exposed for report reductions.
pub fn stable_sum(x: &[f64]) -> f64 {
    pairwise(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn prm() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn k_annulus_volume() {
        let p = prm();
        let prof = Profile::new(0.01, &p).unwrap();
        let v = integrate_norm_on(&prof, Field::Constant(1.0), RegionLabel::K, 1.0, &p).unwrap();
        assert_relative_eq!(v, flat_annulus_volume(&prof, &p), max_relative = 1e-10);
    }

    #[test]
    fn zero_fields() {
        let p = prm();
        assert_eq!(integrate_norm(Field::Eps, RegionLabel::K, 1.2, 0.01, &p).unwrap(), 0.0);
        assert_eq!(integrate_norm(Field::Constant(0.0), RegionLabel::Q, 1.0, 0.01, &p).unwrap(), 0.0);
        assert_eq!(sup_norm(Field::Eps, RegionLabel::K, 0.01, &p).unwrap().value, 0.0);
    }

    #[test]
    fn constant_sup() {
        let s = sup_norm(Field::Constant(2.5), RegionLabel::Q, 0.01, &prm()).unwrap();
        assert_eq!(s.value, 2.5);
        assert!(s.converged);
    }

    #[test]
    fn rejects_unsupported_exponent() {
        assert!(integrate_norm(Field::Eps, RegionLabel::Q, 4.0, 0.01, &prm()).is_err());
    }

    #[test]
    fn q_constant_volume_matches_density() {
        // cross-check the Q quadrature on the constant field against a fine trapezoid
        let p = prm();
        let prof = Profile::new(0.01, &p).unwrap();
        let v = integrate_norm_on(&prof, Field::Constant(1.0), RegionLabel::Q, 1.0, &p).unwrap();
        let (lo, hi) = (prof.cut.b1, prof.cut.b2);
        let n = 400_000;
        let h = (hi - lo) / n as f64;
        let s: f64 = (0..=n)
            .map(|i| {
                let r = lo + h * i as f64;
                let (a, b) = chart_coefficients(&prof, r);
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * (a * b).sqrt()
            })
            .sum::<f64>()
            * h
            * 2.0
            * PI
            * 2.0;
        assert_relative_eq!(v, s, max_relative = 1e-6);
    }

    #[test]
    fn separable_eps_matches_trapezoid() {
        let p = prm();
        let prof = Profile::new(0.01, &p).unwrap();
        let exact = integrate_norm_on(&prof, Field::Eps, RegionLabel::Q, 2.0, &p).unwrap();
        // p = 2 is smooth in theta, so the periodic rule is exact there
        let breaks = graded_breaks(prof.cut.b1, prof.cut.b2, 2.0, &prof.cut.knots());
        let f = |r1: f64| {
            let (a, b) = chart_coefficients(&prof, r1);
            trapezoid_periodic(|th| eps_q(&prof, r1, th).powi(2), 4.0 * PI, 48) * (a * b).sqrt()
        };
        let direct = adaptive(&f, &breaks, 1e-10, 1e-300, 20000).unwrap().value.sqrt();
        assert_relative_eq!(exact, direct, max_relative = 1e-8);
    }
}
