//! Least-squares exponent fits on log-log data.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - ss_res / syy).clamp(0.0, 1.0) } else { 1.0 };
    LinearFit { slope, intercept, r_squared }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub r_squared: f64,
    /// samples skipped because they were exactly zero
    pub zeros: usize,
}

/// Fits `value = C t^p (-log t)^q` with the log power `q` held fixed.
pub fn fit_exponent(ts: &[f64], values: &[f64], log_power: f64) -> Option<ExponentFit> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut zeros = 0;
    for (&t, &v) in ts.iter().zip(values) {
        if v == 0.0 {
            zeros += 1;
            continue;
        }
        if !(v > 0.0 && v.is_finite() && t > 0.0 && t < 1.0) {
            return None;
        }
        x.push(t.ln());
        y.push(v.ln() - log_power * (-t.ln()).ln());
    }
    if x.len() < 2 {
        return None;
    }
    let f = linear_fit(&x, &y);
    Some(ExponentFit { exponent: f.slope, r_squared: f.r_squared, zeros })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremum {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailBound {
    /// relative change of the running extremum across the last half of the sequence
    pub variation: f64,
    pub bounded: bool,
}

/// Running extremum of `x` (ordered by decreasing `t`); the sequence counts as
/// bounded when that extremum moves by at most 20% over the second half.
pub fn bounded_tail(x: &[f64], which: Extremum) -> TailBound {
    if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
        return TailBound { variation: f64::INFINITY, bounded: false };
    }
    let mut run = Vec::with_capacity(x.len());
    let mut cur = x[0];
    for &v in x {
        cur = match which {
            Extremum::Max => cur.max(v),
            Extremum::Min => cur.min(v),
        };
        run.push(cur);
    }
    let mid = run[(x.len() - 1) / 2];
    let end = run[x.len() - 1];
    let variation = if mid == 0.0 {
        if end == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        ((end - mid) / mid).abs()
    };
    TailBound { variation, bounded: variation <= 0.2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<f64> {
        (10..=16).map(|k| 2f64.powi(-k)).collect()
    }

    #[test]
    fn pure_power() {
        let ts = grid();
        let v: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(1.5)).collect();
        let f = fit_exponent(&ts, &v, 0.0).unwrap();
        assert!((f.exponent - 1.5).abs() <= 1e-6);
        assert!(f.r_squared > 0.999_999);
    }

    #[test]
    fn log_corrected() {
        let ts = grid();
        let v: Vec<f64> = ts.iter().map(|t| t.powf(-1.0 / 3.0) / (-t.ln())).collect();
        let f = fit_exponent(&ts, &v, -1.0).unwrap();
        assert!((f.exponent + 1.0 / 3.0).abs() <= 0.05);
        let raw = fit_exponent(&ts, &v, 0.0).unwrap();
        assert!((raw.exponent + 1.0 / 3.0).abs() > 0.05);
    }

    #[test]
    fn zeros_are_skipped() {
        let ts = grid();
        let mut v: Vec<f64> = ts.iter().map(|t| t * t).collect();
        v[0] = 0.0;
        let f = fit_exponent(&ts, &v, 0.0).unwrap();
        assert_eq!(f.zeros, 1);
        assert!(fit_exponent(&ts, &vec![0.0; ts.len()], 0.0).is_none());
    }

    #[test]
    fn tail_bounds() {
        assert!(bounded_tail(&[1.0, 1.5, 1.6, 1.61, 1.62, 1.62], Extremum::Max).bounded);
        assert!(!bounded_tail(&[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], Extremum::Max).bounded);
        assert!(bounded_tail(&[1.0, 0.9, 0.85, 0.84, 0.84], Extremum::Min).bounded);
        assert!(!bounded_tail(&[1.0, f64::NAN], Extremum::Max).bounded);
    }
}
