//! Adaptive Gauss-Kronrod panels, geometric grading and the periodic trapezoid rule.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
/// 7-point Gauss weights at `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate on `[a, b]` and `|K15 - G7|`.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let s = f(c - h * XGK[i]) + f(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err).then(other.a.total_cmp(&self.a))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Integrates `f` over `[breaks[0], breaks.last()]`, bisecting the worst panel
/// until the summed error is below `rel_tol |value|` (or `abs_tol`).
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64, abs_tol: f64, max_panels: usize) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (value, err) = gauss_kronrod(f, w[0], w[1]);
            heap.push(Panel { a: w[0], b: w[1], value, err });
        }
    }
    loop {
        let (value, error) = sum_panels(&heap);
        if !value.is_finite() {
            return Err(Error::Quadrature { tol: rel_tol, estimate: value, error });
        }
        if error <= (rel_tol * value.abs()).max(abs_tol) {
            return Ok(QuadResult { value, error, panels: heap.len() });
        }
        if heap.len() >= max_panels {
            return Err(Error::Quadrature { tol: rel_tol, estimate: value, error });
        }
        let p = heap.pop().expect("non-empty");
        let mid = 0.5 * (p.a + p.b);
        for (a, b) in [(p.a, mid), (mid, p.b)] {
            let (value, err) = gauss_kronrod(f, a, b);
            heap.push(Panel { a, b, value, err });
        }
    }
}

/// Sums in increasing left endpoint so the result does not depend on heap order.
fn sum_panels(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut v: Vec<&Panel> = heap.iter().collect();
    v.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = pairwise(&v.iter().map(|p| p.value).collect::<Vec<_>>());
    let err = v.iter().map(|p| p.err).sum();
    (value, err)
}

/// Fixed-shape pairwise summation.
pub fn pairwise(x: &[f64]) -> f64 {
    match x.len() {
        0 => 0.0,
        1 => x[0],
        n => pairwise(&x[..n / 2]) + pairwise(&x[n / 2..]),
    }
}

/// `lo = x_0 < x_1 < ... = hi` with ratio `x_{i+1}/x_i <= ratio`, together
/// with the extra points that fall inside.
pub fn graded_breaks(lo: f64, hi: f64, ratio: f64, extra: &[f64]) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && ratio > 1.0);
    let n = ((hi / lo).ln() / ratio.ln()).ceil().max(1.0) as usize;
    let mut v: Vec<f64> = (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect();
    v[n] = hi;
    v.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());
    v
}

/// Breakpoints for `[0, hi]`: graded geometrically down to `hi * floor`.
pub fn graded_from_zero(hi: f64, floor: f64, ratio: f64, extra: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0];
    v.extend(graded_breaks(hi * floor, hi, ratio, extra));
    v
}

/// `int_0^period f` with `n` equispaced nodes.
pub fn trapezoid_periodic<F: Fn(f64) -> f64>(f: F, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    let v: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    pairwise(&v) * h
}

/// Mean of `|cos|^p` over a period.
pub fn mean_abs_cos_pow(p: f64) -> f64 {
    // (2/pi) int_0^{pi/2} sin^p s ds, graded toward s = 0
    let f = |s: f64| s.sin().powf(p);
    let breaks = graded_from_zero(std::f64::consts::FRAC_PI_2, 1e-12, 2.0, &[]);
    let r = adaptive(&f, &breaks, 1e-14, 1e-300, 4000).expect("smooth integrand");
    r.value * 2.0 / std::f64::consts::PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        for deg in 0..=22 {
            let (v, _) = gauss_kronrod(&|x: f64| x.powi(deg), 0.0, 1.0);
            assert_relative_eq!(v, 1.0 / (deg as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let f = |x: f64| x.powf(-0.5);
        let r = adaptive(&f, &graded_from_zero(1.0, 1e-16, 2.0, &[]), 1e-10, 0.0, 2000).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-7);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let f = |x: f64| (1.0 / x).sin();
        assert!(adaptive(&f, &[1e-6, 1.0], 1e-14, 0.0, 4).is_err());
    }

    #[test]
    fn trapezoid_is_exact_on_trig_polynomials() {
        let v = trapezoid_periodic(|x| (3.0 * x).cos().powi(2) + x.sin(), 2.0 * PI, 16);
        assert_relative_eq!(v, PI, max_relative = 1e-14);
    }

    #[test]
    fn cos_power_means() {
        assert_relative_eq!(mean_abs_cos_pow(1.0), 2.0 / PI, max_relative = 1e-12);
        assert_relative_eq!(mean_abs_cos_pow(2.0), 0.5, max_relative = 1e-12);
        assert_relative_eq!(mean_abs_cos_pow(4.0), 0.375, max_relative = 1e-12);
    }

    #[test]
    fn graded_breaks_include_extras() {
        let b = graded_breaks(1e-3, 1.0, 2.0, &[0.3, 5.0]);
        assert_eq!(b[0], 1e-3);
        assert_eq!(*b.last().unwrap(), 1.0);
        assert!(b.contains(&0.3));
        assert!(b.windows(2).all(|w| w[1] / w[0] <= 2.0 + 1e-12));
    }
}
