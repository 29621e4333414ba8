//! Truncated multivariate Taylor arithmetic ("jets") up to total order 3.
//!
//! A `Jet<N>` stores the Taylor coefficients of a function of `N` variables
//! around a base point, truncated at total degree `ord <= 3`. Products are
//! truncated; `partial` lowers the valid order by one.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::OnceLock;

pub const MAX_ORDER: usize = 3;
pub const MAX_VARS: usize = 6;
/// Number of monomials of degree <= 3 in 6 variables.
pub const CAP: usize = 84;

struct Layout {
    degree: Vec<u8>,
    /// number of monomials of degree <= d, for d = 0..=3
    upto: [usize; MAX_ORDER + 1],
    /// per monomial i: (j, k) with monomial i times monomial j equal to monomial k,
    /// ordered by the degree of k
    rows: Vec<Vec<(u8, u8)>>,
    /// per variable: (src, dst, factor) for the partial derivative
    diff: Vec<Vec<(u8, u8, f64)>>,
    /// per variable: index of the degree-one monomial
    unit: Vec<u8>,
}

fn build_layout(n: usize) -> Layout {
    let mut exps: Vec<[u8; MAX_VARS]> = Vec::new();
    let mut upto = [0usize; MAX_ORDER + 1];
    for d in 0..=MAX_ORDER {
        let mut cur = [0u8; MAX_VARS];
        enumerate(n, d as u8, 0, &mut cur, &mut exps);
        upto[d] = exps.len();
    }
    let degree: Vec<u8> = exps.iter().map(|e| e.iter().sum()).collect();
    let index_of = |e: &[u8; MAX_VARS]| exps.iter().position(|x| x == e);
    let mut mul = Vec::new();
    for i in 0..exps.len() {
        for j in 0..exps.len() {
            if (degree[i] + degree[j]) as usize > MAX_ORDER {
                continue;
            }
            let mut e = [0u8; MAX_VARS];
            for v in 0..MAX_VARS {
                e[v] = exps[i][v] + exps[j][v];
            }
            let k = index_of(&e).expect("product monomial in layout");
            mul.push((i as u8, j as u8, k as u8));
        }
    }
    let mut rows = vec![Vec::new(); exps.len()];
    for &(i, j, k) in &mul {
        rows[i as usize].push((j, k));
    }
    let mut diff = Vec::new();
    let mut unit = Vec::new();
    for v in 0..n {
        let mut d = Vec::new();
        for (k, e) in exps.iter().enumerate() {
            if e[v] == 0 {
                continue;
            }
            let mut f = *e;
            f[v] -= 1;
            let dst = index_of(&f).expect("derivative monomial in layout");
            d.push((k as u8, dst as u8, e[v] as f64));
        }
        diff.push(d);
        let mut e = [0u8; MAX_VARS];
        e[v] = 1;
        unit.push(index_of(&e).unwrap() as u8);
    }
    Layout { degree, upto, rows, diff, unit }
}

fn enumerate(n: usize, left: u8, var: usize, cur: &mut [u8; MAX_VARS], out: &mut Vec<[u8; MAX_VARS]>) {
    if var + 1 == n || n == 0 {
        if n > 0 {
            cur[var] = left;
            out.push(*cur);
            cur[var] = 0;
        } else if left == 0 {
            out.push(*cur);
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[var] = k;
        enumerate(n, left - k, var + 1, cur, out);
    }
    cur[var] = 0;
}

fn layout(n: usize) -> &'static Layout {
    static LAYOUTS: [OnceLock<Layout>; MAX_VARS + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    assert!(n <= MAX_VARS, "jets support at most {MAX_VARS} variables");
    LAYOUTS[n].get_or_init(|| build_layout(n))
}

#[derive(Clone, Copy, Debug)]
pub struct Jet<const N: usize> {
    ord: u8,
    c: [f64; CAP],
}

impl<const N: usize> Jet<N> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; CAP];
        c[0] = v;
        Jet { ord: MAX_ORDER as u8, c }
    }

    /// The coordinate function `x_var` expanded at `value`.
    pub fn variable(var: usize, value: f64) -> Self {
        let mut j = Self::constant(value);
        j.c[layout(N).unit[var] as usize] = 1.0;
        j
    }

    /// Seeds all `N` coordinates at the point `x`.
    pub fn seed(x: [f64; N]) -> [Self; N] {
        std::array::from_fn(|i| Self::variable(i, x[i]))
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn is_zero(&self) -> bool {
        self.c[..self.len()].iter().all(|&x| x == 0.0)
    }

    pub fn order(&self) -> usize {
        self.ord as usize
    }

    pub fn with_order(mut self, ord: usize) -> Self {
        self.truncate(ord.min(MAX_ORDER) as u8);
        self
    }

    fn len(&self) -> usize {
        layout(N).upto[self.ord as usize]
    }

    fn truncate(&mut self, ord: u8) {
        let l = layout(N);
        let keep = l.upto[ord as usize];
        let all = l.upto[MAX_ORDER];
        for x in &mut self.c[keep..all] {
            *x = 0.0;
        }
        self.ord = ord;
    }

    /// First partial derivative along `var`, valid to one order less.
    pub fn partial(&self, var: usize) -> Self {
        let l = layout(N);
        let mut out = Jet { ord: self.ord.saturating_sub(1), c: [0.0; CAP] };
        if self.ord == 0 {
            return out;
        }
        for &(src, dst, f) in &l.diff[var] {
            out.c[dst as usize] += f * self.c[src as usize];
        }
        out.truncate(out.ord);
        out
    }

    /// Mixed partial derivative at the base point for the multi-index `idx`.
    pub fn derivative(&self, idx: &[usize]) -> f64 {
        let mut j = *self;
        for &v in idx {
            j = j.partial(v);
        }
        j.value()
    }

    pub fn gradient(&self) -> [f64; N] {
        std::array::from_fn(|v| self.c[layout(N).unit[v] as usize])
    }

    /// Composition `f(self)` given `f` and its derivatives at `self.value()`.
    pub fn compose(&self, derivs: &[f64]) -> Self {
        let mut d = *self;
        d.c[0] = 0.0;
        let mut out = Self::constant(derivs[0]);
        out.ord = self.ord;
        let mut pow = Self::constant(1.0);
        pow.ord = self.ord;
        let mut fact = 1.0;
        for k in 1..=self.ord as usize {
            pow = pow * d;
            fact *= k as f64;
            let fk = derivs.get(k).copied().unwrap_or(0.0);
            if fk != 0.0 {
                out += pow * (fk / fact);
            }
        }
        out
    }

    pub fn sqrt(&self) -> Self {
        let x = self.value();
        let s = x.sqrt();
        self.compose(&[s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)])
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.value();
        self.compose(&[
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn powi(&self, k: i32) -> Self {
        let mut out = Self::constant(1.0);
        out.ord = self.ord;
        let mut base = *self;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                out = out * base;
            }
            base = base * base;
            e >>= 1;
        }
        if k < 0 {
            out.recip()
        } else {
            out
        }
    }

    pub fn recip(&self) -> Self {
        let x = self.value();
        let r = 1.0 / x;
        self.compose(&[r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(&[s, c, -s, -c])
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(&[c, -s, -c, s])
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&[e, e, e, e])
    }

    pub fn ln(&self) -> Self {
        let x = self.value();
        self.compose(&[x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        let ord = self.ord.min(o.ord);
        for k in 0..layout(N).upto[ord as usize] {
            self.c[k] += o.c[k];
        }
        self.truncate(ord);
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        let ord = self.ord.min(o.ord);
        for k in 0..layout(N).upto[ord as usize] {
            self.c[k] -= o.c[k];
        }
        self.truncate(ord);
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let l = layout(N);
        let ord = self.ord.min(o.ord);
        let mut out = Jet { ord, c: [0.0; CAP] };
        for i in 0..l.upto[ord as usize] {
            let a = self.c[i];
            if a == 0.0 {
                continue;
            }
            for &(j, k) in &l.rows[i] {
                if l.degree[k as usize] > ord {
                    break;
                }
                out.c[k as usize] += a * o.c[j as usize];
            }
        }
        out
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        let n = self.len();
        for x in &mut self.c[..n] {
            *x = -*x;
        }
        self
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.c[0] += o;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.c[0] -= o;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(mut self, o: f64) -> Self {
        let n = self.len();
        for x in &mut self.c[..n] {
            *x *= o;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<const N: usize> AddAssign for Jet<N> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const N: usize> SubAssign for Jet<N> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<const N: usize> MulAssign for Jet<N> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

/// Arithmetic shared by `f64` and jets so that closed-form maps can be
/// evaluated either numerically or with exact derivatives.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    fn val(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn powf(&self, p: f64) -> Self;
    fn powi(&self, k: i32) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    /// `f(self)` from the values `f, f', f'', f'''` at `self.val()`.
    fn compose(&self, derivs: &[f64]) -> Self;
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn val(&self) -> f64 {
        *self
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn powf(&self, p: f64) -> Self {
        f64::powf(*self, p)
    }
    fn powi(&self, k: i32) -> Self {
        f64::powi(*self, k)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn compose(&self, derivs: &[f64]) -> Self {
        derivs[0]
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn cst(v: f64) -> Self {
        Jet::constant(v)
    }
    fn val(&self) -> f64 {
        self.value()
    }
    fn sqrt(&self) -> Self {
        Jet::sqrt(self)
    }
    fn powf(&self, p: f64) -> Self {
        Jet::powf(self, p)
    }
    fn powi(&self, k: i32) -> Self {
        Jet::powi(self, k)
    }
    fn sin(&self) -> Self {
        Jet::sin(self)
    }
    fn cos(&self) -> Self {
        Jet::cos(self)
    }
    fn exp(&self) -> Self {
        Jet::exp(self)
    }
    fn ln(&self) -> Self {
        Jet::ln(self)
    }
    fn compose(&self, derivs: &[f64]) -> Self {
        Jet::compose(self, derivs)
    }
}

/// Complex numbers over a `Scalar`.
#[derive(Clone, Copy, Debug)]
pub struct Cx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Cx<S> {
    pub fn new(re: S, im: S) -> Self {
        Cx { re, im }
    }
    pub fn real(re: S) -> Self {
        Cx { re, im: S::cst(0.0) }
    }
    pub fn conj(self) -> Self {
        Cx { re: self.re, im: -self.im }
    }
    pub fn norm_sqr(self) -> S {
        self.re * self.re + self.im * self.im
    }
    pub fn abs(self) -> S {
        self.norm_sqr().sqrt()
    }
    pub fn scale(self, s: S) -> Self {
        Cx { re: self.re * s, im: self.im * s }
    }
    pub fn powu(self, k: u32) -> Self {
        let mut out = Cx::real(S::cst(1.0));
        for _ in 0..k {
            out = out * self;
        }
        out
    }
}

impl<S: Scalar> Add for Cx<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Cx { re: self.re + o.re, im: self.im + o.im }
    }
}

impl<S: Scalar> Sub for Cx<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Cx { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<S: Scalar> Mul for Cx<S> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Cx { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_sizes() {
        assert_eq!(layout(6).upto, [1, 7, 28, 84]);
        assert_eq!(layout(3).upto, [1, 4, 10, 20]);
        assert_eq!(layout(1).upto, [1, 2, 3, 4]);
    }

    #[test]
    fn product_rule_and_partials() {
        let [x, y] = Jet::<2>::seed([0.7, -1.3]);
        let f = x * x * y + y.sin();
        assert!((f.value() - (0.49 * -1.3 + (-1.3f64).sin())).abs() < 1e-15);
        assert!((f.derivative(&[0]) - 2.0 * 0.7 * -1.3).abs() < 1e-14);
        assert!((f.derivative(&[1]) - (0.49 + (-1.3f64).cos())).abs() < 1e-14);
        assert!((f.derivative(&[0, 0, 1]) - 2.0).abs() < 1e-14);
        assert!((f.derivative(&[1, 1, 1]) + (-1.3f64).cos()).abs() < 1e-14);
    }

    #[test]
    fn compose_matches_closed_forms() {
        let [x] = Jet::<1>::seed([0.4]);
        let e = (x * 2.0).exp();
        for k in 0..=3 {
            let want = 2f64.powi(k as i32) * 0.8f64.exp();
            let idx = vec![0; k];
            assert!((e.derivative(&idx) - want).abs() < 1e-12);
        }
        let p = x.powf(-1.5);
        assert!((p.derivative(&[0, 0, 0]) - (-1.5 * -2.5 * -3.5 * 0.4f64.powf(-4.5))).abs() < 1e-9);
        let q = (x * x).sqrt();
        assert!((q.derivative(&[0]) - 1.0).abs() < 1e-13);
        assert!(q.derivative(&[0, 0]).abs() < 1e-12);
    }

    #[test]
    fn division_and_ln() {
        let [x, y] = Jet::<2>::seed([2.0, 3.0]);
        let r = x / y;
        assert!((r.derivative(&[1, 1]) - 2.0 * 2.0 / 27.0).abs() < 1e-14);
        let l = (x * y).ln();
        assert!((l.derivative(&[0, 0]) + 0.25).abs() < 1e-14);
    }

    #[test]
    fn partial_lowers_order() {
        let [x, _, _] = Jet::<3>::seed([1.0, 2.0, 3.0]);
        let f = x.powi(3);
        let d = f.partial(0);
        assert_eq!(d.order(), 2);
        let d3 = d.partial(0).partial(0);
        assert_eq!(d3.order(), 0);
        assert!((d3.value() - 6.0).abs() < 1e-14);
    }
}
