//! The 3-form `beta = Phi^* Im Omega'` on the cotangent chart of `L'^a` and its
//! covariant derivatives for the pull-back connection `nabla^`.
//!
//! Coordinates on the total space are `(r, theta, u3, p_r, p_theta, p_u)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flat_model::holomorphic_volume;
use crate::geometry::metric::pure_sl_coefficients;
use crate::jet::{Jet, Scalar};

pub const DIM: usize = 6;

/// Dense covariant tensor of rank `k + 3` in row-major index order.
#[derive(Clone, Debug)]
pub struct Tensor<T> {
    pub rank: usize,
    pub data: Vec<T>,
}

impl<T: Copy> Tensor<T> {
    fn filled(rank: usize, v: T) -> Self {
        Tensor { rank, data: vec![v; DIM.pow(rank as u32)] }
    }
}

fn index(ix: &[usize]) -> usize {
    ix.iter().fold(0, |acc, &i| acc * DIM + i)
}

fn unindex(mut n: usize, rank: usize, out: &mut [usize]) {
    for k in (0..rank).rev() {
        out[k] = n % DIM;
        n /= DIM;
    }
}

fn add_form<S: Scalar>(t: &mut Tensor<S>, ix: [usize; 3], c: S) {
    let [a, b, d] = ix;
    for (p, s) in [([a, b, d], 1.0), ([b, d, a], 1.0), ([d, a, b], 1.0), ([b, a, d], -1.0), ([a, d, b], -1.0), ([d, b, a], -1.0)] {
        let k = index(&p);
        t.data[k] = t.data[k] + c * s;
    }
}

const R: usize = 0;
const TH: usize = 1;
const U: usize = 2;
const PR: usize = 3;
const PT: usize = 4;
const PU: usize = 5;

/// Coordinate expression of `beta` for amplitude `amp`, `r >= R0'` region.
/// The `p_theta^2 r^-3` coefficient of `dr ^ dtheta ^ dp_u` enters with a plus sign,
/// as the direct pull-back gives.
pub fn beta_closed_form<S: Scalar>(x: &[S; 6], amp: f64, m: u32) -> Tensor<S> {
    let mf = m as f64;
    let (r, th, pr, pt) = (x[R], x[TH], x[PR], x[PT]);
    let mut b = Tensor::filled(3, S::cst(0.0));
    let ri = r.powi(-1);
    let ri2 = r.powi(-2);
    let big_a = r.powf(2.0 * (1.0 - mf) / mf) * (amp.powf(2.0 / mf) / (mf * mf)) + 1.0;
    add_form(&mut b, [R, TH, PU], big_a * r + pt * pt * r.powi(-3));
    add_form(&mut b, [R, PR, PU], -(pt * ri2));
    add_form(&mut b, [TH, PR, PU], pr);
    add_form(&mut b, [TH, PT, PU], pt * ri2);
    add_form(&mut b, [PR, PT, PU], -ri);
    let c = r.powf((1.0 - mf) / mf) * (amp.powf(1.0 / mf) / mf);
    let ang = th * ((1.0 + mf) / mf);
    let cc = c * ang.cos();
    let ss = c * ang.sin();
    add_form(&mut b, [R, TH, PU], -(cc * pr));
    add_form(&mut b, [R, PT, PU], -(cc * ri));
    add_form(&mut b, [TH, PR, PU], -(cc * r));
    add_form(&mut b, [R, TH, PU], ss * ri * pt * 2.0);
    add_form(&mut b, [R, PR, PU], -ss);
    add_form(&mut b, [TH, PT, PU], ss);
    add_form(&mut b, [R, TH, U], pr);
    add_form(&mut b, [R, PT, U], ri);
    add_form(&mut b, [TH, PR, U], -r);
    b
}

/// The chart map into `Y'` in real coordinates `(u1,u2,u3,v1,v2,v3)`:
/// `zh1 = r e^(i theta)`, `zh2 = e^(-i theta)(p_r - i p_theta / r) + a^(1/m) r^(1/m) e^(i theta/m)`.
pub fn chart_to_ambient<S: Scalar>(x: &[S; 6], amp: f64, m: u32) -> [S; 6] {
    let mf = m as f64;
    let (r, th, pr, pt) = (x[R], x[TH], x[PR], x[PT]);
    let (c, s) = (th.cos(), th.sin());
    let q = pt / r;
    // e^(-i th)(pr - i q)
    let pre = c * pr - s * q;
    let pim = -(s * pr) - c * q;
    let rho = r.powf(1.0 / mf) * amp.powf(1.0 / mf);
    let ph = th / mf;
    let re2 = pre + rho * ph.cos();
    let im2 = pim + rho * ph.sin();
    [r * c, r * s, x[U], re2, -im2, x[PU]]
}

/// `beta_{abc}` by pulling back `Im(dz1 ^ dz2 ^ dz3)` through the chart map.
pub fn beta_by_pullback(x: &[f64; 6], amp: f64, m: u32) -> Tensor<f64> {
    let f = chart_to_ambient(&Jet::<6>::seed(*x).map(|v| v.with_order(1)), amp, m);
    let cols: [[f64; 6]; 6] = std::array::from_fn(|a| std::array::from_fn(|k| f[k].derivative(&[a])));
    let mut t = Tensor::filled(3, 0.0);
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                t.data[index(&[a, b, c])] = holomorphic_volume(&[cols[a], cols[b], cols[c]]).im;
            }
        }
    }
    t
}

/// Christoffel symbols `Gamma^i_{jk}` of `nabla^`: those of `A dr^2 + B dtheta^2 + du^2`
/// in the base indices, zero otherwise.
fn christoffels<S: Scalar>(r: S, amp: f64, m: u32) -> Vec<(usize, usize, usize, S)>
where
    S: Partial,
{
    let (a, b) = pure_sl_coefficients(amp, m, r);
    let (da, db) = (a.d0(), b.d0());
    let a = a.lower();
    let b = b.lower();
    vec![
        (R, R, R, da / (a * 2.0)),
        (R, TH, TH, -(db / (a * 2.0))),
        (TH, R, TH, db / (b * 2.0)),
        (TH, TH, R, db / (b * 2.0)),
    ]
}

/// Derivative along the first chart coordinate.
pub trait Partial: Scalar {
    fn d0(&self) -> Self;
    fn lower(&self) -> Self;
}

impl Partial for Jet<6> {
    fn d0(&self) -> Self {
        self.partial(0)
    }
    fn lower(&self) -> Self {
        self.with_order(self.order().saturating_sub(1))
    }
}

/// `(nabla T)_{d a1..an} = d_d T_{a..} - sum_i Gamma^e_{d a_i} T_{..e..}`.
fn covariant_derivative(t: &Tensor<Jet<6>>, gam: &[(usize, usize, usize, Jet<6>)]) -> Tensor<Jet<6>> {
    let n = t.rank;
    let ord = t.data[0].order().saturating_sub(1);
    let mut out = Tensor::filled(n + 1, Jet::<6>::constant(0.0).with_order(ord));
    let mut ix = vec![0usize; n];
    let live: Vec<usize> = (0..t.data.len()).filter(|&f| !t.data[f].is_zero()).collect();
    for &flat in &live {
        unindex(flat, n, &mut ix);
        for d in 0..DIM {
            let mut full = Vec::with_capacity(n + 1);
            full.push(d);
            full.extend_from_slice(&ix);
            out.data[index(&full)] = t.data[flat].partial(d);
        }
    }
    for &flat in &live {
        unindex(flat, n, &mut ix);
        for &(e, d, ai, ref g) in gam {
            // Gamma^e_{d a} T_{.. e ..} contributes to slot with a_i = ai where T has e there
            for slot in 0..n {
                if ix[slot] != e {
                    continue;
                }
                let mut full = Vec::with_capacity(n + 1);
                full.push(d);
                full.extend_from_slice(&ix);
                full[slot + 1] = ai;
                let k = index(&full);
                out.data[k] = out.data[k] - g.with_order(ord) * t.data[flat].with_order(ord);
            }
        }
    }
    out
}

/// Columns of the `g^`-orthonormal frame in coordinates:
/// horizontal `X_k = (d_k + Gamma^i_{kj} p_i d_{p_j}) / sqrt(g_kk)`, vertical `Y_j = sqrt(g_jj) d_{p_j}`.
pub fn orthonormal_frame(x: &[f64; 6], amp: f64, m: u32) -> [[f64; 6]; 6] {
    let (a, b) = pure_sl_coefficients(amp, m, x[R]);
    let g = [a, b, 1.0];
    let rj = Jet::<6>::variable(0, x[R]).with_order(2);
    let gam = christoffels(rj, amp, m);
    let mut cols = [[0.0; 6]; 6];
    for k in 0..3 {
        let s = g[k].sqrt();
        cols[k][k] = 1.0 / s;
        for &(i, kk, j, ref c) in &gam {
            if kk == k {
                cols[k][3 + j] += c.value() * x[3 + i] / s;
            }
        }
        cols[3 + k][3 + k] = s;
    }
    cols
}

fn frame_norm(t: &[f64], rank: usize, frame: &[[f64; 6]; 6]) -> f64 {
    let mut cur = t.to_vec();
    let mut next = vec![0.0; cur.len()];
    let stride: Vec<usize> = (0..rank).map(|s| DIM.pow((rank - 1 - s) as u32)).collect();
    for (slot, &st) in stride.iter().enumerate() {
        let _ = slot;
        for v in next.iter_mut() {
            *v = 0.0;
        }
        for (flat, &val) in cur.iter().enumerate() {
            if val == 0.0 {
                continue;
            }
            let a = (flat / st) % DIM;
            let base = flat - a * st;
            for alpha in 0..DIM {
                let f = frame[alpha][a];
                if f != 0.0 {
                    next[base + alpha * st] += val * f;
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    (cur.iter().map(|v| v * v).sum::<f64>() / 6.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConnectionSample {
    pub point: [f64; 6],
    pub beta_norm: [f64; 4],
}

/// `|nabla^k beta|` for `k = 0..=3` at a chart point with amplitude `amp`.
pub fn connection_beta(x: &[f64; 6], amp: f64, m: u32, r_min: f64) -> Result<ConnectionSample> {
    if !(x[R] >= r_min && x[R] > 0.0) {
        return Err(Error::InvalidParameter(format!("r = {} lies in the core (r < {r_min})", x[R])));
    }
    let seed = Jet::<6>::seed(*x);
    let gam = christoffels(seed[0], amp, m);
    let frame = orthonormal_frame(x, amp, m);
    let mut t = beta_closed_form(&seed, amp, m);
    let mut norms = [0.0; 4];
    for (k, slot) in norms.iter_mut().enumerate() {
        let vals: Vec<f64> = t.data.iter().map(|j| j.value()).collect();
        *slot = frame_norm(&vals, t.rank, &frame);
        if k < 3 {
            t = covariant_derivative(&t, &gam);
        }
    }
    Ok(ConnectionSample { point: *x, beta_norm: norms })
}

/// Largest coefficient difference between the closed form and the pull-back oracle.
pub fn beta_route_gap(x: &[f64; 6], amp: f64, m: u32) -> f64 {
    let a = beta_closed_form(x, amp, m);
    let b = beta_by_pullback(x, amp, m);
    a.data.iter().zip(&b.data).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

/// `|Gamma - Gamma_flat|_g` at radius `r` for `L'^a`.
pub fn connection_deviation(r: f64, amp: f64, m: u32) -> f64 {
    let rj = Jet::<6>::variable(0, r).with_order(2);
    let (a, b) = pure_sl_coefficients(amp, m, r);
    let g = [a, b, 1.0];
    let flat = |i: usize, j: usize, k: usize| match (i, j, k) {
        (R, TH, TH) => -r,
        (TH, R, TH) | (TH, TH, R) => 1.0 / r,
        _ => 0.0,
    };
    let mut s = 0.0;
    for (i, j, k, c) in christoffels(rj, amp, m) {
        let d = c.value() - flat(i, j, k);
        s += g[i] / (g[j] * g[k]) * d * d;
    }
    s.sqrt()
}

/// Samples of the scaled family `t . L'^a` at `r = t rho`, `rho` log-spaced in `[r0p, r0/t]`,
/// with fibre points of `g^-1`-size `<= a1 t`.
pub fn beta_sweep(t: f64, a: f64, m: u32, r0p: f64, r0: f64, a1: f64, n_r: usize) -> Vec<ConnectionSample> {
    let amp = a * t.powi(m as i32 - 1);
    let (lo, hi) = (r0p.ln(), (r0 / t).ln());
    let dirs: [[f64; 3]; 5] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.6, -0.48, 0.64]];
    let mut pts = Vec::new();
    for i in 0..n_r {
        let rho = (lo + (hi - lo) * i as f64 / (n_r - 1).max(1) as f64).exp();
        let r = t * rho;
        let (ga, gb) = pure_sl_coefficients(amp, m, r);
        for d in dirs {
            let p = [d[0] * ga.sqrt(), d[1] * gb.sqrt(), d[2]].map(|v| v * a1 * t);
            pts.push([r, 0.37, 0.0, p[0], p[1], p[2]]);
        }
    }
    pts.par_iter().filter_map(|x| connection_beta(x, amp, m, t * r0p * 0.999).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_matches_pullback() {
        for m in [2, 3] {
            for x in [[1.3, 0.4, 0.2, 0.3, -0.2, 0.5], [4.0, 2.1, 0.0, -0.7, 1.5, -0.3], [0.7, 5.5, 0.3, 0.0, 0.0, 0.0]] {
                let gap = beta_route_gap(&x, 0.8, m);
                assert!(gap <= 1e-12, "m = {m}, x = {x:?}: {gap}");
            }
        }
    }

    #[test]
    fn flat_limit_norm() {
        let s = connection_beta(&[1e4, 0.3, 0.0, 0.0, 0.0, 0.0], 1.0, 2, 1.0).unwrap();
        // four unit monomials of Im(dz1 ^ dz2 ^ dz3)
        assert!((s.beta_norm[0] - 2.0).abs() < 1e-3, "{:?}", s.beta_norm);
        assert!(s.beta_norm[1] < 1e-3);
    }

    #[test]
    fn core_rejected() {
        assert!(connection_beta(&[0.01, 0.0, 0.0, 0.0, 0.0, 0.0], 1.0, 2, 0.1).is_err());
    }

    #[test]
    fn decay_slope() {
        for m in [2u32, 3] {
            let rs: Vec<f64> = (0..20).map(|i| 10f64.powf(2.0 * i as f64 / 19.0)).collect();
            let ys: Vec<f64> = rs.iter().map(|&r| connection_deviation(r, 1.0, m).ln()).collect();
            let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
            let slope = crate::asymptotics::fit::linear_fit(&xs, &ys).slope;
            let want = (2.0 - 3.0 * m as f64) / m as f64;
            assert!((slope - want).abs() <= 0.1, "m = {m}: {slope} vs {want}");
        }
    }
}
