//! The flat model `Y' = R^2 x S^1 x R^3`, its rotated complex coordinates and
//! the special Lagrangian family `psi^a`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::jet::{Cx, Jet, Scalar};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientPoint {
    pub u: [f64; 3],
    pub v: [f64; 3],
}

impl AmbientPoint {
    /// Builds a point with `u3` reduced into `[0, l)`.
    pub fn new(u: [f64; 3], v: [f64; 3], l: f64) -> Self {
        AmbientPoint { u: [u[0], u[1], u[2].rem_euclid(l)], v }
    }

    pub fn from_rotated(zh1: C64, u3: f64, zh2: C64, v3: f64, l: f64) -> Self {
        Self::new([zh1.re, zh1.im, u3], [zh2.re, -zh2.im, v3], l)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.u[0], self.u[1], self.u[2], self.v[0], self.v[1], self.v[2]]
    }
}

/// Both complex readings of an ambient point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HkViews {
    pub z: [C64; 3],
    pub zh1: C64,
    pub u3: f64,
    pub zh2: C64,
    pub v3: f64,
}

impl HkViews {
    pub fn polar_zh1(&self) -> (f64, f64) {
        self.zh1.to_polar()
    }
    pub fn polar_zh2(&self) -> (f64, f64) {
        self.zh2.to_polar()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainPoint {
    pub x: [f64; 3],
}

impl DomainPoint {
    pub fn new(x1: f64, x2: f64, x3: f64, l: f64) -> Self {
        DomainPoint { x: [x1, x2, x3.rem_euclid(l)] }
    }
    pub fn w(&self) -> C64 {
        C64::new(self.x[0], self.x[1])
    }
    /// Downstairs radius `|w|^m`.
    pub fn radius(&self, m: u32) -> f64 {
        self.w().norm().powi(m as i32)
    }
    pub fn phi(&self) -> f64 {
        self.x[1].atan2(self.x[0])
    }
}

pub fn hk_views(p: &AmbientPoint) -> HkViews {
    let [u1, u2, u3] = p.u;
    let [v1, v2, v3] = p.v;
    HkViews {
        z: [C64::new(u1, v1), C64::new(u2, v2), C64::new(u3, v3)],
        zh1: C64::new(u1, u2),
        u3,
        zh2: C64::new(v1, -v2),
        v3,
    }
}

/// A complex-valued 1-form on `R^6` in the order `(u1,u2,u3,v1,v2,v3)`.
type Form1 = [C64; 6];

fn pair(a: &Form1, v: &[f64; 6]) -> C64 {
    a.iter().zip(v).map(|(c, x)| c * x).sum()
}

fn wedge(a: &Form1, b: &Form1, v: &[f64; 6], w: &[f64; 6]) -> C64 {
    pair(a, v) * pair(b, w) - pair(a, w) * pair(b, v)
}

fn conj1(a: &Form1) -> Form1 {
    a.map(|c| c.conj())
}

/// Largest deviation of the two rotation identities
/// `(i/2)(dz1^dz1b + dz2^dz2b) = Re(dzh1^dzh2)` and
/// `dz1^dz2 = -1/2 Im(dzh1^dzh1b + dzh2^dzh2b) - i Im(dzh1^dzh2)` on `(v, w)`.
pub fn rotation_identity_residual(_p: &AmbientPoint, v: &[f64; 6], w: &[f64; 6]) -> f64 {
    let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    let one = C64::new(1.0, 0.0);
    let dz1: Form1 = [one, o, o, i, o, o];
    let dz2: Form1 = [o, one, o, o, i, o];
    let dzh1: Form1 = [one, i, o, o, o, o];
    let dzh2: Form1 = [o, o, o, one, -i, o];

    let lhs1 = i * 0.5 * (wedge(&dz1, &conj1(&dz1), v, w) + wedge(&dz2, &conj1(&dz2), v, w));
    let rhs1 = wedge(&dzh1, &dzh2, v, w).re;
    let lhs2 = wedge(&dz1, &dz2, v, w);
    let s = wedge(&dzh1, &conj1(&dzh1), v, w) + wedge(&dzh2, &conj1(&dzh2), v, w);
    let rhs2 = C64::new(-0.5 * s.im, -wedge(&dzh1, &dzh2, v, w).im);
    (lhs1 - rhs1).norm().max((lhs2 - rhs2).norm())
}

/// `psi^amp` in real coordinates `(u1,u2,u3,v1,v2,v3)`, generic over the scalar type.
pub fn psi_generic<S: Scalar>(x: [S; 3], amp: f64, m: u32) -> [S; 6] {
    let w = Cx::new(x[0], x[1]);
    let zh1 = w.powu(m);
    let zh2 = w.scale(S::cst(amp.powf(1.0 / m as f64)));
    [zh1.re, zh1.im, x[2], zh2.re, -zh2.im, S::cst(0.0)]
}

fn psi_amp(x: &DomainPoint, amp: f64, prm: &ModelParams) -> AmbientPoint {
    let p = psi_generic(x.x, amp, prm.m);
    AmbientPoint::new([p[0], p[1], p[2]], [p[3], p[4], p[5]], prm.l)
}

pub fn psi_a(x: &DomainPoint, prm: &ModelParams) -> AmbientPoint {
    psi_amp(x, prm.a, prm)
}

/// `t . psi^a = psi^(a t^(m-1))`.
pub fn psi_a_scaled(x: &DomainPoint, t: f64, prm: &ModelParams) -> Result<AmbientPoint> {
    check_t(t)?;
    Ok(psi_amp(x, prm.scaled_amplitude(t), prm))
}

/// The same map through the partial scaling `(zh1,u3,zh2,v3) -> (t zh1,u3,t zh2,v3)`
/// applied to `psi^a` at the domain point `t^(-1/m) w`.
pub fn psi_a_scaled_by_partial_scaling(x: &DomainPoint, t: f64, prm: &ModelParams) -> Result<AmbientPoint> {
    check_t(t)?;
    let s = t.powf(-1.0 / prm.mf());
    let y = DomainPoint { x: [s * x.x[0], s * x.x[1], x.x[2]] };
    let h = hk_views(&psi_a(&y, prm));
    Ok(AmbientPoint::from_rotated(h.zh1 * t, h.u3, h.zh2 * t, h.v3, prm.l))
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t = {t} must lie in (0, 1]")))
    }
}

pub fn potential_generic<S: Scalar>(x: [S; 3], amp: f64, m: u32) -> S {
    let w = Cx::new(x[0], x[1]);
    let mf = m as f64;
    w.powu(m + 1).re * (mf / (mf + 1.0) * amp.powf(1.0 / mf))
}

/// `h^a = m/(m+1) a^(1/m) Re(w^(m+1))`.
pub fn potential_h(x: &DomainPoint, prm: &ModelParams) -> f64 {
    potential_generic(x.x, prm.a, prm.m)
}

/// The covering map `Phi(x, p) = (w^m, x3, (p1 - i p2) w^(1-m) / m, p3)` in rotated coordinates.
pub fn phi_map(x: &DomainPoint, p: [f64; 3], m: u32) -> Result<(C64, f64, C64, f64)> {
    let w = x.w();
    if w.norm() == 0.0 {
        return Err(Error::BranchCore);
    }
    let mi = m as i32;
    let zh2 = C64::new(p[0], -p[1]) * w.powi(1 - mi) / m as f64;
    Ok((w.powi(mi), x.x[2], zh2, p[2]))
}

/// Distance of `Phi(x, dh^a(x))` from `{a zh1 = zh2^m, v3 = 0}`, with `dh^a` by automatic differentiation.
pub fn graph_matches_image(x: &DomainPoint, prm: &ModelParams) -> Result<f64> {
    let h = potential_generic(Jet::<3>::seed(x.x), prm.a, prm.m);
    let (zh1, _, zh2, v3) = phi_map(x, h.gradient(), prm.m)?;
    Ok((zh1 * prm.a - zh2.powu(prm.m)).norm() + v3.abs())
}

/// Pushforward frame `e_j = D psi (d/dx_j)` of `t . psi^a`, hand-differentiated.
pub fn psi_frame(x: &DomainPoint, amp: f64, m: u32) -> [[f64; 6]; 3] {
    let w = x.w();
    let d = w.powu(m - 1) * m as f64;
    let c = amp.powf(1.0 / m as f64);
    // d/dx1: dzh1 = d, dzh2 = c ; d/dx2: dzh1 = i d, dzh2 = i c
    let e1 = [d.re, d.im, 0.0, c, 0.0, 0.0];
    let e2 = [-d.im, d.re, 0.0, 0.0, -c, 0.0];
    let e3 = [0.0, 0.0, 1.0, 0.0, 0.0, 0.0];
    [e1, e2, e3]
}

/// `omega'(v, w) = sum_k du_k ^ dv_k`.
pub fn omega(v: &[f64; 6], w: &[f64; 6]) -> f64 {
    (0..3).map(|k| v[k] * w[k + 3] - w[k] * v[k + 3]).sum()
}

/// `Omega'(e1, e2, e3) = det[dz_k(e_j)]`.
pub fn holomorphic_volume(e: &[[f64; 6]; 3]) -> C64 {
    let a: [[C64; 3]; 3] = std::array::from_fn(|k| std::array::from_fn(|j| C64::new(e[j][k], e[j][k + 3])));
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn gram_det(e: &[[f64; 6]; 3]) -> f64 {
    let g: [[f64; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| e[i].iter().zip(&e[j]).map(|(a, b)| a * b).sum()));
    g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
        + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlResidual {
    pub omega: f64,
    pub im_omega: f64,
}

pub fn sl_residual_of_frame(e: &[[f64; 6]; 3]) -> Result<SlResidual> {
    let g = gram_det(e);
    if !(g > 0.0) {
        return Err(Error::DegenerateFrame(g));
    }
    let om = omega(&e[0], &e[1]).abs().max(omega(&e[0], &e[2]).abs()).max(omega(&e[1], &e[2]).abs());
    Ok(SlResidual { omega: om, im_omega: holomorphic_volume(e).im.abs() / g.sqrt() })
}

pub fn sl_residual(x: &DomainPoint, t: f64, prm: &ModelParams) -> Result<SlResidual> {
    check_t(t)?;
    sl_residual_of_frame(&psi_frame(x, prm.scaled_amplitude(t), prm.m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn prm(m: u32, a: f64) -> ModelParams {
        ModelParams { m, a, ..Default::default() }
    }

    #[test]
    fn views_of_sample_point() {
        let h = hk_views(&AmbientPoint::new([1.0, 2.0, 0.5], [3.0, 4.0, 5.0], 1.0));
        assert_eq!(h.zh1, C64::new(1.0, 2.0));
        assert_eq!(h.zh2, C64::new(3.0, -4.0));
        assert_eq!(h.v3, 5.0);
        assert_eq!(h.z[1], C64::new(2.0, 4.0));
        let back = AmbientPoint::from_rotated(h.zh1, h.u3, h.zh2, h.v3, 1.0);
        assert_eq!(back.as_array(), [1.0, 2.0, 0.5, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn rotation_on_axes() {
        let p = AmbientPoint::new([0.0; 3], [0.0; 3], 1.0);
        let e = |k: usize| std::array::from_fn::<f64, 6, _>(|i| (i == k) as u8 as f64);
        for (a, b) in [(0, 1), (3, 4), (0, 3), (1, 4), (2, 5)] {
            assert!(rotation_identity_residual(&p, &e(a), &e(b)) <= 1e-14);
        }
    }

    #[test]
    fn psi_hand_values() {
        let p = prm(2, 1.0);
        let h = hk_views(&psi_a(&DomainPoint::new(1.0, 0.0, 0.0, 1.0), &p));
        assert_eq!((h.zh1, h.zh2), (C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
        let h = hk_views(&psi_a(&DomainPoint::new(0.0, 1.0, 0.0, 1.0), &p));
        assert_abs_diff_eq!(h.zh1.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.zh2.im, 1.0, epsilon = 1e-15);
        let h = hk_views(&psi_a(&DomainPoint::new(0.0, 0.0, 0.3, 1.0), &prm(5, 2.0)));
        assert_eq!((h.zh1.norm(), h.u3, h.zh2.norm(), h.v3), (0.0, 0.3, 0.0, 0.0));
    }

    #[test]
    fn scaled_examples() {
        let p = prm(2, 1.0);
        let x = DomainPoint::new(1.0, 0.0, 0.0, 1.0);
        let h = hk_views(&psi_a_scaled(&x, 0.25, &p).unwrap());
        assert_abs_diff_eq!(h.zh2.re, 0.5, epsilon = 1e-15);
        assert_eq!(psi_a_scaled(&x, 1.0, &p).unwrap(), psi_a(&x, &p));
        assert!(psi_a_scaled(&x, 0.0, &p).is_err());
    }

    #[test]
    fn potential_values() {
        let p = prm(2, 1.0);
        assert_abs_diff_eq!(potential_h(&DomainPoint::new(1.0, 0.0, 0.0, 1.0), &p), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(potential_h(&DomainPoint::new(0.0, 1.0, 0.0, 1.0), &p), 0.0, epsilon = 1e-15);
        assert_eq!(potential_h(&DomainPoint::new(0.0, 0.0, 0.7, 1.0), &p), 0.0);
    }

    #[test]
    fn graph_examples() {
        assert!(graph_matches_image(&DomainPoint::new(1.0, 0.0, 0.0, 1.0), &prm(2, 1.0)).unwrap() <= 1e-12);
        assert!(graph_matches_image(&DomainPoint::new(0.3, 0.4, 0.1, 1.0), &prm(3, 0.5)).unwrap() <= 1e-12);
        assert!(matches!(graph_matches_image(&DomainPoint::new(0.0, 0.0, 0.1, 1.0), &prm(3, 0.5)), Err(Error::BranchCore)));
    }

    #[test]
    fn frame_matches_jets() {
        let x = DomainPoint::new(0.3, -0.7, 0.2, 1.0);
        let e = psi_frame(&x, 0.8, 3);
        let p = psi_generic(Jet::<3>::seed(x.x), 0.8, 3);
        for j in 0..3 {
            for k in 0..6 {
                assert_abs_diff_eq!(e[j][k], p[k].derivative(&[j]), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn sl_on_core_and_off() {
        let p = prm(2, 1.0);
        for x in [DomainPoint::new(0.0, 0.0, 0.4, 1.0), DomainPoint::new(0.6, 0.2, 0.1, 1.0)] {
            let r = sl_residual(&x, 0.5, &p).unwrap();
            assert!(r.omega <= 1e-12 && r.im_omega <= 1e-12, "{r:?}");
        }
        let x = DomainPoint::new(0.0, 0.0, 0.4, 1.0);
        assert!(matches!(sl_residual_of_frame(&psi_frame(&x, 0.0, 2)), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn orientation_flip() {
        let x = DomainPoint::new(0.6, 0.2, 0.1, 1.0);
        let mut e = psi_frame(&x, 0.7, 3);
        let a = holomorphic_volume(&e);
        e.swap(0, 1);
        let b = holomorphic_volume(&e);
        assert_abs_diff_eq!(a.re, -b.re, epsilon = 1e-14);
        assert_abs_diff_eq!(
            sl_residual_of_frame(&e).unwrap().im_omega,
            sl_residual_of_frame(&psi_frame(&x, 0.7, 3)).unwrap().im_omega,
            epsilon = 1e-15
        );
    }
}
