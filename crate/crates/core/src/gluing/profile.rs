//! Glued radial profile `r2(r1)`, the `P/Q/K` split and the glued immersion.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::cutoff::SmoothCutoff;
use crate::error::Result;
use crate::flat_model::{psi_a_scaled, AmbientPoint, DomainPoint};
use crate::jet::{Cx, Scalar};
use crate::params::ModelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    P,
    Q,
    K,
}

impl RegionLabel {
    pub fn name(&self) -> &'static str {
        match self {
            RegionLabel::P => "P",
            RegionLabel::Q => "Q",
            RegionLabel::K => "K",
        }
    }
}

pub fn region_of_radius(r: f64, cut: &SmoothCutoff) -> RegionLabel {
    if r <= cut.b1 {
        RegionLabel::P
    } else if r <= cut.b2 {
        RegionLabel::Q
    } else {
        RegionLabel::K
    }
}

pub fn region_of(x: &DomainPoint, prm: &ModelParams, cut: &SmoothCutoff) -> RegionLabel {
    region_of_radius(x.radius(prm.m), cut)
}

/// Builds the cutoff for `t` from the join schedule of `prm`.
pub fn cutoff_for(t: f64, prm: &ModelParams) -> Result<SmoothCutoff> {
    SmoothCutoff::new(t, prm.b1(t), prm.b2(t), prm.r0)
}

/// The glued profile for fixed `t`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub m: u32,
    pub a: f64,
    pub t: f64,
    /// `a^(1/m) t^((m-1)/m)`
    pub scale: f64,
    pub cut: SmoothCutoff,
}

impl Profile {
    pub fn new(t: f64, prm: &ModelParams) -> Result<Self> {
        let cut = cutoff_for(t, prm)?;
        Ok(Self::with_cutoff(t, prm, cut))
    }

    pub fn with_cutoff(t: f64, prm: &ModelParams, cut: SmoothCutoff) -> Self {
        Profile { m: prm.m, a: prm.a, t, scale: prm.a.powf(1.0 / prm.mf()) * prm.tau(t), cut }
    }

    fn mf(&self) -> f64 {
        self.m as f64
    }

    /// `chi^(k)` as a scalar function of `r`, for `k <= 2`.
    pub fn chi<S: Scalar>(&self, r: S, k: usize) -> S {
        let d = self.cut.derivs(r.val());
        r.compose(&d[k..k + 4])
    }

    /// `r2 = a^(1/m) t^((m-1)/m) [ m/(m+1) chi'(r1) + chi(r1) r1^(1/m) ]`, signed.
    pub fn r2<S: Scalar>(&self, r1: S) -> S {
        let m = self.mf();
        if r1.val() <= self.cut.b1 {
            return r1.powf(1.0 / m) * self.scale;
        }
        if r1.val() >= self.cut.b2 {
            return S::cst(0.0);
        }
        (self.chi(r1, 1) * (m / (m + 1.0)) + self.chi(r1, 0) * r1.powf(1.0 / m)) * self.scale
    }

    /// Hand-differentiated `r2'`.
    pub fn r2_prime(&self, r1: f64) -> f64 {
        let m = self.mf();
        let d = self.cut.derivs(r1);
        let rho = r1.powf(1.0 / m);
        self.scale * (m / (m + 1.0) * d[2] + d[1] * rho + d[0] * r1.powf((1.0 - m) / m) / m)
    }

    /// Hand-differentiated `r2''`.
    pub fn r2_second(&self, r1: f64) -> f64 {
        let m = self.mf();
        let d = self.cut.derivs(r1);
        let rho = r1.powf(1.0 / m);
        let rho1 = r1.powf(1.0 / m - 1.0) / m;
        let rho2 = (1.0 - m) / (m * m) * r1.powf(1.0 / m - 2.0);
        self.scale * (m / (m + 1.0) * d[3] + d[2] * rho + 2.0 * d[1] * rho1 + d[0] * rho2)
    }

    /// `f^t(x) = (w^m, x3, r2(|w|^m) w/|w|, 0)` in real coordinates.
    pub fn immersion_generic<S: Scalar>(&self, x: [S; 3]) -> [S; 6] {
        let w = Cx::new(x[0], x[1]);
        let zh1 = w.powu(self.m);
        let n2 = w.norm_sqr();
        let zh2 = if n2.val() == 0.0 {
            Cx::real(S::cst(0.0))
        } else {
            let n = n2.sqrt();
            w.scale(self.r2(n.powi(self.m as i32)) / n)
        };
        [zh1.re, zh1.im, x[2], zh2.re, -zh2.im, S::cst(0.0)]
    }

    /// The Lagrangian graph of `d h^t` with `h^t = m/(m+1) a^(1/m) tau chi(r) Re(w^(m+1))`:
    /// `zh2 = a^(1/m) tau [ chi w + m/(m+1) chi' r Re(w^(m+1)) w^(-m) ]`.
    pub fn exact_graph_generic<S: Scalar>(&self, x: [S; 3]) -> [S; 6] {
        let m = self.m;
        let w = Cx::new(x[0], x[1]);
        let zh1 = w.powu(m);
        let n2 = w.norm_sqr();
        let zh2 = if n2.val() == 0.0 {
            Cx::real(S::cst(0.0))
        } else {
            let r = n2.powf(m as f64 / 2.0);
            let re = w.powu(m + 1).re;
            let inv = w.conj().powu(m).scale(n2.powi(-(m as i32)));
            let c = self.chi(r, 1) * r * re * (m as f64 / (m as f64 + 1.0));
            (w.scale(self.chi(r, 0)) + inv.scale(c)).scale(S::cst(self.scale))
        };
        [zh1.re, zh1.im, x[2], zh2.re, -zh2.im, S::cst(0.0)]
    }
}

fn to_point(p: [f64; 6], l: f64) -> AmbientPoint {
    AmbientPoint::new([p[0], p[1], p[2]], [p[3], p[4], p[5]], l)
}

pub fn glued_profile(r1: f64, prof: &Profile) -> f64 {
    prof.r2(r1)
}

/// `f^t(x)`; on `P` it is `psi_a_scaled` itself.
pub fn glued_immersion(x: &DomainPoint, prm: &ModelParams, prof: &Profile) -> Result<AmbientPoint> {
    match region_of(x, prm, &prof.cut) {
        RegionLabel::P => psi_a_scaled(x, prof.t, prm),
        _ => Ok(to_point(prof.immersion_generic(x.x), prm.l)),
    }
}

pub fn exact_graph_immersion(x: &DomainPoint, prm: &ModelParams, prof: &Profile) -> AmbientPoint {
    to_point(prof.exact_graph_generic(x.x), prm.l)
}

/// Polar output `(r1 e^(i theta1), x3, r2 e^(i theta2), 0)` used for reports.
pub fn polar_immersion(x: &DomainPoint, prof: &Profile) -> (C64, f64, C64) {
    let w = x.w();
    let r1 = w.norm().powi(prof.m as i32);
    let th = w.arg();
    (C64::from_polar(r1, prof.m as f64 * th), x.x[2], C64::from_polar(prof.r2(r1), th))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_model::{omega, psi_frame};
    use crate::jet::Jet;
    use approx::assert_abs_diff_eq;

    fn setup(m: u32, t: f64) -> (ModelParams, Profile) {
        let prm = ModelParams { m, ..Default::default() };
        let p = Profile::new(t, &prm).unwrap();
        (prm, p)
    }

    #[test]
    fn spec_value_on_p() {
        let (_, p) = setup(2, 0.01);
        assert_abs_diff_eq!(p.cut.b1, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(glued_profile(0.1, &p), 0.1 * 0.1f64.sqrt(), epsilon = 1e-15);
        assert_eq!(glued_profile(p.cut.b2, &p), 0.0);
        assert_eq!(glued_profile(2.0 * p.cut.b2, &p), 0.0);
    }

    #[test]
    fn regions() {
        let (prm, p) = setup(2, 0.01);
        let c = &p.cut;
        assert_eq!(region_of_radius(0.0, c), RegionLabel::P);
        assert_eq!(region_of_radius(c.b1, c), RegionLabel::P);
        assert_eq!(region_of_radius(0.5 * (c.b1 + c.b2), c), RegionLabel::Q);
        assert_eq!(region_of_radius(c.b2, c), RegionLabel::Q);
        assert_eq!(region_of_radius(2.0 * c.b2, c), RegionLabel::K);
        let x = DomainPoint::new(0.0, 0.0, 0.2, prm.l);
        assert_eq!(region_of(&x, &prm, c), RegionLabel::P);
    }

    #[test]
    fn derivatives_agree_with_jets() {
        for m in [2, 3, 5] {
            let (_, p) = setup(m, 0.01);
            for f in [0.2, 0.3, 0.45, 0.6, 0.8] {
                let r = p.cut.b2 * f;
                let j = p.r2(Jet::<1>::variable(0, r));
                let scale = p.r2_prime(r).abs() + 1.0;
                assert!((j.derivative(&[0]) - p.r2_prime(r)).abs() <= 1e-10 * scale);
                let s2 = p.r2_second(r).abs() + 1.0;
                assert!((j.derivative(&[0, 0]) - p.r2_second(r)).abs() <= 1e-9 * s2);
            }
        }
    }

    #[test]
    fn p_and_k_pieces() {
        let (prm, p) = setup(3, 0.05);
        let x = DomainPoint::new(0.01, 0.02, 0.3, prm.l);
        assert_eq!(glued_immersion(&x, &prm, &p).unwrap(), psi_a_scaled(&x, 0.05, &prm).unwrap());
        let s = (2.0 * p.cut.b2).powf(1.0 / 3.0);
        let x = DomainPoint::new(s * 0.6, s * 0.8, 0.3, prm.l);
        let f = glued_immersion(&x, &prm, &p).unwrap();
        assert_eq!(f.v, [0.0; 3]);
    }

    #[test]
    fn exact_graph_is_lagrangian() {
        let (_, p) = setup(2, 0.01);
        for f in [0.1, 0.3, 0.55, 0.9] {
            let rad = (p.cut.b2 * f).sqrt();
            let x = [rad * 0.8, rad * 0.6, 0.1];
            let im = p.exact_graph_generic(Jet::<3>::seed(x));
            let e: [[f64; 6]; 3] = std::array::from_fn(|j| std::array::from_fn(|k| im[k].derivative(&[j])));
            let scale = e.iter().map(|v| v.iter().map(|c| c * c).sum::<f64>()).sum::<f64>();
            assert!(omega(&e[0], &e[1]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn exact_graph_agrees_on_p() {
        let (prm, p) = setup(3, 0.05);
        let x = DomainPoint::new(0.01, -0.02, 0.3, prm.l);
        let a = exact_graph_immersion(&x, &prm, &p);
        let b = psi_a_scaled(&x, 0.05, &prm).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(a.as_array()[k], b.as_array()[k], epsilon = 1e-14);
        }
        let e = psi_frame(&x, prm.scaled_amplitude(0.05), 3);
        assert!(omega(&e[0], &e[1]).abs() < 1e-14);
    }
}
