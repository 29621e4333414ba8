//! Scalar parameters of the local gluing construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the join radii `b1 < b2` of the cutoff depend on `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum JoinSchedule {
    /// `b1 = t^c1`, `b2 = kappa * t^c2`.
    Power,
    /// `b1 = C1 * t^(1 - eta1)`, `b2 = C2 * t^(1 - eta2)`.
    Eta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// branching degree
    pub m: u32,
    /// deformation amplitude
    pub a: f64,
    /// circle length
    pub l: f64,
    /// outer chart radius
    pub r0: f64,
    /// inner core radius multiplier
    pub r0_prime: f64,
    pub c1: f64,
    pub c2: f64,
    /// prefactor of `b2` under the power schedule
    pub kappa: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub c_eta1: f64,
    pub c_eta2: f64,
    pub schedule: JoinSchedule,
    /// exponents `a < b` of the partition profile `G`
    pub part_a: f64,
    pub part_b: f64,
    /// decreasing, in (0, 1)
    pub t_grid: Vec<f64>,
    /// fits use the samples with `t <= 2^-fit_k_min`
    pub fit_k_min: u32,
    pub quad_tol: f64,
    pub fit_tol: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            m: 2,
            a: 1.0,
            l: 1.0,
            r0: 16.0,
            r0_prime: 0.5,
            c1: 0.5,
            c2: 0.3,
            kappa: 16.0,
            eta1: 0.1,
            eta2: 0.3,
            c_eta1: 1.0,
            c_eta2: 16.0,
            schedule: JoinSchedule::Power,
            part_a: 0.4,
            part_b: 0.6,
            t_grid: dyadic_grid(4, 16),
            fit_k_min: 10,
            quad_tol: 1e-8,
            fit_tol: 0.15,
        }
    }
}

/// `t = 2^-k` for `k = k_min..=k_max`.
pub fn dyadic_grid(k_min: u32, k_max: u32) -> Vec<f64> {
    (k_min..=k_max).map(|k| 2f64.powi(-(k as i32))).collect()
}

impl ModelParams {
    pub fn mf(&self) -> f64 {
        self.m as f64
    }

    pub fn b1(&self, t: f64) -> f64 {
        match self.schedule {
            JoinSchedule::Power => t.powf(self.c1),
            JoinSchedule::Eta => self.c_eta1 * t.powf(1.0 - self.eta1),
        }
    }

    pub fn b2(&self, t: f64) -> f64 {
        match self.schedule {
            JoinSchedule::Power => self.kappa * t.powf(self.c2),
            JoinSchedule::Eta => self.c_eta2 * t.powf(1.0 - self.eta2),
        }
    }

    /// `t^((m-1)/m)`, the amplitude factor of the scaled family.
    pub fn tau(&self, t: f64) -> f64 {
        t.powf((self.mf() - 1.0) / self.mf())
    }

    /// Amplitude `a t^(m-1)` of `t . L'^a`.
    pub fn scaled_amplitude(&self, t: f64) -> f64 {
        self.a * t.powi(self.m as i32 - 1)
    }

    /// Samples used for fitting exponents.
    pub fn fit_samples(&self) -> Vec<f64> {
        let cut = 2f64.powi(-(self.fit_k_min as i32)) * (1.0 + 1e-12);
        self.t_grid.iter().copied().filter(|&t| t <= cut).collect()
    }

    /// Threshold of the quasi-isometry estimate: `max(1/2 (1 + 1/m), (1 - a)/m)`.
    pub fn eta2_threshold(&self) -> f64 {
        let m = self.mf();
        (0.5 * (1.0 + 1.0 / m)).max((1.0 - self.part_a) / m)
    }

    /// All violated invariants, each as one message.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.m < 2 {
            v.push(format!("m = {} must be >= 2", self.m));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            v.push(format!("a = {} must be >= 0", self.a));
        }
        if !(self.l > 0.0) {
            v.push(format!("l = {} must be > 0", self.l));
        }
        if !(self.r0 > 0.0 && self.r0_prime > 0.0) {
            v.push("r0 and r0_prime must be > 0".into());
        }
        if !(self.c2 > 0.0 && self.c2 < self.c1) {
            v.push(format!("need 0 < c2 < c1 (c1 = {}, c2 = {})", self.c1, self.c2));
        }
        if !(self.eta1 > 0.0 && self.eta1 < self.eta2 && self.eta2 < 1.0) {
            v.push(format!("need 0 < eta1 < eta2 < 1 (eta1 = {}, eta2 = {})", self.eta1, self.eta2));
        }
        if !(self.part_a > 0.0 && self.part_a < self.part_b && self.part_b < 1.0) {
            v.push(format!("need 0 < part_a < part_b < 1 (part_a = {}, part_b = {})", self.part_a, self.part_b));
        }
        if self.t_grid.len() < 2 {
            v.push("t_grid needs at least two points".into());
        }
        for w in self.t_grid.windows(2) {
            if !(w[1] < w[0]) {
                v.push("t_grid must be strictly decreasing".into());
                break;
            }
        }
        for &t in &self.t_grid {
            if !(t > 0.0 && t < 1.0) {
                v.push(format!("t = {t} outside (0, 1)"));
                continue;
            }
            let (b1, b2) = (self.b1(t), self.b2(t));
            if !(t * self.r0_prime < b1 && b1 < b2 && b2 < self.r0) {
                v.push(format!(
                    "t = {t:e}: need t*r0_prime < b1 < b2 < r0 (t*r0_prime = {:e}, b1 = {b1:e}, b2 = {b2:e}, r0 = {})",
                    t * self.r0_prime,
                    self.r0
                ));
            } else if !(b1 < b2 / 8.0) {
                v.push(format!("t = {t:e}: cutoff needs b1 < b2/8 (b1 = {b1:e}, b2 = {b2:e})"));
            }
        }
        if !(self.quad_tol > 0.0 && self.fit_tol > 0.0) {
            v.push("tolerances must be > 0".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigInvalid(v.join("\n")))
        }
    }

    /// Non-fatal conditions worth reporting.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let thr = self.eta2_threshold();
        if self.eta2 <= thr {
            w.push(format!(
                "eta2 = {} does not exceed max(1/2 (1 + 1/m), (1 - a)/m) = {thr}; the quasi-isometry estimate does not apply",
                self.eta2
            ));
        }
        if self.part_b >= 1.0 - self.eta2 {
            w.push(format!(
                "part_b = {} is not below 1 - eta2 = {}; the partition ordering of the quasi-isometry estimate fails",
                self.part_b,
                1.0 - self.eta2
            ));
        }
        if matches!(self.m, 2 | 6 | 11) {
            w.push(format!("m = {} is one of the excluded degrees 2, 6, 11 of the Sobolev table statement", self.m));
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_and_validity() {
        let p = ModelParams::default();
        assert_eq!(p.t_grid.len(), 13);
        assert_eq!(p.t_grid[0], 1.0 / 16.0);
        assert_eq!(p.fit_samples().len(), 7);
        assert!(p.violations().is_empty(), "{:?}", p.violations());
    }

    #[test]
    fn rejects_c2_above_c1() {
        let p = ModelParams { c1: 0.3, c2: 0.5, ..Default::default() };
        let v = p.violations();
        assert!(v.iter().any(|s| s.contains("c1") && s.contains("c2")));
    }

    #[test]
    fn ratio_b1_b2_vanishes() {
        let p = ModelParams::default();
        let r: Vec<f64> = p.t_grid.iter().map(|&t| p.b1(t) / p.b2(t)).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]));
    }
}
