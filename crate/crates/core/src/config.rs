//! Experiment configuration: flat `key = value` text with dotted keys.
//!
//! ```text
//! suite = phase-norms
//! seed = 7
//! model.m = 3
//! model.c1 = 0.8
//! grid.t_max_exp = 16
//! [spectral]
//! nr = 16
//! ```
//!
//! A `[section]` line prefixes the keys that follow it. Every key is optional.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{dyadic_grid, JoinSchedule, ModelParams};

pub const OUT_ENV: &str = "SLGLUE_OUT";
pub const DEFAULT_OUT: &str = "slglue-out";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    FlatIdentities,
    Gluing,
    PhaseNorms,
    Criteria,
    SobolevPartition,
    Spectral,
    SobolevProbe,
    All,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::FlatIdentities,
        Suite::Gluing,
        Suite::PhaseNorms,
        Suite::Criteria,
        Suite::SobolevPartition,
        Suite::Spectral,
        Suite::SobolevProbe,
        Suite::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::FlatIdentities => "flat-identities",
            Suite::Gluing => "gluing",
            Suite::PhaseNorms => "phase-norms",
            Suite::Criteria => "criteria",
            Suite::SobolevPartition => "sobolev-partition",
            Suite::Spectral => "spectral",
            Suite::SobolevProbe => "sobolev-probe",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

/// Mesh sizes and trial counts of the spectral suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSettings {
    /// coarse `[n_r, n_phi, n_theta]`; the fine level doubles each
    pub n: [usize; 3],
    pub torus_n: usize,
    pub trials: usize,
    pub eps_outer: f64,
    /// the comparison mesh stops at `1/(1 + j0)`
    pub j0: u32,
    pub exhaustion_steps: u32,
    pub convergence: Vec<usize>,
}

impl Default for SpectralSettings {
    fn default() -> Self {
        SpectralSettings {
            n: [16, 16, 8],
            torus_n: 32,
            trials: 100,
            eps_outer: 1.0,
            j0: 10,
            exhaustion_steps: 4,
            convergence: vec![8, 16, 32, 64],
        }
    }
}

impl SpectralSettings {
    pub fn fine(&self) -> [usize; 3] {
        self.n.map(|k| 2 * k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeSettings {
    pub n: [usize; 3],
    pub torus_n: usize,
    /// `t = 2^-k` for each listed `k`
    pub t_exps: Vec<u32>,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings { n: [24, 12, 6], torus_n: 12, t_exps: vec![4, 6, 8] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub params: ModelParams,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// `t_grid = 2^-k`, `k = t_min_exp..=t_max_exp`
    pub t_min_exp: u32,
    pub t_max_exp: u32,
    pub spectral: SpectralSettings,
    pub probe: ProbeSettings,
    /// non-fatal conditions found at load time
    pub warnings: Vec<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: Suite::All,
            params: ModelParams::default(),
            out_dir: PathBuf::from(DEFAULT_OUT),
            seed: 0,
            t_min_exp: 4,
            t_max_exp: 16,
            spectral: SpectralSettings::default(),
            probe: ProbeSettings::default(),
            warnings: Vec::new(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub suite: Option<Suite>,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub t_min_exp: Option<u32>,
    pub t_max_exp: Option<u32>,
    pub quad_tol: Option<f64>,
    pub fit_tol: Option<f64>,
}

fn value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::ConfigParse { line, msg: format!("key '{key}': cannot parse '{v}'") })
}

fn list<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|s| value(line, key, s.trim())).collect()
}

impl ExperimentConfig {
    fn set(&mut self, line: usize, key: &str, v: &str) -> Result<()> {
        let p = &mut self.params;
        let s = &mut self.spectral;
        match key {
            "suite" => {
                self.suite = v.parse().map_err(|msg| Error::ConfigParse { line, msg: format!("key 'suite': {msg}") })?
            }
            "seed" => self.seed = value(line, key, v)?,
            "out" => self.out_dir = PathBuf::from(v),
            "model.m" => p.m = value(line, key, v)?,
            "model.a" => p.a = value(line, key, v)?,
            "model.l" => p.l = value(line, key, v)?,
            "model.r0" => p.r0 = value(line, key, v)?,
            "model.r0_prime" => p.r0_prime = value(line, key, v)?,
            "model.c1" => p.c1 = value(line, key, v)?,
            "model.c2" => p.c2 = value(line, key, v)?,
            "model.kappa" => p.kappa = value(line, key, v)?,
            "model.eta1" => p.eta1 = value(line, key, v)?,
            "model.eta2" => p.eta2 = value(line, key, v)?,
            "model.c_eta1" => p.c_eta1 = value(line, key, v)?,
            "model.c_eta2" => p.c_eta2 = value(line, key, v)?,
            "model.part_a" => p.part_a = value(line, key, v)?,
            "model.part_b" => p.part_b = value(line, key, v)?,
            "model.schedule" => {
                p.schedule = match v {
                    "power" => JoinSchedule::Power,
                    "eta" => JoinSchedule::Eta,
                    _ => {
                        return Err(Error::ConfigParse {
                            line,
                            msg: format!("key 'model.schedule': expected 'power' or 'eta', got '{v}'"),
                        })
                    }
                }
            }
            "grid.t_min_exp" => self.t_min_exp = value(line, key, v)?,
            "grid.t_max_exp" => self.t_max_exp = value(line, key, v)?,
            "grid.fit_k_min" => p.fit_k_min = value(line, key, v)?,
            "tol.quad" => p.quad_tol = value(line, key, v)?,
            "tol.fit" => p.fit_tol = value(line, key, v)?,
            "spectral.nr" => s.n[0] = value(line, key, v)?,
            "spectral.nphi" => s.n[1] = value(line, key, v)?,
            "spectral.ntheta" => s.n[2] = value(line, key, v)?,
            "spectral.torus_n" => s.torus_n = value(line, key, v)?,
            "spectral.trials" => s.trials = value(line, key, v)?,
            "spectral.eps_outer" => s.eps_outer = value(line, key, v)?,
            "spectral.j0" => s.j0 = value(line, key, v)?,
            "spectral.exhaustion_steps" => s.exhaustion_steps = value(line, key, v)?,
            "spectral.convergence" => s.convergence = list(line, key, v)?,
            "probe.nr" => self.probe.n[0] = value(line, key, v)?,
            "probe.nphi" => self.probe.n[1] = value(line, key, v)?,
            "probe.ntheta" => self.probe.n[2] = value(line, key, v)?,
            "probe.torus_n" => self.probe.torus_n = value(line, key, v)?,
            "probe.t_exps" => self.probe.t_exps = list(line, key, v)?,
            _ => return Err(Error::ConfigParse { line, msg: format!("unknown key '{key}'") }),
        }
        Ok(())
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.suite {
            self.suite = s;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(k) = o.t_min_exp {
            self.t_min_exp = k;
        }
        if let Some(k) = o.t_max_exp {
            self.t_max_exp = k;
        }
        if let Some(x) = o.quad_tol {
            self.params.quad_tol = x;
        }
        if let Some(x) = o.fit_tol {
            self.params.fit_tol = x;
        }
    }

    /// All violated invariants, model parameters included.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.t_min_exp >= 1 && self.t_min_exp < self.t_max_exp && self.t_max_exp <= 60) {
            v.push(format!(
                "need 1 <= grid.t_min_exp < grid.t_max_exp <= 60 (got {}, {})",
                self.t_min_exp, self.t_max_exp
            ));
        } else {
            v.extend(self.params.violations());
            if self.t_max_exp < self.params.fit_k_min + 2 {
                v.push(format!(
                    "grid.fit_k_min = {} leaves fewer than three fit samples below grid.t_max_exp = {}",
                    self.params.fit_k_min, self.t_max_exp
                ));
            }
        }
        let s = &self.spectral;
        if s.n.iter().chain(&self.probe.n).any(|&k| k < 4) || s.torus_n < 4 || self.probe.torus_n < 4 {
            v.push("mesh resolutions must be >= 4".into());
        }
        if !(s.eps_outer > 1.0 / (1 + s.j0) as f64) {
            v.push(format!("spectral.eps_outer = {} must exceed 1/(1 + spectral.j0)", s.eps_outer));
        }
        if s.trials == 0 || s.exhaustion_steps < 2 || s.convergence.len() < 2 {
            v.push("spectral.trials >= 1, spectral.exhaustion_steps >= 2 and two convergence levels are required".into());
        }
        if self.probe.t_exps.is_empty() {
            v.push("probe.t_exps is empty".into());
        }
        v
    }

    /// Rebuilds the t-grid, validates and collects warnings.
    pub fn finish(mut self) -> Result<Self> {
        self.params.t_grid = dyadic_grid(self.t_min_exp, self.t_max_exp.max(self.t_min_exp));
        let v = self.violations();
        if !v.is_empty() {
            return Err(Error::ConfigInvalid(v.join("\n")));
        }
        self.warnings = self.params.warnings();
        Ok(self)
    }

    /// The configuration as text that parses back to the same value.
    pub fn render(&self) -> String {
        let p = &self.params;
        let s = &self.spectral;
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "suite = {}", self.suite);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "out = {}", self.out_dir.display());
        let model: [(&str, f64); 13] = [
            ("a", p.a),
            ("l", p.l),
            ("r0", p.r0),
            ("r0_prime", p.r0_prime),
            ("c1", p.c1),
            ("c2", p.c2),
            ("kappa", p.kappa),
            ("eta1", p.eta1),
            ("eta2", p.eta2),
            ("c_eta1", p.c_eta1),
            ("c_eta2", p.c_eta2),
            ("part_a", p.part_a),
            ("part_b", p.part_b),
        ];
        let _ = writeln!(out, "model.m = {}", p.m);
        for (k, x) in model {
            let _ = writeln!(out, "model.{k} = {x:?}");
        }
        let sched = match p.schedule {
            JoinSchedule::Power => "power",
            JoinSchedule::Eta => "eta",
        };
        let _ = writeln!(out, "model.schedule = {sched}");
        let _ = writeln!(out, "grid.t_min_exp = {}", self.t_min_exp);
        let _ = writeln!(out, "grid.t_max_exp = {}", self.t_max_exp);
        let _ = writeln!(out, "grid.fit_k_min = {}", p.fit_k_min);
        let _ = writeln!(out, "tol.quad = {:?}", p.quad_tol);
        let _ = writeln!(out, "tol.fit = {:?}", p.fit_tol);
        let _ = writeln!(out, "spectral.nr = {}\nspectral.nphi = {}\nspectral.ntheta = {}", s.n[0], s.n[1], s.n[2]);
        let _ = writeln!(out, "spectral.torus_n = {}\nspectral.trials = {}", s.torus_n, s.trials);
        let _ = writeln!(out, "spectral.eps_outer = {:?}\nspectral.j0 = {}", s.eps_outer, s.j0);
        let _ = writeln!(out, "spectral.exhaustion_steps = {}", s.exhaustion_steps);
        let _ = writeln!(out, "spectral.convergence = {}", join(&s.convergence));
        let q = &self.probe;
        let _ = writeln!(out, "probe.nr = {}\nprobe.nphi = {}\nprobe.ntheta = {}", q.n[0], q.n[1], q.n[2]);
        let _ = writeln!(out, "probe.torus_n = {}", q.torus_n);
        let exps: Vec<usize> = q.t_exps.iter().map(|&k| k as usize).collect();
        let _ = writeln!(out, "probe.t_exps = {}", join(&exps));
        out
    }
}

fn parse_lines(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| Error::ConfigParse { line, msg: format!("malformed section header '{body}'") })?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = body
            .split_once('=')
            .ok_or_else(|| Error::ConfigParse { line, msg: format!("expected 'key = value', got '{body}'") })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::ConfigParse { line, msg: format!("empty key or value in '{body}'") });
        }
        let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
        cfg.set(line, &key, v)?;
    }
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = parse_lines(text)?;
    cfg.apply(o);
    cfg.finish()
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    load_config_with(path, &Overrides::default())
}

pub fn load_config_with(path: &Path, o: &Overrides) -> Result<ExperimentConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_config_with(&text, o)
}
