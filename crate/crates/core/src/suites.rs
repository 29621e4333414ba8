//! The verification suites. Each check runs in isolation: an error becomes a
//! failed record and the remaining checks still run.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::criteria::{criteria_report, quasi_isometry_check, CriteriaResolution};
use crate::asymptotics::norms::{judge, norm_curve, NormCurve};
use crate::asymptotics::partition::{judge_partition, sobolev_partition_curves, PartitionProfile};
use crate::asymptotics::regions::{classify_refined, classify_region, lattice_check, Quantity, Table};
use crate::config::{ExperimentConfig, Suite};
use crate::error::{Error, Result};
use crate::flat_model::{graph_matches_image, rotation_identity_residual, sl_residual, AmbientPoint, DomainPoint};
use crate::geometry::hamiltonian::{flow, hamiltonian_neighborhood, QuadraticField, M3};
use crate::gluing::cutoff_for;
use crate::params::{JoinSchedule, ModelParams};
use crate::report::{emit_reports, CheckRecord, VerificationReport};
use crate::spectral::analysis::{
    convergence_study, eigenvalue_comparison, exhaustion_sequence, flat_single_mode_ratio, flat_torus_operator,
    poincare_check, sobolev_probe_on, sobolev_probe_trend,
};
use crate::spectral::mesh::build_branched_mesh;
use crate::spectral::operator::first_eigenvalue;

/// Sharp Sobolev constant `||v||_6 <= S ||dv||_2` of Euclidean 3-space.
pub const EUCLIDEAN_SOBOLEV: f64 = 0.427_030_27;

const TABLE_DEGREES: [u32; 2] = [2, 3];

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    report: VerificationReport,
}

impl<'a> Runner<'a> {
    fn check<F>(&mut self, id: String, anchor: &str, f: F)
    where
        F: FnOnce(CheckRecord, &mut Vec<NormCurve>) -> Result<CheckRecord>,
    {
        let start = Instant::now();
        let mut curves = Vec::new();
        let rec = f(CheckRecord::new(id.clone(), anchor), &mut curves).unwrap_or_else(|e| CheckRecord::failed(&id, anchor, &e));
        self.report.runtimes.push((rec.id.clone(), start.elapsed().as_secs_f64()));
        self.report.curves.extend(curves);
        self.report.push(rec);
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn params(&self) -> &ModelParams {
        &self.cfg.params
    }
}

/// Runs `cfg.suite` and returns the report without writing files.
pub fn run_suite(cfg: &ExperimentConfig) -> VerificationReport {
    let mut r = Runner { cfg, report: VerificationReport::new(cfg.suite.name(), cfg.seed) };
    r.report.warnings = cfg.warnings.clone();
    let order: Vec<Suite> = match cfg.suite {
        Suite::All => Suite::ALL.iter().copied().filter(|s| *s != Suite::All).collect(),
        s => vec![s],
    };
    for s in order {
        match s {
            Suite::FlatIdentities => flat_identities(&mut r),
            Suite::Gluing => gluing(&mut r),
            Suite::PhaseNorms => phase_norms(&mut r),
            Suite::Criteria => criteria(&mut r),
            Suite::SobolevPartition => sobolev_partition(&mut r),
            Suite::Spectral => spectral(&mut r),
            Suite::SobolevProbe => sobolev_probe(&mut r),
            Suite::All => unreachable!(),
        }
    }
    r.report
}

/// Runs the suite and writes the three report files into `cfg.out_dir`.
pub fn run_and_emit(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    let rep = run_suite(cfg);
    emit_reports(&rep, &cfg.out_dir)?;
    Ok(rep)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |a: f64, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

fn domain_point(rng: &mut ChaCha8Rng, l: f64) -> DomainPoint {
    loop {
        let (x1, x2) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        if f64::hypot(x1, x2) >= 0.05 {
            return DomainPoint::new(x1, x2, rng.gen_range(0.0..l), l);
        }
    }
}

fn spd() -> M3 {
    [[2.0, 0.3, 0.1], [0.3, 1.5, -0.2], [0.1, -0.2, 1.0]]
}

fn flat_identities(r: &mut Runner) {
    let l = r.params().l;
    let mut rng = r.rng(1);
    r.check("flat.rotation_identity".into(), "hyperkaehler rotation identities of the flat model", |c, _| {
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let u: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let a: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let b: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            worst = worst.max(rotation_identity_residual(&AmbientPoint::new(u, v, l), &a, &b));
        }
        Ok(c.measured(worst).tolerance(1e-12).pass(worst <= 1e-12).detail("1000 random points and tangent pairs"))
    });
    for m in [2u32, 3, 4] {
        let mut rng = r.rng(10 + m as u64);
        let base = r.params().clone();
        r.check(format!("flat.sl_residual.m{m}"), "the exact family is special Lagrangian", |c, _| {
            let mut worst: f64 = 0.0;
            for a in [0.25, 1.0, 4.0] {
                let prm = ModelParams { m, a, ..base.clone() };
                for t in [1.0, 0.5, 0.1] {
                    for _ in 0..40 {
                        let s = sl_residual(&domain_point(&mut rng, l), t, &prm)?;
                        worst = max_of([worst, s.omega, s.im_omega]);
                    }
                }
            }
            Ok(c.measured(worst).tolerance(1e-10).pass(worst <= 1e-10).detail("a in {0.25, 1, 4}, t in {1, 0.5, 0.1}"))
        });
    }
    let mut rng = r.rng(20);
    let base = r.params().clone();
    r.check("flat.graph_containment".into(), "the exact family is the graph of the potential differential", |c, _| {
        let mut worst: f64 = 0.0;
        for m in [2u32, 3, 4] {
            for a in [0.25, 1.0, 4.0] {
                let prm = ModelParams { m, a, ..base.clone() };
                for _ in 0..40 {
                    worst = max_of([worst, graph_matches_image(&domain_point(&mut rng, l), &prm)?]);
                }
            }
        }
        Ok(c.measured(worst).tolerance(1e-10).pass(worst <= 1e-10))
    });
    hamiltonian(r);
}

fn hamiltonian(r: &mut Runner) {
    let mut rng = r.rng(30);
    let seeds: Vec<[f64; 6]> =
        (0..20).map(|_| std::array::from_fn(|i| rng.gen_range(-0.5..0.5) * if i < 3 { 1.0 } else { 0.2 })).collect();
    let anchor = "Hamiltonian flow of a quadratic fibre form";
    let a = spd();
    let constant = QuadraticField::constant(a);
    r.check("hamiltonian.constant.oracle".into(), anchor, |c, _| {
        let mut worst: f64 = 0.0;
        for s in &seeds {
            let f = flow(&constant, *s, 1.0, 10)?;
            for i in 0..3 {
                let q = s[i] + (0..3).map(|j| a[i][j] * s[3 + j]).sum::<f64>();
                worst = max_of([worst, (f.end[i] - q).abs(), (f.end[3 + i] - s[3 + i]).abs()]);
            }
        }
        Ok(c.measured(worst).tolerance(1e-10).pass(worst <= 1e-10).detail("end point against q + A p T, p fixed"))
    });
    let g = [
        [[0.2, 0.0, 0.1], [0.0, -0.1, 0.0], [0.1, 0.0, 0.3]],
        [[0.0; 3]; 3],
        [[0.0, 0.1, 0.0], [0.1, 0.0, 0.0], [0.0, 0.0, 0.2]],
    ];
    let linear = QuadraticField { a0: a, grad: g };
    for (name, field) in [("constant", &constant), ("linear", &linear)] {
        let samples = hamiltonian_neighborhood(field, [0.2, 0.1, -0.3], 0.1, 1.0, 40).map_err(|e| e.to_string());
        let get = || samples.as_ref().map_err(|e| Error::Internal(e.clone()));
        r.check(format!("hamiltonian.{name}.symplectic"), anchor, |c, _| {
            let d = max_of(get()?.iter().map(|s| s.symplectic_defect));
            Ok(c.measured(d).tolerance(1e-8).pass(d <= 1e-8))
        });
        r.check(format!("hamiltonian.{name}.tangency"), anchor, |c, _| {
            let s = get()?;
            let zero = s.iter().find(|s| s.seed[3..].iter().all(|v| *v == 0.0)).ok_or_else(|| Error::Internal("no zero-section seed".into()))?;
            let ang = zero.tangency_angle;
            Ok(c.measured(ang).tolerance(1e-6).pass(ang <= 1e-6).detail("pushed fibre against the graph of A(q) T"))
        });
    }
}

fn gluing(r: &mut Runner) {
    let prm = r.params().clone();
    r.check("gluing.cutoff.endpoints".into(), "the cutoff is constant outside [b1, b2]", |c, _| {
        let mut exact = true;
        let mut inner: f64 = 0.0;
        for &t in &prm.t_grid {
            let cut = cutoff_for(t, &prm)?;
            for x in [0.0, 0.5 * cut.b1, cut.b1] {
                exact &= cut.derivs(x) == [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
            }
            for x in [cut.b2, 1.5 * cut.b2, cut.r0] {
                exact &= cut.derivs(x) == [0.0; 6];
            }
            let lo = cut.derivs(cut.b1 * (1.0 + 1e-9));
            let hi = cut.derivs(cut.b2 * (1.0 - 1e-9));
            inner = max_of([inner, (lo[0] - 1.0).abs(), hi[0].abs()]);
        }
        Ok(c.measured(inner)
            .tolerance(1e-9)
            .pass(exact && inner <= 1e-9)
            .detail(format!("exact outside: {exact}; largest one-sided jump {inner:.2e}")))
    });
    r.check("gluing.cutoff.certificate".into(), "one constant bounds |chi^(k)| b2^k, k = 1, 2, 3", |c, _| {
        let c0 = prm.t_grid.iter().map(|&t| cutoff_for(t, &prm).map(|c| c.c0)).collect::<Result<Vec<f64>>>()?;
        let hi = c0.iter().copied().fold(0.0, f64::max);
        let lo = c0.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = hi / lo;
        Ok(c.predicted(2.0)
            .measured(spread)
            .pass(spread <= 2.0 && lo > 0.0)
            .detail(format!("C0 in [{lo:.4}, {hi:.4}] over {} t values", c0.len())))
    });
}

/// `bounded` additionally requires `value / t^predicted` to stay bounded along the grid.
fn curve_check(r: &mut Runner, id: String, anchor: &str, q: Quantity, prm: ModelParams, exploratory: bool, bounded: bool) {
    let tol = prm.fit_tol;
    r.check(id, anchor, |c, curves| {
        let curve = norm_curve(q, &prm)?;
        let v = judge(&curve, tol);
        curves.push(curve);
        let ratio_ok = v.ratio_growth <= 0.2;
        let mut c = c
            .predicted(v.predicted.unwrap_or(f64::NAN))
            .measured(v.fitted)
            .tolerance(tol)
            .pass(v.pass && (ratio_ok || !bounded))
            .detail(format!(
                "{} {}: {}; ratio bounded: {ratio_ok} (growth {:.3})",
                q.tag(),
                v.region,
                v.detail,
                v.ratio_growth
            ));
        if exploratory {
            let d = format!("{} (outside the degrees covered by the table statement)", c.detail);
            c = c.exploratory().detail(d);
        }
        Ok(c)
    });
}

const PHASE: [Quantity; 8] = [
    Quantity::EpsC0P,
    Quantity::EpsC0Q,
    Quantity::EpsL65P,
    Quantity::EpsL65Q,
    Quantity::EpsL1P,
    Quantity::EpsL1Q,
    Quantity::DepsL6P,
    Quantity::DepsL6Q,
];

fn phase_anchor(q: Quantity) -> &'static str {
    match q {
        Quantity::EpsC0P | Quantity::EpsC0Q => "sup-norm bound of the phase on P and Q",
        Quantity::EpsL65P | Quantity::EpsL1P | Quantity::DepsL6P => "equality-order Sobolev norms of the phase on P",
        _ => "upper-bound Sobolev table of the phase on Q",
    }
}

fn excluded_degree(m: u32) -> bool {
    matches!(m, 2 | 6 | 11)
}

fn phase_norms(r: &mut Runner) {
    let prm = r.params().clone();
    r.check("phase.config.region".into(), "region classification of (c1, c2)", |c, _| {
        let coarse = classify_region(prm.c1, prm.c2, prm.m)?;
        let refined = classify_refined(prm.c1, prm.c2, prm.m)?;
        Ok(c.pass(true).detail(format!("coarse {coarse}, refined {refined} at m = {}", prm.m)))
    });
    for q in PHASE {
        let sobolev_q = q.piece() == Some(crate::gluing::RegionLabel::Q) && q != Quantity::EpsC0Q;
        let exploratory = sobolev_q && excluded_degree(prm.m);
        curve_check(r, format!("phase.config.{}", q.tag()), phase_anchor(q), q, prm.clone(), exploratory, false);
    }
    for m in TABLE_DEGREES {
        for q in [Quantity::EpsC0P, Quantity::EpsC0Q] {
            let p = ModelParams { m, c1: 0.5, c2: 0.3, ..prm.clone() };
            curve_check(r, format!("phase.sup.m{m}.{}", q.tag()), phase_anchor(q), q, p, false, true);
        }
    }
    for m in TABLE_DEGREES {
        for c1 in [0.5, 1.5] {
            let r0_prime = if c1 > 1.0 { 2f64.powi(-9) } else { prm.r0_prime.min(0.5) };
            let p = ModelParams { m, c1, c2: 0.3, r0_prime, ..prm.clone() };
            for q in [Quantity::EpsL65P, Quantity::EpsL1P, Quantity::DepsL6P] {
                curve_check(r, format!("phase.p.m{m}.c1_{c1}.{}", q.tag()), phase_anchor(q), q, p.clone(), false, false);
            }
        }
    }
    // one (c1, c2) inside each of the coarse regions (7), (12) and (1) at m = 3
    let kmax = prm.t_grid.last().map_or(16.0, |t| -t.log2());
    for (name, c1, c2) in [("7", 0.8, 0.5), ("12", 0.25, 0.15), ("1", 1.6, 1.2)] {
        let r0_prime = if c1 > 1.0 { 2f64.powf(-(c1 - 1.0) * kmax - 1.0) } else { prm.r0_prime };
        let p = ModelParams { m: 3, c1, c2, r0_prime, ..prm.clone() };
        for q in [Quantity::EpsC0Q, Quantity::EpsL65Q, Quantity::EpsL1Q, Quantity::DepsL6Q] {
            curve_check(r, format!("phase.q.region{name}.{}", q.tag()), phase_anchor(q), q, p.clone(), false, false);
        }
    }
    for m in TABLE_DEGREES {
        for (table, tname) in [(Table::Coarse, "coarse"), (Table::Refined, "refined")] {
            let rep = lattice_check(table, m, 100);
            r.check(format!("regions.{tname}.m{m}.coverage"), "the region tables cover the quadrant with unique ids", |c, _| {
                Ok(c.measured((rep.uncovered.len() + rep.overlaps.len()) as f64)
                    .predicted(0.0)
                    .pass(rep.coverage_ok())
                    .detail(format!("{} lattice points, {} uncovered, {} overlapping", rep.points, rep.uncovered.len(), rep.overlaps.len())))
            });
            r.check(format!("regions.{tname}.m{m}.continuity"), "dominant exponents agree across region boundaries", |c, _| {
                let first = rep.jumps.first().map_or(String::new(), |j| {
                    format!("; first at (c1, c2) = ({}, {}) in {}: {} {} vs {} {}", j.0, j.1, j.2, j.3, j.4, j.5, j.6)
                });
                Ok(c.measured(rep.jumps.len() as f64)
                    .predicted(0.0)
                    .pass(rep.continuity_ok())
                    .detail(format!("{} boundary points, {} jumps{first}", rep.boundary_points, rep.jumps.len())))
            });
        }
    }
}

fn criteria(r: &mut Runner) {
    let res = CriteriaResolution::default();
    for m in TABLE_DEGREES {
        let prm = ModelParams { m, ..r.params().clone() };
        let rep = criteria_report(&prm, &res);
        let anchor = "scaling of the perturbation criteria on the glued family";
        let Ok(rep) = rep else {
            let e = rep.unwrap_err();
            r.check(format!("criteria.m{m}"), anchor, |_, _| Err(e));
            continue;
        };
        for s in &rep.series {
            let kind = match s.bound {
                crate::asymptotics::criteria::Bound::Above => "bounded above",
                crate::asymptotics::criteria::Bound::Below => "bounded below",
            };
            r.check(format!("criteria.m{m}.{}", s.name), anchor, |c, _| {
                Ok(c.measured(s.variation)
                    .tolerance(0.2)
                    .pass(s.pass)
                    .detail(format!("scaled value {kind}, range [{:.4e}, {:.4e}]", s.min, s.max)))
            });
        }
        let d = rep.decay.clone();
        r.check(format!("criteria.m{m}.connection_decay"), "decay of the connection difference on the exact family", |c, _| {
            Ok(c.predicted(d.predicted).measured(d.slope).tolerance(0.1).pass(d.pass))
        });
    }
}

fn sobolev_partition(r: &mut Runner) {
    let base = r.params().clone();
    for (m, a, b, eta1) in [(2u32, 0.4, 0.6, 0.5), (3, 0.6, 0.8, 0.3)] {
        let prm = ModelParams { m, part_a: a, part_b: b, ..base.clone() };
        let anchor = "norms of the partition function";
        let curves = sobolev_partition_curves(&prm, PartitionProfile::Smoothstep);
        let (df, omf) = match curves {
            Ok(c) => c,
            Err(e) => {
                r.check(format!("partition.m{m}"), anchor, |_, _| Err(e));
                continue;
            }
        };
        let v = judge_partition(&df, &omf, &prm);
        r.check(format!("partition.m{m}.{}", omf.quantity.tag()), anchor, |c, cs| {
            cs.push(omf.clone());
            Ok(c.predicted(v.one_minus_f_predicted).measured(v.one_minus_f_exponent).tolerance(0.1).pass(v.one_minus_f_pass))
        });
        r.check(format!("partition.m{m}.{}", df.quantity.tag()), anchor, |c, cs| {
            cs.push(df.clone());
            let (lo, hi) = v.df_window;
            Ok(c.predicted(-b / 3.0)
                .measured(v.df_exponent)
                .tolerance(0.05)
                .pass(v.df_pass)
                .detail(format!("log-corrected exponent in [{lo:.4}, {hi:.4}]")))
        });
        let qprm = ModelParams { eta1, eta2: 0.8, c_eta2: 8.0, schedule: JoinSchedule::Eta, ..prm.clone() };
        r.check(format!("partition.m{m}.quasi_isometry"), "summands of the quasi-isometry estimate vanish", |c, _| {
            let q = quasi_isometry_check(&qprm, 400)?;
            Ok(c.predicted(q.threshold)
                .measured(q.eta2)
                .pass(q.pass)
                .detail(format!(
                    "eta2 {} > threshold {:.4}; fitted {:?} vs predicted {:?}; tending to zero {:?}",
                    q.eta2, q.threshold, q.fitted.map(|x| (x * 1e4).round() / 1e4), q.predicted.map(|x| (x * 1e4).round() / 1e4), q.tends_to_zero
                )))
        });
    }
}

fn spectral(r: &mut Runner) {
    let s = r.cfg.spectral.clone();
    let l = r.params().l;
    let seed = r.cfg.seed;
    for m in TABLE_DEGREES {
        for (level, n) in [("coarse", s.n), ("fine", s.fine())] {
            r.check(format!("spectral.m{m}.{level}.comparison"), "first eigenvalue under a tame curvature singularity", |c, _| {
                let mesh = build_branched_mesh(m, l, s.eps_outer, n, Some((1, s.j0)))?;
                let cmp = eigenvalue_comparison(&mesh)?;
                Ok(c.predicted(cmp.lambda_smoothed / cmp.divisor)
                    .measured(cmp.lambda_pullback)
                    .pass(cmp.pass)
                    .detail(format!("lambda(g') {:.4} >= lambda(g) {:.4} / c^8, mesh {n:?}", cmp.lambda_pullback, cmp.lambda_smoothed)))
            });
        }
        r.check(format!("spectral.m{m}.poincare"), "Poincare inequality from the eigenvalue comparison", |c, _| {
            let mesh = build_branched_mesh(m, l, s.eps_outer, s.n, Some((1, s.j0)))?;
            let p = poincare_check(&mesh, s.trials, seed ^ m as u64)?;
            Ok(c.predicted(p.bound)
                .measured(p.worst_ratio)
                .pass(p.pass)
                .detail(format!("{} trials; first eigenfunction ratio {:.4}", p.trials, p.eigen_ratio)))
        });
        r.check(format!("spectral.m{m}.exhaustion"), "first eigenvalue along the exhaustion", |c, _| {
            let seq = exhaustion_sequence(m, l, s.eps_outer, s.n, s.j0, s.exhaustion_steps)?;
            let vals: Vec<f64> = seq.iter().map(|x| x.1).collect();
            let monotone = vals.windows(2).all(|w| w[1] <= w[0]);
            Ok(c.measured(*vals.last().unwrap_or(&f64::NAN))
                .pass(monotone)
                .detail(format!("non-increasing in j: {vals:.4?}")))
        });
    }
    r.check("spectral.flat_torus".into(), "reference eigenvalue of the flat unit 3-torus", |c, _| {
        let v = first_eigenvalue(&flat_torus_operator(s.torus_n, 1.0)?)?.value;
        let want = 4.0 * PI * PI;
        let rel = (v / want - 1.0).abs();
        Ok(c.predicted(want).measured(v).tolerance(0.02).pass(rel <= 0.02).detail(format!("{0}^3 cells, relative error {rel:.2e}", s.torus_n)))
    });
    r.check("spectral.convergence".into(), "second-order eigenvalue convergence", |c, _| {
        let cv = convergence_study(2, s.eps_outer, &s.convergence)?;
        let worst = cv.orders.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(c.predicted(2.0)
            .measured(worst)
            .tolerance(0.2)
            .pass(cv.pass)
            .detail(format!("radial cells {:?}, orders {:.3?} against the Bessel value {:.6}", cv.resolutions, cv.orders, cv.exact)))
    });
}

fn sobolev_probe(r: &mut Runner) {
    let p = r.cfg.probe.clone();
    let seed = r.cfg.seed;
    let prm = r.params().clone();
    r.check("probe.flat_torus".into(), "exploratory", |c, _| {
        let probe = sobolev_probe_on(&flat_torus_operator(p.torus_n, 1.0)?, 20, 6, seed)?;
        let single = flat_single_mode_ratio();
        let c = c
            .predicted(single)
            .measured(probe.a7)
            .detail(format!(
                "sup ||v||_6/||dv||_2 over {} modes; single mode {single:.4}, Euclidean sharp constant {EUCLIDEAN_SOBOLEV}; converged {}",
                probe.modes, probe.minimiser_converged
            ));
        Ok(c.exploratory())
    });
    r.check("probe.glued_trend".into(), "exploratory", |c, _| {
        let ts: Vec<f64> = p.t_exps.iter().map(|&k| 2f64.powi(-(k as i32))).collect();
        let tr = sobolev_probe_trend(&prm, &ts, p.n, seed)?;
        let vals: Vec<String> = tr.samples.iter().map(|(t, s)| format!("t={t:e}: {:.4}", s.a7)).collect();
        Ok(c.measured(tr.slope).detail(format!("log-log slope of the probed constant in t; {}", vals.join(", "))).exploratory())
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn flat_suite_passes() {
        let cfg = parse_config("suite = flat-identities").unwrap();
        let rep = run_suite(&cfg);
        assert!(!rep.failed(), "{}", crate::report::table(&rep));
        assert_eq!(rep.checks.len(), 10);
    }

    #[test]
    fn errors_are_captured_per_check() {
        let mut r = Runner { cfg: &ExperimentConfig::default(), report: VerificationReport::new("x", 0) };
        r.check("a".into(), "claim", |_, _| Err(Error::Internal("boom".into())));
        r.check("b".into(), "claim", |c, _| Ok(c.pass(true)));
        assert!(!r.report.checks[0].pass && r.report.checks[0].detail.contains("boom"));
        assert!(r.report.checks[1].pass);
    }
}
