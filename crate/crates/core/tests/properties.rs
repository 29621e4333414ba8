use num_rational::Rational64;
use proptest::prelude::*;

use slglue::asymptotics::fit::fit_exponent;
use slglue::asymptotics::norms::NormCurve;
use slglue::asymptotics::regions::{classify_exact, predicted_exact, BoundKind, Quantity, Table};
use slglue::config::{parse_config, ExperimentConfig, Suite};
use slglue::flat_model::{graph_matches_image, rotation_identity_residual, sl_residual, AmbientPoint, DomainPoint};
use slglue::gluing::cutoff_for;
use slglue::params::{dyadic_grid, ModelParams};
use slglue::report::{curves_csv, parse_summary, summary_json, CheckRecord, VerificationReport};
use slglue::spectral::analysis::flat_torus_operator;
use slglue::spectral::mesh::build_branched_mesh;
use slglue::spectral::mesh::Weighting;
use slglue::spectral::operator::assemble;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fit_recovers_exponent(p in -3.0f64..4.0, q in prop::sample::select(vec![-1.0, 0.0, 1.0, 2.0]), c in 0.01f64..100.0) {
        let ts = dyadic_grid(6, 18);
        let vs: Vec<f64> = ts.iter().map(|&t| c * t.powf(p) * (-t.ln()).powf(q)).collect();
        let f = fit_exponent(&ts, &vs, q).unwrap();
        prop_assert!((f.exponent - p).abs() <= 1e-9, "{} vs {p}", f.exponent);
        prop_assert!(f.r_squared > 1.0 - 1e-9 || p.abs() < 1e-6);
    }

    #[test]
    fn every_lattice_point_has_a_region(n1 in 2i64..300, n2 in 1i64..300, m in 2u32..8) {
        prop_assume!(n2 < n1);
        let (c1, c2) = (Rational64::new(n1, 100), Rational64::new(n2, 100));
        for table in [Table::Coarse, Table::Refined] {
            prop_assert!(classify_exact(table, c1, c2, m).is_ok());
        }
        for qt in [Quantity::EpsL65Q, Quantity::EpsL1Q, Quantity::DepsL6Q, Quantity::EpsL1P] {
            let p = predicted_exact(qt, c1, c2, m).unwrap();
            prop_assert!(p.exponent_f64().is_finite());
        }
    }

    #[test]
    fn rotation_identities_hold(u in prop::array::uniform3(-5.0f64..5.0), v in prop::array::uniform3(-5.0f64..5.0),
                                a in prop::array::uniform6(-1.0f64..1.0), b in prop::array::uniform6(-1.0f64..1.0)) {
        prop_assert!(rotation_identity_residual(&AmbientPoint::new(u, v, 1.0), &a, &b) <= 1e-12);
    }

    #[test]
    fn exact_family_is_special_lagrangian(m in 2u32..6, a in 0.05f64..5.0, t in 0.05f64..1.0,
                                          r in 0.1f64..2.0, phi in 0.0f64..6.28, x3 in 0.0f64..1.0) {
        let prm = ModelParams { m, a, ..Default::default() };
        let x = DomainPoint::new(r * phi.cos(), r * phi.sin(), x3, 1.0);
        let s = sl_residual(&x, t, &prm).unwrap();
        prop_assert!(s.omega <= 1e-10 && s.im_omega <= 1e-10, "{s:?}");
        prop_assert!(graph_matches_image(&x, &prm).unwrap() <= 1e-10);
    }

    #[test]
    fn cutoff_is_constant_outside_its_annulus(k in 4i32..17, c1 in 0.35f64..0.9, c2 in 0.05f64..0.3, s in 0.0f64..1.0) {
        let prm = ModelParams { c1, c2, ..Default::default() };
        let t = 2f64.powi(-k);
        let cut = cutoff_for(t, &prm).unwrap();
        prop_assert_eq!(cut.derivs(s * cut.b1), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        prop_assert_eq!(cut.derivs(cut.b2 + s * (cut.r0 - cut.b2)), [0.0; 6]);
        let v = cut.value(cut.b1 + s * (cut.b2 - cut.b1));
        prop_assert!(v.is_finite() && cut.c0 > 0.0);
    }

    #[test]
    fn stiffness_is_nonnegative(u in prop::collection::vec(-1.0f64..1.0, 8 * 4 * 4), m in 2u32..4) {
        let mesh = build_branched_mesh(m, 1.0, 1.0, [8, 4, 4], Some((1, 4))).unwrap();
        for w in [Weighting::Pullback, Weighting::Smoothed] {
            let op = assemble(mesh.grid(w));
            prop_assert!(op.energy(&u) >= -1e-12);
        }
    }

    #[test]
    fn constants_lie_in_the_closed_kernel(c in -3.0f64..3.0) {
        let op = flat_torus_operator(6, 1.0).unwrap();
        let u = vec![c; op.len()];
        prop_assert!(op.apply(&u).iter().all(|x| x.abs() <= 1e-10));
    }

    #[test]
    fn config_text_round_trips(m in 2u32..6, c2 in 0.05f64..0.3, dc in 0.05f64..0.5, seed in any::<u64>(),
                               kmax in 13u32..20, suite in prop::sample::select(Suite::ALL.to_vec())) {
        let c1 = c2 + dc;
        let text = format!("suite = {suite}\nseed = {seed}\nmodel.m = {m}\nmodel.c1 = {c1:?}\nmodel.c2 = {c2:?}\ngrid.t_max_exp = {kmax}\n");
        let Ok(cfg) = parse_config(&text) else { return Ok(()) };
        let again: ExperimentConfig = parse_config(&cfg.render()).unwrap();
        prop_assert_eq!(again, cfg);
    }

    #[test]
    fn summary_round_trips(vals in prop::collection::vec((any::<bool>(), prop::num::f64::ANY, any::<bool>()), 0..12), seed in any::<u64>()) {
        let mut rep = VerificationReport::new("all", seed);
        for (i, (pass, x, expl)) in vals.into_iter().enumerate() {
            let c = CheckRecord::new(format!("c{i}"), "claim").measured(x).predicted(x * 0.5).pass(pass);
            rep.push(if expl { c.exploratory() } else { c });
        }
        prop_assert_eq!(parse_summary(&summary_json(&rep)).unwrap(), rep.summary());
    }

    #[test]
    fn csv_has_one_row_per_sample(lens in prop::collection::vec(0usize..20, 0..5)) {
        let curves: Vec<NormCurve> = lens.iter().map(|&n| NormCurve {
            quantity: Quantity::DepsL6Q,
            region: "Q(7)".into(),
            m: 3,
            c1: 0.8,
            c2: 0.5,
            samples: (0..n).map(|k| (2f64.powi(-(k as i32) - 1), k as f64)).collect(),
            fitted_exponent: f64::NAN,
            log_corrected: false,
            log_power: 0.0,
            predicted_exponent: None,
            bound_kind: BoundKind::UpperBound,
            r_squared: 0.0,
            zeros: 0,
        }).collect();
        let csv = curves_csv(&curves);
        prop_assert_eq!(csv.lines().count(), 1 + lens.iter().sum::<usize>());
        prop_assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 7 && !l.contains(' ')));
    }
}
