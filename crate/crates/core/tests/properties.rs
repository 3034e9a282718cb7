use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kropina::einstein::{ricci_parts, Regime, Route, TheoremId, WeightConfig};
use kropina::fd::{fd_partial_auto, rel_diff};
use kropina::finsler::{fundamental_tensor, ricci_generic, s_curvature_generic, spray_generic, FinslerMetric};
use kropina::jet::{Jet, JetLayout, MultiIndex};
use kropina::sampling::sample_grid;
use kropina::workbench::load_scenario;
use kropina::{parse_expr, Expr};

/// Smooth expressions in `x1..x3`, bounded on the unit cube.
fn smooth_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (-20i32..=20).prop_map(|k| format!("{:.1}", k as f64 / 10.0)),
        (1usize..=3).prop_map(|i| format!("x{i}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(0.25*sin({a}))")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + cos({b}))")),
            inner.clone().prop_map(|a| format!("ln(1 + ({a})^2)")),
            inner.prop_map(|a| format!("sqrt(2 + sin({a}))")),
        ]
    })
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 3)
}

fn all_indices(nvars: usize, max_degree: usize) -> Vec<MultiIndex> {
    JetLayout::get(nvars, max_degree)
        .indices()
        .iter()
        .filter(|i| i.degree() > 0)
        .cloned()
        .collect()
}

fn integer_jet(coeffs: Vec<i8>) -> Jet {
    let layout = JetLayout::get(2, 3);
    Jet::from_coeffs(layout, coeffs.into_iter().map(f64::from).collect())
}

fn integer_jets() -> impl Strategy<Value = Jet> {
    prop::collection::vec(-4i8..=4, JetLayout::get(2, 3).len()).prop_map(integer_jet)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jet_partials_match_finite_differences(src in smooth_expr(), x in point3()) {
        let e = parse_expr(&src, 3).unwrap();
        let jet = e.eval(&Jet::seed(&x, 3)).unwrap();
        for idx in all_indices(3, 3) {
            let exact = jet.partial(&idx).unwrap();
            let approx = fd_partial_auto(|p: &[f64]| e.eval(p), &x, &idx).unwrap();
            prop_assert!(rel_diff(exact, approx, 1.0) < 1e-6, "{src} {idx:?}: {exact} vs {approx}");
        }
    }
}

proptest! {
    #[test]
    fn jet_arithmetic_is_associative_and_distributive(a in integer_jets(), b in integer_jets(), c in integer_jets()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn printed_expressions_parse_back(src in smooth_expr(), seed in any::<u64>()) {
        let e = parse_expr(&src, 3).unwrap();
        let back: Expr = parse_expr(&e.to_string(), 3).unwrap();
        prop_assert_eq!(back.to_string(), e.to_string());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let (u, v): (f64, f64) = (e.eval(&x).unwrap(), back.eval(&x).unwrap());
            prop_assert!(u.to_bits() == v.to_bits() || (u.is_nan() && v.is_nan()), "{src}: {u} vs {v}");
        }
    }

    #[test]
    fn every_weight_pair_lands_in_one_regime(a in -5.0f64..5.0, c in -5.0f64..5.0, n in 2usize..8) {
        let cfg = WeightConfig::new(a, c, n).unwrap();
        let regime = cfg.regime();
        let expected = if cfg.nu().abs() > 1e-12 {
            Regime::NuNonzero
        } else if cfg.kappa().abs() > 1e-12 {
            Regime::NuZeroKappaNonzero
        } else {
            Regime::Projective
        };
        prop_assert_eq!(regime, expected);
        prop_assert_eq!(TheoremId::auto(&cfg, false) == TheoremId::Ab, regime == Regime::NuNonzero);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weighted_ricci_splits_through_projective_ricci(
        seed in 0u64..1000,
        a in -3.0f64..3.0,
        c in -3.0f64..3.0,
    ) {
        let l = load_scenario(&format!("random:{seed}")).unwrap();
        let cfg = WeightConfig::new(a, c, l.space.dim()).unwrap();
        for p in sample_grid(&l.space, &l.scenario.bx, 2, 3, seed).unwrap() {
            for y in &p.dirs {
                let generic = ricci_parts(&l.space, &p.x, y, Route::Generic).unwrap();
                let closed = ricci_parts(&l.space, &p.x, y, Route::Closed).unwrap();
                let lhs = generic.weighted(&cfg);
                let rhs = closed.via_projective(&cfg);
                prop_assert!(rel_diff(lhs, rhs, generic.f * generic.f) < 1e-8, "{lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn curvature_is_positively_homogeneous(seed in 0u64..1000, lambda in prop::sample::select(vec![0.5, 2.0, 3.0])) {
        let l = load_scenario(&format!("random:{seed}")).unwrap();
        let m = l.space.ab_metric();
        let density = l.space.bh_density();
        for p in sample_grid(&l.space, &l.scenario.bx, 2, 3, seed).unwrap() {
            for y in &p.dirs {
                let ly: Vec<f64> = y.iter().map(|v| lambda * v).collect();
                let (f, lf) = (m.norm(&p.x, y).unwrap(), m.norm(&p.x, &ly).unwrap());
                prop_assert!(rel_diff(lf, lambda * f, 0.0) < 1e-9);
                let (g, lg) = (spray_generic(&m, &p.x, y).unwrap(), spray_generic(&m, &p.x, &ly).unwrap());
                for (u, v) in g.iter().zip(&lg) {
                    prop_assert!(rel_diff(*v, lambda * lambda * u, f * f) < 1e-9);
                }
                let (r, lr) = (ricci_generic(&m, &p.x, y).unwrap(), ricci_generic(&m, &p.x, &ly).unwrap());
                prop_assert!(rel_diff(lr, lambda * lambda * r, f * f) < 1e-9);
                let (s, ls) = (
                    s_curvature_generic(&m, &density, &p.x, y).unwrap(),
                    s_curvature_generic(&m, &density, &p.x, &ly).unwrap(),
                );
                prop_assert!(rel_diff(ls, lambda * s, f) < 1e-9);
                let gt = fundamental_tensor(&m, &p.x, y).unwrap();
                let gyy: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| gt[i][j] * y[i] * y[j]).sum();
                prop_assert!(rel_diff(gyy, f * f, 0.0) < 1e-10);
            }
        }
    }

    #[test]
    fn f_level_outputs_ignore_the_gauge(k in -0.3f64..0.3, q in -0.3f64..0.3) {
        let l = load_scenario("s3_hopf").unwrap();
        let gauge = parse_expr(&format!("1 + {k}*x1 + {q}*sin(x2)"), 3).unwrap();
        let other = l.space.regauge(gauge).unwrap();
        let (m0, m1) = (l.space.ab_metric(), other.ab_metric());
        let (d0, d1) = (l.space.bh_density(), other.bh_density());
        for p in sample_grid(&l.space, &l.scenario.bx, 2, 4, 3).unwrap() {
            for y in &p.dirs {
                let f = m0.norm(&p.x, y).unwrap();
                prop_assert!(rel_diff(f, m1.norm(&p.x, y).unwrap(), 0.0) < 1e-12);
                let (g0, g1) = (spray_generic(&m0, &p.x, y).unwrap(), spray_generic(&m1, &p.x, y).unwrap());
                for (u, v) in g0.iter().zip(&g1) {
                    prop_assert!(rel_diff(*u, *v, f * f) < 1e-8);
                }
                let (r0, r1) = (ricci_generic(&m0, &p.x, y).unwrap(), ricci_generic(&m1, &p.x, y).unwrap());
                prop_assert!(rel_diff(r0, r1, f * f) < 1e-8);
                let (s0, s1) = (
                    s_curvature_generic(&m0, &d0, &p.x, y).unwrap(),
                    s_curvature_generic(&m1, &d1, &p.x, y).unwrap(),
                );
                prop_assert!(rel_diff(s0, s1, f) < 1e-8);
            }
        }
    }
}
