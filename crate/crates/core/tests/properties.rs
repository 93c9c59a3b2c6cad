//! Property-based invariants over the public API.

use orlicz_lab::convex_core::difference_quotients;
use orlicz_lab::func_dsl::{parse_young, Expr, Func};
use orlicz_lab::orlicz::{luxemburg_norm, DiscreteProbabilitySpace, VectorField};
use orlicz_lab::subgrad::{hausdorff_distance, singleton_support};
use orlicz_lab::{registry, ExtReal, SearchConfig};
use proptest::prelude::*;

fn cfg() -> SearchConfig {
    SearchConfig::with_seed(99)
}

// ---------------------------------------------------------------------------
// parser round trip
// ---------------------------------------------------------------------------

fn literal() -> impl Strategy<Value = f64> {
    // the grammar has no unary minus: literals are non-negative
    prop_oneof![
        (0u32..1000u32).prop_map(|n| n as f64 / 10.0),
        (0u32..100u32).prop_map(|n| n as f64 * 0.001),
    ]
}

fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![literal().prop_map(Expr::Num), Just(Expr::Var)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), literal()).prop_map(|(a, p)| Expr::Call(
                Func::Pow,
                vec![a, Expr::Num(p)]
            )),
            inner.clone().prop_map(|a| Expr::Call(Func::Log1p, vec![a])),
            inner.clone().prop_map(|a| Expr::Call(Func::Abs, vec![a])),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::Call(Func::Max, vec![a, b])),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Call(Func::Min, vec![a, b])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_expressions_reparse_identically(ast in expr_strategy()) {
        let printed = ast.to_string();
        let back = parse_young(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        prop_assert_eq!(ast, back.ast);
    }
}

// ---------------------------------------------------------------------------
// extended reals
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn extreal_addition_is_monotone_and_absorbing(a in 0.0..1e12f64, b in 0.0..1e12f64) {
        let x = ExtReal::finite(a).unwrap();
        let y = ExtReal::finite(b).unwrap();
        prop_assert!((x + y).value() >= x.value());
        prop_assert!((x + ExtReal::INFINITY).is_infinite());
        prop_assert!(ExtReal::INFINITY > x);
    }
}

// ---------------------------------------------------------------------------
// Luxemburg norm invariants
// ---------------------------------------------------------------------------

fn small_field(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(
        proptest::collection::vec(-3.0..3.0f64, dim..=dim),
        1..6,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn luxemburg_scales_linearly(values in small_field(2), alpha in 0.5..10.0f64) {
        let c = cfg();
        let f = registry::hinge_power(2.0, 2, &c).unwrap();
        let sp = DiscreteProbabilitySpace::uniform(values.len());
        let u = VectorField::new(2, values).unwrap();
        let n1 = luxemburg_norm(&f, &sp, &u).unwrap().value();
        let n2 = luxemburg_norm(&f, &sp, &u.scale(alpha)).unwrap().value();
        prop_assert!((n2 - alpha * n1).abs() <= 1e-9 * (1.0 + alpha * n1));
    }

    #[test]
    fn luxemburg_triangle_inequality(a in small_field(1), b in small_field(1)) {
        let c = cfg();
        let f = registry::plog(2.0, 1, &c).unwrap();
        let atoms = a.len().min(b.len());
        let sp = DiscreteProbabilitySpace::uniform(atoms);
        let u1 = VectorField::new(1, a[..atoms].to_vec()).unwrap();
        let u2 = VectorField::new(1, b[..atoms].to_vec()).unwrap();
        let na = luxemburg_norm(&f, &sp, &u1).unwrap().value();
        let nb = luxemburg_norm(&f, &sp, &u2).unwrap().value();
        let ns = luxemburg_norm(&f, &sp, &u1.add(&u2).unwrap()).unwrap().value();
        prop_assert!(ns <= na + nb + 1e-8 * (1.0 + na + nb));
    }
}

// ---------------------------------------------------------------------------
// monotone difference quotients
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quotients_never_increase_as_eps_falls(
        x in -3.0..3.0f64,
        theta in prop::sample::select(vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
    ) {
        let c = cfg();
        let f = registry::hinge_power(1.0, 1, &c).unwrap();
        let qs = difference_quotients(&f, &[x], &[theta], &c).unwrap();
        for w in qs.windows(2) {
            prop_assert!(w[1].1 <= w[0].1 + 1e-9 * (1.0 + w[0].1.abs()));
        }
    }
}

// ---------------------------------------------------------------------------
// Hausdorff distance is a pseudometric on sampled supports
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_symmetry_and_triangle(
        a in proptest::collection::vec(-5.0..5.0f64, 2),
        b in proptest::collection::vec(-5.0..5.0f64, 2),
        c in proptest::collection::vec(-5.0..5.0f64, 2),
    ) {
        let scfg = cfg();
        let f = registry::power(1.0, 2, &scfg).unwrap();
        let hull = orlicz_lab::subgrad::subdifferential_hull(&f, &[0.0, 0.0], &scfg).unwrap();
        let ka = singleton_support(&a, hull.directions()).unwrap();
        let kb = singleton_support(&b, hull.directions()).unwrap();
        let kc = singleton_support(&c, hull.directions()).unwrap();
        let dab = hausdorff_distance(&ka, &kb).unwrap();
        let dba = hausdorff_distance(&kb, &ka).unwrap();
        prop_assert_eq!(dab, dba);
        let dac = hausdorff_distance(&ka, &kc).unwrap();
        let dcb = hausdorff_distance(&kc, &kb).unwrap();
        prop_assert!(dab <= dac + dcb + 1e-12);
    }
}

// ---------------------------------------------------------------------------
// gamma range
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gamma_stays_in_unit_interval(p0 in 1.0..4.0f64, extra in 0.0..3.0f64) {
        let g = orlicz_lab::delta2::gamma(p0 + extra, p0).unwrap();
        prop_assert!(g > 0.0 && g <= 1.0 + 1e-12);
        if extra == 0.0 {
            prop_assert_eq!(g, 1.0);
        }
    }
}
