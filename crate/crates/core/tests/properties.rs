//! Property suites for the expression kernel: calculus identities on
//! generated expressions, a finite-difference derivative oracle, and
//! the print/parse round trip.

use geosym_core::expr::{Bindings, Expr, SampleDomain, SplitMix64, ZeroOptions, ZeroVerdict};
use proptest::prelude::*;
use proptest::strategy::ValueTree;

/// Generated expressions stay within the grammar (no derivative-marked
/// opaque applications) so the round trip is exercised end to end.
fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-6i64..=6).prop_map(Expr::int),
        (1i64..=5, 1i64..=5).prop_map(|(p, q)| Expr::rational(p, q)),
        prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(Expr::sym),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Product),
            (inner.clone(), 1i64..=3).prop_map(|(b, k)| Expr::pow_i(b, k)),
            inner.clone().prop_map(|a| Expr::builtin(
                geosym_core::expr::Builtin::Sin,
                a
            )),
            inner.clone().prop_map(|a| Expr::builtin(
                geosym_core::expr::Builtin::Cos,
                a
            )),
            inner.clone().prop_map(|a| Expr::exp(a)),
            inner.clone().prop_map(|a| Expr::opaque("f", vec![a])),
            inner.prop_map(|a| -a),
        ]
    })
}

fn zero_opts() -> ZeroOptions {
    ZeroOptions::default()
}

fn domain() -> SampleDomain {
    SampleDomain::new().with_default(0.4, 1.3)
}

fn assert_zero(e: Expr) {
    // instantiate the opaque test function so sampling can run
    let inst = e.instantiate("f", &["s"], &Expr::parse("s^2 + s").unwrap());
    let v = inst.is_zero(&domain(), &zero_opts());
    assert!(
        matches!(v, ZeroVerdict::Zero),
        "expected zero, got {v:?} for {inst}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn diff_is_linear(e1 in arb_expr(), e2 in arb_expr(), p in 1i64..5, q in 1i64..5) {
        let alpha = Expr::rational(p, q);
        let beta = Expr::rational(q, p + 1);
        let combo = (alpha.clone() * e1.clone() + beta.clone() * e2.clone()).diff("x");
        let split = alpha * e1.diff("x") + beta * e2.diff("x");
        assert_zero(combo - split);
    }

    #[test]
    fn diff_product_rule(e1 in arb_expr(), e2 in arb_expr()) {
        let lhs = (e1.clone() * e2.clone()).diff("x");
        let rhs = e1.clone().diff("x") * e2.clone() + e1 * e2.diff("x");
        assert_zero(lhs - rhs);
    }

    #[test]
    fn mixed_partials_commute(e in arb_expr()) {
        let xy = e.diff("x").diff("y");
        let yx = e.diff("y").diff("x");
        assert_zero(xy - yx);
    }

    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let normalized = match e.normalize() {
            Ok(n) => n,
            Err(_) => return Ok(()), // division by syntactic zero
        };
        let printed = format!("{normalized}");
        let back = Expr::parse(&printed).unwrap_or_else(|err| {
            panic!("printed form failed to parse: {printed} ({err})")
        });
        prop_assert_eq!(back, normalized);
    }

    #[test]
    fn normalize_is_idempotent(e in arb_expr()) {
        if let Ok(once) = e.normalize() {
            prop_assert_eq!(once.clone().normalize().unwrap(), once);
        }
    }
}

/// Symbolic derivatives agree with central finite differences at
/// random points, for 100 generated expression/point pairs.
#[test]
fn derivative_matches_finite_difference_oracle() {
    let mut rng = SplitMix64::new(0xD1FF);
    let runner_config = ProptestConfig::with_cases(100);
    let mut runner = proptest::test_runner::TestRunner::new(runner_config);
    let strategy = arb_expr();
    let mut checked = 0;
    while checked < 100 {
        let tree = strategy
            .new_tree(&mut runner)
            .expect("generate expression")
            .current();
        let e = match tree.normalize() {
            Ok(n) => n.instantiate("f", &["s"], &Expr::parse("sin(s) + s^2").unwrap()),
            Err(_) => continue,
        };
        let de = e.diff("x");
        let mut b = Bindings::new();
        b.set("x", 0.6 + 0.5 * rng.unit());
        b.set("y", 0.6 + 0.5 * rng.unit());
        b.set("z", 0.6 + 0.5 * rng.unit());
        let x0 = b.get("x").unwrap();
        let h = 1e-5;
        let f = |x: f64, b: &Bindings| {
            let mut s = b.clone();
            s.set("x", x);
            e.eval(&s)
        };
        let (Ok(fp), Ok(fm), Ok(sym)) = (f(x0 + h, &b), f(x0 - h, &b), de.eval(&b)) else {
            continue; // domain failure at this point: try another draw
        };
        let fd = (fp - fm) / (2.0 * h);
        let scale = 1.0 + sym.abs() + fd.abs();
        assert!(
            (sym - fd).abs() / scale < 1e-5,
            "derivative mismatch for {e}: symbolic {sym}, finite difference {fd}"
        );
        checked += 1;
    }
}
