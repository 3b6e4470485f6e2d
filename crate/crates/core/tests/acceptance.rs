//! Acceptance suite: one test per verification criterion, each
//! printing a pass line with the measured quantities. Run with
//! `cargo test --test acceptance -- --nocapture` to see every line.

use std::collections::BTreeMap;
use std::time::Instant;

use geosym_core::catalog::{Catalog, EntryKind, Payload};
use geosym_core::dynamics::{
    self, bessel_i, bessel_k, euler_lagrange, pde_residual, SolutionCandidate,
    DEFAULT_STENCIL_STEP,
};
use geosym_core::expr::{Bindings, Expr, SampleDomain, ZeroOptions, ZeroVerdict};
use geosym_core::geometry::VectorField;
use geosym_core::symmetry::{
    self, classify, kg_symmetry_residual, noether_residual, CkvClass, Lagrangian, PointSymmetry,
};

fn opts() -> ZeroOptions {
    // trials = 24 sample points, tol = 1e-9: pinned by the criteria
    ZeroOptions {
        trials: 24,
        tol: 1e-9,
        seed: 0x5EED,
    }
}

fn ex(s: &str) -> Expr {
    Expr::parse(s).unwrap()
}

#[test]
fn criterion_01_table1_reproduction() {
    let start = Instant::now();
    let cat = Catalog::standard();
    let rows = cat.table_rows(1);
    assert_eq!(rows.len(), 8, "expected 8 first-table rows");
    let mut zero_checks = 0usize;
    for entry in rows {
        let report = cat
            .verify_table_row(entry, &opts())
            .expect("no skipped rows in table 1")
            .expect("row check runs");
        for r in &report.residuals {
            assert!(
                matches!(r.verdict, ZeroVerdict::Zero),
                "{}: residual '{}' not zero: {}",
                entry.id,
                r.label,
                r.expr
            );
            zero_checks += 1;
        }
    }
    assert_eq!(zero_checks, 16, "8 rows x 2 instantiations");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 1: PASS - first table reproduced, {zero_checks}/16 zero in {elapsed:?}"
    );
}

#[test]
fn criterion_02_table2_reproduction() {
    let start = Instant::now();
    let cat = Catalog::standard();
    let rows = cat.table_rows(2);
    assert_eq!(rows.len(), 7, "expected 7 second-table rows");
    let mut zero_checks = 0usize;
    let mut skipped = 0usize;
    for entry in rows {
        match cat.verify_table_row(entry, &opts()) {
            None => {
                let row = entry.table_row().unwrap();
                assert!(row.skip.is_some());
                skipped += 1;
            }
            Some(result) => {
                let report = result.expect("row check runs");
                for r in &report.residuals {
                    assert!(
                        matches!(r.verdict, ZeroVerdict::Zero),
                        "{}: residual '{}' not zero: {}",
                        entry.id,
                        r.label,
                        r.expr
                    );
                    zero_checks += 1;
                }
            }
        }
    }
    assert_eq!(skipped, 1, "exactly the flagged linear-combination row");
    assert_eq!(zero_checks, 12, "6 verifiable rows x 2 instantiations");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "criterion 2: PASS - second table reproduced, {zero_checks}/12 zero, {skipped} row skipped, in {elapsed:?}"
    );
}

#[test]
fn criterion_03_special_conformal_case() {
    let cat = Catalog::standard();
    let factors = [
        ("vector.euclid3.spckv.1", "x", "potential.euclid3.spckv.1"),
        ("vector.euclid3.spckv.2", "y", "potential.euclid3.spckv.2"),
        ("vector.euclid3.spckv.3", "z", "potential.euclid3.spckv.3"),
    ];
    let metric = cat.metric("metric.euclid3.cartesian").unwrap();
    for (vid, factor, pid) in factors {
        let ventry = cat.load(vid).unwrap();
        let Payload::Vector { field, .. } = &ventry.payload else {
            panic!("not a vector")
        };
        let class = classify(metric, field, &ventry.domain, &opts()).unwrap();
        assert_eq!(class.class, CkvClass::SpecialConformal, "{vid}");
        assert!(
            (class.psi.clone() - Expr::sym(factor)).is_zero_symbolic(),
            "{vid}: conformal factor {} is not {factor}",
            class.psi
        );

        let pentry = cat.load(pid).unwrap();
        let Payload::Potential { expr, .. } = &pentry.payload else {
            panic!("not a potential")
        };
        let insts: Vec<(String, Vec<String>, Expr)> = pentry
            .instantiations
            .iter()
            .map(|i| (i.name.clone(), i.params.clone(), i.body.clone()))
            .collect();
        assert_eq!(insts.len(), 2);
        let report = symmetry::verify_potential_family(
            metric,
            field,
            expr,
            &insts,
            &pentry.domain,
            &opts(),
        )
        .unwrap();
        assert!(
            report.is_zero(),
            "{pid}: {:?}",
            report
                .residuals
                .iter()
                .map(|r| (&r.label, &r.verdict))
                .collect::<Vec<_>>()
        );
    }
    println!(
        "criterion 3: PASS - special conformal vectors classify with coordinate factors and admit the inverse-square family"
    );
}

#[test]
fn criterion_04_vacuum_curvature() {
    let cat = Catalog::standard();
    let entry = cat.load("metric.schwarzschild.m6").unwrap();
    let metric = entry.metric().unwrap();
    let curv = metric.curvature().unwrap();
    let domain = symmetry::chart_domain(metric.chart(), &entry.domain);
    let mut checked = 0;
    for j in 0..4 {
        for l in j..4 {
            let verdict = curv.ricci[j][l].is_zero(&domain, &opts());
            assert!(
                matches!(verdict, ZeroVerdict::Zero),
                "Ricci[{j}][{l}] = {}",
                curv.ricci[j][l]
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 10);
    println!("criterion 4: PASS - all 10 independent Ricci components of the vacuum metric vanish");
}

#[test]
fn criterion_05_ricci_identity_across_classes() {
    let cat = Catalog::standard();
    // pairs spanning Killing / homothetic / special / proper classes,
    // flat and curved
    let pairs = [
        "vector.euclid2.rotation",
        "vector.euclid2.dilation",
        "vector.euclid3.spckv.1",
        "vector.minisuperspace.h",
        "vector.minisuperspace.x2",
        "vector.minisuperspace.x3",
        "vector.s3.translation-x",
        "vector.m6.time-translation",
    ];
    let mut classes = std::collections::BTreeSet::new();
    for vid in pairs {
        let entry = cat.load(vid).unwrap();
        let Payload::Vector { metric_id, field } = &entry.payload else {
            panic!("not a vector")
        };
        let metric = cat.metric(metric_id).unwrap();
        let class = classify(metric, field, &entry.domain, &opts()).unwrap();
        classes.insert(class.class.name());
        let report =
            symmetry::ckv_ricci_identity(metric, field, &entry.domain, &opts()).unwrap();
        assert!(
            report.is_zero(),
            "{vid}: {:?}",
            report.residuals[0].verdict
        );
    }
    assert!(classes.contains("killing"));
    assert!(classes.contains("homothetic"));
    assert!(classes.contains("special-conformal"));
    assert!(classes.contains("proper-conformal"));
    println!(
        "criterion 5: PASS - curvature transport identity holds for {} pairs spanning {:?}",
        pairs.len(),
        classes
    );
}

#[test]
fn criterion_06_sphere_laplace_symmetries() {
    let cat = Catalog::standard();
    let metric = cat.metric("metric.s3.round").unwrap();
    let kvs = [
        "vector.s3.rotation-xy",
        "vector.s3.rotation-yz",
        "vector.s3.rotation-zx",
        "vector.s3.translation-x",
        "vector.s3.translation-y",
        "vector.s3.translation-z",
    ];
    for vid in kvs {
        let entry = cat.load(vid).unwrap();
        let Payload::Vector { field, .. } = &entry.payload else {
            panic!("not a vector")
        };
        let class = classify(metric, field, &entry.domain, &opts()).unwrap();
        assert_eq!(class.class, CkvClass::Killing, "{vid}");
        let report =
            kg_symmetry_residual(metric, &Expr::int(0), field, &entry.domain, &opts()).unwrap();
        assert!(report.is_zero(), "{vid}");
    }
    println!(
        "criterion 6: PASS - all 6 sphere isometries generate symmetries of the potential-free wave equation"
    );
}

#[test]
fn criterion_07_noether_suite() {
    let cat = Catalog::standard();
    let o = opts();

    // time translation on every catalog Lagrangian
    let mut lagrangian_count = 0;
    for entry in cat.enumerate(Some(EntryKind::Lagrangian)) {
        let l = entry.lagrangian().unwrap();
        let x = PointSymmetry::time_translation(l.chart().dim());
        let rep = noether_residual(l, &x, &Expr::int(0), &entry.domain, &o).unwrap();
        assert!(rep.is_zero(), "{} fails time translation", entry.id);
        lagrangian_count += 1;
    }
    assert!(lagrangian_count >= 7);

    // exponential modes on the oscillator reading
    let osc = cat.lagrangian("lagrangian.oscillator1").unwrap();
    let dom = SampleDomain::default();
    for (eta, gauge) in [
        ("exp(mu*t)", "mu*exp(mu*t)*x"),
        ("exp(-(mu*t))", "-(mu*exp(-(mu*t))*x)"),
    ] {
        let x = PointSymmetry::spatial(vec![ex(eta)]);
        let rep = noether_residual(osc, &x, &ex(gauge), &dom, &o).unwrap();
        assert!(rep.is_zero(), "oscillator mode {eta}");
        for r in &rep.residuals {
            assert!(matches!(r.verdict, ZeroVerdict::Zero), "monomial {}", r.label);
        }
    }

    // sl(2,R) generators on the planar Ermakov system
    let ermakov = cat.lagrangian("lagrangian.ermakov2").unwrap();
    let edom = cat.load("lagrangian.ermakov2").unwrap().domain.clone();
    let generators = [
        (
            "(1/mu)*exp(2*mu*t)",
            "exp(2*mu*t)*r",
            "mu*exp(2*mu*t)*r^2",
        ),
        (
            "(1/mu)*exp(-2*mu*t)",
            "-(exp(-2*mu*t)*r)",
            "mu*exp(-2*mu*t)*r^2",
        ),
    ];
    for (xi, eta_r, gauge) in generators {
        let x = PointSymmetry::new(ex(xi), vec![ex(eta_r), Expr::int(0)]);
        let rep = noether_residual(ermakov, &x, &ex(gauge), &edom, &o).unwrap();
        assert!(
            rep.is_zero(),
            "sl(2,R) generator {xi}: {:?}",
            rep.residuals
                .iter()
                .map(|r| (&r.label, &r.verdict))
                .collect::<Vec<_>>()
        );
        // velocity-coefficient extraction leaves zero residual per
        // monomial
        for r in &rep.residuals {
            assert!(matches!(r.verdict, ZeroVerdict::Zero), "monomial {}", r.label);
        }
    }

    // the dilation-type symmetry of the cosmological Lagrangian
    let sc01 = cat.lagrangian("lagrangian.minisuperspace.sc01").unwrap();
    let x1 = PointSymmetry::new(ex("2*tau"), vec![ex("-2*a"), ex("2*b")]);
    let rep = noether_residual(
        sc01,
        &x1,
        &Expr::int(0),
        &cat.load("lagrangian.minisuperspace.sc01").unwrap().domain,
        &o,
    )
    .unwrap();
    assert!(rep.is_zero(), "cosmological dilation-type symmetry");

    println!(
        "criterion 7: PASS - Noether condition verified for time translation on {lagrangian_count} Lagrangians, both exponential modes, both sl(2,R) generators, and the cosmological scaling symmetry"
    );
}

#[test]
fn criterion_08_conserved_quantity_drift() {
    let cat = Catalog::standard();
    let mut measured = Vec::new();
    for sid in [
        "scenario.oscillator",
        "scenario.ermakov",
        "scenario.minisuperspace",
    ] {
        let run = cat.run_scenario(sid, None, None).unwrap();
        assert!(!run.trajectory.truncated, "{sid} trajectory truncated");
        for (iid, report) in &run.drifts {
            assert!(
                report.max_abs < 1e-6,
                "{sid}/{iid}: drift {}",
                report.max_abs
            );
            measured.push((iid.clone(), report.max_abs));
        }
    }
    assert_eq!(measured.len(), 9, "4 oscillator + 4 Ermakov + 1 cosmological");

    // the cosmological Hamiltonian also stays at its vacuum value zero
    let run = cat.run_scenario("scenario.minisuperspace", None, None).unwrap();
    let (_, h_report) = &run.drifts[0];
    assert!(
        h_report.initial.abs() < 1e-12 && h_report.max_abs < 1e-6,
        "vacuum Hamiltonian: initial {} drift {}",
        h_report.initial,
        h_report.max_abs
    );

    // the combined integrals are time-free symbolically
    let ip = ex("exp(mu*t)*x_dot - mu*exp(mu*t)*x");
    let im = ex("exp(-(mu*t))*x_dot + mu*exp(-(mu*t))*x");
    let i0 = symmetry::combine_integrals(&[("Ip", &ip), ("Im", &im)], "Ip*Im").unwrap();
    assert!((i0.clone() - ex("x_dot^2 - mu^2*x^2")).is_zero_symbolic());
    assert!(i0.diff("t").is_zero_literal(), "oscillator combination");

    let h = "(r_dot^2/2 + r^2*theta_dot^2/2 - mu^2*r^2/2 + F(theta)/r^2)";
    let ep = ex(&format!(
        "({h}/mu)*exp(2*mu*t) - exp(2*mu*t)*r*r_dot + mu*exp(2*mu*t)*r^2"
    ));
    let em = ex(&format!(
        "({h}/mu)*exp(-2*mu*t) + exp(-2*mu*t)*r*r_dot + mu*exp(-2*mu*t)*r^2"
    ));
    let phi0 = symmetry::combine_integrals(
        &[("Ip", &ep), ("Im", &em), ("h", &ex(h))],
        "Ip*Im - h^2/mu^2",
    )
    .unwrap();
    assert!(
        (phi0.clone() - ex("r^4*theta_dot^2 + 2*F(theta)")).is_zero_symbolic(),
        "Ermakov invariant: got {phi0}"
    );
    assert!(phi0.diff("t").is_zero_literal(), "Ermakov combination");

    let worst = measured
        .iter()
        .map(|(_, d)| *d)
        .fold(0.0f64, f64::max);
    println!(
        "criterion 8: PASS - 9 first integrals drift below 1e-6 (worst {worst:.3e}); combined invariants close symbolically and are time-free"
    );
}

#[test]
fn criterion_09_noether_transport_crosschecks() {
    let cat = Catalog::standard();
    let o = opts();

    // every first-table generator/potential pair (instantiated) also
    // passes the induced Noether check with constant gauge
    let square = Instantiation1::new();
    let mut pairs = 0;
    for entry in cat.table_rows(1) {
        let row = entry.table_row().unwrap();
        let metric = cat.metric(row.metric_id).unwrap();
        let v = square.apply(&row.potential);
        let class = classify(metric, &row.generator, &entry.domain, &o).unwrap();
        assert!(class.class.is_killing_or_homothetic());
        // confirm the Klein-Gordon condition first
        let kg = kg_symmetry_residual(metric, &v, &row.generator, &entry.domain, &o).unwrap();
        assert!(kg.is_zero(), "{} fails the wave-operator condition", entry.id);
        // induced generator: ξ = 2ψt + 1, η = Y, constant gauge
        let l = Lagrangian::new(metric.clone(), v, "t").unwrap();
        let xi_t = (Expr::int(2) * class.psi.clone() * Expr::sym("t") + Expr::int(1))
            .normalize()
            .unwrap();
        let x = PointSymmetry::new(xi_t, row.generator.components().to_vec());
        let rep = noether_residual(&l, &x, &Expr::int(0), &entry.domain, &o).unwrap();
        assert!(rep.is_zero(), "{} fails the induced Noether check", entry.id);
        pairs += 1;
    }
    // the same for the verifiable second-table rows
    for entry in cat.table_rows(2) {
        let row = entry.table_row().unwrap();
        if row.skip.is_some() {
            continue;
        }
        let metric = cat.metric(row.metric_id).unwrap();
        let v = Instantiation2::new().apply(&row.potential);
        let class = classify(metric, &row.generator, &entry.domain, &o).unwrap();
        assert!(class.class.is_killing_or_homothetic());
        let kg = kg_symmetry_residual(metric, &v, &row.generator, &entry.domain, &o).unwrap();
        assert!(kg.is_zero(), "{} fails the wave-operator condition", entry.id);
        let l = Lagrangian::new(metric.clone(), v, "t").unwrap();
        let xi_t = (Expr::int(2) * class.psi.clone() * Expr::sym("t") + Expr::int(1))
            .normalize()
            .unwrap();
        let x = PointSymmetry::new(xi_t, row.generator.components().to_vec());
        let rep = noether_residual(&l, &x, &Expr::int(0), &entry.domain, &o).unwrap();
        assert!(rep.is_zero(), "{} fails the induced Noether check", entry.id);
        pairs += 1;
    }
    assert_eq!(pairs, 14, "8 + 6 verifiable rows, zero exceptions");

    // the proper CKV fails on the base Lagrangian and passes on the
    // conformally transported one
    let sc01 = cat.lagrangian("lagrangian.minisuperspace.sc01").unwrap();
    let dom = cat.load("lagrangian.minisuperspace.sc01").unwrap().domain.clone();
    let x2 = PointSymmetry::spatial(vec![ex("1/(a*b)"), Expr::int(0)]);
    let base = noether_residual(sc01, &x2, &Expr::int(0), &dom, &o).unwrap();
    assert!(
        matches!(base.verdict, ZeroVerdict::NonZero(_)),
        "the proper conformal vector must fail on the base Lagrangian"
    );
    let transported = symmetry::conformal_lagrangian(sc01, &ex("g0*sqrt(a)")).unwrap();
    let rep = noether_residual(&transported, &x2, &Expr::int(0), &dom, &o).unwrap();
    assert!(
        rep.is_zero(),
        "the transported Lagrangian must admit it: {:?}",
        rep.residuals
            .iter()
            .map(|r| (&r.label, &r.verdict))
            .collect::<Vec<_>>()
    );

    println!(
        "criterion 9: PASS - {pairs} wave-operator symmetry pairs induce Noether symmetries with constant gauge; the proper conformal vector transports only to the rescaled Lagrangian"
    );
}

/// First default instantiation (square) for one-argument families.
struct Instantiation1;
impl Instantiation1 {
    fn new() -> Self {
        Instantiation1
    }
    fn apply(&self, e: &Expr) -> Expr {
        e.instantiate("f", &["s"], &ex("s^2"))
    }
}

/// First default instantiation (product) for two-argument families.
struct Instantiation2;
impl Instantiation2 {
    fn new() -> Self {
        Instantiation2
    }
    fn apply(&self, e: &Expr) -> Expr {
        e.instantiate("f", &["s", "t"], &ex("s*t"))
    }
}

#[test]
fn criterion_10_closed_form_and_reconstruction() {
    let cat = Catalog::standard();
    let o = opts();
    let m2a = cat.lagrangian("lagrangian.conformal.m2a").unwrap();
    let sys = euler_lagrange(m2a).unwrap();

    // the family, as displayed, with the constants symbolic
    let a_sq = ex("(V0*r + 2*a1*b1)/(2*b1*(b1*r + b2))");
    let mut family = BTreeMap::new();
    family.insert("a".to_string(), Expr::pow(a_sq.clone(), ex("1/2")));
    family.insert("b".to_string(), ex("b1*r + b2"));

    // Euler-Lagrange residuals vanish identically; the Hamiltonian
    // constraint closes with the constant identification V0 = 2/g0^4.
    let constraint = ex("a^2*b_dot^2 + 2*a*b*a_dot*b_dot - V0/2");
    let dom = SampleDomain::new()
        .with_default(0.5, 2.0)
        .with_interval("r", 0.5, 2.0);
    let rep = dynamics::verify_closed_form(
        &sys,
        &family,
        &[("hamiltonian-constraint".to_string(), constraint)],
        &dom,
        &o,
    )
    .unwrap();
    for r in &rep.residuals {
        assert!(
            matches!(r.verdict, ZeroVerdict::Zero),
            "{}: {}",
            r.label,
            r.expr
        );
    }
    // the Euler-Lagrange residuals close fully symbolically
    for r in rep.residuals.iter().take(2) {
        assert!(
            r.expr.is_zero_literal() || r.expr.clone().is_zero_symbolic(),
            "{} did not cancel symbolically: {}",
            r.label,
            r.expr
        );
    }
    // and the vanishing-Hamiltonian member: substitute V0 = 2/g0^4
    let h = ex("g0^2*(2*a^2*b_dot^2 + 4*a*b*a_dot*b_dot) - 2/g0^2");
    let v0 = ex("2/g0^4");
    let mut vacuum_family = BTreeMap::new();
    for (k, v) in &family {
        vacuum_family.insert(k.clone(), v.subst_symbol("V0", &v0));
    }
    let rep = dynamics::verify_closed_form(
        &sys,
        &vacuum_family,
        &[("hamiltonian-zero".to_string(), h)],
        &dom,
        &o,
    )
    .unwrap();
    assert!(rep.is_zero(), "vacuum member fails the zero-Hamiltonian constraint");

    // reconstruction: with V0 = 2 b1^2, a1 = -2m + b2 and the affine
    // reparametrization R = b1 r + b2 (so g0^4 = 1/b1^2), the line
    // element matches the standard exterior vacuum metric
    let subs: Vec<(&str, Expr)> = vec![
        ("V0", ex("2*b1^2")),
        ("a1", ex("-2*m + b2")),
        ("r", ex("(R - b2)/b1")),
    ];
    let mut a_sq_r = a_sq.clone();
    for (name, val) in &subs {
        a_sq_r = a_sq_r.subst_symbol(name, val);
    }
    let a_sq_r = a_sq_r.rational_compact().unwrap();
    let m6 = cat.metric("metric.schwarzschild.m6").unwrap();
    let m6_dom = symmetry::chart_domain(
        m6.chart(),
        &cat.load("metric.schwarzschild.m6").unwrap().domain,
    );
    // g_tt = -a², g_RR = (dτ/dR)² = 1/(b1² g0⁴ a²) with g0⁴ = 1/b1²,
    // g_θθ = b² = R², g_φφ = R² sin²θ
    let checks = vec![
        ("g_tt", (-a_sq_r.clone()) - m6.component(0, 0).clone()),
        (
            "g_RR",
            Expr::pow_i(a_sq_r.clone(), -1) - m6.component(1, 1).clone(),
        ),
        (
            "g_theta",
            ex("R^2") - m6.component(2, 2).clone(),
        ),
        (
            "g_phi",
            ex("R^2*sin(theta)^2") - m6.component(3, 3).clone(),
        ),
    ];
    for (label, resid) in checks {
        let v = resid.is_zero(&m6_dom, &o);
        assert!(matches!(v, ZeroVerdict::Zero), "{label}: {v:?}");
    }

    // numeric cross-check: integrating the transported system from
    // closed-form initial data reproduces the affine profile
    let run = cat.run_scenario("scenario.m2a", None, None).unwrap();
    assert!(!run.trajectory.truncated);
    let last = run.trajectory.states.last().unwrap();
    let r_end = run.trajectory.times.last().unwrap();
    let b_expected = r_end + 2.0; // b1 = 1, b2 = 2
    assert!(
        (last[1] - b_expected).abs() < 1e-8,
        "b({r_end}) = {} vs {b_expected}",
        last[1]
    );
    let a_sq_expected = (2.0 * r_end + 2.0) / (2.0 * (r_end + 2.0));
    assert!(
        (last[0] * last[0] - a_sq_expected).abs() < 1e-8,
        "a({r_end})^2 = {} vs {a_sq_expected}",
        last[0] * last[0]
    );

    println!(
        "criterion 10: PASS - closed-form family satisfies the field equations symbolically and reconstructs the standard vacuum line element"
    );
}

#[test]
fn criterion_11_bessel_solutions_and_oracle() {
    let cat = Catalog::standard();
    let pde_entry = cat.load("pde.minisuperspace.sc02").unwrap();
    let Payload::Pde(model) = &pde_entry.payload else {
        panic!("not a pde")
    };

    // sample grid away from the singular sets, 12 points
    let points: Vec<Vec<f64>> = (0..12)
        .map(|k| {
            let s = k as f64 / 11.0;
            vec![0.7 + 1.1 * s, 1.8 - 1.05 * s]
        })
        .collect();
    let first_family = |c: f64| {
        let mut b = Bindings::new();
        dynamics::standard_natives(&mut b);
        b.set("c", c);
        b.set("c1", 0.4);
        b.set("c2", 0.7);
        SolutionCandidate::new(
            ex("a^c*(c1*besseli(c, 2*sqrt(2)*a*b) + c2*besselk(c, 2*sqrt(2)*a*b))"),
            b,
        )
    };
    for c in [0.0, 1.0, 2.0] {
        let worst = pde_residual(model, &first_family(c), &points, DEFAULT_STENCIL_STEP).unwrap();
        assert!(worst < 1e-6, "first family c={c}: residual {worst}");
    }

    // second family, on the domain a²b > e; both order conventions on
    // the first-kind part are exercised (the equation only fixes the
    // order squared)
    let points2: Vec<Vec<f64>> = (0..12)
        .map(|k| {
            let s = k as f64 / 11.0;
            vec![1.15 + 0.6 * s, 1.75 - 0.55 * s]
        })
        .collect();
    let second_family = |c: f64, flip: bool| {
        let mut b = Bindings::new();
        dynamics::standard_natives(&mut b);
        b.set("c", c);
        b.set("c1", 0.4);
        b.set("c2", 0.7);
        b.set("e", 1.0);
        let order = if flip { "c/2" } else { "-c/2" };
        SolutionCandidate::new(
            ex(&format!(
                "(a^2 - e/b)^(c/4)*(c1*besseli({order}, 2*sqrt(2*b*(a^2*b - e))) + c2*besselk(c/2, 2*sqrt(2*b*(a^2*b - e))))"
            )),
            b,
        )
    };
    let mut convention_results = Vec::new();
    for c in [0.0, 1.0, 2.0] {
        for flip in [false, true] {
            let worst =
                pde_residual(model, &second_family(c, flip), &points2, DEFAULT_STENCIL_STEP)
                    .unwrap();
            assert!(
                worst < 1e-6,
                "second family c={c} flip={flip}: residual {worst}"
            );
            convention_results.push((c, flip, worst));
        }
    }

    // the evaluator against an independent integral-representation
    // oracle
    let mut worst_i: f64 = 0.0;
    let mut worst_k: f64 = 0.0;
    for nu in [0.0, 0.5, 1.0, 2.0] {
        for x in [1e-3, 0.1, 1.0, 5.0, 10.0, 30.0] {
            let i_impl = bessel_i(nu, x).unwrap();
            let i_oracle = oracle_bessel_i(nu, x);
            let rel = (i_impl - i_oracle).abs() / i_oracle.abs().max(1e-300);
            worst_i = worst_i.max(rel);
            assert!(rel < 1e-10, "I_{nu}({x}): impl {i_impl}, oracle {i_oracle}");
            let k_impl = bessel_k(nu, x).unwrap();
            let k_oracle = oracle_bessel_k(nu, x);
            let rel = (k_impl - k_oracle).abs() / k_oracle.abs().max(1e-300);
            worst_k = worst_k.max(rel);
            assert!(rel < 1e-10, "K_{nu}({x}): impl {k_impl}, oracle {k_oracle}");
        }
    }

    println!(
        "criterion 11: PASS - both invariant families satisfy the wave equation below 1e-6 (both order conventions pass: {convention_results:?}); evaluator matches the quadrature oracle to {worst_i:.2e} (I) / {worst_k:.2e} (K)"
    );
}

/// Independent oracle for `I_ν(x)`, avoiding the power series the
/// implementation uses: Miller's downward three-term recurrence with
/// the normalization `e^x = I₀ + 2Σ_{k≥1} I_k` for integer orders, and
/// the exact elementary closed forms for half-integer orders.
fn oracle_bessel_i(nu: f64, x: f64) -> f64 {
    if (nu - 0.5).abs() < 1e-14 {
        return (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sinh();
    }
    assert!(
        (nu - nu.round()).abs() < 1e-14,
        "oracle supports integer and half-integer orders"
    );
    let n = nu.round() as usize;
    let top = (x + 15.0 * x.sqrt() + 40.0) as usize;
    let mut i_above = 0.0f64; // I_{k+1}, unnormalized
    let mut i_k = 1e-280f64; // I_k with k = top, arbitrary seed scale
    let mut sum = 0.0f64; // Σ_{k≥1} I_k
    let mut wanted = 0.0f64;
    for k in (1..=top).rev() {
        sum += i_k;
        if k == n {
            wanted = i_k;
        }
        let i_below = i_above + (2.0 * k as f64 / x) * i_k;
        i_above = i_k;
        i_k = i_below;
        if i_k.abs() > 1e260 {
            i_k *= 1e-260;
            i_above *= 1e-260;
            sum *= 1e-260;
            wanted *= 1e-260;
        }
    }
    // i_k now holds the unnormalized I_0
    if n == 0 {
        wanted = i_k;
    }
    let normalization = i_k + 2.0 * sum;
    wanted * x.exp() / normalization
}

/// Independent oracle: `K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt`.
fn oracle_bessel_k(nu: f64, x: f64) -> f64 {
    let tmax = ((1500.0 / x).max(2.0)).ln() + 2.0;
    simpson(|t| (-x * t.cosh()).exp() * (nu * t).cosh(), 0.0, tmax, 40_000)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn criterion_12_property_suites_and_structure() {
    let start = Instant::now();
    // discovery dimensions (the full property suites run in the module
    // and property tests; this re-asserts the headline counts)
    let cat = Catalog::standard();
    let e2 = cat.metric("metric.euclid2.cartesian").unwrap();
    let (_, d2) = symmetry::kv_discover_polynomial(e2, 1).unwrap();
    assert_eq!(d2, 3);
    let e3 = cat.metric("metric.euclid3.cartesian").unwrap();
    let (_, d3) = symmetry::kv_discover_polynomial(e3, 1).unwrap();
    assert_eq!(d3, 6);

    // flat catalog metrics have vanishing curvature
    for id in [
        "metric.euclid2.cartesian",
        "metric.euclid2.polar",
        "metric.euclid3.cartesian",
        "metric.euclid3.spherical",
        "metric.null2.flat",
    ] {
        let entry = cat.load(id).unwrap();
        let metric = entry.metric().unwrap();
        let curv = metric.curvature().unwrap();
        let domain = symmetry::chart_domain(metric.chart(), &entry.domain);
        let n = metric.dim();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        assert!(
                            matches!(
                                curv.riemann[i][j][k][l].is_zero(&domain, &opts()),
                                ZeroVerdict::Zero
                            ),
                            "{id}: Riemann[{i}{j}{k}{l}] = {}",
                            curv.riemann[i][j][k][l]
                        );
                    }
                }
            }
        }
        // Christoffel and Ricci symmetry come with the construction;
        // assert them anyway for the record
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    assert_eq!(curv.christoffel[i][j][k], curv.christoffel[i][k][j]);
                }
                assert_eq!(curv.ricci[i][j], curv.ricci[j][i]);
            }
        }
    }

    // Laplace-Beltrami consistency: coefficient form vs divergence
    // form on sample scalars
    for id in ["metric.euclid2.polar", "metric.s3.round"] {
        let entry = cat.load(id).unwrap();
        let metric = entry.metric().unwrap();
        let domain = symmetry::chart_domain(metric.chart(), &entry.domain);
        let det = metric.determinant().unwrap();
        let sqrt_det = Expr::pow(
            (det.clone() * det.clone()).normalize().unwrap(),
            ex("1/4"),
        ); // |det| via (det²)^(1/4)
        let inv = metric.inverse().unwrap();
        for scalar in ["x", "r", "x^2"] {
            let u = match Expr::parse(scalar) {
                Ok(u) if u.free_symbols().iter().all(|s| {
                    metric.chart().coords().contains(s)
                }) => u,
                _ => continue,
            };
            let coefficient_form = metric.scalar_laplacian(&u).unwrap();
            let mut divergence_terms = Vec::new();
            for (i, ci) in metric.chart().coords().iter().enumerate() {
                let mut flux = Vec::new();
                for (j, cj) in metric.chart().coords().iter().enumerate() {
                    if inv[i][j].is_zero_literal() {
                        continue;
                    }
                    let _ = cj;
                    flux.push(
                        sqrt_det.clone() * inv[i][j].clone() * u.diff(metric.chart().coord(j)),
                    );
                }
                divergence_terms.push(Expr::sum(flux).diff(ci));
            }
            let divergence_form = Expr::pow_i(sqrt_det.clone(), -1) * Expr::sum(divergence_terms);
            let resid = coefficient_form - divergence_form;
            assert!(
                matches!(resid.is_zero(&domain, &opts()), ZeroVerdict::Zero),
                "{id}: divergence-form mismatch for u = {scalar}"
            );
        }
    }

    let elapsed = start.elapsed();
    println!(
        "criterion 12: PASS - discovery dimensions 3/6, flat metrics curvature-free, divergence-form Laplacian agreement; structural checks in {elapsed:?}"
    );
}
