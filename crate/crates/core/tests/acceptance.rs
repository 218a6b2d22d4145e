//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts. Run with `cargo test --release --test acceptance -- --nocapture`
//! to see the lines and realistic timings.

mod common;

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::Rng;
use trihyp::identities::{check_identity, relative_residual, IdentityId, Lemma};
use trihyp::numerics::{Backend, TruncationPolicy};
use trihyp::series::{eval_f3, eval_pfq, ArgumentTriple};
use trihyp::special::{check_special_case, SpecialCase, SpecialCaseId};
use trihyp::suite::{
    check_lemma, collapsed, instance_rng, random_float_instance, random_lemma_instance, random_rational_instance,
    random_special_case, run_suite, SuiteConfig, SHIFT_CHOICES,
};

const SEED: u64 = 20_240_601;

fn report(criterion: u32, what: &str, failures: &[String], elapsed: Duration, budget: Duration) {
    let ok = failures.is_empty() && elapsed <= budget;
    println!(
        "{} criterion {criterion}: {what} ({} failures, {:.2?} of {:.0?})",
        if ok { "PASS" } else { "FAIL" },
        failures.len(),
        elapsed,
        budget
    );
    for f in failures.iter().take(10) {
        println!("    {f}");
    }
    assert!(failures.is_empty(), "criterion {criterion}: {failures:?}");
    assert!(elapsed <= budget, "criterion {criterion} took {elapsed:?}, budget {budget:?}");
}

#[test]
fn criterion_1_lemmas_are_exact() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let policy = TruncationPolicy::new(1e-15, 40, 2).unwrap();
    for (g, lemma) in Lemma::ALL.into_iter().enumerate() {
        for index in 0..50 {
            let mut rng = instance_rng(SEED, g, index);
            let (n, params) = random_lemma_instance(lemma, &mut rng);
            assert!(n <= 15);
            let closed = lemma.closed_form(n, &params).expect("closed form");
            let (num, den, z) = lemma.series(n, &params).expect("series");
            let library = eval_pfq(&num, &den, &z, &policy).expect("series value");
            let oracle = common::terminating_pfq(&num, &den, &z, n);
            let report = check_lemma(lemma, n, &params);
            if !(closed == oracle && library.value == oracle && report.pass && report.residual.is_zero()) {
                failures.push(format!("{lemma} n={n} params={params:?}: closed {closed}, oracle {oracle}"));
            }
        }
    }
    report(1, "terminating summation lemmas exact for n <= 15", &failures, start.elapsed(), Duration::from_secs(5));
}

#[test]
fn criterion_2_eval_matches_naive_triple_loop() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let policy = TruncationPolicy::new(1e-15, 40, 2).unwrap();
    let mut rng = common::rng(SEED);
    for set in 0..10 {
        let ps = common::random_parameter_set(&mut rng);
        let x = [0; 3].map(|_| common::uniform(&mut rng, -0.05, 0.05));
        let args = ArgumentTriple::new(x[0], x[1], x[2]);
        let oracle = common::naive_f3(&ps, x, 40);
        match eval_f3(&ps, &args, &policy) {
            Ok(r) if common::relative_error(r.value, oracle) <= 1e-12 => {}
            Ok(r) => failures.push(format!(
                "set {set}: {} vs {oracle}, rel {:e}",
                r.value,
                common::relative_error(r.value, oracle)
            )),
            Err(e) => failures.push(format!("set {set}: {e}")),
        }
    }
    report(2, "eval_f3 agrees with the naive triple loop", &failures, start.elapsed(), Duration::from_secs(10));
}

#[test]
fn criterion_3_identities_hold_on_random_instances() {
    let start = Instant::now();
    let config = SuiteConfig::default();
    assert_eq!(config.policy.series.max_total_degree, 28);
    assert_eq!(config.policy.outer_max_degree, 40);
    assert_eq!(config.tol, 1e-8);
    assert_eq!(config.collapse_tol, 1e-13);
    let shifts: Vec<f64> = SHIFT_CHOICES.iter().map(|&(p, q)| p as f64 / q as f64).collect();
    let mut failures = Vec::new();
    for (g, id) in IdentityId::ALL.into_iter().enumerate() {
        for index in 0..25 {
            let mut rng = instance_rng(SEED, g, index);
            let inst = random_float_instance(id, &mut rng);
            assert!(inst.scalars.t.is_none_or(|t| t.abs() <= 0.2));
            for s in [inst.scalars.r, inst.scalars.d].into_iter().flatten() {
                assert!(shifts.contains(&s), "{s}");
            }
            assert!([inst.args.x1, inst.args.x2, inst.args.x3].iter().all(|x| x.abs() <= 0.05));
            for (label, report) in [
                ("main", check_identity(&inst, &config.policy, 1e-8)),
                ("collapse", check_identity(&collapsed(&inst), &config.policy, 1e-13)),
            ] {
                if !report.pass {
                    failures.push(format!(
                        "{id} #{index} {label}: residual {:e}, converged {:?}, {:?}",
                        report.residual,
                        report.converged(),
                        report.failure
                    ));
                }
            }
        }
    }
    report(3, "17 identities x 25 instances", &failures, start.elapsed(), Duration::from_secs(300));
}

fn oracle_value(case: &SpecialCase<f64>, x: [f64; 3]) -> f64 {
    match *case {
        SpecialCase::FA3 { a, b, c } => common::lauricella_a(a, b, c, x, 40),
        SpecialCase::FD3 { a, b, c } => common::lauricella_d(a, b, c, x, 40),
        SpecialCase::HA { a, b1, b2, c1, c2 } => common::srivastava_h_a(a, b1, b2, c1, c2, x, 40),
    }
}

#[test]
fn criterion_4_special_cases() {
    let start = Instant::now();
    let config = SuiteConfig::default();
    let series = TruncationPolicy::new(1e-15, 40, 2).unwrap();
    let mut failures = Vec::new();
    for (g, id) in SpecialCaseId::ALL.into_iter().enumerate() {
        for index in 0..20 {
            let mut rng = instance_rng(SEED, 100 + g, index);
            let case = random_special_case::<f64>(id, false, &mut rng);
            let x = [0; 3].map(|_| rng.gen_range(-0.05..=0.05));
            let args = ArgumentTriple::new(x[0], x[1], x[2]);
            let oracle = oracle_value(&case, x);
            match eval_f3(&case.parameter_set(), &args, &series) {
                Ok(r) if relative_residual(&r.value, &oracle) <= 1e-12 => {}
                Ok(r) => failures.push(format!("{id} #{index} mapping: {} vs {oracle}", r.value)),
                Err(e) => failures.push(format!("{id} #{index} mapping: {e}")),
            }
            let t = rng.gen_range(-0.2..=0.2);
            let report = check_special_case(&case, t, args, &config.policy, 1e-8);
            if !report.pass {
                failures.push(format!("{id} #{index} summation: residual {:e}, {:?}", report.residual, report.failure));
            }
        }
    }
    report(4, "special-case mappings and summation formulas", &failures, start.elapsed(), Duration::from_secs(60));
}

#[test]
fn criterion_5_terminating_t9c_is_exact() {
    let start = Instant::now();
    let config = SuiteConfig::default();
    let mut failures = Vec::new();
    for index in 0..10 {
        let mut rng = instance_rng(SEED, 200, index);
        let inst = random_rational_instance(IdentityId::T9c, &mut rng);
        let report = check_identity(&inst, &config.policy, 0.0);
        let exact = report.lhs_diag.as_ref().is_some_and(|d| d.terminated_exactly)
            && report.rhs_diag.as_ref().is_some_and(|d| d.terminated_exactly);
        if !(report.pass && exact && report.lhs.is_some() && report.lhs == report.rhs) {
            failures.push(format!("#{index}: lhs {:?}, rhs {:?}, {:?}", report.lhs, report.rhs, report.failure));
        }
    }
    report(5, "terminating rational T9c instances agree exactly", &failures, start.elapsed(), Duration::from_secs(30));
}

#[test]
fn criterion_6_suite_is_deterministic() {
    let start = Instant::now();
    let config = SuiteConfig {
        seed: SEED,
        instances_per_identity: 5,
        ..SuiteConfig::default()
    };
    let csv_in = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_suite(&config).unwrap().csv_string().unwrap())
    };
    let reference = run_suite(&config).unwrap().csv_string().unwrap();
    let mut failures = Vec::new();
    for (label, csv) in [
        ("repeat", run_suite(&config).unwrap().csv_string().unwrap()),
        ("1 thread", csv_in(1)),
        ("4 threads", csv_in(4)),
    ] {
        if csv != reference {
            failures.push(format!("{label} differs"));
        }
    }
    let rational = SuiteConfig {
        backend: Backend::Rational,
        ..config
    };
    let a = run_suite(&rational).unwrap().csv_string().unwrap();
    if a != run_suite(&rational).unwrap().csv_string().unwrap() {
        failures.push("rational repeat differs".into());
    }
    assert!(reference.starts_with("identity_id,instance_index,residual,converged_lhs,converged_rhs,pass\n"));
    report(6, "suite CSV byte-identical across runs and thread counts", &failures, start.elapsed(), Duration::from_secs(300));
}
