use num_rational::BigRational;
use trihyp::identities::{check_identity, lhs_value, rhs_value, FreeScalars, IdentityId, IdentityInstance, IdentityPolicy};
use trihyp::params::{Family, ParameterSet};
use trihyp::series::{eval_f3, ArgumentTriple};

fn sample_ps() -> ParameterSet<f64> {
    ParameterSet::new()
        .with(Family::A, [0.7])
        .with(Family::B, [1.3])
        .with(Family::Bp, [0.9])
        .with(Family::C, [1.1, 0.6])
        .with(Family::Cp, [0.8])
        .with(Family::Cpp, [1.2])
        .with(Family::E, [1.9])
        .with(Family::G, [2.1])
        .with(Family::Gp, [1.7])
        .with(Family::Gpp, [1.4])
        .with(Family::H, [2.3])
        .with(Family::Hp, [1.6])
        .with(Family::Hpp, [2.2])
}

fn instance(id: IdentityId, t: f64, r: f64, d: f64) -> IdentityInstance<f64> {
    let mut scalars = FreeScalars::zeros_for(id);
    scalars.t = scalars.t.map(|_| t);
    scalars.r = scalars.r.map(|_| r);
    scalars.d = scalars.d.map(|_| d);
    IdentityInstance {
        id,
        ps: sample_ps(),
        i: id.family().map(|_| 1),
        scalars,
        args: ArgumentTriple::new(0.04, -0.03, 0.02),
    }
}

#[test]
fn every_identity_holds_on_a_sample_instance() {
    let policy = IdentityPolicy::default();
    for id in IdentityId::ALL {
        let report = check_identity(&instance(id, 0.15, 0.7, 0.3), &policy, 1e-8);
        println!("{id}: residual {:e} {:?}", report.residual, report.failure);
        assert!(report.pass, "{id}: {report:?}");
    }
}

#[test]
fn every_identity_collapses_when_scalars_vanish() {
    let policy = IdentityPolicy::default();
    for id in IdentityId::ALL {
        let report = check_identity(&instance(id, 0.0, 0.0, 0.0), &policy, 1e-13);
        assert!(report.pass, "{id}: {report:?}");
    }
}

#[test]
fn geometric_case_matches_closed_form() {
    let inst = IdentityInstance {
        id: IdentityId::T1a,
        ps: ParameterSet::new().with(Family::A, [1.0]),
        i: Some(1),
        scalars: FreeScalars::t(0.2),
        args: ArgumentTriple::new(0.05, 0.05, 0.05),
    };
    let policy = IdentityPolicy::default();
    let lhs = lhs_value(&inst, &policy).unwrap();
    let rhs = rhs_value(&inst, &policy).unwrap();
    assert!((lhs.value - 1.0 / 0.65).abs() < 1e-10);
    assert!((rhs.value - 1.0 / 0.65).abs() < 1e-10);
    let report = check_identity(&inst, &policy, 1e-8);
    assert!(report.pass, "{report:?}");
}

#[test]
fn vanishing_t_reduces_to_plain_series() {
    let policy = IdentityPolicy::default();
    let args = ArgumentTriple::new(0.04, -0.03, 0.02);
    let plain = eval_f3(&sample_ps(), &args, &policy.series).unwrap().value;
    for id in [IdentityId::T1a, IdentityId::T9c] {
        let inst = instance(id, 0.0, 0.0, 0.0);
        assert_eq!(rhs_value(&inst, &policy).unwrap().value, plain);
        let report = check_identity(&inst, &policy, 1e-8);
        assert!(report.pass);
    }
    let lhs = lhs_value(&instance(IdentityId::T1a, 0.0, 0.0, 0.0), &policy).unwrap();
    assert_eq!(lhs.value, plain);
}

#[test]
fn flagged_pole_gives_invalid_report() {
    let mut inst = instance(IdentityId::T5c, 0.0, 0.5, 0.5);
    inst.ps = inst.ps.with(Family::C, [-2.0]);
    let report = check_identity(&inst, &IdentityPolicy::default(), 1e-8);
    assert!(!report.pass);
    assert!(report.failure.unwrap().contains("non-positive integer"));
}

#[test]
fn instance_requirements_are_enforced() {
    let mut missing_index = instance(IdentityId::T1b, 0.1, 0.0, 0.0);
    missing_index.i = None;
    assert!(missing_index.validate().is_err());
    let mut out_of_range = instance(IdentityId::T1c, 0.1, 0.0, 0.0);
    out_of_range.i = Some(3);
    assert!(out_of_range.validate().is_err());
    let mut extra_scalar = instance(IdentityId::T2x1, 0.1, 0.0, 0.0);
    extra_scalar.scalars.r = Some(0.5);
    assert!(extra_scalar.validate().is_err());
    let mut missing_scalar = instance(IdentityId::T5c, 0.0, 0.3, 0.7);
    missing_scalar.scalars.d = None;
    assert!(missing_scalar.validate().is_err());
}

#[test]
fn every_entry_of_the_family_may_be_distinguished() {
    let policy = IdentityPolicy::default();
    for i in 1..=2 {
        let mut inst = instance(IdentityId::T1a, 0.12, 0.0, 0.0);
        inst.ps = inst.ps.with(Family::A, [0.7, 0.4]);
        inst.i = Some(i);
        let report = check_identity(&inst, &policy, 1e-8);
        assert!(report.pass, "i = {i}: {report:?}");
    }
}

#[test]
fn terminating_instance_is_exact_in_rationals() {
    let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
    let ps = ParameterSet::new()
        .with(Family::A, [q(3, 4)])
        .with(Family::C, [q(2, 5), q(-3, 1)])
        .with(Family::Cp, [q(-2, 1)])
        .with(Family::Cpp, [q(-2, 1)])
        .with(Family::G, [q(7, 3)])
        .with(Family::H, [q(5, 2)]);
    let inst = IdentityInstance {
        id: IdentityId::T9c,
        ps,
        i: Some(2),
        scalars: FreeScalars::t(q(1, 7)),
        args: ArgumentTriple::new(q(1, 3), q(-1, 5), q(2, 9)),
    };
    let report = check_identity(&inst, &IdentityPolicy::default(), 0.0);
    assert!(report.pass, "{report:?}");
    assert_eq!(report.lhs, report.rhs);
    assert!(report.lhs_diag.unwrap().terminated_exactly);
}
