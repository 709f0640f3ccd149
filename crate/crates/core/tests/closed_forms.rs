use g2flow::closedform::{
    classify, closed_solution, continuity_report, derived_solution, lambda_constants,
    lambda_profile, loglog_slope, Horizon, SingularityType,
};
use g2flow::{q, reduce_to_ode, AnsatzKind, Error, FlowKind};
use proptest::prelude::*;

#[test]
fn closed_solutions_start_at_the_initial_data() {
    for k in FlowKind::ALL {
        for a in [0.5, 1.0, 2.0] {
            let sol = closed_solution(k, a).unwrap();
            let [f, h] = sol.eval(0.0).unwrap();
            assert!((f - a).abs() < 1e-15 && (h - 1.0).abs() < 1e-15, "{k}");
            assert!(sol.contains(0.0));
        }
    }
}

#[test]
fn singular_times_scale_with_a_squared() {
    let tau = |k, a| closed_solution(k, a).unwrap().singular_time();
    assert!((tau(FlowKind::Rhf, 1.0) - 1.0 / 13.0).abs() < 1e-15);
    assert!((tau(FlowKind::Rl1, 1.0) + 2.0 / 25.0).abs() < 1e-15);
    assert!((tau(FlowKind::Rl2, 1.0) + 1.0 / 15.0).abs() < 1e-15);
    assert!((tau(FlowKind::Ngf, 1.0) - 4.0 / 9.0).abs() < 1e-15);
    for k in FlowKind::ALL {
        assert!((tau(k, 2.0) * 4.0 - tau(k, 1.0)).abs() < 1e-15);
    }
}

#[test]
fn evaluation_outside_the_lifespan_is_an_error() {
    let sol = closed_solution(FlowKind::Rhf, 1.0).unwrap();
    assert!(matches!(sol.eval(0.5), Err(Error::OutsideLifespan { .. })));
    assert!(matches!(
        closed_solution(FlowKind::Rhf, -1.0),
        Err(Error::NonPositiveScale)
    ));
}

#[test]
fn volume_exponents() {
    let e = |k| closed_solution(k, 1.0).unwrap().volume_exponent();
    assert!((e(FlowKind::Rhf) - 27.0 / 26.0).abs() < 1e-12);
    assert!((e(FlowKind::Rl1) - 0.3).abs() < 1e-12);
}

#[test]
fn engine_power_laws_reproduce_the_matching_closed_forms() {
    for k in [FlowKind::Rhf, FlowKind::Rl1, FlowKind::Rl2] {
        let sys = reduce_to_ode(k, AnsatzKind::Ccy).unwrap();
        let d = derived_solution(&sys, 1.5).unwrap();
        let c = closed_solution(k, 1.5).unwrap();
        assert!((d.rate - c.rate).abs() < 1e-12, "{k}");
        assert!(
            (d.f_exp - c.f_exp).abs() < 1e-12 && (d.h_exp - c.h_exp).abs() < 1e-12,
            "{k}"
        );
    }
    // the engine NGF solution lives forever forward and dies backward
    let sys = reduce_to_ode(FlowKind::Ngf, AnsatzKind::Ccy).unwrap();
    let d = derived_solution(&sys, 1.0).unwrap();
    assert!(d.t_max.is_infinite());
    assert!((d.t_min + 4.0 / 35.0).abs() < 1e-12);
}

#[test]
fn lambda_constants_are_exact() {
    let c = lambda_constants().unwrap();
    assert_eq!(c.c0, q(69, 4));
    assert_eq!(c.c0_prime, q(12, 1));
    assert_eq!(c.torsion4, q(225, 16));
    assert_eq!(c.total(), q(693, 16));
}

#[test]
fn continuity_at_the_singular_ends() {
    // RHF: f² and h² have unbounded derivative as t → 1/13
    let r = continuity_report(FlowKind::Rhf, 1.0, (0.0, 1.0 / 13.0)).unwrap();
    assert!(r.reaches_singular_time && !r.uniformly_continuous);
    // the printed NGF metric shrinks linearly, so it stays uniformly continuous
    let r = continuity_report(FlowKind::Ngf, 1.0, (0.0, 4.0 / 9.0)).unwrap();
    assert!(r.reaches_singular_time && r.uniformly_continuous);
    assert!((r.sup_dgdt - 2.25).abs() < 1e-12);
    // RL1 forward: immortal with bounded speed
    let r = continuity_report(FlowKind::Rl1, 1.0, (0.0, f64::INFINITY)).unwrap();
    assert!(!r.reaches_singular_time && r.uniformly_continuous);
    let r = continuity_report(FlowKind::Rl1, 1.0, (-0.08, 0.0)).unwrap();
    assert!(r.reaches_singular_time && !r.uniformly_continuous);
}

#[test]
fn classification_needs_enough_samples() {
    let samples: Vec<(f64, f64)> = (1..5)
        .map(|i| (1.0 - 0.1f64.powi(i), 10f64.powi(i)))
        .collect();
    assert!(matches!(
        classify(&samples, Horizon::Finite(1.0)),
        Err(Error::InsufficientResolution { .. })
    ));
}

#[test]
fn lambda_profile_is_undefined_past_the_singular_time() {
    assert!(lambda_profile(FlowKind::Rhf, 1.0, 0.0, 693.0 / 16.0, 0.1).is_err());
    assert!(lambda_profile(FlowKind::Rhf, 1.0, 0.0, 693.0 / 16.0, 0.05).unwrap() > 0.0);
}

fn finite_samples(c: f64, p: f64, tau: f64) -> Vec<(f64, f64)> {
    (0..200)
        .map(|i| {
            let d = 10f64.powf(-(i as f64) / 20.0);
            (tau - d, c * d.powf(-p))
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The type depends only on the blow-up rate, not on the scale of Λ or
    /// where the horizon sits.
    #[test]
    fn classification_is_scale_invariant(c in 0.01f64..100.0, tau in 0.01f64..10.0) {
        let r = classify(&finite_samples(c, 1.0, tau), Horizon::Finite(tau)).unwrap();
        prop_assert_eq!(r.kind, SingularityType::I);
        let r = classify(&finite_samples(c, 1.5, tau), Horizon::Finite(tau)).unwrap();
        prop_assert_eq!(r.kind, SingularityType::IIa);
    }

    #[test]
    fn loglog_slope_recovers_power_laws(c in 0.1f64..10.0, p in -3.0f64..3.0) {
        let xs: Vec<f64> = (1..40).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| c * x.powf(p)).collect();
        prop_assert!((loglog_slope(&xs, &ys) - p).abs() < 1e-10);
    }
}
