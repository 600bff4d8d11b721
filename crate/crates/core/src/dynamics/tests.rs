use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;
use crate::matrix::DenseMatrix;

#[test]
fn example3_defaults() {
    let sys = Example3::defaults();
    assert_eq!(sys.period(), Some(4));
    assert_eq!(sys.domain().hi, vec![12.0, 12.0]);
    assert!(sys.gamma > 0.0 && sys.alpha > 0.0);
    let frozen = sys.frozen(0);
    assert_eq!(frozen.period(), Some(1));
    // the period is exact because coefficients are evaluated modulo T
    assert_eq!(sys.map(1, &[5.0, 6.0]), sys.map(9, &[5.0, 6.0]));
}

#[test]
fn example3_rejects_bad_coefficients() {
    let mut spec = Example3Spec::default();
    spec.c[1][0] = Coefficient::Constant { value: -0.5 };
    assert!(matches!(example3_system(spec), Err(Error::InvalidArgument(_))));
    let mut spec = Example3Spec::default();
    spec.c[0][1] = Coefficient::Constant { value: 40.0 };
    assert!(example3_system(spec).is_err());
}

#[test]
fn jacobian_matches_finite_differences() {
    let sys = Example3::defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let x = sys.domain().sample(&mut rng);
        for i in 0..4 {
            assert!(jacobian_error(&sys, i, &x, 1e-6) < 1e-7);
        }
    }
}

#[test]
fn quadrature_matches_closed_form() {
    let sys = Example3::defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let a = sys.domain().sample(&mut rng);
        let b = sys.domain().sample(&mut rng);
        let m = averaged_jacobian(&sys, 3, &a, &b, DEFAULT_QUADRATURE_ORDER).unwrap();
        let exact = sys.closed_form_averaged_jacobian(3, &a, &b).unwrap();
        for (x, y) in m.entries().iter().zip(exact.entries()) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn sixteen_nodes_lose_accuracy_near_the_corner() {
    // the integrand has a pole at r = -1/12 when a = (12, 12), b = 0
    let sys = Example3::defaults();
    let (a, b) = ([12.0, 12.0], [0.0, 0.0]);
    let exact = sys.closed_form_averaged_jacobian(0, &a, &b).unwrap();
    let gap = |order| {
        let m = averaged_jacobian(&sys, 0, &a, &b, order).unwrap();
        m.entries().iter().zip(exact.entries()).map(|(x, y)| (x - y).abs() / y).fold(0.0, f64::max)
    };
    assert!(gap(16) > 1e-10 && gap(16) < 1e-6);
    assert!(gap(DEFAULT_QUADRATURE_ORDER) < 1e-13);
}

#[test]
fn averaged_jacobian_edge_cases() {
    let sys = Example3::defaults();
    let a = [2.0, 3.0];
    assert_eq!(averaged_jacobian(&sys, 0, &a, &a, 16).unwrap(), sys.jacobian(0, &a));
    assert!(averaged_jacobian(&sys, 0, &[-1.0, 0.0], &a, 16).is_err());
    let m = DenseMatrix::from_rows(&[[0.5, 0.2], [0.1, 0.4]]).unwrap();
    let lin = LinearMap { a: m.clone(), domain: BoxDomain::new(vec![-5.0; 2], vec![5.0; 2]).unwrap() };
    let avg = averaged_jacobian(&lin, 7, &[1.0, -2.0], &[0.0, 3.0], 16).unwrap();
    for (x, y) in avg.entries().iter().zip(m.entries()) {
        assert!((x - y).abs() < 1e-15);
    }
}

#[test]
fn variational_identity() {
    // f(a) - f(b) equals the averaged Jacobian applied to a - b
    let sys = Example3::defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..8 {
        let a = sys.domain().sample(&mut rng);
        let b = sys.domain().sample(&mut rng);
        let m = averaged_jacobian(&sys, i, &a, &b, 16).unwrap();
        let z = [a[0] - b[0], a[1] - b[1]];
        let mz = m.mul_vec(&z).unwrap();
        let (fa, fb) = (sys.map(i, &a), sys.map(i, &b));
        for p in 0..2 {
            assert!((fa[p] - fb[p] - mz[p]).abs() < 1e-12);
        }
    }
}

#[test]
fn assumption1_holds_for_defaults() {
    let sys = Example3::defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let report = check_assumption1(&sys, 500, &mut rng).unwrap();
    assert!(report.passed(), "{report:?}");
    assert!(report.get("quadrature_agreement").is_some());
}

#[test]
fn assumption1_detects_negative_entries() {
    let m = DenseMatrix::from_rows(&[[0.5, -0.2], [0.1, 0.4]]).unwrap();
    let lin = LinearMap { a: m, domain: BoxDomain::new(vec![-1.0; 2], vec![1.0; 2]).unwrap() };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let report = check_assumption1(&lin, 10, &mut rng).unwrap();
    assert!(!report.passed());
    assert!(matches!(check_cor4(&lin, &[0.5, 0.5], 50, 1e-8, &mut rng), Err(Error::HypothesisNotMet(_))));
}

#[test]
fn entrainment_of_example3() {
    let sys = Example3::defaults();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let out = check_entrainment(&sys, &[5.0, 6.0], 500, 1e-6, &mut rng).unwrap();
    assert!(out.periodicity.converged);
    assert_eq!(out.limit_cycle.len(), 4);
    assert!(out.report.passed());
}

#[test]
fn grid_of_initial_conditions_converges_to_one_orbit() {
    let sys = Example3::defaults();
    let mut tails = Vec::new();
    for k in 0..20 {
        let x0 = [0.6 * k as f64, 12.0 - 0.6 * k as f64];
        let rec = simulate_nonlinear(&sys, &x0, 500).unwrap();
        let p = detect_periodicity(&rec, 4, 1e-6, 8).unwrap();
        assert!(p.converged, "start {x0:?}");
        tails.push(rec.states[500].clone());
    }
    // different starts share the limit (the step 500 is aligned mod 4)
    for t in &tails[1..] {
        assert!((t[0] - tails[0][0]).abs() < 1e-6 && (t[1] - tails[0][1]).abs() < 1e-6);
    }
}

#[test]
fn frozen_system_reaches_equilibrium() {
    let sys = Example3::defaults().frozen(0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let eq = check_cor4(&sys, &[5.0, 6.0], 500, 1e-8, &mut rng).unwrap();
    assert!(eq.residual < 1e-8);
    assert!(eq.report.passed());
    let periodic = Example3::defaults();
    assert!(matches!(
        check_cor4(&periodic, &[5.0, 6.0], 500, 1e-8, &mut rng),
        Err(Error::HypothesisNotMet(_))
    ));
    let short = check_cor4(&sys, &[5.0, 6.0], 3, 1e-8, &mut rng);
    assert!(matches!(short, Err(Error::HorizonExhausted { .. })));
}

#[test]
fn fixed_point_gives_constant_trajectory() {
    let sys = Example3::defaults().frozen(2);
    let rec = simulate_nonlinear(&sys, &[0.0, 0.0], 10).unwrap();
    assert!(rec.states.iter().all(|x| x == &vec![0.0, 0.0]));
}

#[test]
fn domain_escape_reports_step() {
    let m = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 2.0]]).unwrap();
    let lin = LinearMap { a: m, domain: BoxDomain::new(vec![-10.0; 2], vec![10.0; 2]).unwrap() };
    match simulate_nonlinear(&lin, &[1.0, 1.0], 10) {
        Err(Error::DomainEscape { step, .. }) => assert_eq!(step, 4),
        other => panic!("expected escape, got {other:?}"),
    }
    assert!(matches!(simulate_nonlinear(&lin, &[11.0, 0.0], 1), Err(Error::DomainEscape { step: 0, .. })));
}

#[test]
fn difference_of_solutions_loses_variation() {
    let sys = Example3::defaults();
    let rec = simulate_nonlinear_pair(&sys, &[5.0, 6.0], &[6.0, 1.0], 60).unwrap();
    let report = monitor_difference_variation(&rec).unwrap();
    assert!(report.passed(), "{report:?}");
    let resolved = &rec.annotations[..rec.resolved_len()];
    assert!(resolved.len() > 10);
    assert!(resolved.iter().filter(|a| !a.in_v).count() <= 1);
    assert!(monitor_difference_variation(&TrajectoryRecord::plain(vec![vec![1.0, 2.0]])).is_err());
}
