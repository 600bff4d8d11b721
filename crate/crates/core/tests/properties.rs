use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use signreg::dynamics::GaussLegendre;
use signreg::fixtures::{is_certified_tp, random_tp};
use signreg::minors::{all_minors, multiplicative_compound};
use signreg::sign_regularity::{classify, MinorTolerance};
use signreg::sign_variation::{s_minus, s_minus_cyclic, s_plus, s_plus_cyclic, SignVector};
use signreg::spectral::{combine, eigen, random_matching};
use signreg::vdp::sample_bounded_s_minus;
use signreg::DenseMatrix;

fn signs(max_len: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(-1i8), Just(0i8), Just(1i8)], 1..=max_len)
}

fn entries(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -10.0..-0.01f64, 0.01..10.0f64], 1..=max_len)
}

fn square(n: usize) -> impl Strategy<Value = DenseMatrix> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |e| DenseMatrix::new(n, n, e).unwrap())
}

fn max_rel_gap(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    a.entries().iter().zip(b.entries()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

proptest! {
    #[test]
    fn counts_are_ordered_and_bounded(p in signs(12)) {
        let n = p.len();
        let (sm, sp) = (s_minus(&p), s_plus(&p));
        prop_assert!(sm <= sp);
        prop_assert!(sp < n);
    }

    #[test]
    fn counts_ignore_positive_scaling_and_reversal(v in entries(10), c in 0.1..100.0f64) {
        let x = SignVector::new(v.clone()).unwrap();
        let scaled = SignVector::new(v.iter().map(|e| e * c).collect()).unwrap();
        let mut rev = v.clone();
        rev.reverse();
        let rev = SignVector::new(rev).unwrap();
        prop_assert_eq!(x.s_minus(), scaled.s_minus());
        prop_assert_eq!(x.s_plus(), scaled.s_plus());
        prop_assert_eq!(x.s_minus(), rev.s_minus());
        prop_assert_eq!(x.s_plus(), rev.s_plus());
        let neg = SignVector::new(v.iter().map(|e| -e).collect()).unwrap();
        prop_assert_eq!(x.s_plus(), neg.s_plus());
    }

    #[test]
    fn v_membership_is_equality_of_counts(v in entries(10)) {
        let x = SignVector::new(v).unwrap();
        prop_assume!(!x.is_zero());
        prop_assert_eq!(x.in_v(), x.s_minus() == x.s_plus());
    }

    #[test]
    fn alternating_flip_complements_counts(p in signs(12)) {
        prop_assume!(p.iter().any(|s| *s != 0));
        let n = p.len();
        let flipped: Vec<i8> = p.iter().enumerate().map(|(i, s)| if i % 2 == 1 { -s } else { *s }).collect();
        prop_assert_eq!(s_plus(&flipped) + s_minus(&p), n - 1);
        prop_assert_eq!(s_minus(&flipped) + s_plus(&p), n - 1);
    }

    #[test]
    fn cyclic_counts_are_even_and_rotation_invariant(p in signs(9), shift in 0usize..9) {
        prop_assume!(p.iter().any(|s| *s != 0));
        let mut q = p.clone();
        q.rotate_left(shift % p.len());
        let (smc, spc) = (s_minus_cyclic(&p), s_plus_cyclic(&p));
        prop_assert_eq!(smc % 2, 0);
        prop_assert_eq!(spc % 2, 0);
        prop_assert!(smc <= spc);
        prop_assert_eq!(smc, s_minus_cyclic(&q));
        prop_assert_eq!(spc, s_plus_cyclic(&q));
    }

    #[test]
    fn compound_is_multiplicative(a in square(4), b in square(4), k in 1usize..=4) {
        let ab = a.matmul(&b).unwrap();
        let lhs = multiplicative_compound(&ab, k).unwrap();
        let rhs = multiplicative_compound(&a, k).unwrap().matmul(&multiplicative_compound(&b, k).unwrap()).unwrap();
        prop_assert!(max_rel_gap(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn compound_commutes_with_transpose(a in square(4), k in 1usize..=4) {
        let lhs = multiplicative_compound(&a.transpose(), k).unwrap();
        let rhs = multiplicative_compound(&a, k).unwrap().transpose();
        prop_assert!(max_rel_gap(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn top_compound_is_determinant(a in square(5)) {
        let c = multiplicative_compound(&a, 5).unwrap();
        let d = a.det().unwrap();
        prop_assert!((c.get(0, 0) - d).abs() <= 1e-10 * d.abs().max(1.0));
    }

    #[test]
    fn minors_scale_with_order(a in square(3), c in 0.5..3.0f64, k in 1usize..=3) {
        let m = all_minors(&a, k).unwrap();
        let ms = all_minors(&a.scale(c).unwrap(), k).unwrap();
        for ((_, _, x), (_, _, y)) in m.iter().zip(ms.iter()) {
            prop_assert!((x * c.powi(k as i32) - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }

    #[test]
    fn classification_survives_positive_scaling(seed in 0u64..1000, c in 0.01..100.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_tp(4, &mut rng);
        let f = classify(&a, MinorTolerance::default()).unwrap().flags;
        let g = classify(&a.scale(c).unwrap(), MinorTolerance::default()).unwrap().flags;
        prop_assert_eq!(f, g);
        prop_assert!(f.tp);
    }

    #[test]
    fn tp_products_stay_tp(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_tp(3, &mut rng);
        let b = random_tp(3, &mut rng);
        prop_assert!(is_certified_tp(&a.matmul(&b).unwrap()));
    }

    #[test]
    fn eigenvalues_multiply_to_determinant(a in square(4)) {
        prop_assume!(a.det().unwrap().abs() > 1e-3);
        let spec = eigen(&a, None);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let prod = spec.leading_product(4);
        let d = a.det().unwrap();
        prop_assert!((prod.re - d).abs() <= 1e-8 * d.abs().max(1.0));
        prop_assert!(prod.im.abs() <= 1e-8 * d.abs().max(1.0));
        let moduli = spec.moduli();
        prop_assert!(moduli.windows(2).all(|w| w[0] >= w[1] * (1.0 - 1e-10)));
    }

    #[test]
    fn matched_combinations_are_real(a in square(5), seed in 0u64..100) {
        prop_assume!(a.det().unwrap().abs() > 1e-3);
        let spec = eigen(&a, None);
        prop_assume!(spec.is_ok());
        let spec = spec.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_matching(&spec, 1, 5, &mut rng).unwrap();
        let (x, imag) = combine(&spec, &c);
        let size = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        prop_assert!(imag <= 1e-12 * size);
    }

    #[test]
    fn sampled_inputs_respect_the_bound(n in 1usize..8, bound in 0usize..8, seed in 0u64..1000) {
        let bound = bound.min(n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sample_bounded_s_minus(n, bound, &mut rng).unwrap();
        let sv = SignVector::new(x).unwrap();
        prop_assert!(!sv.is_zero());
        prop_assert!(sv.s_minus() <= bound);
    }

    #[test]
    fn quadrature_is_exact_below_twice_the_order(order in 1usize..20, deg in 0i32..40) {
        prop_assume!((deg as usize) < 2 * order);
        let g = GaussLegendre::new(order);
        let got = g.integrate(|r| r.powi(deg));
        prop_assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13);
    }
}
