//! Classification of matrices by the signs of their minors: `SR_k`, `SSR_k`,
//! the common sign `eps_k`, and the derived classes TP, TN, SSR, SSR for all
//! odd orders and SSR for all even orders.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matrix::{DenseMatrix, IndexSet};
use crate::minors::{all_minors_with_limit, DEFAULT_ENUMERATION_LIMIT};

/// How a minor is judged to be zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum MinorTolerance {
    /// `|m| <= t` counts as zero.
    Absolute(f64),
    /// `|m| <= r * H` counts as zero, with `H` the Hadamard bound of the
    /// submatrix (smaller of the row-norm and column-norm products). LU
    /// rounding error in a determinant is a small multiple of `eps * H`,
    /// so the default sits a few hundred ulps above it.
    Relative(f64),
}

impl Default for MinorTolerance {
    fn default() -> Self {
        MinorTolerance::Relative(1e-13)
    }
}

impl From<Option<f64>> for MinorTolerance {
    fn from(tol: Option<f64>) -> Self {
        tol.map_or_else(MinorTolerance::default, MinorTolerance::Absolute)
    }
}

fn hadamard_bound(a: &DenseMatrix, rows: &IndexSet, cols: &IndexSet) -> f64 {
    let (r0, c0) = (rows.zero_based(), cols.zero_based());
    let row_prod: f64 = r0
        .iter()
        .map(|&r| c0.iter().map(|&c| a.get(r, c).powi(2)).sum::<f64>().sqrt())
        .product();
    let col_prod: f64 = c0
        .iter()
        .map(|&c| r0.iter().map(|&r| a.get(r, c).powi(2)).sum::<f64>().sqrt())
        .product();
    row_prod.min(col_prod)
}

/// Verdict for a single order `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderVerdict {
    pub k: usize,
    #[serde(rename = "is_SR_k")]
    pub is_sr: bool,
    #[serde(rename = "is_SSR_k")]
    pub is_ssr: bool,
    /// Common sign of the minors; present exactly when `is_ssr`.
    pub epsilon_k: Option<i8>,
    pub min_abs_minor: f64,
    pub tol: MinorTolerance,
    /// Some non-zero minor lies within ten times its threshold.
    pub margin_flag: bool,
    #[serde(skip)]
    nonnegative: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFlags {
    #[serde(rename = "TP")]
    pub tp: bool,
    #[serde(rename = "TN")]
    pub tn: bool,
    #[serde(rename = "SSR")]
    pub ssr: bool,
    #[serde(rename = "SSR_odd")]
    pub ssr_odd: bool,
    #[serde(rename = "SSR_even")]
    pub ssr_even: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignRegularityReport {
    pub n: usize,
    pub cols: usize,
    pub per_k: Vec<OrderVerdict>,
    pub flags: ClassFlags,
}

impl SignRegularityReport {
    /// Verdict for order `k` (1-based).
    pub fn order(&self, k: usize) -> Option<&OrderVerdict> {
        self.per_k.get(k.checked_sub(1)?)
    }

    pub fn is_ssr_k(&self, k: usize) -> bool {
        self.order(k).is_some_and(|v| v.is_ssr)
    }

    /// `eps_k`, with `eps_0 = 1`.
    pub fn epsilon(&self, k: usize) -> Option<i8> {
        if k == 0 {
            return Some(1);
        }
        self.order(k).and_then(|v| v.epsilon_k)
    }
}

/// Tests whether all order-`k` minors are non-zero with one common sign.
pub fn ssr_k_test(
    a: &DenseMatrix,
    k: usize,
    tol: impl Into<MinorTolerance>,
) -> Result<OrderVerdict> {
    ssr_k_test_with_limit(a, k, tol, DEFAULT_ENUMERATION_LIMIT)
}

pub fn ssr_k_test_with_limit(
    a: &DenseMatrix,
    k: usize,
    tol: impl Into<MinorTolerance>,
    limit: usize,
) -> Result<OrderVerdict> {
    let table = all_minors_with_limit(a, k, limit)?;
    let tol = tol.into();
    let mut any_pos = false;
    let mut any_neg = false;
    let mut any_zero = false;
    let mut margin_flag = false;
    let mut min_abs = f64::INFINITY;
    for (rows, cols, v) in table.iter() {
        let tol = match tol {
            MinorTolerance::Absolute(t) => t,
            MinorTolerance::Relative(r) => r * hadamard_bound(a, rows, cols),
        };
        min_abs = min_abs.min(v.abs());
        if v > tol {
            any_pos = true;
        } else if v < -tol {
            any_neg = true;
        } else {
            any_zero = true;
        }
        if v != 0.0 && v.abs() < 10.0 * tol {
            margin_flag = true;
        }
    }
    let is_sr = !(any_pos && any_neg);
    let is_ssr = is_sr && !any_zero;
    let epsilon_k = if is_ssr {
        Some(if any_pos { 1 } else { -1 })
    } else {
        None
    };
    Ok(OrderVerdict {
        k,
        is_sr,
        is_ssr,
        epsilon_k,
        min_abs_minor: min_abs,
        tol,
        margin_flag,
        nonnegative: !any_neg,
    })
}

/// Per-order verdicts for `k = 1..=min(rows, cols)` and the derived classes.
pub fn classify(a: &DenseMatrix, tol: impl Into<MinorTolerance>) -> Result<SignRegularityReport> {
    classify_with_limit(a, tol, DEFAULT_ENUMERATION_LIMIT)
}

pub fn classify_with_limit(
    a: &DenseMatrix,
    tol: impl Into<MinorTolerance>,
    limit: usize,
) -> Result<SignRegularityReport> {
    let tol = tol.into();
    let kmax = a.rows().min(a.cols());
    let per_k = (1..=kmax)
        .map(|k| ssr_k_test_with_limit(a, k, tol, limit))
        .collect::<Result<Vec<_>>>()?;
    let ssr = per_k.iter().all(|v| v.is_ssr);
    let flags = ClassFlags {
        tp: per_k.iter().all(|v| v.epsilon_k == Some(1)),
        tn: per_k.iter().all(|v| v.nonnegative),
        ssr,
        ssr_odd: per_k.iter().filter(|v| v.k % 2 == 1).all(|v| v.is_ssr),
        ssr_even: per_k.iter().filter(|v| v.k % 2 == 0).all(|v| v.is_ssr),
    };
    Ok(SignRegularityReport {
        n: a.rows(),
        cols: a.cols(),
        per_k,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::minors::unsigned_adjugate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ssr3_example_orders() {
        let a = fixtures::ssr3_example();
        let v3 = ssr_k_test(&a, 3, None).unwrap();
        assert!(v3.is_ssr && v3.epsilon_k == Some(1) && v3.min_abs_minor > 0.0);
        let v1 = ssr_k_test(&a, 1, None).unwrap();
        assert!(!v1.is_ssr && v1.is_sr && v1.epsilon_k.is_none());
        let v2 = ssr_k_test(&a, 2, None).unwrap();
        assert!(!v2.is_ssr && !v2.is_sr);

        let report = classify(&a, None).unwrap();
        let ssr: Vec<bool> = report.per_k.iter().map(|v| v.is_ssr).collect();
        assert_eq!(ssr, vec![false, false, true, true]);
        // single order-4 minor is det(A) = 2
        assert_eq!(report.epsilon(4), Some(1));
        assert!((report.per_k[3].min_abs_minor - 2.0).abs() < 1e-12);
        assert!(!report.flags.tp && !report.flags.ssr && !report.flags.ssr_odd);
        assert_eq!(report.epsilon(0), Some(1));
    }

    #[test]
    fn identity_full_order() {
        for n in 1..=4 {
            let v = ssr_k_test(&DenseMatrix::identity(n), n, None).unwrap();
            assert!(v.is_ssr);
            assert_eq!(v.epsilon_k, Some(1));
            assert_eq!(v.min_abs_minor, 1.0);
        }
        let r = classify(&DenseMatrix::identity(3), None).unwrap();
        assert!(r.flags.tn && !r.flags.tp);
    }

    #[test]
    fn pascal_is_totally_positive() {
        let r = classify(&fixtures::pascal(5), None).unwrap();
        assert!(r.flags.tp && r.flags.ssr && r.flags.ssr_odd && r.flags.ssr_even && r.flags.tn);
    }

    #[test]
    fn zero_entry_breaks_tp() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [0.0, 3.0]]).unwrap();
        let r = classify(&a, None).unwrap();
        assert!(!r.flags.tp && !r.per_k[0].is_ssr);
    }

    #[test]
    fn margin_flag_marks_fragile_minors() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0 + 5e-13]]).unwrap();
        let v = ssr_k_test(&a, 2, None).unwrap();
        assert!(v.margin_flag && v.is_ssr);
        let v = ssr_k_test(&a, 2, Some(1e-13)).unwrap();
        assert!(v.margin_flag && v.is_ssr);
        let v1 = ssr_k_test(&fixtures::ssr3_example(), 1, None).unwrap();
        assert!(!v1.margin_flag);
    }

    #[test]
    fn class_implications_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=5 {
            for _ in 0..20 {
                let a = fixtures::random_matrix(n, &mut rng);
                let r = classify(&a, None).unwrap();
                for v in &r.per_k {
                    assert!(!v.is_ssr || v.is_sr);
                    assert_eq!(v.epsilon_k.is_some(), v.is_ssr);
                }
                if r.flags.tp {
                    assert!(r.flags.ssr);
                }
                if r.flags.ssr {
                    assert!(r.flags.ssr_odd && r.flags.ssr_even);
                }
            }
        }
    }

    #[test]
    fn positive_scaling_preserves_classification() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = fixtures::random_tp(4, &mut rng);
        let base = classify(&a, None).unwrap();
        let scaled = classify(&a.scale(3.7).unwrap(), None).unwrap();
        assert_eq!(base.flags, scaled.flags);
        for (x, y) in base.per_k.iter().zip(&scaled.per_k) {
            assert_eq!((x.is_ssr, x.epsilon_k), (y.is_ssr, y.epsilon_k));
        }
    }

    #[test]
    fn unsigned_adjugate_is_ssr_complementary_order() {
        let a = fixtures::ssr3_example();
        let adj = unsigned_adjugate(&a).unwrap();
        assert!(ssr_k_test(&adj, 1, None).unwrap().is_ssr);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 3..=5 {
            let tp = fixtures::random_tp(n, &mut rng);
            let adj = unsigned_adjugate(&tp).unwrap();
            for k in 1..n {
                assert!(ssr_k_test(&adj, n - k, None).unwrap().is_ssr, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn products_of_tp_factors_keep_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let a = fixtures::random_tp(4, &mut rng);
            let b = fixtures::random_tp(4, &mut rng);
            let ab = a.matmul(&b).unwrap();
            let (ra, rb, rab) = (
                classify(&a, None).unwrap(),
                classify(&b, None).unwrap(),
                classify(&ab, None).unwrap(),
            );
            for k in 1..=4 {
                let expect = ra.epsilon(k).unwrap() * rb.epsilon(k).unwrap();
                assert_eq!(rab.epsilon(k), Some(expect));
            }
        }
        // SSR_3-only example times itself: still SSR_3 with sign +1
        let e = fixtures::ssr3_example();
        let e2 = e.matmul(&e).unwrap();
        assert_eq!(ssr_k_test(&e2, 3, None).unwrap().epsilon_k, Some(1));
    }

    #[test]
    fn report_serializes_with_mirrored_names() {
        let r = classify(&fixtures::ssr3_example(), None).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["per_k"][2]["is_SSR_k"], true);
        assert_eq!(json["per_k"][2]["epsilon_k"], 1);
        assert!(json["per_k"][0]["epsilon_k"].is_null());
        assert_eq!(json["flags"]["TP"], false);
    }
}
