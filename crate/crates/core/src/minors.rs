//! Minors, multiplicative compounds, the unsigned adjugate and Jacobi's
//! identity for the minors of an inverse.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::{binomial, combinations, small_det, DenseMatrix, IndexSet};

/// Largest dimension for which all `C(n, k)` subsets are enumerated by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// Determinant of the submatrix `A(rows | cols)`.
pub fn minor(a: &DenseMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<f64> {
    if rows.len() != cols.len() {
        return invalid(format!(
            "row set {rows} and column set {cols} have different sizes"
        ));
    }
    if rows.is_empty() {
        return invalid("minor order must be at least 1");
    }
    if rows.max() > a.rows() || cols.max() > a.cols() {
        return invalid(format!(
            "index set {rows}|{cols} out of range for a {}x{} matrix",
            a.rows(),
            a.cols()
        ));
    }
    Ok(minor_unchecked(a, &rows.zero_based(), &cols.zero_based()))
}

pub(crate) fn minor_unchecked(a: &DenseMatrix, rows0: &[usize], cols0: &[usize]) -> f64 {
    small_det(&a.select(rows0, cols0), rows0.len())
}

/// All order-`k` minors of a matrix, lexicographic in `(rows, cols)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorTable {
    pub order: usize,
    pub pairs: Vec<(IndexSet, IndexSet)>,
    pub values: Vec<f64>,
}

impl MinorTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndexSet, &IndexSet, f64)> {
        self.pairs.iter().zip(&self.values).map(|((r, c), v)| (r, c, *v))
    }

    pub fn min_abs(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
    }
}

pub(crate) fn check_enumeration_limit(a: &DenseMatrix, limit: usize) -> Result<()> {
    let size = a.rows().max(a.cols());
    if size > limit {
        return Err(Error::SizeLimit { size, limit });
    }
    Ok(())
}

pub fn all_minors(a: &DenseMatrix, k: usize) -> Result<MinorTable> {
    all_minors_with_limit(a, k, DEFAULT_ENUMERATION_LIMIT)
}

pub fn all_minors_with_limit(a: &DenseMatrix, k: usize, limit: usize) -> Result<MinorTable> {
    if k == 0 || k > a.rows().min(a.cols()) {
        return invalid(format!(
            "minor order {k} outside 1..={} for a {}x{} matrix",
            a.rows().min(a.cols()),
            a.rows(),
            a.cols()
        ));
    }
    check_enumeration_limit(a, limit)?;
    let row_sets: Vec<IndexSet> = combinations(a.rows(), k).collect();
    let col_sets: Vec<IndexSet> = combinations(a.cols(), k).collect();
    let col_zero: Vec<Vec<usize>> = col_sets.iter().map(|c| c.zero_based()).collect();
    let mut pairs = Vec::with_capacity(row_sets.len() * col_sets.len());
    let mut values = Vec::with_capacity(pairs.capacity());
    for r in &row_sets {
        let r0 = r.zero_based();
        for (c, c0) in col_sets.iter().zip(&col_zero) {
            values.push(minor_unchecked(a, &r0, c0));
            pairs.push((r.clone(), c.clone()));
        }
    }
    Ok(MinorTable { order: k, pairs, values })
}

/// The `k`-th multiplicative compound `A^(k)`: the `C(n,k) x C(n,k)` matrix of
/// order-`k` minors in lexicographic order.
pub fn multiplicative_compound(a: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    if !a.is_square() {
        return invalid(format!(
            "compound needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        ));
    }
    let table = all_minors(a, k)?;
    let r = binomial(a.rows(), k);
    DenseMatrix::new(r, r, table.values)
}

/// `D adj(A) D^-1` with `D = diag(1, -1, 1, ...)`.
///
/// Entry `(i, j)` equals the minor of `A` with row `j` and column `i`
/// removed; the alternating signs of the adjugate cancel against `D`.
pub fn unsigned_adjugate(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return invalid(format!(
            "adjugate needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        ));
    }
    let n = a.rows();
    if n == 1 {
        return Ok(DenseMatrix::identity(1));
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            entries[i * n + j] = minor_unchecked(a, &rows, &cols);
        }
    }
    DenseMatrix::new(n, n, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub order: usize,
    pub pairs_checked: usize,
    pub det: f64,
    /// `max |B(a|b) - (-1)^s A(b'|a') / det A|` over all pairs.
    pub max_abs_discrepancy: f64,
    /// Same difference divided by `1 + |(-1)^s A(b'|a') / det A|`.
    pub max_scaled_discrepancy: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks `B(a|b) = (-1)^s A(b'|a') / det(A)` for `B = A^-1`, every pair of
/// order-`p` index sets, `s` the sum of all indices and `'` the complement.
///
/// The verdict uses the scaled discrepancy so that large minors of an
/// ill-conditioned inverse are judged relative to their size.
pub fn jacobi_identity_check(a: &DenseMatrix, p: usize, tol: f64) -> Result<JacobiReport> {
    if !a.is_square() {
        return invalid("Jacobi's identity needs a square matrix");
    }
    let n = a.rows();
    if p == 0 || p > n {
        return invalid(format!("order {p} outside 1..={n}"));
    }
    check_enumeration_limit(a, DEFAULT_ENUMERATION_LIMIT)?;
    let det = a.nonsingular_det()?;
    let inv = a.inverse()?;
    let mut max_abs: f64 = 0.0;
    let mut max_scaled: f64 = 0.0;
    let mut count = 0;
    for alpha in combinations(n, p) {
        let alpha_c = alpha.complement(n);
        for beta in combinations(n, p) {
            let beta_c = beta.complement(n);
            let lhs = minor_unchecked(&inv, &alpha.zero_based(), &beta.zero_based());
            let comp = if p == n {
                1.0
            } else {
                minor_unchecked(a, &beta_c.zero_based(), &alpha_c.zero_based())
            };
            let s = alpha.sum() + beta.sum();
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            let rhs = sign * comp / det;
            let diff = (lhs - rhs).abs();
            max_abs = max_abs.max(diff);
            max_scaled = max_scaled.max(diff / (1.0 + rhs.abs()));
            count += 1;
        }
    }
    Ok(JacobiReport {
        order: p,
        pairs_checked: count,
        det,
        max_abs_discrepancy: max_abs,
        max_scaled_discrepancy: max_scaled,
        tol,
        pass: max_scaled <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cofactor expansion along the first row.
    fn laplace_det(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let sub: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][j] * laplace_det(&sub)
            })
            .sum()
    }

    fn laplace_minor(a: &DenseMatrix, rows: &[usize], cols: &[usize]) -> f64 {
        let sub: Vec<Vec<f64>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| a.get(r - 1, c - 1)).collect())
            .collect();
        laplace_det(&sub)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DenseMatrix {
        let e: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        DenseMatrix::new(n, n, e).unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn minor_examples() {
        let a = fixtures::ssr3_example();
        let full = minor(&a, &set(&[1, 2, 3]), &set(&[1, 2, 3])).unwrap();
        assert!(full > 0.0);
        let i3 = DenseMatrix::identity(3);
        assert_eq!(minor(&i3, &set(&[1, 2]), &set(&[1, 2])).unwrap(), 1.0);
        let m = minor(&a, &set(&[1, 4]), &set(&[1, 2])).unwrap();
        assert_eq!(m, laplace_minor(&a, &[1, 4], &[1, 2]));
        assert_eq!(m, -2.0);
    }

    #[test]
    fn minor_argument_errors() {
        let a = DenseMatrix::identity(3);
        assert!(matches!(
            minor(&a, &set(&[1, 2]), &set(&[1])),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            minor(&a, &set(&[1, 4]), &set(&[1, 2])),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(all_minors(&a, 4), Err(Error::InvalidArgument(_))));
        assert!(matches!(all_minors(&a, 0), Err(Error::InvalidArgument(_))));
        let wide = DenseMatrix::new(2, 3, vec![1.0; 6]).unwrap();
        assert!(multiplicative_compound(&wide, 1).is_err());
        assert!(unsigned_adjugate(&wide).is_err());
    }

    #[test]
    fn size_guard() {
        let big = DenseMatrix::identity(21);
        assert!(matches!(all_minors(&big, 1), Err(Error::SizeLimit { size: 21, limit: 20 })));
        assert!(all_minors_with_limit(&big, 1, 25).is_ok());
    }

    #[test]
    fn all_minors_tables() {
        let a = fixtures::ssr3_example();
        let t3 = all_minors(&a, 3).unwrap();
        assert_eq!(t3.len(), 16);
        assert!(t3.values.iter().all(|v| *v > 0.0));
        let t1 = all_minors(&a, 1).unwrap();
        assert_eq!(t1.values, a.entries().to_vec());
        assert_eq!(t1.values.iter().filter(|v| **v == 0.0).count(), 8);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = random_matrix(&mut rng, 4);
        let t2 = all_minors(&r, 2).unwrap();
        for (rows, cols, v) in t2.iter() {
            assert_eq!(v, minor(&r, rows, cols).unwrap());
        }
        assert_eq!(t2.pairs[0], (set(&[1, 2]), set(&[1, 2])));
        assert_eq!(t2.pairs[1], (set(&[1, 2]), set(&[1, 3])));
    }

    #[test]
    fn all_minors_match_laplace_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let a = random_matrix(&mut rng, n);
            for k in 1..=n {
                for (rows, cols, v) in all_minors(&a, k).unwrap().iter() {
                    let oracle = laplace_minor(&a, rows.indices(), cols.indices());
                    assert!((v - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn compound_of_identity_and_example() {
        for n in 1..=5 {
            for k in 1..=n {
                let c = multiplicative_compound(&DenseMatrix::identity(n), k).unwrap();
                assert_eq!(c, DenseMatrix::identity(binomial(n, k)));
            }
        }
        let c3 = multiplicative_compound(&fixtures::ssr3_example(), 3).unwrap();
        assert_eq!((c3.rows(), c3.cols()), (4, 4));
        assert!(c3.entries().iter().all(|v| *v > 0.0));
    }

    /// Cauchy-Binet written out as a sum over intermediate index sets.
    #[test]
    fn compound_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 4);
            let b = random_matrix(&mut rng, 4);
            let ab = a.matmul(&b).unwrap();
            for k in 1..=4 {
                let lhs = multiplicative_compound(&ab, k).unwrap();
                for (i, alpha) in combinations(4, k).enumerate() {
                    for (j, beta) in combinations(4, k).enumerate() {
                        let cb: f64 = combinations(4, k)
                            .map(|g| {
                                laplace_minor(&a, alpha.indices(), g.indices())
                                    * laplace_minor(&b, g.indices(), beta.indices())
                            })
                            .sum();
                        let v = lhs.get(i, j);
                        assert!((v - cb).abs() <= 1e-10 * (1.0 + cb.abs()));
                    }
                }
            }
        }
    }

    #[test]
    fn unsigned_adjugate_examples() {
        for n in 1..=4 {
            assert_eq!(unsigned_adjugate(&DenseMatrix::identity(n)).unwrap(), DenseMatrix::identity(n));
        }
        let adj = unsigned_adjugate(&fixtures::ssr3_example()).unwrap();
        let positive = adj.entries().iter().all(|v| *v > 0.0);
        let negative = adj.entries().iter().all(|v| *v < 0.0);
        assert!(positive || negative);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 4);
        let det = a.det().unwrap();
        let d = DenseMatrix::alternating_signs(4);
        let prod = unsigned_adjugate(&a)
            .unwrap()
            .matmul(&d)
            .unwrap()
            .matmul(&a)
            .unwrap()
            .matmul(&d)
            .unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expect = if r == c { det } else { 0.0 };
                assert!((prod.get(r, c) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        let r = jacobi_identity_check(&DenseMatrix::identity(3), 2, 1e-12).unwrap();
        assert_eq!(r.max_abs_discrepancy, 0.0);
        assert!(r.pass);
        let r = jacobi_identity_check(&fixtures::ssr3_example(), 2, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.pairs_checked, 36);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 5);
        let r = jacobi_identity_check(&a, 3, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let full = jacobi_identity_check(&a, 5, 1e-8).unwrap();
        assert!(full.pass);
    }

    #[test]
    fn jacobi_rejects_singular() {
        let s = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(jacobi_identity_check(&s, 1, 1e-9), Err(Error::SingularMatrix { .. })));
    }
}
