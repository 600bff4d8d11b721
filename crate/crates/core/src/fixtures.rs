//! Matrices with known sign-regularity used by tests, examples and the CLI.

use rand::Rng;

use crate::matrix::DenseMatrix;
use crate::sign_regularity::classify;

/// The 4x4 matrix
///
/// ```text
/// 1 2 0 0
/// 0 1 1 0
/// 0 0 2 1
/// 1 0 0 2
/// ```
///
/// All order-3 minors are positive while orders 1 and 2 are not
/// sign-regular. Eigenvalues are about 2.7900, 1.5 ± 1.0790j and 0.2100.
pub fn ssr3_example() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        [1.0, 2.0, 0.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 2.0, 1.0],
        [1.0, 0.0, 0.0, 2.0],
    ])
    .expect("finite fixture")
}

/// Symmetric Pascal matrix `P_ij = C(i + j - 2, i - 1)`, totally positive.
pub fn pascal(n: usize) -> DenseMatrix {
    let mut p = vec![1.0; n * n];
    for i in 1..n {
        for j in 1..n {
            p[i * n + j] = p[(i - 1) * n + j] + p[i * n + j - 1];
        }
    }
    DenseMatrix::new(n, n, p).expect("finite fixture")
}

/// `c * (J + I)` with `J` the all-ones matrix.
pub fn ones_plus_identity(n: usize, c: f64) -> DenseMatrix {
    let e = (0..n * n)
        .map(|i| if i / n == i % n { 2.0 * c } else { c })
        .collect();
    DenseMatrix::new(n, n, e).expect("finite fixture")
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let e = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::new(n, n, e).expect("finite entries")
}

/// Entrywise positive matrix with entries in `[0.1, 1)`.
pub fn random_positive(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let e = (0..n * n).map(|_| rng.random_range(0.1..1.0)).collect();
    DenseMatrix::new(n, n, e).expect("finite entries")
}

fn bidiagonal(n: usize, lower: bool, rng: &mut impl Rng) -> DenseMatrix {
    let mut e = vec![0.0; n * n];
    for i in 0..n {
        e[i * n + i] = rng.random_range(0.5..1.5);
        if i + 1 < n {
            let off = rng.random_range(0.3..1.5);
            if lower {
                e[(i + 1) * n + i] = off;
            } else {
                e[i * n + i + 1] = off;
            }
        }
    }
    DenseMatrix::new(n, n, e).expect("finite entries")
}

/// Totally positive matrix built as `L * U`, each triangle a product of
/// `n - 1` bidiagonal factors with positive parameters.
///
/// Every draw is certified by enumerating all minors; draws that fail the
/// check are discarded.
pub fn random_tp(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    for _ in 0..1000 {
        let mut a = DenseMatrix::identity(n);
        for _ in 0..n.saturating_sub(1) {
            a = a.matmul(&bidiagonal(n, true, rng)).expect("square");
        }
        for _ in 0..n.saturating_sub(1) {
            a = a.matmul(&bidiagonal(n, false, rng)).expect("square");
        }
        if n == 1 {
            a = a.scale(rng.random_range(0.5..2.0)).expect("finite");
        }
        if classify(&a, None).is_ok_and(|r| r.flags.tp) {
            return a;
        }
    }
    panic!("failed to generate a certified TP matrix of order {n}");
}

/// Whether every minor of every order is positive, checked by enumeration.
pub fn is_certified_tp(a: &DenseMatrix) -> bool {
    classify(a, None).is_ok_and(|r| r.flags.tp)
}
