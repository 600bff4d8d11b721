use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;

/// `|Im λ| <= REAL_TOL * (1 + |λ|)` makes `λ` real.
pub const REAL_TOL: f64 = 1e-9;
/// Two eigenvalues pair as conjugates when `|λ - conj(μ)| <= PAIR_TOL * (1 + |λ|)`.
pub const PAIR_TOL: f64 = 1e-8;
/// Relative modulus difference below which eigenvalues are ordered by real part.
pub const MODULUS_TIE_TOL: f64 = 1e-10;
/// Eigenvector matrices with a larger condition number are flagged unreliable.
pub const UNRELIABLE_CONDITION: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    Real,
    /// First member of a conjugate pair (positive imaginary part).
    PairFirst,
    PairSecond,
}

/// Eigenvalues ordered by non-increasing modulus with conjugate pairs adjacent,
/// their eigenvectors and the associated real basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<Complex64>,
    /// `eigenvectors[i]` belongs to `eigenvalues[i]`; max-modulus entry is 1.
    pub eigenvectors: Vec<Vec<Complex64>>,
    pub kinds: Vec<EigenKind>,
    /// `u^i`: `v^i` for real eigenvalues, `Re v^i` and `Im v^i` for a pair.
    pub real_basis: Vec<Vec<f64>>,
    /// `||A v - λ v||_inf` per eigenvector.
    pub residuals: Vec<f64>,
    /// 2-norm condition number of the eigenvector matrix.
    pub eigvec_condition: f64,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.kinds[i] == EigenKind::Real
    }

    /// Eigenvector matrix is too ill-conditioned for eigenvector claims.
    pub fn unreliable(&self) -> bool {
        !(self.eigvec_condition <= UNRELIABLE_CONDITION)
    }

    /// Whether a contiguous 0-based range `lo..=hi` contains whole pairs only.
    pub fn closed_range(&self, lo: usize, hi: usize) -> bool {
        self.kinds[lo] != EigenKind::PairSecond && self.kinds[hi] != EigenKind::PairFirst
    }

    /// `λ_1 λ_2 ... λ_k`.
    pub fn leading_product(&self, k: usize) -> Complex64 {
        self.eigenvalues[..k].iter().product()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.norm()).collect()
    }

    /// `V` as an nalgebra matrix with the eigenvectors as columns.
    pub fn eigenvector_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |r, c| self.eigenvectors[c][r])
    }
}

/// Default residual tolerance `1e-8 * max(1, ||A||_inf)`.
pub fn default_residual_tol(a: &DenseMatrix) -> f64 {
    1e-8 * a.norm_inf().max(1.0)
}

/// Eigen-decomposition of a nonsingular square matrix.
///
/// Eigenvalues come from a real Schur form. Each eigenvector is the right
/// singular vector of `A - λI` for its smallest singular value (the `m`
/// smallest for an eigenvalue repeated `m` times); the conjugate member of a
/// pair receives the conjugate vector.
pub fn eigen(a: &DenseMatrix, residual_tol: Option<f64>) -> Result<SpectralData> {
    if !a.is_square() {
        return invalid(format!("eigen needs a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    a.nonsingular_det()?;
    let n = a.rows();
    let residual_tol = residual_tol.unwrap_or_else(|| default_residual_tol(a));
    let m = a.to_nalgebra();
    let raw = Schur::try_new(m.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?
        .complex_eigenvalues();
    let (eigenvalues, kinds) = order_eigenvalues(raw.iter().copied().collect())?;

    let mc = m.map(|x| Complex64::new(x, 0.0));
    let mut eigenvectors: Vec<Vec<Complex64>> = vec![Vec::new(); n];
    let mut i = 0;
    while i < n {
        if kinds[i] == EigenKind::PairSecond {
            eigenvectors[i] = eigenvectors[i - 1].iter().map(|z| z.conj()).collect();
            i += 1;
            continue;
        }
        // indices (of the same kind) carrying the same eigenvalue
        let lambda = eigenvalues[i];
        let cluster: Vec<usize> = (i..n)
            .filter(|&j| kinds[j] == kinds[i] && close(eigenvalues[j], lambda))
            .collect();
        let vecs = null_vectors(&mc, lambda, cluster.len(), residual_tol);
        for (slot, v) in cluster.iter().zip(vecs) {
            eigenvectors[*slot] = v;
        }
        // skip past slots already filled
        while i < n && !eigenvectors[i].is_empty() {
            i += 1;
        }
    }

    let residuals: Vec<f64> = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(l, v)| residual(&mc, *l, v))
        .collect();
    if let Some((idx, r)) = residuals
        .iter()
        .enumerate()
        .find(|(_, r)| !(**r <= residual_tol))
    {
        return Err(Error::NumericalFailure(format!(
            "eigenvector {} has residual {r:e} above {residual_tol:e}",
            idx + 1
        )));
    }

    let real_basis = real_basis_of(&eigenvectors, &kinds);
    let mut data = SpectralData {
        eigenvalues,
        eigenvectors,
        kinds,
        real_basis,
        residuals,
        eigvec_condition: 0.0,
    };
    data.eigvec_condition = condition_number(&data.eigenvector_matrix());
    Ok(data)
}

/// `u^1, ..., u^n` built by scanning the eigenvectors: a real `v^i` gives
/// `u^i = v^i`, a pair `v^i, v^{i+1}` gives `u^i = Re v^i`, `u^{i+1} = Im v^i`.
pub fn real_basis(spec: &SpectralData) -> Vec<Vec<f64>> {
    real_basis_of(&spec.eigenvectors, &spec.kinds)
}

fn real_basis_of(vectors: &[Vec<Complex64>], kinds: &[EigenKind]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .enumerate()
        .map(|(i, v)| match kinds[i] {
            EigenKind::Real | EigenKind::PairFirst => v.iter().map(|z| z.re).collect(),
            EigenKind::PairSecond => vectors[i - 1].iter().map(|z| z.im).collect(),
        })
        .collect()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= PAIR_TOL * (1.0 + a.norm())
}

/// Cleans, pairs and orders raw eigenvalues.
pub(crate) fn order_eigenvalues(raw: Vec<Complex64>) -> Result<(Vec<Complex64>, Vec<EigenKind>)> {
    enum Unit {
        Real(f64),
        Pair(Complex64),
    }
    let is_real = |l: &Complex64| l.im.abs() <= REAL_TOL * (1.0 + l.norm());
    let mut units = Vec::new();
    let mut lower: Vec<Complex64> = Vec::new();
    let mut upper: Vec<Complex64> = Vec::new();
    for l in raw {
        if is_real(&l) {
            units.push(Unit::Real(l.re));
        } else if l.im > 0.0 {
            upper.push(l);
        } else {
            lower.push(l);
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::NumericalFailure(
            "complex eigenvalues do not come in conjugate pairs".into(),
        ));
    }
    for l in upper {
        let (pos, dist) = lower
            .iter()
            .enumerate()
            .map(|(p, m)| (p, (l - m.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("equal counts");
        if dist > PAIR_TOL * (1.0 + l.norm()) {
            return Err(Error::NumericalFailure(format!(
                "no conjugate partner for eigenvalue {l}"
            )));
        }
        let partner = lower.swap_remove(pos);
        units.push(Unit::Pair((l + partner.conj()) * 0.5));
    }

    let key = |u: &Unit| match u {
        Unit::Real(x) => Complex64::new(*x, 0.0),
        Unit::Pair(z) => *z,
    };
    units.sort_by(|a, b| key(b).norm().total_cmp(&key(a).norm()));
    // within runs of (numerically) equal modulus: real part, then imaginary part, descending
    let mut start = 0;
    while start < units.len() {
        let mut end = start + 1;
        while end < units.len() {
            let (p, q) = (key(&units[end - 1]).norm(), key(&units[end]).norm());
            if p - q > MODULUS_TIE_TOL * p.max(f64::MIN_POSITIVE) {
                break;
            }
            end += 1;
        }
        units[start..end].sort_by(|a, b| {
            let (a, b) = (key(a), key(b));
            b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im))
        });
        start = end;
    }

    let mut values = Vec::new();
    let mut kinds = Vec::new();
    for u in units {
        match u {
            Unit::Real(x) => {
                values.push(Complex64::new(x, 0.0));
                kinds.push(EigenKind::Real);
            }
            Unit::Pair(z) => {
                values.push(z);
                values.push(z.conj());
                kinds.push(EigenKind::PairFirst);
                kinds.push(EigenKind::PairSecond);
            }
        }
    }
    Ok((values, kinds))
}

/// The `count` right singular vectors of `A - λI` with the smallest singular
/// values, normalized. Vectors whose residual exceeds `tol` (a defective
/// eigenvalue) are replaced by the best one, which leaves the eigenvector
/// matrix singular and the decomposition flagged unreliable.
fn null_vectors(
    a: &DMatrix<Complex64>,
    lambda: Complex64,
    count: usize,
    tol: f64,
) -> Vec<Vec<Complex64>> {
    let n = a.nrows();
    let columns: Vec<Vec<Complex64>> = if lambda.im == 0.0 {
        let shifted = DMatrix::from_fn(n, n, |r, c| {
            a[(r, c)].re - if r == c { lambda.re } else { 0.0 }
        });
        let v_t = SVD::new(shifted, false, true).v_t.expect("requested V^T");
        (0..count)
            .map(|j| (0..n).map(|c| Complex64::new(v_t[(n - 1 - j, c)], 0.0)).collect())
            .collect()
    } else {
        let shifted = a - DMatrix::<Complex64>::identity(n, n) * lambda;
        let v_t = SVD::new(shifted, false, true).v_t.expect("requested V^T");
        // rows of V^H are conjugated right singular vectors
        (0..count)
            .map(|j| (0..n).map(|c| v_t[(n - 1 - j, c)].conj()).collect())
            .collect()
    };
    let mut out: Vec<Vec<Complex64>> = columns.into_iter().map(normalize).collect();
    let best = out[0].clone();
    for v in out.iter_mut().skip(1) {
        if !(residual(a, lambda, v) <= tol) {
            *v = best.clone();
        }
    }
    out
}

/// Divides by the first entry whose modulus is within `1e-9` of the largest.
pub(crate) fn normalize(v: Vec<Complex64>) -> Vec<Complex64> {
    let max = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if max == 0.0 {
        return v;
    }
    let pivot = *v
        .iter()
        .find(|z| z.norm() >= (1.0 - 1e-9) * max)
        .expect("max exists");
    v.into_iter().map(|z| z / pivot).collect()
}

fn residual(a: &DMatrix<Complex64>, lambda: Complex64, v: &[Complex64]) -> f64 {
    let n = a.nrows();
    (0..n)
        .map(|r| {
            let av: Complex64 = (0..n).map(|c| a[(r, c)] * v[c]).sum();
            (av - lambda * v[r]).norm()
        })
        .fold(0.0, f64::max)
}

pub(crate) fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let s = SVD::new(m.clone(), false, false).singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let min = s.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Numerical rank of the real vectors (as columns), relative tolerance `1e-10`.
pub fn rank(vectors: &[Vec<f64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let n = vectors[0].len();
    let m = DMatrix::from_fn(n, vectors.len(), |r, c| vectors[c][r]);
    let s = SVD::new(m, false, false).singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    s.iter().filter(|&&x| x > 1e-10 * max * n.max(vectors.len()) as f64).count()
}
