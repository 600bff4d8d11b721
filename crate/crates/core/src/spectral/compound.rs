use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde_json::json;

use super::eigen::{eigen, order_eigenvalues, SpectralData};
use super::verify::{require_square_nonsingular, VerifyOptions};
use crate::error::{Error, Result};
use crate::matrix::{combinations, DenseMatrix};
use crate::minors::{multiplicative_compound, unsigned_adjugate};
use crate::report::{Report, Status};
use crate::sign_regularity::ssr_k_test;

fn complex_eigenvalues(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = m.rows();
    let schur = Schur::try_new(m.to_nalgebra(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::NumericalFailure("Schur iteration did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Minors `V(α | 1..k)` of the eigenvector matrix, `α` in lexicographic order.
pub fn eigenvector_minors(spec: &SpectralData, k: usize) -> Vec<Complex64> {
    let n = spec.n();
    combinations(n, k)
        .map(|rows| {
            let sub = DMatrix::from_fn(k, k, |r, c| spec.eigenvectors[c][rows.indices()[r] - 1]);
            sub.determinant()
        })
        .collect()
}

/// Minors `U(α | 1..k)` of the real basis.
pub fn real_basis_minors(spec: &SpectralData, k: usize) -> Vec<f64> {
    let n = spec.n();
    combinations(n, k)
        .map(|rows| {
            let sub = DMatrix::from_fn(k, k, |r, c| spec.real_basis[c][rows.indices()[r] - 1]);
            sub.determinant()
        })
        .collect()
}

/// Finds `m` in `0..4` with `q = j^m w`, `w` real and entrywise positive.
/// Returns `(m, w)`.
pub fn quarter_turns(q: &[Complex64], tol: f64) -> Option<(u8, Vec<f64>)> {
    let scale = q.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if scale == 0.0 {
        return None;
    }
    let mut rot = Complex64::new(1.0, 0.0);
    let minus_j = Complex64::new(0.0, -1.0);
    for m in 0..4u8 {
        let w: Vec<Complex64> = q.iter().map(|z| z * rot).collect();
        if w.iter().all(|z| z.re > tol * scale && z.im.abs() <= tol * scale) {
            return Some((m, w.iter().map(|z| z.re).collect()));
        }
        rot *= minus_j;
    }
    None
}

fn power_iteration(m: &DenseMatrix, iters: usize) -> Vec<f64> {
    let n = m.rows();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..iters {
        let y = m.mul_vec(&x).expect("square");
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = y.into_iter().map(|v| v / norm).collect();
    }
    x
}

fn unit_sum(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// Checks that the minors `V(α|1..k)` form, up to a power of `j`, the
/// entrywise-positive Perron vector of `eps_k A^(k)`, whose Perron root is
/// `eps_k λ_1 ... λ_k`.
pub fn verify_compound_perron(a: &DenseMatrix, k: usize, opts: &VerifyOptions) -> Result<Report> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    if k == 0 || k > n {
        return Err(Error::HypothesisNotMet(format!("order k = {k} must lie in 1..{n}")));
    }
    let eps = ssr_k_test(a, k, opts.minor_tol)?
        .epsilon_k
        .ok_or_else(|| Error::HypothesisNotMet(format!("matrix is not SSR_{k}")))?;
    let spec = eigen(a, opts.residual_tol)?;
    let mut report = Report::new(format!("compound Perron vector, k = {k}"));

    let compound = multiplicative_compound(a, k)?.scale(f64::from(eps))?;
    let zeta = spec.leading_product(k) * f64::from(eps);
    let mut values = complex_eigenvalues(&compound)?;
    values.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let root = values[0];
    let root_ok = root.im.abs() <= opts.tol * root.norm()
        && root.re > 0.0
        && (root - zeta).norm() <= 1e-7 * root.norm();
    report.check(
        "perron_root",
        "eps_k A^(k) has a positive Perron root equal to eps_k * lambda_1 * ... * lambda_k",
        root_ok,
        json!({"perron_root": root, "leading_product": zeta}),
    );

    let q = eigenvector_minors(&spec, k);
    let u_minors = real_basis_minors(&spec, k);
    let found = quarter_turns(&q, 1e-9);
    let status = match (&found, spec.unreliable()) {
        (_, true) => Status::Unreliable,
        (Some(_), false) => Status::Pass,
        (None, false) => Status::Fail,
    };
    let (turns, w) = found.clone().unzip();
    report.push(
        "quarter_turns",
        "q = j^m w for an integer m and an entrywise positive real vector w",
        status,
        json!({"q": q, "quarter_turns": turns, "w": w, "real_basis_minors": u_minors}),
    );

    if let Some((_, w)) = found {
        let cw = compound.mul_vec(&w)?;
        let rho = root.re;
        let resid = cw
            .iter()
            .zip(&w)
            .map(|(x, y)| (x - rho * y).abs())
            .fold(0.0, f64::max)
            / w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let perron = unit_sum(&power_iteration(&compound, 2000));
        let wn = unit_sum(&w);
        let diff = perron
            .iter()
            .zip(&wn)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let pass = resid <= 1e-7 * rho.abs().max(1.0) && diff <= 1e-6;
        let status = if spec.unreliable() { Status::Unreliable } else { Status::from_bool(pass) };
        report.push(
            "perron_vector",
            "w is the Perron eigenvector of eps_k A^(k)",
            status,
            json!({"residual": resid, "power_iteration": perron, "normalized_w": wn, "max_difference": diff}),
        );
    } else {
        report.push(
            "perron_vector",
            "w is the Perron eigenvector of eps_k A^(k)",
            Status::Skipped,
            json!({}),
        );
    }
    Ok(report)
}

/// Largest deviation between the eigenvalues of `A^(k)` and the products of
/// `k` eigenvalues of `A`, relative to the spectral radius of `A^(k)`.
///
/// Each product is matched greedily to the nearest unused compound eigenvalue,
/// processing products in order of decreasing modulus.
pub fn compound_spectrum_error(a: &DenseMatrix, k: usize) -> Result<f64> {
    let n = a.rows();
    let lambdas = complex_eigenvalues(a)?;
    let compound = multiplicative_compound(a, k)?;
    let mut zetas = complex_eigenvalues(&compound)?;
    let mut products: Vec<Complex64> = combinations(n, k)
        .map(|s| s.indices().iter().map(|&i| lambdas[i - 1]).product())
        .collect();
    products.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    let radius = zetas.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for p in products {
        let (pos, d) = zetas
            .iter()
            .enumerate()
            .map(|(i, z)| (i, (z - p).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("same count");
        zetas.swap_remove(pos);
        worst = worst.max(d / radius);
    }
    Ok(worst)
}

/// Residuals `||B z - η z||_inf / ||B||_inf` for the unsigned adjugate `B`
/// with `η_i = det(A) / λ_{n-i+1}` and `z^i = D v^{n-i+1}`, `D` the
/// alternating-sign diagonal. Also returns the eigenvalue ordering error:
/// the `η_i` must be ordered by non-increasing modulus.
pub fn adjugate_spectrum_residuals(a: &DenseMatrix) -> Result<(Vec<f64>, bool)> {
    let det = require_square_nonsingular(a)?;
    let spec = eigen(a, None)?;
    let b = unsigned_adjugate(a)?;
    let n = a.rows();
    let norm = b.norm_inf().max(f64::MIN_POSITIVE);
    let mut residuals = Vec::with_capacity(n);
    let mut etas = Vec::with_capacity(n);
    for i in 0..n {
        let src = n - 1 - i;
        let eta = Complex64::new(det, 0.0) / spec.eigenvalues[src];
        etas.push(eta);
        let z: Vec<Complex64> = spec.eigenvectors[src]
            .iter()
            .enumerate()
            .map(|(r, v)| if r % 2 == 0 { *v } else { -v })
            .collect();
        let r = (0..n)
            .map(|row| {
                let bz: Complex64 = (0..n).map(|c| z[c] * b.get(row, c)).sum();
                (bz - eta * z[row]).norm()
            })
            .fold(0.0, f64::max);
        residuals.push(r / norm);
    }
    let ordered = etas
        .windows(2)
        .all(|w| w[0].norm() >= w[1].norm() * (1.0 - 1e-10));
    // the reordered values must be what an eigen-decomposition of B yields
    let (direct, _) = order_eigenvalues(complex_eigenvalues(&b)?)?;
    let same = direct
        .iter()
        .zip(&etas)
        .all(|(x, y)| (x - y).norm() <= 1e-7 * x.norm().max(1.0));
    Ok((residuals, ordered && same))
}
