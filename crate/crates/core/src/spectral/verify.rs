use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::eigen::{eigen, rank, EigenKind, SpectralData};
use super::matching::{combine, random_matching};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::report::{Report, Status};
use crate::sign_regularity::{classify, ssr_k_test, MinorTolerance, SignRegularityReport};
use crate::sign_variation::{SignVector, DEFAULT_ZERO_TOL};

/// Knobs shared by the spectral verifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Random matchings drawn per sampled range.
    pub samples: usize,
    /// Relative tolerance for "real", "positive" and strict modulus gaps.
    pub tol: f64,
    /// Zero threshold for sign counts, relative to the vector's max-norm.
    pub zero_tol: f64,
    pub seed: u64,
    pub residual_tol: Option<f64>,
    pub minor_tol: MinorTolerance,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 2000,
            tol: 1e-8,
            zero_tol: DEFAULT_ZERO_TOL,
            seed: 0,
            residual_tol: None,
            minor_tol: MinorTolerance::default(),
        }
    }
}

fn hypothesis(msg: impl Into<String>) -> Error {
    Error::HypothesisNotMet(msg.into())
}

pub(crate) fn require_square_nonsingular(a: &DenseMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(hypothesis(format!("matrix must be square, got {}x{}", a.rows(), a.cols())));
    }
    a.nonsingular_det().map_err(|e| match e {
        Error::SingularMatrix { det, threshold } => {
            hypothesis(format!("matrix is singular (|det| = {det:e} <= {threshold:e})"))
        }
        other => other,
    })
}

struct Ctx<'a> {
    spec: SpectralData,
    opts: &'a VerifyOptions,
    rng: ChaCha8Rng,
    report: Report,
}

impl<'a> Ctx<'a> {
    fn new(a: &DenseMatrix, opts: &'a VerifyOptions, subject: &str) -> Result<Self> {
        let spec = eigen(a, opts.residual_tol)?;
        let mut report = Report::new(subject);
        if spec.unreliable() {
            report.note(format!(
                "eigenvector matrix condition number {:e} exceeds the reliability limit",
                spec.eigvec_condition
            ));
        }
        Ok(Ctx {
            spec,
            opts,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            report,
        })
    }

    fn finish(mut self) -> Report {
        self.report.note(format!("seed {}", self.opts.seed));
        self.report
    }

    fn eig(&self, i: usize) -> Complex64 {
        self.spec.eigenvalues[i - 1]
    }

    fn is_real_value(&self, z: Complex64) -> bool {
        z.im.abs() <= self.opts.tol * z.norm().max(f64::MIN_POSITIVE)
    }

    fn signs(&self, x: Vec<f64>) -> SignVector {
        SignVector::relative(x, self.opts.zero_tol).expect("non-empty finite vector")
    }

    fn eigvec_status(&self, pass: bool) -> Status {
        if self.spec.unreliable() {
            Status::Unreliable
        } else {
            Status::from_bool(pass)
        }
    }

    /// `sign * z` is real and positive.
    fn signed_positive(&mut self, name: &str, anchor: &str, z: Complex64, sign: i8) {
        let pass = self.is_real_value(z) && f64::from(sign) * z.re > 0.0;
        self.report.check(name, anchor, pass, json!({"value": z, "sign": sign}));
    }

    /// `|λ_k| > |λ_{k+1}|` (1-based) by more than `tol` relative.
    fn gap_holds(&self, k: usize) -> bool {
        let (a, b) = (self.eig(k).norm(), self.eig(k + 1).norm());
        a - b > self.opts.tol * a
    }

    fn gaps(&mut self, name: &str, anchor: &str, ks: &[usize]) {
        let failing: Vec<usize> = ks.iter().copied().filter(|&k| !self.gap_holds(k)).collect();
        let moduli = self.spec.moduli();
        self.report.check(
            name,
            anchor,
            failing.is_empty(),
            json!({"moduli": moduli, "gaps_after": ks, "failing": failing}),
        );
    }

    fn rank_check(&mut self, name: &str, anchor: &str, p: usize) {
        if p == 0 {
            self.report.push(name, anchor, Status::Skipped, json!({"p": 0}));
            return;
        }
        let r = rank(&self.spec.real_basis[..p]);
        let status = self.eigvec_status(r == p);
        self.report.push(name, anchor, status, json!({"p": p, "rank": r}));
    }

    /// Samples matchings over `p..=end` with `p` drawn from `starts`; checks
    /// `s^+ <= bound`.
    fn sampled_upper(&mut self, name: &str, anchor: &str, starts: &[usize], end: usize, bound: usize) {
        let starts: Vec<usize> = starts
            .iter()
            .copied()
            .filter(|&p| self.spec.closed_range(p - 1, end - 1))
            .collect();
        self.sampled(name, anchor, &starts, &[end], bound, true);
    }

    /// Samples matchings over `start..=q` with `q` drawn from `ends`; checks
    /// `s^- >= bound`.
    fn sampled_lower(&mut self, name: &str, anchor: &str, start: usize, ends: &[usize], bound: usize) {
        let ends: Vec<usize> = ends
            .iter()
            .copied()
            .filter(|&q| self.spec.closed_range(start - 1, q - 1))
            .collect();
        self.sampled(name, anchor, &[start], &ends, bound, false);
    }

    fn sampled(
        &mut self,
        name: &str,
        anchor: &str,
        starts: &[usize],
        ends: &[usize],
        bound: usize,
        upper: bool,
    ) {
        if starts.is_empty() || ends.is_empty() {
            self.report.push(
                name,
                anchor,
                Status::Fail,
                json!({"reason": "no admissible range: the boundary splits a conjugate pair"}),
            );
            return;
        }
        let mut violations = 0usize;
        let mut first: Value = Value::Null;
        for _ in 0..self.opts.samples {
            let p = starts[self.rng.random_range(0..starts.len())];
            let q = ends[self.rng.random_range(0..ends.len())];
            let c = random_matching(&self.spec, p, q, &mut self.rng).expect("admissible range");
            let (x, _) = combine(&self.spec, &c);
            let sv = self.signs(x);
            let (count, ok) = if upper {
                let s = sv.s_plus();
                (s, s <= bound)
            } else {
                let s = sv.s_minus();
                (s, s >= bound)
            };
            if !ok {
                violations += 1;
                if first.is_null() {
                    first = json!({
                        "range": [p, q],
                        "coefficients": c.values,
                        "vector": sv.entries(),
                        "count": count,
                    });
                }
            }
        }
        let status = self.eigvec_status(violations == 0);
        self.report.push(
            name,
            anchor,
            status,
            json!({
                "samples": self.opts.samples,
                "bound": bound,
                "violations": violations,
                "first_violation": first,
            }),
        );
    }

    /// Real vectors spanning the eigenvector (or pair) at 1-based index `i`:
    /// `[v^i]` when real, `[Re v, Im v]` of the pair otherwise.
    fn real_parts(&self, i: usize) -> Vec<Vec<f64>> {
        let idx = i - 1;
        let first = match self.spec.kinds[idx] {
            EigenKind::PairSecond => idx - 1,
            _ => idx,
        };
        let v = &self.spec.eigenvectors[first];
        if self.spec.kinds[idx] == EigenKind::Real {
            vec![v.iter().map(|z| z.re).collect()]
        } else {
            vec![
                v.iter().map(|z| z.re).collect(),
                v.iter().map(|z| z.im).collect(),
            ]
        }
    }
}

/// Anchors: the claim each check tests.
mod claim {
    pub const PRODUCT: &str = "eps_k * lambda_1 * ... * lambda_k is real and positive";
    pub const GAP: &str = "|lambda_k| > |lambda_{k+1}|";
    pub const LEADING: &str = "s^+ of any matched combination of v^p..v^k is at most k-1";
    pub const TRAILING: &str = "s^- of any matched combination of v^{k+1}..v^q is at least k";
    pub const SINGLE: &str =
        "real eigenvectors (and Re/Im of pairs) obey the leading/trailing sign bounds individually";
    pub const RANK: &str = "the real vectors u^1..u^p are linearly independent";
    pub const MIDDLE_REAL: &str = "eps_i * eps_{i+1} * lambda_{i+1} is real and positive";
    pub const CHAIN: &str = "|lambda_i| > |lambda_{i+1}| > |lambda_{i+2}|";
    pub const MIDDLE_VECTOR: &str = "v^{i+1} is real with s^-(v^{i+1}) = s^+(v^{i+1}) = i";
    pub const ALL_REAL: &str = "all eigenvalues of an SSR matrix are real";
    pub const STRICT_CHAIN: &str = "|lambda_1| > |lambda_2| > ... > |lambda_n| > 0";
    pub const WINDOW: &str = "p-1 <= s^-(v) <= s^+(v) <= q-1 for real combinations v of v^p..v^q";
    pub const EXACT: &str = "s^-(v^p) = s^+(v^p) = p-1 for every p";
    pub const PERRON: &str = "lambda_1 is simple and real with eps_1 * lambda_1 > 0";
    pub const MULTIPLICITY: &str = "every eigenvalue has algebraic multiplicity at most 2";
    pub const PAIR_PRODUCT: &str = "eps_{k-1} * eps_{k+1} * lambda_k * lambda_{k+1} > 0";
    pub const LAST: &str = "lambda_n is real and eps_{n-1} * det(A) * lambda_n > 0";
    pub const PATTERNS: &str = "eigenvector sign-variation bounds implied by the orders that are SSR";
}

fn sign_of(report: &SignRegularityReport, k: usize) -> i8 {
    report.epsilon(k).expect("order is SSR")
}

/// Spectral consequences of `SSR_k` for a single `k` in `1..n-1`.
pub fn verify_thm2(a: &DenseMatrix, k: usize, opts: &VerifyOptions) -> Result<Report> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    if k == 0 || k >= n {
        return Err(hypothesis(format!("order k = {k} must lie in 1..{}", n.saturating_sub(1))));
    }
    let verdict = ssr_k_test(a, k, opts.minor_tol)?;
    let eps = verdict
        .epsilon_k
        .ok_or_else(|| hypothesis(format!("matrix is not SSR_{k}")))?;
    let mut ctx = Ctx::new(a, opts, &format!("single-order spectral structure, k = {k}"))?;

    let prod = ctx.spec.leading_product(k);
    ctx.signed_positive("product_sign", claim::PRODUCT, prod, eps);
    ctx.gaps("modulus_gap", claim::GAP, &[k]);
    let starts: Vec<usize> = (1..=k).collect();
    ctx.sampled_upper("leading_combinations", claim::LEADING, &starts, k, k - 1);
    let ends: Vec<usize> = (k + 1..=n).collect();
    ctx.sampled_lower("trailing_combinations", claim::TRAILING, k + 1, &ends, k);
    single_vector_bounds(&mut ctx, k);
    ctx.rank_check("leading_basis_rank", claim::RANK, k);
    Ok(ctx.finish())
}

fn single_vector_bounds(ctx: &mut Ctx, k: usize) {
    let n = ctx.spec.n();
    let mut failures = Vec::new();
    for i in 1..=n {
        for x in ctx.real_parts(i) {
            let sv = ctx.signs(x);
            let ok = if i <= k {
                sv.s_plus() < k
            } else {
                sv.s_minus() >= k
            };
            if !ok {
                failures.push(json!({"index": i, "s_minus": sv.s_minus(), "s_plus": sv.s_plus()}));
            }
        }
    }
    let status = ctx.eigvec_status(failures.is_empty());
    ctx.report.push("single_vector_bounds", claim::SINGLE, status, json!({"failures": failures}));
}

/// Consequences of `SSR_i` and `SSR_{i+1}` for `i` in `1..n-2`.
pub fn verify_cor2(a: &DenseMatrix, i: usize, opts: &VerifyOptions) -> Result<Report> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    if i == 0 || i + 2 > n {
        return Err(hypothesis(format!("index i = {i} must lie in 1..{}", n.saturating_sub(2))));
    }
    let lo = ssr_k_test(a, i, opts.minor_tol)?;
    let hi = ssr_k_test(a, i + 1, opts.minor_tol)?;
    let (e1, e2) = match (lo.epsilon_k, hi.epsilon_k) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(hypothesis(format!("matrix is not SSR_{i} and SSR_{}", i + 1))),
    };
    let mut ctx = Ctx::new(a, opts, &format!("two consecutive orders, i = {i}"))?;

    let mid = ctx.eig(i + 1);
    ctx.signed_positive("middle_eigenvalue_sign", claim::MIDDLE_REAL, mid, e1 * e2);
    ctx.gaps("modulus_chain", claim::CHAIN, &[i, i + 1]);

    let real = ctx.spec.is_real(i);
    let v: Vec<f64> = ctx.spec.eigenvectors[i].iter().map(|z| z.re).collect();
    let sv = ctx.signs(v);
    let (sm, sp) = (sv.s_minus(), sv.s_plus());
    let status = ctx.eigvec_status(real && sm == i && sp == i);
    ctx.report.push(
        "middle_eigenvector",
        claim::MIDDLE_VECTOR,
        status,
        json!({"real": real, "s_minus": sm, "s_plus": sp, "expected": i}),
    );

    let starts: Vec<usize> = (1..=i).collect();
    ctx.sampled_upper("leading_to_i", claim::LEADING, &starts, i, i - 1);
    ctx.sampled_upper("leading_to_i_plus_1", claim::LEADING, &starts, i + 1, i);
    let ends: Vec<usize> = (i + 2..=n).collect();
    ctx.sampled_lower("trailing_from_i_plus_1", claim::TRAILING, i + 1, &ends, i);
    ctx.sampled_lower("trailing_from_i_plus_2", claim::TRAILING, i + 2, &ends, i + 1);
    ctx.rank_check("leading_basis_rank", claim::RANK, i + 1);
    Ok(ctx.finish())
}

/// Spectral structure of an SSR matrix.
pub fn verify_ssr_spectrum(a: &DenseMatrix, opts: &VerifyOptions) -> Result<Report> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    let cls = classify(a, opts.minor_tol)?;
    if !cls.flags.ssr {
        return Err(hypothesis("matrix is not SSR"));
    }
    let mut ctx = Ctx::new(a, opts, "SSR spectrum")?;
    let nonreal: Vec<usize> = (1..=n).filter(|&i| !ctx.spec.is_real(i - 1)).collect();
    let values = ctx.spec.eigenvalues.clone();
    ctx.report.check(
        "all_real",
        claim::ALL_REAL,
        nonreal.is_empty(),
        json!({"eigenvalues": values, "nonreal": nonreal}),
    );
    let ks: Vec<usize> = (1..n).collect();
    ctx.gaps("strict_modulus_chain", claim::STRICT_CHAIN, &ks);

    if nonreal.is_empty() {
        let mut violations = 0usize;
        let mut first = Value::Null;
        for _ in 0..opts.samples {
            let p = ctx.rng.random_range(1..=n);
            let q = ctx.rng.random_range(p..=n);
            let c = random_matching(&ctx.spec, p, q, &mut ctx.rng).expect("real spectrum");
            let sv = ctx.signs(combine(&ctx.spec, &c).0);
            let (sm, sp) = (sv.s_minus(), sv.s_plus());
            if !(p - 1 <= sm && sm <= sp && sp < q) {
                violations += 1;
                if first.is_null() {
                    first = json!({"range": [p, q], "coefficients": c.values,
                                   "vector": sv.entries(), "s_minus": sm, "s_plus": sp});
                }
            }
        }
        let status = ctx.eigvec_status(violations == 0);
        ctx.report.push(
            "combination_window",
            claim::WINDOW,
            status,
            json!({"samples": opts.samples, "violations": violations, "first_violation": first}),
        );

        let mut failures = Vec::new();
        for p in 1..=n {
            let v = ctx.real_parts(p).remove(0);
            let sv = ctx.signs(v);
            if sv.s_minus() != p - 1 || sv.s_plus() != p - 1 {
                failures.push(json!({"p": p, "s_minus": sv.s_minus(), "s_plus": sv.s_plus()}));
            }
        }
        let status = ctx.eigvec_status(failures.is_empty());
        ctx.report.push("exact_counts", claim::EXACT, status, json!({"failures": failures}));
    } else {
        ctx.report.push("combination_window", claim::WINDOW, Status::Skipped, json!({}));
        ctx.report.push("exact_counts", claim::EXACT, Status::Skipped, json!({}));
    }
    Ok(ctx.finish())
}

/// Which parity of orders is assumed SSR.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Parity {
    Odd,
    Even,
}

/// Spectral structure of a matrix that is `SSR_k` for every odd `k`.
pub fn verify_thm3(a: &DenseMatrix, opts: &VerifyOptions) -> Result<Report> {
    verify_parity(a, opts, Parity::Odd)
}

/// Spectral structure of a matrix that is `SSR_k` for every even `k`.
pub fn verify_cor3(a: &DenseMatrix, opts: &VerifyOptions) -> Result<Report> {
    verify_parity(a, opts, Parity::Even)
}

fn verify_parity(a: &DenseMatrix, opts: &VerifyOptions, parity: Parity) -> Result<Report> {
    let det = require_square_nonsingular(a)?;
    let n = a.rows();
    let cls = classify(a, opts.minor_tol)?;
    let (holds, subject, gap_start) = match parity {
        Parity::Odd => (cls.flags.ssr_odd, "SSR for all odd orders", 1),
        Parity::Even => (cls.flags.ssr_even, "SSR for all even orders", 2),
    };
    if !holds {
        return Err(hypothesis(format!("matrix is not {subject}")));
    }
    let mut ctx = Ctx::new(a, opts, subject)?;

    if parity == Parity::Odd {
        let l1 = ctx.eig(1);
        let simple = n == 1 || ctx.gap_holds(1);
        let pass = ctx.is_real_value(l1) && f64::from(sign_of(&cls, 1)) * l1.re > 0.0 && simple;
        ctx.report.check("perron_root", claim::PERRON, pass, json!({"lambda_1": l1, "simple": simple}));
    }

    // strict gaps after every order that is SSR
    let ks: Vec<usize> = (gap_start..n).step_by(2).collect();
    ctx.gaps("modulus_gaps", claim::GAP, &ks);
    let triples: Vec<usize> = (1..n.saturating_sub(1))
        .filter(|&i| {
            let (x, z) = (ctx.eig(i), ctx.eig(i + 2));
            (x - z).norm() <= opts.tol * x.norm()
        })
        .collect();
    ctx.report.check(
        "multiplicity",
        claim::MULTIPLICITY,
        triples.is_empty(),
        json!({"triple_starts": triples}),
    );

    // products across each order that is not assumed SSR
    let product_ks: Vec<usize> = match parity {
        Parity::Odd => (2..n).step_by(2).collect(),
        Parity::Even => (1..n).step_by(2).collect(),
    };
    let mut failing = Vec::new();
    for &k in &product_ks {
        let z = ctx.eig(k) * ctx.eig(k + 1);
        let s = sign_of(&cls, k - 1) * sign_of(&cls, k + 1);
        if !(ctx.is_real_value(z) && f64::from(s) * z.re > 0.0) {
            failing.push(json!({"k": k, "product": z, "sign": s}));
        }
    }
    ctx.report.check(
        "pair_products",
        claim::PAIR_PRODUCT,
        failing.is_empty(),
        json!({"orders": product_ks, "failing": failing}),
    );

    let last_applies = match parity {
        Parity::Odd => n % 2 == 0,
        Parity::Even => n % 2 == 1,
    };
    if last_applies {
        let ln = ctx.eig(n);
        let s = f64::from(sign_of(&cls, n - 1)) * det;
        let pass = ctx.spec.is_real(n - 1) && s * ln.re > 0.0;
        ctx.report.check("last_eigenvalue", claim::LAST, pass, json!({"lambda_n": ln, "det": det}));
    } else {
        ctx.report.push("last_eigenvalue", claim::LAST, Status::Skipped, json!({"n": n}));
    }

    parity_patterns(&mut ctx, parity);
    let p = match parity {
        Parity::Odd => n - (1 - n % 2),
        Parity::Even => n - n % 2,
    };
    ctx.rank_check("leading_basis_rank", claim::RANK, p);
    Ok(ctx.finish())
}

/// Per-index sign bounds. For odd orders: `v^{2i+1}` (or the pair
/// `v^{2i}, v^{2i+1}`) has `s^+ <= 2i`, and `v^{2i}` (or that pair) has
/// `s^- >= 2i-1`. For even orders: `v^{2i}` (or the pair `v^{2i-1}, v^{2i}`)
/// has `s^+ <= 2i-1`, and `v^{2i-1}` (or that pair) has `s^- >= 2i-2`.
fn parity_patterns(ctx: &mut Ctx, parity: Parity) {
    let n = ctx.spec.n();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    let mut ok_all = true;
    for idx in 1..=n {
        // (upper bound on s^+, or lower bound on s^-) and the pair partner used
        let (upper, bound, partner) = match (parity, idx % 2) {
            (Parity::Odd, 1) => (true, idx - 1, idx.checked_sub(1).filter(|&j| j >= 2)),
            (Parity::Odd, _) => (false, idx - 1, Some(idx + 1)),
            (Parity::Even, 0) => (true, idx - 1, Some(idx - 1)),
            (Parity::Even, _) => (false, idx.saturating_sub(1), Some(idx + 1)),
        };
        if ctx.spec.is_real(idx - 1) {
            let sv = ctx.signs(ctx.real_parts(idx).remove(0));
            let ok = if upper { sv.s_plus() <= bound } else { sv.s_minus() >= bound };
            ok_all &= ok;
            results.push(json!({"index": idx, "upper": upper, "bound": bound,
                                "s_minus": sv.s_minus(), "s_plus": sv.s_plus(), "ok": ok}));
            continue;
        }
        let Some(j) = partner.filter(|&j| (1..=n).contains(&j)) else {
            skipped.push(idx);
            continue;
        };
        let (lo, hi) = (idx.min(j), idx.max(j));
        if !(ctx.spec.kinds[lo - 1] == EigenKind::PairFirst
            && ctx.spec.kinds[hi - 1] == EigenKind::PairSecond)
        {
            skipped.push(idx);
            continue;
        }
        let mut worst = None;
        for _ in 0..ctx.opts.samples {
            let c = random_matching(&ctx.spec, lo, hi, &mut ctx.rng).expect("pair");
            let sv = ctx.signs(combine(&ctx.spec, &c).0);
            let ok = if upper { sv.s_plus() <= bound } else { sv.s_minus() >= bound };
            if !ok {
                worst = Some(json!({"coefficients": c.values, "vector": sv.entries()}));
                break;
            }
        }
        ok_all &= worst.is_none();
        results.push(json!({"index": idx, "pair": [lo, hi], "upper": upper, "bound": bound,
                            "ok": worst.is_none(), "violation": worst}));
    }
    if !skipped.is_empty() {
        ctx.report.note(format!(
            "eigenvector bounds skipped for indices {skipped:?}: the pair they refer to is not present"
        ));
    }
    let status = ctx.eigvec_status(ok_all);
    ctx.report.push(
        "eigenvector_patterns",
        claim::PATTERNS,
        status,
        json!({"results": results, "skipped": skipped}),
    );
}
