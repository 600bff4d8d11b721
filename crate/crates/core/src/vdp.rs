//! Sampling checks of the variation-diminishing properties: order-`k`
//! (`s^-(x) <= k-1` implies `s^+(Ax) <= k-1`), cyclic, odd, and the
//! column-minor criterion for tall matrices.
//!
//! Each checker samples inputs, and when the minors say the property should
//! fail but sampling found no witness, runs a structured search before
//! giving up.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::{combinations, DenseMatrix, IndexSet};
use crate::minors::minor_unchecked;
use crate::sign_regularity::{classify, ssr_k_test, MinorTolerance};
use crate::sign_variation::{s_minus, s_minus_cyclic, s_plus, s_plus_cyclic, SignVector};

pub const DEFAULT_SAMPLES: usize = 5000;
/// Witnesses kept verbatim in a result; further violations are only counted.
pub const MAX_WITNESSES: usize = 50;
/// Image entries below `IMAGE_ZERO_TOL * ||A||_inf * ||x||_inf` count as zero.
pub const IMAGE_ZERO_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VdpMode {
    OrderK,
    Cyclic,
    Odd,
    Tall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    Random,
    NullSpace,
    PatternSearch,
}

/// An input whose image breaks the inequality being checked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub ax: Vec<f64>,
    /// Left-hand count of the image (`s^+`, `s_c^+` or `s_o^+`).
    pub image_count: usize,
    /// Right-hand bound from the input (`k-1`, `s_c^-` or `s_o^-`).
    pub input_bound: usize,
    pub source: WitnessSource,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VdpCheckResult {
    pub mode: VdpMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub samples_run: usize,
    pub violation_count: usize,
    pub violations: Vec<Witness>,
    pub pass: bool,
    /// Whether the equivalent minor condition holds.
    pub minor_condition: bool,
    pub structured_search: bool,
    pub agrees_with_minors: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Draws a non-zero `x` of length `n` with `s^-(x) <= bound`: at most `bound`
/// sign changes at random positions, log-normal magnitudes, and each entry
/// zeroed with probability 0.2.
pub fn sample_bounded_s_minus(n: usize, bound: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    if n == 0 {
        return invalid("vector length must be positive");
    }
    if bound >= n {
        return invalid(format!("bound {bound} must lie in 0..={}", n - 1));
    }
    let changes = rng.random_range(0..=bound);
    let mut flip = vec![false; n];
    for pos in sample(rng, n - 1, changes) {
        flip[pos + 1] = true;
    }
    let mut sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut x = Vec::with_capacity(n);
    for f in flip {
        if f {
            sign = -sign;
        }
        let mag: f64 = (1.5 * rng.sample::<f64, _>(StandardNormal)).exp();
        x.push(sign * mag);
    }
    let keep = rng.random_range(0..n);
    for (i, v) in x.iter_mut().enumerate() {
        if i != keep && rng.random_bool(0.2) {
            *v = 0.0;
        }
    }
    Ok(x)
}

fn require_square_nonsingular(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return invalid(format!("matrix must be square, got {}x{}", a.rows(), a.cols()));
    }
    a.nonsingular_det().map(|_| ())
}

fn odd_ceiling(s: usize) -> usize {
    s | 1
}

/// What is compared for a given mode.
#[derive(Clone, Copy)]
enum Rule {
    /// `s^-(x) <= k-1` must give `s^+(Ax) <= k-1`.
    Order(usize),
    Cyclic,
    Odd,
}

impl Rule {
    /// `(image_count, input_bound)` or `None` if `x` is not an admissible input.
    fn evaluate(self, x: &[f64], ax: &[f64], image_tol: f64) -> Option<(usize, usize)> {
        let xs = SignVector::with_tol(x.to_vec(), 0.0).ok()?;
        if xs.is_zero() {
            return None;
        }
        let ys = SignVector::with_tol(ax.to_vec(), image_tol).ok()?;
        let (xsig, ysig) = (xs.signs(), ys.signs());
        match self {
            Rule::Order(k) => (s_minus(xsig) < k).then(|| (s_plus(ysig), k - 1)),
            Rule::Cyclic => Some((
                if ys.is_zero() { usize::MAX } else { s_plus_cyclic(ysig) },
                s_minus_cyclic(xsig),
            )),
            Rule::Odd => Some((odd_ceiling(s_plus(ysig)), odd_ceiling(s_minus(xsig)))),
        }
    }
}

struct Search<'a> {
    a: &'a DenseMatrix,
    rule: Rule,
    count: usize,
    witnesses: Vec<Witness>,
}

impl<'a> Search<'a> {
    fn new(a: &'a DenseMatrix, rule: Rule) -> Self {
        Search { a, rule, count: 0, witnesses: Vec::new() }
    }

    fn image_tol(&self, x: &[f64]) -> f64 {
        let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        IMAGE_ZERO_TOL * self.a.norm_inf() * xn
    }

    /// Image count minus input bound (positive means a violation).
    fn excess(&self, x: &[f64]) -> Option<(i64, Vec<f64>, usize, usize)> {
        let ax = self.a.mul_vec(x).ok()?;
        let (img, bound) = self.rule.evaluate(x, &ax, self.image_tol(x))?;
        let img = img.min(x.len() + 1);
        Some((img as i64 - bound as i64, ax, img, bound))
    }

    fn try_input(&mut self, x: Vec<f64>, source: WitnessSource) -> bool {
        let Some((excess, ax, image_count, input_bound)) = self.excess(&x) else {
            return false;
        };
        if excess <= 0 {
            return false;
        }
        self.count += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness { x, ax, image_count, input_bound, source });
        }
        true
    }

    /// Vectors supported on `k` columns whose image vanishes on `k-1` rows:
    /// the generalized cross product of the `(k-1) x k` submatrix.
    fn null_space_probes(&mut self, k: usize) -> bool {
        let (rows, cols) = (self.a.rows(), self.a.cols());
        if k == 0 || k > cols {
            return false;
        }
        let before = self.count;
        let row_sets: Vec<IndexSet> = if k == 1 {
            vec![IndexSet::leading(0)]
        } else {
            combinations(rows, k - 1).collect()
        };
        for beta in combinations(cols, k) {
            let b0 = beta.zero_based();
            for gamma in &row_sets {
                let g0 = gamma.zero_based();
                let mut x = vec![0.0; cols];
                for j in 0..k {
                    let rest: Vec<usize> = b0.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, c)| *c).collect();
                    let m = if k == 1 { 1.0 } else { minor_unchecked(self.a, &g0, &rest) };
                    x[b0[j]] = if j % 2 == 0 { m } else { -m };
                }
                for sign in [1.0, -1.0] {
                    let xs: Vec<f64> = x.iter().map(|v| v * sign).collect();
                    self.try_input(xs, WitnessSource::NullSpace);
                }
                if self.count > before && self.witnesses.len() >= MAX_WITNESSES {
                    return true;
                }
            }
        }
        self.count > before
    }

    /// Enumerates sign patterns in `{-1, 0, 1}^n` (admissible for the rule)
    /// and improves magnitudes by coordinate descent on the excess.
    fn pattern_search(&mut self, rng: &mut impl Rng, budget: usize) -> bool {
        let n = self.a.cols();
        let total = 3usize.saturating_pow(n as u32);
        let patterns: Box<dyn Iterator<Item = usize>> = if total <= budget {
            Box::new(0..total)
        } else {
            let picks: Vec<usize> = (0..budget).map(|_| rng.random_range(0..total)).collect();
            Box::new(picks.into_iter())
        };
        let before = self.count;
        for code in patterns {
            let mut sigma = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                sigma.push((c % 3) as f64 - 1.0);
                c /= 3;
            }
            if sigma.iter().all(|s| *s == 0.0) {
                continue;
            }
            let mut mags = vec![1.0; n];
            let build = |m: &[f64]| sigma.iter().zip(m).map(|(s, v)| s * v).collect::<Vec<f64>>();
            let Some((mut best, ..)) = self.excess(&build(&mags)) else {
                continue;
            };
            for _sweep in 0..3 {
                if best > 0 {
                    break;
                }
                for i in 0..n {
                    if sigma[i] == 0.0 {
                        continue;
                    }
                    for f in [0.1, 0.5, 2.0, 10.0, rng.random_range(0.01..100.0)] {
                        let mut trial = mags.clone();
                        trial[i] *= f;
                        if let Some((e, ..)) = self.excess(&build(&trial)) {
                            if e > best {
                                best = e;
                                mags = trial;
                            }
                        }
                    }
                }
            }
            if best > 0 {
                self.try_input(build(&mags), WitnessSource::PatternSearch);
                if self.witnesses.len() >= MAX_WITNESSES {
                    break;
                }
            }
        }
        self.count > before
    }

    fn finish(
        self,
        mode: VdpMode,
        k: Option<usize>,
        samples_run: usize,
        minor_condition: bool,
        structured_search: bool,
    ) -> VdpCheckResult {
        let pass = self.count == 0;
        let agrees = pass == minor_condition;
        let warning = match (pass, minor_condition) {
            (false, true) => Some("violation found although the minor condition holds".to_string()),
            (true, false) => Some(
                "minor condition fails but no violating input was found (limited falsification power)"
                    .to_string(),
            ),
            _ => None,
        };
        VdpCheckResult {
            mode,
            k,
            samples_run,
            violation_count: self.count,
            violations: self.witnesses,
            pass,
            minor_condition,
            structured_search,
            agrees_with_minors: agrees,
            warning,
        }
    }
}

/// Pattern-search budget (number of sign patterns tried).
const PATTERN_BUDGET: usize = 6561;

/// Checks `s^-(x) <= k-1  =>  s^+(Ax) <= k-1` on `samples` random inputs.
pub fn check_order_k_vdp(
    a: &DenseMatrix,
    k: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> Result<VdpCheckResult> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    if k == 0 || k > n {
        return invalid(format!("order k = {k} must lie in 1..={n}"));
    }
    let ssr = ssr_k_test(a, k, MinorTolerance::default())?.is_ssr;
    let mut search = Search::new(a, Rule::Order(k));
    for _ in 0..samples {
        let x = sample_bounded_s_minus(n, k - 1, rng)?;
        search.try_input(x, WitnessSource::Random);
    }
    let mut structured = false;
    if search.count == 0 && !ssr {
        structured = true;
        if !search.null_space_probes(k) {
            search.pattern_search(rng, PATTERN_BUDGET);
        }
    }
    Ok(search.finish(VdpMode::OrderK, Some(k), samples, ssr, structured))
}

/// Runs only the structured search (null-space probes, then sign patterns)
/// for a violation of the order-`k` property, without random sampling.
pub fn structured_order_k_search(
    a: &DenseMatrix,
    k: usize,
    rng: &mut impl Rng,
) -> Result<VdpCheckResult> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    if k == 0 || k > n {
        return invalid(format!("order k = {k} must lie in 1..={n}"));
    }
    let ssr = ssr_k_test(a, k, MinorTolerance::default())?.is_ssr;
    let mut search = Search::new(a, Rule::Order(k));
    if !search.null_space_probes(k) {
        search.pattern_search(rng, PATTERN_BUDGET);
    }
    Ok(search.finish(VdpMode::OrderK, Some(k), 0, ssr, true))
}

fn random_nonzero(n: usize, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let bound = rng.random_range(0..n);
    sample_bounded_s_minus(n, bound, rng)
}

fn check_parity_vdp(
    a: &DenseMatrix,
    samples: usize,
    rng: &mut impl Rng,
    mode: VdpMode,
) -> Result<VdpCheckResult> {
    require_square_nonsingular(a)?;
    let n = a.rows();
    let flags = classify(a, MinorTolerance::default())?.flags;
    let (rule, holds, first) = match mode {
        VdpMode::Cyclic => (Rule::Cyclic, flags.ssr_odd, 1),
        _ => (Rule::Odd, flags.ssr_even, 2),
    };
    let mut search = Search::new(a, rule);
    for _ in 0..samples {
        let x = random_nonzero(n, rng)?;
        search.try_input(x, WitnessSource::Random);
    }
    let mut structured = false;
    if search.count == 0 && !holds {
        structured = true;
        // a failing order of the right parity yields candidates
        let failing: Vec<usize> = (first..=n)
            .step_by(2)
            .filter(|&k| !ssr_k_test(a, k, MinorTolerance::default()).is_ok_and(|v| v.is_ssr))
            .collect();
        let mut found = false;
        for k in failing {
            found |= search.null_space_probes(k);
        }
        if !found {
            search.pattern_search(rng, PATTERN_BUDGET);
        }
    }
    Ok(search.finish(mode, None, samples, holds, structured))
}

/// Checks `s_c^+(Ax) <= s_c^-(x)` for random non-zero `x`.
pub fn check_cyclic_vdp(a: &DenseMatrix, samples: usize, rng: &mut impl Rng) -> Result<VdpCheckResult> {
    check_parity_vdp(a, samples, rng, VdpMode::Cyclic)
}

/// Checks `s_o^+(Ax) <= s_o^-(x)` for random non-zero `x`.
pub fn check_odd_vdp(a: &DenseMatrix, samples: usize, rng: &mut impl Rng) -> Result<VdpCheckResult> {
    check_parity_vdp(a, samples, rng, VdpMode::Odd)
}

/// For `U` with more rows than columns (`n > m`) and full column rank,
/// compares `s^+(Ux) <= m-1` for all non-zero `x` against the criterion that
/// all `m x m` minors `U(α | 1..m)` are non-zero with one sign.
pub fn check_tall_vdp(u: &DenseMatrix, samples: usize, rng: &mut impl Rng) -> Result<VdpCheckResult> {
    let (n, m) = (u.rows(), u.cols());
    if n <= m {
        return invalid(format!("tall check needs more rows than columns, got {n}x{m}"));
    }
    let cols: Vec<Vec<f64>> = (0..m).map(|c| u.column_vec(c)).collect();
    if crate::spectral::rank(&cols) < m {
        return invalid("matrix does not have full column rank");
    }
    let minors_ok = ssr_k_test(u, m, MinorTolerance::default())?.is_ssr;
    let mut search = Search::new(u, Rule::Order(m));
    for _ in 0..samples {
        // any non-zero x qualifies since s^-(x) <= m-1 always holds
        let x = random_nonzero(m, rng)?;
        search.try_input(x, WitnessSource::Random);
    }
    let mut structured = false;
    if search.count == 0 && !minors_ok {
        structured = true;
        if !search.null_space_probes(m) {
            search.pattern_search(rng, PATTERN_BUDGET);
        }
    }
    Ok(search.finish(VdpMode::Tall, Some(m), samples, minors_ok, structured))
}
