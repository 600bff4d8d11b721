use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::linear::variation_checks;
use super::quadrature::{GaussLegendre, DEFAULT_QUADRATURE_ORDER};
use super::trajectory::{detect_periodicity, Periodicity, TrajectoryRecord};
use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::report::Report;
use crate::sign_regularity::{classify, MinorTolerance};

/// States beyond this max-norm are treated as a blow-up.
pub const BLOWUP_LIMIT: f64 = 1e12;

/// Number of `(a, b)` samples drawn when a monitor needs to confirm the
/// averaged-Jacobian hypothesis before simulating.
pub const HYPOTHESIS_SAMPLES: usize = 200;

/// Axis-aligned box `lo <= x <= hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return invalid("box bounds must be non-empty and of equal length");
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l < h)) {
            return invalid("box bounds must be finite with lo < hi");
        }
        Ok(BoxDomain { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Membership with a relative slack of `1e-12` on each face.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| {
                let slack = 1e-12 * (h - l).max(1.0);
                *v >= l - slack && *v <= h + slack
            })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| rng.random_range(*l..*h)).collect()
    }
}

/// `x(i+1) = f(i, x(i))` on a box domain.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn map(&self, i: usize, x: &[f64]) -> Vec<f64>;
    fn jacobian(&self, i: usize, x: &[f64]) -> DenseMatrix;
    fn domain(&self) -> &BoxDomain;
    /// Smallest `T` with `f(i + T, .) = f(i, .)`, if the system is periodic.
    fn period(&self) -> Option<usize>;

    /// Exact `∫_0^1 J(i, r a + (1 - r) b) dr` when known.
    fn closed_form_averaged_jacobian(&self, _i: usize, _a: &[f64], _b: &[f64]) -> Option<DenseMatrix> {
        None
    }
}

/// `f(i, x) = A x` on a box; the averaged Jacobian is `A` itself.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub a: DenseMatrix,
    pub domain: BoxDomain,
}

impl NonlinearSystem for LinearMap {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn map(&self, _i: usize, x: &[f64]) -> Vec<f64> {
        self.a.mul_vec(x).expect("dimension checked by caller")
    }

    fn jacobian(&self, _i: usize, _x: &[f64]) -> DenseMatrix {
        self.a.clone()
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn period(&self) -> Option<usize> {
        Some(1)
    }

    fn closed_form_averaged_jacobian(&self, _i: usize, _a: &[f64], _b: &[f64]) -> Option<DenseMatrix> {
        Some(self.a.clone())
    }
}

/// `∫_0^1 J(i, r a + (1 - r) b) dr` by Gauss-Legendre quadrature.
/// For `a == b` this is `J(i, a)` exactly.
pub fn averaged_jacobian(
    sys: &impl NonlinearSystem,
    i: usize,
    a: &[f64],
    b: &[f64],
    order: usize,
) -> Result<DenseMatrix> {
    let dom = sys.domain();
    if !dom.contains(a) || !dom.contains(b) {
        return invalid("averaged Jacobian endpoints must lie in the domain");
    }
    if order == 0 {
        return invalid("quadrature order must be positive");
    }
    if a == b {
        return Ok(sys.jacobian(i, a));
    }
    let n = sys.dim();
    let rule = GaussLegendre::new(order);
    let mut acc = vec![0.0; n * n];
    let mut point = vec![0.0; n];
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        for (p, (x, y)) in point.iter_mut().zip(a.iter().zip(b)) {
            *p = r * x + (1.0 - r) * y;
        }
        let j = sys.jacobian(i, &point);
        for (s, v) in acc.iter_mut().zip(j.entries()) {
            *s += w * v;
        }
    }
    DenseMatrix::new(n, n, acc)
}

/// Max entrywise gap between `jacobian` and a central difference of `map`,
/// relative to `max(1, ||J||_max)`.
pub fn jacobian_error(sys: &impl NonlinearSystem, i: usize, x: &[f64], h: f64) -> f64 {
    let n = sys.dim();
    let j = sys.jacobian(i, x);
    let scale = j.max_abs().max(1.0);
    let mut worst = 0.0f64;
    for c in 0..n {
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[c] += h;
        down[c] -= h;
        let fu = sys.map(i, &up);
        let fd = sys.map(i, &down);
        for r in 0..n {
            let fd_rc = (fu[r] - fd[r]) / (2.0 * h);
            worst = worst.max((fd_rc - j.get(r, c)).abs() / scale);
        }
    }
    worst
}

fn sample_step(sys: &impl NonlinearSystem, rng: &mut impl Rng) -> usize {
    match sys.period() {
        Some(t) => rng.random_range(0..t),
        None => rng.random_range(0..64),
    }
}

/// Samples `pairs` points `(i, a, b)` and checks that every averaged Jacobian
/// is TP. The smallest minor seen is reported as the margin.
pub fn check_assumption1(sys: &impl NonlinearSystem, pairs: usize, rng: &mut impl Rng) -> Result<Report> {
    let mut report = Report::new("averaged Jacobians are totally positive");
    let mut min_minor = f64::INFINITY;
    let mut tight = 0usize;
    let mut failure = None;
    let mut closed_gap = 0.0f64;
    let mut has_closed = false;
    for _ in 0..pairs {
        let i = sample_step(sys, rng);
        let a = sys.domain().sample(rng);
        let b = sys.domain().sample(rng);
        let m = averaged_jacobian(sys, i, &a, &b, DEFAULT_QUADRATURE_ORDER)?;
        if let Some(exact) = sys.closed_form_averaged_jacobian(i, &a, &b) {
            has_closed = true;
            let scale = exact.max_abs().max(f64::MIN_POSITIVE);
            let gap = m
                .entries()
                .iter()
                .zip(exact.entries())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            closed_gap = closed_gap.max(gap / scale);
        }
        let class = classify(&m, MinorTolerance::default())?;
        for v in &class.per_k {
            min_minor = min_minor.min(v.min_abs_minor);
            if v.margin_flag {
                tight += 1;
            }
        }
        if !class.flags.tp && failure.is_none() {
            failure = Some(json!({"i": i, "a": a, "b": b, "matrix": m.to_text()}));
        }
    }
    if sys.period().is_none() {
        report.note("system is not periodic; steps sampled from 0..64");
    }
    report.check(
        "averaged_jacobian_tp",
        "the averaged Jacobian is TP for all i and all a, b in the domain",
        failure.is_none(),
        json!({"samples": pairs, "min_abs_minor": min_minor, "tight_minors": tight, "witness": failure}),
    );
    if has_closed {
        report.check(
            "quadrature_agreement",
            "quadrature matches the closed-form averaged Jacobian",
            closed_gap <= 1e-12,
            json!({"max_relative_gap": closed_gap}),
        );
    }
    if tight > 0 {
        report.note(format!("{tight} minors were within ten tolerances of zero"));
    }
    Ok(report)
}

fn escape(step: usize, message: impl Into<String>) -> Error {
    Error::DomainEscape { step, message: message.into() }
}

fn iterate(sys: &impl NonlinearSystem, x0: &[f64], steps: usize) -> Result<Vec<Vec<f64>>> {
    if x0.len() != sys.dim() {
        return invalid(format!("initial state has length {}, expected {}", x0.len(), sys.dim()));
    }
    if !sys.domain().contains(x0) {
        return Err(escape(0, "initial state lies outside the domain"));
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for i in 0..steps {
        let next = sys.map(i, &states[i]);
        let size = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !size.is_finite() || size > BLOWUP_LIMIT {
            return Err(escape(i + 1, format!("state blew up (max-norm {size:e})")));
        }
        if !sys.domain().contains(&next) {
            return Err(escape(i + 1, format!("state {next:?} left the domain")));
        }
        states.push(next);
    }
    Ok(states)
}

/// Iterates `x(i+1) = f(i, x(i))`, failing with the step index if the state
/// leaves the domain.
pub fn simulate_nonlinear(sys: &impl NonlinearSystem, x0: &[f64], steps: usize) -> Result<TrajectoryRecord> {
    Ok(TrajectoryRecord::plain(iterate(sys, x0, steps)?))
}

/// Simulates two solutions and annotates their difference `z = x - xbar`.
pub fn simulate_nonlinear_pair(
    sys: &impl NonlinearSystem,
    x0: &[f64],
    xbar0: &[f64],
    steps: usize,
) -> Result<TrajectoryRecord> {
    let xs = iterate(sys, x0, steps)?;
    let ys = iterate(sys, xbar0, steps)?;
    Ok(TrajectoryRecord::with_reference(xs, ys))
}

/// The sign-variation checks on `z = x - xbar` of a pair record; these hold
/// whenever the averaged Jacobians along the pair are SSR.
pub fn monitor_difference_variation(record: &TrajectoryRecord) -> Result<Report> {
    if record.reference.is_none() {
        return invalid("the record has no reference trajectory");
    }
    Ok(variation_checks(record, "sign variation of the difference of two solutions"))
}

fn require_assumption1(sys: &impl NonlinearSystem, rng: &mut impl Rng) -> Result<Report> {
    let report = check_assumption1(sys, HYPOTHESIS_SAMPLES, rng)?;
    if !report.get("averaged_jacobian_tp").is_some_and(|c| c.status == crate::report::Status::Pass) {
        return Err(Error::HypothesisNotMet("sampled averaged Jacobian is not TP".into()));
    }
    Ok(report)
}

/// Outcome of [`check_entrainment`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entrainment {
    pub periodicity: Periodicity,
    /// The last `T` states, one period of the limit.
    pub limit_cycle: Vec<Vec<f64>>,
    pub report: Report,
}

/// Simulates a `T`-periodic system and checks that the solution converges to
/// a `T`-periodic trajectory.
pub fn check_entrainment(
    sys: &impl NonlinearSystem,
    x0: &[f64],
    steps: usize,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<Entrainment> {
    let period = sys
        .period()
        .ok_or_else(|| Error::HypothesisNotMet("system is not periodic".into()))?;
    let mut report = require_assumption1(sys, rng)?;
    report.subject = format!("entrainment to period {period}");
    let record = simulate_nonlinear(sys, x0, steps)?;
    let periodicity = detect_periodicity(&record, period, eps, 2 * period)?;
    if !periodicity.converged {
        return Err(Error::HorizonExhausted {
            steps,
            message: format!("not {period}-periodic to {eps:e} (residual {:e})", periodicity.residual),
        });
    }
    report.check(
        "periodic_limit",
        "every solution converges to a T-periodic solution",
        true,
        json!({"onset": periodicity.onset, "residual": periodicity.residual}),
    );
    let limit_cycle = record.states[record.states.len() - period..].to_vec();
    Ok(Entrainment { periodicity, limit_cycle, report })
}

/// Outcome of [`check_cor4`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub point: Vec<f64>,
    /// `||f(x*) - x*||_inf`.
    pub residual: f64,
    pub periodicity: Periodicity,
    pub report: Report,
}

/// For a time-invariant system: the solution converges to an equilibrium.
pub fn check_cor4(
    sys: &impl NonlinearSystem,
    x0: &[f64],
    steps: usize,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<Equilibrium> {
    if sys.period() != Some(1) {
        return Err(Error::HypothesisNotMet("system is not time-invariant".into()));
    }
    let mut report = require_assumption1(sys, rng)?;
    report.subject = "convergence to an equilibrium".into();
    let record = simulate_nonlinear(sys, x0, steps)?;
    let periodicity = detect_periodicity(&record, 1, eps, 2)?;
    if !periodicity.converged {
        return Err(Error::HorizonExhausted {
            steps,
            message: format!("no equilibrium to {eps:e} (residual {:e})", periodicity.residual),
        });
    }
    let point = record.states.last().expect("non-empty").clone();
    let image = sys.map(steps, &point);
    let residual = image.iter().zip(&point).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.check(
        "equilibrium",
        "every solution converges to an equilibrium",
        residual < eps,
        json!({"point": point, "residual": residual, "onset": periodicity.onset}),
    );
    Ok(Equilibrium { point, residual, periodicity, report })
}
