use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::trajectory::{difference, TrajectoryRecord};
use crate::error::{invalid, Error, Result};
use crate::matrix::DenseMatrix;
use crate::report::Report;
use crate::sign_regularity::{classify, MinorTolerance, SignRegularityReport};

type StepFn = Box<dyn Fn(usize) -> DenseMatrix + Send + Sync>;

enum Steps {
    Periodic(Vec<DenseMatrix>),
    Func(StepFn),
}

/// `x(i+1) = A(i) x(i)` with `A(i)` either a periodic list or a closure.
pub struct LinearTimeVaryingSystem {
    n: usize,
    steps: Steps,
}

impl fmt::Debug for LinearTimeVaryingSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.steps {
            Steps::Periodic(list) => f
                .debug_struct("LinearTimeVaryingSystem")
                .field("n", &self.n)
                .field("period", &list.len())
                .finish(),
            Steps::Func(_) => f.debug_struct("LinearTimeVaryingSystem").field("n", &self.n).finish(),
        }
    }
}

impl LinearTimeVaryingSystem {
    /// `A(i) = list[i mod len]`. All matrices must be square of one size.
    pub fn periodic(list: Vec<DenseMatrix>) -> Result<Self> {
        let Some(first) = list.first() else {
            return invalid("a periodic system needs at least one matrix");
        };
        let n = first.rows();
        if list.iter().any(|m| !m.is_square() || m.rows() != n) {
            return invalid("step matrices must be square and of equal size");
        }
        Ok(LinearTimeVaryingSystem { n, steps: Steps::Periodic(list) })
    }

    pub fn time_invariant(a: DenseMatrix) -> Result<Self> {
        Self::periodic(vec![a])
    }

    /// `A(i) = f(i)`; every returned matrix must be `n x n`.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> DenseMatrix + Send + Sync + 'static) -> Self {
        LinearTimeVaryingSystem { n, steps: Steps::Func(Box::new(f)) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> Option<usize> {
        match &self.steps {
            Steps::Periodic(list) => Some(list.len()),
            Steps::Func(_) => None,
        }
    }

    pub fn matrix(&self, i: usize) -> Result<DenseMatrix> {
        let m = match &self.steps {
            Steps::Periodic(list) => list[i % list.len()].clone(),
            Steps::Func(f) => f(i),
        };
        if !m.is_square() || m.rows() != self.n {
            return invalid(format!("A({i}) is {}x{}, expected {}x{}", m.rows(), m.cols(), self.n, self.n));
        }
        Ok(m)
    }
}

/// Sign-regularity hypotheses that held at every simulated step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepHypotheses {
    pub all_ssr: bool,
    pub all_tp: bool,
    /// Orders `k` for which every `A(i)` was `SSR_k`.
    pub ssr_orders: Vec<usize>,
    /// Steps at which `A(i)` was not SSR.
    pub non_ssr_steps: Vec<usize>,
}

impl StepHypotheses {
    fn from_reports(n: usize, reports: &[SignRegularityReport]) -> Self {
        let ssr_orders = (1..=n).filter(|&k| reports.iter().all(|r| r.is_ssr_k(k))).collect();
        let non_ssr_steps = reports
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.flags.ssr)
            .map(|(i, _)| i)
            .collect();
        StepHypotheses {
            all_ssr: reports.iter().all(|r| r.flags.ssr),
            all_tp: reports.iter().all(|r| r.flags.tp),
            ssr_orders,
            non_ssr_steps,
        }
    }
}

/// A linear trajectory with the hypotheses observed along it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearRun {
    pub record: TrajectoryRecord,
    pub hypotheses: StepHypotheses,
}

fn classify_steps(sys: &LinearTimeVaryingSystem, steps: usize) -> Result<Vec<(DenseMatrix, SignRegularityReport)>> {
    let tol = MinorTolerance::default();
    match &sys.steps {
        Steps::Periodic(list) => {
            let classes = list
                .iter()
                .map(|m| Ok((m.clone(), classify(m, tol)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((0..steps).map(|i| classes[i % classes.len()].clone()).collect())
        }
        Steps::Func(_) => (0..steps)
            .map(|i| {
                let m = sys.matrix(i)?;
                let r = classify(&m, tol)?;
                Ok((m, r))
            })
            .collect(),
    }
}

fn run(sys: &LinearTimeVaryingSystem, x0: &[f64], mats: &[(DenseMatrix, SignRegularityReport)]) -> Result<Vec<Vec<f64>>> {
    if x0.len() != sys.n {
        return invalid(format!("initial state has length {}, expected {}", x0.len(), sys.n));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return invalid("initial state must be finite");
    }
    let mut states = Vec::with_capacity(mats.len() + 1);
    states.push(x0.to_vec());
    for (i, (m, _)) in mats.iter().enumerate() {
        let next = m.mul_vec(&states[i])?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure(format!("state overflowed at step {}", i + 1)));
        }
        states.push(next);
    }
    Ok(states)
}

/// Iterates `x(i+1) = A(i) x(i)` for `steps` steps, annotating every state
/// with its sign data and recording which hypotheses held at every step.
pub fn simulate_linear(sys: &LinearTimeVaryingSystem, x0: &[f64], steps: usize) -> Result<LinearRun> {
    let mats = classify_steps(sys, steps)?;
    let states = run(sys, x0, &mats)?;
    let reports: Vec<SignRegularityReport> = mats.into_iter().map(|(_, r)| r).collect();
    Ok(LinearRun {
        record: TrajectoryRecord::annotated(states),
        hypotheses: StepHypotheses::from_reports(sys.n, &reports),
    })
}

/// If every `A(i)` is `SSR_k` and `s^-(x(0)) <= k - 1`, then
/// `s^+(x(i)) <= k - 1` for every `i >= 1`.
pub fn monitor_lemma1(run: &LinearRun, k: usize) -> Result<Report> {
    let n = run.record.dim();
    if k == 0 || k >= n {
        return invalid(format!("k = {k} must lie in 1..{}", n.saturating_sub(1)));
    }
    if !run.hypotheses.ssr_orders.contains(&k) {
        return Err(Error::HypothesisNotMet(format!("not every step matrix is SSR_{k}")));
    }
    let ann = &run.record.annotations;
    if ann[0].s_minus > k - 1 {
        return Err(Error::HypothesisNotMet(format!(
            "s^-(x(0)) = {} exceeds k - 1 = {}",
            ann[0].s_minus,
            k - 1
        )));
    }
    let violations: Vec<usize> = (1..ann.len()).filter(|&i| ann[i].s_plus > k - 1).collect();
    let mut report = Report::new(format!("bounded sign variation, k = {k}"));
    report.check(
        "s_plus_bound",
        "s^+(x(i)) <= k - 1 for all i >= 1",
        violations.is_empty(),
        json!({"violating_steps": violations}),
    );
    Ok(report)
}

/// For an SSR sequence: `s^+(x(i+1)) <= s^-(x(i))`, both counts are
/// non-increasing, and `x(i)` lies outside `V` for at most `n - 1` steps.
pub fn monitor_thm5(run: &LinearRun) -> Result<Report> {
    if !run.hypotheses.all_ssr {
        return Err(Error::HypothesisNotMet(format!(
            "step matrices are not SSR at steps {:?}",
            run.hypotheses.non_ssr_steps
        )));
    }
    Ok(variation_checks(&run.record, "sign variation along an SSR sequence"))
}

/// The checks shared by linear runs and differences of nonlinear solutions,
/// applied to the record's annotated sequence.
pub(crate) fn variation_checks(record: &TrajectoryRecord, subject: &str) -> Report {
    let n = record.dim();
    let ann = &record.annotations[..record.resolved_len()];
    let mut report = Report::new(subject);
    if ann.len() < record.annotations.len() {
        report.note(format!(
            "difference reached rounding level at step {}; later steps are not checked",
            ann.len()
        ));
    }

    let drops: Vec<usize> = (0..ann.len().saturating_sub(1))
        .filter(|&i| ann[i + 1].s_plus > ann[i].s_minus)
        .collect();
    report.check(
        "variation_decreases",
        "s^+(x(i+1)) <= s^-(x(i)) for all i",
        drops.is_empty(),
        json!({"violating_steps": drops}),
    );

    let monotone = ann
        .windows(2)
        .all(|w| w[1].s_minus <= w[0].s_minus && w[1].s_plus <= w[0].s_plus);
    report.check(
        "monotone_counts",
        "s^-(x(i)) and s^+(x(i)) are non-increasing in i",
        monotone,
        json!({
            "s_minus": ann.iter().map(|a| a.s_minus).collect::<Vec<_>>(),
            "s_plus": ann.iter().map(|a| a.s_plus).collect::<Vec<_>>(),
        }),
    );

    let outside: Vec<usize> = (0..ann.len()).filter(|&i| !ann[i].in_v).collect();
    report.check(
        "outside_v_count",
        "x(i) is not in V for at most n - 1 values of i",
        outside.len() < n.max(1),
        json!({"steps_outside_v": outside, "limit": n.saturating_sub(1)}),
    );
    report
}

/// Outcome of [`monitor_thm6`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingOutcome {
    /// First index from which `sign(x_1(i) - xbar_1(i))` stays constant.
    pub onset: usize,
    /// `1` if `x_1 > xbar_1` eventually, `-1` if `x_1 < xbar_1`.
    pub sign: i8,
    pub steps: usize,
    pub run: LinearRun,
}

/// Two distinct solutions of a TP sequence eventually satisfy
/// `x_1(i) > xbar_1(i)` or `x_1(i) < xbar_1(i)` for every later `i`.
///
/// The onset is only accepted when the constant sign persists for at least
/// `n` further steps; otherwise the horizon is reported as exhausted.
pub fn monitor_thm6(
    sys: &LinearTimeVaryingSystem,
    x0: &[f64],
    xbar0: &[f64],
    steps: usize,
) -> Result<OrderingOutcome> {
    if x0.len() != xbar0.len() {
        return invalid("initial states differ in length");
    }
    if x0 == xbar0 {
        return invalid("the two initial states coincide");
    }
    let mats = classify_steps(sys, steps)?;
    let reports: Vec<SignRegularityReport> = mats.iter().map(|(_, r)| r.clone()).collect();
    let hypotheses = StepHypotheses::from_reports(sys.n, &reports);
    if !hypotheses.all_tp {
        return Err(Error::HypothesisNotMet("not every step matrix is TP".into()));
    }
    let xs = run(sys, x0, &mats)?;
    let ys = run(sys, xbar0, &mats)?;
    let record = TrajectoryRecord::with_reference(xs, ys);

    let signs: Vec<i8> = record.annotations.iter().map(|a| a.first_sign).collect();
    let last = signs[steps];
    let mut onset = steps;
    while onset > 0 && signs[onset - 1] == last {
        onset -= 1;
    }
    let n = sys.n;
    if last == 0 || onset + n > steps {
        let z = difference(&record.states[steps], record.reference.as_ref().expect("pair")[steps].as_slice());
        return Err(Error::HorizonExhausted {
            steps,
            message: format!(
                "first coordinates not yet ordered for {n} consecutive steps (last difference {:e})",
                z[0]
            ),
        });
    }
    Ok(OrderingOutcome {
        onset,
        sign: last,
        steps,
        run: LinearRun { record, hypotheses },
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::fixtures::{pascal, random_tp};

    fn scaled(a: DenseMatrix) -> DenseMatrix {
        let s = 1.0 / a.norm_inf();
        a.scale(s).unwrap()
    }

    #[test]
    fn periodic_indexing() {
        let a = DenseMatrix::identity(2);
        let b = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]]).unwrap();
        let sys = LinearTimeVaryingSystem::periodic(vec![a, b]).unwrap();
        let run = simulate_linear(&sys, &[1.0, 1.0], 4).unwrap();
        assert_eq!(run.record.states[4], vec![4.0, 9.0]);
        assert_eq!(sys.period(), Some(2));
    }

    #[test]
    fn rejects_mismatched_sizes() {
        let sys = LinearTimeVaryingSystem::from_fn(2, |_| DenseMatrix::identity(3));
        assert!(simulate_linear(&sys, &[1.0, 2.0], 3).is_err());
        assert!(LinearTimeVaryingSystem::periodic(vec![]).is_err());
        let ok = LinearTimeVaryingSystem::time_invariant(DenseMatrix::identity(2)).unwrap();
        assert!(simulate_linear(&ok, &[1.0], 3).is_err());
    }

    #[test]
    fn tp_sequence_satisfies_variation_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let list: Vec<DenseMatrix> = (0..3).map(|_| scaled(random_tp(4, &mut rng))).collect();
        let sys = LinearTimeVaryingSystem::periodic(list).unwrap();
        let run = simulate_linear(&sys, &[1.0, -2.0, 3.0, -0.5], 30).unwrap();
        assert!(run.hypotheses.all_tp);
        let report = monitor_thm5(&run).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(run.record.annotations[1].s_plus <= 3);
        // TP maps send any nonzero vector to one with no variation eventually
        assert_eq!(run.record.annotations[30].s_minus, 0);
    }

    #[test]
    fn lemma_hypotheses() {
        let sys = LinearTimeVaryingSystem::time_invariant(scaled(pascal(4))).unwrap();
        let run = simulate_linear(&sys, &[1.0, -1.0, 2.0, 3.0], 5).unwrap();
        let report = monitor_lemma1(&run, 3).unwrap();
        assert!(report.passed());
        assert!(matches!(monitor_lemma1(&run, 1), Err(Error::HypothesisNotMet(_))));
        assert!(monitor_lemma1(&run, 4).is_err());
    }

    #[test]
    fn non_ssr_steps_are_refused() {
        let rot = DenseMatrix::from_rows(&[[0.0, -1.0], [1.0, 0.0]]).unwrap();
        let sys = LinearTimeVaryingSystem::time_invariant(rot).unwrap();
        let run = simulate_linear(&sys, &[1.0, 0.0], 4).unwrap();
        assert!(matches!(monitor_thm5(&run), Err(Error::HypothesisNotMet(_))));
    }

    #[test]
    fn eventual_ordering() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sys = LinearTimeVaryingSystem::time_invariant(scaled(random_tp(3, &mut rng))).unwrap();
        let out = monitor_thm6(&sys, &[1.0, 0.0, -1.0], &[0.0, 0.5, 0.2], 60).unwrap();
        assert!(out.onset + 3 <= 60);
        let signs: Vec<i8> = out.run.record.annotations[out.onset..].iter().map(|a| a.first_sign).collect();
        assert!(signs.iter().all(|&s| s == out.sign));
        assert!(monitor_thm6(&sys, &[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 10).is_err());
        let short = monitor_thm6(&sys, &[1.0, 0.0, -1.0], &[0.0, 0.5, 0.2], 2);
        assert!(matches!(short, Err(Error::HorizonExhausted { .. })));
    }
}
