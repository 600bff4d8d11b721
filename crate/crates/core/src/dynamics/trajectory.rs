use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sign_variation::{classify as sign_of, SignVector};

/// Zero threshold for annotations, relative to the vector's max-norm.
pub const ANNOTATION_ZERO_TOL: f64 = 1e-11;

/// A difference `x - xbar` smaller than this multiple of the states' size is
/// rounding noise and its signs carry no information.
pub const RESOLUTION_TOL: f64 = 1e-10;

/// Sign data of one annotated vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepAnnotation {
    pub s_minus: usize,
    pub s_plus: usize,
    #[serde(rename = "in_V")]
    pub in_v: bool,
    /// Sign of the first coordinate (`0` if it is numerically zero).
    pub first_sign: i8,
    /// False once a difference has sunk below [`RESOLUTION_TOL`].
    #[serde(default = "resolved_default")]
    pub resolved: bool,
}

fn resolved_default() -> bool {
    true
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl StepAnnotation {
    pub fn of(v: &[f64]) -> Self {
        let sv = SignVector::relative(v.to_vec(), ANNOTATION_ZERO_TOL).expect("non-empty finite state");
        let first_sign = sign_of(v[0], sv.zero_tol());
        StepAnnotation {
            s_minus: sv.s_minus(),
            s_plus: sv.s_plus(),
            in_v: sv.in_v(),
            first_sign,
            resolved: true,
        }
    }

    fn of_difference(x: &[f64], y: &[f64]) -> Self {
        let z = difference(x, y);
        let mut a = Self::of(&z);
        a.resolved = sup_norm(&z) > RESOLUTION_TOL * sup_norm(x).max(sup_norm(y));
        a
    }
}

/// States `x(0..=N)` of a simulation, optionally a reference trajectory
/// `xbar`, and per-step sign annotations of the annotated sequence: `x` itself
/// for linear systems, `z = x - xbar` when a reference is present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub states: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<Vec<f64>>>,
    pub annotations: Vec<StepAnnotation>,
}

impl TrajectoryRecord {
    /// Record without annotations.
    pub fn plain(states: Vec<Vec<f64>>) -> Self {
        TrajectoryRecord { states, reference: None, annotations: Vec::new() }
    }

    /// Record annotated with the states themselves.
    pub fn annotated(states: Vec<Vec<f64>>) -> Self {
        let annotations = states.iter().map(|x| StepAnnotation::of(x)).collect();
        TrajectoryRecord { states, reference: None, annotations }
    }

    /// Record of `x` annotated with `z = x - xbar`.
    pub fn with_reference(states: Vec<Vec<f64>>, reference: Vec<Vec<f64>>) -> Self {
        let annotations = states
            .iter()
            .zip(&reference)
            .map(|(x, y)| StepAnnotation::of_difference(x, y))
            .collect();
        TrajectoryRecord { states, reference: Some(reference), annotations }
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// Number of steps `N` (states hold `N + 1` points).
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    /// Number of leading annotations whose signs are meaningful.
    pub fn resolved_len(&self) -> usize {
        self.annotations.iter().position(|a| !a.resolved).unwrap_or(self.annotations.len())
    }

    /// The annotated sequence: `x - xbar` if a reference is present, else `x`.
    pub fn annotated_vectors(&self) -> Vec<Vec<f64>> {
        match &self.reference {
            Some(r) => self.states.iter().zip(r).map(|(x, y)| difference(x, y)).collect(),
            None => self.states.clone(),
        }
    }

    /// CSV with header `i,x1,...,xn` followed by `s_minus,s_plus,in_V` when
    /// annotations are present.
    pub fn to_csv(&self) -> String {
        let n = self.dim();
        let mut out = String::from("i");
        for j in 1..=n {
            let _ = write!(out, ",x{j}");
        }
        let annotated = !self.annotations.is_empty();
        if annotated {
            out.push_str(",s_minus,s_plus,in_V");
        }
        out.push('\n');
        for (i, x) in self.states.iter().enumerate() {
            let _ = write!(out, "{i}");
            for v in x {
                let _ = write!(out, ",{v}");
            }
            if annotated {
                let a = &self.annotations[i];
                let _ = write!(out, ",{},{},{}", a.s_minus, a.s_plus, a.in_v);
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn difference(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn sup_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Outcome of [`detect_periodicity`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Periodicity {
    pub period: usize,
    pub converged: bool,
    /// Smallest `i` with `||x(j+T) - x(j)|| < eps` for every later `j`.
    pub onset: Option<usize>,
    /// `max ||x(i+T) - x(i)||_inf` over the last `window` indices.
    pub residual: f64,
    /// The same residual for every divisor of `T`; the limit may have a
    /// smaller period than the forcing.
    pub divisor_residuals: Vec<(usize, f64)>,
    pub eps: f64,
    pub window: usize,
}

fn window_residual(states: &[Vec<f64>], shift: usize, window: usize) -> f64 {
    let last = states.len() - 1 - shift;
    (last + 1 - window..=last)
        .map(|i| sup_distance(&states[i + shift], &states[i]))
        .fold(0.0, f64::max)
}

/// Decides whether the trajectory has settled onto a `T`-periodic pattern:
/// `||x(i+T) - x(i)||_inf < eps` for each of the last `window` admissible `i`.
pub fn detect_periodicity(
    record: &TrajectoryRecord,
    period: usize,
    eps: f64,
    window: usize,
) -> Result<Periodicity> {
    if period == 0 || window == 0 {
        return invalid("period and window must be positive");
    }
    let states = &record.states;
    if states.len() <= period + window {
        return invalid(format!(
            "horizon too short: {} states for period {period} and window {window}",
            states.len()
        ));
    }
    let residual = window_residual(states, period, window);
    let converged = residual < eps;
    let onset = converged.then(|| {
        let mut onset = states.len() - 1 - period;
        while onset > 0 && sup_distance(&states[onset - 1 + period], &states[onset - 1]) < eps {
            onset -= 1;
        }
        onset
    });
    let divisor_residuals = (1..=period)
        .filter(|d| period % d == 0)
        .map(|d| (d, window_residual(states, d, window)))
        .collect();
    Ok(Periodicity {
        period,
        converged,
        onset,
        residual,
        divisor_residuals,
        eps,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let r = TrajectoryRecord::annotated(vec![vec![1.0, -0.5], vec![0.25, 0.0]]);
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i,x1,x2,s_minus,s_plus,in_V");
        assert_eq!(lines[1], "0,1,-0.5,1,1,true");
        assert_eq!(lines[2], "1,0.25,0,0,1,false");
        let plain = TrajectoryRecord::plain(vec![vec![3.0]]);
        assert_eq!(plain.to_csv(), "i,x1\n0,3\n");
    }

    #[test]
    fn annotations_are_derived_data() {
        let states = vec![vec![1.0, 2.0, -1.0], vec![0.0, 1.0, 1.0]];
        let r = TrajectoryRecord::annotated(states.clone());
        let again: Vec<StepAnnotation> = states.iter().map(|x| StepAnnotation::of(x)).collect();
        assert_eq!(r.annotations, again);
        assert_eq!(r.annotations[1].first_sign, 0);
    }

    #[test]
    fn constant_trajectory_is_periodic_for_any_period() {
        let r = TrajectoryRecord::plain(vec![vec![2.0, 3.0]; 20]);
        for t in 1..=4 {
            let p = detect_periodicity(&r, t, 1e-6, 2 * t).unwrap();
            assert!(p.converged);
            assert_eq!(p.residual, 0.0);
            assert_eq!(p.onset, Some(0));
        }
    }

    #[test]
    fn periodic_tail_and_onset() {
        // transient decaying into a period-2 orbit
        let states: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let base = if i % 2 == 0 { 1.0 } else { -1.0 };
                let transient = if i < 10 { 1.0 / (i as f64 + 1.0) } else { 0.0 };
                vec![base + transient]
            })
            .collect();
        let r = TrajectoryRecord::plain(states);
        let p = detect_periodicity(&r, 2, 1e-9, 4).unwrap();
        assert!(p.converged);
        assert_eq!(p.onset, Some(10));
        assert!(!detect_periodicity(&r, 3, 1e-9, 6).unwrap().converged);
        let four = detect_periodicity(&r, 4, 1e-9, 8).unwrap();
        assert_eq!(four.divisor_residuals.len(), 3);
        assert!(four.divisor_residuals[0].1 > 1.0);
        assert!(detect_periodicity(&r, 30, 1e-9, 10).is_err());
    }
}
