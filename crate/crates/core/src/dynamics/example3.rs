use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::nonlinear::{BoxDomain, NonlinearSystem};
use crate::error::{invalid, Result};
use crate::matrix::DenseMatrix;

/// Longest period searched for when deriving the common period of the
/// coefficients.
pub const MAX_PERIOD: usize = 10_000;

/// A coefficient `c(i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficient {
    Constant { value: f64 },
    /// `offset + amplitude * sin(frequency * i + phase)`.
    Sinusoid { offset: f64, amplitude: f64, frequency: f64, phase: f64 },
}

impl Coefficient {
    pub fn sinusoid(offset: f64, amplitude: f64, frequency: f64, phase: f64) -> Self {
        Coefficient::Sinusoid { offset, amplitude, frequency, phase }
    }

    pub fn eval(&self, i: usize) -> f64 {
        match *self {
            Coefficient::Constant { value } => value,
            Coefficient::Sinusoid { offset, amplitude, frequency, phase } => {
                offset + amplitude * (frequency * i as f64 + phase).sin()
            }
        }
    }

    /// Bounds over all `i`.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            Coefficient::Constant { value } => (value, value),
            Coefficient::Sinusoid { offset, amplitude, .. } => (offset - amplitude.abs(), offset + amplitude.abs()),
        }
    }

    fn period(&self) -> Option<usize> {
        match *self {
            Coefficient::Constant { .. } => Some(1),
            Coefficient::Sinusoid { amplitude, .. } if amplitude == 0.0 => Some(1),
            Coefficient::Sinusoid { frequency, .. } => (1..=MAX_PERIOD).find(|&p| {
                let turns = frequency * p as f64 / TAU;
                (turns - turns.round()).abs() <= 1e-9 * turns.abs().max(1.0)
            }),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Coefficients `c[p][q]` of
/// `f_p(i, x) = c_p1(i) x_1 / (1 + x_1) + c_p2(i) x_2 / (1 + x_2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example3Spec {
    pub c: [[Coefficient; 2]; 2],
}

impl Default for Example3Spec {
    fn default() -> Self {
        Example3Spec {
            c: [
                [
                    Coefficient::sinusoid(5.0, 1.0, FRAC_PI_2, 0.2),
                    Coefficient::sinusoid(2.0, 1.0, FRAC_PI_2, 0.0),
                ],
                [
                    Coefficient::Constant { value: 1.5 },
                    Coefficient::sinusoid(5.0, 1.0, 2.0 * PI, 4.0),
                ],
            ],
        }
    }
}

/// Validated two-dimensional saturating system on `[0, 2 beta]^2`, where
/// `alpha < c_pq(i) < beta` and `c_11 c_22 - c_12 c_21 > gamma > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Example3 {
    spec: Example3Spec,
    period: Option<usize>,
    domain: BoxDomain,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Builds the system, deriving the common period of the coefficients and
/// checking the positivity and determinant conditions.
pub fn example3_system(spec: Example3Spec) -> Result<Example3> {
    let coeffs: Vec<&Coefficient> = spec.c.iter().flatten().collect();
    if coeffs.iter().any(|c| {
        let (lo, hi) = c.range();
        !(lo.is_finite() && hi.is_finite())
    }) {
        return invalid("coefficients must be finite");
    }
    let period = coeffs
        .iter()
        .map(|c| c.period())
        .try_fold(1usize, |acc, p| p.map(|p| acc / gcd(acc, p) * p))
        .filter(|&t| t <= MAX_PERIOD);

    let alpha = coeffs.iter().map(|c| c.range().0).fold(f64::INFINITY, f64::min);
    let beta = coeffs.iter().map(|c| c.range().1).fold(f64::NEG_INFINITY, f64::max);
    if alpha <= 0.0 {
        return invalid(format!("coefficients must stay positive (lower bound {alpha})"));
    }
    let det_at = |i: usize| spec.c[0][0].eval(i) * spec.c[1][1].eval(i) - spec.c[0][1].eval(i) * spec.c[1][0].eval(i);
    let gamma = match period {
        Some(t) => (0..t).map(det_at).fold(f64::INFINITY, f64::min),
        None => {
            let r = |p: usize, q: usize| spec.c[p][q].range();
            r(0, 0).0 * r(1, 1).0 - r(0, 1).1 * r(1, 0).1
        }
    };
    if gamma <= 0.0 {
        return invalid(format!("c11 c22 - c12 c21 must stay positive (lower bound {gamma})"));
    }
    let v = 2.0 * beta;
    let domain = BoxDomain::new(vec![0.0, 0.0], vec![v, v])?;
    Ok(Example3 { spec, period, domain, alpha, beta, gamma })
}

impl Example3 {
    pub fn defaults() -> Self {
        example3_system(Example3Spec::default()).expect("default coefficients are valid")
    }

    pub fn spec(&self) -> &Example3Spec {
        &self.spec
    }

    /// Coefficient matrix `C(i)`.
    pub fn coefficients(&self, i: usize) -> [[f64; 2]; 2] {
        let i = self.period.map_or(i, |t| i % t);
        let c = &self.spec.c;
        [[c[0][0].eval(i), c[0][1].eval(i)], [c[1][0].eval(i), c[1][1].eval(i)]]
    }

    /// The time-invariant system with coefficients frozen at step `i`.
    pub fn frozen(&self, i: usize) -> Example3 {
        let c = self.coefficients(i);
        let k = |v: f64| Coefficient::Constant { value: v };
        let spec = Example3Spec { c: [[k(c[0][0]), k(c[0][1])], [k(c[1][0]), k(c[1][1])]] };
        example3_system(spec).expect("frozen coefficients satisfy the same bounds")
    }
}

impl NonlinearSystem for Example3 {
    fn dim(&self) -> usize {
        2
    }

    fn map(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let c = self.coefficients(i);
        let s = [x[0] / (1.0 + x[0]), x[1] / (1.0 + x[1])];
        vec![c[0][0] * s[0] + c[0][1] * s[1], c[1][0] * s[0] + c[1][1] * s[1]]
    }

    fn jacobian(&self, i: usize, x: &[f64]) -> DenseMatrix {
        let c = self.coefficients(i);
        let d = [(1.0 + x[0]).powi(-2), (1.0 + x[1]).powi(-2)];
        DenseMatrix::from_rows(&[[c[0][0] * d[0], c[0][1] * d[1]], [c[1][0] * d[0], c[1][1] * d[1]]])
            .expect("2x2")
    }

    fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    fn period(&self) -> Option<usize> {
        self.period
    }

    // ∫_0^1 (1 + r a + (1 - r) b)^-2 dr = 1 / ((1 + a)(1 + b))
    fn closed_form_averaged_jacobian(&self, i: usize, a: &[f64], b: &[f64]) -> Option<DenseMatrix> {
        let c = self.coefficients(i);
        let d = [1.0 / ((1.0 + a[0]) * (1.0 + b[0])), 1.0 / ((1.0 + a[1]) * (1.0 + b[1]))];
        DenseMatrix::from_rows(&[[c[0][0] * d[0], c[0][1] * d[1]], [c[1][0] * d[0], c[1][1] * d[1]]]).ok()
    }
}
