use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::eigen::{EigenKind, SpectralData};
use crate::error::{invalid, Result};

/// Coefficients `c_p, ..., c_q` (1-based range) that match the eigenvectors
/// `v^p, ..., v^q`: real on real eigenvectors and conjugate across each pair,
/// so that `sum c_i v^i` is real.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingCoefficients {
    pub range: (usize, usize),
    pub values: Vec<Complex64>,
}

impl MatchingCoefficients {
    /// Checks realness/conjugacy against `spec` and that not all are zero.
    pub fn validate(&self, spec: &SpectralData) -> Result<()> {
        let (p, q) = self.range;
        check_range(spec, p, q)?;
        if self.values.len() != q - p + 1 {
            return invalid("coefficient count does not match the range");
        }
        if self.values.iter().all(|c| c.norm() == 0.0) {
            return invalid("matching coefficients are all zero");
        }
        for (off, c) in self.values.iter().enumerate() {
            let i = p - 1 + off;
            match spec.kinds[i] {
                EigenKind::Real if c.im != 0.0 => {
                    return invalid(format!("coefficient {} must be real", i + 1));
                }
                EigenKind::PairSecond if *c != self.values[off - 1].conj() => {
                    return invalid(format!("coefficient {} must conjugate its partner", i + 1));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn check_range(spec: &SpectralData, p: usize, q: usize) -> Result<()> {
    let n = spec.n();
    if p == 0 || p > q || q > n {
        return invalid(format!("invalid eigenvector range {p}..{q} for n = {n}"));
    }
    if !spec.closed_range(p - 1, q - 1) {
        return invalid(format!("range {p}..{q} splits a conjugate pair"));
    }
    Ok(())
}

/// Draws matching coefficients: standard normal on real eigenvectors, a
/// complex normal `c` and its conjugate on each pair.
pub fn random_matching(
    spec: &SpectralData,
    p: usize,
    q: usize,
    rng: &mut impl Rng,
) -> Result<MatchingCoefficients> {
    check_range(spec, p, q)?;
    let mut values = Vec::with_capacity(q - p + 1);
    for i in p - 1..q {
        let c = match spec.kinds[i] {
            EigenKind::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
            EigenKind::PairFirst => {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            }
            EigenKind::PairSecond => values.last().copied().map(|c: Complex64| c.conj()).expect("pair"),
        };
        values.push(c);
    }
    Ok(MatchingCoefficients { range: (p, q), values })
}

/// `sum c_i v^i` split into real part and the max-norm of its imaginary part.
pub fn combine(spec: &SpectralData, coeffs: &MatchingCoefficients) -> (Vec<f64>, f64) {
    let n = spec.n();
    let (p, _) = coeffs.range;
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    for (off, c) in coeffs.values.iter().enumerate() {
        for (a, v) in acc.iter_mut().zip(&spec.eigenvectors[p - 1 + off]) {
            *a += c * v;
        }
    }
    let imag = acc.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    (acc.iter().map(|z| z.re).collect(), imag)
}
