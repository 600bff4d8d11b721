//! Sign-variation counters: `s^-`, `s^+`, their cyclic and odd variants,
//! the set `V = {y : s^-(y) = s^+(y)}` and "oscillate in the same way".

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Entries with `|y_i| <= DEFAULT_ZERO_TOL` count as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// A non-empty real vector together with the threshold used to decide which
/// entries are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignVector {
    entries: Vec<f64>,
    zero_tol: f64,
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        SignVector::with_tol(entries, DEFAULT_ZERO_TOL)
    }

    pub fn with_tol(entries: Vec<f64>, zero_tol: f64) -> Result<Self> {
        if entries.is_empty() {
            return invalid("sign variation of an empty vector");
        }
        if !(zero_tol >= 0.0) {
            return invalid(format!("zero tolerance must be non-negative, got {zero_tol}"));
        }
        if entries.iter().any(|v| v.is_nan()) {
            return invalid("vector contains NaN");
        }
        let signs = entries.iter().map(|&v| classify(v, zero_tol)).collect();
        Ok(SignVector { entries, zero_tol, signs })
    }

    /// Threshold relative to the max-norm: `rel * max_i |y_i|`.
    pub fn relative(entries: Vec<f64>, rel: f64) -> Result<Self> {
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        SignVector::with_tol(entries, rel * scale)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    /// Sign pattern after thresholding: each entry is -1, 0 or 1.
    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn is_zero(&self) -> bool {
        self.signs.iter().all(|s| *s == 0)
    }

    pub fn s_minus(&self) -> usize {
        s_minus(&self.signs)
    }

    pub fn s_plus(&self) -> usize {
        s_plus(&self.signs)
    }

    pub fn s_minus_cyclic(&self) -> Result<usize> {
        self.nonzero_for("cyclic")?;
        Ok(s_minus_cyclic(&self.signs))
    }

    pub fn s_plus_cyclic(&self) -> Result<usize> {
        self.nonzero_for("cyclic")?;
        Ok(s_plus_cyclic(&self.signs))
    }

    pub fn s_odd(&self, variant: Variant) -> usize {
        let s = match variant {
            Variant::Minus => self.s_minus(),
            Variant::Plus => self.s_plus(),
        };
        s | 1
    }

    pub fn in_v(&self) -> bool {
        self.s_minus() == self.s_plus()
    }

    fn nonzero_for(&self, what: &str) -> Result<()> {
        if self.is_zero() {
            return invalid(format!("{what} sign variation is undefined for the zero vector"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Plus,
    Minus,
}

#[inline]
pub fn classify(v: f64, zero_tol: f64) -> i8 {
    if v > zero_tol {
        1
    } else if v < -zero_tol {
        -1
    } else {
        0
    }
}

/// Sign changes after deleting zeros.
pub fn s_minus(signs: &[i8]) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for &s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Maximal sign changes over all `±1` replacements of the zeros.
///
/// Linear scan keeping, for each possible sign of the current entry, the
/// best count achievable so far.
pub fn s_plus(signs: &[i8]) -> usize {
    s_plus_with_ends(signs, None)
}

/// `s_plus` where the first and last entries, if zero, must receive `tied`.
fn s_plus_with_ends(signs: &[i8], tied: Option<i8>) -> usize {
    const NEG: i64 = i64::MIN / 4;
    let last_idx = signs.len() - 1;
    // best[0]: current entry resolved to -1, best[1]: resolved to +1
    let mut best = [NEG, NEG];
    for (i, &s) in signs.iter().enumerate() {
        let forced = if s != 0 {
            Some(s)
        } else if i == 0 || i == last_idx {
            tied
        } else {
            None
        };
        let allowed = |t: i8| forced.is_none_or(|f| f == t);
        let mut next = [NEG, NEG];
        for (slot, t) in [(0usize, -1i8), (1, 1)] {
            if !allowed(t) {
                continue;
            }
            next[slot] = if i == 0 {
                0
            } else {
                best[slot].max(best[1 - slot] + 1)
            };
        }
        best = next;
    }
    best[0].max(best[1]).max(0) as usize
}

/// Cyclic `s^-`: maximum over rotations of `y_i, ..., y_n, y_1, ..., y_i`.
/// The caller guarantees a non-zero pattern.
pub fn s_minus_cyclic(signs: &[i8]) -> usize {
    let n = signs.len();
    (0..n)
        .map(|i| {
            let rotated: Vec<i8> = (0..=n).map(|j| signs[(i + j) % n]).collect();
            s_minus(&rotated)
        })
        .max()
        .unwrap_or(0)
}

/// Cyclic `s^+`: as `s_minus_cyclic`, but a zero at the duplicated position
/// receives the same replacement at both ends.
pub fn s_plus_cyclic(signs: &[i8]) -> usize {
    let n = signs.len();
    (0..n)
        .map(|i| {
            let rotated: Vec<i8> = (0..=n).map(|j| signs[(i + j) % n]).collect();
            if signs[i] == 0 {
                s_plus_with_ends(&rotated, Some(1)).max(s_plus_with_ends(&rotated, Some(-1)))
            } else {
                s_plus(&rotated)
            }
        })
        .max()
        .unwrap_or(0)
}

/// Explicit description of `V`: non-zero endpoints, and every interior zero
/// sits between two entries of opposite sign.
pub fn in_v_by_pattern(signs: &[i8]) -> bool {
    let n = signs.len();
    if signs[0] == 0 || signs[n - 1] == 0 {
        return false;
    }
    (1..n.saturating_sub(1)).all(|i| signs[i] != 0 || signs[i - 1] * signs[i + 1] < 0)
}

/// Same `s^-` and same sign of the first non-zero entry.
pub fn oscillate_same_way(v: &SignVector, w: &SignVector) -> Result<bool> {
    if v.len() != w.len() {
        return invalid(format!(
            "vectors have different lengths {} and {}",
            v.len(),
            w.len()
        ));
    }
    let first = |x: &SignVector| x.signs().iter().copied().find(|s| *s != 0);
    match (first(v), first(w)) {
        (Some(a), Some(b)) => Ok(v.s_minus() == w.s_minus() && a == b),
        _ => invalid("oscillation comparison needs non-zero vectors"),
    }
}
