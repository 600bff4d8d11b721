//! Dense real matrices, 1-based index sets and the plain-text matrix format.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Real `rows x cols` matrix stored row-major. Every entry is finite.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return invalid(format!("matrix dimensions must be positive, got {rows}x{cols}"));
        }
        if entries.len() != rows * cols {
            return invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            ));
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return invalid(format!(
                "entry ({}, {}) is not finite",
                pos / cols + 1,
                pos % cols + 1
            ));
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return invalid("matrix must have at least one row");
        };
        let cols = first.as_ref().len();
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return invalid(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    row.len()
                ));
            }
            entries.extend_from_slice(row);
        }
        DenseMatrix::new(rows.len(), cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        DenseMatrix { rows: n, cols: n, entries }
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![0.0; n * n];
        for (i, d) in diag.iter().enumerate() {
            entries[i * n + i] = *d;
        }
        DenseMatrix::new(n, n, entries)
    }

    /// `diag(1, -1, 1, ..., (-1)^(n+1))`.
    pub fn alternating_signs(n: usize) -> Self {
        let d: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        DenseMatrix::diagonal(&d).expect("finite diagonal")
    }

    /// Column vector from a slice.
    pub fn column(values: &[f64]) -> Result<Self> {
        DenseMatrix::new(values.len(), 1, values.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry at zero-based `(r, c)`.
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column_vec(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c));
            }
        }
        DenseMatrix { rows: self.cols, cols: self.rows, entries }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut entries = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        DenseMatrix::new(self.rows, other.cols, entries)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return invalid(format!(
                "vector of length {} does not match {} columns",
                x.len(),
                self.cols
            ));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        DenseMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|v| v * factor).collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Submatrix from zero-based row and column positions.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                out.push(self.get(r, c));
            }
        }
        out
    }

    pub fn det(&self) -> Result<f64> {
        if !self.is_square() {
            return invalid(format!(
                "determinant needs a square matrix, got {}x{}",
                self.rows, self.cols
            ));
        }
        Ok(lu_det(self.entries.clone(), self.rows))
    }

    /// Threshold below which `|det(A)|` counts as zero: `1e-13` times the
    /// Hadamard bound (the smaller of the products of row and of column
    /// 2-norms), which bounds `|det(A)|` and scales with it.
    pub fn singularity_threshold(&self) -> f64 {
        let n = self.rows;
        let row: f64 = (0..n)
            .map(|r| self.row(r).iter().map(|x| x * x).sum::<f64>().sqrt())
            .product();
        let col: f64 = (0..self.cols)
            .map(|c| (0..n).map(|r| self.get(r, c).powi(2)).sum::<f64>().sqrt())
            .product();
        1e-13 * row.min(col)
    }

    /// Returns `det(A)` or a singular-matrix error.
    pub fn nonsingular_det(&self) -> Result<f64> {
        let det = self.det()?;
        let threshold = self.singularity_threshold();
        if det.abs() <= threshold {
            return Err(Error::SingularMatrix { det, threshold });
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.nonsingular_det()?;
        let n = self.rows;
        let lu = Lu::factor(self.entries.clone(), n);
        let mut inv = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        for c in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            let x = lu.solve(&e);
            for r in 0..n {
                inv[r * n + c] = x[r];
            }
        }
        DenseMatrix::new(n, n, inv)
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Result<Self> {
        let mut entries = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                entries.push(m[(r, c)]);
            }
        }
        DenseMatrix::new(m.nrows(), m.ncols(), entries)
    }

    /// Parses either the `n m` header format or header-less CSV.
    ///
    /// Text containing a comma is read as CSV; anything else must start with
    /// an `n m` header followed by `n` rows of `m` numbers.
    pub fn parse(text: &str) -> Result<Self> {
        if text.contains(',') {
            parse_csv(text)
        } else {
            parse_headed(text)
        }
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        DenseMatrix::parse(&text)
    }

    /// Renders the `n m` header format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {:?}", tok.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value {:?}", tok.trim()),
        });
    }
    Ok(v)
}

fn parse_headed(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::Parse {
        line: hline,
        message: format!("expected header \"n m\", got {header:?}"),
    };
    if dims.len() != 2 {
        return Err(bad_header());
    }
    let n: usize = dims[0].parse().map_err(|_| bad_header())?;
    let m: usize = dims[1].parse().map_err(|_| bad_header())?;
    if n == 0 || m == 0 {
        return Err(bad_header());
    }
    let mut entries = Vec::with_capacity(n * m);
    let mut seen = 0;
    for (lineno, line) in lines {
        if seen == n {
            return Err(Error::Parse {
                line: lineno,
                message: format!("more than the {n} declared rows"),
            });
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != m {
            return Err(Error::Parse {
                line: lineno,
                message: format!("row has {} entries, expected {m}", toks.len()),
            });
        }
        for t in toks {
            entries.push(parse_number(t, lineno)?);
        }
        seen += 1;
    }
    if seen != n {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("found {seen} rows, expected {n}"),
        });
    }
    DenseMatrix::new(n, m, entries).map_err(|e| Error::Parse {
        line: hline,
        message: e.to_string(),
    })
}

fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| parse_number(t, lineno))
            .collect::<Result<Vec<f64>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("ragged row: {} fields, expected {w}", row.len()),
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "empty input".into(),
        });
    }
    DenseMatrix::from_rows(&rows).map_err(|e| Error::Parse {
        line: 1,
        message: e.to_string(),
    })
}

/// LU factorization with partial pivoting on a row-major square buffer.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub(crate) fn factor(mut a: Vec<f64>, n: usize) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for r in k + 1..n {
                let v = a[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for r in k + 1..n {
                let f = a[r * n + k] / pivot;
                a[r * n + k] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        a[r * n + c] -= f * a[k * n + c];
                    }
                }
            }
        }
        Lu { n, lu: a, perm, sign, singular }
    }

    pub(crate) fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.n).fold(self.sign, |d, i| d * self.lu[i * self.n + i])
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.lu[i * n + j] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.lu[i * n + j] * y[j];
            }
            y[i] /= self.lu[i * n + i];
        }
        y
    }
}

/// Determinant of a row-major `k x k` buffer: closed forms for `k <= 3`,
/// partial-pivoting LU above.
pub(crate) fn small_det(a: &[f64], k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => lu_det(a.to_vec(), k),
    }
}

pub(crate) fn lu_det(a: Vec<f64>, n: usize) -> f64 {
    Lu::factor(a, n).det()
}

/// Strictly increasing list of 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.first() == Some(&0) {
            return invalid("index sets are 1-based; found index 0");
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("indices must be strictly increasing: {indices:?}"));
        }
        Ok(IndexSet(indices))
    }

    /// `{1, ..., k}`.
    pub fn leading(k: usize) -> Self {
        IndexSet((1..=k).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i - 1).collect()
    }

    /// `{1, ..., n}` minus this set, increasing.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet((1..=n).filter(|i| !self.0.contains(i)).collect())
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `k`-subsets of `{1..n}` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        current: if k <= n { Some((1..=k).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let cur = self.current.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        let mut i = k;
        while i > 0 {
            i -= 1;
            if next[i] < self.n - (k - 1 - i) {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(IndexSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let all: Vec<Vec<usize>> = combinations(4, 2).map(|s| s.0).collect();
        assert_eq!(
            all,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        assert_eq!(combinations(5, 0).count(), 1);
        assert_eq!(combinations(3, 4).count(), 0);
        for n in 1..8 {
            for k in 0..=n {
                assert_eq!(combinations(n, k).count(), binomial(n, k));
            }
        }
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![1, 3, 4]).is_ok());
        assert!(IndexSet::new(vec![0, 1]).is_err());
        assert!(IndexSet::new(vec![2, 2]).is_err());
        assert!(IndexSet::new(vec![3, 1]).is_err());
        let s = IndexSet::new(vec![2, 4]).unwrap();
        assert_eq!(s.complement(5).indices(), &[1, 3, 5]);
        assert_eq!(s.to_string(), "{2,4}");
    }

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn parses_headed_format() {
        let m = DenseMatrix::parse("2 3\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.get(1, 2), 6.0);
        let one = DenseMatrix::parse("1 1 \n 5").unwrap();
        assert_eq!(one.get(0, 0), 5.0);
        assert_eq!(DenseMatrix::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parses_csv_and_reports_ragged_line() {
        let m = DenseMatrix::parse("1,2\n3,4\n").unwrap();
        assert_eq!(m.get(1, 0), 3.0);
        match DenseMatrix::parse("1,2\n3,4\n5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match DenseMatrix::parse("2 2\n1 2\n3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            DenseMatrix::parse("2 2\n1 x\n3 4"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(DenseMatrix::parse("3 1\n1\n2\n").is_err());
    }

    #[test]
    fn det_inverse_and_products() {
        let a = DenseMatrix::from_rows(&[[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]]).unwrap();
        assert!((a.det().unwrap() - 18.0).abs() < 1e-12);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((prod.get(r, c) - expect).abs() < 1e-12);
            }
        }
        let singular = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(singular.inverse(), Err(Error::SingularMatrix { .. })));
        // 5x5 goes through the LU path of small_det as well
        let d = DenseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert!((small_det(d.entries(), 5) - 120.0).abs() < 1e-12);
    }
}
