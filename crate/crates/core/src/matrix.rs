//! Sign matrices, row prefixes, sampling and exhaustive enumeration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::subset::{ColumnSet, MAX_N};

/// Enumeration is limited to `n * n <= 20` (at most 2^20 matrices).
pub const MAX_ENUMERATION_CELLS: usize = 20;

fn check_dimension(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfRange { n, min: 1, max: MAX_N })
    }
}

fn check_signs(row: &[i8]) -> Result<()> {
    match row.iter().find(|&&v| v != 1 && v != -1) {
        Some(&bad) => Err(Error::NotASign(bad as i64)),
        None => Ok(()),
    }
}

/// Square matrix with entries in `{-1, +1}`, stored row-major.
///
/// The `0 x 0` matrix is representable so that empty minors have a value
/// (permanent and determinant 1); every sampler requires `n >= 1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn from_rows(rows: Vec<Vec<i8>>) -> Result<Self> {
        let n = rows.len();
        if n > MAX_N {
            return Err(Error::DimensionOutOfRange { n, min: 0, max: MAX_N });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::RowLength { expected: n, got: row.len() });
            }
            check_signs(row)?;
            entries.extend_from_slice(row);
        }
        Ok(Self { n, entries })
    }

    pub fn from_flat(n: usize, entries: Vec<i8>) -> Result<Self> {
        if n > MAX_N {
            return Err(Error::DimensionOutOfRange { n, min: 0, max: MAX_N });
        }
        if entries.len() != n * n {
            return Err(Error::RowLength { expected: n * n, got: entries.len() });
        }
        check_signs(&entries)?;
        Ok(Self { n, entries })
    }

    pub fn constant(n: usize, sign: i8) -> Result<Self> {
        check_dimension(n)?;
        check_signs(&[sign])?;
        Ok(Self { n, entries: vec![sign; n * n] })
    }

    pub fn all_ones(n: usize) -> Result<Self> {
        Self::constant(n, 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// The `|cols| x |cols|` submatrix on the first `|cols|` rows.
    pub fn leading_minor(&self, cols: ColumnSet) -> SignMatrix {
        let k = cols.len();
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            entries.extend(cols.iter().map(|j| self.get(i, j)));
        }
        SignMatrix { n: k, entries }
    }

    /// Submatrix on arbitrary row and column index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<SignMatrix> {
        if rows.len() != cols.len() {
            return Err(Error::Precondition("submatrix must be square".into()));
        }
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                entries.push(self.get(i, j));
            }
        }
        Ok(SignMatrix { n: rows.len(), entries })
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.entries.swap(a * self.n + j, b * self.n + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.n {
            self.entries.swap(i * self.n + a, i * self.n + b);
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for v in &mut self.entries[i * self.n..(i + 1) * self.n] {
            *v = -*v;
        }
    }

    /// Applies a column permutation: new column `j` is old column `perm[j]`.
    pub fn permute_cols(&self, perm: &[usize]) -> SignMatrix {
        assert_eq!(perm.len(), self.n);
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.n {
            entries.extend(perm.iter().map(|&j| self.get(i, j)));
        }
        SignMatrix { n: self.n, entries }
    }

    /// Text fixture format: `n` on the first line, then `n` lines of
    /// space-separated `1` / `-1` entries.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for row in self.rows() {
            let line: Vec<&str> = row.iter().map(|&v| if v == 1 { "1" } else { "-1" }).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parses the fixture format; accepts `+1` as well as `1`.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse { line: line_no, msg: format!("expected dimension, got {header:?}") })?;
        if n > MAX_N {
            return Err(Error::DimensionOutOfRange { n, min: 0, max: MAX_N });
        }
        let mut rows = Vec::with_capacity(n);
        for (line_no, line) in lines.by_ref().take(n) {
            let row = line
                .split_whitespace()
                .map(|tok| match tok {
                    "1" | "+1" => Ok(1i8),
                    "-1" => Ok(-1i8),
                    other => Err(Error::Parse { line: line_no, msg: format!("bad entry {other:?}") }),
                })
                .collect::<Result<Vec<i8>>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse { line: line_no + rows.len() + 1, msg: format!("expected {n} rows") });
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Parse { line: line_no, msg: "trailing content".into() });
        }
        SignMatrix::from_rows(rows)
    }
}

impl fmt::Debug for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignMatrix({})", self.to_text().replace('\n', ";"))
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for SignMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SignMatrix::parse_text(s)
    }
}

/// The first `k` rows of an `n`-column sign matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowPrefix {
    n: usize,
    entries: Vec<i8>,
}

impl RowPrefix {
    pub fn empty(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self { n, entries: Vec::with_capacity(n * n) })
    }

    /// The first `k` rows of `m`.
    pub fn of_matrix(m: &SignMatrix, k: usize) -> Result<Self> {
        check_dimension(m.n())?;
        if k > m.n() {
            return Err(Error::PrefixFull(m.n()));
        }
        Ok(Self { n: m.n(), entries: m.entries()[..k * m.n()].to_vec() })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.entries.len() / self.n
    }

    pub fn is_full(&self) -> bool {
        self.k() == self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    /// Row `i` (0-based).
    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Appends a row, returning the extended prefix.
    pub fn extend(mut self, row: &[i8]) -> Result<Self> {
        self.push_row(row)?;
        Ok(self)
    }

    pub fn push_row(&mut self, row: &[i8]) -> Result<()> {
        if self.is_full() {
            return Err(Error::PrefixFull(self.n));
        }
        if row.len() != self.n {
            return Err(Error::RowLength { expected: self.n, got: row.len() });
        }
        check_signs(row)?;
        self.entries.extend_from_slice(row);
        Ok(())
    }

    /// Reads a full prefix as a square matrix.
    pub fn to_matrix(&self) -> Result<SignMatrix> {
        if !self.is_full() {
            return Err(Error::Precondition(format!("prefix has {} of {} rows", self.k(), self.n)));
        }
        SignMatrix::from_flat(self.n, self.entries.clone())
    }

    /// Applies a column permutation: new column `j` is old column `perm[j]`.
    pub fn permute_cols(&self, perm: &[usize]) -> RowPrefix {
        assert_eq!(perm.len(), self.n);
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.k() {
            entries.extend(perm.iter().map(|&j| self.get(i, j)));
        }
        RowPrefix { n: self.n, entries }
    }
}

/// `n` iid uniform signs. Consumes one 64-bit word of the stream.
pub fn sample_row(n: usize, rng: &mut RngStream) -> Result<Vec<i8>> {
    check_dimension(n)?;
    let bits = rng.next_u64();
    Ok((0..n).map(|j| if bits >> j & 1 == 1 { 1 } else { -1 }).collect())
}

/// Random Bernoulli sign matrix, drawn row by row with [`sample_row`].
pub fn sample_sign_matrix(n: usize, rng: &mut RngStream) -> Result<SignMatrix> {
    check_dimension(n)?;
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n {
        entries.extend(sample_row(n, rng)?);
    }
    Ok(SignMatrix { n, entries })
}

/// Every `n x n` sign matrix exactly once.
///
/// Order: the matrix with index `c` has entry `(i, j)` equal to `+1` when bit
/// `i * n + j` of `c` is set and `-1` otherwise, for `c = 0, 1, .., 2^(n^2) - 1`.
pub fn enumerate_all_sign_matrices(n: usize) -> Result<AllSignMatrices> {
    check_dimension(n)?;
    if n * n > MAX_ENUMERATION_CELLS {
        return Err(Error::TooLarge { what: "exhaustive enumeration", n, cap: 4 });
    }
    Ok(AllSignMatrices { n, next: 0, end: 1u64 << (n * n) })
}

#[derive(Clone, Debug)]
pub struct AllSignMatrices {
    n: usize,
    next: u64,
    end: u64,
}

impl AllSignMatrices {
    pub fn total(&self) -> u64 {
        self.end
    }
}

impl Iterator for AllSignMatrices {
    type Item = SignMatrix;

    fn next(&mut self) -> Option<SignMatrix> {
        if self.next == self.end {
            return None;
        }
        let c = self.next;
        self.next += 1;
        let cells = self.n * self.n;
        let entries = (0..cells).map(|b| if c >> b & 1 == 1 { 1 } else { -1 }).collect();
        Some(SignMatrix { n: self.n, entries })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for AllSignMatrices {}
