//! 0-1 matrices and exhaustive submatrix certificates.
//!
//! All three certificates first strip rows and columns with at most one
//! nonzero entry (repeatedly): such lines cannot belong to a cycle
//! submatrix, and expanding a determinant along them only yields a
//! smaller minor. The remaining core is searched exhaustively by
//! increasing order, row subsets before column subsets, both
//! lexicographic; the first witness is reported.

use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::bitset::WorkerSet;
use crate::error::{Error, Result};
use crate::scalar::determinant;

/// Default bound on the reduced dimensions searched exhaustively.
pub const DEFAULT_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroOneMatrix {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl ZeroOneMatrix {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, rows: Vec<Vec<u8>>) -> Result<Self> {
        if rows.len() != row_labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} row labels",
                rows.len(),
                row_labels.len()
            )));
        }
        let mut bits = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != col_labels.len() {
                return Err(Error::InvalidArgument(format!(
                    "row of length {} but {} column labels",
                    row.len(),
                    col_labels.len()
                )));
            }
            if row.iter().any(|&x| x > 1) {
                return Err(Error::InvalidArgument("entries must be 0 or 1".into()));
            }
            bits.push(row.into_iter().map(|x| x == 1).collect());
        }
        Ok(ZeroOneMatrix { row_labels, col_labels, rows: bits })
    }

    /// Unlabelled matrix with generated labels `r1..`, `c1..`.
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        let rl = (1..=rows.len()).map(|i| format!("r{i}")).collect();
        let cl = (1..=ncols).map(|j| format!("c{j}")).collect();
        Self::new(rl, cl, rows)
    }

    /// Matrix whose columns are the indicator vectors of `sets` over the
    /// `ground` labels.
    pub fn from_sets(sets: &[WorkerSet], col_labels: Vec<String>, ground: &[String]) -> Result<Self> {
        if sets.len() != col_labels.len() {
            return Err(Error::InvalidArgument("one label per set required".into()));
        }
        let n = ground.len();
        for s in sets {
            if let Some(bad) = s.iter().find(|&i| i >= n) {
                return Err(Error::UnknownWorker(format!("#{bad} is outside the ground set")));
            }
        }
        let rows = (0..n).map(|i| sets.iter().map(|s| s.contains(i)).collect()).collect();
        Ok(ZeroOneMatrix { row_labels: ground.to_vec(), col_labels, rows })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect()
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> ZeroOneMatrix {
        ZeroOneMatrix {
            row_labels: rows.iter().map(|&r| self.row_labels[r].clone()).collect(),
            col_labels: cols.iter().map(|&c| self.col_labels[c].clone()).collect(),
            rows: rows.iter().map(|&r| cols.iter().map(|&c| self.rows[r][c]).collect()).collect(),
        }
    }

    pub fn transpose(&self) -> ZeroOneMatrix {
        ZeroOneMatrix {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            rows: (0..self.num_cols())
                .map(|c| (0..self.num_rows()).map(|r| self.rows[r][c]).collect())
                .collect(),
        }
    }

    /// Integer determinant of the square submatrix on `rows` × `cols`.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> i64 {
        let m: Vec<Vec<i64>> =
            rows.iter().map(|&r| cols.iter().map(|&c| self.rows[r][c] as i64).collect()).collect();
        determinant(&m)
    }

    /// Indices of the rows and columns surviving repeated removal of lines
    /// with at most one nonzero entry.
    pub fn reduced_core(&self) -> (Vec<usize>, Vec<usize>) {
        let mut rows: Vec<usize> = (0..self.num_rows()).collect();
        let mut cols: Vec<usize> = (0..self.num_cols()).collect();
        loop {
            let keep_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&r| cols.iter().filter(|&&c| self.rows[r][c]).count() >= 2)
                .collect();
            let keep_cols: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&c| keep_rows.iter().filter(|&&r| self.rows[r][c]).count() >= 2)
                .collect();
            if keep_rows.len() == rows.len() && keep_cols.len() == cols.len() {
                return (rows, cols);
            }
            rows = keep_rows;
            cols = keep_cols;
        }
    }

    /// `true` when the `rows` × `cols` submatrix has exactly two ones in
    /// every row and column and forms a single cycle.
    pub fn is_cycle_submatrix(&self, rows: &[usize], cols: &[usize]) -> bool {
        let k = rows.len();
        if k < 2 || cols.len() != k {
            return false;
        }
        for &r in rows {
            if cols.iter().filter(|&&c| self.rows[r][c]).count() != 2 {
                return false;
            }
        }
        for &c in cols {
            if rows.iter().filter(|&&r| self.rows[r][c]).count() != 2 {
                return false;
            }
        }
        self.cycle_layout(rows, cols).is_some()
    }

    /// Orders a 2-regular submatrix so that row `i` meets columns `i` and
    /// `i+1 (mod k)`, the staircase layout of an odd-cycle matrix.
    /// `None` when the submatrix splits into several cycles.
    pub fn cycle_layout(&self, rows: &[usize], cols: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
        let k = rows.len();
        let ones = |r: usize| -> Vec<usize> { cols.iter().copied().filter(|&c| self.rows[r][c]).collect() };
        let mut out_rows = Vec::with_capacity(k);
        let mut out_cols = Vec::with_capacity(k);
        let mut row = rows[0];
        let first = ones(row);
        if first.len() != 2 {
            return None;
        }
        out_cols.push(first[0]);
        let mut col = first[1];
        loop {
            out_rows.push(row);
            if col == out_cols[0] {
                break;
            }
            out_cols.push(col);
            let next = rows.iter().copied().find(|&r| r != row && self.rows[r][col])?;
            let next_cols = ones(next);
            col = *next_cols.iter().find(|&&c| c != col)?;
            row = next;
            if out_rows.len() > k {
                return None;
            }
        }
        if out_rows.len() == k && out_cols.len() == k {
            Some((out_rows, out_cols))
        } else {
            None
        }
    }

    pub fn render(&self) -> String {
        let lw = self.row_labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let cw: Vec<usize> = self.col_labels.iter().map(|l| l.chars().count().max(1)).collect();
        let mut out = format!("{:lw$} |", "", lw = lw);
        for (l, w) in self.col_labels.iter().zip(&cw) {
            out.push_str(&format!(" {l:>w$}", w = w));
        }
        out.push('\n');
        out.push_str(&"-".repeat(lw + 2 + cw.iter().map(|w| w + 1).sum::<usize>()));
        for (label, row) in self.row_labels.iter().zip(&self.rows) {
            out.push('\n');
            out.push_str(&format!("{label:lw$} |", lw = lw));
            for (b, w) in row.iter().zip(&cw) {
                out.push_str(&format!(" {:>w$}", *b as u8, w = w));
            }
        }
        out
    }
}

impl fmt::Display for ZeroOneMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Submatrix exhibiting a violated property. Indices refer to the input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Set for total-unimodularity witnesses, whose rows are ordered so
    /// that it is positive.
    pub determinant: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Certificate {
    Holds,
    Violated(Witness),
    /// The reduced core exceeded the search cap; no verdict is given.
    Inconclusive {
        rows: usize,
        cols: usize,
        cap: usize,
    },
}

impl Certificate {
    pub fn holds(&self) -> bool {
        matches!(self, Certificate::Holds)
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Certificate::Violated(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Certificate::Violated(w) => Some(w),
            _ => None,
        }
    }
}

fn core_within_cap(
    m: &ZeroOneMatrix,
    cap: usize,
) -> std::result::Result<(Vec<usize>, Vec<usize>), Certificate> {
    let (rows, cols) = m.reduced_core();
    if rows.len() > cap || cols.len() > cap {
        Err(Certificate::Inconclusive { rows: rows.len(), cols: cols.len(), cap })
    } else {
        Ok((rows, cols))
    }
}

/// Searches for a `k × k` cycle submatrix for each `k` in `orders`.
fn find_cycle_submatrix(
    m: &ZeroOneMatrix,
    rows: &[usize],
    cols: &[usize],
    orders: impl Iterator<Item = usize>,
) -> Option<Witness> {
    for k in orders {
        if k > rows.len() || k > cols.len() {
            break;
        }
        for rsub in rows.iter().copied().combinations(k) {
            // columns meeting the chosen rows exactly twice
            let candidates: Vec<usize> = cols
                .iter()
                .copied()
                .filter(|&c| rsub.iter().filter(|&&r| m.rows[r][c]).count() == 2)
                .collect();
            if candidates.len() < k {
                continue;
            }
            for csub in candidates.into_iter().combinations(k) {
                if m.is_cycle_submatrix(&rsub, &csub) {
                    return Some(Witness { rows: rsub, cols: csub, determinant: None });
                }
            }
        }
    }
    None
}

/// Balanced: no odd-order square submatrix with exactly two ones in each
/// row and column.
pub fn is_balanced(m: &ZeroOneMatrix, cap: usize) -> Certificate {
    let (rows, cols) = match core_within_cap(m, cap) {
        Ok(c) => c,
        Err(c) => return c,
    };
    match find_cycle_submatrix(m, &rows, &cols, (3..).step_by(2)) {
        Some(w) => Certificate::Violated(w),
        None => Certificate::Holds,
    }
}

/// Totally balanced: no cycle submatrix of any order at least 3.
pub fn is_totally_balanced(m: &ZeroOneMatrix, cap: usize) -> Certificate {
    let (rows, cols) = match core_within_cap(m, cap) {
        Ok(c) => c,
        Err(c) => return c,
    };
    match find_cycle_submatrix(m, &rows, &cols, 3..) {
        Some(w) => Certificate::Violated(w),
        None => Certificate::Holds,
    }
}

/// Totally unimodular: every square submatrix has determinant 0 or ±1.
pub fn is_totally_unimodular(m: &ZeroOneMatrix, cap: usize) -> Certificate {
    let (rows, cols) = match core_within_cap(m, cap) {
        Ok(c) => c,
        Err(c) => return c,
    };
    // 0-1 matrices of order at most 2 always have |det| <= 1
    for k in 3..=rows.len().min(cols.len()) {
        for rsub in rows.iter().copied().combinations(k) {
            for csub in cols.iter().copied().combinations(k) {
                let det = m.minor(&rsub, &csub);
                if det.abs() >= 2 {
                    // order the rows so the reported determinant is positive
                    let mut rsub = rsub;
                    if det < 0 {
                        rsub.swap(0, 1);
                    }
                    return Certificate::Violated(Witness {
                        rows: rsub,
                        cols: csub,
                        determinant: Some(det.abs()),
                    });
                }
            }
        }
    }
    Certificate::Holds
}

/// Renders a certificate with the witness laid out as a cycle where
/// possible.
pub fn render_certificate(name: &str, m: &ZeroOneMatrix, cert: &Certificate) -> String {
    match cert {
        Certificate::Holds => format!("{name}: PASS"),
        Certificate::Inconclusive { rows, cols, cap } => {
            format!("{name}: INCONCLUSIVE (reduced core {rows}x{cols} exceeds cap {cap})")
        }
        Certificate::Violated(w) => {
            let (r, c) = m
                .cycle_layout(&w.rows, &w.cols)
                .filter(|_| w.determinant.is_none())
                .unwrap_or_else(|| (w.rows.clone(), w.cols.clone()));
            let mut out = format!("{name}: FAIL, witness {}x{}", w.rows.len(), w.cols.len());
            if let Some(d) = w.determinant {
                out.push_str(&format!(" with determinant {d}"));
            }
            out.push('\n');
            out.push_str(&m.submatrix(&r, &c).render());
            out
        }
    }
}
