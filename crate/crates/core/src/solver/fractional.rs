//! Fractional matchings of a Leontief market and their stability.
//!
//! Every firm of the market has exactly one acceptable set and hires the
//! same quantity of each worker type in it, so a firm's row is
//! `level · χ(A_f)` and the levels plus the null amounts describe the
//! whole assignment matrix.

use std::fmt::Write as _;

use crate::bitset::WorkerSet;
use crate::error::{Error, Result};
use crate::model::{Employer, FirmId, Market, Matching, WorkerId};
use crate::scalar::{parse_exact, ExactScalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalMatching<T> {
    levels: Vec<T>,
    null: Vec<T>,
}

/// The unique acceptable set of a Leontief firm.
pub fn leontief_set(m: &Market, f: FirmId) -> Result<WorkerSet> {
    match m.firm_pref(f).chain() {
        [s] => Ok(*s),
        _ => Err(Error::NotSingleSet(m.firm_name(f).to_string())),
    }
}

fn leontief_sets(m: &Market) -> Result<Vec<WorkerSet>> {
    m.firm_ids().map(|f| leontief_set(m, f)).collect()
}

impl<T: ExactScalar> FractionalMatching<T> {
    /// Levels per firm and null amounts per worker, unchecked; see
    /// [`FractionalMatching::validate`].
    pub fn new(levels: Vec<T>, null: Vec<T>) -> Self {
        FractionalMatching { levels, null }
    }

    /// Everyone unmatched.
    pub fn unmatched(m: &Market) -> Self {
        FractionalMatching { levels: vec![T::zero(); m.num_firms()], null: vec![T::one(); m.num_workers()] }
    }

    /// The integral point of a discrete matching.
    pub fn from_matching(m: &Market, mu: &Matching) -> Result<Self> {
        mu.validate(m)?;
        let sets = leontief_sets(m)?;
        let mut levels = vec![T::zero(); m.num_firms()];
        for f in m.firm_ids() {
            let held = mu.employees(f);
            if held == sets[f.0] {
                levels[f.0] = T::one();
            } else if !held.is_empty() {
                return Err(Error::MalformedMatching(format!(
                    "{} holds {}, not its acceptable set",
                    m.firm_name(f),
                    m.format_set(held)
                )));
            }
        }
        let null = m
            .worker_ids()
            .map(|w| if mu.employer(w) == Employer::Null { T::one() } else { T::zero() })
            .collect();
        Ok(FractionalMatching { levels, null })
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn nulls(&self) -> &[T] {
        &self.null
    }

    pub fn level(&self, f: FirmId) -> &T {
        &self.levels[f.0]
    }

    pub fn null_amount(&self, w: WorkerId) -> &T {
        &self.null[w.0]
    }

    pub fn set_level(&mut self, f: FirmId, v: T) {
        self.levels[f.0] = v;
    }

    pub fn set_null(&mut self, w: WorkerId, v: T) {
        self.null[w.0] = v;
    }

    pub fn is_integral(&self) -> bool {
        self.levels.iter().chain(&self.null).all(|v| v.is_zero() || v.is_one())
    }

    /// Quantity of type `w` hired by `f`.
    pub fn amount(&self, m: &Market, f: FirmId, w: WorkerId) -> Result<T> {
        Ok(if leontief_set(m, f)?.contains(w.0) { self.levels[f.0].clone() } else { T::zero() })
    }

    /// Total quantity of type `w` assigned, null firm included.
    pub fn column_sum(&self, m: &Market, w: WorkerId) -> Result<T> {
        let mut total = self.null[w.0].clone();
        for f in m.firm_ids() {
            total = total + self.amount(m, f, w)?;
        }
        Ok(total)
    }

    /// Dimensions, values in `[0,1]` and single-set firms; column sums are
    /// not checked, so pseudo-matchings pass.
    pub fn check_shape(&self, m: &Market) -> Result<()> {
        if self.levels.len() != m.num_firms() || self.null.len() != m.num_workers() {
            return Err(Error::MalformedFractional(format!(
                "expected {} levels and {} null amounts, got {} and {}",
                m.num_firms(),
                m.num_workers(),
                self.levels.len(),
                self.null.len()
            )));
        }
        leontief_sets(m)?;
        let unit = |v: &T| *v >= T::zero() && *v <= T::one();
        if let Some(f) = m.firm_ids().find(|f| !unit(&self.levels[f.0])) {
            return Err(Error::MalformedFractional(format!(
                "level {} of {} is outside [0,1]",
                self.levels[f.0],
                m.firm_name(f)
            )));
        }
        if let Some(w) = m.worker_ids().find(|w| !unit(&self.null[w.0])) {
            return Err(Error::MalformedFractional(format!(
                "null amount {} of {} is outside [0,1]",
                self.null[w.0],
                m.worker_name(w)
            )));
        }
        Ok(())
    }

    /// Shape plus every worker type accounted for exactly once.
    pub fn validate(&self, m: &Market) -> Result<()> {
        self.check_shape(m)?;
        for w in m.worker_ids() {
            let total = self.column_sum(m, w)?;
            if !total.is_one() {
                return Err(Error::MalformedFractional(format!(
                    "type {} is assigned {} in total, not 1",
                    m.worker_name(w),
                    total
                )));
            }
        }
        Ok(())
    }

    /// The discrete matching of an integral, valid fractional matching.
    pub fn to_matching(&self, m: &Market) -> Result<Matching> {
        self.validate(m)?;
        if !self.is_integral() {
            return Err(Error::MalformedFractional("matching is not integral".into()));
        }
        let mut sets = Vec::new();
        for f in m.firm_ids() {
            if self.levels[f.0].is_one() {
                sets.push((f, leontief_set(m, f)?));
            }
        }
        Matching::from_firm_sets(m.num_workers(), &sets)
    }

    /// Parses the text format: a header of worker names, then one row per
    /// firm (firm name followed by its entries) and an optional `null` row.
    /// Omitted rows are zero. Entries are `p/q`, integers or decimals.
    pub fn parse(text: &str, m: &Market) -> Result<Self> {
        let sets = leontief_sets(m)?;
        let mut lines =
            text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, 1, "empty input"))?;
        let mut columns = Vec::new();
        for (col, tok) in tokens(header) {
            let w =
                m.worker_id(tok).map_err(|_| parse_err(hline, col, &format!("unknown worker `{tok}`")))?;
            if columns.contains(&w) {
                return Err(parse_err(hline, col, &format!("worker `{tok}` repeated")));
            }
            columns.push(w);
        }
        if columns.len() != m.num_workers() {
            return Err(parse_err(hline, 1, "header must list every worker exactly once"));
        }
        let mut levels: Vec<Option<T>> = vec![None; m.num_firms()];
        let mut null: Option<Vec<T>> = None;
        for (lno, line) in lines {
            let mut toks = tokens(line);
            let (lcol, label) = toks.next().expect("line is nonempty");
            let mut values = vec![T::zero(); m.num_workers()];
            let mut count = 0;
            for (col, tok) in toks {
                if count == columns.len() {
                    return Err(parse_err(lno, col, "too many entries"));
                }
                let v: T = parse_exact(tok)
                    .ok_or_else(|| parse_err(lno, col, &format!("`{tok}` is not an exact number")))?;
                values[columns[count].0] = v;
                count += 1;
            }
            if count != columns.len() {
                return Err(parse_err(lno, line.len() + 1, "too few entries"));
            }
            if label == "null" {
                if null.is_some() {
                    return Err(parse_err(lno, lcol, "duplicate null row"));
                }
                null = Some(values);
                continue;
            }
            let f = m.firm_id(label).map_err(|_| parse_err(lno, lcol, &format!("unknown firm `{label}`")))?;
            if levels[f.0].is_some() {
                return Err(parse_err(lno, lcol, &format!("duplicate row for `{label}`")));
            }
            let set = sets[f.0];
            let first = set.first().map(|i| values[i].clone()).unwrap_or_else(T::zero);
            let leontief = m
                .worker_ids()
                .all(|w| values[w.0] == if set.contains(w.0) { first.clone() } else { T::zero() });
            if !leontief {
                return Err(parse_err(
                    lno,
                    lcol,
                    &format!(
                        "row of `{label}` is not a multiple of its acceptable set {}",
                        m.format_set(set)
                    ),
                ));
            }
            levels[f.0] = Some(first);
        }
        let fm = FractionalMatching {
            levels: levels.into_iter().map(|v| v.unwrap_or_else(T::zero)).collect(),
            null: null.unwrap_or_else(|| vec![T::zero(); m.num_workers()]),
        };
        fm.check_shape(m)?;
        Ok(fm)
    }

    /// Renders the assignment matrix in the text format read by
    /// [`FractionalMatching::parse`].
    pub fn render(&self, m: &Market) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut head = vec![String::new()];
        head.extend(m.workers().iter().cloned());
        rows.push(head);
        for f in m.firm_ids() {
            let set = leontief_set(m, f).unwrap_or_default();
            let mut row = vec![m.firm_name(f).to_string()];
            row.extend(m.worker_ids().map(|w| {
                if set.contains(w.0) {
                    self.levels[f.0].to_string()
                } else {
                    "0".to_string()
                }
            }));
            rows.push(row);
        }
        let mut row = vec!["null".to_string()];
        row.extend(self.null.iter().map(ToString::to_string));
        rows.push(row);
        let ncols = rows[0].len();
        let widths: Vec<usize> =
            (0..ncols).map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for r in rows {
            let mut line = String::new();
            for (c, cell) in r.iter().enumerate() {
                let _ = write!(line, "{cell:<w$} ", w = widths[c]);
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

fn parse_err(line: usize, column: usize, message: &str) -> Error {
    Error::Parse { line, column, message: message.to_string() }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out.into_iter()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FractionalViolation<T> {
    /// A type is hired by a firm it finds unacceptable.
    Unacceptable { firm: FirmId, worker: WorkerId },
    /// A firm below full scale can draw a positive amount of every type in
    /// its set: from the null firm or from firms those workers like less.
    Blocking { firm: FirmId, available: Vec<(WorkerId, T)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractionalReport<T> {
    pub violation: Option<FractionalViolation<T>>,
}

impl<T: ExactScalar> FractionalReport<T> {
    pub fn is_stable(&self) -> bool {
        self.violation.is_none()
    }

    pub fn describe(&self, m: &Market) -> String {
        match &self.violation {
            None => "stable".into(),
            Some(FractionalViolation::Unacceptable { firm, worker }) => format!(
                "{} is hired by {} which it finds unacceptable",
                m.worker_name(*worker),
                m.firm_name(*firm)
            ),
            Some(FractionalViolation::Blocking { firm, available }) => {
                let parts: Vec<String> =
                    available.iter().map(|(w, a)| format!("{}: {a}", m.worker_name(*w))).collect();
                format!("{} can draw every type it needs ({})", m.firm_name(*firm), parts.join(", "))
            }
        }
    }
}

/// Amount of type `w` that would move to `f`: what sits at the null firm
/// plus what sits at firms `w` ranks below `f`.
pub fn available_to<T: ExactScalar>(
    fm: &FractionalMatching<T>,
    m: &Market,
    f: FirmId,
    w: WorkerId,
) -> Result<T> {
    if !m.finds_acceptable(w, f) {
        return Ok(T::zero());
    }
    let mut total = fm.null[w.0].clone();
    for g in m.firm_ids() {
        if m.prefers(w, Employer::Firm(f), Employer::Firm(g)) {
            total = total + fm.amount(m, g, w)?;
        }
    }
    Ok(total)
}

fn stability<T: ExactScalar>(fm: &FractionalMatching<T>, m: &Market) -> Result<FractionalReport<T>> {
    let sets = leontief_sets(m)?;
    for f in m.firm_ids() {
        if fm.levels[f.0].is_zero() {
            continue;
        }
        if let Some(w) = sets[f.0].iter().find(|&w| !m.finds_acceptable(WorkerId(w), f)) {
            return Ok(FractionalReport {
                violation: Some(FractionalViolation::Unacceptable { firm: f, worker: WorkerId(w) }),
            });
        }
    }
    for f in m.firm_ids() {
        if fm.levels[f.0].is_one() {
            continue;
        }
        let mut available = Vec::new();
        for w in sets[f.0].iter().map(WorkerId) {
            available.push((w, available_to(fm, m, f, w)?));
        }
        if available.iter().all(|(_, a)| a.is_positive()) {
            return Ok(FractionalReport {
                violation: Some(FractionalViolation::Blocking { firm: f, available }),
            });
        }
    }
    Ok(FractionalReport { violation: None })
}

/// Individual rationality and no blocking firm, for a fractional matching
/// whose columns each sum to one.
pub fn verify_fractional_stability<T: ExactScalar>(
    fm: &FractionalMatching<T>,
    m: &Market,
) -> Result<FractionalReport<T>> {
    fm.validate(m)?;
    stability(fm, m)
}

/// The same conditions for a pseudo-matching, which may assign a type in
/// any total quantity.
pub fn verify_pseudo_stability<T: ExactScalar>(
    fm: &FractionalMatching<T>,
    m: &Market,
) -> Result<FractionalReport<T>> {
    fm.check_shape(m)?;
    stability(fm, m)
}
