//! The linear system whose 0/1 solutions are the integral matchings
//! reachable from a stable fractional matching by stable transformations.
//!
//! Each firm at a level strictly between 0 and 1 contributes a pair of
//! columns (take its set, take nothing) and a row forcing exactly one of
//! them; each worker type with a null amount strictly between 0 and 1
//! contributes a null column. Worker rows require each type to be assigned
//! once, net of what integral firms and null amounts already hold.

use std::fmt::Write as _;

use crate::balance::{is_balanced, Certificate, ZeroOneMatrix};
use crate::error::{Error, Result};
use crate::model::{FirmId, Market, WorkerId};
use crate::scalar::ExactScalar;
use crate::solver::fractional::{leontief_set, verify_pseudo_stability, FractionalMatching};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Take(FirmId),
    Empty(FirmId),
    Null(WorkerId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Row {
    Firm(FirmId),
    Worker(WorkerId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub matrix: ZeroOneMatrix,
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
    pub rhs: Vec<i64>,
}

fn strictly_fractional<T: ExactScalar>(v: &T) -> bool {
    v.is_positive() && *v < T::one()
}

/// Builds the system for `fm` on the Leontief market `m`.
pub fn build_constraint_system<T: ExactScalar>(
    fm: &FractionalMatching<T>,
    m: &Market,
) -> Result<ConstraintSystem> {
    fm.validate(m)?;
    let paired: Vec<FirmId> = m.firm_ids().filter(|f| strictly_fractional(fm.level(*f))).collect();
    let null_cols: Vec<WorkerId> =
        m.worker_ids().filter(|w| strictly_fractional(fm.null_amount(*w))).collect();
    let mut columns = Vec::new();
    for &f in &paired {
        columns.push(Column::Take(f));
        columns.push(Column::Empty(f));
    }
    columns.extend(null_cols.iter().map(|&w| Column::Null(w)));
    let mut rows: Vec<Row> = paired.iter().map(|&f| Row::Firm(f)).collect();
    rows.extend(m.worker_ids().map(Row::Worker));

    let mut entries = Vec::with_capacity(rows.len());
    let mut rhs = Vec::with_capacity(rows.len());
    for row in &rows {
        let mut line = Vec::with_capacity(columns.len());
        for col in &columns {
            let hit = match (*row, *col) {
                (Row::Firm(f), Column::Take(g) | Column::Empty(g)) => f == g,
                (Row::Worker(w), Column::Take(g)) => leontief_set(m, g)?.contains(w.0),
                (Row::Worker(w), Column::Null(v)) => w == v,
                _ => false,
            };
            line.push(hit as u8);
        }
        entries.push(line);
        rhs.push(match *row {
            Row::Firm(_) => 1,
            Row::Worker(w) => {
                let mut held = 0;
                for f in m.firm_ids() {
                    if fm.level(f).is_one() && leontief_set(m, f)?.contains(w.0) {
                        held += 1;
                    }
                }
                if fm.null_amount(w).is_one() {
                    held += 1;
                }
                1 - held
            }
        });
    }
    let row_labels = rows
        .iter()
        .map(|r| match *r {
            Row::Firm(f) => m.firm_name(f).to_string(),
            Row::Worker(w) => m.worker_name(w).to_string(),
        })
        .collect();
    let col_labels = (1..=columns.len()).map(|j| format!("z{j}")).collect();
    let matrix = ZeroOneMatrix::new(row_labels, col_labels, entries)?;
    Ok(ConstraintSystem { matrix, columns, rows, rhs })
}

impl ConstraintSystem {
    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// The point of the system corresponding to `fm` itself.
    pub fn point_of<T: ExactScalar>(&self, fm: &FractionalMatching<T>) -> Vec<T> {
        self.columns
            .iter()
            .map(|c| match *c {
                Column::Take(f) => fm.level(f).clone(),
                Column::Empty(f) => T::one() - fm.level(f).clone(),
                Column::Null(w) => fm.null_amount(w).clone(),
            })
            .collect()
    }

    /// `B z = rhs`, exactly.
    pub fn is_satisfied_by<T: ExactScalar>(&self, z: &[T]) -> bool {
        z.len() == self.columns.len()
            && (0..self.rows.len()).all(|i| {
                let mut sum = T::zero();
                for (j, zj) in z.iter().enumerate() {
                    if self.matrix.get(i, j) {
                        sum = sum + zj.clone();
                    }
                }
                T::from_i64(self.rhs[i]) == Some(sum)
            })
    }

    fn satisfied_by_bits(&self, z: &[u8]) -> bool {
        z.len() == self.columns.len()
            && (0..self.rows.len()).all(|i| {
                let sum: i64 = z
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| self.matrix.get(i, *j))
                    .map(|(_, &b)| b as i64)
                    .sum();
                sum == self.rhs[i]
            })
    }

    /// Balancedness of `B`, which guarantees an integral vertex.
    pub fn balance_certificate(&self, cap: usize) -> Certificate {
        is_balanced(&self.matrix, cap)
    }

    pub fn column_legend(&self, m: &Market) -> Vec<String> {
        self.columns
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let what = match *c {
                    Column::Take(f) => format!(
                        "{} in {}'s list",
                        leontief_set(m, f).map(|s| m.format_set(s)).unwrap_or_default(),
                        m.firm_name(f)
                    ),
                    Column::Empty(f) => format!("∅ in {}'s list", m.firm_name(f)),
                    Column::Null(w) => format!("type {} matched with ø", m.worker_name(w)),
                };
                format!("z{}: {what}", j + 1)
            })
            .collect()
    }

    /// `B z = rhs` with row labels and a column legend.
    pub fn render(&self, m: &Market) -> String {
        let mut out = String::new();
        let labels: Vec<String> = self
            .rows
            .iter()
            .map(|r| match *r {
                Row::Firm(f) => format!("[{}]", m.firm_name(f)),
                Row::Worker(w) => m.worker_name(w).to_string(),
            })
            .collect();
        let lw = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
        let _ = write!(out, "{:lw$} |", "", lw = lw);
        for j in 1..=self.columns.len() {
            let _ = write!(out, " z{j}");
        }
        out.push_str(" | rhs\n");
        for (i, label) in labels.iter().enumerate() {
            let _ = write!(out, "{label:lw$} |", lw = lw);
            for j in 0..self.columns.len() {
                let w = format!("z{}", j + 1).len();
                let _ = write!(out, " {:>w$}", self.matrix.get(i, j) as u8, w = w);
            }
            let _ = writeln!(out, " | {}", self.rhs[i]);
        }
        for line in self.column_legend(m) {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// A 0/1 solution of `B z = rhs` by backtracking over columns in order,
/// trying 1 before 0, rejecting as soon as a row overflows or a row's last
/// column leaves it short.
pub fn extract_integral_solution(cs: &ConstraintSystem) -> Result<Vec<u8>> {
    let n = cs.columns.len();
    let nrows = cs.rows.len();
    let mut last_col: Vec<Option<usize>> = vec![None; nrows];
    for (i, lc) in last_col.iter_mut().enumerate() {
        *lc = (0..n).rev().find(|&j| cs.matrix.get(i, j));
        if lc.is_none() && cs.rhs[i] != 0 {
            return Err(Error::NoIntegralSolution(format!(
                "row {} has no columns but right-hand side {}",
                cs.matrix.row_labels()[i],
                cs.rhs[i]
            )));
        }
    }
    let mut closes: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, lc) in last_col.iter().enumerate() {
        if let Some(j) = lc {
            closes[*j].push(i);
        }
    }
    let mut z = vec![0u8; n];
    let mut sums = vec![0i64; nrows];
    if search(cs, &closes, 0, &mut z, &mut sums) {
        debug_assert!(cs.satisfied_by_bits(&z));
        Ok(z)
    } else {
        Err(Error::NoIntegralSolution("search exhausted".into()))
    }
}

fn search(cs: &ConstraintSystem, closes: &[Vec<usize>], j: usize, z: &mut [u8], sums: &mut [i64]) -> bool {
    if j == z.len() {
        return true;
    }
    for bit in [1u8, 0] {
        z[j] = bit;
        let mut ok = true;
        if bit == 1 {
            for (i, s) in sums.iter_mut().enumerate() {
                if cs.matrix.get(i, j) {
                    *s += 1;
                    if *s > cs.rhs[i] {
                        ok = false;
                    }
                }
            }
        }
        if ok {
            ok = closes[j].iter().all(|&i| sums[i] == cs.rhs[i]);
        }
        if ok && search(cs, closes, j + 1, z, sums) {
            return true;
        }
        if bit == 1 {
            for (i, s) in sums.iter_mut().enumerate() {
                if cs.matrix.get(i, j) {
                    *s -= 1;
                }
            }
        }
    }
    z[j] = 0;
    false
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformationKind {
    /// A firm drops to level 0.
    ToZero,
    /// A firm rises to full scale.
    ToOne,
    /// A null amount is rounded to 0 or 1.
    Null,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationStep<T> {
    pub kind: TransformationKind,
    pub column: Column,
    pub result: FractionalMatching<T>,
}

fn check_solution(cs: &ConstraintSystem, z: &[u8]) -> Result<()> {
    if z.iter().any(|&b| b > 1) || !cs.satisfied_by_bits(z) {
        return Err(Error::ConstraintViolated(format!("{z:?}")));
    }
    Ok(())
}

/// One stable transformation per paired firm (in column order) and then
/// per null column, each step's pseudo-matching recorded and checked for
/// stability.
pub fn stable_transformation_chain<T: ExactScalar>(
    fm: &FractionalMatching<T>,
    z: &[u8],
    cs: &ConstraintSystem,
    m: &Market,
) -> Result<Vec<TransformationStep<T>>> {
    check_solution(cs, z)?;
    let mut current = fm.clone();
    let mut steps = Vec::new();
    for (j, col) in cs.columns.iter().enumerate() {
        let (kind, next) = match *col {
            Column::Take(f) => {
                let mut next = current.clone();
                let kind = if z[j] == 1 {
                    next.set_level(f, T::one());
                    TransformationKind::ToOne
                } else {
                    next.set_level(f, T::zero());
                    TransformationKind::ToZero
                };
                (kind, next)
            }
            Column::Empty(_) => continue,
            Column::Null(w) => {
                let mut next = current.clone();
                next.set_null(w, if z[j] == 1 { T::one() } else { T::zero() });
                (TransformationKind::Null, next)
            }
        };
        let report = verify_pseudo_stability(&next, m)?;
        if let Some(v) = report.violation {
            let firm = match v {
                crate::solver::fractional::FractionalViolation::Unacceptable { firm, .. }
                | crate::solver::fractional::FractionalViolation::Blocking { firm, .. } => firm,
            };
            return Err(Error::TransformationUnstable(m.firm_name(firm).to_string()));
        }
        steps.push(TransformationStep { kind, column: *col, result: next.clone() });
        current = next;
    }
    Ok(steps)
}

/// The integral matching selected by `z`, checked to be a stable
/// fractional matching.
pub fn apply_stable_transformations<T: ExactScalar>(
    fm: &FractionalMatching<T>,
    z: &[u8],
    cs: &ConstraintSystem,
    m: &Market,
) -> Result<FractionalMatching<T>> {
    let steps = stable_transformation_chain(fm, z, cs, m)?;
    let result = steps.last().map_or_else(|| fm.clone(), |s| s.result.clone());
    let report = crate::solver::fractional::verify_fractional_stability(&result, m)?;
    match report.violation {
        None if result.is_integral() => Ok(result),
        None => Err(Error::MalformedFractional("transformed matching is not integral".into())),
        Some(_) => Err(Error::TransformationUnstable(report.describe(m))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use num_rational::Rational64;

    const PRINTED_B: [[u8; 7]; 7] = [
        [1, 1, 0, 0, 0, 0, 0],
        [0, 0, 1, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 1, 0],
        [1, 0, 1, 0, 0, 0, 0],
        [1, 0, 0, 0, 1, 0, 0],
        [1, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0, 1],
    ];

    #[test]
    fn reproduces_the_printed_system() {
        let m = corpus::three_set_firm_split();
        let fm = corpus::half_integral();
        let cs = build_constraint_system(&fm, &m).unwrap();
        let rows: Vec<Vec<u8>> = PRINTED_B.iter().map(|r| r.to_vec()).collect();
        assert_eq!(cs.matrix.to_rows(), rows);
        assert_eq!(cs.rhs, vec![1; 7]);
        let half = vec![Rational64::new(1, 2); 7];
        assert_eq!(cs.point_of(&fm), half);
        assert!(cs.is_satisfied_by(&half));
        assert!(cs.balance_certificate(12).holds());
    }

    #[test]
    fn extraction_and_transformations() {
        let m = corpus::three_set_firm_split();
        let fm = corpus::half_integral();
        let cs = build_constraint_system(&fm, &m).unwrap();
        let z = extract_integral_solution(&cs).unwrap();
        assert_eq!(z, vec![1, 0, 0, 1, 0, 1, 1]);
        let steps = stable_transformation_chain(&fm, &z, &cs, &m).unwrap();
        let kinds: Vec<TransformationKind> = steps.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            [
                TransformationKind::ToOne,
                TransformationKind::ToZero,
                TransformationKind::ToZero,
                TransformationKind::Null
            ]
        );
        let out = apply_stable_transformations(&fm, &z, &cs, &m).unwrap();
        let one = Rational64::from_integer(1);
        let zero = Rational64::from_integer(0);
        assert_eq!(out, FractionalMatching::new(vec![one, zero, zero, zero], vec![zero, zero, zero, one]));
    }

    #[test]
    fn integral_input_gives_empty_system() {
        let m = corpus::three_set_firm_split();
        let one = Rational64::from_integer(1);
        let zero = Rational64::from_integer(0);
        let fm = FractionalMatching::new(vec![one, zero, zero, zero], vec![zero, zero, zero, one]);
        let cs = build_constraint_system(&fm, &m).unwrap();
        assert_eq!(cs.num_columns(), 0);
        assert_eq!(cs.rhs, vec![0; 4]);
        let z = extract_integral_solution(&cs).unwrap();
        assert!(z.is_empty());
        assert_eq!(apply_stable_transformations(&fm, &z, &cs, &m).unwrap(), fm);
    }

    #[test]
    fn other_pair_choices_satisfy_the_pair_rows() {
        let m = corpus::three_set_firm_split();
        let cs = build_constraint_system(&corpus::half_integral(), &m).unwrap();
        assert!(check_solution(&cs, &[1, 0, 1, 0, 0, 1, 1]).is_err());
        assert!(check_solution(&cs, &[0, 1, 1, 0, 1, 0, 0]).is_ok());
    }
}
