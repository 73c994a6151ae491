//! Scalar abstractions.
//!
//! Fractional matchings are generic over an exact ordered field and
//! determinants over an integral domain. Floating point types are
//! deliberately not [`ExactScalar`]: they are not `Ord`, and every
//! certificate in this crate is exact.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{FromPrimitive, Num, Signed};

/// An exact, totally ordered number type usable as a matching level.
pub trait ExactScalar:
    Num + Signed + Clone + Ord + FromPrimitive + FromStr + Debug + Display + Send + Sync
{
}

impl<T> ExactScalar for T where
    T: Num + Signed + Clone + Ord + FromPrimitive + FromStr + Debug + Display + Send + Sync
{
}

/// Integer types used for determinants and right-hand sides.
pub trait ExactInteger: Integer + Signed + Clone + Debug + Display {}

impl<T> ExactInteger for T where T: Integer + Signed + Clone + Debug + Display {}

/// Parses `p/q`, a plain integer or a finite decimal such as `0.5` into an
/// exact scalar.
pub fn parse_exact<T: ExactScalar>(token: &str) -> Option<T> {
    let token = token.trim();
    if token.is_empty() {
        return None;
    }
    if let Some((p, q)) = token.split_once('/') {
        let p = parse_exact::<T>(p)?;
        let q = parse_exact::<T>(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    if let Some((int, frac)) = token.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mut value = T::zero();
        let ten = T::from_u8(10)?;
        for b in digits.bytes() {
            value = value * ten.clone() + T::from_u8(b - b'0')?;
        }
        let mut scale = T::one();
        for _ in 0..frac.len() {
            scale = scale * ten.clone();
        }
        let value = value / scale;
        return Some(if negative { -value } else { value });
    }
    if !token.trim_start_matches(['-', '+']).bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: i64 = token.parse().ok()?;
    T::from_i64(n)
}

/// Determinant of a square matrix by fraction-free (Bareiss) elimination.
///
/// Every intermediate value is an integer minor of the input, so no
/// division is ever inexact.
pub fn determinant<T: ExactInteger>(matrix: &[Vec<T>]) -> T {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n), "determinant of a non-square matrix");
    if n == 0 {
        return T::one();
    }
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = v / prev.clone();
            }
            a[i][k] = T::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::{BigRational, Rational64};
    use proptest::prelude::*;

    /// Permutation-expansion determinant, independent of elimination.
    fn leibniz(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut total = 0;
        for perm in itertools::Itertools::permutations(0..n, n) {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let prod: i64 = (0..n).map(|i| m[i][perm[i]]).product();
            total += if inversions % 2 == 0 { prod } else { -prod };
        }
        total
    }

    #[test]
    fn odd_cycle_incidence_has_determinant_two() {
        let m = vec![vec![1i64, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert_eq!(determinant(&m), 2);
        let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(determinant(&big), BigInt::from(2));
    }

    #[test]
    fn singular_and_empty() {
        assert_eq!(determinant::<i64>(&[]), 1);
        assert_eq!(determinant(&[vec![1i64, 1], vec![1, 1]]), 0);
        assert_eq!(determinant(&[vec![0i64, 1], vec![1, 0]]), -1);
    }

    #[test]
    fn parses_exact_tokens() {
        assert_eq!(parse_exact::<Rational64>("1/2"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_exact::<Rational64>("0.5"), Some(Rational64::new(1, 2)));
        assert_eq!(parse_exact::<Rational64>("0.125"), Some(Rational64::new(1, 8)));
        assert_eq!(parse_exact::<Rational64>("1"), Some(Rational64::from_integer(1)));
        assert_eq!(parse_exact::<BigRational>("3/4").unwrap().to_string(), "3/4");
        assert_eq!(parse_exact::<Rational64>("1/0"), None);
        assert_eq!(parse_exact::<Rational64>("x"), None);
    }

    proptest! {
        #[test]
        fn bareiss_matches_leibniz(n in 0usize..5, seed in proptest::collection::vec(-3i64..4, 25)) {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 5 + j]).collect()).collect();
            prop_assert_eq!(determinant(&m), leibniz(&m));
        }
    }
}
