use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::linalg::{primitive_integer, to_rational};
use crate::error::{Error, Result};
use crate::Rational;

/// `coeffs·p ≤ bound` with integer data whose collective gcd is 1.
///
/// The same shape stores equations `coeffs·p = bound`; those are scaled so
/// the first nonzero coefficient is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearInequality {
    coeffs: Vec<BigInt>,
    bound: BigInt,
}

impl LinearInequality {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    pub fn dimension(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs_rational(&self) -> Vec<Rational> {
        to_rational(&self.coeffs)
    }

    pub fn bound_rational(&self) -> Rational {
        Rational::from_integer(self.bound.clone())
    }

    /// `coeffs·point`.
    pub fn value_at(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                found: point.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(point)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| x * c)
            .sum())
    }

    /// `coeffs·v` for a 0/1 point.
    pub fn value_at_01(&self, point: &[u8]) -> BigInt {
        self.coeffs
            .iter()
            .zip(point)
            .filter(|(_, &x)| x == 1)
            .map(|(c, _)| c)
            .sum()
    }

    /// Reverses orientation: `−coeffs·p ≤ −bound`.
    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            bound: -&self.bound,
        }
    }

    pub(crate) fn from_parts_unchecked(coeffs: Vec<BigInt>, bound: BigInt) -> Self {
        Self { coeffs, bound }
    }
}

impl PartialOrd for LinearInequality {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on coefficients, then bound.
impl Ord for LinearInequality {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .cmp(&other.coeffs)
            .then_with(|| self.bound.cmp(&other.bound))
    }
}

/// Scales `coeffs·p ≤ bound` by the unique positive rational that makes all
/// data integral with gcd 1.
pub fn canonicalize(coeffs: &[Rational], bound: &Rational) -> Result<LinearInequality> {
    if coeffs.iter().all(Zero::is_zero) {
        return Err(Error::DegenerateInequality);
    }
    let mut all: Vec<Rational> = coeffs.to_vec();
    all.push(bound.clone());
    let mut ints = primitive_integer(&all);
    let bound = ints.pop().expect("bound appended");
    Ok(LinearInequality {
        coeffs: ints,
        bound,
    })
}

/// Canonical form of the equation `coeffs·p = bound`.
pub fn canonicalize_equality(coeffs: &[Rational], bound: &Rational) -> Result<LinearInequality> {
    let ineq = canonicalize(coeffs, bound)?;
    let leading_negative = ineq
        .coeffs
        .iter()
        .find(|c| !c.is_zero())
        .is_some_and(|c| c.is_negative());
    Ok(if leading_negative { ineq.negated() } else { ineq })
}

/// Slack `bound − coeffs·point`; nonnegative exactly when the point satisfies
/// the inequality.
pub fn evaluate(ineq: &LinearInequality, point: &[Rational]) -> Result<Rational> {
    Ok(ineq.bound_rational() - ineq.value_at(point)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn canonical_examples() {
        let c = canonicalize(&[q(1, 2), q(1, 2)], &q(1, 2)).unwrap();
        assert_eq!((c.coeffs(), c.bound()), (&ints(&[1, 1])[..], &BigInt::from(1)));
        let c = canonicalize(&[q(-2, 1), q(4, 1)], &q(6, 1)).unwrap();
        assert_eq!((c.coeffs(), c.bound()), (&ints(&[-1, 2])[..], &BigInt::from(3)));
        assert!(matches!(
            canonicalize(&[q(0, 1), q(0, 1)], &q(0, 1)),
            Err(Error::DegenerateInequality)
        ));
        let c = canonicalize(&[q(-3, 1), q(0, 1)], &q(0, 1)).unwrap();
        assert_eq!(c.coeffs(), &ints(&[-1, 0])[..], "orientation is kept");
    }

    #[test]
    fn equality_sign() {
        let e = canonicalize_equality(&[q(0, 1), q(-2, 1), q(2, 1)], &q(-4, 1)).unwrap();
        assert_eq!((e.coeffs(), e.bound()), (&ints(&[0, 1, -1])[..], &BigInt::from(2)));
    }

    #[test]
    fn evaluation() {
        let positivity = canonicalize(&[q(-1, 1), q(0, 1)], &q(0, 1)).unwrap();
        // Example: bound 0, coefficient −1, point 1 on the support.
        assert_eq!(evaluate(&positivity, &[q(1, 1), q(0, 1)]).unwrap(), q(1, 1));
        assert_eq!(evaluate(&positivity, &[q(0, 1), q(1, 1)]).unwrap(), q(0, 1));
        assert!(evaluate(&positivity, &[q(1, 1)]).is_err());
        assert_eq!(positivity.value_at_01(&[1, 0]), BigInt::from(-1));
    }
}
