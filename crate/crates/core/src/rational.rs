//! Exact non-negative rationals for expected deontic values.

use std::fmt;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::ModelError;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<u64>);

impl Rational {
    /// `numer / denom` in lowest terms. Panics on a zero denominator.
    pub fn new(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: u64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Rational::from_integer(0)
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// Sum of desirability values divided by a successor count.
    pub fn average(values: impl IntoIterator<Item = u64>, count: usize) -> Result<Self, ModelError> {
        let sum = values
            .into_iter()
            .try_fold(0u64, |acc, v| acc.checked_add(v))
            .ok_or(ModelError::Overflow)?;
        let count = u64::try_from(count).map_err(|_| ModelError::Overflow)?;
        Ok(Rational::new(sum, count))
    }

    pub fn checked_scale(&self, k: u64) -> Result<Self, ModelError> {
        let numer = self.numer().checked_mul(k).ok_or(ModelError::Overflow)?;
        Ok(Rational::new(numer, self.denom()))
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: u64 = n.trim().parse().map_err(|e| format!("bad numerator in `{s}`: {e}"))?;
        let d: u64 = d.trim().parse().map_err(|e| format!("bad denominator in `{s}`: {e}"))?;
        if d == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(Rational::new(n, d))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_and_display() {
        assert_eq!(Rational::new(18, 2).to_string(), "9/1");
        assert_eq!(Rational::new(10, 4), Rational::new(5, 2));
        assert_eq!("40".parse::<Rational>().unwrap(), Rational::from_integer(40));
        assert!("1/0".parse::<Rational>().is_err());
    }

    #[test]
    fn ordering_is_exact() {
        assert!(Rational::new(1, 3) < Rational::new(333_333_334, 1_000_000_000));
        assert!(Rational::new(u64::MAX, u64::MAX - 1) < Rational::new(u64::MAX - 1, u64::MAX - 2));
    }

    #[test]
    fn average_reports_overflow() {
        assert_eq!(Rational::average([u64::MAX, 1], 2), Err(ModelError::Overflow));
        assert_eq!(Rational::average([9, 9], 2), Ok(Rational::from_integer(9)));
    }
}
