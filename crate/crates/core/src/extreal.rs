//! Non-negative extended reals `[0, inf]`.

use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// A value in `[0, inf]`. Never NaN, never negative.
///
/// Arithmetic follows `a + inf = inf` and `c * inf = inf` for `c > 0`;
/// `0 * inf` is rejected. `inf` compares greater than every finite value,
/// which is what the Luxemburg root-finder's "integral <= 1" test relies on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a finite non-negative value. Rejects NaN and negatives.
    pub fn finite(v: f64) -> Result<Self, Error> {
        if v.is_nan() {
            return Err(Error::ExtReal("NaN is not an extended real".into()));
        }
        if v < 0.0 {
            return Err(Error::ExtReal(format!("negative value {v}")));
        }
        if v.is_infinite() {
            return Err(Error::ExtReal("use ExtReal::INFINITY for inf".into()));
        }
        Ok(ExtReal(v))
    }

    /// Wraps any non-negative value, mapping `+inf` to the infinite element.
    /// Panics on NaN or negatives; intended for values we computed ourselves.
    pub fn from_value(v: f64) -> Self {
        assert!(!v.is_nan(), "NaN reached ExtReal::from_value");
        assert!(v >= 0.0, "negative value {v} reached ExtReal::from_value");
        ExtReal(v)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The underlying f64 (`+inf` for the infinite element).
    pub fn value(self) -> f64 {
        self.0
    }

    /// The finite value, or `None` for `inf`.
    pub fn as_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Scales by a non-negative constant. `0 * inf` is rejected.
    pub fn try_scale(self, c: f64) -> Result<Self, Error> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::ExtReal(format!("invalid scale factor {c}")));
        }
        if c == 0.0 && self.is_infinite() {
            return Err(Error::ExtReal("0 * inf is undefined".into()));
        }
        Ok(ExtReal(c * self.0))
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        // Total on [0, inf]: no NaN by construction.
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtReal::finite(-1.0).is_err());
        assert!(ExtReal::finite(f64::NAN).is_err());
        assert!(ExtReal::finite(2.5).is_ok());
    }

    #[test]
    fn addition_absorbs_infinity() {
        let a = ExtReal::finite(3.0).unwrap();
        assert_eq!((a + ExtReal::INFINITY), ExtReal::INFINITY);
        assert_eq!((a + a).value(), 6.0);
    }

    #[test]
    fn scaling_rules() {
        assert!(ExtReal::INFINITY.try_scale(0.0).is_err());
        assert!(ExtReal::INFINITY.try_scale(2.0).unwrap().is_infinite());
        assert_eq!(ExtReal::ZERO.try_scale(0.0).unwrap(), ExtReal::ZERO);
        assert!(ExtReal::finite(1.0).unwrap().try_scale(-1.0).is_err());
    }

    #[test]
    fn infinity_dominates_comparisons() {
        let big = ExtReal::finite(1e300).unwrap();
        assert!(ExtReal::INFINITY > big);
        assert!(big < ExtReal::INFINITY);
        assert!(ExtReal::INFINITY > 1.0);
    }
}
