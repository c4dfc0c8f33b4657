//! Exact interval enclosures.
//!
//! An `Enclosure` certifies that a value (typically the sum of an infinite
//! series) lies between two rationals. Since endpoints are exact there is
//! never any outward rounding.

use super::Rational;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A closed rational interval `[lo, hi]` certified to contain a value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("enclosure with lo {lo} > hi {hi}")));
        }
        Ok(Enclosure { lo, hi })
    }

    pub fn point(v: Rational) -> Self {
        Enclosure {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, other: &Enclosure) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Enclosure {
                lo: -&self.hi,
                hi: -&self.lo,
            }
        } else {
            // straddles zero
            let hi = (-&self.lo).max(self.hi.clone());
            Enclosure {
                lo: Rational::zero(),
                hi,
            }
        }
    }

    /// Intersection with `[lo, hi]`; the intervals must overlap.
    pub fn clamp(&self, lo: &Rational, hi: &Rational) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().max(lo.clone()),
            hi: self.hi.clone().min(hi.clone()),
        }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(lo: &str, hi: &str) -> Enclosure {
        Enclosure::new(lo.parse().unwrap(), hi.parse().unwrap()).unwrap()
    }

    #[test]
    fn endpoint_arithmetic() {
        assert_eq!(e("1/4", "1/3").add(&e("0", "1/9")), e("1/4", "4/9"));
        assert_eq!(e("-1/8", "1/16").abs(), e("0", "1/8"));
        assert_eq!(e("23/108", "25/108").width(), "1/54".parse().unwrap());
    }

    #[test]
    fn abs_of_signed_intervals() {
        assert_eq!(e("-1/2", "-1/4").abs(), e("1/4", "1/2"));
        assert_eq!(e("1/4", "1/2").abs(), e("1/4", "1/2"));
        assert_eq!(e("-1/2", "1/4").abs(), e("0", "1/2"));
    }

    #[test]
    fn invalid_enclosure_is_rejected() {
        assert!(Enclosure::new("1/2".parse().unwrap(), "1/3".parse().unwrap()).is_err());
    }
}
