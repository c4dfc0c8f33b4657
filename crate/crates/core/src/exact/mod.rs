//! Exact rational arithmetic: the numeric substrate for every other module.
//!
//! Every coordinate, function value, and bound in this crate is a `Rational`.
//! There is no floating point anywhere; results are exact and canonical
//! (reduced fraction, strictly positive denominator).

mod digits;
mod enclosure;

pub use digits::{baseq_expand, DigitExpansion};
pub use enclosure::Enclosure;

use crate::error::{Error, Result};
use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// An exact arbitrary-precision fraction in canonical form.
///
/// Invariants (maintained by every operation):
/// - denominator > 0
/// - gcd(|numerator|, denominator) = 1
///
/// Serializes as the string `"p/q"`, or `"n"` when the value is an integer.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::domain("rational with zero denominator"));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    /// Shorthand for small literal fractions; panics on zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "ratio with zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Exact division; division by zero is a domain error.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Self> {
        Rational::one().checked_div(self)
    }

    /// `base^exp` for integer `exp` (negative exponents allowed, base != 0).
    pub fn pow(base: impl Into<BigInt>, exp: i64) -> Self {
        let base: BigInt = base.into();
        assert!(!base.is_zero() || exp >= 0, "0 to a negative power");
        let mag = num::pow::pow(base, exp.unsigned_abs() as usize);
        if exp >= 0 {
            Rational::from_int(mag)
        } else {
            Rational(BigRational::new(BigInt::one(), mag))
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }

}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self.checked_div(&rhs).expect("division by zero")
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl<'a> Div<&'a Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl<'a> Div<Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        self.checked_div(&rhs).expect("division by zero")
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl<'a> Neg for &'a Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<u32> for Rational {
    fn from(n: u32) -> Self {
        Rational::from_int(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| -> Result<BigInt> {
            if t.is_empty() {
                return Err(Error::parse(format!("empty integer in rational '{s}'")));
            }
            let (sign, digits) = match t.as_bytes()[0] {
                b'-' => (Sign::Minus, &t[1..]),
                b'+' => (Sign::Plus, &t[1..]),
                _ => (Sign::Plus, t),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::parse(format!("malformed integer '{t}'")));
            }
            let mag: BigInt = digits
                .parse()
                .map_err(|_| Error::parse(format!("malformed integer '{t}'")))?;
            Ok(if sign == Sign::Minus { -mag } else { mag })
        };
        match s.split_once('/') {
            None => Ok(Rational::from_int(parse_int(s)?)),
            Some((p, q)) => {
                let denom = parse_int(q)?;
                if denom.is_zero() {
                    return Err(Error::parse(format!("zero denominator in '{s}'")));
                }
                Rational::new(parse_int(p)?, denom)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
