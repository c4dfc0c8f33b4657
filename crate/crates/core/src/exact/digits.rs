//! Base-q digit expansions with period detection.
//!
//! Digits are produced by long division; the period is found when a
//! fractional remainder repeats. Values with two expansions are stored in
//! terminating form (the all-(base-1)-tail twin is never produced by long
//! division). Consumers that need the dual expansion, such as Cantor set
//! membership at interval endpoints, must handle it themselves.

use super::Rational;
use crate::error::{Error, Result};
use num::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Exact eventually-periodic positional expansion of a nonnegative rational.
///
/// The represented value is
/// `integer_part + 0.d_1 d_2 ... (base q)` where the digit stream is
/// `preperiod` followed by `period` repeated forever (empty period means the
/// expansion terminates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigitExpansion {
    pub base: u32,
    pub integer_part: BigInt,
    pub preperiod: Vec<u32>,
    pub period: Vec<u32>,
}

impl DigitExpansion {
    /// Reconstructs the exact rational: finite sum over the preperiod plus
    /// the geometric series of the repeating block. Digit sums are integer
    /// Horner evaluations; only the final combination reduces.
    pub fn reconstruct(&self) -> Rational {
        let base = BigInt::from(self.base);
        let horner = |digits: &[u32]| -> BigInt {
            let mut acc = BigInt::from(0);
            for &d in digits {
                acc = acc * &base + BigInt::from(d);
            }
            acc
        };
        let p = self.preperiod.len();
        let base_p = num::pow::pow(base.clone(), p);
        let mut value = Rational::from_int(self.integer_part.clone())
            + Rational::new(horner(&self.preperiod), base_p.clone()).expect("base power > 0");
        if !self.period.is_empty() {
            // block B over base^L - 1, shifted below the preperiod
            let block = horner(&self.period);
            let cycle = num::pow::pow(base.clone(), self.period.len()) - BigInt::from(1);
            value = value
                + Rational::new(block, cycle * base_p).expect("positive denominator");
        }
        value
    }
}

/// Expands `x >= 0` in base `base >= 2`, detecting the period through long
/// division remainder cycling.
///
/// Errors with a budget error if the preperiod would exceed `max_preperiod`
/// (cannot happen when the denominator has fewer distinct remainders).
pub fn baseq_expand(x: &Rational, base: u32, max_preperiod: usize) -> Result<DigitExpansion> {
    if base < 2 {
        return Err(Error::domain(format!("base {base} < 2")));
    }
    if max_preperiod == 0 {
        return Err(Error::domain("max_preperiod must be >= 1"));
    }
    if x.is_negative() {
        return Err(Error::domain(format!("cannot expand negative value {x}")));
    }
    let integer_part = x.floor();
    // long division on the fixed denominator: remainder = num/den, never
    // reduced, so the numerator identifies the state unambiguously
    // (subtracting the integer part keeps x's denominator)
    let den = x.denom().clone();
    let mut num = (x - &Rational::from_int(integer_part.clone())).numer().clone();
    let base_big = BigInt::from(base);

    let mut digits: Vec<u32> = Vec::new();
    let mut seen: HashMap<BigInt, usize> = HashMap::new();
    loop {
        if num::Zero::is_zero(&num) {
            return Ok(DigitExpansion {
                base,
                integer_part,
                preperiod: digits,
                period: Vec::new(),
            });
        }
        if let Some(&start) = seen.get(&num) {
            let period = digits.split_off(start);
            return Ok(DigitExpansion {
                base,
                integer_part,
                preperiod: digits,
                period,
            });
        }
        if digits.len() >= max_preperiod {
            return Err(Error::budget(format!(
                "digit expansion of {x} exceeded max preperiod {max_preperiod}"
            )));
        }
        seen.insert(num.clone(), digits.len());
        let scaled = &num * &base_big;
        let (digit, rem) = num::Integer::div_rem(&scaled, &den);
        num = rem;
        digits.push(num::ToPrimitive::to_u32(&digit).expect("digit below base"));
    }
}
