//! Digit walk of a rational point through the subdivision tree.
//!
//! One step rescales the current node to [0,1] and reads off the next base-q
//! digit: even digits descend into a closed child, odd digits land in a gap.
//! Boundary points (exact multiples of q^{-k}) always descend into the
//! adjacent closed child, which classifies node endpoints as members of C
//! and implements the dual-expansion rule for terminating digit strings.
//!
//! The remainder is carried as an integer numerator over the fixed starting
//! denominator, so a step is a small-factor multiply and one short division;
//! nothing is ever reduced mid-walk. Because the numerator determines the
//! remainder, the walk of a rational either hits a gap or cycles, and both
//! cases resolve the Cantor function exactly.

use super::CantorSystem;
use crate::error::{Error, Result};
use crate::exact::Rational;
use num::{BigInt, Integer, Zero};
use std::collections::HashMap;

/// Outcome of one digit step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    /// Descended into closed child `child` (0..=m).
    Node { child: u32 },
    /// Landed strictly inside the open gap between closed children
    /// `gap_index` and `gap_index + 1`. The walk is finished.
    Gap { gap_index: u32 },
}

/// Result of resolving the Cantor function along a walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WalkResolution {
    /// The walk hit a gap or its digits cycled: psi(x) exactly.
    Exact(Rational),
    /// Depth limit reached first: `partial` is the level-`depth` value
    /// psi_depth(x), within (m+1)^{-depth} of psi(x).
    Truncated { partial: Rational },
}

pub struct DigitWalk {
    q: u32,
    m: u32,
    /// remainder = num / den with 0 <= num <= den; den is fixed for the
    /// whole walk and num is never reduced against it
    num: BigInt,
    den: BigInt,
    level: u32,
    budget: usize,
    finished: bool,
}

impl DigitWalk {
    pub(super) fn new(sys: &CantorSystem, x: &Rational) -> Result<Self> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::domain(format!("digit walk requires x in [0,1], got {x}")));
        }
        Ok(DigitWalk {
            q: sys.q(),
            m: sys.m(),
            num: x.numer().clone(),
            den: x.denom().clone(),
            level: 0,
            budget: sys.walk_budget(),
            finished: false,
        })
    }

    /// Number of completed steps.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Numerator of the current remainder over the fixed denominator;
    /// identifies the walk state for cycle detection.
    pub fn remainder_numerator(&self) -> &BigInt {
        &self.num
    }

    /// Position of x within the current node, rescaled to [0,1].
    pub fn remainder(&self) -> Rational {
        Rational::new(self.num.clone(), self.den.clone()).expect("den > 0")
    }

    /// Performs one digit step. Must not be called after a `Gap` outcome.
    pub fn step(&mut self) -> StepOutcome {
        assert!(!self.finished, "digit walk already landed in a gap");
        let scaled = &self.num * BigInt::from(self.q);
        let (j_int, frac) = scaled.div_rem(&self.den);
        let j = num::ToPrimitive::to_u32(&j_int).expect("digit in 0..=q");
        self.level += 1;
        if frac.is_zero() {
            // boundary point: descend into the adjacent closed child
            if j == self.q {
                self.num = self.den.clone();
                StepOutcome::Node { child: self.m }
            } else if j % 2 == 0 {
                self.num = BigInt::zero();
                StepOutcome::Node { child: j / 2 }
            } else {
                self.num = self.den.clone();
                StepOutcome::Node { child: (j - 1) / 2 }
            }
        } else if j % 2 == 0 {
            self.num = frac;
            StepOutcome::Node { child: j / 2 }
        } else {
            self.finished = true;
            self.num = frac;
            StepOutcome::Gap { gap_index: (j - 1) / 2 }
        }
    }

    /// Runs the walk until it resolves psi(x) exactly (gap hit or digit
    /// cycle) or, when `limit` is given, until `limit` steps have been
    /// taken, whichever comes first.
    pub fn resolve(&mut self, limit: Option<u32>) -> Result<WalkResolution> {
        let r = BigInt::from(self.m + 1);
        // psi partial sum as an integer over (m+1)^level
        let mut acc = BigInt::zero();
        let mut digits: Vec<u32> = Vec::new();
        let mut accs: Vec<BigInt> = Vec::new();
        let mut seen: HashMap<BigInt, usize> = HashMap::new();
        let r_base = r.clone();
        let r_pow = move |e: u32| -> BigInt { r_base.pow(e) };
        loop {
            if let Some(&idx) = seen.get(&self.num) {
                // digits[idx..] repeat forever: geometric block sum
                let cycle_len = (digits.len() - idx) as u32;
                let mut block = BigInt::zero();
                for &d in &digits[idx..] {
                    block = block * &r + BigInt::from(d);
                }
                let geom = Rational::new(block, r_pow(cycle_len) - BigInt::from(1))?;
                let head = Rational::new(accs[idx].clone(), r_pow(idx as u32))?;
                let value =
                    head + Rational::new(BigInt::from(1), r_pow(idx as u32))? * geom;
                return Ok(WalkResolution::Exact(value));
            }
            if let Some(depth) = limit {
                if self.level >= depth {
                    // psi_depth = (acc * den + num) / ((m+1)^depth * den)
                    let partial = Rational::new(
                        &acc * &self.den + &self.num,
                        r_pow(depth) * &self.den,
                    )?;
                    return Ok(WalkResolution::Truncated { partial });
                }
            }
            if self.level as usize >= self.budget {
                return Err(Error::budget(format!(
                    "digit walk exceeded {} steps without resolving",
                    self.budget
                )));
            }
            seen.insert(self.num.clone(), digits.len());
            accs.push(acc.clone());
            match self.step() {
                StepOutcome::Node { child } => {
                    digits.push(child);
                    acc = acc * &r + BigInt::from(child);
                }
                StepOutcome::Gap { gap_index } => {
                    let value = Rational::new(
                        acc * &r + BigInt::from(gap_index + 1),
                        r_pow(self.level),
                    )?;
                    return Ok(WalkResolution::Exact(value));
                }
            }
        }
    }
}
