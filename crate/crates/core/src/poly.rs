//! Polynomials and piecewise-polynomial functions over the rationals.
//!
//! Pieces are stored with exact coefficients, so evaluation at a rational is
//! a rational, and smoothness conditions (continuity, matching one-sided
//! derivatives, constancy, monotonicity for degree <= 2 derivatives) are
//! checked symbolically on the coefficients rather than sampled.

use crate::error::{Error, Result};
use crate::exact::Rational;
use std::fmt;

/// Dense polynomial with ascending rational coefficients, trailing zeros
/// trimmed.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Rational::from_int(i as i64) * c)
            .collect();
        Polynomial::from_coeffs(coeffs)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
            coeffs.push(a + b);
        }
        Polynomial::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Polynomial::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        Polynomial::from_coeffs(coeffs)
    }

    /// p(a x + b), exactly.
    pub fn compose_affine(&self, a: &Rational, b: &Rational) -> Polynomial {
        let linear = Polynomial::from_coeffs(vec![b.clone(), a.clone()]);
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&linear).add(&Polynomial::constant(c.clone()));
        }
        acc
    }

    /// Exact nonnegativity on [lo, hi] for degree <= 2; `None` when the
    /// degree is out of reach of this closed-form test.
    pub fn nonnegative_on(&self, lo: &Rational, hi: &Rational) -> Option<bool> {
        match self.coeffs.len() {
            0 => Some(true),
            1 => Some(!self.coeffs[0].is_negative()),
            2 => Some(!self.eval(lo).is_negative() && !self.eval(hi).is_negative()),
            3 => {
                if self.eval(lo).is_negative() || self.eval(hi).is_negative() {
                    return Some(false);
                }
                // interior extremum of a quadratic is at the rational vertex
                let vertex = -&self.coeffs[1]
                    / &(Rational::from_int(2) * &self.coeffs[2]);
                if &vertex > lo && &vertex < hi {
                    Some(!self.eval(&vertex).is_negative())
                } else {
                    Some(true)
                }
            }
            _ => None,
        }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Monotonicity verdict for a piecewise function on an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Constant,
    NonDecreasing,
    NonIncreasing,
}

/// Piecewise polynomial: `pieces[i]` applies on `[breakpoints[i],
/// breakpoints[i+1]]`, and the function is identically zero outside the
/// breakpoint span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePoly {
    breakpoints: Vec<Rational>,
    pieces: Vec<Polynomial>,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<Rational>, pieces: Vec<Polynomial>) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::domain(format!(
                "piecewise function needs n+1 breakpoints for n >= 1 pieces, got {} and {}",
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("breakpoints must be strictly increasing"));
        }
        Ok(PiecewisePoly {
            breakpoints,
            pieces,
        })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Polynomial] {
        &self.pieces
    }

    pub fn support(&self) -> (&Rational, &Rational) {
        (
            self.breakpoints.first().unwrap(),
            self.breakpoints.last().unwrap(),
        )
    }

    fn piece_index(&self, x: &Rational) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return None;
        }
        // rightmost piece whose left endpoint is <= x
        let idx = match self.breakpoints.binary_search_by(|b| b.cmp_exact(x)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Some(idx.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        match self.piece_index(x) {
            None => Rational::zero(),
            Some(i) => self.pieces[i].eval(x),
        }
    }

    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Polynomial::derivative).collect(),
        }
    }

    /// Pieces overlapping `[lo, hi]`, clipped, including the zero extension
    /// outside the span.
    pub fn piece_views(&self, lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational, Polynomial)> {
        assert!(lo <= hi);
        let mut views = Vec::new();
        let (slo, shi) = {
            let (a, b) = self.support();
            (a.clone(), b.clone())
        };
        if lo < &slo {
            views.push((lo.clone(), slo.clone().min(hi.clone()), Polynomial::zero()));
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            let a = self.breakpoints[i].clone().max(lo.clone());
            let b = self.breakpoints[i + 1].clone().min(hi.clone());
            if a < b {
                views.push((a, b, piece.clone()));
            }
        }
        if hi > &shi {
            views.push((shi.max(lo.clone()), hi.clone(), Polynomial::zero()));
        }
        views
    }

    /// Symbolic check that every piece value and one-sided derivative match
    /// at interior breakpoints, and that value and derivative vanish at the
    /// outer breakpoints (the function extends by zero).
    pub fn check_c1(&self) -> Result<()> {
        self.check_smooth(true)
    }

    pub fn check_continuous(&self) -> Result<()> {
        self.check_smooth(false)
    }

    fn check_smooth(&self, first_derivative: bool) -> Result<()> {
        let derivs: Vec<Polynomial> = self.pieces.iter().map(Polynomial::derivative).collect();
        let orders: &[&[Polynomial]] = if first_derivative {
            &[&self.pieces, &derivs]
        } else {
            &[&self.pieces]
        };
        for (ord, polys) in orders.iter().enumerate() {
            let first_bp = &self.breakpoints[0];
            if !polys[0].eval(first_bp).is_zero() {
                return Err(Error::domain(format!(
                    "order-{ord} mismatch with zero extension at left support {first_bp}"
                )));
            }
            let last_bp = self.breakpoints.last().unwrap();
            if !polys[polys.len() - 1].eval(last_bp).is_zero() {
                return Err(Error::domain(format!(
                    "order-{ord} mismatch with zero extension at right support {last_bp}"
                )));
            }
            for i in 1..self.pieces.len() {
                let bp = &self.breakpoints[i];
                let left = polys[i - 1].eval(bp);
                let right = polys[i].eval(bp);
                if left != right {
                    return Err(Error::domain(format!(
                        "order-{ord} mismatch at breakpoint {bp}: {left} vs {right}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exact monotonicity on `[lo, hi]` via derivative sign analysis
    /// (degree of each derivative piece must be <= 2).
    pub fn monotonicity_on(&self, lo: &Rational, hi: &Rational) -> Result<Monotonicity> {
        let deriv = self.derivative();
        let mut nonneg = true;
        let mut nonpos = true;
        for (a, b, d) in deriv.piece_views(lo, hi) {
            match d.nonnegative_on(&a, &b) {
                Some(true) => {}
                Some(false) | None => nonneg = false,
            }
            match d.scale(&Rational::from_int(-1)).nonnegative_on(&a, &b) {
                Some(true) => {}
                Some(false) | None => nonpos = false,
            }
        }
        // the zero extension beyond the support can only be constant; handled
        // by piece_views emitting zero polynomials there
        match (nonneg, nonpos) {
            (true, true) => Ok(Monotonicity::Constant),
            (true, false) => Ok(Monotonicity::NonDecreasing),
            (false, true) => Ok(Monotonicity::NonIncreasing),
            (false, false) => Err(Error::domain(format!(
                "no exact monotonicity verdict on [{lo}, {hi}]"
            ))),
        }
    }

    /// Symbolic constancy on `[lo, hi]`: every overlapping piece must be the
    /// same constant.
    pub fn constant_on(&self, lo: &Rational, hi: &Rational) -> Option<Rational> {
        let views = self.piece_views(lo, hi);
        let mut value: Option<Rational> = None;
        for (_, _, p) in views {
            if !p.is_constant() {
                return None;
            }
            let c = p.eval(&Rational::zero());
            match &value {
                None => value = Some(c),
                Some(v) if *v == c => {}
                _ => return None,
            }
        }
        value
    }
}

/// A continuously differentiable piecewise polynomial (validated on
/// construction), extended by zero outside its breakpoint span.
#[derive(Clone, Debug)]
pub struct PiecewiseC1Fn(PiecewisePoly);

impl PiecewiseC1Fn {
    pub fn new(inner: PiecewisePoly) -> Result<Self> {
        inner.check_c1()?;
        Ok(PiecewiseC1Fn(inner))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.0.eval(x)
    }

    pub fn derivative(&self) -> PiecewisePoly {
        self.0.derivative()
    }

    pub fn as_piecewise(&self) -> &PiecewisePoly {
        &self.0
    }
}
