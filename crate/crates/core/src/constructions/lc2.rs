//! Step-function family with small total mass but large witness sums, and
//! the truncated aggregate built from it on a working interval.
//!
//! The family concentrates its mass `eps` on a terminal interval [a_m, b]
//! where the points a_i march geometrically toward b; every witness interval
//! [a_i, b] then carries the full mass, so the witness sum m*eps exceeds
//! 1/eps, while the prefixes [a_i, a_i + tau(b - a_i)] stay disjoint
//! because tau < sigma.

use super::{ConstructedTriple, ConstructionKind, FnEval, LinearSpline, StepFn, TripleMeta};
use crate::error::{Error, Result};
use crate::exact::Rational;
use num::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Output of [`lc2_build`].
#[derive(Clone, Debug)]
pub struct Lc2Family {
    /// The step function: eps/(b - a_m) on [a_m, b], zero elsewhere.
    pub f: StepFn,
    /// Witness intervals [a_i, b], i = 0..m-1.
    pub witnesses: Vec<(Rational, Rational)>,
    /// The full recursion a_0 < a_1 < ... < a_m.
    pub a_seq: Vec<Rational>,
    pub eps: Rational,
    pub tau: Rational,
    pub sigma: Rational,
}

impl Lc2Family {
    /// The prefix intervals [a_i, a_i + tau(b - a_i)] whose disjointness the
    /// construction guarantees.
    pub fn prefix_intervals(&self, b: &Rational) -> Vec<(Rational, Rational)> {
        self.witnesses
            .iter()
            .map(|(a, _)| (a.clone(), a + &(&self.tau * &(b - a))))
            .collect()
    }
}

/// Builds the family on `[a, b]` inside the open interval `j`.
///
/// Requires 0 < eps < 1, 0 < tau < sigma < 1, and [a, b] strictly inside j.
/// m is the least integer exceeding 1/eps^2.
pub fn lc2_build(
    j: (Rational, Rational),
    eps: Rational,
    tau: Rational,
    sigma: Rational,
    ab: (Rational, Rational),
) -> Result<Lc2Family> {
    if !eps.is_positive() || eps >= Rational::one() {
        return Err(Error::domain(format!("eps {eps} outside (0,1)")));
    }
    if !tau.is_positive() || tau >= Rational::one() {
        return Err(Error::domain(format!("tau {tau} outside (0,1)")));
    }
    if sigma <= tau || sigma >= Rational::one() {
        return Err(Error::domain(format!(
            "sigma {sigma} outside (tau, 1) with tau {tau}"
        )));
    }
    let (a, b) = ab;
    if a >= b || j.0 >= a || b >= j.1 {
        return Err(Error::domain(format!(
            "[{a}, {b}] is not strictly inside ({}, {})",
            j.0, j.1
        )));
    }

    // least integer > 1/eps^2
    let inv_sq = (&eps * &eps).recip()?;
    let m_int: BigInt = inv_sq.floor() + 1;
    let m = num::ToPrimitive::to_usize(&m_int)
        .filter(|m| *m <= 10_000_000)
        .ok_or_else(|| {
            Error::budget(format!("lc2 family with m = {m_int} points is out of budget"))
        })?;

    let mut a_seq = Vec::with_capacity(m + 1);
    a_seq.push(a);
    for i in 1..=m {
        let prev = &a_seq[i - 1];
        a_seq.push(prev + &(&sigma * &(&b - prev)));
    }
    let a_m = a_seq[m].clone();
    let height = eps.checked_div(&(&b - &a_m))?;
    let f = StepFn::new(vec![(a_m, b.clone(), height)])?;
    let witnesses = a_seq[..m]
        .iter()
        .map(|ai| (ai.clone(), b.clone()))
        .collect();
    Ok(Lc2Family {
        f,
        witnesses,
        a_seq,
        eps,
        tau,
        sigma,
    })
}

/// Deterministic enumeration of the positive rationals (Calkin-Wilf order):
/// 1, 1/2, 2, 1/3, 3/2, 2/3, 3, ...
pub fn calkin_wilf(n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut x = Rational::one();
    for _ in 0..n {
        out.push(x.clone());
        // next = 1 / (2 floor(x) + 1 - x)
        let next_denom =
            Rational::from_int(x.floor() * BigInt::from(2) + BigInt::from(1)) - &x;
        x = next_denom.recip().expect("calkin-wilf never hits zero");
    }
    out
}

/// The truncated aggregate: per-stage families around a deterministic
/// rational enumeration of the working interval.
pub struct M1Aggregate {
    /// Sum of the stage step functions.
    pub f: StepFn,
    /// Exact indefinite integral of `f`, anchored at the interval's left end.
    pub big_f: LinearSpline,
    /// Per-stage data: (eps_k, tau_k, sigma_k, family).
    pub stages: Vec<(Rational, Rational, Rational, Lc2Family)>,
    pub interval: (Rational, Rational),
    pub depth: u32,
}

impl M1Aggregate {
    /// Wraps the aggregate as a triple for the CLI surface. There is no
    /// control function here (that is the point of the construction), so the
    /// control slot carries the identity and is only meaningful for
    /// report-only checks.
    pub fn into_triple(self) -> ConstructedTriple {
        let mut params = BTreeMap::new();
        params.insert("lo".to_string(), self.interval.0.clone());
        params.insert("hi".to_string(), self.interval.1.clone());
        let meta = TripleMeta {
            construction: ConstructionKind::M1,
            params,
            depth: self.depth,
            tail_note: Some(format!(
                "stages k > {} omitted; omitted mass is exactly 2^-{}",
                self.depth, self.depth
            )),
        };
        let f = self.f;
        let big_f = self.big_f;
        ConstructedTriple::new(
            meta,
            Arc::new(big_f),
            Arc::new(f),
            Arc::new(FnEval(|x: &Rational| x.clone())),
            None,
        )
    }
}

/// Builds the depth-`k_max` aggregate on the open interval `(lo, hi)`.
///
/// Stage k uses eps_k = 2^-k, tau_k = 1 - 2^-k, sigma_k = (1 + tau_k)/2 and
/// centers the stage at the k-th point of the Calkin-Wilf enumeration mapped
/// into the interval through t -> lo + (hi - lo) t/(1+t).
pub fn m1_build(k_max: u32, lo: Rational, hi: Rational) -> Result<M1Aggregate> {
    if k_max == 0 {
        return Err(Error::domain("m1 aggregate needs depth >= 1"));
    }
    // stage k recurses 4^k + 1 times with denominators growing by 2^{k+1}
    // per step, so deep stages are genuinely enormous
    if k_max > 8 {
        return Err(Error::budget(format!(
            "m1 stage {k_max} needs 4^{k_max} subdivision points"
        )));
    }
    if lo >= hi {
        return Err(Error::domain(format!("empty working interval ({lo}, {hi})")));
    }
    let span = &hi - &lo;
    let cw = calkin_wilf(k_max as usize);
    let mut f = StepFn::new(Vec::new())?;
    let mut stages = Vec::new();
    for k in 1..=k_max {
        let eps = Rational::pow(2, -(k as i64));
        let tau = Rational::one() - &eps;
        let sigma = Rational::one() - Rational::pow(2, -(k as i64 + 1));
        let c = &cw[k as usize - 1];
        let r_k = &lo + &(&span * &(c / &(c + &Rational::one())));
        let j_lo = (&r_k - &eps).max(lo.clone());
        let j_hi = (&r_k + &eps).min(hi.clone());
        let quarter = (&j_hi - &j_lo) * Rational::ratio(1, 4);
        let ab = (&j_lo + &quarter, &j_hi - &quarter);
        let family = lc2_build((j_lo, j_hi), eps.clone(), tau.clone(), sigma.clone(), ab)?;
        f = f.add(&family.f);
        stages.push((eps, tau, sigma, family));
    }
    let big_f = f.indefinite_integral(lo.clone());
    Ok(M1Aggregate {
        f,
        big_f,
        stages,
        interval: (lo, hi),
        depth: k_max,
    })
}
