//! Named, reproducible delta rules.
//!
//! Each rule computes, from the check parameters alone, a window radius for
//! which the corresponding construction provably satisfies its controlled
//! inequality, so a pass verdict on the rule's grid is meaningful.

use crate::constructions::{m4_sigma, m4_tau, ConstructedTriple, ConstructionKind};
use crate::error::{Error, Result};
use crate::exact::Rational;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeltaRule {
    /// Bump-sum proof recipe: eta below both eps and beta sigma - 1, kappa
    /// from the weight inequality's exact exception scan and the geometric
    /// constraint kappa < sigma - (1+eta)/beta, then delta = kappa sigma / 2.
    M3Proof,
    /// Staircase proof recipe: the least l with alpha > 2(1 + 5^{1-l}), the
    /// least stage m from which alpha tau_j > 1 + 5^{-l} and
    /// sigma_j 3^{l+2} < eps, then delta = min(distance to {0,1}, 5^{-m-1}).
    M4Proof,
    /// A fixed radius, for report-only probing.
    Fixed(Rational),
}

impl DeltaRule {
    /// How many aligned levels beyond the first one inside the window the
    /// rule's grid should include.
    pub fn level_span(&self) -> u32 {
        match self {
            DeltaRule::M3Proof => 2,
            DeltaRule::M4Proof => 0,
            DeltaRule::Fixed(_) => 2,
        }
    }

    pub fn delta(
        &self,
        triple: &ConstructedTriple,
        alpha: &Rational,
        eps: &Rational,
        x: &Rational,
    ) -> Result<Rational> {
        match self {
            DeltaRule::Fixed(d) => {
                if d.is_positive() {
                    Ok(d.clone())
                } else {
                    Err(Error::domain("fixed delta must be positive"))
                }
            }
            DeltaRule::M3Proof => m3_proof_delta(triple, alpha, eps),
            DeltaRule::M4Proof => m4_proof_delta(alpha, eps, x),
        }
    }
}

impl fmt::Display for DeltaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaRule::M3Proof => write!(f, "m3-proof-delta"),
            DeltaRule::M4Proof => write!(f, "m4-proof-delta"),
            DeltaRule::Fixed(d) => write!(f, "fixed:{d}"),
        }
    }
}

impl FromStr for DeltaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m3-proof-delta" => Ok(DeltaRule::M3Proof),
            "m4-proof-delta" => Ok(DeltaRule::M4Proof),
            _ => match s.strip_prefix("fixed:") {
                Some(v) => Ok(DeltaRule::Fixed(v.parse()?)),
                None => Err(Error::parse(format!("unknown delta rule '{s}'"))),
            },
        }
    }
}

/// Exact exception scan for the bump weights: the least level from which
/// every gap satisfies Q_J <= eta * min psi-increment. Both psi increments
/// at a level-k gap equal 2^{-k} psi(eta) by self-similarity, so the
/// condition is 4^{-l(k)} <= eta psi(eta) on the weight block l(k); the scan
/// walks blocks until it holds.
pub(crate) fn m3_weight_threshold_level(
    triple: &ConstructedTriple,
    eta: &Rational,
) -> Result<u32> {
    let sys = triple
        .system()
        .ok_or_else(|| Error::domain("bump-sum rule needs the ternary system"))?;
    if !eta.is_positive() || eta > &Rational::one() {
        return Err(Error::domain(format!("eta {eta} outside (0, 1]")));
    }
    let target = eta * &sys.psi_exact(eta)?;
    if !target.is_positive() {
        return Err(Error::domain(format!("eta {eta} gives a vanishing psi increment")));
    }
    for l in 1u32..=12 {
        if Rational::pow(4, -(l as i64)) <= target {
            // first level of block l
            return Ok(4u32.pow(l - 1));
        }
    }
    Err(Error::budget(format!(
        "weight threshold for eta {eta} lies beyond block 12"
    )))
}

fn m3_proof_delta(
    triple: &ConstructedTriple,
    beta: &Rational,
    eps: &Rational,
) -> Result<Rational> {
    if triple.meta().construction != ConstructionKind::M3 {
        return Err(Error::domain("m3-proof-delta applies to bump-sum triples"));
    }
    let alpha = triple
        .meta()
        .params
        .get("alpha")
        .ok_or_else(|| Error::domain("bump-sum triple lacks alpha"))?;
    let sigma = alpha.recip()?;
    let beta_sigma = beta * &sigma;
    if beta_sigma <= Rational::one() {
        return Err(Error::domain(format!(
            "m3-proof-delta needs beta > alpha: beta {beta} vs alpha {alpha}"
        )));
    }
    // 0 < eta < eps with beta sigma > 1 + eta, clamped into psi's domain
    let eta = eps
        .clone()
        .min(&beta_sigma - &Rational::one())
        .min(Rational::one())
        * Rational::ratio(1, 2);
    let k_min = m3_weight_threshold_level(triple, &eta)?;
    if k_min > 100_000 {
        return Err(Error::budget(format!(
            "exception scan reached level {k_min}; window would underflow any grid"
        )));
    }
    // every gap shorter than kappa has level >= k_min, and kappa stays below
    // the geometric constraint
    let kappa_scan = Rational::pow(3, -(k_min as i64 - 1));
    let kappa_geom =
        (&sigma - &(&(Rational::one() + &eta) / beta)) * Rational::ratio(1, 2);
    let kappa = kappa_scan.min(kappa_geom);
    Ok(&(&kappa * &sigma) / &Rational::from_int(2))
}

fn m4_proof_delta(alpha: &Rational, eps: &Rational, x: &Rational) -> Result<Rational> {
    if alpha <= &Rational::from_int(2) {
        return Err(Error::domain(format!(
            "m4-proof-delta needs alpha > 2, got {alpha}"
        )));
    }
    if !eps.is_positive() {
        return Err(Error::domain("m4-proof-delta needs eps > 0"));
    }
    // least l with alpha > 2(1 + 5^{1-l})
    let mut l = None;
    for cand in 1u32..=64 {
        let bound = Rational::from_int(2)
            * (Rational::one() + Rational::pow(5, 1 - cand as i64));
        if alpha > &bound {
            l = Some(cand);
            break;
        }
    }
    let l = l.ok_or_else(|| Error::budget("no stage l within 64 blocks"))?;
    // least stage m with alpha tau_j > 1 + 5^{-l} and sigma_j 3^{l+2} < eps
    // for j = m (both sides are monotone in j)
    let gap_bound = Rational::one() + Rational::pow(5, -(l as i64));
    let three_pow = Rational::pow(3, l as i64 + 2);
    let mut m = None;
    for j in 1u32..=1_000_000 {
        if alpha * &m4_tau(j) > gap_bound && m4_sigma(j) * &three_pow < *eps {
            m = Some(j);
            break;
        }
    }
    let m = m.ok_or_else(|| {
        Error::budget("no staircase stage satisfies both proof constraints within 10^6")
    })?;
    let base = Rational::pow(5, -(m as i64 + 1));
    let zero = Rational::zero();
    let one = Rational::one();
    if x > &zero && x < &one {
        Ok(base.min(x - &zero).min(&one - x))
    } else {
        Ok(base)
    }
}

/// A certified bound beneath which every bump weight satisfies the control
/// inequality; exposed for tests of the scan itself.
pub fn m3_weight_threshold(triple: &ConstructedTriple, eta: &Rational) -> Result<u32> {
    m3_weight_threshold_level(triple, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{m3_build, q_weights};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn threshold_scan_matches_hand_computation() {
        let triple = m3_build(r("3"), 4).unwrap();
        // eta = 1/2: psi = 1/2, eta psi = 1/4 = 4^{-1}: block 1, level 1
        assert_eq!(m3_weight_threshold(&triple, &r("1/2")).unwrap(), 1);
        // eta = 1/4: psi = 1/3, eta psi = 1/12: block 2, level 4
        assert_eq!(m3_weight_threshold(&triple, &r("1/4")).unwrap(), 4);
        // eta = 1/8: psi = 1/4, eta psi = 1/32: block 3, level 16
        assert_eq!(m3_weight_threshold(&triple, &r("1/8")).unwrap(), 16);
        // eta = 1/12: psi = 1/6, eta psi = 1/72: block 4, level 64
        assert_eq!(m3_weight_threshold(&triple, &r("1/12")).unwrap(), 64);
    }

    #[test]
    fn weight_inequality_boundary_is_exact() {
        // the scan's threshold is sharp: the weight inequality holds at the
        // threshold level and fails just below it
        let triple = m3_build(r("3"), 4).unwrap();
        let sys = triple.system().unwrap();
        let check = |eta: &Rational, k: u32| -> bool {
            let psi_eta = sys.psi_exact(eta).unwrap();
            let rhs = eta * &(&Rational::pow(2, -(k as i64)) * &psi_eta);
            q_weights(k) <= rhs
        };
        assert!(check(&r("1/4"), 4));
        assert!(!check(&r("1/4"), 3));
        assert!(check(&r("1/8"), 16));
        assert!(!check(&r("1/8"), 15));
        assert!(!check(&r("1/8"), 4));
    }

    #[test]
    fn m3_delta_is_positive_and_small() {
        let triple = m3_build(r("3"), 8).unwrap();
        let d = DeltaRule::M3Proof
            .delta(&triple, &r("7/2"), &r("1/2"), &r("0"))
            .unwrap();
        assert!(d.is_positive());
        // eta = 1/12 forces the scan to level 64, kappa = 3^{-63}
        assert_eq!(d, Rational::pow(3, -63) * r("1/6"));
        let d2 = DeltaRule::M3Proof
            .delta(&triple, &r("4"), &r("1/4"), &r("0"))
            .unwrap();
        assert_eq!(d2, Rational::pow(3, -15) * r("1/6"));
        // beta <= alpha is rejected
        assert!(DeltaRule::M3Proof
            .delta(&triple, &r("3"), &r("1/2"), &r("0"))
            .is_err());
    }

    #[test]
    fn m4_delta_matches_proof_recipe() {
        let triple = crate::constructions::m4_build(4).unwrap();
        // alpha = 5/2: l = 2; constraints need j >= 648 for eps = 1/8
        let d = DeltaRule::M4Proof
            .delta(&triple, &r("5/2"), &r("1/8"), &r("2/5"))
            .unwrap();
        assert_eq!(d, Rational::pow(5, -649));
        // near the right edge the distance to 1 caps the radius
        let x = Rational::one() - Rational::pow(5, -700);
        let d_edge = DeltaRule::M4Proof
            .delta(&triple, &r("3"), &r("1/8"), &x)
            .unwrap();
        assert_eq!(d_edge, Rational::pow(5, -700));
        assert!(DeltaRule::M4Proof
            .delta(&triple, &r("2"), &r("1/8"), &r("1/2"))
            .is_err());
    }

    #[test]
    fn rule_parsing_round_trips() {
        for s in ["m3-proof-delta", "m4-proof-delta", "fixed:1/7"] {
            let rule: DeltaRule = s.parse().unwrap();
            assert_eq!(rule.to_string(), s);
        }
        assert!("nonsense".parse::<DeltaRule>().is_err());
    }
}
