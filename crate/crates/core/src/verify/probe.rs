//! Oscillation sums over gaps and divergence probes over levels.

use crate::cantor::{CantorSystem, GapInterval};
use crate::constructions::{
    m4_gap_profile, m4_sigma, q_weights, ConstructedTriple, ConstructionKind,
};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::poly::Monotonicity;
use num::BigUint;
use std::fmt;
use std::str::FromStr;

/// Sum of |F(b) - F(a)| over the listed gaps, exact.
///
/// With `plateau_aware` set the oscillation is taken over the closed gap via
/// symbolic piece inspection instead of bare endpoint values: for the
/// staircase each gap carries a single monotone ramp transition, so the
/// oscillation equals the endpoint increment once monotonicity is verified;
/// for the bump sum the oscillation is the full bump height.
pub fn osc_sum(
    triple: &ConstructedTriple,
    gaps: &[GapInterval],
    plateau_aware: bool,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for gap in gaps {
        if plateau_aware {
            total = total + gap_oscillation(triple, gap)?;
        } else {
            let fa = triple.integral_at(&gap.left)?.exact()?.clone();
            let fb = triple.integral_at(&gap.right)?.exact()?.clone();
            total = total + (fb - fa).abs();
        }
    }
    Ok(total)
}

fn gap_oscillation(triple: &ConstructedTriple, gap: &GapInterval) -> Result<Rational> {
    match triple.meta().construction {
        ConstructionKind::M4 => {
            let profile = m4_gap_profile(triple, gap)?;
            let mono = profile
                .ramp
                .as_piecewise()
                .monotonicity_on(&gap.left, &gap.right)?;
            if mono == Monotonicity::Constant {
                return Err(Error::domain(format!(
                    "gap ({}, {}) carries no ramp transition",
                    gap.left, gap.right
                )));
            }
            let (fa, fb) = profile.endpoint_values();
            Ok((fb - fa).abs())
        }
        ConstructionKind::M3 => {
            // the bump attains its full height at the center plateau and
            // vanishes near both gap ends, so osc = Q_J inside the truncation
            if gap.level <= triple.meta().depth {
                Ok(q_weights(gap.level))
            } else {
                Ok(Rational::zero())
            }
        }
        _ => Err(Error::domain(
            "plateau-aware oscillation needs a construction with symbolic gap profiles",
        )),
    }
}

/// What a divergence probe accumulates per level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeSource {
    /// Bump weights Q_J over gaps in the region (ternary system).
    M3Weights,
    /// Staircase endpoint oscillations sigma_k 3^{-k} over gaps in the
    /// region (base-5 system).
    M4Oscillations,
}

impl ProbeSource {
    fn base(&self) -> u32 {
        match self {
            ProbeSource::M3Weights => 3,
            ProbeSource::M4Oscillations => 5,
        }
    }

    fn level_weight(&self, k: u32) -> Rational {
        match self {
            ProbeSource::M3Weights => q_weights(k),
            ProbeSource::M4Oscillations => m4_sigma(k) * Rational::pow(3, -(k as i64)),
        }
    }
}

impl fmt::Display for ProbeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbeSource::M3Weights => write!(f, "m3-weights"),
            ProbeSource::M4Oscillations => write!(f, "m4-oscillations"),
        }
    }
}

impl FromStr for ProbeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m3-weights" => Ok(ProbeSource::M3Weights),
            "m4-oscillations" => Ok(ProbeSource::M4Oscillations),
            _ => Err(Error::parse(format!("unknown probe source '{s}'"))),
        }
    }
}

/// Least level K at which the partial sum of per-gap weights over gaps
/// contained in `region` reaches `target`.
///
/// Gap counts per level come from the boundary-tracking counter, so no level
/// is ever enumerated. Divergence guarantees termination whenever the region
/// meets the Cantor set; `level_cap` bounds the search for regions that do
/// not.
pub fn divergence_probe(
    source: ProbeSource,
    region: (Rational, Rational),
    target: &Rational,
    level_cap: u32,
) -> Result<u32> {
    if !target.is_positive() {
        return Err(Error::domain("probe target must be positive"));
    }
    let sys = CantorSystem::new(source.base())?;
    let mut counter = sys.gap_counter(region.0.clone(), region.1.clone())?;
    let mut partial = Rational::zero();
    for k in 1..=level_cap {
        let count = counter.advance();
        if count > BigUint::from(0u32) {
            let count_r = Rational::from_int(num::BigInt::from(count));
            partial = partial + count_r * source.level_weight(k);
        }
        if &partial >= target {
            return Ok(k);
        }
    }
    Err(Error::budget(format!(
        "partial sums reached only {partial} of {target} within {level_cap} levels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{m3_build, m4_build};

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn m3_weight_probe_block_values() {
        let region = (r("0"), r("1"));
        assert_eq!(
            divergence_probe(ProbeSource::M3Weights, region.clone(), &r("3/8"), 100).unwrap(),
            3
        );
        assert_eq!(
            divergence_probe(ProbeSource::M3Weights, region.clone(), &r("1"), 100).unwrap(),
            47
        );
        // a region missing the set never accumulates: budget error
        let inside_gap = (r("11/27"), r("13/27")); // interior of a gap
        assert!(matches!(
            divergence_probe(ProbeSource::M3Weights, inside_gap, &r("1/1000"), 30),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn m4_oscillation_probe() {
        assert_eq!(
            divergence_probe(ProbeSource::M4Oscillations, (r("0"), r("1")), &r("1"), 100)
                .unwrap(),
            6
        );
    }

    #[test]
    fn probe_on_subregions_matches_direct_summation() {
        // direct oracle: enumerate gaps, sum weights level by level
        let sys = CantorSystem::new(3).unwrap();
        let region = (r("1/10"), r("1/2"));
        let target = r("1/16");
        let k = divergence_probe(ProbeSource::M3Weights, region.clone(), &target, 40).unwrap();
        let mut partial = Rational::zero();
        let mut reached = None;
        for level in 1..=12u32 {
            for gap in sys.gap_level(level).unwrap().iter() {
                if region.0 <= gap.left && gap.right <= region.1 {
                    partial = partial + q_weights(level);
                }
            }
            if partial >= target {
                reached = Some(level);
                break;
            }
        }
        assert_eq!(Some(k), reached);
    }

    #[test]
    fn oscillation_sums() {
        let triple = m4_build(6).unwrap();
        let sys = triple.system().unwrap().clone();
        // single gap (1/5, 2/5)
        let g1 = sys.gap_level(1).unwrap()[0].clone();
        assert_eq!(osc_sum(&triple, &[g1], false).unwrap(), r("1/6"));
        // all gaps of levels 1..3
        let mut gaps = Vec::new();
        for k in 1..=3 {
            gaps.extend(sys.gap_level(k).unwrap().iter().cloned());
        }
        assert_eq!(osc_sum(&triple, &gaps, false).unwrap(), r("13/18"));
        assert_eq!(osc_sum(&triple, &gaps, true).unwrap(), r("13/18"));
        // empty list
        assert_eq!(osc_sum(&triple, &[], false).unwrap(), r("0"));
    }

    #[test]
    fn plateau_aware_bump_oscillation_is_the_weight() {
        let triple = m3_build(r("3"), 4).unwrap();
        let sys = triple.system().unwrap().clone();
        let g1 = sys.gap_level(1).unwrap()[0].clone();
        // endpoint increments vanish but the true oscillation is Q_J
        assert_eq!(osc_sum(&triple, &[g1.clone()], false).unwrap(), r("0"));
        assert_eq!(osc_sum(&triple, &[g1], true).unwrap(), r("1/8"));
        // beyond the truncation the built object is flat
        let deep = sys.gap_level(6).unwrap()[0].clone();
        assert_eq!(osc_sum(&triple, &[deep], true).unwrap(), r("0"));
    }
}
