//! Evaluation grids around a center point.
//!
//! Grids discretize the limit in the controlled-derivative definition: a
//! window (x - delta, x + delta) and a finite set of probe points inside it,
//! never including x itself. The default generator uses base-q-aligned
//! points (node and gap endpoints within the window, plus gap midpoints) and
//! construction-specific extrema such as bump peaks, support edges, and ramp
//! transition knots.

use crate::cantor::{CantorSystem, GapInterval, WindowStructure};
use crate::constructions::{BumpParams, ConstructedTriple, ConstructionKind};
use crate::error::{Error, Result};
use crate::exact::Rational;
use std::ops::RangeInclusive;

use super::delta::DeltaRule;

/// A materialized evaluation grid.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub center: Rational,
    pub radius: Rational,
    points: Vec<Rational>,
}

impl GridSpec {
    /// Validates an explicit point list: every point must lie strictly
    /// inside the window and differ from the center.
    pub fn explicit(center: Rational, radius: Rational, points: Vec<Rational>) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::domain(format!("grid radius {radius} must be positive")));
        }
        let lo = &center - &radius;
        let hi = &center + &radius;
        for p in &points {
            if p <= &lo || p >= &hi {
                return Err(Error::domain(format!(
                    "grid point {p} outside window ({lo}, {hi})"
                )));
            }
            if p == &center {
                return Err(Error::domain("grid points must exclude the center"));
            }
        }
        let mut points = points;
        points.sort_by(|a, b| a.cmp_exact(b));
        points.dedup();
        Ok(GridSpec {
            center,
            radius,
            points,
        })
    }

    /// Generates base-q-aligned points: endpoints of nodes with level in
    /// `levels`, endpoints and midpoints of gaps of level up to the range
    /// end, plus `extras`, all filtered to the open window minus the center.
    pub fn aligned(
        sys: &CantorSystem,
        center: Rational,
        radius: Rational,
        levels: RangeInclusive<u32>,
        extras: &[Rational],
    ) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::domain(format!("grid radius {radius} must be positive")));
        }
        let lo = &center - &radius;
        let hi = &center + &radius;
        let mut candidates: Vec<Rational> = Vec::new();
        for s in sys.structures_in_window(&lo, &hi, *levels.end(), *levels.start()) {
            match s {
                WindowStructure::Node(n) => {
                    if levels.contains(&n.level) {
                        candidates.push(n.left);
                        candidates.push(n.right);
                    }
                }
                WindowStructure::Gap(g) => {
                    candidates.push(g.midpoint());
                    candidates.push(g.left);
                    candidates.push(g.right);
                }
            }
        }
        candidates.extend_from_slice(extras);
        candidates.retain(|p| p > &lo && p < &hi && p != &center);
        candidates.sort_by(|a, b| a.cmp_exact(b));
        candidates.dedup();
        if candidates.is_empty() {
            return Err(Error::domain(format!(
                "aligned grid around {center} with radius {radius} is empty"
            )));
        }
        Ok(GridSpec {
            center,
            radius,
            points: candidates,
        })
    }

    pub fn points(&self) -> &[Rational] {
        &self.points
    }
}

/// Least level j with q^{-j} strictly below `delta`.
pub fn least_level_inside(q: u32, delta: &Rational) -> Result<u32> {
    if !delta.is_positive() {
        return Err(Error::domain("window radius must be positive"));
    }
    let mut t = Rational::one();
    let qr = Rational::from_int(q);
    for j in 0..=2_000_000u32 {
        if &t < delta {
            return Ok(j);
        }
        t = &t / &qr;
    }
    Err(Error::budget("window is too small to align a grid level"))
}

/// Construction-specific probe points inside the listed gaps: bump peaks
/// and support edges for the bump sum, ramp transition knots and plateau
/// midpoints for the staircase.
fn construction_extras(
    triple: &ConstructedTriple,
    gaps: &[GapInterval],
) -> Result<Vec<Rational>> {
    let mut extras = Vec::new();
    match triple.meta().construction {
        ConstructionKind::M3 => {
            let alpha = triple
                .meta()
                .params
                .get("alpha")
                .ok_or_else(|| Error::domain("bump-sum triple lacks alpha"))?;
            let sigma = alpha.recip()?;
            for gap in gaps {
                if gap.level > triple.meta().depth {
                    continue;
                }
                let p = BumpParams::for_gap(&sigma, gap);
                let (slo, shi) = p.support();
                let half = &p.half_width * &Rational::ratio(1, 2);
                extras.push(p.center.clone());
                extras.push(&p.center - &half);
                extras.push(&p.center + &half);
                extras.push(slo);
                extras.push(shi);
            }
        }
        ConstructionKind::M4 => {
            for gap in gaps {
                let tau = crate::constructions::m4_tau(gap.level);
                let len = gap.length();
                let t_in = &gap.left + &(&tau * &len);
                let t_out = &gap.right - &(&tau * &len);
                extras.push((&gap.left + &t_in) * Rational::ratio(1, 2));
                extras.push((&t_in + &t_out) * Rational::ratio(1, 2));
                extras.push((&t_out + &gap.right) * Rational::ratio(1, 2));
                extras.push(t_in);
                extras.push(t_out);
            }
        }
        ConstructionKind::M1 | ConstructionKind::Custom => {}
    }
    Ok(extras)
}

/// Builds the grid a delta rule prescribes around `x`.
pub(super) fn rule_grid(
    triple: &ConstructedTriple,
    x: &Rational,
    delta: &Rational,
    rule: &DeltaRule,
) -> Result<GridSpec> {
    let sys = triple.system().ok_or_else(|| {
        Error::domain("aligned grids require a construction with a cantor system")
    })?;
    let j0 = least_level_inside(sys.q(), delta)?;
    let span = rule.level_span();
    let levels = j0..=j0.saturating_add(span);
    let lo = x - delta;
    let hi = x + delta;
    let gaps: Vec<GapInterval> = sys
        .structures_in_window(&lo, &hi, *levels.end(), u32::MAX)
        .into_iter()
        .filter_map(|s| match s {
            WindowStructure::Gap(g) => Some(g),
            WindowStructure::Node(_) => None,
        })
        .collect();
    let extras = construction_extras(triple, &gaps)?;
    GridSpec::aligned(sys, x.clone(), delta.clone(), levels, &extras)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn explicit_grid_validation() {
        assert!(GridSpec::explicit(r("1/2"), r("1/4"), vec![r("5/8")]).is_ok());
        assert!(GridSpec::explicit(r("1/2"), r("1/4"), vec![r("1/2")]).is_err());
        assert!(GridSpec::explicit(r("1/2"), r("1/4"), vec![r("7/8")]).is_err());
    }

    #[test]
    fn least_level() {
        assert_eq!(least_level_inside(3, &r("1/2")).unwrap(), 1);
        assert_eq!(least_level_inside(3, &r("1/504")).unwrap(), 6);
        assert_eq!(least_level_inside(5, &r("2")).unwrap(), 0);
    }

    #[test]
    fn aligned_grid_points_are_inside_and_sorted() {
        let sys = CantorSystem::new(3).unwrap();
        let grid = GridSpec::aligned(&sys, r("1/3"), r("1/10"), 3..=5, &[]).unwrap();
        assert!(!grid.points().is_empty());
        let lo = r("1/3") - r("1/10");
        let hi = r("1/3") + r("1/10");
        for w in grid.points().windows(2) {
            assert!(w[0] < w[1]);
        }
        for p in grid.points() {
            assert!(p > &lo && p < &hi && p != &r("1/3"));
        }
    }
}
