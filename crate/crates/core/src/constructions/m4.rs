//! Staircase construction over the base-5 Cantor system.
//!
//! Level k contributes sigma_k 3^{-k} times one C¹ ramp per level-(k-1)
//! node, with sigma_k = 1/(k+1) and tau_k = (k+1)/(2(k+2)). Each ramp rises
//! inside the node's first gap, holds 1 across the middle child, and falls
//! inside the second gap, so on every closed child each ramp is constant
//! (0, 1, 0). Off the Cantor set the defining sum is finite and F evaluates
//! exactly; on the Cantor set the harmonic weights make the series
//! irrational in general, so the evaluator returns the partial sum through
//! the build depth K with the certified tail 3^{-K}/(2(K+2)).

use super::{ConstructedTriple, ConstructionKind, EvalExact, EvalValue, TripleMeta, Value};
use crate::cantor::{CantorSystem, GapInterval, StepOutcome};
use crate::error::{Error, Result};
use crate::exact::{Enclosure, Rational};
use crate::poly::{PiecewiseC1Fn, PiecewisePoly, Polynomial};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

/// sigma_k = 1/(k+1)
pub fn m4_sigma(k: u32) -> Rational {
    Rational::from_int(k + 1).recip().unwrap()
}

/// tau_k = (k+1)/(2(k+2))
pub fn m4_tau(k: u32) -> Rational {
    Rational::new(k + 1, 2 * (k + 2)).unwrap()
}

/// The C¹ ramp for an interval I = [a, b] and 0 < tau < 1/2: zero up to
/// a + (1+tau)(b-a)/5, one on [a + (2-tau)(b-a)/5, b - (2-tau)(b-a)/5],
/// zero from b - (1+tau)(b-a)/5 on, with smoothstep transitions; increasing
/// then decreasing.
pub fn ramp_c1(a: &Rational, b: &Rational, tau: &Rational) -> Result<PiecewiseC1Fn> {
    if !tau.is_positive() || tau >= &Rational::ratio(1, 2) {
        return Err(Error::domain(format!("ramp tau {tau} outside (0, 1/2)")));
    }
    if a >= b {
        return Err(Error::domain(format!("ramp interval [{a}, {b}] is empty")));
    }
    let w = (b - a) * Rational::ratio(1, 5);
    let t1 = a + &(&(Rational::one() + tau) * &w);
    let t2 = a + &(&(Rational::from_int(2) - tau) * &w);
    let t3 = b - &(&(Rational::from_int(2) - tau) * &w);
    let t4 = b - &(&(Rational::one() + tau) * &w);
    let s = super::m3::smoothstep();
    // s((x - t1)/(t2 - t1)) rising, s((t4 - x)/(t4 - t3)) falling
    let rise_w = (&t2 - &t1).recip()?;
    let fall_w = (&t4 - &t3).recip()?;
    let rising = s.compose_affine(&rise_w, &(-&t1 * &rise_w));
    let falling = s.compose_affine(&(-&fall_w), &(&t4 * &fall_w));
    let inner = PiecewisePoly::new(
        vec![t1, t2, t3, t4],
        vec![
            rising,
            Polynomial::constant(Rational::one()),
            falling,
        ],
    )?;
    PiecewiseC1Fn::new(inner)
}

/// How one digit level contributes to the staircase at a point.
enum LevelEnd {
    /// Walk landed in a gap: the parent's ramp value/derivative decides, and
    /// all deeper levels vanish.
    Gap {
        level: u32,
        parent_left: Rational,
        parent_right: Rational,
        gap_left: Rational,
        gap_right: Rational,
    },
    /// Digits cycled from `cycle_start` with the given period pattern of
    /// middle-child flags.
    Cycle { cycle_start: usize },
}

struct M4Walk {
    /// Per completed level: was the digit the middle child?
    middles: Vec<bool>,
    end: LevelEnd,
}

pub(crate) struct M4Fns {
    sys: Arc<CantorSystem>,
    depth: u32,
}

/// Ramp thresholds for the interval [a, b]: the rise spans [t1, t2], the
/// plateau [t2, t3], the fall [t3, t4].
fn ramp_knots(a: &Rational, b: &Rational, tau: &Rational) -> [Rational; 4] {
    let w = (b - a) * Rational::ratio(1, 5);
    [
        a + &(&(Rational::one() + tau) * &w),
        a + &(&(Rational::from_int(2) - tau) * &w),
        b - &(&(Rational::from_int(2) - tau) * &w),
        b - &(&(Rational::one() + tau) * &w),
    ]
}

fn smoothstep_value(t: &Rational) -> Rational {
    // 3t^2 - 2t^3
    let t2 = t * t;
    &(&Rational::from_int(3) * &t2) - &(&Rational::from_int(2) * &(&t2 * t))
}

fn smoothstep_slope(t: &Rational) -> Rational {
    // 6t(1 - t)
    &(&Rational::from_int(6) * t) * &(Rational::one() - t)
}

/// Ramp value without constructing the composed polynomial: the reduced
/// transition argument has a small denominator even when the interval sits
/// at depth several hundred, which keeps deep evaluations cheap.
fn ramp_value_at(a: &Rational, b: &Rational, tau: &Rational, x: &Rational) -> Rational {
    let [t1, t2, t3, t4] = ramp_knots(a, b, tau);
    if x <= &t1 || x >= &t4 {
        Rational::zero()
    } else if x < &t2 {
        smoothstep_value(&((x - &t1) / (&t2 - &t1)))
    } else if x <= &t3 {
        Rational::one()
    } else {
        smoothstep_value(&((&t4 - x) / (&t4 - &t3)))
    }
}

fn ramp_slope_at(a: &Rational, b: &Rational, tau: &Rational, x: &Rational) -> Rational {
    let [t1, t2, t3, t4] = ramp_knots(a, b, tau);
    if x <= &t1 || x >= &t4 || (x >= &t2 && x <= &t3) {
        Rational::zero()
    } else if x < &t2 {
        let w = &t2 - &t1;
        smoothstep_slope(&((x - &t1) / &w)) / w
    } else {
        let w = &t4 - &t3;
        -(smoothstep_slope(&((&t4 - x) / &w)) / w)
    }
}

impl M4Fns {
    /// sigma_k 3^{-k}, the weight of level k.
    fn weight(k: u32) -> Rational {
        m4_sigma(k) * Rational::pow(3, -(k as i64))
    }

    fn walk(&self, x: &Rational) -> Result<M4Walk> {
        let mut walk = self.sys.walk(x)?;
        let q = self.sys.q();
        // left endpoint of the current node as an integer over q^level
        let mut left_num = num::BigInt::from(0);
        let mut middles: Vec<bool> = Vec::new();
        let mut seen: HashMap<num::BigInt, usize> = HashMap::new();
        let budget = 1_000_000usize;
        loop {
            if let Some(&idx) = seen.get(walk.remainder_numerator()) {
                return Ok(M4Walk {
                    middles,
                    end: LevelEnd::Cycle { cycle_start: idx },
                });
            }
            if middles.len() >= budget {
                return Err(Error::budget(format!(
                    "staircase walk at {x} exceeded {budget} digits"
                )));
            }
            seen.insert(walk.remainder_numerator().clone(), middles.len());
            match walk.step() {
                StepOutcome::Node { child } => {
                    left_num = left_num * q + 2 * child;
                    middles.push(child == 1);
                }
                StepOutcome::Gap { gap_index } => {
                    let level = middles.len() as u32 + 1;
                    let parent_den = num::BigInt::from(q).pow(level - 1);
                    let den = &parent_den * q;
                    let gl = &left_num * q + (2 * gap_index + 1);
                    let parent_left = Rational::new(left_num.clone(), parent_den.clone())?;
                    let parent_right = Rational::new(left_num + 1, parent_den)?;
                    let gap_left = Rational::new(gl.clone(), den.clone())?;
                    let gap_right = Rational::new(gl + 1, den)?;
                    return Ok(M4Walk {
                        middles,
                        end: LevelEnd::Gap {
                            level,
                            parent_left,
                            parent_right,
                            gap_left,
                            gap_right,
                        },
                    });
                }
            }
        }
    }

    /// Partial sum of level contributions through `limit` levels, extending
    /// recorded digits cyclically when the walk cycled earlier.
    fn partial_sum(walk: &M4Walk, limit: u32) -> Rational {
        let mut acc = Rational::zero();
        for k in 1..=limit {
            let idx = k as usize - 1;
            let middle = if idx < walk.middles.len() {
                walk.middles[idx]
            } else if let LevelEnd::Cycle { cycle_start } = walk.end {
                let period = walk.middles.len() - cycle_start;
                walk.middles[cycle_start + (idx - cycle_start) % period]
            } else {
                false
            };
            if middle {
                acc = acc + Self::weight(k);
            }
        }
        acc
    }

    fn f_value(&self, x: &Rational) -> Result<Value> {
        if !x.is_positive() || x >= &Rational::one() {
            return Ok(Value::Exact(Rational::zero()));
        }
        let walk = self.walk(x)?;
        match &walk.end {
            LevelEnd::Gap {
                level,
                parent_left,
                parent_right,
                ..
            } => {
                let base = Self::partial_sum(&walk, level - 1);
                let g = ramp_value_at(parent_left, parent_right, &m4_tau(*level), x);
                Ok(Value::Exact(base + Self::weight(*level) * g))
            }
            LevelEnd::Cycle { cycle_start } => {
                let period_has_middle = walk.middles[*cycle_start..].iter().any(|&b| b);
                if !period_has_middle {
                    // every level beyond the recorded digits contributes zero
                    let total = Self::partial_sum(&walk, walk.middles.len() as u32);
                    return Ok(Value::Exact(total));
                }
                let partial = Self::partial_sum(&walk, self.depth);
                let tail = tail_bound(self.depth);
                Ok(Value::Enclosed(Enclosure::new(
                    partial.clone(),
                    partial + tail,
                )?))
            }
        }
    }

    fn f_deriv(&self, x: &Rational) -> Result<Rational> {
        if !x.is_positive() || x >= &Rational::one() {
            return Ok(Rational::zero());
        }
        let walk = self.walk(x)?;
        match &walk.end {
            LevelEnd::Gap {
                level,
                parent_left,
                parent_right,
                ..
            } => {
                let slope = ramp_slope_at(parent_left, parent_right, &m4_tau(*level), x);
                Ok(Self::weight(*level) * slope)
            }
            LevelEnd::Cycle { .. } => Ok(Rational::zero()),
        }
    }
}

/// Tail bound T(K) = 3^{-K}/(2(K+2)) on the levels omitted beyond K, from
/// sum_{k>K} 3^{-k}/(k+1) <= (K+2)^{-1} sum_{k>K} 3^{-k}.
pub fn tail_bound(depth: u32) -> Rational {
    Rational::pow(3, -(depth as i64))
        * Rational::new(1u32, 2 * (depth + 2)).unwrap()
}

/// Constant-plus-ramp profile of the staircase on one gap: on the gap,
/// F = base + scale * ramp where only the gap's own level varies.
pub struct M4GapProfile {
    pub gap: GapInterval,
    pub base: Rational,
    pub scale: Rational,
    pub ramp: PiecewiseC1Fn,
    /// True when the ramp rises across this gap (first gap of its parent).
    pub rising: bool,
}

impl M4GapProfile {
    /// F at the gap endpoints, from the profile.
    pub fn endpoint_values(&self) -> (Rational, Rational) {
        let left = &self.base + &(&self.scale * &self.ramp.eval(&self.gap.left));
        let right = &self.base + &(&self.scale * &self.ramp.eval(&self.gap.right));
        (left, right)
    }
}

/// Computes the gap profile of the depth-independent staircase on `gap`.
pub fn m4_gap_profile(triple: &ConstructedTriple, gap: &GapInterval) -> Result<M4GapProfile> {
    let sys = triple
        .system()
        .ok_or_else(|| Error::domain("triple has no cantor system"))?;
    if sys.q() != 5 {
        return Err(Error::domain("staircase profiles require the base-5 system"));
    }
    let fns = M4Fns {
        sys: sys.clone(),
        depth: 1,
    };
    let walk = fns.walk(&gap.midpoint())?;
    match &walk.end {
        LevelEnd::Gap {
            level,
            parent_left,
            parent_right,
            gap_left,
            gap_right,
        } => {
            if *level != gap.level || gap_left != &gap.left || gap_right != &gap.right {
                return Err(Error::domain(format!(
                    "interval ({}, {}) is not a level-{} gap",
                    gap.left, gap.right, gap.level
                )));
            }
            let base = M4Fns::partial_sum(&walk, level - 1);
            let ramp = ramp_c1(parent_left, parent_right, &m4_tau(*level))?;
            let rising =
                gap.left == parent_left + &((parent_right - parent_left) * Rational::ratio(1, 5));
            Ok(M4GapProfile {
                gap: gap.clone(),
                base,
                scale: M4Fns::weight(*level),
                ramp,
                rising,
            })
        }
        LevelEnd::Cycle { .. } => Err(Error::domain(format!(
            "midpoint of ({}, {}) is not in a gap",
            gap.left, gap.right
        ))),
    }
}

struct M4Integral(Arc<M4Fns>);
struct M4Integrand(Arc<M4Fns>);
struct M4Control(Arc<CantorSystem>);

impl EvalValue for M4Integral {
    fn eval(&self, x: &Rational) -> Result<Value> {
        self.0.f_value(x)
    }
}

impl EvalExact for M4Integrand {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        self.0.f_deriv(x)
    }
}

impl EvalExact for M4Control {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        Ok(x + &self.0.psi_extended(x)?)
    }
}

/// Builds the staircase triple. `depth` controls only the truncation level
/// of enclosures on the Cantor set; off it, evaluation is exact at every
/// level.
pub fn m4_build(depth: u32) -> Result<ConstructedTriple> {
    if depth == 0 {
        return Err(Error::domain("staircase construction needs depth >= 1"));
    }
    let sys = CantorSystem::new(5)?;
    let fns = Arc::new(M4Fns {
        sys: sys.clone(),
        depth,
    });
    let meta = TripleMeta {
        construction: ConstructionKind::M4,
        params: BTreeMap::new(),
        depth,
        tail_note: Some(format!(
            "on the Cantor set, levels > {depth} contribute at most {}",
            tail_bound(depth)
        )),
    };
    Ok(ConstructedTriple::new(
        meta,
        Arc::new(M4Integral(fns.clone())),
        Arc::new(M4Integrand(fns)),
        Arc::new(M4Control(sys.clone())),
        Some(sys),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn ramp_thresholds_and_plateau() {
        let g = ramp_c1(&r("0"), &r("1"), &r("1/3")).unwrap();
        // thresholds 4/15, 1/3, 2/3, 11/15
        assert_eq!(
            g.as_piecewise().breakpoints(),
            &[r("4/15"), r("1/3"), r("2/3"), r("11/15")]
        );
        assert_eq!(g.eval(&r("1/2")), r("1"));
        assert_eq!(g.eval(&r("0")), r("0"));
        assert_eq!(g.eval(&r("4/15")), r("0"));
        assert_eq!(g.derivative().eval(&r("4/15")), r("0"));
        assert_eq!(g.eval(&r("1")), r("0"));
        // halfway up the rising transition
        let mid_rise = (&r("4/15") + &r("1/3")) * Rational::ratio(1, 2);
        assert_eq!(g.eval(&mid_rise), r("1/2"));
    }

    #[test]
    fn ramp_rejects_bad_tau() {
        assert!(ramp_c1(&r("0"), &r("1"), &r("1/2")).is_err());
        assert!(ramp_c1(&r("0"), &r("1"), &r("0")).is_err());
    }

    #[test]
    fn staircase_exact_values() {
        let triple = m4_build(6).unwrap();
        // gap endpoint: only the level-1 term survives
        assert_eq!(triple.integral_at(&r("2/5")).unwrap(), Value::Exact(r("1/6")));
        // right endpoint of every containing interval: all ramps vanish
        assert_eq!(triple.integral_at(&r("1/5")).unwrap(), Value::Exact(r("0")));
        assert_eq!(triple.integral_at(&r("0")).unwrap(), Value::Exact(r("0")));
        assert_eq!(triple.integral_at(&r("1")).unwrap(), Value::Exact(r("0")));
        // 31/50 sits on the left plateau of the falling gap (3/5, 4/5)
        assert_eq!(
            triple.integral_at(&r("31/50")).unwrap(),
            Value::Exact(r("1/6"))
        );
        // 7/10 is halfway down the falling transition of that gap
        assert_eq!(
            triple.integral_at(&r("7/10")).unwrap(),
            Value::Exact(r("1/12"))
        );
    }

    #[test]
    fn staircase_enclosure_on_cantor_points() {
        let triple = m4_build(3).unwrap();
        // 1/2 has base-5 digit 2 repeating: middle child forever
        match triple.integral_at(&r("1/2")).unwrap() {
            Value::Enclosed(e) => {
                assert_eq!(e.lo(), &r("23/108"));
                assert_eq!(e.hi(), &(r("23/108") + r("1/270")));
            }
            other => panic!("expected enclosure, got {other:?}"),
        }
    }

    #[test]
    fn integrand_vanishes_on_cantor_and_plateaus() {
        let triple = m4_build(4).unwrap();
        assert_eq!(triple.integrand_at(&r("1/2")).unwrap(), r("0"));
        assert_eq!(triple.integrand_at(&r("2/5")).unwrap(), r("0"));
        // gap plateau point
        assert_eq!(triple.integrand_at(&r("31/50")).unwrap(), r("0"));
        // falling transition point
        assert!(triple.integrand_at(&r("7/10")).unwrap().is_negative());
        // inside the rising transition the derivative is nonzero
        let sys = triple.system().unwrap();
        let gap = &sys.gap_level(1).unwrap()[0];
        let profile = m4_gap_profile(&triple, gap).unwrap();
        assert!(profile.rising);
        let bp = profile.ramp.as_piecewise().breakpoints();
        let mid_rise = (&bp[0] + &bp[1]) * Rational::ratio(1, 2);
        assert!(triple.integrand_at(&mid_rise).unwrap().is_positive());
    }

    #[test]
    fn gap_profiles_reproduce_endpoint_increments() {
        let triple = m4_build(6).unwrap();
        let sys = triple.system().unwrap().clone();
        for k in 1..=3 {
            for gap in sys.gap_level(k).unwrap().iter() {
                let profile = m4_gap_profile(&triple, gap).unwrap();
                let (fa, fb) = profile.endpoint_values();
                let inc = (&fb - &fa).abs();
                assert_eq!(inc, M4Fns::weight(k), "level {k} gap at {}", gap.left);
                // profile agrees with the evaluator at the endpoints
                assert_eq!(triple.integral_at(&gap.left).unwrap(), Value::Exact(fa));
                assert_eq!(triple.integral_at(&gap.right).unwrap(), Value::Exact(fb));
            }
        }
    }

    #[test]
    fn tail_bound_formula() {
        assert_eq!(tail_bound(3), r("1/270"));
        assert_eq!(tail_bound(6), Rational::pow(3, -6) * Rational::new(1u32, 16).unwrap());
    }
}
