//! Grid- and level-based verification engine.
//!
//! Checks are pure over immutable inputs and deterministic: identical inputs
//! produce byte-identical reports. Where an evaluator returns an enclosure,
//! verdicts follow the conservative rule — a pass never relies on an
//! enclosure's lower bound, a fail never on its upper bound, and anything in
//! between surfaces as a budget error rather than a verdict.

mod delta;
mod grid;
mod probe;

pub use delta::{m3_weight_threshold, DeltaRule};
pub use grid::{least_level_inside, GridSpec};
pub use probe::{divergence_probe, osc_sum, ProbeSource};

use crate::constructions::{ConstructedTriple, EvalExact, EvalValue};
use crate::error::{Error, Result};
use crate::exact::{Enclosure, Rational};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Rational>,
}

/// Structured verdict of one verification run.
///
/// A fail verdict always carries a witness, and re-evaluating the check at
/// that witness reproduces `worst` exactly; there is no hidden state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<Rational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub samples: u64,
    pub params: BTreeMap<String, serde_json::Value>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn param_str(v: impl ToString) -> serde_json::Value {
    serde_json::Value::String(v.to_string())
}

/// Tracks the maximum ratio with a first-wins tie-break over the (sorted)
/// evaluation order, which makes witnesses deterministic.
struct WorstTracker {
    best: Option<(Rational, Witness)>,
}

impl WorstTracker {
    fn new() -> Self {
        WorstTracker { best: None }
    }

    fn offer(&mut self, ratio: Rational, witness: Witness) {
        match &self.best {
            Some((r, _)) if *r >= ratio => {}
            _ => self.best = Some((ratio, witness)),
        }
    }

    fn into_parts(self) -> (Option<Rational>, Option<Witness>) {
        match self.best {
            None => (None, None),
            Some((r, w)) => (Some(r), Some(w)),
        }
    }
}

/// Per-point controlled-derivative ratio check.
///
/// Passes iff |F(y) - F(x) - f(x)(y - x)| <= eps |phi(x + alpha(y - x)) -
/// phi(x)| for every grid point y. The reported worst value is the largest
/// ratio of the left side to the control increment, so the verdict flips
/// exactly where that ratio crosses eps.
pub fn mc_point_check(
    triple: &ConstructedTriple,
    alpha: &Rational,
    eps: &Rational,
    grid: &GridSpec,
) -> Result<CheckReport> {
    mc_point_check_inner(triple, alpha, eps, grid, true)
}

fn mc_point_check_inner(
    triple: &ConstructedTriple,
    alpha: &Rational,
    eps: &Rational,
    grid: &GridSpec,
    enforce: bool,
) -> Result<CheckReport> {
    if !alpha.is_positive() {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    if !eps.is_positive() {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    let x = &grid.center;
    let fx_small = triple.integrand_at(x)?;
    let fx = triple.integral_at(x)?.enclosure();
    let phix = triple.control_at(x)?;

    let mut pass_worst = WorstTracker::new();
    let mut fail_worst = WorstTracker::new();
    let mut undecided: Vec<Rational> = Vec::new();
    for y in grid.points() {
        let fy = triple.integral_at(y)?.enclosure();
        let linear = Enclosure::point(&fx_small * &(y - x));
        let numerator = fy.sub(&fx).sub(&linear).abs();
        let shifted = x + &(alpha * &(y - x));
        let den = (triple.control_at(&shifted)? - &phix).abs();
        if den.is_zero() {
            return Err(Error::domain(format!(
                "control increment vanished between {x} and {shifted}"
            )));
        }
        let witness = Witness {
            x: x.clone(),
            y: Some(y.clone()),
        };
        if !enforce {
            pass_worst.offer(numerator.hi().checked_div(&den)?, witness);
            continue;
        }
        let rhs = eps * &den;
        if numerator.hi() <= &rhs {
            pass_worst.offer(numerator.hi().checked_div(&den)?, witness);
        } else if numerator.lo() > &rhs {
            fail_worst.offer(numerator.lo().checked_div(&den)?, witness);
        } else {
            undecided.push(y.clone());
        }
    }

    let mut params = BTreeMap::new();
    params.insert("alpha".into(), param_str(alpha));
    params.insert("eps".into(), param_str(eps));
    params.insert("x".into(), param_str(x));
    params.insert("radius".into(), param_str(&grid.radius));
    if !enforce {
        params.insert("mode".into(), param_str("report-only"));
    }

    if let (Some(worst), witness) = {
        let (w, wit) = fail_worst.into_parts();
        (w, wit)
    } {
        return Ok(CheckReport {
            verdict: Verdict::Fail,
            worst: Some(worst),
            witness,
            samples: grid.points().len() as u64,
            params,
        });
    }
    if !undecided.is_empty() {
        let list: Vec<String> = undecided.iter().take(8).map(|p| p.to_string()).collect();
        return Err(Error::budget(format!(
            "indeterminate at depth {}: enclosure too coarse to decide {} point(s) near x = {x}: {}; deepen the construction",
            triple.meta().depth,
            undecided.len(),
            list.join(", ")
        )));
    }
    let (worst, witness) = pass_worst.into_parts();
    Ok(CheckReport {
        verdict: Verdict::Pass,
        worst,
        witness,
        samples: grid.points().len() as u64,
        params,
    })
}

/// Sweep mode: enforce the inequality or only record ratios.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    Enforce,
    ReportOnly,
}

/// Runs [`mc_point_check`] at every point with the delta and grid prescribed
/// by the named rule, for every epsilon of the ladder, and aggregates the
/// worst ratio.
pub fn mc_sweep(
    triple: &ConstructedTriple,
    alpha: &Rational,
    eps_ladder: &[Rational],
    points: &[Rational],
    rule: &DeltaRule,
    mode: SweepMode,
) -> Result<CheckReport> {
    if eps_ladder.is_empty() || points.is_empty() {
        return Err(Error::domain("sweep needs at least one point and one eps"));
    }
    let mut sorted: Vec<Rational> = points.to_vec();
    sorted.sort_by(|a, b| a.cmp_exact(b));
    sorted.dedup();

    let mut worst = WorstTracker::new();
    let mut verdict = Verdict::Pass;
    let mut samples: u64 = 0;
    let mut undecided: Vec<(Rational, String)> = Vec::new();
    for x in &sorted {
        for eps in eps_ladder {
            let delta = rule.delta(triple, alpha, eps, x)?;
            let grid = grid::rule_grid(triple, x, &delta, rule)?;
            samples += grid.points().len() as u64;
            match mc_point_check_inner(
                triple,
                alpha,
                eps,
                &grid,
                mode == SweepMode::Enforce,
            ) {
                Ok(report) => {
                    if report.verdict == Verdict::Fail {
                        verdict = Verdict::Fail;
                    }
                    if let (Some(r), Some(w)) = (report.worst, report.witness) {
                        worst.offer(r, w);
                    }
                }
                Err(Error::Budget(msg)) => undecided.push((x.clone(), msg)),
                Err(e) => return Err(e),
            }
        }
    }
    if !undecided.is_empty() {
        let pts: Vec<String> = undecided.iter().map(|(p, _)| p.to_string()).collect();
        return Err(Error::budget(format!(
            "sweep undecided at {} point(s): {} (first cause: {})",
            undecided.len(),
            pts.join(", "),
            undecided[0].1
        )));
    }
    let mut params = BTreeMap::new();
    params.insert("alpha".into(), param_str(alpha));
    params.insert(
        "eps_ladder".into(),
        serde_json::Value::Array(eps_ladder.iter().map(param_str).collect()),
    );
    params.insert("delta_rule".into(), param_str(rule));
    params.insert("points".into(), param_str(sorted.len()));
    if mode == SweepMode::ReportOnly {
        params.insert("mode".into(), param_str("report-only"));
    }
    let (w, wit) = worst.into_parts();
    Ok(CheckReport {
        verdict,
        worst: w,
        witness: wit,
        samples,
        params,
    })
}

/// Monotonicity-premise check: at each point the best sampled ratio
/// (F(x+h) - F(x)) / (phi(x + alpha h) - phi(x)) must reach -tol, a finite
/// surrogate of the liminf premise. The report separately records whether F
/// is nondecreasing along the sorted point list under `params["monotone"]`.
pub fn sm_check(
    f_upper: &dyn EvalValue,
    phi: &dyn EvalExact,
    alpha: &Rational,
    points: &[Rational],
    h_grid: &[Rational],
    tol: &Rational,
) -> Result<CheckReport> {
    if points.is_empty() || h_grid.is_empty() {
        return Err(Error::domain("sm check needs points and step sizes"));
    }
    if h_grid.iter().any(|h| !h.is_positive()) {
        return Err(Error::domain("sm step sizes must be positive"));
    }
    if tol.is_negative() {
        return Err(Error::domain("sm tolerance must be >= 0"));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.cmp_exact(b));
    sorted.dedup();

    // premise: worst over x of (best over h)
    let mut worst: Option<(Rational, Witness)> = None;
    for x in &sorted {
        let fx = f_upper.eval(x)?.exact()?.clone();
        let phix = phi.eval_exact(x)?;
        let mut best: Option<(Rational, Witness)> = None;
        for h in h_grid {
            let xh = x + h;
            let fxh = f_upper.eval(&xh)?.exact()?.clone();
            let den = phi.eval_exact(&(x + &(alpha * h)))? - &phix;
            if !den.is_positive() {
                return Err(Error::domain(format!(
                    "control increment not positive at x = {x}, h = {h}"
                )));
            }
            let ratio = (&fxh - &fx).checked_div(&den)?;
            let wit = Witness {
                x: x.clone(),
                y: Some(xh),
            };
            if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
                best = Some((ratio, wit));
            }
        }
        let best = best.expect("h grid nonempty");
        if worst.as_ref().is_none_or(|(w, _)| best.0 < *w) {
            worst = Some(best);
        }
    }
    let (worst_ratio, witness) = worst.expect("points nonempty");

    // separate monotonicity report along the sorted grid
    let mut monotone = true;
    let mut prev: Option<Rational> = None;
    for x in &sorted {
        let v = f_upper.eval(x)?.exact()?.clone();
        if let Some(p) = &prev {
            if v < *p {
                monotone = false;
                break;
            }
        }
        prev = Some(v);
    }

    let premise_pass = worst_ratio >= -tol;
    let mut params = BTreeMap::new();
    params.insert("alpha".into(), param_str(alpha));
    params.insert("tol".into(), param_str(tol));
    params.insert(
        "monotone".into(),
        param_str(if monotone { "pass" } else { "fail" }),
    );
    Ok(CheckReport {
        verdict: if premise_pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        worst: Some(worst_ratio),
        witness: Some(witness),
        samples: (sorted.len() * h_grid.len()) as u64,
        params,
    })
}

/// Symmetric difference-quotient residual scan: reports max over h of
/// |F(x +- h) - F(x) -+ f(x) h| / h and passes iff the residual sequence is
/// nonincreasing as h decreases through the grid.
pub fn derivative_check(
    f_upper: &dyn EvalValue,
    f_lower: &dyn EvalExact,
    x: &Rational,
    h_grid: &[Rational],
) -> Result<CheckReport> {
    if h_grid.is_empty() || h_grid.iter().any(|h| !h.is_positive()) {
        return Err(Error::domain("derivative check needs positive step sizes"));
    }
    let mut hs = h_grid.to_vec();
    hs.sort_by(|a, b| b.cmp_exact(a)); // largest first
    hs.dedup();
    let fx = f_upper.eval(x)?.exact()?.clone();
    let fpx = f_lower.eval_exact(x)?;

    let mut residuals: Vec<(Rational, Rational)> = Vec::new(); // (h, residual)
    let mut worst = WorstTracker::new();
    for h in &hs {
        let up = (f_upper.eval(&(x + h))?.exact()? - &fx - &(&fpx * h)).abs();
        let down = (f_upper.eval(&(x - h))?.exact()? - &fx + &(&fpx * h)).abs();
        let side_up = up >= down;
        let residual = up.max(down).checked_div(h)?;
        let y = if side_up { x + h } else { x - h };
        worst.offer(
            residual.clone(),
            Witness {
                x: x.clone(),
                y: Some(y),
            },
        );
        residuals.push((h.clone(), residual));
    }
    let consistent = residuals.windows(2).all(|w| w[0].1 >= w[1].1);
    let (worst_val, witness) = worst.into_parts();
    let mut params = BTreeMap::new();
    params.insert("x".into(), param_str(x));
    params.insert(
        "residuals".into(),
        serde_json::Value::Array(
            residuals
                .iter()
                .map(|(h, r)| {
                    serde_json::Value::String(format!("h={h}:{r}"))
                })
                .collect(),
        ),
    );
    Ok(CheckReport {
        verdict: if consistent {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        worst: worst_val,
        witness,
        samples: (2 * hs.len()) as u64,
        params,
    })
}

/// Finite surrogate of Perron major/minor validity on a sorted grid: every
/// major-function slope must dominate the smaller endpoint value of f, every
/// minor-function slope must stay below the larger one, and U - V must be
/// nondecreasing. The worst value is the most violated (or tightest) margin.
pub fn perron_validity_check(
    u: &dyn EvalValue,
    v: &dyn EvalValue,
    f: &dyn EvalExact,
    grid: &[Rational],
) -> Result<CheckReport> {
    let mut pts = grid.to_vec();
    pts.sort_by(|a, b| a.cmp_exact(b));
    pts.dedup();
    if pts.len() < 2 {
        return Err(Error::domain("perron validity needs at least two grid points"));
    }
    let mut min_margin: Option<(Rational, Witness, &'static str)> = None;
    let mut offer = |margin: Rational, wit: Witness, side: &'static str| {
        if min_margin.as_ref().is_none_or(|(m, _, _)| margin < *m) {
            min_margin = Some((margin, wit, side));
        }
    };
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let den = b - a;
        let fa = f.eval_exact(a)?;
        let fb = f.eval_exact(b)?;
        let ua = u.eval(a)?.exact()?.clone();
        let ub = u.eval(b)?.exact()?.clone();
        let va = v.eval(a)?.exact()?.clone();
        let vb = v.eval(b)?.exact()?.clone();
        let wit = Witness {
            x: a.clone(),
            y: Some(b.clone()),
        };
        let slope_u = (&ub - &ua).checked_div(&den)?;
        offer(
            slope_u - fa.clone().min(fb.clone()),
            wit.clone(),
            "major-slope",
        );
        let slope_v = (&vb - &va).checked_div(&den)?;
        offer(fa.max(fb) - slope_v, wit.clone(), "minor-slope");
        offer((ub - vb) - (ua - va), wit, "difference-monotone");
    }
    let (margin, witness, side) = min_margin.expect("at least one pair");
    let mut params = BTreeMap::new();
    params.insert("grid_points".into(), param_str(pts.len()));
    params.insert("tightest".into(), param_str(side));
    Ok(CheckReport {
        verdict: if margin.is_negative() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        worst: Some(margin),
        witness: Some(witness),
        samples: (pts.len() - 1) as u64,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::CantorSystem;
    use crate::constructions::{m3_build, m4_build, ConstructedTriple, FnEval};
    use std::sync::Arc;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn identity_triple() -> ConstructedTriple {
        ConstructedTriple::custom(
            Arc::new(FnEval(|x: &Rational| x.clone())),
            Arc::new(FnEval(|_: &Rational| Rational::one())),
            Arc::new(FnEval(|x: &Rational| x.clone())),
            None,
        )
    }

    /// F = psi on the ternary system, f = 0, phi = identity: the classic
    /// failure of the identity control at a Cantor point.
    fn psi_without_control() -> ConstructedTriple {
        let sys = CantorSystem::new(3).unwrap();
        let psi_sys = sys.clone();
        ConstructedTriple::custom(
            Arc::new(FnEval(move |x: &Rational| {
                psi_sys.psi_extended(x).unwrap()
            })),
            Arc::new(FnEval(|_: &Rational| Rational::zero())),
            Arc::new(FnEval(|x: &Rational| x.clone())),
            Some(sys),
        )
    }

    #[test]
    fn trivial_linear_triple_passes_with_zero_ratio() {
        let triple = identity_triple();
        let grid = GridSpec::explicit(
            r("1/2"),
            r("1/4"),
            vec![r("3/8"), r("5/8"), r("9/16")],
        )
        .unwrap();
        let report = mc_point_check(&triple, &r("2"), &r("1/100"), &grid).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst, Some(r("0")));
        assert_eq!(report.samples, 3);
    }

    #[test]
    fn verdict_flips_exactly_at_eps_one_for_identity() {
        // F = phi = id, f = 0, alpha = 1: every ratio is exactly 1
        let triple = ConstructedTriple::custom(
            Arc::new(FnEval(|x: &Rational| x.clone())),
            Arc::new(FnEval(|_: &Rational| Rational::zero())),
            Arc::new(FnEval(|x: &Rational| x.clone())),
            None,
        );
        let grid =
            GridSpec::explicit(r("1/2"), r("1/4"), vec![r("3/8"), r("5/8")]).unwrap();
        let pass = mc_point_check(&triple, &r("1"), &r("1"), &grid).unwrap();
        assert!(pass.passed());
        assert_eq!(pass.worst, Some(r("1")));
        let fail = mc_point_check(&triple, &r("1"), &r("99/100"), &grid).unwrap();
        assert!(!fail.passed());
        assert_eq!(fail.worst, Some(r("1")));
    }

    #[test]
    fn psi_against_identity_control_fails_with_witness_ratio() {
        let triple = psi_without_control();
        let y = r("1/3") - Rational::pow(3, -5);
        let grid = GridSpec::explicit(
            r("1/3"),
            r("1/10"),
            vec![y.clone(), r("1/3") + Rational::pow(3, -5)],
        )
        .unwrap();
        let report = mc_point_check(&triple, &r("1"), &r("1"), &grid).unwrap();
        assert!(!report.passed());
        assert!(report.worst.clone().unwrap() >= r("243/32"));
        assert_eq!(report.witness.unwrap().y.unwrap(), y);
        // re-evaluating at the witness reproduces the worst value
        let again = mc_point_check(
            &triple,
            &r("1"),
            &r("1"),
            &GridSpec::explicit(r("1/3"), r("1/10"), vec![y]).unwrap(),
        )
        .unwrap();
        assert_eq!(again.worst, report.worst);
    }

    #[test]
    fn m3_sweep_passes_at_proof_delta() {
        let triple = m3_build(r("3"), 6).unwrap();
        let points = vec![r("0"), r("1/3"), r("2/3"), r("1"), r("1/9")];
        let report = mc_sweep(
            &triple,
            &r("4"),
            &[r("1/2")],
            &points,
            &DeltaRule::M3Proof,
            SweepMode::Enforce,
        )
        .unwrap();
        assert!(report.passed(), "worst {:?}", report.worst);
        assert!(report.samples > 0);
    }

    #[test]
    fn m4_sweep_smoke_at_proof_delta() {
        let triple = m4_build(4).unwrap();
        let points = vec![r("2/5"), r("1")];
        let start = std::time::Instant::now();
        let report = mc_sweep(
            &triple,
            &r("3"),
            &[r("1/8")],
            &points,
            &DeltaRule::M4Proof,
            SweepMode::Enforce,
        )
        .unwrap();
        assert!(report.passed(), "worst {:?}", report.worst);
        eprintln!(
            "m4 sweep smoke: {} samples in {:?}",
            report.samples,
            start.elapsed()
        );
    }

    #[test]
    fn report_only_mode_never_fails() {
        let triple = psi_without_control();
        let report = mc_sweep(
            &triple,
            &r("1"),
            &[r("1/1000")],
            &[r("1/3")],
            &DeltaRule::Fixed(r("1/10")),
            SweepMode::ReportOnly,
        )
        .unwrap();
        assert!(report.passed());
        assert!(report.worst.unwrap() > r("1/1000"));
        assert_eq!(
            report.params.get("mode").unwrap(),
            &serde_json::Value::String("report-only".into())
        );
    }

    #[test]
    fn sm_check_examples() {
        // x^3 on (0,1) against the identity control
        let cube = FnEval(|x: &Rational| x * x * x);
        let ident = FnEval(|x: &Rational| x.clone());
        let points: Vec<Rational> = (1..10).map(|i| Rational::ratio(i, 10)).collect();
        let hs = vec![r("1/8"), r("1/16")];
        let report = sm_check(&cube, &ident, &r("1"), &points, &hs, &r("0")).unwrap();
        assert!(report.passed());
        assert_eq!(
            report.params.get("monotone").unwrap(),
            &serde_json::Value::String("pass".into())
        );

        let neg = FnEval(|x: &Rational| -x);
        let report = sm_check(&neg, &ident, &r("1"), &points, &hs, &r("0")).unwrap();
        assert!(!report.passed());
        assert_eq!(report.worst, Some(r("-1")));
        assert_eq!(
            report.params.get("monotone").unwrap(),
            &serde_json::Value::String("fail".into())
        );
    }

    #[test]
    fn sm_check_on_bump_sum_at_gap_endpoints() {
        let triple = m3_build(r("3"), 5).unwrap();
        let sys = triple.system().unwrap().clone();
        let mut points = Vec::new();
        for k in 1..=3 {
            for g in sys.gap_level(k).unwrap().iter() {
                points.push(g.left.clone());
                points.push(g.right.clone());
            }
        }
        let hs = vec![Rational::pow(3, -6), Rational::pow(3, -8)];
        let f_arc = triple.integral_fn();
        let phi_arc = triple.control_fn();
        let report =
            sm_check(&*f_arc, &*phi_arc, &r("3"), &points, &hs, &r("0")).unwrap();
        // F vanishes on C and is nonnegative, so the premise holds
        assert!(report.passed());
        assert_eq!(
            report.params.get("monotone").unwrap(),
            &serde_json::Value::String("pass".into())
        );
    }

    #[test]
    fn derivative_check_examples() {
        // F = x^2, f = 2x: residual is exactly h
        let square = FnEval(|x: &Rational| x * x);
        let double = FnEval(|x: &Rational| x * &Rational::from_int(2));
        let report = derivative_check(
            &square,
            &double,
            &r("1/2"),
            &[r("1/8"), r("1/16")],
        )
        .unwrap();
        assert!(report.passed());
        assert_eq!(report.worst, Some(r("1/8")));

        // psi at a node endpoint: residuals (3/2)^k grow
        let sys = CantorSystem::new(3).unwrap();
        let psi_sys = sys.clone();
        let psi = FnEval(move |x: &Rational| psi_sys.psi_extended(x).unwrap());
        let zero = FnEval(|_: &Rational| Rational::zero());
        let hs: Vec<Rational> = (1..=5).map(|k| Rational::pow(3, -k)).collect();
        let report = derivative_check(&psi, &zero, &r("1/3"), &hs).unwrap();
        assert!(!report.passed());
        assert_eq!(report.worst, Some(r("243/32")));
    }

    #[test]
    fn derivative_check_flat_bump_plateau() {
        let triple = m3_build(r("3"), 4).unwrap();
        // around the bump peak 4/9 the function is locally constant, so
        // with h inside the plateau the residual is exactly 0
        let f_arc = triple.integral_fn();
        let zero = FnEval(|_: &Rational| Rational::zero());
        let hs = vec![Rational::pow(2, -12), Rational::pow(2, -13)];
        let report = derivative_check(&*f_arc, &zero, &r("4/9"), &hs).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst, Some(r("0")));
    }

    #[test]
    fn perron_validity_examples() {
        let ident = FnEval(|x: &Rational| x.clone());
        let grid: Vec<Rational> = (0..=10).map(|i| Rational::ratio(i, 10)).collect();

        // F = x^2/2, f = x, U = F + x/8, V = F - x/8
        let u = FnEval(|x: &Rational| x * x * &r("1/2") + x * &r("1/8"));
        let v = FnEval(|x: &Rational| x * x * &r("1/2") - x * &r("1/8"));
        let f = FnEval(|x: &Rational| x.clone());
        let report = perron_validity_check(&u, &v, &f, &grid).unwrap();
        assert!(report.passed());

        // U = V = F = x, f = 1: equality throughout
        let one = FnEval(|_: &Rational| Rational::one());
        let report = perron_validity_check(&ident, &ident, &one, &grid).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst, Some(r("0")));

        // U = -x is an invalid major function for f = 0
        let neg = FnEval(|x: &Rational| -x);
        let zero = FnEval(|_: &Rational| Rational::zero());
        let report = perron_validity_check(&neg, &ident, &zero, &grid).unwrap();
        assert!(!report.passed());
        assert_eq!(report.worst, Some(r("-1")));
    }

    #[test]
    fn indeterminate_enclosures_surface_as_budget_errors() {
        // staircase at depth 1: the tail bound is far too coarse for a tiny eps
        let triple = m4_build(1).unwrap();
        let grid = GridSpec::explicit(
            r("1/2"),
            r("1/10"),
            vec![r("1/2") + Rational::pow(5, -4)],
        )
        .unwrap();
        let err = mc_point_check(&triple, &r("3"), &Rational::pow(10, -9), &grid);
        assert!(matches!(err, Err(Error::Budget(_))));
    }
}
