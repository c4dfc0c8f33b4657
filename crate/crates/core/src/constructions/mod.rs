//! Explicitly constructed functions: step families, indefinite integrals,
//! gap-supported bump sums, staircase ramp sums, and control functions.
//!
//! Each construction produces exactly evaluable objects. Where a value is
//! genuinely an infinite series (the base-5 staircase on its Cantor set) the
//! evaluator returns a certified [`Enclosure`] instead of a rational.

mod control;
mod lc2;
mod m3;
mod m4;

pub use control::{null_control, perron_to_control, NullControl, PerronControl};
pub use lc2::{calkin_wilf, lc2_build, m1_build, Lc2Family, M1Aggregate};
pub use m3::{bump_c1, m3_build, q_weights, BumpParams, BumpRegistry};
pub use m4::{m4_build, m4_gap_profile, m4_sigma, m4_tau, ramp_c1, tail_bound, M4GapProfile};

use crate::cantor::CantorSystem;
use crate::error::{Error, Result};
use crate::exact::{Enclosure, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Result of evaluating a function that is exact off an exceptional set and
/// enclosure-valued on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(Rational),
    Enclosed(Enclosure),
}

impl Value {
    pub fn enclosure(&self) -> Enclosure {
        match self {
            Value::Exact(v) => Enclosure::point(v.clone()),
            Value::Enclosed(e) => e.clone(),
        }
    }

    pub fn exact(&self) -> Result<&Rational> {
        match self {
            Value::Exact(v) => Ok(v),
            Value::Enclosed(e) => Err(Error::budget(format!(
                "exact value required but only the enclosure {e} is available; deepen"
            ))),
        }
    }
}

/// A function evaluating exactly at every rational. Errors are resource
/// budget failures, never approximations.
pub trait EvalExact: Send + Sync {
    fn eval_exact(&self, x: &Rational) -> Result<Rational>;
}

/// A function evaluating to a rational or, on a declared exceptional set, to
/// a certified enclosure.
pub trait EvalValue: Send + Sync {
    fn eval(&self, x: &Rational) -> Result<Value>;
}

impl<T: EvalExact> EvalValue for T {
    fn eval(&self, x: &Rational) -> Result<Value> {
        Ok(Value::Exact(self.eval_exact(x)?))
    }
}

/// Adapter for ad-hoc exact functions.
pub struct FnEval<F>(pub F);

impl<F: Fn(&Rational) -> Rational + Send + Sync> EvalExact for FnEval<F> {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        Ok((self.0)(x))
    }
}

/// Finitely supported step function: constant on each listed closed
/// interval, zero elsewhere. Intervals have disjoint interiors and are kept
/// sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFn {
    steps: Vec<(Rational, Rational, Rational)>, // (lo, hi, value)
}

impl StepFn {
    pub fn new(mut steps: Vec<(Rational, Rational, Rational)>) -> Result<Self> {
        steps.retain(|(_, _, v)| !v.is_zero());
        steps.sort_by(|a, b| a.0.cmp_exact(&b.0));
        for (lo, hi, _) in &steps {
            if lo >= hi {
                return Err(Error::domain(format!("empty step interval [{lo}, {hi}]")));
            }
        }
        if steps.windows(2).any(|w| w[0].1 > w[1].0) {
            return Err(Error::domain("step intervals overlap"));
        }
        Ok(StepFn { steps })
    }

    pub fn steps(&self) -> &[(Rational, Rational, Rational)] {
        &self.steps
    }

    /// Value at x; at a shared boundary of two touching steps the left one
    /// wins (irrelevant to every integral).
    pub fn eval(&self, x: &Rational) -> Rational {
        for (lo, hi, v) in &self.steps {
            if lo <= x && x <= hi {
                return v.clone();
            }
        }
        Rational::zero()
    }

    /// Exact integral over the whole line.
    pub fn total_integral(&self) -> Rational {
        self.steps
            .iter()
            .fold(Rational::zero(), |acc, (lo, hi, v)| acc + (hi - lo) * v)
    }

    /// Exact integral over [a, b].
    pub fn integral_over(&self, a: &Rational, b: &Rational) -> Rational {
        assert!(a <= b);
        let mut acc = Rational::zero();
        for (lo, hi, v) in &self.steps {
            let l = lo.clone().max(a.clone());
            let r = hi.clone().min(b.clone());
            if l < r {
                acc = acc + (r - l) * v;
            }
        }
        acc
    }

    /// Pointwise sum, re-partitioned into disjoint steps.
    pub fn add(&self, other: &StepFn) -> StepFn {
        let mut edges: Vec<Rational> = Vec::new();
        for (lo, hi, _) in self.steps.iter().chain(other.steps.iter()) {
            edges.push(lo.clone());
            edges.push(hi.clone());
        }
        edges.sort_by(|a, b| a.cmp_exact(b));
        edges.dedup();
        let mut steps = Vec::new();
        for w in edges.windows(2) {
            let mid = (&w[0] + &w[1]) * Rational::ratio(1, 2);
            let v = self.eval(&mid) + other.eval(&mid);
            if !v.is_zero() {
                steps.push((w[0].clone(), w[1].clone(), v));
            }
        }
        StepFn { steps }
    }

    /// The exact indefinite integral with value 0 at `anchor`.
    pub fn indefinite_integral(&self, anchor: Rational) -> LinearSpline {
        let mut breakpoints: Vec<Rational> = vec![anchor.clone()];
        for (lo, hi, _) in &self.steps {
            breakpoints.push(lo.clone());
            breakpoints.push(hi.clone());
        }
        breakpoints.sort_by(|a, b| a.cmp_exact(b));
        breakpoints.dedup();
        let base = self.integral_over(
            breakpoints.first().unwrap(),
            &anchor.clone().max(breakpoints.first().unwrap().clone()),
        );
        let mut values = Vec::with_capacity(breakpoints.len());
        let mut acc = -base;
        values.push(acc.clone());
        for w in breakpoints.windows(2) {
            acc = acc + self.integral_over(&w[0], &w[1]);
            values.push(acc.clone());
        }
        LinearSpline::new(breakpoints, values).expect("sorted breakpoints")
    }
}

impl EvalExact for StepFn {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        Ok(self.eval(x))
    }
}

/// Continuous piecewise-linear function given by breakpoints and values,
/// extended by its end values outside the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSpline {
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
}

impl LinearSpline {
    pub fn new(breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.is_empty() {
            return Err(Error::domain("spline needs one value per breakpoint"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("spline breakpoints must be strictly increasing"));
        }
        Ok(LinearSpline {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        if x <= &self.breakpoints[0] {
            return self.values[0].clone();
        }
        let last = self.breakpoints.len() - 1;
        if x >= &self.breakpoints[last] {
            return self.values[last].clone();
        }
        let i = match self.breakpoints.binary_search_by(|b| b.cmp_exact(x)) {
            Ok(i) => return self.values[i].clone(),
            Err(i) => i - 1,
        };
        let t = (x - &self.breakpoints[i])
            / &(&self.breakpoints[i + 1] - &self.breakpoints[i]);
        &self.values[i] + &(&t * &(&self.values[i + 1] - &self.values[i]))
    }

    /// The derivative as a step function on the breakpoint span.
    pub fn derivative_step_fn(&self) -> StepFn {
        let mut steps = Vec::new();
        for i in 0..self.breakpoints.len() - 1 {
            let slope = (&self.values[i + 1] - &self.values[i])
                / &(&self.breakpoints[i + 1] - &self.breakpoints[i]);
            if !slope.is_zero() {
                steps.push((
                    self.breakpoints[i].clone(),
                    self.breakpoints[i + 1].clone(),
                    slope,
                ));
            }
        }
        StepFn { steps }
    }
}

impl EvalExact for LinearSpline {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        Ok(self.eval(x))
    }
}

/// Identifies which construction a triple came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstructionKind {
    M1,
    M3,
    M4,
    Custom,
}

/// Serializable description of a constructed triple. Functions are rebuilt
/// from this metadata on load, so behaviour is identical across runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleMeta {
    pub construction: ConstructionKind,
    pub params: BTreeMap<String, Rational>,
    pub depth: u32,
    /// Human-readable certified bound on what truncation omits.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default)]
    pub tail_note: Option<String>,
}

impl TripleMeta {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("meta serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::parse(format!("triple metadata: {e}")))
    }
}

/// A bundle (F, f, phi) realizing one construction: the function F, its
/// controlled derivative f, and the strictly increasing control candidate
/// phi, with exact or enclosure evaluation.
pub struct ConstructedTriple {
    meta: TripleMeta,
    integral: Arc<dyn EvalValue>,      // F
    integrand: Arc<dyn EvalExact>,     // f
    control: Arc<dyn EvalExact>,       // phi
    system: Option<Arc<CantorSystem>>,
}

impl ConstructedTriple {
    pub fn new(
        meta: TripleMeta,
        integral: Arc<dyn EvalValue>,
        integrand: Arc<dyn EvalExact>,
        control: Arc<dyn EvalExact>,
        system: Option<Arc<CantorSystem>>,
    ) -> Self {
        ConstructedTriple {
            meta,
            integral,
            integrand,
            control,
            system,
        }
    }

    pub fn custom(
        integral: Arc<dyn EvalValue>,
        integrand: Arc<dyn EvalExact>,
        control: Arc<dyn EvalExact>,
        system: Option<Arc<CantorSystem>>,
    ) -> Self {
        ConstructedTriple {
            meta: TripleMeta {
                construction: ConstructionKind::Custom,
                params: BTreeMap::new(),
                depth: 0,
                tail_note: None,
            },
            integral,
            integrand,
            control,
            system,
        }
    }

    pub fn meta(&self) -> &TripleMeta {
        &self.meta
    }

    pub fn system(&self) -> Option<&Arc<CantorSystem>> {
        self.system.as_ref()
    }

    /// F(x)
    pub fn integral_at(&self, x: &Rational) -> Result<Value> {
        self.integral.eval(x)
    }

    /// f(x)
    pub fn integrand_at(&self, x: &Rational) -> Result<Rational> {
        self.integrand.eval_exact(x)
    }

    /// phi(x)
    pub fn control_at(&self, x: &Rational) -> Result<Rational> {
        self.control.eval_exact(x)
    }

    pub fn control_fn(&self) -> Arc<dyn EvalExact> {
        self.control.clone()
    }

    pub fn integral_fn(&self) -> Arc<dyn EvalValue> {
        self.integral.clone()
    }

    /// Rebuilds the triple named by serialized metadata.
    pub fn rebuild(meta: &TripleMeta) -> Result<ConstructedTriple> {
        match meta.construction {
            ConstructionKind::M3 => {
                let alpha = meta
                    .params
                    .get("alpha")
                    .ok_or_else(|| Error::parse("m3 metadata missing alpha"))?;
                m3_build(alpha.clone(), meta.depth)
            }
            ConstructionKind::M4 => m4_build(meta.depth),
            ConstructionKind::M1 => {
                let lo = meta
                    .params
                    .get("lo")
                    .ok_or_else(|| Error::parse("m1 metadata missing lo"))?;
                let hi = meta
                    .params
                    .get("hi")
                    .ok_or_else(|| Error::parse("m1 metadata missing hi"))?;
                let agg = m1_build(meta.depth, lo.clone(), hi.clone())?;
                Ok(agg.into_triple())
            }
            ConstructionKind::Custom => {
                Err(Error::parse("custom triples cannot be rebuilt from metadata"))
            }
        }
    }
}
