//! Bump-sum construction over the ternary Cantor system.
//!
//! Every removed gap J = (a,b) of level k carries one C¹ bump of height
//! Q_J = 2^{-k-2l} (l the 4-power block of k), centered at u_J = a +
//! sigma(b-a) with half-width sigma_J (b-a) = sigma 3^{-2k}, where sigma =
//! 1/alpha. Supports are pairwise disjoint and strictly inside their gaps,
//! so the sum F evaluates exactly: a bump value inside a gap of level <=
//! depth, zero on the Cantor set and beyond the truncation depth. The
//! control candidate is phi = id + psi.

use super::{ConstructedTriple, ConstructionKind, EvalExact, TripleMeta, Value};
use crate::cantor::{CantorSystem, GapInterval, Located};
use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::poly::{PiecewiseC1Fn, PiecewisePoly, Polynomial};
use std::collections::BTreeMap;
use std::sync::Arc;

/// The cubic smoothstep 3t^2 - 2t^3 as an exact polynomial.
pub(crate) fn smoothstep() -> Polynomial {
    Polynomial::from_coeffs(vec![
        Rational::zero(),
        Rational::zero(),
        Rational::from_int(3),
        Rational::from_int(-2),
    ])
}

/// The fixed C¹ bump: 1 on [-1/2, 1/2], smoothstep flanks on
/// +-[1/2, 1], zero outside [-1, 1].
pub fn bump_c1() -> PiecewiseC1Fn {
    let s = smoothstep();
    let rising = s.compose_affine(&Rational::from_int(2), &Rational::from_int(2)); // s(2+2x) on [-1,-1/2]
    let falling = s.compose_affine(&Rational::from_int(-2), &Rational::from_int(2)); // s(2-2x) on [1/2,1]
    let inner = PiecewisePoly::new(
        vec![
            Rational::from_int(-1),
            Rational::ratio(-1, 2),
            Rational::ratio(1, 2),
            Rational::one(),
        ],
        vec![rising, Polynomial::constant(Rational::one()), falling],
    )
    .expect("bump breakpoints are sorted");
    PiecewiseC1Fn::new(inner).expect("bump is C1 by construction")
}

/// Weight 2^{-k-2l} for level k, where l is the unique block index with
/// 4^{l-1} <= k < 4^l.
pub fn q_weights(k: u32) -> Rational {
    assert!(k >= 1, "weights are defined for levels k >= 1");
    let mut l: u32 = 1;
    let mut bound: u64 = 4;
    while u64::from(k) >= bound {
        l += 1;
        bound *= 4;
    }
    Rational::pow(2, -(k as i64 + 2 * l as i64))
}

/// Bump geometry for one gap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BumpParams {
    pub q_weight: Rational,
    /// u_J, the bump center.
    pub center: Rational,
    /// sigma_J (b-a), half the support width.
    pub half_width: Rational,
}

impl BumpParams {
    pub fn for_gap(sigma: &Rational, gap: &GapInterval) -> BumpParams {
        let len = gap.length();
        let center = &gap.left + &(sigma * &len);
        let sigma_j = &Rational::pow(3, -(gap.level as i64)) * sigma;
        BumpParams {
            q_weight: q_weights(gap.level),
            center,
            half_width: &sigma_j * &len,
        }
    }

    pub fn support(&self) -> (Rational, Rational) {
        (
            &self.center - &self.half_width,
            &self.center + &self.half_width,
        )
    }
}

/// Association table gap -> bump parameters for all gaps of level <= depth.
pub struct BumpRegistry {
    pub alpha: Rational,
    pub sigma: Rational,
    pub depth: u32,
    entries: Vec<(GapInterval, BumpParams)>,
}

impl BumpRegistry {
    pub fn build(sys: &CantorSystem, alpha: &Rational, depth: u32) -> Result<BumpRegistry> {
        let sigma = alpha.recip()?;
        let mut entries = Vec::new();
        for k in 1..=depth {
            for gap in sys.gap_level(k)?.iter() {
                entries.push((gap.clone(), BumpParams::for_gap(&sigma, gap)));
            }
        }
        Ok(BumpRegistry {
            alpha: alpha.clone(),
            sigma,
            depth,
            entries,
        })
    }

    pub fn entries(&self) -> &[(GapInterval, BumpParams)] {
        &self.entries
    }
}

pub(crate) struct M3Fns {
    sys: Arc<CantorSystem>,
    sigma: Rational,
    depth: u32,
    bump: PiecewiseC1Fn,
    bump_deriv: PiecewisePoly,
}

impl M3Fns {
    fn gap_of(&self, x: &Rational) -> Result<Option<GapInterval>> {
        if !x.is_positive() || x >= &Rational::one() {
            return Ok(None);
        }
        match self.sys.locate(x, self.depth)? {
            Located::InGap(gap) => Ok(Some(gap)),
            _ => Ok(None),
        }
    }

    fn f_value(&self, x: &Rational) -> Result<Rational> {
        match self.gap_of(x)? {
            None => Ok(Rational::zero()),
            Some(gap) => {
                let p = BumpParams::for_gap(&self.sigma, &gap);
                let arg = (x - &p.center).checked_div(&p.half_width)?;
                Ok(&p.q_weight * &self.bump.eval(&arg))
            }
        }
    }

    fn f_deriv(&self, x: &Rational) -> Result<Rational> {
        match self.gap_of(x)? {
            None => Ok(Rational::zero()),
            Some(gap) => {
                let p = BumpParams::for_gap(&self.sigma, &gap);
                let arg = (x - &p.center).checked_div(&p.half_width)?;
                let slope = self.bump_deriv.eval(&arg).checked_div(&p.half_width)?;
                Ok(&p.q_weight * &slope)
            }
        }
    }
}

struct M3Integral(Arc<M3Fns>);
struct M3Integrand(Arc<M3Fns>);
struct M3Control(Arc<CantorSystem>);

impl super::EvalValue for M3Integral {
    fn eval(&self, x: &Rational) -> Result<Value> {
        Ok(Value::Exact(self.0.f_value(x)?))
    }
}

impl EvalExact for M3Integrand {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        self.0.f_deriv(x)
    }
}

impl EvalExact for M3Control {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        Ok(x + &self.0.psi_extended(x)?)
    }
}

/// Builds the bump-sum triple for `alpha >= 2`, truncated at gap level
/// `depth`.
///
/// The truncated F is exact everywhere: it equals the bump value inside
/// gaps of level <= depth and zero elsewhere. Omitted bumps at levels
/// > depth are uniformly below `q_weights(depth + 1)`, recorded in the
/// metadata.
pub fn m3_build(alpha: Rational, depth: u32) -> Result<ConstructedTriple> {
    if alpha < Rational::from_int(2) {
        return Err(Error::domain(format!(
            "bump-sum construction requires alpha >= 2, got {alpha}"
        )));
    }
    if depth == 0 {
        return Err(Error::domain("bump-sum construction needs depth >= 1"));
    }
    let sys = CantorSystem::new(3)?;
    let bump = bump_c1();
    let bump_deriv = bump.derivative();
    let fns = Arc::new(M3Fns {
        sys: sys.clone(),
        sigma: alpha.recip()?,
        depth,
        bump,
        bump_deriv,
    });
    let mut params = BTreeMap::new();
    params.insert("alpha".to_string(), alpha);
    let meta = TripleMeta {
        construction: ConstructionKind::M3,
        params,
        depth,
        tail_note: Some(format!(
            "bumps at levels > {depth} omitted; each is bounded by {}",
            q_weights(depth + 1)
        )),
    };
    Ok(ConstructedTriple::new(
        meta,
        Arc::new(M3Integral(fns.clone())),
        Arc::new(M3Integrand(fns)),
        Arc::new(M3Control(sys.clone())),
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
    fn bump_matches_its_definition() {
        let xi = bump_c1();
        assert_eq!(xi.eval(&r("0")), r("1"));
        assert_eq!(xi.eval(&r("1/2")), r("1"));
        assert_eq!(xi.eval(&r("-1/2")), r("1"));
        assert_eq!(xi.eval(&r("3/4")), r("1/2"));
        assert_eq!(xi.eval(&r("-3/4")), r("1/2"));
        assert_eq!(xi.eval(&r("1")), r("0"));
        assert_eq!(xi.eval(&r("5")), r("0"));
        // one-sided derivative 0 at the support boundary and peak plateau
        let d = xi.derivative();
        assert_eq!(d.eval(&r("1")), r("0"));
        assert_eq!(d.eval(&r("1/4")), r("0"));
    }

    #[test]
    fn weight_blocks() {
        assert_eq!(q_weights(1), Rational::pow(2, -3));
        assert_eq!(q_weights(3), Rational::pow(2, -5));
        assert_eq!(q_weights(4), Rational::pow(2, -8));
        assert_eq!(q_weights(15), Rational::pow(2, -19));
        assert_eq!(q_weights(16), Rational::pow(2, -22));
        assert_eq!(q_weights(63), Rational::pow(2, -69));
        assert_eq!(q_weights(64), Rational::pow(2, -72));
    }

    #[test]
    fn level_one_bump_geometry_and_values() {
        let triple = m3_build(r("3"), 8).unwrap();
        // gap (1/3, 2/3): u_J = 4/9, sigma_J = 1/9, support [11/27, 13/27]
        let sys = triple.system().unwrap();
        let gap = &sys.gap_level(1).unwrap()[0];
        let p = BumpParams::for_gap(&r("1/3"), gap);
        assert_eq!(p.center, r("4/9"));
        assert_eq!(p.half_width, r("1/27"));
        assert_eq!(p.support(), (r("11/27"), r("13/27")));
        assert_eq!(triple.integral_at(&r("4/9")).unwrap(), Value::Exact(r("1/8")));
        // f vanishes at the bump peak (plateau) and on C
        assert_eq!(triple.integrand_at(&r("4/9")).unwrap(), r("0"));
        assert_eq!(triple.integrand_at(&r("1/4")).unwrap(), r("0"));
        // F = 0 at node endpoints and deeper than the truncation
        assert_eq!(triple.integral_at(&r("1/3")).unwrap(), Value::Exact(r("0")));
        assert_eq!(triple.integral_at(&r("0")).unwrap(), Value::Exact(r("0")));
    }

    #[test]
    fn supports_are_disjoint_and_inside_gaps() {
        let sys = CantorSystem::new(3).unwrap();
        let reg = BumpRegistry::build(&sys, &r("3"), 6).unwrap();
        let mut supports: Vec<(Rational, Rational)> = reg
            .entries()
            .iter()
            .map(|(gap, p)| {
                let (lo, hi) = p.support();
                assert!(gap.left < lo && hi < gap.right, "support leaves gap");
                (lo, hi)
            })
            .collect();
        supports.sort_by(|a, b| a.0.cmp_exact(&b.0));
        for w in supports.windows(2) {
            assert!(w[0].1 < w[1].0);
        }
    }

    #[test]
    fn rejects_small_alpha() {
        assert!(matches!(m3_build(r("3/2"), 4), Err(Error::Domain(_))));
    }

    #[test]
    fn control_is_strictly_increasing_on_a_grid() {
        let triple = m3_build(r("3"), 5).unwrap();
        let mut prev: Option<Rational> = None;
        for i in 0..=60 {
            let x = Rational::ratio(i - 10, 40); // crosses both ends of [0,1]
            let v = triple.control_at(&x).unwrap();
            if let Some(p) = prev {
                assert!(p < v);
            }
            prev = Some(v);
        }
    }
}
