//! Control functions assembled from measure sweeps and major/minor pairs.

use super::{EvalExact, EvalValue};
use crate::error::{Error, Result};
use crate::exact::Rational;
use std::sync::Arc;

/// phi(x) = x + sum_{k<=K} 2^k |(anchor, x) ∩ G_k| for a family of open
/// sets G_k of measure below 4^{-k}.
///
/// For x left of the anchor the sweep measure enters with a negative sign,
/// which keeps phi strictly increasing on the whole line.
pub struct NullControl {
    anchor: Rational,
    /// Per k (1-based): merged disjoint open intervals of G_k.
    families: Vec<Vec<(Rational, Rational)>>,
}

fn merge_intervals(mut iv: Vec<(Rational, Rational)>) -> Result<Vec<(Rational, Rational)>> {
    for (a, b) in &iv {
        if a >= b {
            return Err(Error::domain(format!("empty open interval ({a}, {b})")));
        }
    }
    iv.sort_by(|x, y| x.0.cmp_exact(&y.0));
    let mut merged: Vec<(Rational, Rational)> = Vec::new();
    for (a, b) in iv {
        match merged.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => merged.push((a, b)),
        }
    }
    Ok(merged)
}

fn measure(iv: &[(Rational, Rational)]) -> Rational {
    iv.iter()
        .fold(Rational::zero(), |acc, (a, b)| acc + (b - a))
}

/// Builds the control for the family `g_family[k-1] = G_k`, k = 1..=K.
///
/// Each G_k must have measure at most 4^{-k}.
pub fn null_control(
    anchor: Rational,
    g_family: Vec<Vec<(Rational, Rational)>>,
) -> Result<NullControl> {
    let mut families = Vec::with_capacity(g_family.len());
    for (i, g) in g_family.into_iter().enumerate() {
        let k = i as u32 + 1;
        let merged = merge_intervals(g)?;
        let total = measure(&merged);
        let bound = Rational::pow(4, -(k as i64));
        if total > bound {
            return Err(Error::domain(format!(
                "G_{k} has measure {total}, above 4^-{k} = {bound}"
            )));
        }
        families.push(merged);
    }
    Ok(NullControl { anchor, families })
}

impl NullControl {
    /// Number of stages K.
    pub fn stages(&self) -> usize {
        self.families.len()
    }
}

impl EvalExact for NullControl {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        let (lo, hi, sign) = if x >= &self.anchor {
            (self.anchor.clone(), x.clone(), Rational::one())
        } else {
            (x.clone(), self.anchor.clone(), -Rational::one())
        };
        let mut acc = x.clone();
        for (i, g) in self.families.iter().enumerate() {
            let mut overlap = Rational::zero();
            for (a, b) in g {
                let l = a.clone().max(lo.clone());
                let r = b.clone().min(hi.clone());
                if l < r {
                    overlap = overlap + (r - l);
                }
            }
            acc = acc + &sign * &(Rational::pow(2, i as i64 + 1) * overlap);
        }
        Ok(acc)
    }
}

/// phi(x) = x + sum_{k<=K} k (U_k(x) - V_k(x)) from major/minor pairs.
///
/// Strict growth holds whenever each U_k - V_k is nondecreasing; that
/// premise is checked on demand by the verification module, not here.
pub struct PerronControl {
    pairs: Vec<(Arc<dyn EvalValue>, Arc<dyn EvalValue>)>,
}

pub fn perron_to_control(
    pairs: Vec<(Arc<dyn EvalValue>, Arc<dyn EvalValue>)>,
    k_max: usize,
) -> Result<PerronControl> {
    if pairs.len() < k_max {
        return Err(Error::domain(format!(
            "requested {k_max} stages but only {} pairs given",
            pairs.len()
        )));
    }
    Ok(PerronControl {
        pairs: pairs.into_iter().take(k_max).collect(),
    })
}

impl EvalExact for PerronControl {
    fn eval_exact(&self, x: &Rational) -> Result<Rational> {
        let mut acc = x.clone();
        for (i, (u, v)) in self.pairs.iter().enumerate() {
            let k = Rational::from_int(i as i64 + 1);
            let du = u.eval(x)?.exact()?.clone();
            let dv = v.eval(x)?.exact()?.clone();
            acc = acc + k * (du - dv);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::FnEval;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn nested_family(k_max: u32) -> Vec<Vec<(Rational, Rational)>> {
        (1..=k_max)
            .map(|k| vec![(r("0"), Rational::pow(4, -(k as i64)) * r("9/10"))])
            .collect()
    }

    #[test]
    fn partial_sweep_example() {
        // G_k = (0, 4^{-k}), K = 2
        let family = vec![vec![(r("0"), r("1/4"))], vec![(r("0"), r("1/16"))]];
        let ctl = null_control(r("0"), family).unwrap();
        assert_eq!(ctl.eval_exact(&r("1/4")).unwrap(), r("1"));
        // closed form at K -> infinity: phi(1/4) = 5/4; the omitted tail
        // past K = 2 is exactly sum_{k>2} 2^{-k} = 1/4
        assert_eq!(
            ctl.eval_exact(&r("1/4")).unwrap() + r("1/4"),
            r("5/4")
        );
    }

    #[test]
    fn empty_family_is_identity() {
        let ctl = null_control(r("0"), Vec::new()).unwrap();
        for x in ["-3/2", "0", "2/7", "5"] {
            assert_eq!(ctl.eval_exact(&r(x)).unwrap(), r(x));
        }
    }

    #[test]
    fn measure_bound_is_enforced() {
        let bad = null_control(r("0"), vec![vec![(r("0"), r("1/3"))]]);
        assert!(matches!(bad, Err(Error::Domain(_))));
        assert!(null_control(r("0"), nested_family(3)).is_ok());
    }

    #[test]
    fn strictly_increasing_across_the_anchor() {
        let ctl = null_control(r("1/2"), nested_family(4)).unwrap();
        let grid: Vec<Rational> = (-8..=16).map(|i| Rational::ratio(i, 8)).collect();
        for w in grid.windows(2) {
            assert!(ctl.eval_exact(&w[0]).unwrap() < ctl.eval_exact(&w[1]).unwrap());
        }
    }

    #[test]
    fn overlapping_intervals_merge_before_measuring() {
        let g = vec![
            (r("0"), r("1/10")),
            (r("1/20"), r("3/20")),
            (r("1/2"), r("11/20")),
        ];
        let merged = merge_intervals(g).unwrap();
        assert_eq!(merged.len(), 2);
        assert_eq!(measure(&merged), r("1/5"));
    }

    #[test]
    fn perron_worked_example() {
        // U_k = x(1 + 1/k), V_k = x(1 - 1/k): phi(x) = x + sum k * 2x/k = 5x at K=2
        let pairs: Vec<(Arc<dyn EvalValue>, Arc<dyn EvalValue>)> = (1..=2i64)
            .map(|k| {
                let up = Rational::one() + Rational::pow(k, -1);
                let dn = Rational::one() - Rational::pow(k, -1);
                (
                    Arc::new(FnEval(move |x: &Rational| x * &up)) as Arc<dyn EvalValue>,
                    Arc::new(FnEval(move |x: &Rational| x * &dn)) as Arc<dyn EvalValue>,
                )
            })
            .collect();
        let phi = perron_to_control(pairs, 2).unwrap();
        assert_eq!(phi.eval_exact(&r("1/2")).unwrap(), r("5/2"));
        assert_eq!(phi.eval_exact(&r("-1/3")).unwrap(), r("-5/3"));
    }

    #[test]
    fn equal_pairs_give_identity() {
        let f = |x: &Rational| x * &r("7/3") + r("1/9");
        let pairs: Vec<(Arc<dyn EvalValue>, Arc<dyn EvalValue>)> = vec![(
            Arc::new(FnEval(f)) as Arc<dyn EvalValue>,
            Arc::new(FnEval(f)) as Arc<dyn EvalValue>,
        )];
        let phi = perron_to_control(pairs, 1).unwrap();
        assert_eq!(phi.eval_exact(&r("3/7")).unwrap(), r("3/7"));
    }
}
