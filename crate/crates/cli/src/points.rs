//! Point-set mini-language for reproducible sweeps:
//! `nodes:q:k<=N` (all node endpoints through level N),
//! `gaps:q:k<=N` (all gaps through level N), and
//! `list:p1,p2,...` (explicit rationals).

use mcint_core::cantor::{CantorSystem, GapInterval};
use mcint_core::error::{Error, Result};
use mcint_core::exact::Rational;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub enum PointSet {
    Nodes { q: u32, max_level: u32 },
    Gaps { q: u32, max_level: u32 },
    List(Vec<Rational>),
}

impl PointSet {
    pub fn parse(spec: &str) -> Result<PointSet> {
        if let Some(rest) = spec.strip_prefix("list:") {
            let points = rest
                .split(',')
                .map(|s| s.trim().parse())
                .collect::<Result<Vec<Rational>>>()?;
            if points.is_empty() {
                return Err(Error::parse("empty point list"));
            }
            return Ok(PointSet::List(points));
        }
        let parse_leveled = |rest: &str| -> Result<(u32, u32)> {
            let (q_str, level_str) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(format!("expected q:k<=N in '{spec}'")))?;
            let q: u32 = q_str
                .parse()
                .map_err(|_| Error::parse(format!("bad base '{q_str}'")))?;
            let n = level_str
                .strip_prefix("k<=")
                .ok_or_else(|| Error::parse(format!("expected k<=N in '{spec}'")))?;
            let max_level: u32 = n
                .parse()
                .map_err(|_| Error::parse(format!("bad level bound '{n}'")))?;
            Ok((q, max_level))
        };
        if let Some(rest) = spec.strip_prefix("nodes:") {
            let (q, max_level) = parse_leveled(rest)?;
            return Ok(PointSet::Nodes { q, max_level });
        }
        if let Some(rest) = spec.strip_prefix("gaps:") {
            let (q, max_level) = parse_leveled(rest)?;
            return Ok(PointSet::Gaps { q, max_level });
        }
        Err(Error::parse(format!(
            "unknown point set '{spec}'; use nodes:q:k<=N, gaps:q:k<=N, or list:..."
        )))
    }

    fn system(&self, level_budget: u64) -> Result<Option<Arc<CantorSystem>>> {
        match self {
            PointSet::Nodes { q, .. } | PointSet::Gaps { q, .. } => {
                Ok(Some(CantorSystem::with_level_budget(*q, level_budget)?))
            }
            PointSet::List(_) => Ok(None),
        }
    }

    /// Materializes evaluation points: node endpoints for `nodes`, gap
    /// endpoints for `gaps`, the literal list otherwise. Sorted, distinct.
    pub fn points(&self, level_budget: u64) -> Result<Vec<Rational>> {
        let sys = self.system(level_budget)?;
        let mut pts = match self {
            PointSet::List(points) => points.clone(),
            PointSet::Nodes { max_level, .. } => {
                let sys = sys.unwrap();
                let mut pts = Vec::new();
                for k in 0..=*max_level {
                    for n in sys.closed_level(k)?.iter() {
                        pts.push(n.left.clone());
                        pts.push(n.right.clone());
                    }
                }
                pts
            }
            PointSet::Gaps { max_level, .. } => {
                let sys = sys.unwrap();
                let mut pts = Vec::new();
                for k in 1..=*max_level {
                    for g in sys.gap_level(k)?.iter() {
                        pts.push(g.left.clone());
                        pts.push(g.right.clone());
                    }
                }
                pts
            }
        };
        pts.sort_by(|a, b| a.cmp_exact(b));
        pts.dedup();
        Ok(pts)
    }

    /// Materializes gap intervals; only valid for `gaps` sets.
    pub fn gap_intervals(&self, level_budget: u64) -> Result<Vec<GapInterval>> {
        match self {
            PointSet::Gaps { max_level, .. } => {
                let sys = self.system(level_budget)?.unwrap();
                let mut gaps = Vec::new();
                for k in 1..=*max_level {
                    gaps.extend(sys.gap_level(k)?.iter().cloned());
                }
                Ok(gaps)
            }
            _ => Err(Error::parse("expected a gaps:q:k<=N set")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert!(matches!(
            PointSet::parse("nodes:3:k<=4").unwrap(),
            PointSet::Nodes { q: 3, max_level: 4 }
        ));
        assert!(matches!(
            PointSet::parse("gaps:5:k<=3").unwrap(),
            PointSet::Gaps { q: 5, max_level: 3 }
        ));
        match PointSet::parse("list:1/3,2/3").unwrap() {
            PointSet::List(v) => assert_eq!(v.len(), 2),
            _ => panic!(),
        }
        assert!(PointSet::parse("nodes:3").is_err());
        assert!(PointSet::parse("list:1/0").is_err());
        assert!(PointSet::parse("squares:3:k<=2").is_err());
    }

    #[test]
    fn node_points_are_sorted_distinct() {
        let pts = PointSet::parse("nodes:3:k<=3")
            .unwrap()
            .points(1_000_000)
            .unwrap();
        assert_eq!(pts.len(), 16); // level-3 endpoints
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
