//! Base-q Cantor system machinery.
//!
//! For an odd base `q = 2m+1` the unit interval is recursively subdivided
//! into `q` equal parts, keeping the `m+1` even-indexed closed parts and
//! removing the `m` odd-indexed open parts. Level `k` of the construction
//! consists of `(m+1)^k` closed intervals (nodes) and `m(m+1)^{k-1}` removed
//! open intervals (gaps), all of length `q^{-k}`; the Cantor set `C` is the
//! intersection of the node unions.
//!
//! The associated Cantor function `psi` is continuous, nondecreasing,
//! constant on every gap, and maps each level-k node onto an interval of
//! length `(m+1)^{-k}`. Because all inputs are rational, `psi` is evaluated
//! exactly: the base-q digit walk of a rational either falls into a gap
//! (plateau value) or cycles (closed form through the geometric series of
//! the repeating digits).

mod walk;

pub use walk::{DigitWalk, StepOutcome, WalkResolution};

use crate::error::{Error, Result};
use crate::exact::{Enclosure, Rational};
use num::{BigInt, BigUint, One, Zero};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Default cap on the number of intervals enumerated per level.
pub const DEFAULT_LEVEL_BUDGET: u64 = 1_000_000;

/// Default cap on digit-walk length (cycle detection terminates far earlier
/// for any denominator of sane size).
pub const DEFAULT_WALK_BUDGET: usize = 1_000_000;

/// A closed surviving interval of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeInterval {
    pub level: u32,
    pub path: Vec<u32>,
    pub left: Rational,
    pub right: Rational,
}

/// A removed open interval of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapInterval {
    pub level: u32,
    pub left: Rational,
    pub right: Rational,
}

impl GapInterval {
    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn midpoint(&self) -> Rational {
        (&self.left + &self.right) * Rational::ratio(1, 2)
    }
}

/// Verdict of [`CantorSystem::locate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Located {
    /// x is outside [0,1].
    Outside,
    /// x lies strictly inside this gap, hence definitively outside C.
    InGap(GapInterval),
    /// x lies in this level-`depth` node; deeper status was not probed.
    /// Endpoints of nodes are members of C.
    InNodeToDepth(NodeInterval, u32),
}

/// Which kind of level enumeration [`CantorSystem::enumerate`] returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelKind {
    Closed,
    Gaps,
}

/// One structure intersecting a query window; see
/// [`CantorSystem::structures_in_window`].
#[derive(Clone, Debug)]
pub enum WindowStructure {
    Node(NodeInterval),
    Gap(GapInterval),
}

/// A base-q Cantor construction with cached level enumerations.
///
/// Immutable after construction except for the level caches, whose fill is
/// idempotent; shared references may be used concurrently.
pub struct CantorSystem {
    q: u32,
    m: u32,
    level_budget: u64,
    walk_budget: usize,
    nodes: RwLock<HashMap<u32, Arc<Vec<NodeInterval>>>>,
    gaps: RwLock<HashMap<u32, Arc<Vec<GapInterval>>>>,
}

impl CantorSystem {
    /// Creates the system for odd `q >= 3`.
    pub fn new(q: u32) -> Result<Arc<Self>> {
        Self::with_level_budget(q, DEFAULT_LEVEL_BUDGET)
    }

    pub fn with_level_budget(q: u32, level_budget: u64) -> Result<Arc<Self>> {
        if q < 3 || q % 2 == 0 {
            return Err(Error::domain(format!("base {q} is not an odd integer >= 3")));
        }
        Ok(Arc::new(CantorSystem {
            q,
            m: (q - 1) / 2,
            level_budget,
            walk_budget: DEFAULT_WALK_BUDGET,
            nodes: RwLock::new(HashMap::new()),
            gaps: RwLock::new(HashMap::new()),
        }))
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// m with q = 2m+1; there are m+1 children and m gaps per node.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// q^{-k}
    pub fn node_length(&self, k: u32) -> Rational {
        Rational::pow(self.q, -(k as i64))
    }

    /// (m+1)^{-k}, the psi-image length of a level-k node.
    pub fn psi_scale(&self, k: u32) -> Rational {
        Rational::pow(self.m + 1, -(k as i64))
    }

    /// Number of level-k nodes, (m+1)^k.
    pub fn node_count(&self, k: u32) -> BigUint {
        BigUint::from(self.m + 1).pow(k)
    }

    /// Number of level-k gaps, m(m+1)^{k-1}.
    pub fn gap_count(&self, k: u32) -> BigUint {
        assert!(k >= 1);
        BigUint::from(self.m) * BigUint::from(self.m + 1).pow(k - 1)
    }

    fn check_level_budget(&self, k: u32) -> Result<()> {
        let count = self.node_count(k);
        if count > BigUint::from(self.level_budget) {
            return Err(Error::budget(format!(
                "level {k} enumeration needs {count} intervals, budget is {}",
                self.level_budget
            )));
        }
        Ok(())
    }

    /// All level-k nodes, sorted by left endpoint.
    pub fn closed_level(&self, k: u32) -> Result<Arc<Vec<NodeInterval>>> {
        if let Some(v) = self.nodes.read().unwrap().get(&k) {
            return Ok(v.clone());
        }
        self.check_level_budget(k)?;
        let built = if k == 0 {
            vec![NodeInterval {
                level: 0,
                path: Vec::new(),
                left: Rational::zero(),
                right: Rational::one(),
            }]
        } else {
            let parents = self.closed_level(k - 1)?;
            let mut out = Vec::with_capacity(parents.len() * (self.m as usize + 1));
            for parent in parents.iter() {
                let w = (&parent.right - &parent.left) / &Rational::from_int(self.q);
                for child in 0..=self.m {
                    let mut path = parent.path.clone();
                    path.push(child);
                    let left = &parent.left + &(&Rational::from_int(2 * child) * &w);
                    let right = &left + &w;
                    out.push(NodeInterval {
                        level: k,
                        path,
                        left,
                        right,
                    });
                }
            }
            out
        };
        let arc = Arc::new(built);
        self.nodes
            .write()
            .unwrap()
            .entry(k)
            .or_insert_with(|| arc.clone());
        Ok(self.nodes.read().unwrap().get(&k).unwrap().clone())
    }

    /// All level-k gaps (components of C_{k-1} minus C_k), sorted by left
    /// endpoint.
    pub fn gap_level(&self, k: u32) -> Result<Arc<Vec<GapInterval>>> {
        if k == 0 {
            return Err(Error::domain("gaps start at level 1"));
        }
        if let Some(v) = self.gaps.read().unwrap().get(&k) {
            return Ok(v.clone());
        }
        self.check_level_budget(k)?;
        let parents = self.closed_level(k - 1)?;
        let mut out = Vec::with_capacity(parents.len() * self.m as usize);
        for parent in parents.iter() {
            let w = (&parent.right - &parent.left) / &Rational::from_int(self.q);
            for g in 0..self.m {
                let left = &parent.left + &(&Rational::from_int(2 * g + 1) * &w);
                let right = &left + &w;
                out.push(GapInterval { level: k, left, right });
            }
        }
        let arc = Arc::new(out);
        self.gaps
            .write()
            .unwrap()
            .entry(k)
            .or_insert_with(|| arc.clone());
        Ok(self.gaps.read().unwrap().get(&k).unwrap().clone())
    }

    /// Level enumeration as a uniform operation over both kinds.
    pub fn enumerate(&self, k: u32, kind: LevelKind) -> Result<Vec<WindowStructure>> {
        match kind {
            LevelKind::Closed => Ok(self
                .closed_level(k)?
                .iter()
                .cloned()
                .map(WindowStructure::Node)
                .collect()),
            LevelKind::Gaps => Ok(self
                .gap_level(k)?
                .iter()
                .cloned()
                .map(WindowStructure::Gap)
                .collect()),
        }
    }

    /// Starts a digit walk at `x`, which must lie in [0,1].
    pub fn walk(&self, x: &Rational) -> Result<DigitWalk> {
        DigitWalk::new(self, x)
    }

    pub(crate) fn walk_budget(&self) -> usize {
        self.walk_budget
    }

    /// Classifies `x` against the construction to depth `max_depth >= 1`.
    ///
    /// Endpoints of nodes are classified as members of C: the walk descends
    /// into the adjacent closed child, which is exactly the "consult the dual
    /// digit expansion" rule for boundary points.
    pub fn locate(&self, x: &Rational, max_depth: u32) -> Result<Located> {
        if x.is_negative() || x > &Rational::one() {
            return Ok(Located::Outside);
        }
        let mut walk = self.walk(x)?;
        let mut path = Vec::new();
        let mut left = Rational::zero();
        let mut width = Rational::one();
        for level in 1..=max_depth {
            let qr = Rational::from_int(self.q);
            width = &width / &qr;
            match walk.step() {
                StepOutcome::Node { child } => {
                    left = &left + &(&Rational::from_int(2 * child) * &width);
                    path.push(child);
                }
                StepOutcome::Gap { gap_index, .. } => {
                    let gl = &left + &(&Rational::from_int(2 * gap_index + 1) * &width);
                    let gr = &gl + &width;
                    return Ok(Located::InGap(GapInterval {
                        level,
                        left: gl,
                        right: gr,
                    }));
                }
            }
        }
        let right = &left + &width;
        Ok(Located::InNodeToDepth(
            NodeInterval {
                level: max_depth,
                path,
                left,
                right,
            },
            max_depth,
        ))
    }

    /// Exact value of the Cantor function at `x` in [0,1].
    pub fn psi_exact(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::domain(format!("psi domain is [0,1], got {x}")));
        }
        let mut walk = self.walk(x)?;
        match walk.resolve(None)? {
            WalkResolution::Exact(v) => Ok(v),
            WalkResolution::Truncated { .. } => unreachable!("unbounded walk resolves exactly"),
        }
    }

    /// Enclosure of psi(x) from the depth-`depth` partial construction with
    /// tail bound (m+1)^{-depth}.
    ///
    /// When the digit walk resolves within `depth` steps (gap hit or digit
    /// cycle) the exact value is returned as a point enclosure; otherwise the
    /// truncation `psi_depth(x) +- (m+1)^{-depth}` is clamped to [0,1].
    pub fn psi_enclose(&self, x: &Rational, depth: u32) -> Result<Enclosure> {
        if x.is_negative() || x > &Rational::one() {
            return Err(Error::domain(format!("psi domain is [0,1], got {x}")));
        }
        if depth == 0 {
            return Err(Error::domain("psi_enclose needs depth >= 1"));
        }
        let mut walk = self.walk(x)?;
        match walk.resolve(Some(depth))? {
            WalkResolution::Exact(v) => Ok(Enclosure::point(v)),
            WalkResolution::Truncated { partial } => {
                let tail = self.psi_scale(depth);
                let lo = &partial - &tail;
                let hi = &partial + &tail;
                Ok(Enclosure::new(lo, hi)?.clamp(&Rational::zero(), &Rational::one()))
            }
        }
    }

    /// psi extended to all of R: 0 left of [0,1], 1 right of it.
    pub fn psi_extended(&self, x: &Rational) -> Result<Rational> {
        if x.is_negative() {
            Ok(Rational::zero())
        } else if x > &Rational::one() {
            Ok(Rational::one())
        } else {
            self.psi_exact(x)
        }
    }

    /// All gaps of level <= `max_level`, and all nodes of level in
    /// `node_emit_from..=max_level`, whose interior meets the open window
    /// (lo, hi).
    ///
    /// The descent follows the window with fixed-denominator integer
    /// arithmetic (a node at level l is an integer over q^l), so it stays
    /// cheap even for windows of size q^{-650}.
    pub fn structures_in_window(
        &self,
        lo: &Rational,
        hi: &Rational,
        max_level: u32,
        node_emit_from: u32,
    ) -> Vec<WindowStructure> {
        let mut out = Vec::new();
        if lo >= hi {
            return out;
        }
        let q_big = BigInt::from(self.q);
        let mut q_pow: Vec<BigInt> = Vec::with_capacity(max_level as usize + 2);
        q_pow.push(BigInt::one());
        for _ in 0..=max_level {
            q_pow.push(q_pow.last().unwrap() * &q_big);
        }
        // interior of [a/q^l, (a+1)/q^l] meets (lo, hi)
        let overlaps = |a: &BigInt, level: u32| -> bool {
            a * hi.denom() < hi.numer() * &q_pow[level as usize]
                && (a + 1) * lo.denom() > lo.numer() * &q_pow[level as usize]
        };
        if !overlaps(&BigInt::zero(), 0) {
            return out;
        }
        let mut stack: Vec<(u32, BigInt, Vec<u32>)> = vec![(0, BigInt::zero(), Vec::new())];
        while let Some((level, left_num, path)) = stack.pop() {
            if level >= node_emit_from {
                let left = Rational::new(left_num.clone(), q_pow[level as usize].clone())
                    .expect("q power > 0");
                let right = Rational::new(&left_num + 1, q_pow[level as usize].clone())
                    .expect("q power > 0");
                out.push(WindowStructure::Node(NodeInterval {
                    level,
                    path: path.clone(),
                    left,
                    right,
                }));
            }
            if level >= max_level {
                continue;
            }
            let child_level = level + 1;
            for child in 0..=self.m {
                let cl = &left_num * &q_big + BigInt::from(2 * child);
                if overlaps(&cl, child_level) {
                    let mut cpath = path.clone();
                    cpath.push(child);
                    stack.push((child_level, cl, cpath));
                }
                if child < self.m {
                    let gl = &left_num * &q_big + BigInt::from(2 * child + 1);
                    if overlaps(&gl, child_level) {
                        let den = q_pow[child_level as usize].clone();
                        out.push(WindowStructure::Gap(GapInterval {
                            level: child_level,
                            left: Rational::new(gl.clone(), den.clone()).expect("q power > 0"),
                            right: Rational::new(gl + 1, den).expect("q power > 0"),
                        }));
                    }
                }
            }
        }
        out
    }

    /// Incremental count of gaps per level contained in a region, without
    /// enumeration; used by the divergence probes.
    pub fn gap_counter(self: &Arc<Self>, lo: Rational, hi: Rational) -> Result<GapCounter> {
        GapCounter::new(self.clone(), lo, hi)
    }
}

/// Counts, level by level, the gaps contained in a fixed open region.
///
/// Carries the count of nodes fully inside the region in closed form and
/// subdivides only the (at most two) nodes straddling the region boundary,
/// so level k costs O(q) regardless of the (m+1)^k population.
pub struct GapCounter {
    sys: Arc<CantorSystem>,
    lo: Rational,
    hi: Rational,
    level: u32,
    full: BigUint,
    boundary: Vec<(Rational, Rational)>,
}

impl GapCounter {
    fn new(sys: Arc<CantorSystem>, lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::domain(format!("empty region ({lo}, {hi})")));
        }
        let mut full = BigUint::from(0u32);
        let mut boundary = Vec::new();
        let zero = Rational::zero();
        let one = Rational::one();
        if lo <= zero && one <= hi {
            full = BigUint::from(1u32);
        } else if lo < one && hi > zero {
            boundary.push((zero, one));
        }
        Ok(GapCounter {
            sys,
            lo,
            hi,
            level: 0,
            full,
            boundary,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Advances one level and returns the number of gaps of the new level
    /// contained in the region. Never called past the caller's level cap.
    pub fn advance(&mut self) -> BigUint {
        let m = self.sys.m;
        let q = Rational::from_int(self.sys.q);
        let mut gaps = &self.full * BigUint::from(m);
        let mut next_boundary = Vec::new();
        let mut next_full_extra = BigUint::from(0u32);
        for (u, v) in std::mem::take(&mut self.boundary) {
            let w = (&v - &u) / &q;
            for child in 0..=m {
                let left = &u + &(&Rational::from_int(2 * child) * &w);
                let right = &left + &w;
                if self.lo <= left && right <= self.hi {
                    next_full_extra += BigUint::from(1u32);
                } else if left < self.hi && right > self.lo {
                    next_boundary.push((left, right));
                }
            }
            for g in 0..m {
                let gl = &u + &(&Rational::from_int(2 * g + 1) * &w);
                let gr = &gl + &w;
                if self.lo <= gl && gr <= self.hi {
                    gaps += BigUint::from(1u32);
                }
            }
        }
        self.full = &self.full * BigUint::from(m + 1) + next_full_extra;
        self.boundary = next_boundary;
        self.level += 1;
        gaps
    }
}
