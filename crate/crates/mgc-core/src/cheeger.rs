//! Exact Cheeger solvers by enumeration of combinatorial cut patterns.
//!
//! A ratio minimizer never needs two disjoint arcs in one segment's interior
//! (sliding one to touch the other keeps the volume and drops the perimeter
//! by 2), so per segment the candidate configurations reduce to six tags.
//! Perimeter is constant per pattern, so each pattern's best ratio takes
//! every adjustable arc at its maximal closure length, clipped by the volume
//! cap in the global-cut problem. The grid brute-force oracle in the tests
//! guards the structure lemma.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::function::PiecewiseFunction;
use crate::graph::MetricGraph;
use crate::measures::{perimeter, total_variation};
use crate::rational::Rat;
use crate::subset::GraphSubset;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheegerError {
    EmptySet,
    EmptyOmega,
    /// Omega covers the whole graph, so Per(Omega) = 0.
    ZeroPerimeterOmega,
    PatternBudgetExceeded { patterns_log6: usize, budget: u64 },
    ViolatedConstraint(&'static str),
}

impl fmt::Display for CheegerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheegerError::EmptySet => write!(f, "subset has zero length"),
            CheegerError::EmptyOmega => write!(f, "omega has zero length"),
            CheegerError::ZeroPerimeterOmega => {
                write!(f, "omega has zero perimeter (covers the whole graph)")
            }
            CheegerError::PatternBudgetExceeded { patterns_log6, budget } => write!(
                f,
                "6^{patterns_log6} patterns exceed the budget {budget}"
            ),
            CheegerError::ViolatedConstraint(name) => {
                write!(f, "precondition violated: {name}")
            }
        }
    }
}

impl core::error::Error for CheegerError {}

/// Per-segment configuration tag; the declaration order is the tie-break
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SegTag {
    Empty,
    Full,
    AnchorLeft,
    AnchorRight,
    AnchorBoth,
    Interior,
}

impl SegTag {
    pub const ALL: [SegTag; 6] = [
        SegTag::Empty,
        SegTag::Full,
        SegTag::AnchorLeft,
        SegTag::AnchorRight,
        SegTag::AnchorBoth,
        SegTag::Interior,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SegTag::Empty => "empty",
            SegTag::Full => "full",
            SegTag::AnchorLeft => "anchor-left",
            SegTag::AnchorRight => "anchor-right",
            SegTag::AnchorBoth => "anchor-both",
            SegTag::Interior => "interior",
        }
    }
}

/// One maximal segment of the search region inside an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSegment {
    pub edge: String,
    pub start: Rat,
    pub end: Rat,
    /// Interior vertex at the segment's left end (only when start = 0 and the
    /// tail vertex has degree > 1).
    left_vertex: Option<String>,
    right_vertex: Option<String>,
}

impl PatternSegment {
    pub fn length(&self) -> Rat {
        self.end.clone() - self.start.clone()
    }
}

/// A full tag assignment over the segment decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutPattern {
    pub segments: Vec<PatternSegment>,
    pub tags: Vec<SegTag>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheegerResult {
    pub value: Rat,
    pub witness: GraphSubset,
    pub pattern: CutPattern,
    /// For the global cut: whether h >= 2/ell(Gamma) held (always true).
    pub lower_bound_ok: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CheegerOptions {
    pub pattern_budget: u64,
}

impl Default for CheegerOptions {
    fn default() -> Self {
        // 6^12.
        CheegerOptions {
            pattern_budget: 2_176_782_336,
        }
    }
}

/// Per(E)/ell(E), exact.
pub fn ratio(graph: &MetricGraph, set: &GraphSubset) -> Result<Rat, CheegerError> {
    let len = set.length();
    if len.is_zero() {
        return Err(CheegerError::EmptySet);
    }
    Ok(perimeter(graph, set) / len)
}

/// Decomposes a region into pattern segments with vertex-end bookkeeping.
fn segments_of(graph: &MetricGraph, region: &GraphSubset) -> Vec<PatternSegment> {
    let mut out = Vec::new();
    for e in graph.edges() {
        for a in region.arcs_on(&e.id) {
            let left_vertex = if a.start.is_zero() && graph.degree(&e.tail).unwrap() > 1 {
                Some(e.tail.clone())
            } else {
                None
            };
            let right_vertex = if a.end == e.length && graph.degree(&e.head).unwrap() > 1 {
                Some(e.head.clone())
            } else {
                None
            };
            out.push(PatternSegment {
                edge: e.id.clone(),
                start: a.start.clone(),
                end: a.end.clone(),
                left_vertex,
                right_vertex,
            });
        }
    }
    out
}

struct PatternEval {
    perimeter: i64,
    max_volume: Rat,
    rigid_volume: Rat,
}

/// Perimeter and volume range of one tag assignment. The perimeter counts
/// interior cuts plus min(k, d-k) at interior vertices; it does not depend on
/// the adjustable arc lengths.
fn evaluate(
    graph: &MetricGraph,
    segments: &[PatternSegment],
    tags: &[SegTag],
) -> PatternEval {
    let mut cuts: i64 = 0;
    let mut k_counts: BTreeMap<&String, i64> = BTreeMap::new();
    let mut max_volume = Rat::zero();
    let mut rigid_volume = Rat::zero();

    for (seg, tag) in segments.iter().zip(tags) {
        let (anchors_left, anchors_right, inner_cuts) = match tag {
            SegTag::Empty => (false, false, 0),
            SegTag::Full => (true, true, 0),
            SegTag::AnchorLeft => (true, false, 1),
            SegTag::AnchorRight => (false, true, 1),
            SegTag::AnchorBoth => (true, true, 2),
            SegTag::Interior => (false, false, 2),
        };
        cuts += inner_cuts;
        if *tag != SegTag::Empty {
            max_volume += seg.length();
            if *tag == SegTag::Full {
                rigid_volume += seg.length();
            }
        }
        if anchors_left {
            match &seg.left_vertex {
                Some(v) => *k_counts.entry(v).or_insert(0) += 1,
                None => {
                    if !seg.start.is_zero() {
                        cuts += 1;
                    }
                    // start = 0 at a boundary vertex: no cost.
                }
            }
        }
        if anchors_right {
            match &seg.right_vertex {
                Some(v) => *k_counts.entry(v).or_insert(0) += 1,
                None => {
                    let len = &graph.edge(&seg.edge).unwrap().length;
                    if &seg.end != len {
                        cuts += 1;
                    }
                }
            }
        }
    }

    let mut per = cuts;
    for (v, k) in k_counts {
        let d = graph.degree(v).unwrap() as i64;
        per += k.min(d - k);
    }

    PatternEval {
        perimeter: per,
        max_volume,
        rigid_volume,
    }
}

/// Builds the witness subset for a pattern at a target volume, allocating
/// adjustable arcs greedily in segment order (earlier segments maximal).
/// Anchor-both splits its allocation evenly between the two anchored arcs.
fn witness_at_volume(
    graph: &MetricGraph,
    segments: &[PatternSegment],
    tags: &[SegTag],
    volume: &Rat,
    rigid: &Rat,
) -> GraphSubset {
    let mut budget = volume.clone() - rigid.clone();
    debug_assert!(!budget.is_negative());
    let two = Rat::from_integer(2.into());
    let mut raw: Vec<(String, Rat, Rat)> = Vec::new();
    for (seg, tag) in segments.iter().zip(tags) {
        match tag {
            SegTag::Empty => {}
            SegTag::Full => raw.push((seg.edge.clone(), seg.start.clone(), seg.end.clone())),
            SegTag::AnchorLeft | SegTag::Interior => {
                let s = seg.length().min(budget.clone());
                budget -= s.clone();
                if s.is_positive() {
                    raw.push((seg.edge.clone(), seg.start.clone(), seg.start.clone() + s));
                }
            }
            SegTag::AnchorRight => {
                let s = seg.length().min(budget.clone());
                budget -= s.clone();
                if s.is_positive() {
                    raw.push((seg.edge.clone(), seg.end.clone() - s, seg.end.clone()));
                }
            }
            SegTag::AnchorBoth => {
                let s = seg.length().min(budget.clone());
                budget -= s.clone();
                if s.is_positive() {
                    let half = s.clone() / two.clone();
                    raw.push((
                        seg.edge.clone(),
                        seg.start.clone(),
                        seg.start.clone() + half.clone(),
                    ));
                    raw.push((seg.edge.clone(), seg.end.clone() - half, seg.end.clone()));
                }
            }
        }
    }
    GraphSubset::new(graph, raw).expect("pattern arcs are in range")
}

/// Shared enumeration core: minimizes Per/vol over all tag assignments, with
/// an optional volume cap. Returns the best (value, tags, volume).
fn enumerate_patterns(
    graph: &MetricGraph,
    segments: &[PatternSegment],
    cap: Option<&Rat>,
    opts: &CheegerOptions,
) -> Result<(Rat, Vec<SegTag>, Rat), CheegerError> {
    let m = segments.len();
    let mut budget_check: u64 = 1;
    for _ in 0..m {
        budget_check = budget_check.saturating_mul(6);
        if budget_check > opts.pattern_budget {
            return Err(CheegerError::PatternBudgetExceeded {
                patterns_log6: m,
                budget: opts.pattern_budget,
            });
        }
    }

    let mut best: Option<(Rat, Vec<SegTag>, Rat)> = None;
    let mut tags = alloc::vec![SegTag::Empty; m];
    loop {
        let eval = evaluate(graph, segments, &tags);
        let volume = match cap {
            Some(c) => {
                if &eval.rigid_volume > c {
                    Rat::zero() // infeasible: rigid part alone exceeds the cap
                } else {
                    eval.max_volume.clone().min(c.clone())
                }
            }
            None => eval.max_volume.clone(),
        };
        if volume.is_positive() {
            let value = Rat::from_integer(eval.perimeter.into()) / volume.clone();
            let better = match &best {
                None => true,
                Some((bv, btags, _)) => value < *bv || (value == *bv && tags < *btags),
            };
            if better {
                best = Some((value, tags.clone(), volume));
            }
        }

        // Mixed-radix increment in tag order, last segment fastest, so the
        // enumeration visits lexicographically increasing tag tuples.
        let mut pos = m;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            let next = match tags[pos] {
                SegTag::Empty => Some(SegTag::Full),
                SegTag::Full => Some(SegTag::AnchorLeft),
                SegTag::AnchorLeft => Some(SegTag::AnchorRight),
                SegTag::AnchorRight => Some(SegTag::AnchorBoth),
                SegTag::AnchorBoth => Some(SegTag::Interior),
                SegTag::Interior => None,
            };
            match next {
                Some(t) => {
                    tags[pos] = t;
                    break;
                }
                None => {
                    tags[pos] = SegTag::Empty;
                    if pos == 0 {
                        let (value, tags, volume) =
                            best.expect("at least one non-empty pattern is feasible");
                        return Ok((value, tags, volume));
                    }
                }
            }
        }
    }
}

/// Cheeger constant of a region: min Per(E)/ell(E) over E inside Omega with
/// positive length, with an exact witness.
pub fn cheeger_within(
    graph: &MetricGraph,
    omega: &GraphSubset,
    opts: &CheegerOptions,
) -> Result<CheegerResult, CheegerError> {
    if omega.is_empty() {
        return Err(CheegerError::EmptyOmega);
    }
    if omega.is_full(graph) {
        return Err(CheegerError::ZeroPerimeterOmega);
    }
    let segments = segments_of(graph, omega);
    let (value, tags, volume) = enumerate_patterns(graph, &segments, None, opts)?;
    let rigid = rigid_volume_of(&segments, &tags);
    let witness = witness_at_volume(graph, &segments, &tags, &volume, &rigid);
    debug_assert_eq!(ratio(graph, &witness).unwrap(), value);
    Ok(CheegerResult {
        value,
        witness,
        pattern: CutPattern {
            segments,
            tags,
        },
        lower_bound_ok: None,
    })
}

fn rigid_volume_of(segments: &[PatternSegment], tags: &[SegTag]) -> Rat {
    segments
        .iter()
        .zip(tags)
        .filter(|(_, t)| **t == SegTag::Full)
        .fold(Rat::zero(), |acc, (s, _)| acc + s.length())
}

/// Global Cheeger cut: min Per(D)/ell(D) over 0 < ell(D) <= ell(Gamma)/2,
/// with the lower-bound check h >= 2/ell(Gamma).
pub fn cheeger_cut(
    graph: &MetricGraph,
    opts: &CheegerOptions,
) -> Result<CheegerResult, CheegerError> {
    let segments = segments_of(graph, &GraphSubset::full(graph));
    let cap = graph.total_length().clone() / Rat::from_integer(2.into());
    let (value, tags, volume) = enumerate_patterns(graph, &segments, Some(&cap), opts)?;
    let rigid = rigid_volume_of(&segments, &tags);
    let witness = witness_at_volume(graph, &segments, &tags, &volume, &rigid);
    debug_assert_eq!(ratio(graph, &witness).unwrap(), value);
    debug_assert!(witness.length() <= cap);
    let lower_bound = Rat::from_integer(2.into()) / graph.total_length().clone();
    Ok(CheegerResult {
        lower_bound_ok: Some(value >= lower_bound),
        value,
        witness,
        pattern: CutPattern {
            segments,
            tags,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalibrabilityReport {
    pub calibrable: bool,
    /// Per(Omega)/ell(Omega).
    pub lambda: Rat,
    pub h1: CheegerResult,
}

/// Omega is calibrable iff it attains its own Cheeger constant.
pub fn is_calibrable(
    graph: &MetricGraph,
    omega: &GraphSubset,
    opts: &CheegerOptions,
) -> Result<CalibrabilityReport, CheegerError> {
    let h1 = cheeger_within(graph, omega, opts)?;
    let lambda = ratio(graph, omega)?;
    Ok(CalibrabilityReport {
        calibrable: lambda == h1.value,
        lambda,
        h1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexityCounterexample {
    pub set: GraphSubset,
    pub perimeter_intersection: Rat,
    pub perimeter_set: Rat,
}

/// One-sided probe for non-path-convexity: searches unions of the atomic
/// intervals induced by Omega's boundaries for E with
/// Per(Omega ∩ E) > Per(E). The full graph and the empty set are excluded
/// (E = Gamma would defeat every region with positive perimeter). Candidates
/// are scanned by decreasing volume, then decreasing atom mask, so the
/// returned counterexample is the largest one.
pub fn path_convexity_probe(
    graph: &MetricGraph,
    omega: &GraphSubset,
    opts: &CheegerOptions,
) -> Result<Option<ConvexityCounterexample>, CheegerError> {
    // Atomic intervals: edge pieces split at Omega arc endpoints.
    let mut atoms: Vec<(String, Rat, Rat)> = Vec::new();
    for e in graph.edges() {
        let mut points = alloc::vec![Rat::zero(), e.length.clone()];
        for a in omega.arcs_on(&e.id) {
            points.push(a.start.clone());
            points.push(a.end.clone());
        }
        points.sort();
        points.dedup();
        for w in points.windows(2) {
            atoms.push((e.id.clone(), w[0].clone(), w[1].clone()));
        }
    }
    let n = atoms.len();
    if n > 24 || (1u64 << n) > opts.pattern_budget.max(1 << 24) {
        return Err(CheegerError::PatternBudgetExceeded {
            patterns_log6: n,
            budget: opts.pattern_budget,
        });
    }

    let full_mask: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut candidates: Vec<(Rat, u32)> = Vec::with_capacity(full_mask as usize);
    for mask in 1..full_mask {
        let vol = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .fold(Rat::zero(), |acc, (_, (_, a, b))| acc + (b.clone() - a.clone()));
        candidates.push((vol, mask));
    }
    candidates.sort_by(|(va, ma), (vb, mb)| vb.cmp(va).then(mb.cmp(ma)));

    for (_, mask) in candidates {
        let raw = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << *i) != 0)
            .map(|(_, (e, a, b))| (e.clone(), a.clone(), b.clone()));
        let set = GraphSubset::new(graph, raw).expect("atoms are in range");
        let per_set = perimeter(graph, &set);
        let per_int = perimeter(graph, &omega.intersect(&set));
        if per_int > per_set {
            return Ok(Some(ConvexityCounterexample {
                set,
                perimeter_intersection: per_int,
                perimeter_set: per_set,
            }));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone)]
pub enum RayleighMode<'a> {
    /// TV(u)/int u for nonnegative u supported in Omega.
    WithinOmega(&'a GraphSubset),
    /// TV(u)/||u||_1 for u with 0 in its median set.
    GlobalMedian,
}

/// Total-variation Rayleigh quotient, certifying upper bounds for the
/// Cheeger constants.
pub fn rayleigh_tv(
    graph: &MetricGraph,
    u: &PiecewiseFunction,
    mode: RayleighMode<'_>,
) -> Result<Rat, CheegerError> {
    let tv = total_variation(graph, u);
    match mode {
        RayleighMode::WithinOmega(omega) => {
            let nonneg = u
                .edges()
                .all(|(_, p)| p.segments.iter().all(|(a, b)| !a.is_negative() && !b.is_negative()));
            if !nonneg {
                return Err(CheegerError::ViolatedConstraint("u >= 0"));
            }
            if !u.support(graph).is_subset_of(omega) {
                return Err(CheegerError::ViolatedConstraint("u = 0 off omega"));
            }
            let mass = u.integral();
            if !mass.is_positive() {
                return Err(CheegerError::ViolatedConstraint("int u > 0"));
            }
            if !tv.is_positive() {
                return Err(CheegerError::ViolatedConstraint("TV(u) > 0"));
            }
            Ok(tv / mass)
        }
        RayleighMode::GlobalMedian => {
            let norm = u.l1_norm();
            if !norm.is_positive() {
                return Err(CheegerError::ViolatedConstraint("||u||_1 > 0"));
            }
            if !u.median(graph).contains_zero() {
                return Err(CheegerError::ViolatedConstraint("0 in med(u)"));
            }
            Ok(tv / norm)
        }
    }
}
