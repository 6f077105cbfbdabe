//! Piecewise-affine BV representatives on a metric graph: per edge an ordered
//! breakpoint grid with independent one-sided values at every breakpoint, so
//! jump discontinuities live exactly at breakpoints and the Cantor part is
//! zero by construction.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeEnd, MetricGraph};
use crate::rational::Rat;
use crate::subset::GraphSubset;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionError {
    UnknownEdge(String),
    MissingEdge(String),
    /// Breakpoints must run 0 = x_0 < ... < x_n = edge length with one
    /// segment between each pair.
    BadBreakpoints(String),
}

impl fmt::Display for FunctionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionError::UnknownEdge(e) => write!(f, "unknown edge {e:?}"),
            FunctionError::MissingEdge(e) => write!(f, "no data for edge {e:?}"),
            FunctionError::BadBreakpoints(e) => write!(f, "bad breakpoint grid on edge {e:?}"),
        }
    }
}

impl core::error::Error for FunctionError {}

/// One edge: `breakpoints.len() == segments.len() + 1`; segment `i` is affine
/// on `[breakpoints[i], breakpoints[i+1]]` running from value `segments[i].0`
/// (right limit at the left breakpoint) to `segments[i].1` (left limit at the
/// right breakpoint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePiecewise {
    pub breakpoints: Vec<Rat>,
    pub segments: Vec<(Rat, Rat)>,
}

impl EdgePiecewise {
    fn validate(&self, len: &Rat) -> bool {
        if self.breakpoints.len() != self.segments.len() + 1 || self.segments.is_empty() {
            return false;
        }
        if !self.breakpoints[0].is_zero() || self.breakpoints.last().unwrap() != len {
            return false;
        }
        self.breakpoints.windows(2).all(|w| w[0] < w[1])
    }

    fn constant(len: &Rat, c: &Rat) -> Self {
        EdgePiecewise {
            breakpoints: alloc::vec![Rat::zero(), len.clone()],
            segments: alloc::vec![(c.clone(), c.clone())],
        }
    }
}

/// The median set `[lo, hi]` of a function with respect to arc length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MedianSet {
    pub lo: Rat,
    pub hi: Rat,
}

impl MedianSet {
    pub fn contains(&self, t: &Rat) -> bool {
        &self.lo <= t && t <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rat::zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseFunction {
    edges: BTreeMap<String, EdgePiecewise>,
}

impl PiecewiseFunction {
    pub fn from_edges(
        graph: &MetricGraph,
        edges: BTreeMap<String, EdgePiecewise>,
    ) -> Result<Self, FunctionError> {
        for id in edges.keys() {
            graph
                .edge(id)
                .map_err(|_| FunctionError::UnknownEdge(id.clone()))?;
        }
        for e in graph.edges() {
            match edges.get(&e.id) {
                None => return Err(FunctionError::MissingEdge(e.id.clone())),
                Some(p) if !p.validate(&e.length) => {
                    return Err(FunctionError::BadBreakpoints(e.id.clone()))
                }
                _ => {}
            }
        }
        Ok(PiecewiseFunction { edges })
    }

    pub fn constant(graph: &MetricGraph, c: &Rat) -> Self {
        let edges = graph
            .edges()
            .iter()
            .map(|e| (e.id.clone(), EdgePiecewise::constant(&e.length, c)))
            .collect();
        PiecewiseFunction { edges }
    }

    /// Indicator of a canonical subset, with breakpoints at the arc endpoints.
    pub fn indicator(graph: &MetricGraph, set: &GraphSubset) -> Self {
        Self::scaled_indicator(graph, set, &Rat::from_integer(1.into()), &Rat::zero())
    }

    /// `inside` on the set, `outside` elsewhere.
    pub fn scaled_indicator(
        graph: &MetricGraph,
        set: &GraphSubset,
        inside: &Rat,
        outside: &Rat,
    ) -> Self {
        let mut edges = BTreeMap::new();
        for e in graph.edges() {
            let mut bps = alloc::vec![Rat::zero()];
            let mut segs: Vec<(Rat, Rat)> = Vec::new();
            let push = |bps: &mut Vec<Rat>, segs: &mut Vec<(Rat, Rat)>, to: Rat, val: &Rat| {
                if &to > bps.last().unwrap() {
                    bps.push(to);
                    segs.push((val.clone(), val.clone()));
                }
            };
            for a in set.arcs_on(&e.id) {
                push(&mut bps, &mut segs, a.start.clone(), outside);
                push(&mut bps, &mut segs, a.end.clone(), inside);
            }
            push(&mut bps, &mut segs, e.length.clone(), outside);
            edges.insert(
                e.id.clone(),
                EdgePiecewise {
                    breakpoints: bps,
                    segments: segs,
                },
            );
        }
        PiecewiseFunction { edges }
    }

    pub fn on_edge(&self, edge: &str) -> &EdgePiecewise {
        &self.edges[edge]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&String, &EdgePiecewise)> {
        self.edges.iter()
    }

    /// One-sided trace of the function at the given end of an edge.
    pub fn trace(&self, edge: &str, end: EdgeEnd) -> Rat {
        let p = &self.edges[edge];
        match end {
            EdgeEnd::Tail => p.segments.first().unwrap().0.clone(),
            EdgeEnd::Head => p.segments.last().unwrap().1.clone(),
        }
    }

    /// Trace multiset at a vertex over its incident edge-ends, sorted.
    pub fn vertex_traces(&self, graph: &MetricGraph, v: &str) -> Vec<Rat> {
        let mut out: Vec<Rat> = graph
            .incident(v)
            .expect("valid vertex")
            .iter()
            .map(|(e, end)| self.trace(e, *end))
            .collect();
        out.sort();
        out
    }

    /// Exact signed integral over the graph.
    pub fn integral(&self) -> Rat {
        let mut total = Rat::zero();
        for p in self.edges.values() {
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                let dx = p.breakpoints[i + 1].clone() - p.breakpoints[i].clone();
                total += (vl.clone() + vr.clone()) * dx / Rat::from_integer(2.into());
            }
        }
        total
    }

    /// Exact L1 norm (splits segments at their zero crossings).
    pub fn l1_norm(&self) -> Rat {
        self.l1_distance_to(&Rat::zero())
    }

    /// Exact `int |u - c|`.
    pub fn l1_distance_to(&self, c: &Rat) -> Rat {
        let mut total = Rat::zero();
        let two = Rat::from_integer(2.into());
        for p in self.edges.values() {
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                let dx = p.breakpoints[i + 1].clone() - p.breakpoints[i].clone();
                let a = vl.clone() - c.clone();
                let b = vr.clone() - c.clone();
                if (a.is_negative() && b.is_positive()) || (a.is_positive() && b.is_negative()) {
                    // Affine segment crossing zero: two triangles.
                    let span = a.clone().abs() + b.clone().abs();
                    total += (a.clone() * a.clone() + b.clone() * b.clone()) * dx / (two.clone() * span);
                } else {
                    total += (a.abs() + b.abs()) * dx / two.clone();
                }
            }
        }
        total
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|(id, p)| {
                (
                    id.clone(),
                    EdgePiecewise {
                        breakpoints: p.breakpoints.clone(),
                        segments: p
                            .segments
                            .iter()
                            .map(|(a, b)| (a.clone() * factor.clone(), b.clone() * factor.clone()))
                            .collect(),
                    },
                )
            })
            .collect();
        PiecewiseFunction { edges }
    }

    pub fn is_constant(&self) -> bool {
        let mut value: Option<&Rat> = None;
        for p in self.edges.values() {
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                if vl != vr {
                    return false;
                }
                if i > 0 && p.segments[i - 1].1 != *vl {
                    return false;
                }
                match value {
                    None => value = Some(vl),
                    Some(v) if v != vl => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Canonical support `{u != 0}` up to null sets: an affine segment not
    /// identically zero vanishes on at most a point, so it contributes whole.
    pub fn support(&self, graph: &MetricGraph) -> GraphSubset {
        let mut raw: Vec<(String, Rat, Rat)> = Vec::new();
        for (edge, p) in &self.edges {
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                if vl.is_zero() && vr.is_zero() {
                    continue;
                }
                raw.push((
                    edge.clone(),
                    p.breakpoints[i].clone(),
                    p.breakpoints[i + 1].clone(),
                ));
            }
        }
        GraphSubset::new(graph, raw).expect("segments are in range")
    }

    /// Canonical superlevel set `{u > t}` (strict), returned as closed arcs.
    pub fn superlevel(&self, graph: &MetricGraph, t: &Rat) -> GraphSubset {
        let mut raw: Vec<(String, Rat, Rat)> = Vec::new();
        for (edge, p) in &self.edges {
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                let (x0, x1) = (&p.breakpoints[i], &p.breakpoints[i + 1]);
                let above_l = vl > t;
                let above_r = vr > t;
                match (above_l, above_r) {
                    (true, true) => raw.push((edge.clone(), x0.clone(), x1.clone())),
                    (false, false) => {}
                    _ => {
                        // Affine crossing: u(x) = vl + (vr-vl)(x-x0)/dx = t.
                        let dx = x1.clone() - x0.clone();
                        let cross = x0.clone()
                            + (t.clone() - vl.clone()) * dx / (vr.clone() - vl.clone());
                        if above_l {
                            if &cross > x0 {
                                raw.push((edge.clone(), x0.clone(), cross));
                            }
                        } else if &cross < x1 {
                            raw.push((edge.clone(), cross, x1.clone()));
                        }
                    }
                }
            }
        }
        GraphSubset::new(graph, raw).expect("arcs are in range")
    }

    /// Distinct one-sided segment endpoint values, sorted. Between two
    /// consecutive such values the combinatorial shape of every superlevel
    /// set is constant.
    pub fn level_breakpoints(&self) -> Vec<Rat> {
        let mut vals: Vec<Rat> = Vec::new();
        for p in self.edges.values() {
            for (vl, vr) in &p.segments {
                vals.push(vl.clone());
                vals.push(vr.clone());
            }
        }
        vals.sort();
        vals.dedup();
        vals
    }

    /// Exact median set of `u` with respect to arc length.
    pub fn median(&self, graph: &MetricGraph) -> MedianSet {
        // Length distribution of u: atoms from flat segments, uniform parts
        // from sloped segments.
        let mut atoms: BTreeMap<Rat, Rat> = BTreeMap::new();
        let mut uniforms: Vec<(Rat, Rat, Rat)> = Vec::new(); // (lo, hi, mass)
        for p in self.edges.values() {
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                let dx = p.breakpoints[i + 1].clone() - p.breakpoints[i].clone();
                if vl == vr {
                    *atoms.entry(vl.clone()).or_insert_with(Rat::zero) += dx;
                } else {
                    let (lo, hi) = if vl < vr { (vl, vr) } else { (vr, vl) };
                    uniforms.push((lo.clone(), hi.clone(), dx));
                }
            }
        }
        let half = graph.total_length().clone() / Rat::from_integer(2.into());

        let above = |t: &Rat| -> Rat {
            // ell{u > t}
            let mut m = Rat::zero();
            for (v, mass) in &atoms {
                if v > t {
                    m += mass.clone();
                }
            }
            for (lo, hi, mass) in &uniforms {
                if t <= lo {
                    m += mass.clone();
                } else if t < hi {
                    m += mass.clone() * (hi.clone() - t.clone()) / (hi.clone() - lo.clone());
                }
            }
            m
        };
        let below = |t: &Rat| -> Rat {
            // ell{u < t}
            let mut m = Rat::zero();
            for (v, mass) in &atoms {
                if v < t {
                    m += mass.clone();
                }
            }
            for (lo, hi, mass) in &uniforms {
                if t >= hi {
                    m += mass.clone();
                } else if t > lo {
                    m += mass.clone() * (t.clone() - lo.clone()) / (hi.clone() - lo.clone());
                }
            }
            m
        };

        // Candidate corner values of the piecewise-affine distribution.
        let mut corners: Vec<Rat> = atoms.keys().cloned().collect();
        for (lo, hi, _) in &uniforms {
            corners.push(lo.clone());
            corners.push(hi.clone());
        }
        corners.sort();
        corners.dedup();

        let atom_mass = |t: &Rat| -> Rat { atoms.get(t).cloned().unwrap_or_else(Rat::zero) };

        // mu_lo = min{t : ell{u > t} <= half}. `above` is non-increasing and
        // right-continuous: affine on open intervals between corners, with a
        // downward jump of the atom mass at each atom value.
        let mut mu_lo = None;
        for (j, t) in corners.iter().enumerate() {
            if above(t) <= half {
                if j == 0 {
                    mu_lo = Some(t.clone());
                } else {
                    let prev = &corners[j - 1];
                    let a_left = above(prev);
                    let a_tminus = above(t) + atom_mass(t); // left limit at t
                    if a_tminus > half {
                        // Only the jump at t reaches half.
                        mu_lo = Some(t.clone());
                    } else {
                        // Crossing inside [prev, t): solve the affine piece.
                        debug_assert!(a_left > half);
                        let slope =
                            (a_tminus.clone() - a_left.clone()) / (t.clone() - prev.clone());
                        let s = prev.clone() + (half.clone() - a_left) / slope;
                        mu_lo = Some(s);
                    }
                }
                break;
            }
        }
        let mu_lo = mu_lo.expect("above(max value) = 0 <= half");

        // mu_hi = max{t : ell{u < t} <= half}; `below` is non-decreasing and
        // left-continuous, jumping up by the atom mass just after each atom.
        let mut mu_hi = None;
        for (j, t) in corners.iter().enumerate().rev() {
            if below(t) <= half {
                if j + 1 == corners.len() {
                    mu_hi = Some(t.clone());
                } else {
                    let next = &corners[j + 1];
                    let b_tplus = below(t) + atom_mass(t); // right limit at t
                    let b_next = below(next);
                    if b_tplus > half {
                        mu_hi = Some(t.clone());
                    } else {
                        debug_assert!(b_next > half);
                        let slope =
                            (b_next.clone() - b_tplus.clone()) / (next.clone() - t.clone());
                        let s = t.clone() + (half.clone() - b_tplus) / slope;
                        mu_hi = Some(s);
                    }
                }
                break;
            }
        }
        let mu_hi = mu_hi.expect("below(min value) = 0 <= half");

        debug_assert!(mu_lo <= mu_hi);
        MedianSet { lo: mu_lo, hi: mu_hi }
    }

    /// Splits every segment at its zero crossing so the sign of `u` is
    /// constant on each refined segment; returns the refined function.
    pub fn refined_at_zeros(&self) -> Self {
        let mut edges = BTreeMap::new();
        for (id, p) in &self.edges {
            let mut bps = alloc::vec![p.breakpoints[0].clone()];
            let mut segs: Vec<(Rat, Rat)> = Vec::new();
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                let (x0, x1) = (&p.breakpoints[i], &p.breakpoints[i + 1]);
                if (vl.is_negative() && vr.is_positive())
                    || (vl.is_positive() && vr.is_negative())
                {
                    let dx = x1.clone() - x0.clone();
                    let cross =
                        x0.clone() - vl.clone() * dx / (vr.clone() - vl.clone());
                    bps.push(cross);
                    segs.push((vl.clone(), Rat::zero()));
                    bps.push(x1.clone());
                    segs.push((Rat::zero(), vr.clone()));
                } else {
                    bps.push(x1.clone());
                    segs.push((vl.clone(), vr.clone()));
                }
            }
            edges.insert(
                id.clone(),
                EdgePiecewise {
                    breakpoints: bps,
                    segments: segs,
                },
            );
        }
        PiecewiseFunction { edges }
    }

    /// Re-expresses the function on a finer breakpoint grid (must contain the
    /// current breakpoints of each edge).
    pub fn refine_to(&self, grids: &BTreeMap<String, Vec<Rat>>) -> Self {
        let mut edges = BTreeMap::new();
        for (id, p) in &self.edges {
            let grid = &grids[id];
            let mut bps = alloc::vec![p.breakpoints[0].clone()];
            let mut segs: Vec<(Rat, Rat)> = Vec::new();
            for (i, (vl, vr)) in p.segments.iter().enumerate() {
                let (x0, x1) = (&p.breakpoints[i], &p.breakpoints[i + 1]);
                let dx = x1.clone() - x0.clone();
                let slope = (vr.clone() - vl.clone()) / dx;
                let mut cursor = x0.clone();
                let mut val = vl.clone();
                for gx in grid.iter().filter(|g| *g > x0 && *g < x1) {
                    let nv = vl.clone() + slope.clone() * (gx.clone() - x0.clone());
                    bps.push(gx.clone());
                    segs.push((val.clone(), nv.clone()));
                    cursor = gx.clone();
                    val = nv;
                }
                let _ = cursor;
                bps.push(x1.clone());
                segs.push((val, vr.clone()));
            }
            edges.insert(
                id.clone(),
                EdgePiecewise {
                    breakpoints: bps,
                    segments: segs,
                },
            );
        }
        PiecewiseFunction { edges }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::rational::{rat, rat_int};
    use crate::subset::Arc;

    fn one_edge(len: i64) -> MetricGraph {
        build_graph(&["v1", "v2"], &[("e1", "v1", "v2", rat_int(len))]).unwrap()
    }

    fn interval(g: &MetricGraph, a: Rat, b: Rat) -> GraphSubset {
        GraphSubset::new(g, [("e1".into(), a, b)]).unwrap()
    }

    #[test]
    fn indicator_traces_and_integral() {
        let g = one_edge(6);
        let omega = interval(&g, rat_int(1), rat_int(5));
        let u = PiecewiseFunction::indicator(&g, &omega);
        assert_eq!(u.trace("e1", EdgeEnd::Tail), rat_int(0));
        assert_eq!(u.trace("e1", EdgeEnd::Head), rat_int(0));
        assert_eq!(u.integral(), rat_int(4));
        assert_eq!(u.l1_norm(), rat_int(4));
        assert_eq!(u.support(&g).length(), rat_int(4));
    }

    #[test]
    fn median_of_unbalanced_indicator_excludes_zero() {
        // ell(Omega) = 4 with total length 6: the median set is exactly {1}.
        let g = one_edge(6);
        let u = PiecewiseFunction::indicator(&g, &interval(&g, rat_int(1), rat_int(5)));
        let med = u.median(&g);
        assert_eq!(med, MedianSet { lo: rat_int(1), hi: rat_int(1) });
        assert!(!med.contains_zero());
    }

    #[test]
    fn median_of_balanced_two_sided_indicator() {
        let g = one_edge(6);
        let d = interval(&g, rat_int(0), rat_int(3));
        let u = PiecewiseFunction::scaled_indicator(&g, &d, &rat_int(1), &rat_int(-1));
        let med = u.median(&g);
        assert_eq!(med, MedianSet { lo: rat_int(-1), hi: rat_int(1) });
        assert!(med.contains_zero());
    }

    #[test]
    fn median_of_constant() {
        let g = one_edge(5);
        let u = PiecewiseFunction::constant(&g, &rat(7, 3));
        assert_eq!(u.median(&g), MedianSet { lo: rat(7, 3), hi: rat(7, 3) });
        assert!(u.is_constant());
    }

    #[test]
    fn median_of_sloped_function() {
        // u(x) = x on [0, 4]: median is 2.
        let g = one_edge(4);
        let u = PiecewiseFunction::from_edges(
            &g,
            [(
                "e1".into(),
                EdgePiecewise {
                    breakpoints: alloc::vec![rat_int(0), rat_int(4)],
                    segments: alloc::vec![(rat_int(0), rat_int(4))],
                },
            )]
            .into(),
        )
        .unwrap();
        assert_eq!(u.median(&g), MedianSet { lo: rat_int(2), hi: rat_int(2) });
    }

    #[test]
    fn superlevel_of_affine_ramp() {
        // u from 0 to 1 on an edge of length 4; {u > 1/4} = [1, 4].
        let g = one_edge(4);
        let u = PiecewiseFunction::from_edges(
            &g,
            [(
                "e1".into(),
                EdgePiecewise {
                    breakpoints: alloc::vec![rat_int(0), rat_int(4)],
                    segments: alloc::vec![(rat_int(0), rat_int(1))],
                },
            )]
            .into(),
        )
        .unwrap();
        let level = u.superlevel(&g, &rat(1, 4));
        assert_eq!(
            level.arcs_on("e1"),
            &[Arc { start: rat_int(1), end: rat_int(4) }]
        );
        assert!(u.superlevel(&g, &rat_int(1)).is_empty());
        assert!(u.superlevel(&g, &rat_int(2)).is_empty());
    }

    #[test]
    fn superlevel_of_indicator_recovers_the_set() {
        let g = one_edge(5);
        let e = interval(&g, rat_int(1), rat_int(3));
        let u = PiecewiseFunction::indicator(&g, &e);
        assert_eq!(u.superlevel(&g, &rat(1, 2)), e);
    }

    #[test]
    fn l1_distance_splits_zero_crossings() {
        // u(x) = x - 1 on [0, 2]: int |u| = 1/2 + 1/2 = 1.
        let g = one_edge(2);
        let u = PiecewiseFunction::from_edges(
            &g,
            [(
                "e1".into(),
                EdgePiecewise {
                    breakpoints: alloc::vec![rat_int(0), rat_int(2)],
                    segments: alloc::vec![(rat_int(-1), rat_int(1))],
                },
            )]
            .into(),
        )
        .unwrap();
        assert_eq!(u.l1_norm(), rat_int(1));
        assert_eq!(u.integral(), rat_int(0));
        let refined = u.refined_at_zeros();
        assert_eq!(refined.on_edge("e1").segments.len(), 2);
        assert_eq!(refined.l1_norm(), rat_int(1));
    }

    #[test]
    fn rejects_incomplete_or_bad_grids() {
        let g = build_graph(
            &["a", "b", "c"],
            &[("e1", "a", "b", rat_int(1)), ("e2", "b", "c", rat_int(1))],
        )
        .unwrap();
        let only_one: BTreeMap<String, EdgePiecewise> = [(
            "e1".into(),
            EdgePiecewise::constant(&rat_int(1), &rat_int(0)),
        )]
        .into();
        assert!(matches!(
            PiecewiseFunction::from_edges(&g, only_one),
            Err(FunctionError::MissingEdge(_))
        ));

        let bad: BTreeMap<String, EdgePiecewise> = [
            (
                "e1".into(),
                EdgePiecewise {
                    breakpoints: alloc::vec![rat_int(0), rat(1, 2)],
                    segments: alloc::vec![(rat_int(0), rat_int(0))],
                },
            ),
            (
                "e2".into(),
                EdgePiecewise::constant(&rat_int(1), &rat_int(0)),
            ),
        ]
        .into();
        assert!(matches!(
            PiecewiseFunction::from_edges(&g, bad),
            Err(FunctionError::BadBreakpoints(_))
        ));
    }
}
