//! Measurable subsets of a metric graph, stored as canonical finite unions of
//! closed positive-length arcs: per edge sorted, pairwise disjoint, with
//! touching arcs merged. Null sets are not representable by design.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeEnd, MetricGraph};
use crate::rational::Rat;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetError {
    UnknownEdge(String),
    /// Arc endpoints must satisfy 0 <= from < to <= edge length.
    BadArc(String, String, String),
}

impl fmt::Display for SubsetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetError::UnknownEdge(e) => write!(f, "unknown edge {e:?}"),
            SubsetError::BadArc(e, a, b) => {
                write!(f, "bad arc [{a}, {b}] on edge {e:?}")
            }
        }
    }
}

impl core::error::Error for SubsetError {}

/// A closed arc `[start, end]` inside one edge's coordinate interval.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Arc {
    pub start: Rat,
    pub end: Rat,
}

impl Arc {
    pub fn length(&self) -> Rat {
        self.end.clone() - self.start.clone()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSubset {
    arcs: BTreeMap<String, Vec<Arc>>,
}

impl GraphSubset {
    pub fn empty() -> Self {
        GraphSubset {
            arcs: BTreeMap::new(),
        }
    }

    pub fn full(graph: &MetricGraph) -> Self {
        let mut arcs = BTreeMap::new();
        for e in graph.edges() {
            arcs.insert(
                e.id.clone(),
                alloc::vec![Arc {
                    start: Rat::zero(),
                    end: e.length.clone(),
                }],
            );
        }
        GraphSubset { arcs }
    }

    /// Builds a canonical subset from raw arcs, validating against the graph.
    /// Overlapping and touching arcs are merged; zero-length input arcs are
    /// rejected (null sets are not representable).
    pub fn new<I>(graph: &MetricGraph, raw: I) -> Result<Self, SubsetError>
    where
        I: IntoIterator<Item = (String, Rat, Rat)>,
    {
        let mut per_edge: BTreeMap<String, Vec<Arc>> = BTreeMap::new();
        for (edge, from, to) in raw {
            let e = graph
                .edge(&edge)
                .map_err(|_| SubsetError::UnknownEdge(edge.clone()))?;
            if from < Rat::zero() || to > e.length || from >= to {
                return Err(SubsetError::BadArc(
                    edge,
                    crate::rational::format_rat(&from),
                    crate::rational::format_rat(&to),
                ));
            }
            per_edge
                .entry(edge)
                .or_default()
                .push(Arc { start: from, end: to });
        }
        for arcs in per_edge.values_mut() {
            canonicalize(arcs);
        }
        Ok(GraphSubset { arcs: per_edge })
    }

    /// Canonical arcs on one edge (possibly empty).
    pub fn arcs_on(&self, edge: &str) -> &[Arc] {
        self.arcs.get(edge).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// All (edge id, arc) pairs in deterministic order.
    pub fn iter_arcs(&self) -> impl Iterator<Item = (&String, &Arc)> {
        self.arcs.iter().flat_map(|(e, arcs)| arcs.iter().map(move |a| (e, a)))
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.values().all(|v| v.is_empty())
    }

    pub fn is_full(&self, graph: &MetricGraph) -> bool {
        self.length() == *graph.total_length()
    }

    pub fn length(&self) -> Rat {
        let mut total = Rat::zero();
        for arcs in self.arcs.values() {
            for a in arcs {
                total += a.length();
            }
        }
        total
    }

    pub fn complement(&self, graph: &MetricGraph) -> GraphSubset {
        let mut arcs = BTreeMap::new();
        for e in graph.edges() {
            let mut out = Vec::new();
            let mut cursor = Rat::zero();
            for a in self.arcs_on(&e.id) {
                if a.start > cursor {
                    out.push(Arc {
                        start: cursor,
                        end: a.start.clone(),
                    });
                }
                cursor = a.end.clone();
            }
            if cursor < e.length {
                out.push(Arc {
                    start: cursor,
                    end: e.length.clone(),
                });
            }
            if !out.is_empty() {
                arcs.insert(e.id.clone(), out);
            }
        }
        GraphSubset { arcs }
    }

    pub fn intersect(&self, other: &GraphSubset) -> GraphSubset {
        let mut arcs = BTreeMap::new();
        for (edge, mine) in &self.arcs {
            let theirs = other.arcs_on(edge);
            let mut out = Vec::new();
            for a in mine {
                for b in theirs {
                    let start = a.start.clone().max(b.start.clone());
                    let end = a.end.clone().min(b.end.clone());
                    if start < end {
                        out.push(Arc { start, end });
                    }
                }
            }
            if !out.is_empty() {
                canonicalize(&mut out);
                arcs.insert(edge.clone(), out);
            }
        }
        GraphSubset { arcs }
    }

    pub fn union(&self, other: &GraphSubset) -> GraphSubset {
        let mut arcs = self.arcs.clone();
        for (edge, theirs) in &other.arcs {
            let entry = arcs.entry(edge.clone()).or_default();
            entry.extend(theirs.iter().cloned());
            canonicalize(entry);
        }
        GraphSubset { arcs }
    }

    pub fn is_subset_of(&self, other: &GraphSubset) -> bool {
        self.iter_arcs().all(|(edge, a)| {
            other
                .arcs_on(edge)
                .iter()
                .any(|b| b.start <= a.start && a.end <= b.end)
        })
    }

    /// 1 iff an arc abuts the given end of the edge.
    pub fn trace(&self, graph: &MetricGraph, edge: &str, end: EdgeEnd) -> bool {
        let arcs = self.arcs_on(edge);
        match end {
            EdgeEnd::Tail => arcs.first().map(|a| a.start.is_zero()).unwrap_or(false),
            EdgeEnd::Head => {
                let len = &graph.edge(edge).expect("valid edge").length;
                arcs.last().map(|a| &a.end == len).unwrap_or(false)
            }
        }
    }

    /// Per interior vertex, the number of incident edge-ends with trace 1.
    pub fn vertex_trace_counts(&self, graph: &MetricGraph) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for v in graph.interior_vertices() {
            let k = graph
                .incident(v)
                .expect("valid vertex")
                .iter()
                .filter(|(e, end)| self.trace(graph, e, *end))
                .count();
            counts.insert(v.clone(), k);
        }
        counts
    }

    /// Arc endpoints strictly inside edge interiors, in deterministic order.
    pub fn interior_cuts(&self, graph: &MetricGraph) -> Vec<(String, Rat)> {
        let mut cuts = Vec::new();
        for (edge, arcs) in &self.arcs {
            let len = &graph.edge(edge).expect("valid edge").length;
            for a in arcs {
                if !a.start.is_zero() {
                    cuts.push((edge.clone(), a.start.clone()));
                }
                if &a.end != len {
                    cuts.push((edge.clone(), a.end.clone()));
                }
            }
        }
        cuts
    }
}

/// Sorts, merges overlapping and touching arcs.
fn canonicalize(arcs: &mut Vec<Arc>) {
    arcs.sort();
    let mut out: Vec<Arc> = Vec::with_capacity(arcs.len());
    for a in arcs.drain(..) {
        match out.last_mut() {
            Some(last) if a.start <= last.end => {
                if a.end > last.end {
                    last.end = a.end;
                }
            }
            _ => out.push(a),
        }
    }
    *arcs = out;
}
