//! Compact connected metric graphs: vertices, oriented edges with rational
//! lengths, incidence structure and vertex classification.
//!
//! Every edge is the interval `[0, len]` with coordinate 0 at the tail and
//! `len` at the head; that single convention fixes all trace and field signs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rational::Rat;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    DuplicateVertex(String),
    DuplicateEdge(String),
    LoopEdge(String),
    ParallelEdge(String, String),
    NonpositiveLength(String),
    UnknownVertex(String),
    UnknownEdge(String),
    Disconnected(String),
    Empty,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DuplicateVertex(v) => write!(f, "duplicate vertex id {v:?}"),
            GraphError::DuplicateEdge(e) => write!(f, "duplicate edge id {e:?}"),
            GraphError::LoopEdge(e) => write!(f, "edge {e:?} is a loop"),
            GraphError::ParallelEdge(a, b) => {
                write!(f, "edges {a:?} and {b:?} join the same vertex pair")
            }
            GraphError::NonpositiveLength(e) => write!(f, "edge {e:?} has nonpositive length"),
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex {v:?}"),
            GraphError::UnknownEdge(e) => write!(f, "unknown edge {e:?}"),
            GraphError::Disconnected(v) => {
                write!(f, "graph is disconnected: vertex {v:?} unreachable")
            }
            GraphError::Empty => write!(f, "graph has no edges"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Which end of an oriented edge a vertex sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeEnd {
    /// Coordinate 0 (the tail vertex).
    Tail,
    /// Coordinate `len` (the head vertex).
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    /// Degree 1.
    Boundary,
    /// Degree at least 2.
    Interior,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub length: Rat,
}

#[derive(Debug, Clone)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<String, usize>,
    /// Per vertex, incident (edge id, end) pairs, sorted by edge id.
    incidence: BTreeMap<String, Vec<(String, EdgeEnd)>>,
    total_length: Rat,
}

impl MetricGraph {
    /// Validates and builds a graph. Edges are stored sorted by id so every
    /// iteration over the structure is deterministic.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = String>,
        E: IntoIterator<Item = Edge>,
    {
        let mut vertex_list: Vec<String> = Vec::new();
        let mut seen = BTreeSet::new();
        for v in vertices {
            if !seen.insert(v.clone()) {
                return Err(GraphError::DuplicateVertex(v));
            }
            vertex_list.push(v);
        }
        vertex_list.sort();

        let mut edge_list: Vec<Edge> = edges.into_iter().collect();
        edge_list.sort_by(|a, b| a.id.cmp(&b.id));
        if edge_list.is_empty() {
            return Err(GraphError::Empty);
        }

        let mut edge_index = BTreeMap::new();
        let mut pairs: BTreeMap<(String, String), String> = BTreeMap::new();
        let mut incidence: BTreeMap<String, Vec<(String, EdgeEnd)>> = BTreeMap::new();
        for v in &vertex_list {
            incidence.insert(v.clone(), Vec::new());
        }
        for (i, e) in edge_list.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            if !seen.contains(&e.tail) {
                return Err(GraphError::UnknownVertex(e.tail.clone()));
            }
            if !seen.contains(&e.head) {
                return Err(GraphError::UnknownVertex(e.head.clone()));
            }
            if e.tail == e.head {
                return Err(GraphError::LoopEdge(e.id.clone()));
            }
            if e.length <= Rat::zero() {
                return Err(GraphError::NonpositiveLength(e.id.clone()));
            }
            let key = if e.tail < e.head {
                (e.tail.clone(), e.head.clone())
            } else {
                (e.head.clone(), e.tail.clone())
            };
            if let Some(other) = pairs.insert(key, e.id.clone()) {
                return Err(GraphError::ParallelEdge(other, e.id.clone()));
            }
            incidence
                .get_mut(&e.tail)
                .unwrap()
                .push((e.id.clone(), EdgeEnd::Tail));
            incidence
                .get_mut(&e.head)
                .unwrap()
                .push((e.id.clone(), EdgeEnd::Head));
        }
        for inc in incidence.values_mut() {
            inc.sort();
        }

        // Breadth-first reachability from the first vertex.
        if let Some(start) = vertex_list.first() {
            let mut reached = BTreeSet::new();
            let mut queue = alloc::collections::VecDeque::new();
            reached.insert(start.clone());
            queue.push_back(start.clone());
            while let Some(v) = queue.pop_front() {
                for (eid, end) in &incidence[&v] {
                    let e = &edge_list[edge_index[eid]];
                    let other = match end {
                        EdgeEnd::Tail => &e.head,
                        EdgeEnd::Head => &e.tail,
                    };
                    if reached.insert(other.clone()) {
                        queue.push_back(other.clone());
                    }
                }
            }
            for v in &vertex_list {
                if !reached.contains(v) {
                    return Err(GraphError::Disconnected(v.clone()));
                }
            }
        }

        let total_length = edge_list
            .iter()
            .fold(Rat::zero(), |acc, e| acc + e.length.clone());

        Ok(MetricGraph {
            vertices: vertex_list,
            edges: edge_list,
            edge_index,
            incidence,
            total_length,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Edges sorted by id.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: &str) -> Result<&Edge, GraphError> {
        self.edge_index
            .get(id)
            .map(|&i| &self.edges[i])
            .ok_or_else(|| GraphError::UnknownEdge(id.into()))
    }

    pub fn has_vertex(&self, id: &str) -> bool {
        self.incidence.contains_key(id)
    }

    /// Incident (edge id, end) pairs of a vertex, sorted by edge id.
    pub fn incident(&self, v: &str) -> Result<&[(String, EdgeEnd)], GraphError> {
        self.incidence
            .get(v)
            .map(|x| x.as_slice())
            .ok_or_else(|| GraphError::UnknownVertex(v.into()))
    }

    pub fn degree(&self, v: &str) -> Result<usize, GraphError> {
        Ok(self.incident(v)?.len())
    }

    pub fn classify_vertex(&self, v: &str) -> Result<(usize, VertexClass), GraphError> {
        let d = self.degree(v)?;
        let class = if d == 1 {
            VertexClass::Boundary
        } else {
            VertexClass::Interior
        };
        Ok((d, class))
    }

    /// Interior vertices (degree > 1), sorted.
    pub fn interior_vertices(&self) -> impl Iterator<Item = &String> {
        self.incidence
            .iter()
            .filter(|(_, inc)| inc.len() > 1)
            .map(|(v, _)| v)
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = &String> {
        self.incidence
            .iter()
            .filter(|(_, inc)| inc.len() == 1)
            .map(|(v, _)| v)
    }

    pub fn total_length(&self) -> &Rat {
        &self.total_length
    }

    /// The vertex sitting at the given end of an edge.
    pub fn end_vertex<'a>(&'a self, edge: &'a Edge, end: EdgeEnd) -> &'a str {
        match end {
            EdgeEnd::Tail => &edge.tail,
            EdgeEnd::Head => &edge.head,
        }
    }

    pub fn min_edge_length(&self) -> &Rat {
        self.edges
            .iter()
            .map(|e| &e.length)
            .min()
            .expect("graph has edges")
    }
}

/// Convenience builder used across tests and the CLI.
pub fn build_graph(
    vertices: &[&str],
    edges: &[(&str, &str, &str, Rat)],
) -> Result<MetricGraph, GraphError> {
    MetricGraph::new(
        vertices.iter().map(|v| String::from(*v)),
        edges.iter().map(|(id, tail, head, len)| Edge {
            id: String::from(*id),
            tail: String::from(*tail),
            head: String::from(*head),
            length: len.clone(),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn path_graph() -> MetricGraph {
        // The literal 3-edge path: v2 and v3 are degree-2 interior junctions.
        build_graph(
            &["v1", "v2", "v3", "v4"],
            &[
                ("e1", "v1", "v2", rat_int(2)),
                ("e2", "v2", "v3", rat_int(1)),
                ("e3", "v3", "v4", rat_int(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn valid_path_graph() {
        let g = path_graph();
        assert_eq!(g.total_length(), &rat_int(4));
        assert_eq!(g.classify_vertex("v2").unwrap(), (2, VertexClass::Interior));
        assert_eq!(g.classify_vertex("v1").unwrap(), (1, VertexClass::Boundary));
    }

    #[test]
    fn tripod_center_is_interior_of_degree_three() {
        let g = build_graph(
            &["v1", "v2", "v3", "v4"],
            &[
                ("e1", "v1", "v2", rat_int(1)),
                ("e2", "v2", "v3", rat_int(1)),
                ("e3", "v2", "v4", rat_int(1)),
            ],
        )
        .unwrap();
        assert_eq!(g.classify_vertex("v2").unwrap(), (3, VertexClass::Interior));
        assert_eq!(
            g.boundary_vertices().collect::<alloc::vec::Vec<_>>(),
            ["v1", "v3", "v4"]
        );
    }

    #[test]
    fn single_edge_has_two_boundary_vertices() {
        let g = build_graph(&["v1", "v2"], &[("e1", "v1", "v2", rat_int(5))]).unwrap();
        assert_eq!(g.total_length(), &rat_int(5));
        assert_eq!(g.boundary_vertices().count(), 2);
        assert_eq!(g.interior_vertices().count(), 0);
    }

    #[test]
    fn rejects_loops_parallels_and_bad_lengths() {
        let loop_edge = build_graph(&["a"], &[("e", "a", "a", rat_int(1))]);
        assert!(matches!(loop_edge, Err(GraphError::LoopEdge(_))));

        let parallel = build_graph(
            &["a", "b"],
            &[
                ("e1", "a", "b", rat_int(1)),
                ("e2", "b", "a", rat_int(2)),
            ],
        );
        assert!(matches!(parallel, Err(GraphError::ParallelEdge(_, _))));

        let zero_len = build_graph(&["a", "b"], &[("e", "a", "b", rat_int(0))]);
        assert!(matches!(zero_len, Err(GraphError::NonpositiveLength(_))));

        let neg_len = build_graph(&["a", "b"], &[("e", "a", "b", rat(-1, 2))]);
        assert!(matches!(neg_len, Err(GraphError::NonpositiveLength(_))));
    }

    #[test]
    fn rejects_disconnected_and_duplicates() {
        let disc = build_graph(
            &["a", "b", "c", "d"],
            &[
                ("e1", "a", "b", rat_int(1)),
                ("e2", "c", "d", rat_int(1)),
            ],
        );
        assert!(matches!(disc, Err(GraphError::Disconnected(_))));

        let dup_v = MetricGraph::new(
            ["a".into(), "a".into()],
            [Edge {
                id: "e".into(),
                tail: "a".into(),
                head: "b".into(),
                length: rat_int(1),
            }],
        );
        assert!(matches!(dup_v, Err(GraphError::DuplicateVertex(_))));

        let dup_e = build_graph(
            &["a", "b", "c"],
            &[
                ("e", "a", "b", rat_int(1)),
                ("e", "b", "c", rat_int(1)),
            ],
        );
        assert!(matches!(dup_e, Err(GraphError::DuplicateEdge(_))));

        let unknown = build_graph(&["a", "b"], &[("e", "a", "x", rat_int(1))]);
        assert!(matches!(unknown, Err(GraphError::UnknownVertex(_))));
    }

    #[test]
    fn total_length_is_exact_sum() {
        let g = build_graph(
            &["a", "b", "c"],
            &[
                ("e1", "a", "b", rat(1, 3)),
                ("e2", "b", "c", rat(1, 6)),
            ],
        )
        .unwrap();
        assert_eq!(g.total_length(), &rat(1, 2));
    }
}
