//! Continuous piecewise-affine vector fields on a metric graph, the dual
//! objects pairing against BV functions. The signed end value of an edge is
//! `z(len)` at the head and `-z(0)` at the tail; a field is Kirchhoff when
//! those signed values sum to zero at every vertex.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{EdgeEnd, MetricGraph};
use crate::rational::Rat;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    UnknownEdge(String),
    MissingEdge(String),
    BadNodes(String),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::UnknownEdge(e) => write!(f, "unknown edge {e:?}"),
            FieldError::MissingEdge(e) => write!(f, "no field data for edge {e:?}"),
            FieldError::BadNodes(e) => write!(f, "bad field nodes on edge {e:?}"),
        }
    }
}

impl core::error::Error for FieldError {}

/// Per edge, nodes `(x, z(x))` with `0 = x_0 < ... < x_n = len`; the field is
/// affine between consecutive nodes and continuous along the closed edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorFieldZ {
    edges: BTreeMap<String, Vec<(Rat, Rat)>>,
}

impl VectorFieldZ {
    pub fn from_nodes(
        graph: &MetricGraph,
        edges: BTreeMap<String, Vec<(Rat, Rat)>>,
    ) -> Result<Self, FieldError> {
        for id in edges.keys() {
            graph
                .edge(id)
                .map_err(|_| FieldError::UnknownEdge(id.clone()))?;
        }
        for e in graph.edges() {
            let nodes = edges
                .get(&e.id)
                .ok_or_else(|| FieldError::MissingEdge(e.id.clone()))?;
            let ok = nodes.len() >= 2
                && nodes[0].0.is_zero()
                && nodes.last().unwrap().0 == e.length
                && nodes.windows(2).all(|w| w[0].0 < w[1].0);
            if !ok {
                return Err(FieldError::BadNodes(e.id.clone()));
            }
        }
        Ok(VectorFieldZ { edges })
    }

    pub fn zero(graph: &MetricGraph) -> Self {
        let edges = graph
            .edges()
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    alloc::vec![(Rat::zero(), Rat::zero()), (e.length.clone(), Rat::zero())],
                )
            })
            .collect();
        VectorFieldZ { edges }
    }

    pub fn nodes_on(&self, edge: &str) -> &[(Rat, Rat)] {
        &self.edges[edge]
    }

    pub fn edges(&self) -> impl Iterator<Item = (&String, &Vec<(Rat, Rat)>)> {
        self.edges.iter()
    }

    pub fn value_at(&self, edge: &str, x: &Rat) -> Rat {
        let nodes = &self.edges[edge];
        for w in nodes.windows(2) {
            let (x0, z0) = &w[0];
            let (x1, z1) = &w[1];
            if x >= x0 && x <= x1 {
                if x == x0 {
                    return z0.clone();
                }
                return z0.clone()
                    + (z1.clone() - z0.clone()) * (x.clone() - x0.clone())
                        / (x1.clone() - x0.clone());
            }
        }
        panic!("coordinate out of range on edge {edge}");
    }

    /// Signed end value `[z]_e(v)`: `z(len)` at the head, `-z(0)` at the tail.
    pub fn signed_end_value(&self, edge: &str, end: EdgeEnd) -> Rat {
        let nodes = &self.edges[edge];
        match end {
            EdgeEnd::Tail => -nodes.first().unwrap().1.clone(),
            EdgeEnd::Head => nodes.last().unwrap().1.clone(),
        }
    }

    /// Sum of signed end values at a vertex.
    pub fn kirchhoff_sum(&self, graph: &MetricGraph, v: &str) -> Rat {
        graph
            .incident(v)
            .expect("valid vertex")
            .iter()
            .fold(Rat::zero(), |acc, (e, end)| {
                acc + self.signed_end_value(e, *end)
            })
    }

    pub fn is_kirchhoff(&self, graph: &MetricGraph) -> bool {
        graph
            .vertices()
            .iter()
            .all(|v| self.kirchhoff_sum(graph, v).is_zero())
    }

    /// Sup norm; affine pieces attain extrema at nodes.
    pub fn sup_norm(&self) -> Rat {
        let mut best = Rat::zero();
        for nodes in self.edges.values() {
            for (_, z) in nodes {
                let a = z.clone().abs();
                if a > best {
                    best = a;
                }
            }
        }
        best
    }

    /// Constant slopes per affine piece: `(x0, x1, slope)` in order.
    pub fn slopes_on(&self, edge: &str) -> Vec<(Rat, Rat, Rat)> {
        self.edges[edge]
            .windows(2)
            .map(|w| {
                let (x0, z0) = &w[0];
                let (x1, z1) = &w[1];
                (
                    x0.clone(),
                    x1.clone(),
                    (z1.clone() - z0.clone()) / (x1.clone() - x0.clone()),
                )
            })
            .collect()
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|(id, nodes)| {
                (
                    id.clone(),
                    nodes
                        .iter()
                        .map(|(x, z)| (x.clone(), z.clone() * factor.clone()))
                        .collect(),
                )
            })
            .collect();
        VectorFieldZ { edges }
    }
}
