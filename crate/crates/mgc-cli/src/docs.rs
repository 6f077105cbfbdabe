//! JSON document formats and their conversions into core types.
//!
//! Rationals travel as strings ("p/q" or "p") and are also accepted as JSON
//! integers. All emission goes through the canonical reduced form, so
//! identical inputs always produce byte-identical outputs.

use std::collections::BTreeMap;
use std::fmt;

use mgc_core::field::VectorFieldZ;
use mgc_core::function::{EdgePiecewise, PiecewiseFunction};
use mgc_core::graph::{Edge, GraphError, MetricGraph};
use mgc_core::rational::{format_rat, parse_rat, Rat};
use mgc_core::subset::{GraphSubset, SubsetError};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug)]
pub enum DocError {
    Malformed(String),
    Graph(GraphError),
    Subset(SubsetError),
    Function(String),
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocError::Malformed(what) => write!(f, "malformed document: {what}"),
            DocError::Graph(e) => write!(f, "invalid graph: {e}"),
            DocError::Subset(e) => write!(f, "invalid subset: {e}"),
            DocError::Function(what) => write!(f, "invalid function: {what}"),
        }
    }
}

impl std::error::Error for DocError {}

impl From<GraphError> for DocError {
    fn from(e: GraphError) -> Self {
        DocError::Graph(e)
    }
}

impl From<SubsetError> for DocError {
    fn from(e: SubsetError) -> Self {
        DocError::Subset(e)
    }
}

/// A rational in transit: string "p/q" on output, string or integer on input.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RatDoc(pub Rat);

impl Serialize for RatDoc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(&self.0))
    }
}

impl<'de> Deserialize<'de> for RatDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        let raw = Raw::deserialize(d)?;
        let r = match raw {
            Raw::Int(i) => Rat::from_integer(i.into()),
            Raw::Str(s) => parse_rat(&s).map_err(D::Error::custom)?,
        };
        Ok(RatDoc(r))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: RatDoc,
}

pub fn parse_graph(text: &str) -> Result<MetricGraph, DocError> {
    let doc: GraphDoc =
        serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
    let graph = MetricGraph::new(
        doc.vertices,
        doc.edges.into_iter().map(|e| Edge {
            id: e.id,
            tail: e.from,
            head: e.to,
            length: e.length.0,
        }),
    )?;
    Ok(graph)
}

pub fn graph_to_doc(g: &MetricGraph) -> GraphDoc {
    GraphDoc {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.clone(),
                from: e.tail.clone(),
                to: e.head.clone(),
                length: RatDoc(e.length.clone()),
            })
            .collect(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ArcDoc {
    pub edge: String,
    pub from: RatDoc,
    pub to: RatDoc,
}

pub fn parse_subset(graph: &MetricGraph, text: &str) -> Result<GraphSubset, DocError> {
    let arcs: Vec<ArcDoc> =
        serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
    let s = GraphSubset::new(
        graph,
        arcs.into_iter().map(|a| (a.edge, a.from.0, a.to.0)),
    )?;
    Ok(s)
}

pub fn subset_to_doc(s: &GraphSubset) -> Vec<ArcDoc> {
    s.iter_arcs()
        .map(|(edge, a)| ArcDoc {
            edge: edge.clone(),
            from: RatDoc(a.start.clone()),
            to: RatDoc(a.end.clone()),
        })
        .collect()
}

/// Value at a breakpoint: a plain rational when continuous, or split
/// one-sided limits.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueDoc {
    Plain(RatDoc),
    Split { left: RatDoc, right: RatDoc },
}

impl ValueDoc {
    fn left(&self) -> Rat {
        match self {
            ValueDoc::Plain(r) => r.0.clone(),
            ValueDoc::Split { left, .. } => left.0.clone(),
        }
    }

    fn right(&self) -> Rat {
        match self {
            ValueDoc::Plain(r) => r.0.clone(),
            ValueDoc::Split { right, .. } => right.0.clone(),
        }
    }
}

/// Per edge: breakpoint grid and one value per breakpoint (optionally split
/// into left/right limits at interior breakpoints).
#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeFunctionDoc {
    pub breakpoints: Vec<RatDoc>,
    pub values: Vec<ValueDoc>,
}

pub type FunctionDoc = BTreeMap<String, EdgeFunctionDoc>;

pub fn parse_function(graph: &MetricGraph, text: &str) -> Result<PiecewiseFunction, DocError> {
    let doc: FunctionDoc =
        serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
    let mut edges = BTreeMap::new();
    for (eid, ef) in doc {
        if ef.values.len() != ef.breakpoints.len() {
            return Err(DocError::Function(format!(
                "edge {eid:?}: {} breakpoints but {} values",
                ef.breakpoints.len(),
                ef.values.len()
            )));
        }
        let breakpoints: Vec<Rat> = ef.breakpoints.iter().map(|r| r.0.clone()).collect();
        let segments = (0..breakpoints.len().saturating_sub(1))
            .map(|i| (ef.values[i].right(), ef.values[i + 1].left()))
            .collect();
        edges.insert(
            eid,
            EdgePiecewise {
                breakpoints,
                segments,
            },
        );
    }
    PiecewiseFunction::from_edges(graph, edges).map_err(|e| DocError::Function(e.to_string()))
}

pub fn function_to_doc(u: &PiecewiseFunction) -> FunctionDoc {
    let mut out = BTreeMap::new();
    for (eid, p) in u.edges() {
        let n = p.breakpoints.len();
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let left = if i > 0 { Some(&p.segments[i - 1].1) } else { None };
            let right = if i < n - 1 { Some(&p.segments[i].0) } else { None };
            let v = match (left, right) {
                (Some(l), Some(r)) if l != r => ValueDoc::Split {
                    left: RatDoc(l.clone()),
                    right: RatDoc(r.clone()),
                },
                (Some(l), _) => ValueDoc::Plain(RatDoc(l.clone())),
                (None, Some(r)) => ValueDoc::Plain(RatDoc(r.clone())),
                (None, None) => unreachable!("edge with no segments"),
            };
            values.push(v);
        }
        out.insert(
            eid.clone(),
            EdgeFunctionDoc {
                breakpoints: p.breakpoints.iter().map(|b| RatDoc(b.clone())).collect(),
                values,
            },
        );
    }
    out
}

/// Per edge: continuous node list [[x, z], ...].
pub type FieldDoc = BTreeMap<String, Vec<(RatDoc, RatDoc)>>;

pub fn parse_field(graph: &MetricGraph, text: &str) -> Result<VectorFieldZ, DocError> {
    let doc: FieldDoc =
        serde_json::from_str(text).map_err(|e| DocError::Malformed(e.to_string()))?;
    let nodes = doc
        .into_iter()
        .map(|(eid, ns)| (eid, ns.into_iter().map(|(x, z)| (x.0, z.0)).collect()))
        .collect();
    VectorFieldZ::from_nodes(graph, nodes).map_err(|e| DocError::Function(e.to_string()))
}

pub fn field_to_doc(z: &VectorFieldZ) -> FieldDoc {
    z.edges()
        .map(|(eid, nodes)| {
            (
                eid.clone(),
                nodes
                    .iter()
                    .map(|(x, v)| (RatDoc(x.clone()), RatDoc(v.clone())))
                    .collect(),
            )
        })
        .collect()
}
