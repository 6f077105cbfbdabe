//! The jump-aware measures of the BV calculus: perimeter, total variation,
//! the vertex jump term, and the exact coarea and Green identities.
//!
//! The vertex contribution to total variation is the median penalty
//! `min_t sum_e |trace_e - t|`, the linear-programming dual of maximizing
//! `sum_e z_e * trace_e` over balanced `z` with `|z_e| <= 1`; for indicator
//! traces it reduces to `min(k, d - k)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::field::VectorFieldZ;
use crate::function::PiecewiseFunction;
use crate::graph::MetricGraph;
use crate::rational::Rat;
use crate::subset::GraphSubset;
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeasureError {
    /// The field passed to the Green pairing is not Kirchhoff.
    NotKirchhoff(String),
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::NotKirchhoff(v) => {
                write!(f, "field violates the Kirchhoff condition at vertex {v:?}")
            }
        }
    }
}

impl core::error::Error for MeasureError {}

/// `min_t sum_i |x_i - t|`, attained at any median of the multiset.
pub fn median_penalty(values: &[Rat]) -> Rat {
    if values.is_empty() {
        return Rat::zero();
    }
    let mut sorted: Vec<&Rat> = values.iter().collect();
    sorted.sort();
    let m = sorted[(sorted.len() - 1) / 2];
    sorted
        .iter()
        .fold(Rat::zero(), |acc, x| acc + ((*x).clone() - m.clone()).abs())
}

/// Perimeter of a canonical subset: interior cut points plus the per-vertex
/// penalty `min(k, d - k)` at interior vertices.
pub fn perimeter(graph: &MetricGraph, set: &GraphSubset) -> Rat {
    let cuts = set.interior_cuts(graph).len();
    let mut total = Rat::from_integer((cuts as i64).into());
    for (v, k) in set.vertex_trace_counts(graph) {
        let d = graph.degree(&v).expect("valid vertex");
        let m = k.min(d - k) as i64;
        total += Rat::from_integer(m.into());
    }
    total
}

/// Edge-interior variation `|Du|(Gamma)`: absolutely continuous variation of
/// each affine piece plus interior jump magnitudes. Vertex traces are not
/// part of it.
pub fn du_total(u: &PiecewiseFunction) -> Rat {
    let mut total = Rat::zero();
    for (_, p) in u.edges() {
        for (i, (vl, vr)) in p.segments.iter().enumerate() {
            total += (vr.clone() - vl.clone()).abs();
            if i > 0 {
                total += (vl.clone() - p.segments[i - 1].1.clone()).abs();
            }
        }
    }
    total
}

/// Degree-weighted pairwise trace jumps at interior vertices (both ordered
/// pairs counted).
pub fn jump_variation(graph: &MetricGraph, u: &PiecewiseFunction) -> Rat {
    let mut total = Rat::zero();
    for v in graph.interior_vertices() {
        let traces = u.vertex_traces(graph, v);
        let d = traces.len() as i64;
        let mut vertex = Rat::zero();
        for a in &traces {
            for b in &traces {
                vertex += (a.clone() - b.clone()).abs();
            }
        }
        total += vertex / Rat::from_integer(d.into());
    }
    total
}

/// Jump-aware total variation: `|Du|` plus the median penalty of the trace
/// multiset at every interior vertex.
pub fn total_variation(graph: &MetricGraph, u: &PiecewiseFunction) -> Rat {
    let mut total = du_total(u);
    for v in graph.interior_vertices() {
        total += median_penalty(&u.vertex_traces(graph, v));
    }
    total
}

/// `|TV(u) - int Per(E_t(u)) dt|`, with the level integral computed exactly:
/// the perimeter of the superlevel set is constant between consecutive
/// one-sided segment endpoint values.
pub fn coarea_residual(graph: &MetricGraph, u: &PiecewiseFunction) -> Rat {
    let tv = total_variation(graph, u);
    let levels = u.level_breakpoints();
    let two = Rat::from_integer(2.into());
    let mut integral = Rat::zero();
    for w in levels.windows(2) {
        let mid = (w[0].clone() + w[1].clone()) / two.clone();
        let per = perimeter(graph, &u.superlevel(graph, &mid));
        integral += per * (w[1].clone() - w[0].clone());
    }
    (tv - integral).abs()
}

/// `|int z Du + int u z' - sum_v sum_e [z]_e(v) [u]_e(v)|` over interior
/// vertices, each term exact. Errors when `z` is not Kirchhoff.
pub fn green_residual(
    graph: &MetricGraph,
    z: &VectorFieldZ,
    u: &PiecewiseFunction,
) -> Result<Rat, MeasureError> {
    for v in graph.vertices() {
        if !z.kirchhoff_sum(graph, v).is_zero() {
            return Err(MeasureError::NotKirchhoff(v.clone()));
        }
    }

    let two = Rat::from_integer(2.into());
    let mut z_du = Rat::zero();
    let mut u_zprime = Rat::zero();

    for e in graph.edges() {
        let p = u.on_edge(&e.id);
        // Atoms of Du at interior breakpoints of u, paired with z there.
        for i in 1..p.segments.len() {
            let jump = p.segments[i].0.clone() - p.segments[i - 1].1.clone();
            if !jump.is_zero() {
                z_du += z.value_at(&e.id, &p.breakpoints[i]) * jump;
            }
        }
        // Refined grid holding both z's nodes and u's breakpoints.
        let mut grid: Vec<Rat> = p.breakpoints.clone();
        grid.extend(z.nodes_on(&e.id).iter().map(|(x, _)| x.clone()));
        grid.sort();
        grid.dedup();
        for w in grid.windows(2) {
            let (x0, x1) = (&w[0], &w[1]);
            let dx = x1.clone() - x0.clone();
            let z0 = z.value_at(&e.id, x0);
            let z1 = z.value_at(&e.id, x1);
            // u restricted to (x0, x1) is affine inside one u-segment.
            let (u0, u1) = affine_u_on(p, x0, x1);
            let u_slope = (u1.clone() - u0.clone()) / dx.clone();
            let z_slope = (z1.clone() - z0.clone()) / dx.clone();
            // int z * u' over the piece: u' constant, z affine.
            z_du += u_slope * (z0.clone() + z1.clone()) / two.clone() * dx.clone();
            // int u * z' over the piece: z' constant, u affine.
            u_zprime += z_slope * (u0 + u1) / two.clone() * dx;
        }
    }

    let mut boundary = Rat::zero();
    for v in graph.interior_vertices() {
        for (eid, end) in graph.incident(v).expect("valid vertex") {
            boundary += z.signed_end_value(eid, *end) * u.trace(eid, *end);
        }
    }

    Ok((z_du + u_zprime - boundary).abs())
}

/// One-sided values of `u` at the ends of `(x0, x1)`, a piece of a single
/// `u`-segment.
fn affine_u_on(p: &crate::function::EdgePiecewise, x0: &Rat, x1: &Rat) -> (Rat, Rat) {
    for (i, (vl, vr)) in p.segments.iter().enumerate() {
        let (s0, s1) = (&p.breakpoints[i], &p.breakpoints[i + 1]);
        if x0 >= s0 && x1 <= s1 {
            let dx = s1.clone() - s0.clone();
            let slope = (vr.clone() - vl.clone()) / dx;
            let u0 = vl.clone() + slope.clone() * (x0.clone() - s0.clone());
            let u1 = vl.clone() + slope * (x1.clone() - s0.clone());
            return (u0, u1);
        }
    }
    panic!("piece not contained in any segment");
}
