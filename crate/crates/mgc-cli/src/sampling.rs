//! Randomized constructions used by the sampling commands and the acceptance
//! suite: feasible dual fields from LP extreme points, random regions, and
//! random small graphs.

use std::collections::BTreeMap;

use crate::rng::XorShift;
use mgc_core::duality::{dual_extreme_field, DualityError};
use mgc_core::field::VectorFieldZ;
use mgc_core::graph::{build_graph, MetricGraph};
use mgc_core::rational::{rat, rat_int, Rat};
use mgc_core::subset::GraphSubset;
use num_traits::Zero;

/// Extreme points of the dual feasible set under a relaxed norm box, found by
/// minimizing random +-1/+-2 objectives. All are Kirchhoff with slope 1 on
/// the region arcs.
pub fn random_feasible_duals(
    g: &MetricGraph,
    omega: &GraphSubset,
    bound: &Rat,
    count: usize,
    rng: &mut XorShift,
) -> Result<Vec<VectorFieldZ>, DualityError> {
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut obj = |_: usize| rat(rng.range_i64(-2, 2), 1);
        if let Some(f) = dual_extreme_field(g, omega, bound, &mut obj)? {
            fields.push(f);
        }
    }
    Ok(fields)
}

/// Convex combination of fields sharing a node grid, with random positive
/// rational weights.
pub fn convex_combination(
    g: &MetricGraph,
    fields: &[VectorFieldZ],
    rng: &mut XorShift,
) -> VectorFieldZ {
    assert!(!fields.is_empty());
    let weights: Vec<Rat> = (0..fields.len())
        .map(|_| rat(rng.range_i64(1, 5), 1))
        .collect();
    let total: Rat = weights.iter().fold(Rat::zero(), |a, w| a + w.clone());
    let mut nodes: BTreeMap<String, Vec<(Rat, Rat)>> = BTreeMap::new();
    for (eid, base) in fields[0].edges() {
        let mut combined: Vec<(Rat, Rat)> = base
            .iter()
            .map(|(x, _)| (x.clone(), Rat::zero()))
            .collect();
        for (f, w) in fields.iter().zip(&weights) {
            for (slot, (_, z)) in combined.iter_mut().zip(f.nodes_on(eid)) {
                slot.1 += w.clone() * z.clone() / total.clone();
            }
        }
        nodes.insert(eid.clone(), combined);
    }
    VectorFieldZ::from_nodes(g, nodes).expect("combination preserves grids")
}

/// Random nonempty canonical subset of a region, from its quarter grid.
pub fn random_subregion(
    g: &MetricGraph,
    omega: &GraphSubset,
    rng: &mut XorShift,
) -> GraphSubset {
    loop {
        let mut raw: Vec<(String, Rat, Rat)> = Vec::new();
        for (eid, a) in omega.iter_arcs() {
            if rng.chance(1, 3) {
                continue;
            }
            let len = a.length();
            let quarters: i64 = num_traits::ToPrimitive::to_i64(
                &(len.clone() * rat_int(4)).to_integer(),
            )
            .unwrap_or(4)
            .max(1);
            let lo = rng.range_i64(0, quarters - 1);
            let hi = rng.range_i64(lo + 1, quarters);
            let from = a.start.clone() + rat(lo, 4).min(len.clone());
            let to = a.start.clone() + rat(hi, 4).min(len);
            if from < to {
                raw.push((eid.clone(), from, to));
            }
        }
        if let Ok(s) = GraphSubset::new(g, raw) {
            if !s.is_empty() {
                return s;
            }
        }
    }
}

/// Connected random graph with up to `max_edges` edges and half-integer
/// lengths in [1/2, 4]: a random tree plus occasionally one chord.
pub fn random_graph(rng: &mut XorShift, max_edges: usize) -> MetricGraph {
    let n_edges = 1 + rng.below(max_edges as u64) as usize;
    let names: Vec<String> = (1..=n_edges + 1).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(String, String, String, Rat)> = Vec::new();
    for i in 1..=n_edges {
        let parent = rng.below(i as u64) as usize;
        edges.push((
            format!("e{i}"),
            names[parent].clone(),
            names[i].clone(),
            rat(rng.range_i64(1, 8), 2),
        ));
    }
    if n_edges >= 3 && rng.chance(2, 5) {
        for _ in 0..8 {
            let i = rng.below(names.len() as u64) as usize;
            let j = rng.below(names.len() as u64) as usize;
            if i == j {
                continue;
            }
            let dup = edges.iter().any(|(_, a, b, _)| {
                (a == &names[i] && b == &names[j]) || (a == &names[j] && b == &names[i])
            });
            if dup {
                continue;
            }
            edges.push((
                format!("e{}", n_edges + 1),
                names[i].clone(),
                names[j].clone(),
                rat(rng.range_i64(1, 8), 2),
            ));
            break;
        }
    }
    let vrefs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let erefs: Vec<(&str, &str, &str, Rat)> = edges
        .iter()
        .map(|(id, a, b, l)| (id.as_str(), a.as_str(), b.as_str(), l.clone()))
        .collect();
    build_graph(&vrefs, &erefs).expect("generator yields valid graphs")
}

/// Random proper nonempty region with quarter-grid arcs.
pub fn random_region(g: &MetricGraph, rng: &mut XorShift) -> GraphSubset {
    loop {
        let mut raw: Vec<(String, Rat, Rat)> = Vec::new();
        for e in g.edges() {
            let quarters: i64 = num_traits::ToPrimitive::to_i64(
                &(e.length.clone() * rat_int(4)).to_integer(),
            )
            .unwrap();
            for _ in 0..rng.below(3) {
                let a = rng.range_i64(0, quarters - 1);
                let b = rng.range_i64(a + 1, quarters);
                raw.push((e.id.clone(), rat(a, 4), rat(b, 4)));
            }
        }
        if let Ok(s) = GraphSubset::new(g, raw) {
            if !s.is_empty() && !s.is_full(g) {
                return s;
            }
        }
    }
}
