//! Randomized instance generators shared by the oracle test suites.

use mgc_core::graph::{build_graph, MetricGraph};
use mgc_core::rational::{rat, rat_int, Rat};
use mgc_core::function::{EdgePiecewise, PiecewiseFunction};
use mgc_core::field::VectorFieldZ;
use mgc_core::subset::GraphSubset;
use rand::Rng;
use std::collections::BTreeMap;

/// Connected graph with 1..=max_edges edges (tree plus at most one chord),
/// lengths in {1/2, 1, 3/2, ..., 4}.
pub fn random_graph<R: Rng>(rng: &mut R, max_edges: usize) -> MetricGraph {
    let n_edges = rng.gen_range(1..=max_edges);
    let names: Vec<String> = (1..=n_edges + 1).map(|i| format!("v{i}")).collect();
    let mut edges: Vec<(String, String, String, Rat)> = Vec::new();
    for i in 1..=n_edges {
        // Tree edge from a random earlier vertex to vertex i.
        let parent = rng.gen_range(0..i);
        let len = rat(rng.gen_range(1..=8), 2);
        edges.push((
            format!("e{i}"),
            names[parent].clone(),
            names[i].clone(),
            len,
        ));
    }
    // Occasionally close a cycle with a non-parallel chord.
    if n_edges >= 3 && rng.gen_bool(0.4) {
        let existing: Vec<(String, String)> = edges
            .iter()
            .map(|(_, a, b, _)| {
                if a < b {
                    (a.clone(), b.clone())
                } else {
                    (b.clone(), a.clone())
                }
            })
            .collect();
        for _ in 0..8 {
            let i = rng.gen_range(0..names.len());
            let j = rng.gen_range(0..names.len());
            if i == j {
                continue;
            }
            let key = if names[i] < names[j] {
                (names[i].clone(), names[j].clone())
            } else {
                (names[j].clone(), names[i].clone())
            };
            if existing.contains(&key) {
                continue;
            }
            let len = rat(rng.gen_range(1..=8), 2);
            edges.push((
                format!("e{}", n_edges + 1),
                names[i].clone(),
                names[j].clone(),
                len,
            ));
            break;
        }
    }
    let vertex_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let edge_refs: Vec<(&str, &str, &str, Rat)> = edges
        .iter()
        .map(|(id, a, b, l)| (id.as_str(), a.as_str(), b.as_str(), l.clone()))
        .collect();
    build_graph(&vertex_refs, &edge_refs).expect("generator yields valid graphs")
}

/// Random canonical subset with arc endpoints on the quarter grid; possibly
/// empty, never full.
pub fn random_subset<R: Rng>(rng: &mut R, g: &MetricGraph) -> GraphSubset {
    loop {
        let mut raw: Vec<(String, Rat, Rat)> = Vec::new();
        for e in g.edges() {
            let quarters = (e.length.clone() * rat_int(4)).to_integer();
            let q: i64 = num_traits::ToPrimitive::to_i64(&quarters).unwrap();
            for _ in 0..rng.gen_range(0..=2) {
                let a = rng.gen_range(0..q);
                let b = rng.gen_range(a + 1..=q);
                raw.push((e.id.clone(), rat(a, 4), rat(b, 4)));
            }
        }
        let s = GraphSubset::new(g, raw).unwrap();
        if !s.is_full(g) {
            return s;
        }
    }
}

pub fn random_nonempty_subset<R: Rng>(rng: &mut R, g: &MetricGraph) -> GraphSubset {
    loop {
        let s = random_subset(rng, g);
        if !s.is_empty() {
            return s;
        }
    }
}

fn small_value<R: Rng>(rng: &mut R) -> Rat {
    rat(rng.gen_range(-8..=8), rng.gen_range(1..=3))
}

/// Random piecewise-affine function with up to two interior breakpoints per
/// edge and independent one-sided values (jumps allowed).
pub fn random_function<R: Rng>(rng: &mut R, g: &MetricGraph) -> PiecewiseFunction {
    let mut edges = BTreeMap::new();
    for e in g.edges() {
        let quarters = (e.length.clone() * rat_int(4)).to_integer();
        let q: i64 = num_traits::ToPrimitive::to_i64(&quarters).unwrap();
        let mut cuts: Vec<i64> = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            let c = rng.gen_range(1..q);
            if !cuts.contains(&c) {
                cuts.push(c);
            }
        }
        cuts.sort();
        let mut bps = vec![Rat::from_integer(0.into())];
        bps.extend(cuts.iter().map(|c| rat(*c, 4)));
        bps.push(e.length.clone());
        let segments = (0..bps.len() - 1)
            .map(|_| (small_value(rng), small_value(rng)))
            .collect();
        edges.insert(
            e.id.clone(),
            EdgePiecewise {
                breakpoints: bps,
                segments,
            },
        );
    }
    PiecewiseFunction::from_edges(g, edges).unwrap()
}

/// Random Kirchhoff field: free node values, then per vertex one designated
/// incident end absorbs the imbalance (each edge end belongs to exactly one
/// vertex, so there are no conflicts). Degree-1 vertices force zero.
pub fn random_kirchhoff_field<R: Rng>(rng: &mut R, g: &MetricGraph) -> VectorFieldZ {
    let mut nodes: BTreeMap<String, Vec<(Rat, Rat)>> = BTreeMap::new();
    for e in g.edges() {
        let quarters = (e.length.clone() * rat_int(4)).to_integer();
        let q: i64 = num_traits::ToPrimitive::to_i64(&quarters).unwrap();
        let mut xs: Vec<i64> = vec![0, q];
        for _ in 0..rng.gen_range(0..=2) {
            let c = rng.gen_range(1..q);
            if !xs.contains(&c) {
                xs.push(c);
            }
        }
        xs.sort();
        nodes.insert(
            e.id.clone(),
            xs.iter().map(|x| (rat(*x, 4), small_value(rng))).collect(),
        );
    }
    // Repair pass: zero the Kirchhoff sum at every vertex through its first
    // incident end.
    for v in g.vertices() {
        let incident = g.incident(v).unwrap();
        let mut sum = Rat::from_integer(0.into());
        for (eid, end) in incident.iter().skip(1) {
            let vec = &nodes[eid];
            let val = match end {
                mgc_core::graph::EdgeEnd::Tail => -vec.first().unwrap().1.clone(),
                mgc_core::graph::EdgeEnd::Head => vec.last().unwrap().1.clone(),
            };
            sum += val;
        }
        let (eid, end) = &incident[0];
        let vec = nodes.get_mut(eid).unwrap();
        match end {
            // signed value must equal -sum: tail carries -z(0), so z(0) = sum.
            mgc_core::graph::EdgeEnd::Tail => vec.first_mut().unwrap().1 = sum,
            mgc_core::graph::EdgeEnd::Head => vec.last_mut().unwrap().1 = -sum,
        }
    }
    VectorFieldZ::from_nodes(g, nodes).unwrap()
}
