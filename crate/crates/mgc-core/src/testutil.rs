//! Shared fixtures for unit tests: the running example instances.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::field::VectorFieldZ;
use crate::graph::{build_graph, MetricGraph};
use crate::rational::{rat, rat_int, Rat};
use crate::subset::GraphSubset;

/// Single edge v1 -> v2 of the given length.
pub fn one_edge(len: i64) -> MetricGraph {
    build_graph(&["v1", "v2"], &[("e1", "v1", "v2", rat_int(len))]).unwrap()
}

/// The "is not calibrable" instance: tripod with center v2 and leg lengths
/// 2, 1, 1 (the figure's geometry behind the 24/11 and 16/9 values).
pub fn four_vertex_tripod() -> MetricGraph {
    build_graph(
        &["v1", "v2", "v3", "v4"],
        &[
            ("e1", "v1", "v2", rat_int(2)),
            ("e2", "v2", "v3", rat_int(1)),
            ("e3", "v2", "v4", rat_int(1)),
        ],
    )
    .unwrap()
}

/// Equilateral tripod with legs of length `l`, center v2.
pub fn equilateral_tripod(l: i64) -> MetricGraph {
    build_graph(
        &["v1", "v2", "v3", "v4"],
        &[
            ("e1", "v1", "v2", rat_int(l)),
            ("e2", "v2", "v3", rat_int(l)),
            ("e3", "v2", "v4", rat_int(l)),
        ],
    )
    .unwrap()
}

/// Ball of radius 5/8 around coordinate 3/2 on e1 of the 4-vertex tripod.
pub fn ball_five_eighths(g: &MetricGraph) -> GraphSubset {
    GraphSubset::new(
        g,
        [
            (String::from("e1"), rat(7, 8), rat_int(2)),
            (String::from("e2"), rat_int(0), rat(1, 8)),
            (String::from("e3"), rat_int(0), rat(1, 8)),
        ],
    )
    .unwrap()
}

/// The corrected explicit field certifying the equilateral-tripod cut:
/// z = -x/L on the cut edge, z = x/(2L) - 1/2 on the other two legs.
pub fn tripod_cut_field(graph: &MetricGraph, l: i64) -> VectorFieldZ {
    VectorFieldZ::from_nodes(
        graph,
        BTreeMap::from([
            (
                String::from("e1"),
                alloc::vec![(rat_int(0), rat_int(0)), (rat_int(l), rat_int(-1))],
            ),
            (
                String::from("e2"),
                alloc::vec![(rat_int(0), rat(-1, 2)), (rat_int(l), rat_int(0))],
            ),
            (
                String::from("e3"),
                alloc::vec![(rat_int(0), rat(-1, 2)), (rat_int(l), rat_int(0))],
            ),
        ]),
    )
    .unwrap()
}

/// Interval subset on a single-edge graph.
pub fn interval(g: &MetricGraph, a: Rat, b: Rat) -> GraphSubset {
    GraphSubset::new(g, [(String::from("e1"), a, b)]).unwrap()
}
