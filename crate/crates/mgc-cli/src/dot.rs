//! Graphviz emission: the graph as an undirected drawing with edge ids and
//! lengths, witness arcs highlighted on their edges.

use mgc_core::graph::MetricGraph;
use mgc_core::rational::format_rat;
use mgc_core::subset::GraphSubset;

pub fn to_dot(g: &MetricGraph, highlight: Option<&GraphSubset>) -> String {
    let mut out = String::from("graph {\n");
    out.push_str("  node [shape=circle fontsize=10];\n");
    for v in g.vertices() {
        out.push_str(&format!("  \"{v}\";\n"));
    }
    for e in g.edges() {
        let mut label = format!("{} (len {})", e.id, format_rat(&e.length));
        let mut attrs = String::new();
        if let Some(set) = highlight {
            let arcs = set.arcs_on(&e.id);
            if !arcs.is_empty() {
                let parts: Vec<String> = arcs
                    .iter()
                    .map(|a| format!("[{},{}]", format_rat(&a.start), format_rat(&a.end)))
                    .collect();
                label = format!("{label}\\ncut: {}", parts.join(" "));
                attrs = " color=red penwidth=2".to_string();
            }
        }
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [label=\"{label}\"{attrs}];\n",
            e.tail, e.head
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mgc_core::graph::build_graph;
    use mgc_core::rational::rat_int;

    #[test]
    fn highlights_witness_edges() {
        let g = build_graph(
            &["a", "b", "c"],
            &[("e1", "a", "b", rat_int(1)), ("e2", "b", "c", rat_int(2))],
        )
        .unwrap();
        let s = GraphSubset::new(&g, [("e2".to_string(), rat_int(0), rat_int(1))]).unwrap();
        let dot = to_dot(&g, Some(&s));
        assert!(dot.contains("color=red"));
        assert!(dot.contains("cut: [0,1]"));
        assert!(dot.contains("\"a\" -- \"b\""));
    }
}
