//! Graphviz rendering. Artifacts are ellipses and processes are boxes;
//! edges follow the flow of data.

use std::fmt::Write;

use crate::model::CausalModel;
use crate::provenance::ProvenanceGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n"))
}

pub fn graph_to_dot(g: &ProvenanceGraph) -> String {
    let mut s = String::from("digraph provenance {\n  rankdir=LR;\n");
    for a in g.artifacts() {
        let style = if g.is_input(&a.id) {
            ", style=bold"
        } else if a.id == g.result() {
            ", peripheries=2"
        } else {
            ""
        };
        writeln!(s, "  {} [shape=ellipse, label={}{style}];", quote(&a.id), quote(&format!("{}\n{}", a.id, a.value))).unwrap();
    }
    for p in g.processes() {
        writeln!(s, "  {} [shape=box, label={}];", quote(&p.id), quote(&format!("{}\n{}", p.id, p.name))).unwrap();
    }
    for e in g.used_edges() {
        writeln!(s, "  {} -> {} [label=\"{}\"];", quote(&e.artifact), quote(&e.process), e.position).unwrap();
    }
    for e in g.generated_edges() {
        writeln!(s, "  {} -> {};", quote(&e.process), quote(&e.artifact)).unwrap();
    }
    s.push_str("}\n");
    s
}

/// The syntactic dependency graph, with exogenous variables dashed.
pub fn model_to_dot(m: &CausalModel) -> String {
    let mut s = String::from("digraph model {\n  rankdir=LR;\n");
    for v in m.variables() {
        let style = if m.is_exogenous(v) { "shape=ellipse, style=dashed" } else { "shape=ellipse" };
        writeln!(s, "  {} [{style}];", quote(v)).unwrap();
    }
    for (from, to) in m.syntactic_graph().edges() {
        writeln!(s, "  {} -> {};", quote(from), quote(to)).unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_model;

    #[test]
    fn model_edges_and_styles() {
        let m = parse_model("domain bool\nexo U\nvar A := U\nvar B := not(A)\n").unwrap();
        let d = model_to_dot(&m);
        assert!(d.contains("\"U\" [shape=ellipse, style=dashed];"));
        assert!(d.contains("\"A\" -> \"B\";"));
        assert!(d.contains("\"U\" -> \"A\";"));
    }
}
