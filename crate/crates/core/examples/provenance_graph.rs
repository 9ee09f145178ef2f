//! Reads a graph as a function, compiles it to a causal model, and prints
//! both as DOT.

use causeway::corpus;
use causeway::frontend::{graph_to_dot, model_to_dot};
use causeway::provenance::{interpret_graph, to_causal_situation};

fn main() {
    let ws = corpus::workspace().expect("bundled files load");
    let graph = ws.graph("chain.json").unwrap();
    let interp = ws.interpretation("chain.interp").unwrap();

    let f = interpret_graph(graph, interp).unwrap();
    for x in interp.domain().elements() {
        println!("f({x}) = {}", f.apply(&[x]).unwrap());
    }

    let report = graph.validate(Some(interp));
    println!("{report}");

    let sit = to_causal_situation(graph, interp, true).unwrap();
    println!("{}", graph_to_dot(graph));
    println!("{}", model_to_dot(sit.model()));
}
