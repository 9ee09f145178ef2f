//! Runs the OPM inference rules on each bundled graph and audits the result
//! against actual causation.

use causeway::corpus;
use causeway::opm::{audit, base_facts, datalog_closure};

fn main() {
    let ws = corpus::workspace().expect("bundled files load");
    for (g, i) in corpus::GRAPHS {
        let graph = ws.graph(g).unwrap();
        let closure = datalog_closure(&base_facts(graph));
        let report = audit(graph, ws.interpretation(i).unwrap(), 3).unwrap();
        println!(
            "{g}: {} facts, {} sound, {} unsound, {} missed",
            closure.len(),
            report.sound().len(),
            report.unsound().len(),
            report.missed().len()
        );
        for f in report.unsound() {
            println!("  unsound {f}");
        }
    }
}
