use std::collections::BTreeSet;

use causeway::corpus;
use causeway::frontend::{parse_graph, parse_interpretation};
use causeway::opm::{audit, base_facts, datalog_closure, EdgeFact, Relation};
use causeway::provenance::ProvenanceGraph;
use proptest::prelude::*;

fn transitive(edges: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    let mut out = edges.clone();
    loop {
        let next: BTreeSet<_> = out
            .iter()
            .flat_map(|(a, b)| out.iter().filter(move |(c, _)| c == b).map(move |(_, d)| (a.clone(), d.clone())))
            .collect();
        let before = out.len();
        out.extend(next);
        if out.len() == before {
            return out;
        }
    }
}

/// The closure computed straight from the graph's edges.
fn expected_closure(g: &ProvenanceGraph) -> BTreeSet<EdgeFact> {
    let used: BTreeSet<(String, String)> =
        g.used_edges().iter().map(|e| (e.process.clone(), e.artifact.clone())).collect();
    let gen: BTreeSet<(String, String)> =
        g.generated_edges().iter().map(|e| (e.artifact.clone(), e.process.clone())).collect();
    let derived: BTreeSet<(String, String)> = gen
        .iter()
        .flat_map(|(a, p)| used.iter().filter(move |(q, _)| q == p).map(move |(_, b)| (a.clone(), b.clone())))
        .collect();
    let triggered: BTreeSet<(String, String)> = used
        .iter()
        .flat_map(|(p, a)| gen.iter().filter(move |(b, _)| b == a).map(move |(_, q)| (p.clone(), q.clone())))
        .collect();
    let mut out = BTreeSet::new();
    for (rel, set) in [
        (Relation::Used, used),
        (Relation::WasGeneratedBy, gen),
        (Relation::WasDerivedFromPlus, transitive(&derived)),
        (Relation::WasTriggeredByPlus, transitive(&triggered)),
        (Relation::WasDerivedFrom, derived),
        (Relation::WasTriggeredBy, triggered),
    ] {
        out.extend(set.into_iter().map(|(s, o)| EdgeFact::new(rel, s, o)));
    }
    out
}

#[test]
fn corpus_closures_match_the_edge_reading() {
    let ws = corpus::workspace().unwrap();
    for (g, _) in corpus::GRAPHS {
        let g = ws.graph(g).unwrap();
        let closure = datalog_closure(&base_facts(g));
        assert!(closure.is_closed() && closure.derivations_replay());
        assert_eq!(closure.fact_set(), expected_closure(g));
        assert_eq!(datalog_closure(&closure), closure);
    }
}

#[test]
fn only_graphs_with_constant_steps_are_unsound() {
    let ws = corpus::workspace().unwrap();
    for (g, i) in corpus::GRAPHS {
        let report = audit(ws.graph(g).unwrap(), ws.interpretation(i).unwrap(), 3).unwrap();
        assert!(report.is_complete(), "{g}");
        let constant_step = matches!(*g, "vacuous.json" | "pow0.json");
        assert_eq!(report.is_sound(), !constant_step, "{g}");
        if *g == "pow0.json" {
            assert!(report.unsound().contains(&&EdgeFact::new(Relation::Used, "power", "s")));
            assert!(report.sound().contains(&&EdgeFact::new(Relation::WasGeneratedBy, "r", "power")));
        }
    }
}

const XOR: &str = "domain bool\nfn neg(a) := not(a)\nfn mix(a, b) := xor(a, b)\n";

/// A tree of `neg` and `mix` processes: every artifact is used at most once
/// and the last generated artifact is the result.
fn arb_tree() -> impl Strategy<Value = String> {
    (
        2usize..4,
        proptest::collection::vec(any::<bool>(), 3),
        proptest::collection::vec((any::<bool>(), any::<prop::sample::Index>(), any::<prop::sample::Index>()), 1..4),
    )
        .prop_map(|(n_in, bits, steps)| {
            let mut artifacts: Vec<(String, bool)> = (0..n_in).map(|i| (format!("a{i}"), bits[i])).collect();
            let mut pool: Vec<usize> = (0..n_in).collect();
            let mut processes = Vec::new();
            for (k, (binary, i, j)) in steps.into_iter().enumerate() {
                let first = pool.remove(i.index(pool.len()));
                let mut args = vec![first];
                if binary && !pool.is_empty() {
                    args.push(pool.remove(j.index(pool.len())));
                }
                let value = if args.len() == 2 {
                    artifacts[args[0]].1 ^ artifacts[args[1]].1
                } else {
                    !artifacts[args[0]].1
                };
                let out = artifacts.len();
                artifacts.push((format!("b{k}"), value));
                let uses: Vec<String> =
                    args.iter().enumerate().map(|(n, &a)| format!("[\"{}\", {}]", artifacts[a].0, n + 1)).collect();
                let name = if args.len() == 2 { "mix" } else { "neg" };
                processes.push(format!(
                    "{{\"id\": \"p{k}\", \"name\": \"{name}\", \"uses\": [{}], \"generates\": \"{}\"}}",
                    uses.join(", "),
                    artifacts[out].0
                ));
                pool.push(out);
            }
            let arts: Vec<String> =
                artifacts.iter().map(|(id, v)| format!("{{\"id\": \"{id}\", \"value\": {}}}", *v as u8)).collect();
            let inputs: Vec<String> = (0..n_in).map(|i| format!("\"a{i}\"")).collect();
            format!(
                "{{\"artifacts\": [{}], \"processes\": [{}], \"inputs\": [{}], \"result\": \"{}\"}}",
                arts.join(", "),
                processes.join(", "),
                inputs.join(", "),
                artifacts.last().unwrap().0
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closure_matches_the_edge_reading(text in arb_tree()) {
        let g = parse_graph(&text).unwrap();
        let closure = datalog_closure(&base_facts(&g));
        prop_assert!(closure.is_closed());
        prop_assert_eq!(closure.fact_set(), expected_closure(&g));
    }

    #[test]
    fn trees_of_injective_steps_audit_clean(text in arb_tree()) {
        let g = parse_graph(&text).unwrap();
        let interp = parse_interpretation(XOR).unwrap();
        prop_assert!(g.validate(Some(&interp)).is_valid());
        let report = audit(&g, &interp, 3).unwrap();
        prop_assert!(report.is_complete(), "{}", text);
        prop_assert!(report.is_sound(), "{}", text);
    }
}
