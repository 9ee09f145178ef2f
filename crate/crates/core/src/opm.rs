//! OPM edge inference: the Datalog completion rules, the edge meanings
//! induced by actual causation, and an audit comparing the two.
//!
//! The rules are
//!
//! ```text
//! x wasDerivedFrom y   :- x wasGeneratedBy p, p used y
//! p wasTriggeredBy q   :- p used x, x wasGeneratedBy q
//! x wasDerivedFrom+ y  :- x wasDerivedFrom y
//! x wasDerivedFrom+ y  :- x wasDerivedFrom z, z wasDerivedFrom+ y
//! p wasTriggeredBy+ q  :- p wasTriggeredBy q
//! p wasTriggeredBy+ q  :- p wasTriggeredBy r, r wasTriggeredBy+ q
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::cause::{cause_parts, CausalSituation, CauseError};
use crate::provenance::{to_causal_situation, CompileError, Interpretation, NodeKind, ProvenanceGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Used,
    WasGeneratedBy,
    WasDerivedFrom,
    WasTriggeredBy,
    WasDerivedFromPlus,
    WasTriggeredByPlus,
}

impl Relation {
    pub const ALL: [Relation; 6] = [
        Relation::Used,
        Relation::WasGeneratedBy,
        Relation::WasDerivedFrom,
        Relation::WasTriggeredBy,
        Relation::WasDerivedFromPlus,
        Relation::WasTriggeredByPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Used => "used",
            Relation::WasGeneratedBy => "wasGeneratedBy",
            Relation::WasDerivedFrom => "wasDerivedFrom",
            Relation::WasTriggeredBy => "wasTriggeredBy",
            Relation::WasDerivedFromPlus => "wasDerivedFrom+",
            Relation::WasTriggeredByPlus => "wasTriggeredBy+",
        }
    }

    /// Node kinds of (subject, object).
    pub fn signature(self) -> (NodeKind, NodeKind) {
        use NodeKind::*;
        match self {
            Relation::Used => (Process, Artifact),
            Relation::WasGeneratedBy => (Artifact, Process),
            Relation::WasDerivedFrom | Relation::WasDerivedFromPlus => (Artifact, Artifact),
            Relation::WasTriggeredBy | Relation::WasTriggeredByPlus => (Process, Process),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeFact {
    pub relation: Relation,
    pub subject: String,
    pub object: String,
}

impl EdgeFact {
    pub fn new(relation: Relation, subject: impl Into<String>, object: impl Into<String>) -> EdgeFact {
        EdgeFact {
            relation,
            subject: subject.into(),
            object: object.into(),
        }
    }
}

impl fmt::Display for EdgeFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.relation, self.subject, self.object)
    }
}

impl Serialize for EdgeFact {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    DerivedFrom,
    TriggeredBy,
    DerivedFromPlusBase,
    DerivedFromPlusStep,
    TriggeredByPlusBase,
    TriggeredByPlusStep,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::DerivedFrom,
        Rule::TriggeredBy,
        Rule::DerivedFromPlusBase,
        Rule::DerivedFromPlusStep,
        Rule::TriggeredByPlusBase,
        Rule::TriggeredByPlusStep,
    ];

    pub fn head(self) -> Relation {
        match self {
            Rule::DerivedFrom => Relation::WasDerivedFrom,
            Rule::TriggeredBy => Relation::WasTriggeredBy,
            Rule::DerivedFromPlusBase | Rule::DerivedFromPlusStep => Relation::WasDerivedFromPlus,
            Rule::TriggeredByPlusBase | Rule::TriggeredByPlusStep => Relation::WasTriggeredByPlus,
        }
    }

    /// Body relations: a copy rule has one, a join rule two sharing the
    /// middle variable.
    pub fn body(self) -> &'static [Relation] {
        use Relation::*;
        match self {
            Rule::DerivedFrom => &[WasGeneratedBy, Used],
            Rule::TriggeredBy => &[Used, WasGeneratedBy],
            Rule::DerivedFromPlusBase => &[WasDerivedFrom],
            Rule::DerivedFromPlusStep => &[WasDerivedFrom, WasDerivedFromPlus],
            Rule::TriggeredByPlusBase => &[WasTriggeredBy],
            Rule::TriggeredByPlusStep => &[WasTriggeredBy, WasTriggeredByPlus],
        }
    }
}

/// How a fact entered a [`FactBase`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Derivation {
    Base,
    Rule { rule: Rule, premises: Vec<EdgeFact> },
}

/// Facts with the first derivation found for each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactBase {
    facts: BTreeMap<EdgeFact, Derivation>,
}

type Index = BTreeMap<(Relation, String), BTreeSet<String>>;

impl FactBase {
    pub fn new() -> FactBase {
        FactBase::default()
    }

    /// Adds a base fact; returns false if it was already present.
    pub fn insert(&mut self, fact: EdgeFact) -> bool {
        if self.facts.contains_key(&fact) {
            return false;
        }
        self.facts.insert(fact, Derivation::Base);
        true
    }

    pub fn contains(&self, fact: &EdgeFact) -> bool {
        self.facts.contains_key(fact)
    }

    pub fn derivation(&self, fact: &EdgeFact) -> Option<&Derivation> {
        self.facts.get(fact)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn facts(&self) -> impl Iterator<Item = &EdgeFact> {
        self.facts.keys()
    }

    pub fn relation(&self, r: Relation) -> impl Iterator<Item = &EdgeFact> {
        self.facts.keys().filter(move |f| f.relation == r)
    }

    pub fn fact_set(&self) -> BTreeSet<EdgeFact> {
        self.facts.keys().cloned().collect()
    }

    /// One fact per line, `relation(subject, object)`, sorted as text.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.facts.keys().map(ToString::to_string).collect();
        lines.sort();
        lines.iter().map(|l| format!("{l}\n")).collect()
    }

    /// Every single rule application over the current facts, whether or not
    /// its head is already present.
    pub fn immediate_consequences(&self) -> BTreeSet<(EdgeFact, Rule, Vec<EdgeFact>)> {
        let all: BTreeSet<&EdgeFact> = self.facts.keys().collect();
        let mut out = BTreeSet::new();
        for rule in Rule::ALL {
            fire(rule, &all, &all, &index(&all), &mut |head, premises| {
                out.insert((head, rule, premises));
            });
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.immediate_consequences().iter().all(|(f, _, _)| self.contains(f))
    }

    /// Checks that every derived fact's recorded premises are present and
    /// actually yield it under the recorded rule.
    pub fn derivations_replay(&self) -> bool {
        self.facts.iter().all(|(fact, d)| match d {
            Derivation::Base => true,
            Derivation::Rule { rule, premises } => {
                premises.iter().all(|p| self.contains(p))
                    && premises.iter().map(|p| p.relation).eq(rule.body().iter().copied())
                    && rule.head() == fact.relation
                    && match premises.as_slice() {
                        [p] => p.subject == fact.subject && p.object == fact.object,
                        [l, r] => l.subject == fact.subject && l.object == r.subject && r.object == fact.object,
                        _ => false,
                    }
            }
        })
    }

    /// Least fixpoint of the rules over `self`, by semi-naive iteration.
    pub fn closure(&self) -> FactBase {
        let mut out = self.clone();
        let mut delta: BTreeSet<EdgeFact> = self.facts.keys().cloned().collect();
        while !delta.is_empty() {
            let all: BTreeSet<&EdgeFact> = out.facts.keys().collect();
            let delta_refs: BTreeSet<&EdgeFact> = delta.iter().collect();
            let idx = index(&all);
            let mut fresh: BTreeMap<EdgeFact, Derivation> = BTreeMap::new();
            for rule in Rule::ALL {
                fire(rule, &delta_refs, &all, &idx, &mut |head, premises| {
                    if !out.facts.contains_key(&head) {
                        fresh.entry(head).or_insert(Derivation::Rule { rule, premises });
                    }
                });
            }
            delta = fresh.keys().cloned().collect();
            out.facts.extend(fresh);
        }
        out
    }
}

fn index(facts: &BTreeSet<&EdgeFact>) -> Index {
    let mut idx: Index = BTreeMap::new();
    for f in facts {
        idx.entry((f.relation, f.subject.clone())).or_default().insert(f.object.clone());
    }
    idx
}

/// Applies `rule` with at least one premise drawn from `delta`.
fn fire(
    rule: Rule,
    delta: &BTreeSet<&EdgeFact>,
    all: &BTreeSet<&EdgeFact>,
    idx: &Index,
    emit: &mut dyn FnMut(EdgeFact, Vec<EdgeFact>),
) {
    let head = rule.head();
    match *rule.body() {
        [only] => {
            for f in delta.iter().filter(|f| f.relation == only) {
                emit(EdgeFact::new(head, &f.subject, &f.object), vec![(*f).clone()]);
            }
        }
        [left, right] => {
            // left premise new, right premise anywhere
            for l in delta.iter().filter(|f| f.relation == left) {
                if let Some(objs) = idx.get(&(right, l.object.clone())) {
                    for o in objs {
                        let r = EdgeFact::new(right, &l.object, o);
                        emit(EdgeFact::new(head, &l.subject, o), vec![(*l).clone(), r]);
                    }
                }
            }
            // right premise new, left premise anywhere
            for r in delta.iter().filter(|f| f.relation == right) {
                for l in all.iter().filter(|f| f.relation == left && f.object == r.subject) {
                    emit(EdgeFact::new(head, &l.subject, &r.object), vec![(*l).clone(), (*r).clone()]);
                }
            }
        }
        _ => unreachable!("rules have one or two premises"),
    }
}

/// The `used` and `wasGeneratedBy` facts of a graph, one per edge.
pub fn base_facts(g: &ProvenanceGraph) -> FactBase {
    let mut base = FactBase::new();
    for e in g.used_edges() {
        base.insert(EdgeFact::new(Relation::Used, &e.process, &e.artifact));
    }
    for e in g.generated_edges() {
        base.insert(EdgeFact::new(Relation::WasGeneratedBy, &e.artifact, &e.process));
    }
    base
}

pub fn datalog_closure(base: &FactBase) -> FactBase {
    base.closure()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OpmError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Cause(#[from] CauseError),
    #[error("situation was not compiled from this graph: node `{0}` is not an endogenous variable")]
    SituationMismatch(String),
}

/// For every graph node `b`, the nodes `a ≠ b` whose value is part of an
/// actual cause of `b`'s value.
pub fn part_of_cause_map(
    sit: &CausalSituation,
    g: &ProvenanceGraph,
    max_cause_size: usize,
) -> Result<BTreeMap<String, BTreeSet<String>>, OpmError> {
    let nodes: Vec<&str> = g.node_ids().collect();
    if let Some(bad) = nodes.iter().find(|n| !sit.model().is_endogenous(n)) {
        return Err(OpmError::SituationMismatch(bad.to_string()));
    }
    let graph_nodes: BTreeSet<&str> = nodes.iter().copied().collect();
    nodes
        .par_iter()
        .map(|b| {
            let parts = cause_parts(sit, b, max_cause_size)?;
            let parts = parts.into_iter().filter(|a| graph_nodes.contains(a.as_str())).collect();
            Ok((b.to_string(), parts))
        })
        .collect()
}

/// Edge relations read off actual causation in `sit`, which must be the
/// compiled situation of `g` with proxied inputs.
///
/// With `pc(a, b)` meaning "`a`'s value is part of an actual cause of `b`'s
/// value", an edge from `b` to `a` holds when `pc(a, b)` and no node `m`
/// other than `a` and `b` has `pc(a, m)` and `pc(m, b)`. For the derived
/// relations `m` ranges over artifacts (`wasDerivedFrom`) or processes
/// (`wasTriggeredBy`); the `+` relations drop the betweenness condition.
pub fn semantic_edges(sit: &CausalSituation, g: &ProvenanceGraph, max_cause_size: usize) -> Result<FactBase, OpmError> {
    let pc = part_of_cause_map(sit, g, max_cause_size)?;
    Ok(semantic_from_map(g, &pc))
}

fn semantic_from_map(g: &ProvenanceGraph, pc: &BTreeMap<String, BTreeSet<String>>) -> FactBase {
    let causes = |a: &str, b: &str| pc.get(b).is_some_and(|s| s.contains(a));
    let artifacts: Vec<&str> = g.artifacts().iter().map(|a| a.id.as_str()).collect();
    let processes: Vec<&str> = g.processes().iter().map(|p| p.id.as_str()).collect();
    let all: Vec<&str> = g.node_ids().collect();
    let immediate = |a: &str, b: &str, between: &[&str]| {
        causes(a, b) && !between.iter().any(|m| *m != a && *m != b && causes(a, m) && causes(m, b))
    };
    let mut out = FactBase::new();
    for &p in &processes {
        for &x in &artifacts {
            if immediate(x, p, &all) {
                out.insert(EdgeFact::new(Relation::Used, p, x));
            }
            if immediate(p, x, &all) {
                out.insert(EdgeFact::new(Relation::WasGeneratedBy, x, p));
            }
        }
    }
    for &x in &artifacts {
        for &y in &artifacts {
            if x != y && causes(y, x) {
                out.insert(EdgeFact::new(Relation::WasDerivedFromPlus, x, y));
                if immediate(y, x, &artifacts) {
                    out.insert(EdgeFact::new(Relation::WasDerivedFrom, x, y));
                }
            }
        }
    }
    for &p in &processes {
        for &q in &processes {
            if p != q && causes(q, p) {
                out.insert(EdgeFact::new(Relation::WasTriggeredByPlus, p, q));
                if immediate(q, p, &processes) {
                    out.insert(EdgeFact::new(Relation::WasTriggeredBy, p, q));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RelationAudit {
    pub sound: BTreeSet<EdgeFact>,
    pub unsound: BTreeSet<EdgeFact>,
    pub missed: BTreeSet<EdgeFact>,
}

/// Datalog-derived edges checked against the causal meaning of each edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub relations: BTreeMap<Relation, RelationAudit>,
    /// Pairs on which `wasDerivedFrom+` (unconstrained part-of-cause between
    /// artifacts) differs from the transitive closure of `wasDerivedFrom`.
    pub closure_counterexamples: Vec<ClosureMismatch>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureMismatch {
    pub subject: String,
    pub object: String,
    pub in_closure: bool,
    pub in_plus: bool,
}

impl AuditReport {
    pub fn compare(syntactic: &FactBase, semantic: &FactBase) -> AuditReport {
        let mut relations = BTreeMap::new();
        for r in Relation::ALL {
            let syn: BTreeSet<EdgeFact> = syntactic.relation(r).cloned().collect();
            let sem: BTreeSet<EdgeFact> = semantic.relation(r).cloned().collect();
            relations.insert(
                r,
                RelationAudit {
                    sound: syn.intersection(&sem).cloned().collect(),
                    unsound: syn.difference(&sem).cloned().collect(),
                    missed: sem.difference(&syn).cloned().collect(),
                },
            );
        }
        AuditReport {
            relations,
            closure_counterexamples: closure_mismatches(semantic),
        }
    }

    fn collect(&self, pick: impl Fn(&RelationAudit) -> &BTreeSet<EdgeFact>) -> Vec<&EdgeFact> {
        let mut out: Vec<&EdgeFact> = self.relations.values().flat_map(|a| pick(a).iter()).collect();
        out.sort_by_key(|f| f.to_string());
        out
    }

    pub fn sound(&self) -> Vec<&EdgeFact> {
        self.collect(|a| &a.sound)
    }

    pub fn unsound(&self) -> Vec<&EdgeFact> {
        self.collect(|a| &a.unsound)
    }

    pub fn missed(&self) -> Vec<&EdgeFact> {
        self.collect(|a| &a.missed)
    }

    pub fn is_sound(&self) -> bool {
        self.relations.values().all(|a| a.unsound.is_empty())
    }

    pub fn is_complete(&self) -> bool {
        self.relations.values().all(|a| a.missed.is_empty())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            sound: Vec<&'a EdgeFact>,
            unsound: Vec<&'a EdgeFact>,
            missed: Vec<&'a EdgeFact>,
            closure_counterexamples: &'a [ClosureMismatch],
        }
        serde_json::to_string_pretty(&Out {
            sound: self.sound(),
            unsound: self.unsound(),
            missed: self.missed(),
            closure_counterexamples: &self.closure_counterexamples,
        })
        .expect("report serializes")
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (title, facts) in [("SOUND", self.sound()), ("UNSOUND", self.unsound()), ("MISSED", self.missed())] {
            writeln!(f, "{title} ({})", facts.len())?;
            for fact in facts {
                writeln!(f, "  {fact}")?;
            }
        }
        if !self.closure_counterexamples.is_empty() {
            writeln!(f, "CLOSURE MISMATCHES ({})", self.closure_counterexamples.len())?;
            for m in &self.closure_counterexamples {
                let side = if m.in_closure {
                    "in closure of wasDerivedFrom only"
                } else {
                    "in wasDerivedFrom+ only"
                };
                writeln!(f, "  ({}, {}): {side}", m.subject, m.object)?;
            }
        }
        Ok(())
    }
}

fn closure_mismatches(semantic: &FactBase) -> Vec<ClosureMismatch> {
    let mut succ: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for f in semantic.relation(Relation::WasDerivedFrom) {
        succ.entry(&f.subject).or_default().insert(&f.object);
    }
    let mut closure = BTreeSet::new();
    for &start in succ.keys() {
        let mut stack: Vec<&str> = succ[start].iter().copied().collect();
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                closure.insert((start.to_string(), n.to_string()));
                if let Some(next) = succ.get(n) {
                    stack.extend(next.iter().copied());
                }
            }
        }
    }
    let plus: BTreeSet<(String, String)> = semantic
        .relation(Relation::WasDerivedFromPlus)
        .map(|f| (f.subject.clone(), f.object.clone()))
        .collect();
    closure
        .symmetric_difference(&plus)
        .map(|(s, o)| ClosureMismatch {
            subject: s.clone(),
            object: o.clone(),
            in_closure: closure.contains(&(s.clone(), o.clone())),
            in_plus: plus.contains(&(s.clone(), o.clone())),
        })
        .collect()
}

/// Compiles `g` with proxied inputs and compares its Datalog closure with
/// its semantic edges.
pub fn audit(g: &ProvenanceGraph, interp: &Interpretation, max_cause_size: usize) -> Result<AuditReport, OpmError> {
    let sit = to_causal_situation(g, interp, true)?;
    let syntactic = datalog_closure(&base_facts(g));
    let semantic = semantic_edges(&sit, g, max_cause_size)?;
    Ok(AuditReport::compare(&syntactic, &semantic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Domain, Expr, Op, Value};
    use crate::provenance::{Artifact, GeneratedEdge, Process, UsedEdge};

    fn fact(r: Relation, s: &str, o: &str) -> EdgeFact {
        EdgeFact::new(r, s, o)
    }

    /// x1 <- p1 <- x2 <- p2 <- x3, each process the identity.
    fn chain() -> (ProvenanceGraph, Interpretation) {
        let a = |id: &str| Artifact { id: id.into(), value: Value::TRUE };
        let g = ProvenanceGraph::new(
            vec![a("x1"), a("x2"), a("x3")],
            vec![
                Process { id: "p1".into(), name: "id".into() },
                Process { id: "p2".into(), name: "id".into() },
            ],
            vec![
                UsedEdge { process: "p1".into(), artifact: "x2".into(), position: 1 },
                UsedEdge { process: "p2".into(), artifact: "x3".into(), position: 1 },
            ],
            vec![
                GeneratedEdge { artifact: "x1".into(), process: "p1".into() },
                GeneratedEdge { artifact: "x2".into(), process: "p2".into() },
            ],
            vec!["x3".into()],
            "x1".into(),
        )
        .unwrap();
        let mut interp = Interpretation::new(Domain::boolean());
        interp.define("id", vec!["a".into()], Expr::var("a")).unwrap();
        (g, interp)
    }

    #[test]
    fn chain_closure() {
        let (g, _) = chain();
        let closed = datalog_closure(&base_facts(&g));
        use Relation::*;
        for f in [
            fact(WasDerivedFrom, "x1", "x2"),
            fact(WasDerivedFrom, "x2", "x3"),
            fact(WasDerivedFromPlus, "x1", "x2"),
            fact(WasDerivedFromPlus, "x1", "x3"),
            fact(WasTriggeredBy, "p1", "p2"),
            fact(WasTriggeredByPlus, "p1", "p2"),
        ] {
            assert!(closed.contains(&f), "missing {f}");
        }
        assert!(!closed.contains(&fact(WasDerivedFrom, "x1", "x3")));
        assert_eq!(closed.len(), 4 + 2 + 1 + 3 + 1);
        assert!(closed.is_closed());
        assert!(!base_facts(&g).is_closed());
        assert!(closed.derivations_replay());
        assert_eq!(
            closed.derivation(&fact(WasDerivedFromPlus, "x1", "x3")),
            Some(&Derivation::Rule {
                rule: Rule::DerivedFromPlusStep,
                premises: vec![fact(WasDerivedFrom, "x1", "x2"), fact(WasDerivedFromPlus, "x2", "x3")],
            })
        );
    }

    #[test]
    fn used_only_base_is_closed() {
        let mut base = FactBase::new();
        base.insert(fact(Relation::Used, "p", "a"));
        base.insert(fact(Relation::Used, "q", "a"));
        assert_eq!(datalog_closure(&base), base);
        assert!(datalog_closure(&FactBase::new()).is_empty());
    }

    #[test]
    fn chain_semantics_is_exact() {
        let (g, interp) = chain();
        let report = audit(&g, &interp, 3).unwrap();
        assert!(report.is_sound(), "{report}");
        assert!(report.is_complete(), "{report}");
        assert!(report.closure_counterexamples.is_empty());
    }

    #[test]
    fn constant_process_is_unsound() {
        let a = |id: &str, v: u32| Artifact { id: id.into(), value: Value::Num(v) };
        let g = ProvenanceGraph::new(
            vec![a("x", 1), a("y", 0)],
            vec![Process { id: "p".into(), name: "annihilate".into() }],
            vec![UsedEdge { process: "p".into(), artifact: "x".into(), position: 1 }],
            vec![GeneratedEdge { artifact: "y".into(), process: "p".into() }],
            vec!["x".into()],
            "y".into(),
        )
        .unwrap();
        let mut interp = Interpretation::new(Domain::boolean());
        interp
            .define(
                "annihilate",
                vec!["a".into()],
                Expr::apply(Op::And, vec![Expr::var("a"), Expr::apply(Op::Not, vec![Expr::var("a")])]),
            )
            .unwrap();
        let report = audit(&g, &interp, 3).unwrap();
        let unsound: Vec<String> = report.unsound().iter().map(|f| f.to_string()).collect();
        assert!(unsound.contains(&"wasDerivedFrom(y, x)".to_string()), "{report}");
        assert!(unsound.contains(&"used(p, x)".to_string()));
        assert!(report.sound().contains(&&fact(Relation::WasGeneratedBy, "y", "p")));
        assert!(report.is_complete());
    }

    #[test]
    fn dump_is_sorted() {
        let (g, _) = chain();
        let dump = datalog_closure(&base_facts(&g)).dump();
        let lines: Vec<&str> = dump.lines().collect();
        let mut sorted = lines.clone();
        sorted.sort();
        assert_eq!(lines, sorted);
        assert!(lines.contains(&"wasDerivedFrom+(x1, x3)"));
    }
}
