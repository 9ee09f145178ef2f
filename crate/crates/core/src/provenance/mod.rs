//! Bipartite provenance graphs in the style of the Open Provenance Model.
//!
//! Artifacts carry data values, processes carry process names. A `used`
//! edge says a process read an artifact at some argument position; a
//! `generated` edge says an artifact was produced by a process. Artifacts
//! and processes share one id namespace.

mod compile;
mod interp;
mod json;
mod term;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::model::Value;

pub use compile::{compile_model, interpret_graph, to_causal_situation, CompileError, CompiledGraph, GraphFunction};
pub use interp::{InterpError, Interpretation, ProcessFunction};
pub use json::GraphFileError;
pub use term::{Term, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Artifact {
    pub id: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Process {
    pub id: String,
    pub name: String,
}

/// `process` read `artifact` as argument number `position` (1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UsedEdge {
    pub process: String,
    pub artifact: String,
    pub position: usize,
}

/// `artifact` was generated by `process`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratedEdge {
    pub artifact: String,
    pub process: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Artifact,
    Process,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("node id `{0}` is used more than once")]
    DuplicateId(String),
    #[error("{context} refers to unknown node `{id}`")]
    UnknownNode { id: String, context: String },
    #[error("`{0}` is listed as an input more than once")]
    DuplicateInput(String),
}

/// A provenance graph with designated inputs `v1..vn` and result `v0`.
///
/// Construction only checks that ids are unique and every reference
/// resolves; structural properties are reported by [`ProvenanceGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenanceGraph {
    artifacts: Vec<Artifact>,
    processes: Vec<Process>,
    used: Vec<UsedEdge>,
    generated: Vec<GeneratedEdge>,
    inputs: Vec<String>,
    result: String,
    index: HashMap<String, (NodeKind, usize)>,
}

impl ProvenanceGraph {
    pub fn new(
        artifacts: Vec<Artifact>,
        processes: Vec<Process>,
        used: Vec<UsedEdge>,
        generated: Vec<GeneratedEdge>,
        inputs: Vec<String>,
        result: String,
    ) -> Result<ProvenanceGraph, GraphError> {
        let mut index = HashMap::new();
        let nodes = artifacts
            .iter()
            .enumerate()
            .map(|(i, a)| (&a.id, NodeKind::Artifact, i))
            .chain(processes.iter().enumerate().map(|(i, p)| (&p.id, NodeKind::Process, i)));
        for (id, kind, i) in nodes {
            if index.insert(id.clone(), (kind, i)).is_some() {
                return Err(GraphError::DuplicateId(id.clone()));
            }
        }
        let check = |id: &str, context: &dyn Fn() -> String| {
            if index.contains_key(id) {
                Ok(())
            } else {
                Err(GraphError::UnknownNode {
                    id: id.to_string(),
                    context: context(),
                })
            }
        };
        for e in &used {
            check(&e.process, &|| format!("used edge to `{}`", e.artifact))?;
            check(&e.artifact, &|| format!("used edge from `{}`", e.process))?;
        }
        for e in &generated {
            check(&e.artifact, &|| format!("generated edge from `{}`", e.process))?;
            check(&e.process, &|| format!("generated edge to `{}`", e.artifact))?;
        }
        let mut seen = BTreeSet::new();
        for i in &inputs {
            check(i, &|| "input list".to_string())?;
            if !seen.insert(i) {
                return Err(GraphError::DuplicateInput(i.clone()));
            }
        }
        check(&result, &|| "result".to_string())?;
        Ok(ProvenanceGraph {
            artifacts,
            processes,
            used,
            generated,
            inputs,
            result,
            index,
        })
    }

    pub fn artifacts(&self) -> &[Artifact] {
        &self.artifacts
    }

    pub fn processes(&self) -> &[Process] {
        &self.processes
    }

    pub fn used_edges(&self) -> &[UsedEdge] {
        &self.used
    }

    pub fn generated_edges(&self) -> &[GeneratedEdge] {
        &self.generated
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn result(&self) -> &str {
        &self.result
    }

    pub fn kind(&self, id: &str) -> Option<NodeKind> {
        self.index.get(id).map(|(k, _)| *k)
    }

    pub fn artifact(&self, id: &str) -> Option<&Artifact> {
        match self.index.get(id)? {
            (NodeKind::Artifact, i) => Some(&self.artifacts[*i]),
            _ => None,
        }
    }

    pub fn process(&self, id: &str) -> Option<&Process> {
        match self.index.get(id)? {
            (NodeKind::Process, i) => Some(&self.processes[*i]),
            _ => None,
        }
    }

    pub fn is_input(&self, id: &str) -> bool {
        self.inputs.iter().any(|i| i == id)
    }

    /// All node ids: artifacts first, then processes, each in file order.
    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.artifacts
            .iter()
            .map(|a| a.id.as_str())
            .chain(self.processes.iter().map(|p| p.id.as_str()))
    }

    /// Processes generating `artifact`.
    pub fn generators(&self, artifact: &str) -> Vec<&str> {
        self.generated
            .iter()
            .filter(|e| e.artifact == artifact)
            .map(|e| e.process.as_str())
            .collect()
    }

    /// Artifacts generated by `process`.
    pub fn outputs(&self, process: &str) -> Vec<&str> {
        self.generated
            .iter()
            .filter(|e| e.process == process)
            .map(|e| e.artifact.as_str())
            .collect()
    }

    /// Artifacts read by `process`, ordered by argument position.
    pub fn arguments(&self, process: &str) -> Vec<&str> {
        let mut edges: Vec<&UsedEdge> = self.used.iter().filter(|e| e.process == process).collect();
        edges.sort_by_key(|e| e.position);
        edges.into_iter().map(|e| e.artifact.as_str()).collect()
    }

    /// Processes that read `artifact`.
    pub fn consumers(&self, artifact: &str) -> Vec<&str> {
        self.used
            .iter()
            .filter(|e| e.artifact == artifact)
            .map(|e| e.process.as_str())
            .collect()
    }

    /// Directed data-flow edges: artifact to process for `used`, process to
    /// artifact for `generated`.
    pub fn flow_edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.used
            .iter()
            .map(|e| (e.artifact.as_str(), e.process.as_str()))
            .chain(self.generated.iter().map(|e| (e.process.as_str(), e.artifact.as_str())))
    }

    /// Nodes in data-flow order, or `None` if the graph is cyclic. Ties are
    /// broken by node order, so the result is deterministic.
    pub fn topological_order(&self) -> Option<Vec<&str>> {
        let (order, _) = self.kahn();
        (order.len() == self.index.len()).then_some(order)
    }

    fn kahn(&self) -> (Vec<&str>, Vec<&str>) {
        let ids: Vec<&str> = self.node_ids().collect();
        let pos: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut indeg = vec![0usize; ids.len()];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (a, b) in self.flow_edges() {
            succ[pos[a]].push(pos[b]);
            indeg[pos[b]] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..ids.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(ids.len());
        while let Some(i) = ready.pop_first() {
            order.push(ids[i]);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        let stuck = (0..ids.len()).filter(|&i| indeg[i] > 0).map(|i| ids[i]).collect();
        (order, stuck)
    }

    /// Checks every structural property. Sortedness is checked against
    /// `interp` when given, otherwise against the arity implied by the
    /// graph itself (all processes sharing a name must agree).
    pub fn validate(&self, interp: Option<&Interpretation>) -> ValidationReport {
        let mut diagnostics = Vec::new();

        for e in &self.used {
            if self.kind(&e.process) != Some(NodeKind::Process) || self.kind(&e.artifact) != Some(NodeKind::Artifact) {
                diagnostics.push(Diagnostic::NonBipartiteEdge {
                    from: e.artifact.clone(),
                    to: e.process.clone(),
                });
            }
        }
        for e in &self.generated {
            if self.kind(&e.process) != Some(NodeKind::Process) || self.kind(&e.artifact) != Some(NodeKind::Artifact) {
                diagnostics.push(Diagnostic::NonBipartiteEdge {
                    from: e.process.clone(),
                    to: e.artifact.clone(),
                });
            }
        }
        let is_bipartite = diagnostics.is_empty();

        let (_, stuck) = self.kahn();
        let is_acyclic = stuck.is_empty();
        if !is_acyclic {
            diagnostics.push(Diagnostic::Cycle(stuck.iter().map(|s| s.to_string()).collect()));
        }

        let mut is_functional = true;
        for p in &self.processes {
            let outs = self.outputs(&p.id);
            if outs.len() != 1 {
                is_functional = false;
                diagnostics.push(Diagnostic::NotFunctional {
                    process: p.id.clone(),
                    outputs: outs.iter().map(|s| s.to_string()).collect(),
                });
            }
        }

        let mut is_sorted = true;
        let mut implied: BTreeMap<&str, usize> = BTreeMap::new();
        for p in &self.processes {
            let mut positions: Vec<usize> = self
                .used
                .iter()
                .filter(|e| e.process == p.id)
                .map(|e| e.position)
                .collect();
            positions.sort_unstable();
            let expected = match interp {
                Some(interp) => match interp.arity(&p.name) {
                    Some(n) => n,
                    None => {
                        is_sorted = false;
                        diagnostics.push(Diagnostic::UnknownProcessName {
                            process: p.id.clone(),
                            name: p.name.clone(),
                        });
                        continue;
                    }
                },
                None => *implied.entry(&p.name).or_insert(positions.len()),
            };
            if positions != (1..=expected).collect::<Vec<_>>() {
                is_sorted = false;
                diagnostics.push(Diagnostic::ArityMismatch {
                    process: p.id.clone(),
                    name: p.name.clone(),
                    expected,
                    positions,
                });
            }
        }

        let mut well_formed = true;
        for i in &self.inputs {
            if self.kind(i) != Some(NodeKind::Artifact) {
                well_formed = false;
                diagnostics.push(Diagnostic::InputNotArtifact(i.clone()));
            } else if let Some(p) = self.generators(i).first() {
                well_formed = false;
                diagnostics.push(Diagnostic::GeneratedInput {
                    artifact: i.clone(),
                    process: p.to_string(),
                });
            }
        }
        if self.kind(&self.result) != Some(NodeKind::Artifact) {
            well_formed = false;
            diagnostics.push(Diagnostic::ResultNotArtifact(self.result.clone()));
        }
        for a in &self.artifacts {
            let gens = self.generators(&a.id);
            if gens.len() > 1 {
                well_formed = false;
                diagnostics.push(Diagnostic::MultipleGenerators {
                    artifact: a.id.clone(),
                    processes: gens.iter().map(|s| s.to_string()).collect(),
                });
            }
        }
        if let Some(interp) = interp {
            for a in &self.artifacts {
                if !interp.domain().contains(a.value) {
                    well_formed = false;
                    diagnostics.push(Diagnostic::LabelOutOfDomain {
                        artifact: a.id.clone(),
                        value: a.value,
                    });
                }
            }
        }

        ValidationReport {
            is_bipartite,
            is_acyclic,
            is_functional,
            is_sorted,
            well_formed,
            diagnostics,
        }
    }
}

/// One structural problem found by [`ProvenanceGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    NonBipartiteEdge { from: String, to: String },
    Cycle(Vec<String>),
    NotFunctional { process: String, outputs: Vec<String> },
    UnknownProcessName { process: String, name: String },
    ArityMismatch {
        process: String,
        name: String,
        expected: usize,
        positions: Vec<usize>,
    },
    InputNotArtifact(String),
    GeneratedInput { artifact: String, process: String },
    ResultNotArtifact(String),
    MultipleGenerators { artifact: String, processes: Vec<String> },
    LabelOutOfDomain { artifact: String, value: Value },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NonBipartiteEdge { from, to } => {
                write!(f, "edge {from} -> {to} does not join an artifact and a process")
            }
            Diagnostic::Cycle(nodes) => write!(f, "cycle through {}", nodes.join(", ")),
            Diagnostic::NotFunctional { process, outputs } => write!(
                f,
                "process {process} generates {} artifacts ({}), expected exactly one",
                outputs.len(),
                outputs.join(", ")
            ),
            Diagnostic::UnknownProcessName { process, name } => {
                write!(f, "process {process}: no function named `{name}`")
            }
            Diagnostic::ArityMismatch {
                process,
                name,
                expected,
                positions,
            } => write!(
                f,
                "process {process} ({name}) has argument positions {positions:?}, expected 1..={expected}"
            ),
            Diagnostic::InputNotArtifact(id) => write!(f, "input {id} is not an artifact"),
            Diagnostic::GeneratedInput { artifact, process } => {
                write!(f, "input {artifact} is generated by {process}")
            }
            Diagnostic::ResultNotArtifact(id) => write!(f, "result {id} is not an artifact"),
            Diagnostic::MultipleGenerators { artifact, processes } => {
                write!(f, "artifact {artifact} is generated by {}", processes.join(", "))
            }
            Diagnostic::LabelOutOfDomain { artifact, value } => {
                write!(f, "artifact {artifact} has label {value} outside the domain")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub is_bipartite: bool,
    pub is_acyclic: bool,
    /// Each process generates exactly one artifact.
    pub is_functional: bool,
    pub is_sorted: bool,
    /// Inputs are ungenerated artifacts, the result is an artifact, no
    /// artifact has two generators, and labels lie in the domain.
    pub well_formed: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.is_bipartite && self.is_acyclic && self.is_functional && self.is_sorted && self.well_formed
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flag = |b: bool| if b { "yes" } else { "no" };
        writeln!(f, "bipartite:   {}", flag(self.is_bipartite))?;
        writeln!(f, "acyclic:     {}", flag(self.is_acyclic))?;
        writeln!(f, "functional:  {}", flag(self.is_functional))?;
        writeln!(f, "sorted:      {}", flag(self.is_sorted))?;
        writeln!(f, "well-formed: {}", flag(self.well_formed))?;
        for d in &self.diagnostics {
            writeln!(f, "  - {d}")?;
        }
        Ok(())
    }
}
