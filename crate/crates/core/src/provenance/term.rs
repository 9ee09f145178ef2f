//! Tree-shaped graphs as first-order terms.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::Value;

use super::{Artifact, Diagnostic, GeneratedEdge, GraphError, Process, ProvenanceGraph, UsedEdge};

/// A first-order term annotated with the node ids and labels it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Input { id: String, value: Value },
    Const { id: String, value: Value },
    Apply {
        process: String,
        name: String,
        artifact: String,
        value: Value,
        args: Vec<Term>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("graph is not valid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("artifact `{0}` is used more than once, so the graph is not a tree")]
    Shared(String),
    #[error("node `{0}` is not reachable from the result")]
    Unreachable(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl Term {
    /// Reads off the term rooted at the result node. Requires a valid graph
    /// in which no artifact is used twice and every node feeds the result.
    pub fn from_graph(g: &ProvenanceGraph) -> Result<Term, TermError> {
        let report = g.validate(None);
        if !report.is_valid() {
            return Err(TermError::Invalid(report.diagnostics));
        }
        let mut uses: BTreeMap<&str, usize> = BTreeMap::new();
        for e in g.used_edges() {
            let n = uses.entry(&e.artifact).or_default();
            *n += 1;
            if *n > 1 {
                return Err(TermError::Shared(e.artifact.clone()));
            }
        }
        let mut seen = 0;
        let term = Self::read(g, g.result(), &mut seen);
        if seen != g.artifacts().len() + g.processes().len() {
            let reached = term.node_ids();
            let missing = g.node_ids().find(|id| !reached.contains(id)).expect("some node missed");
            return Err(TermError::Unreachable(missing.to_string()));
        }
        Ok(term)
    }

    fn read(g: &ProvenanceGraph, artifact: &str, seen: &mut usize) -> Term {
        *seen += 1;
        let value = g.artifact(artifact).expect("artifact").value;
        if g.is_input(artifact) {
            return Term::Input {
                id: artifact.to_string(),
                value,
            };
        }
        match g.generators(artifact).first() {
            None => Term::Const {
                id: artifact.to_string(),
                value,
            },
            Some(p) => {
                *seen += 1;
                Term::Apply {
                    process: p.to_string(),
                    name: g.process(p).expect("process").name.clone(),
                    artifact: artifact.to_string(),
                    value,
                    args: g.arguments(p).iter().map(|a| Self::read(g, a, seen)).collect(),
                }
            }
        }
    }

    fn node_ids(&self) -> Vec<&str> {
        match self {
            Term::Input { id, .. } | Term::Const { id, .. } => vec![id],
            Term::Apply {
                process, artifact, args, ..
            } => {
                let mut out = vec![artifact.as_str(), process.as_str()];
                out.extend(args.iter().flat_map(Term::node_ids));
                out
            }
        }
    }

    /// Rebuilds the graph. Inputs are listed in left-to-right leaf order.
    pub fn to_graph(&self) -> Result<ProvenanceGraph, TermError> {
        let mut parts = Parts::default();
        self.write(&mut parts);
        let result = self.artifact_id().to_string();
        Ok(ProvenanceGraph::new(
            parts.artifacts,
            parts.processes,
            parts.used,
            parts.generated,
            parts.inputs,
            result,
        )?)
    }

    fn artifact_id(&self) -> &str {
        match self {
            Term::Input { id, .. } | Term::Const { id, .. } => id,
            Term::Apply { artifact, .. } => artifact,
        }
    }

    fn write(&self, parts: &mut Parts) {
        match self {
            Term::Input { id, value } => {
                parts.artifacts.push(Artifact { id: id.clone(), value: *value });
                parts.inputs.push(id.clone());
            }
            Term::Const { id, value } => {
                parts.artifacts.push(Artifact { id: id.clone(), value: *value });
            }
            Term::Apply {
                process,
                name,
                artifact,
                value,
                args,
            } => {
                parts.artifacts.push(Artifact {
                    id: artifact.clone(),
                    value: *value,
                });
                parts.processes.push(Process {
                    id: process.clone(),
                    name: name.clone(),
                });
                parts.generated.push(GeneratedEdge {
                    artifact: artifact.clone(),
                    process: process.clone(),
                });
                for (i, a) in args.iter().enumerate() {
                    parts.used.push(UsedEdge {
                        process: process.clone(),
                        artifact: a.artifact_id().to_string(),
                        position: i + 1,
                    });
                    a.write(parts);
                }
            }
        }
    }
}

#[derive(Default)]
struct Parts {
    artifacts: Vec<Artifact>,
    processes: Vec<Process>,
    used: Vec<UsedEdge>,
    generated: Vec<GeneratedEdge>,
    inputs: Vec<String>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Input { id, .. } => f.write_str(id),
            Term::Const { value, .. } => write!(f, "{value}"),
            Term::Apply { name, args, .. } => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{square_of_sum, v};
    use super::*;

    fn leaf(id: &str, n: u32) -> Term {
        Term::Input { id: id.into(), value: v(n) }
    }

    fn sorted(g: &ProvenanceGraph) -> (Vec<String>, Vec<String>, Vec<UsedEdge>, Vec<GeneratedEdge>) {
        let mut a: Vec<String> = g.artifacts().iter().map(|a| format!("{}={}", a.id, a.value)).collect();
        let mut p: Vec<String> = g.processes().iter().map(|p| format!("{}:{}", p.id, p.name)).collect();
        let mut u = g.used_edges().to_vec();
        let mut e = g.generated_edges().to_vec();
        a.sort();
        p.sort();
        u.sort();
        e.sort();
        (a, p, u, e)
    }

    #[test]
    fn term_graph_term_is_identity() {
        let t = Term::Apply {
            process: "p".into(),
            name: "sub".into(),
            artifact: "r".into(),
            value: v(1),
            args: vec![
                leaf("a", 3),
                Term::Apply {
                    process: "q".into(),
                    name: "neg".into(),
                    artifact: "b".into(),
                    value: v(2),
                    args: vec![leaf("c", 5)],
                },
                Term::Const { id: "k".into(), value: v(0) },
            ],
        };
        let g = t.to_graph().unwrap();
        assert_eq!(g.inputs(), &["a".to_string(), "c".to_string()]);
        assert_eq!(Term::from_graph(&g).unwrap(), t);
        assert_eq!(t.to_string(), "sub(a, neg(c), 0)");
    }

    #[test]
    fn graph_term_graph_is_identity_on_trees() {
        let t = Term::Apply {
            process: "p".into(),
            name: "add".into(),
            artifact: "r".into(),
            value: v(3),
            args: vec![leaf("x", 1), leaf("y", 2)],
        };
        let g = t.to_graph().unwrap();
        let back = Term::from_graph(&g).unwrap().to_graph().unwrap();
        assert_eq!(sorted(&back), sorted(&g));
        assert_eq!(back.inputs(), g.inputs());
    }

    #[test]
    fn sharing_is_rejected() {
        let (g, _) = square_of_sum(1, 2);
        assert_eq!(Term::from_graph(&g), Err(TermError::Shared("t".into())));
    }
}
