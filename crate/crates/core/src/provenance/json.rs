//! The JSON graph file format.

use serde::{Deserialize, Serialize};

use crate::model::Value;

use super::{Artifact, GeneratedEdge, GraphError, Process, ProvenanceGraph, UsedEdge};

#[derive(Debug, thiserror::Error)]
pub enum GraphFileError {
    #[error("malformed graph file: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("argument position must be at least 1 (process `{process}`, artifact `{artifact}`)")]
    ZeroPosition { process: String, artifact: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    artifacts: Vec<ArtifactEntry>,
    processes: Vec<ProcessEntry>,
    inputs: Vec<String>,
    result: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtifactEntry {
    id: String,
    value: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProcessEntry {
    id: String,
    name: String,
    #[serde(default)]
    uses: Vec<(String, usize)>,
    generates: Generates,
}

/// One artifact normally; a list lets non-functional graphs be written down
/// so that validation can report them.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Generates {
    One(String),
    Many(Vec<String>),
}

impl ProvenanceGraph {
    pub fn from_json(text: &str) -> Result<ProvenanceGraph, GraphFileError> {
        let file: GraphFile = serde_json::from_str(text)?;
        let mut processes = Vec::new();
        let mut used = Vec::new();
        let mut generated = Vec::new();
        for p in file.processes {
            for (artifact, position) in p.uses {
                if position == 0 {
                    return Err(GraphFileError::ZeroPosition {
                        process: p.id,
                        artifact,
                    });
                }
                used.push(UsedEdge {
                    process: p.id.clone(),
                    artifact,
                    position,
                });
            }
            let outs = match p.generates {
                Generates::One(a) => vec![a],
                Generates::Many(v) => v,
            };
            generated.extend(outs.into_iter().map(|artifact| GeneratedEdge {
                artifact,
                process: p.id.clone(),
            }));
            processes.push(Process { id: p.id, name: p.name });
        }
        let artifacts = file
            .artifacts
            .into_iter()
            .map(|a| Artifact { id: a.id, value: a.value })
            .collect();
        Ok(ProvenanceGraph::new(
            artifacts,
            processes,
            used,
            generated,
            file.inputs,
            file.result,
        )?)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            artifacts: self
                .artifacts
                .iter()
                .map(|a| ArtifactEntry {
                    id: a.id.clone(),
                    value: a.value,
                })
                .collect(),
            processes: self
                .processes
                .iter()
                .map(|p| {
                    let mut uses: Vec<(String, usize)> = self
                        .used
                        .iter()
                        .filter(|e| e.process == p.id)
                        .map(|e| (e.artifact.clone(), e.position))
                        .collect();
                    uses.sort_by_key(|u| u.1);
                    let mut outs: Vec<String> = self.outputs(&p.id).into_iter().map(String::from).collect();
                    ProcessEntry {
                        id: p.id.clone(),
                        name: p.name.clone(),
                        uses,
                        generates: if outs.len() == 1 {
                            Generates::One(outs.remove(0))
                        } else {
                            Generates::Many(outs)
                        },
                    }
                })
                .collect(),
            inputs: self.inputs.clone(),
            result: self.result.clone(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::square_of_sum;
    use super::*;

    #[test]
    fn json_round_trip() {
        let (g, _) = square_of_sum(2, 3);
        let back = ProvenanceGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back.to_json(), g.to_json());
        assert_eq!(back.arguments("plus"), vec!["x", "y"]);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_positions() {
        let text = r#"{"artifacts": [], "processes": [], "inputs": [], "result": "r", "extra": 1}"#;
        assert!(matches!(ProvenanceGraph::from_json(text), Err(GraphFileError::Syntax(_))));
        let text = r#"{"artifacts": [{"id": "a", "value": 1}, {"id": "r", "value": "bot"}],
            "processes": [{"id": "p", "name": "f", "uses": [["a", 0]], "generates": "r"}],
            "inputs": ["a"], "result": "r"}"#;
        assert!(matches!(ProvenanceGraph::from_json(text), Err(GraphFileError::ZeroPosition { .. })));
        let text = r#"{"artifacts": [{"id": "a", "value": 1}], "processes": [], "inputs": [], "result": "zz"}"#;
        assert!(matches!(ProvenanceGraph::from_json(text), Err(GraphFileError::Graph(_))));
    }

    #[test]
    fn generates_may_list_several_artifacts() {
        let text = r#"{"artifacts": [{"id": "a", "value": 1}, {"id": "b", "value": 1}, {"id": "c", "value": 1}],
            "processes": [{"id": "p", "name": "f", "uses": [["a", 1]], "generates": ["b", "c"]}],
            "inputs": ["a"], "result": "c"}"#;
        let g = ProvenanceGraph::from_json(text).unwrap();
        assert!(!g.validate(None).is_functional);
    }
}
