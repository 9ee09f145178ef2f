//! Named collections of loaded files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::approx::{ApproxError, BlackBoxFunction, Explanation, ProvenanceSemantics, SemanticsRule};
use crate::model::CausalModel;
use crate::provenance::{GraphFileError, Interpretation, ProvenanceGraph};

use super::semantics::{parse_semantics, parse_table, SemanticsFile, SemanticsSpec};
use super::text::{parse_interpretation, parse_model_file, ModelFile};
use super::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum WorkspaceError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{file}:{error}")]
    Parse { file: String, error: ParseError },
    #[error("{file}: {error}")]
    Graph { file: String, error: GraphFileError },
    #[error("{file}: graph is not valid:\n{report}")]
    Invalid { file: String, report: String },
    #[error("{0}: unknown file kind (expected .model, .json, .interp, .sem or .table)")]
    UnknownKind(String),
    #[error("{kind} `{name}` is already loaded")]
    Duplicate { kind: &'static str, name: String },
    #[error("{file}: {message}")]
    Semantics { file: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileKind {
    Model,
    Graph,
    Interpretation,
    Semantics,
    Table,
}

impl FileKind {
    pub fn of(name: &str) -> Option<FileKind> {
        let ext = Path::new(name).extension()?.to_str()?;
        Some(match ext {
            "model" => FileKind::Model,
            "json" => FileKind::Graph,
            "interp" => FileKind::Interpretation,
            "sem" => FileKind::Semantics,
            "table" => FileKind::Table,
            _ => return None,
        })
    }

    fn label(self) -> &'static str {
        match self {
            FileKind::Model => "model",
            FileKind::Graph => "graph",
            FileKind::Interpretation => "interpretation",
            FileKind::Semantics => "semantics",
            FileKind::Table => "table",
        }
    }
}

/// A loaded semantics with the parsed definition it came from.
#[derive(Clone, Debug)]
pub struct LoadedSemantics {
    pub file: SemanticsFile,
    pub semantics: ProvenanceSemantics,
}

/// Loaded models, graphs, interpretations, semantics and tables, keyed by
/// file name. Semantics definitions pull in the files they mention, so
/// every reference is resolved once loading succeeds.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    models: BTreeMap<String, ModelFile>,
    graphs: BTreeMap<String, ProvenanceGraph>,
    interps: BTreeMap<String, Interpretation>,
    semantics: BTreeMap<String, LoadedSemantics>,
    tables: BTreeMap<String, BlackBoxFunction>,
}

/// Reads a named file; names are as written, joined onto the directory of
/// the file that mentions them.
pub type Resolver<'a> = &'a dyn Fn(&str) -> Result<String, WorkspaceError>;

pub fn read_file(name: &str) -> Result<String, WorkspaceError> {
    std::fs::read_to_string(name).map_err(|e| WorkspaceError::Io {
        path: name.to_string(),
        message: e.to_string(),
    })
}

fn join(base: &str, name: &str) -> String {
    let dir = Path::new(base).parent().unwrap_or(Path::new(""));
    let p: PathBuf = dir.join(name);
    p.to_string_lossy().into_owned()
}

impl Workspace {
    pub fn new() -> Workspace {
        Workspace::default()
    }

    /// Loads a file from disk. Returns its key.
    pub fn load_path(&mut self, path: impl AsRef<Path>) -> Result<String, WorkspaceError> {
        let name = path.as_ref().to_string_lossy().into_owned();
        let text = read_file(&name)?;
        self.load_text(&name, &text, &read_file)?;
        Ok(name)
    }

    /// Loads `text` under `name`, whose extension selects the format.
    pub fn load_text(&mut self, name: &str, text: &str, resolve: Resolver<'_>) -> Result<(), WorkspaceError> {
        let kind = FileKind::of(name).ok_or_else(|| WorkspaceError::UnknownKind(name.to_string()))?;
        if self.contains(kind, name) {
            return Err(WorkspaceError::Duplicate {
                kind: kind.label(),
                name: name.to_string(),
            });
        }
        let parse = |error| WorkspaceError::Parse {
            file: name.to_string(),
            error,
        };
        match kind {
            FileKind::Model => {
                self.models.insert(name.into(), parse_model_file(text).map_err(parse)?);
            }
            FileKind::Graph => {
                let g = ProvenanceGraph::from_json(text).map_err(|error| WorkspaceError::Graph {
                    file: name.to_string(),
                    error,
                })?;
                self.graphs.insert(name.into(), g);
            }
            FileKind::Interpretation => {
                self.interps.insert(name.into(), parse_interpretation(text).map_err(parse)?);
            }
            FileKind::Table => {
                self.tables.insert(name.into(), parse_table(text).map_err(parse)?);
            }
            FileKind::Semantics => {
                let file = parse_semantics(text).map_err(parse)?;
                let semantics = self.resolve_semantics(name, &file, resolve)?;
                self.semantics.insert(name.into(), LoadedSemantics { file, semantics });
            }
        }
        Ok(())
    }

    fn contains(&self, kind: FileKind, name: &str) -> bool {
        match kind {
            FileKind::Model => self.models.contains_key(name),
            FileKind::Graph => self.graphs.contains_key(name),
            FileKind::Interpretation => self.interps.contains_key(name),
            FileKind::Semantics => self.semantics.contains_key(name),
            FileKind::Table => self.tables.contains_key(name),
        }
    }

    /// Loads `name` unless it is already present.
    fn ensure(&mut self, name: &str, expected: FileKind, resolve: Resolver<'_>) -> Result<(), WorkspaceError> {
        if FileKind::of(name) != Some(expected) {
            return Err(WorkspaceError::Semantics {
                file: name.to_string(),
                message: format!("expected a {} file", expected.label()),
            });
        }
        if !self.contains(expected, name) {
            let text = resolve(name)?;
            self.load_text(name, &text, resolve)?;
        }
        Ok(())
    }

    fn resolve_semantics(&mut self, name: &str, file: &SemanticsFile, resolve: Resolver<'_>) -> Result<ProvenanceSemantics, WorkspaceError> {
        let fail = |message: String| WorkspaceError::Semantics {
            file: name.to_string(),
            message,
        };
        let interp = match &file.interp {
            Some(i) => {
                let key = join(name, i);
                self.ensure(&key, FileKind::Interpretation, resolve)?;
                Some(self.interps[&key].clone())
            }
            None => None,
        };
        let mut explanations: BTreeMap<&str, Explanation> = BTreeMap::new();
        for (n, f) in &file.graphs {
            let key = join(name, f);
            self.ensure(&key, FileKind::Graph, resolve)?;
            let interp = interp
                .clone()
                .ok_or_else(|| fail(format!("graph `{n}` needs an `interp` declaration")))?;
            let graph = self.graphs[&key].clone();
            let report = graph.validate(Some(&interp));
            if !report.is_valid() {
                return Err(WorkspaceError::Invalid {
                    file: key,
                    report: report.to_string(),
                });
            }
            explanations.insert(n, Explanation::Graph { graph, interp });
        }
        for (n, f) in &file.models {
            let key = join(name, f);
            self.ensure(&key, FileKind::Model, resolve)?;
            explanations.insert(n, Explanation::Model(self.models[&key].model.clone()));
        }
        let rule = match &file.rule {
            SemanticsSpec::ConstantGraph => SemanticsRule::Constant,
            SemanticsSpec::FixedGraph(n) => SemanticsRule::Fixed(explanations[n.as_str()].clone()),
            SemanticsSpec::CaseSplit { variable, cases } => SemanticsRule::CaseSplit {
                variable: variable.clone(),
                cases: cases
                    .iter()
                    .map(|(v, n)| (*v, explanations[n.as_str()].clone()))
                    .collect(),
            },
        };
        ProvenanceSemantics::new(file.inputs.clone(), file.result.clone(), rule).map_err(|e: ApproxError| fail(e.to_string()))
    }

    pub fn model(&self, name: &str) -> Option<&ModelFile> {
        self.models.get(name)
    }

    pub fn graph(&self, name: &str) -> Option<&ProvenanceGraph> {
        self.graphs.get(name)
    }

    pub fn interpretation(&self, name: &str) -> Option<&Interpretation> {
        self.interps.get(name)
    }

    pub fn semantics(&self, name: &str) -> Option<&LoadedSemantics> {
        self.semantics.get(name)
    }

    pub fn table(&self, name: &str) -> Option<&BlackBoxFunction> {
        self.tables.get(name)
    }

    pub fn models(&self) -> impl Iterator<Item = (&str, &CausalModel)> {
        self.models.iter().map(|(k, v)| (k.as_str(), &v.model))
    }

    pub fn graphs(&self) -> impl Iterator<Item = (&str, &ProvenanceGraph)> {
        self.graphs.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn interpretations(&self) -> impl Iterator<Item = (&str, &Interpretation)> {
        self.interps.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn all_semantics(&self) -> impl Iterator<Item = (&str, &LoadedSemantics)> {
        self.semantics.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// The interpretation conventionally paired with a graph: same stem,
    /// `.interp` extension.
    pub fn companion_interpretation(&self, graph: &str) -> Option<&Interpretation> {
        let key = Path::new(graph).with_extension("interp").to_string_lossy().into_owned();
        self.interps.get(&key)
    }
}
