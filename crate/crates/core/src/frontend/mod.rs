//! Text formats, the workspace that loads them, and the command line.

pub mod cli;
pub mod dot;
mod lexer;
pub mod semantics;
pub mod text;
pub mod workspace;

use crate::provenance::{GraphFileError, ProvenanceGraph};

pub use cli::{run_cli, CliOutput};
pub use dot::{graph_to_dot, model_to_dot};
pub use semantics::{parse_semantics, parse_table, print_semantics, print_table, SemanticsFile, SemanticsSpec};
pub use text::{parse_interpretation, parse_model, parse_model_file, print_interpretation, print_model, ModelFile};
pub use workspace::{FileKind, LoadedSemantics, Workspace, WorkspaceError};

/// A syntax error with a one-based position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Reads the JSON graph format. Structural checks are left to
/// [`ProvenanceGraph::validate`].
pub fn parse_graph(text: &str) -> Result<ProvenanceGraph, GraphFileError> {
    ProvenanceGraph::from_json(text)
}

pub fn print_graph(g: &ProvenanceGraph) -> String {
    g.to_json()
}
