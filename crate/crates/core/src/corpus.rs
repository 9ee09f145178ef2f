//! The bundled example files, embedded so tests and examples can run
//! without a working directory.

use crate::frontend::{Workspace, WorkspaceError};

macro_rules! files {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../examples/", $name)))),*]
    };
}

/// Every bundled file as `(name, text)`.
pub const FILES: &[(&str, &str)] = files![
    "cake.model",
    "cake.json",
    "cake.interp",
    "orgate.model",
    "vacuous.model",
    "vacuous.json",
    "vacuous.interp",
    "divzero.model",
    "chain.model",
    "chain.json",
    "chain.interp",
    "chain_const.sem",
    "chain_exact.sem",
    "pow.model",
    "pow.interp",
    "pow.table",
    "pow0.json",
    "pow1.json",
    "pow2.json",
    "pow3.json",
    "pow4.json",
    "powsem.sem",
    "pow2.sem",
    "pow_const.sem",
    "pow_exact.sem",
];

/// Graphs with the interpretation each is read under.
pub const GRAPHS: &[(&str, &str)] = &[
    ("cake.json", "cake.interp"),
    ("vacuous.json", "vacuous.interp"),
    ("chain.json", "chain.interp"),
    ("pow0.json", "pow.interp"),
    ("pow1.json", "pow.interp"),
    ("pow2.json", "pow.interp"),
    ("pow3.json", "pow.interp"),
    ("pow4.json", "pow.interp"),
];

/// Semantics with the model whose function they describe.
pub const SEMANTICS: &[(&str, &str)] = &[
    ("chain_const.sem", "chain.model"),
    ("chain_exact.sem", "chain.model"),
    ("powsem.sem", "pow.model"),
    ("pow2.sem", "pow.model"),
    ("pow_const.sem", "pow.model"),
    ("pow_exact.sem", "pow.model"),
];

pub fn text(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn resolve(name: &str) -> Result<String, WorkspaceError> {
    text(name).map(str::to_string).ok_or_else(|| WorkspaceError::Io {
        path: name.to_string(),
        message: "not a bundled file".into(),
    })
}

/// A workspace holding every bundled file.
pub fn workspace() -> Result<Workspace, WorkspaceError> {
    let mut ws = Workspace::new();
    for (name, text) in FILES {
        if ws.graph(name).is_some() || ws.model(name).is_some() || ws.interpretation(name).is_some() {
            continue;
        }
        ws.load_text(name, text, &resolve)?;
    }
    Ok(ws)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_loads() {
        let ws = workspace().unwrap();
        assert_eq!(ws.models().count(), 6);
        assert_eq!(ws.graphs().count(), GRAPHS.len());
        assert_eq!(ws.all_semantics().count(), SEMANTICS.len());
        for (g, i) in GRAPHS {
            let report = ws.graph(g).unwrap().validate(ws.interpretation(i));
            assert!(report.is_valid(), "{g}: {report}");
        }
        assert!(ws.table("pow.table").is_some());
    }
}
