//! Semantics definitions and function tables.
//!
//! ```text
//! inputs u x y
//! result r
//! interp pow.interp
//! graph g0 = pow0.json
//! model m = pow.model
//! case-split u { 0 -> g0; 1 -> g1 }
//! ```
//!
//! The rule is one of `constant-graph`, `fixed-graph NAME` or
//! `case-split VAR { VALUE -> NAME; ... }`. Names refer to declared graphs
//! or models. File names are resolved relative to the definition.
//!
//! A function table lists every input tuple:
//!
//! ```text
//! domain mod 5
//! inputs x y
//! 0 0 -> 0
//! 0 1 -> 1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::approx::BlackBoxFunction;
use crate::model::Value;

use super::lexer::{Cursor, Tok};
use super::text::domain;
use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemanticsSpec {
    ConstantGraph,
    FixedGraph(String),
    CaseSplit { variable: String, cases: Vec<(Value, String)> },
}

/// A semantics definition before its file references are loaded.
/// Equality ignores `lines`.
#[derive(Clone, Debug)]
pub struct SemanticsFile {
    pub inputs: Vec<String>,
    pub result: String,
    pub interp: Option<String>,
    pub graphs: Vec<(String, String)>,
    pub models: Vec<(String, String)>,
    pub rule: SemanticsSpec,
    /// Line on which each graph or model name is declared.
    pub lines: BTreeMap<String, usize>,
}

impl PartialEq for SemanticsFile {
    fn eq(&self, other: &SemanticsFile) -> bool {
        (&self.inputs, &self.result, &self.interp, &self.graphs, &self.models, &self.rule)
            == (&other.inputs, &other.result, &other.interp, &other.graphs, &other.models, &other.rule)
    }
}

impl Eq for SemanticsFile {}

pub fn parse_semantics(text: &str) -> Result<SemanticsFile, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut inputs = None;
    let mut result = None;
    let mut interp = None;
    let mut graphs = Vec::new();
    let mut models = Vec::new();
    let mut rule = None;
    let mut lines = BTreeMap::new();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        let (kw, t) = cur.word("a declaration")?;
        let twice = |what: &str| ParseError::new(t.line, t.col, format!("`{what}` declared twice"));
        match kw.as_str() {
            "inputs" => {
                let mut v = Vec::new();
                while !cur.at_line_end() {
                    let (w, wt) = cur.word("an input name")?;
                    if v.contains(&w) {
                        return Err(ParseError::new(wt.line, wt.col, format!("input `{w}` listed twice")));
                    }
                    v.push(w);
                }
                if inputs.replace(v).is_some() {
                    return Err(twice("inputs"));
                }
            }
            "result" => {
                let (w, _) = cur.word("a result name")?;
                if result.replace(w).is_some() {
                    return Err(twice("result"));
                }
            }
            "interp" => {
                if interp.replace(cur.path()?).is_some() {
                    return Err(twice("interp"));
                }
            }
            "graph" | "model" => {
                let (name, nt) = cur.word("a name")?;
                cur.expect(&Tok::Eq)?;
                let file = cur.path()?;
                if lines.insert(name.clone(), nt.line).is_some() {
                    return Err(ParseError::new(nt.line, nt.col, format!("`{name}` declared twice")));
                }
                if kw == "graph" {
                    graphs.push((name, file));
                } else {
                    models.push((name, file));
                }
            }
            "constant-graph" | "fixed-graph" | "case-split" => {
                let r = match kw.as_str() {
                    "constant-graph" => SemanticsSpec::ConstantGraph,
                    "fixed-graph" => SemanticsSpec::FixedGraph(cur.word("a graph or model name")?.0),
                    _ => {
                        let (variable, _) = cur.word("an input name")?;
                        cur.expect(&Tok::LBrace)?;
                        let mut cases: Vec<(Value, String)> = Vec::new();
                        loop {
                            cur.skip_newlines();
                            if cur.eat(&Tok::RBrace) {
                                break;
                            }
                            let vt = cur.peek().clone();
                            let v = cur.value()?;
                            if cases.iter().any(|(w, _)| *w == v) {
                                return Err(ParseError::new(vt.line, vt.col, format!("case {v} listed twice")));
                            }
                            cur.expect(&Tok::Arrow)?;
                            let (name, _) = cur.word("a graph or model name")?;
                            cases.push((v, name));
                            cur.skip_newlines();
                            if !cur.eat(&Tok::Semi) && cur.peek().tok != Tok::RBrace {
                                return Err(cur.unexpected("`;` or `}`"));
                            }
                        }
                        SemanticsSpec::CaseSplit { variable, cases }
                    }
                };
                if rule.replace((r, t.line)).is_some() {
                    return Err(ParseError::new(t.line, t.col, "semantics rule given twice"));
                }
            }
            other => return Err(ParseError::new(t.line, t.col, format!("unknown declaration `{other}`"))),
        }
        cur.end_line()?;
    }
    let missing = |what: &str| ParseError::new(1, 1, format!("missing `{what}` declaration"));
    let (rule, rule_line) = rule.ok_or_else(|| missing("constant-graph, fixed-graph or case-split"))?;
    let names: Vec<&String> = match &rule {
        SemanticsSpec::ConstantGraph => vec![],
        SemanticsSpec::FixedGraph(n) => vec![n],
        SemanticsSpec::CaseSplit { cases, .. } => cases.iter().map(|(_, n)| n).collect(),
    };
    for n in names {
        if !lines.contains_key(n) {
            return Err(ParseError::new(rule_line, 1, format!("`{n}` is not a declared graph or model")));
        }
    }
    Ok(SemanticsFile {
        inputs: inputs.ok_or_else(|| missing("inputs"))?,
        result: result.ok_or_else(|| missing("result"))?,
        interp,
        graphs,
        models,
        rule,
        lines,
    })
}

fn quote(path: &str) -> String {
    if !path.is_empty() && path.chars().all(|c| c.is_alphanumeric() || "_./-".contains(c)) && !path.contains("->") {
        path.to_string()
    } else {
        format!("\"{path}\"")
    }
}

pub fn print_semantics(s: &SemanticsFile) -> String {
    let mut out = String::new();
    writeln!(out, "inputs {}", s.inputs.join(" ")).unwrap();
    writeln!(out, "result {}", s.result).unwrap();
    if let Some(i) = &s.interp {
        writeln!(out, "interp {}", quote(i)).unwrap();
    }
    for (n, f) in &s.graphs {
        writeln!(out, "graph {n} = {}", quote(f)).unwrap();
    }
    for (n, f) in &s.models {
        writeln!(out, "model {n} = {}", quote(f)).unwrap();
    }
    match &s.rule {
        SemanticsSpec::ConstantGraph => writeln!(out, "constant-graph").unwrap(),
        SemanticsSpec::FixedGraph(n) => writeln!(out, "fixed-graph {n}").unwrap(),
        SemanticsSpec::CaseSplit { variable, cases } => {
            let cs: Vec<String> = cases.iter().map(|(v, n)| format!("{v} -> {n}")).collect();
            writeln!(out, "case-split {variable} {{ {} }}", cs.join("; ")).unwrap()
        }
    }
    out
}

pub fn parse_table(text: &str) -> Result<BlackBoxFunction, ParseError> {
    let mut cur = Cursor::new(text)?;
    cur.skip_newlines();
    let (kw, t) = cur.word("`domain`")?;
    if kw != "domain" {
        return Err(ParseError::new(t.line, t.col, "a table starts with `domain`"));
    }
    let dom = domain(&mut cur)?;
    cur.end_line()?;
    cur.skip_newlines();
    let (kw, t) = cur.word("`inputs`")?;
    if kw != "inputs" {
        return Err(ParseError::new(t.line, t.col, "expected `inputs` after `domain`"));
    }
    let mut inputs = Vec::new();
    while !cur.at_line_end() {
        inputs.push(cur.word("an input name")?.0);
    }
    cur.end_line()?;
    let mut rows: BTreeMap<Vec<Value>, Value> = BTreeMap::new();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        let start = cur.peek().clone();
        let mut key = Vec::new();
        while cur.peek().tok != Tok::Arrow {
            let vt = cur.peek().clone();
            let v = cur.value()?;
            if !dom.contains(v) {
                return Err(ParseError::new(vt.line, vt.col, format!("{v} is outside {dom}")));
            }
            key.push(v);
        }
        cur.expect(&Tok::Arrow)?;
        let vt = cur.peek().clone();
        let out = cur.value()?;
        if !dom.contains(out) {
            return Err(ParseError::new(vt.line, vt.col, format!("{out} is outside {dom}")));
        }
        if key.len() != inputs.len() {
            return Err(ParseError::new(
                start.line,
                start.col,
                format!("row has {} inputs, expected {}", key.len(), inputs.len()),
            ));
        }
        if rows.insert(key, out).is_some() {
            return Err(ParseError::new(start.line, start.col, "duplicate row"));
        }
        cur.end_line()?;
    }
    let line = cur.peek().line;
    if let Some(missing) = dom.tuples(inputs.len()).find(|u| !rows.contains_key(u)) {
        let m: Vec<String> = missing.iter().map(Value::to_string).collect();
        return Err(ParseError::new(line, 1, format!("no row for input ({})", m.join(", "))));
    }
    BlackBoxFunction::tabulate(dom, inputs, |u| rows[u]).map_err(|e| ParseError::new(1, 1, e.to_string()))
}

pub fn print_table(f: &BlackBoxFunction) -> String {
    let mut out = String::new();
    writeln!(out, "domain {}", f.domain()).unwrap();
    writeln!(out, "inputs {}", f.inputs().join(" ")).unwrap();
    for u in f.domain().tuples(f.arity()) {
        let k: Vec<String> = u.iter().map(Value::to_string).collect();
        writeln!(out, "{} -> {}", k.join(" "), f.apply(&u)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semantics_round_trip() {
        let text = "inputs u x y\nresult r\ninterp pow.interp\ngraph g0 = pow0.json\ngraph g1 = \"dir name/pow1.json\"\ncase-split u {\n  0 -> g0;\n  1 -> g1\n}\n";
        let s = parse_semantics(text).unwrap();
        assert_eq!(s.inputs, vec!["u", "x", "y"]);
        assert_eq!(s.graphs[1].1, "dir name/pow1.json");
        assert_eq!(
            s.rule,
            SemanticsSpec::CaseSplit {
                variable: "u".into(),
                cases: vec![(Value::Num(0), "g0".into()), (Value::Num(1), "g1".into())]
            }
        );
        let back = parse_semantics(&print_semantics(&s)).unwrap();
        assert_eq!((back.inputs, back.graphs, back.rule), (s.inputs, s.graphs, s.rule));
    }

    #[test]
    fn undeclared_names_and_missing_rules_fail() {
        assert!(parse_semantics("inputs x\nresult r\nfixed-graph g\n").is_err());
        assert!(parse_semantics("inputs x\nresult r\n").is_err());
        assert!(parse_semantics("inputs x\nresult r\nconstant-graph\nconstant-graph\n").is_err());
        let s = parse_semantics("inputs x\nresult r\nconstant-graph\n").unwrap();
        assert_eq!(s.rule, SemanticsSpec::ConstantGraph);
    }

    #[test]
    fn table_round_trip_and_totality() {
        let text = "domain bool\ninputs a b\n0 0 -> 0\n0 1 -> 1\n1 0 -> 1\n1 1 -> 0\n";
        let f = parse_table(text).unwrap();
        assert_eq!(f.apply(&[Value::Num(1), Value::Num(0)]), Value::Num(1));
        assert_eq!(parse_table(&print_table(&f)).unwrap(), f);
        let e = parse_table("domain bool\ninputs a\n0 -> 1\n").unwrap_err();
        assert!(e.message.contains("(1)"));
        assert!(parse_table("domain bool\ninputs a\n0 -> 1\n1 -> 2\n").is_err());
    }
}
