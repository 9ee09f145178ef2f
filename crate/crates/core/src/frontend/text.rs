//! The model and interpretation text formats.
//!
//! ```text
//! domain mod 7 with bottom
//! exo x y
//! var s := add(x, y)
//! table t (s) { 0 -> 1; 1 -> 0; ... }
//! context x=1, y=2
//! ```
//!
//! Interpretations use the same expressions:
//!
//! ```text
//! domain mod 7
//! fn plus(a, b) := add(a, b)
//! table neg (a) { 0 -> 0; 1 -> 6; ... }
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::model::{CausalModel, Domain, Expr, ExprError, LookupTable, ModelError, Op, Valuation, Value};
use crate::provenance::{InterpError, Interpretation};

use super::lexer::{Cursor, Tok};
use super::ParseError;

type Pos = (usize, usize);

/// Remembers where names were written so that errors found after parsing
/// can still point into the text.
#[derive(Default)]
struct Positions {
    decls: HashMap<String, Pos>,
    refs: HashMap<(String, String), Pos>,
}

impl Positions {
    fn decl(&self, name: &str) -> Pos {
        self.decls.get(name).copied().unwrap_or((1, 1))
    }

    fn reference(&self, owner: &str, name: &str) -> Pos {
        self.refs
            .get(&(owner.to_string(), name.to_string()))
            .copied()
            .unwrap_or_else(|| self.decl(owner))
    }
}

struct ExprParser<'a> {
    cur: &'a mut Cursor,
    owner: String,
    pos: &'a mut Positions,
}

impl ExprParser<'_> {
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let t = self.cur.peek().clone();
        match &t.tok {
            Tok::Int(_) => Ok(Expr::Const(self.cur.value()?)),
            Tok::Word(w) if w == "bot" => Ok(Expr::Const(self.cur.value()?)),
            Tok::Word(w) if w == "table" && *self.cur.peek2() == Tok::LParen => {
                self.cur.next();
                let parents = parents(self.cur)?;
                for p in &parents {
                    self.pos.refs.entry((self.owner.clone(), p.clone())).or_insert((t.line, t.col));
                }
                Ok(Expr::Lookup(LookupTable::new(parents.clone(), rows(self.cur, parents.len())?)))
            }
            Tok::Word(w) => {
                let w = w.clone();
                self.cur.next();
                if self.cur.peek().tok != Tok::LParen {
                    self.pos.refs.entry((self.owner.clone(), w.clone())).or_insert((t.line, t.col));
                    return Ok(Expr::Var(w));
                }
                let op: Op = w
                    .parse()
                    .map_err(|_| ParseError::new(t.line, t.col, format!("unknown operator `{w}`")))?;
                self.cur.next();
                let mut args = Vec::new();
                if !self.cur.eat(&Tok::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if self.cur.eat(&Tok::RParen) {
                            break;
                        }
                        self.cur.expect(&Tok::Comma)?;
                    }
                }
                if !op.arity().accepts(args.len()) {
                    return Err(ParseError::new(
                        t.line,
                        t.col,
                        format!("`{op}` expects {} argument(s), got {}", op.arity(), args.len()),
                    ));
                }
                Ok(Expr::Apply(op, args))
            }
            _ => Err(self.cur.unexpected("an expression")),
        }
    }
}

/// `(a b c)`, commas optional.
fn parents(cur: &mut Cursor) -> Result<Vec<String>, ParseError> {
    cur.expect(&Tok::LParen)?;
    let mut out = Vec::new();
    loop {
        if cur.eat(&Tok::RParen) {
            return Ok(out);
        }
        let (w, _) = cur.word("a parameter name")?;
        out.push(w);
        cur.eat(&Tok::Comma);
    }
}

/// `{ 0 1 -> 1; 1 0 -> 1 }`, which may span lines.
fn rows(cur: &mut Cursor, width: usize) -> Result<BTreeMap<Vec<Value>, Value>, ParseError> {
    cur.expect(&Tok::LBrace)?;
    let mut out = BTreeMap::new();
    loop {
        cur.skip_newlines();
        if cur.eat(&Tok::RBrace) {
            return Ok(out);
        }
        let start = cur.peek().clone();
        let mut key = Vec::new();
        while cur.peek().tok != Tok::Arrow {
            key.push(cur.value()?);
            cur.eat(&Tok::Comma);
        }
        cur.expect(&Tok::Arrow)?;
        let v = cur.value()?;
        if key.len() != width {
            return Err(ParseError::new(
                start.line,
                start.col,
                format!("table row has {} entries, expected {width}", key.len()),
            ));
        }
        if out.insert(key, v).is_some() {
            return Err(ParseError::new(start.line, start.col, "duplicate table row"));
        }
        cur.skip_newlines();
        if !cur.eat(&Tok::Semi) && cur.peek().tok != Tok::RBrace {
            return Err(cur.unexpected("`;` or `}`"));
        }
    }
}

pub(crate) fn domain(cur: &mut Cursor) -> Result<Domain, ParseError> {
    let t = cur.peek().clone();
    let (kind, _) = cur.word("`bool` or `mod`")?;
    let d = match kind.as_str() {
        "bool" => Domain::boolean(),
        "mod" => {
            let m = if let Tok::Int(_) = cur.peek().tok { cur.int("a modulus")? } else { 7 };
            Domain::modular(m).map_err(|e| ParseError::new(t.line, t.col, e.to_string()))?
        }
        other => return Err(ParseError::new(t.line, t.col, format!("unknown domain `{other}`"))),
    };
    if let Tok::Word(w) = &cur.peek().tok {
        if w == "with" {
            cur.next();
            let (b, tb) = cur.word("`bottom`")?;
            if b != "bottom" {
                return Err(ParseError::new(tb.line, tb.col, "expected `bottom`"));
            }
            return Ok(d.with_bottom());
        }
    }
    Ok(d)
}

fn once<T>(slot: &mut Option<T>, v: T, at: Pos, what: &str) -> Result<(), ParseError> {
    if slot.is_some() {
        return Err(ParseError::new(at.0, at.1, format!("`{what}` declared twice")));
    }
    *slot = Some(v);
    Ok(())
}

/// A parsed model file: the model and an optional default context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub model: CausalModel,
    pub context: Option<Valuation>,
}

pub fn parse_model(text: &str) -> Result<CausalModel, ParseError> {
    parse_model_file(text).map(|f| f.model)
}

pub fn parse_model_file(text: &str) -> Result<ModelFile, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut pos = Positions::default();
    let mut dom = None;
    let mut exo: Vec<String> = Vec::new();
    let mut mechs: Vec<(String, Expr)> = Vec::new();
    let mut context: Option<(Valuation, Pos)> = None;
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        let (kw, t) = cur.word("a declaration")?;
        let at = (t.line, t.col);
        match kw.as_str() {
            "domain" => once(&mut dom, domain(&mut cur)?, at, "domain")?,
            "exo" => {
                if cur.at_line_end() {
                    return Err(cur.unexpected("a variable name"));
                }
                while !cur.at_line_end() {
                    let (name, t) = cur.word("a variable name")?;
                    declare(&mut pos, &name, (t.line, t.col))?;
                    exo.push(name);
                }
            }
            "var" => {
                let (name, t) = cur.word("a variable name")?;
                declare(&mut pos, &name, (t.line, t.col))?;
                cur.expect(&Tok::Assign)?;
                let e = ExprParser {
                    cur: &mut cur,
                    owner: name.clone(),
                    pos: &mut pos,
                }
                .expr()?;
                mechs.push((name, e));
            }
            "table" => {
                let (name, t) = cur.word("a variable name")?;
                declare(&mut pos, &name, (t.line, t.col))?;
                let ps = parents(&mut cur)?;
                for p in &ps {
                    pos.refs.insert((name.clone(), p.clone()), (t.line, t.col));
                }
                let table = rows(&mut cur, ps.len())?;
                mechs.push((name, Expr::Lookup(LookupTable::new(ps, table))));
            }
            "context" => {
                let mut val = Valuation::new();
                while !cur.at_line_end() {
                    let (name, t) = cur.word("a variable name")?;
                    cur.expect(&Tok::Eq)?;
                    let v = cur.value()?;
                    if val.insert(name.clone(), v).is_some() {
                        return Err(ParseError::new(t.line, t.col, format!("`{name}` assigned twice")));
                    }
                    pos.refs.insert(("context".into(), name), (t.line, t.col));
                    cur.eat(&Tok::Comma);
                }
                once(&mut context, (val, at), at, "context")?;
            }
            other => return Err(ParseError::new(at.0, at.1, format!("unknown declaration `{other}`"))),
        }
        cur.end_line()?;
    }
    let domain = dom.ok_or_else(|| ParseError::new(1, 1, "missing `domain` declaration"))?;
    let model = CausalModel::new(domain, exo, mechs).map_err(|e| locate(&pos, e))?;
    let context = match context {
        None => None,
        Some((val, at)) => {
            for (name, v) in val.iter() {
                let p = pos.reference("context", name);
                if !model.is_exogenous(name) {
                    return Err(ParseError::new(p.0, p.1, format!("`{name}` is not an exogenous variable")));
                }
                if !domain.contains(v) {
                    return Err(ParseError::new(p.0, p.1, format!("{v} is outside {domain}")));
                }
            }
            if let Some(missing) = model.exogenous().iter().find(|u| !val.contains(u)) {
                return Err(ParseError::new(at.0, at.1, format!("context gives no value for `{missing}`")));
            }
            Some(val)
        }
    };
    Ok(ModelFile { model, context })
}

fn declare(pos: &mut Positions, name: &str, at: Pos) -> Result<(), ParseError> {
    if name == "bot" || name == "table" {
        return Err(ParseError::new(at.0, at.1, format!("`{name}` is reserved")));
    }
    if pos.decls.insert(name.to_string(), at).is_some() {
        return Err(ParseError::new(at.0, at.1, format!("variable `{name}` is declared more than once")));
    }
    Ok(())
}

fn locate(pos: &Positions, e: ModelError) -> ParseError {
    let at = match &e {
        ModelError::Mechanism {
            variable,
            source: ExprError::UnknownVariable(v),
        } => pos.reference(variable, v),
        ModelError::Mechanism { variable, .. } => pos.decl(variable),
        ModelError::Cycle(path) => path.first().map_or((1, 1), |v| pos.decl(v)),
        ModelError::DuplicateVariable(v) | ModelError::UnknownVariable(v) => pos.decl(v),
        _ => (1, 1),
    };
    ParseError::new(at.0, at.1, e.to_string())
}

/// Prints a model so that [`parse_model_file`] reads it back.
pub fn print_model(model: &CausalModel, context: Option<&Valuation>) -> String {
    let mut s = String::new();
    writeln!(s, "domain {}", model.domain()).unwrap();
    if !model.exogenous().is_empty() {
        writeln!(s, "exo {}", model.exogenous().join(" ")).unwrap();
    }
    for name in model.topological_order() {
        if let Some(e) = model.mechanism(name) {
            match e {
                Expr::Lookup(t) => writeln!(s, "table {name} ({}) {}", t.parents().join(" "), print_rows(t)).unwrap(),
                e => writeln!(s, "var {name} := {e}").unwrap(),
            }
        }
    }
    if let Some(ctx) = context {
        let parts: Vec<String> = ctx.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(s, "context {}", parts.join(", ")).unwrap();
    }
    s
}

fn print_rows(t: &LookupTable) -> String {
    let rows: Vec<String> = t
        .rows()
        .iter()
        .map(|(k, v)| {
            let mut r: Vec<String> = k.iter().map(Value::to_string).collect();
            r.push("->".into());
            r.push(v.to_string());
            r.join(" ")
        })
        .collect();
    format!("{{ {} }}", rows.join("; "))
}

pub fn parse_interpretation(text: &str) -> Result<Interpretation, ParseError> {
    let mut cur = Cursor::new(text)?;
    let mut pos = Positions::default();
    let mut dom = None;
    let mut defs: Vec<(String, Vec<String>, Expr, Pos)> = Vec::new();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        let (kw, t) = cur.word("a declaration")?;
        let at = (t.line, t.col);
        match kw.as_str() {
            "domain" => once(&mut dom, domain(&mut cur)?, at, "domain")?,
            "fn" => {
                let (name, t) = cur.word("a function name")?;
                let params = parents(&mut cur)?;
                cur.expect(&Tok::Assign)?;
                let body = ExprParser {
                    cur: &mut cur,
                    owner: name.clone(),
                    pos: &mut pos,
                }
                .expr()?;
                defs.push((name, params, body, (t.line, t.col)));
            }
            "table" => {
                let (name, t) = cur.word("a function name")?;
                let params = parents(&mut cur)?;
                let table = rows(&mut cur, params.len())?;
                let body = Expr::Lookup(LookupTable::new(params.clone(), table));
                defs.push((name, params, body, (t.line, t.col)));
            }
            other => return Err(ParseError::new(at.0, at.1, format!("unknown declaration `{other}`"))),
        }
        cur.end_line()?;
    }
    let domain = dom.ok_or_else(|| ParseError::new(1, 1, "missing `domain` declaration"))?;
    let mut interp = Interpretation::new(domain);
    for (name, params, body, at) in defs {
        interp.define(name.clone(), params, body).map_err(|e| {
            let at = match &e {
                InterpError::Body {
                    source: ExprError::UnknownVariable(v),
                    ..
                } => pos.reference(&name, v),
                _ => at,
            };
            ParseError::new(at.0, at.1, e.to_string())
        })?;
    }
    Ok(interp)
}

/// Prints an interpretation so that [`parse_interpretation`] reads it back.
pub fn print_interpretation(interp: &Interpretation) -> String {
    let mut s = String::new();
    writeln!(s, "domain {}", interp.domain()).unwrap();
    for (name, f) in interp.functions() {
        match f.body() {
            Expr::Lookup(t) if t.parents() == f.params() => {
                writeln!(s, "table {name} ({}) {}", f.params().join(" "), print_rows(t)).unwrap()
            }
            body => writeln!(s, "fn {name}({}) := {body}", f.params().join(", ")).unwrap(),
        }
    }
    s
}
