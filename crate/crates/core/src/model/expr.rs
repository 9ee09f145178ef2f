//! Mechanism expressions.
//!
//! An [`Expr`] is the syntactic form of a mechanism: variables, constants,
//! built-in operators in prefix form, and total lookup tables. Before
//! evaluation an expression is compiled against a slot layout into a
//! [`Node`], which evaluates without name lookups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::domain::{Domain, Value};

/// Built-in operators. All of them are strict in `bot`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    And,
    Or,
    Not,
    Xor,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Eq,
    Ite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl Arity {
    pub fn accepts(self, n: usize) -> bool {
        match self {
            Arity::Exactly(k) => n == k,
            Arity::AtLeast(k) => n >= k,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Exactly(k) => write!(f, "exactly {k}"),
            Arity::AtLeast(k) => write!(f, "at least {k}"),
        }
    }
}

impl Op {
    pub const ALL: [Op; 11] = [
        Op::And,
        Op::Or,
        Op::Not,
        Op::Xor,
        Op::Add,
        Op::Sub,
        Op::Mul,
        Op::Div,
        Op::Pow,
        Op::Eq,
        Op::Ite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::And => "and",
            Op::Or => "or",
            Op::Not => "not",
            Op::Xor => "xor",
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
            Op::Div => "div",
            Op::Pow => "pow",
            Op::Eq => "eq",
            Op::Ite => "ite",
        }
    }

    pub fn arity(self) -> Arity {
        match self {
            Op::And | Op::Or | Op::Xor | Op::Add | Op::Mul => Arity::AtLeast(1),
            Op::Not => Arity::Exactly(1),
            Op::Sub | Op::Div | Op::Pow | Op::Eq => Arity::Exactly(2),
            Op::Ite => Arity::Exactly(3),
        }
    }

    /// Applies the operator to already-evaluated arguments.
    ///
    /// Logical operators treat any nonzero value as true and return `0`/`1`.
    /// Arithmetic is modulo the domain's modulus; `div` is floor division of
    /// the canonical representatives and yields [`Domain::undefined`] for a
    /// zero divisor.
    pub fn apply(self, args: &[Value], domain: &Domain) -> Value {
        if args.iter().any(|a| a.is_bottom()) {
            return Value::Bottom;
        }
        let m = u64::from(domain.modulus());
        let n = |i: usize| u64::from(args[i].num().unwrap_or(0));
        let truthy = |i: usize| n(i) != 0;
        let num = |x: u64| Value::Num((x % m) as u32);
        match self {
            Op::And => Value::from_bool((0..args.len()).all(truthy)),
            Op::Or => Value::from_bool((0..args.len()).any(truthy)),
            Op::Not => Value::from_bool(!truthy(0)),
            Op::Xor => Value::from_bool((0..args.len()).filter(|&i| truthy(i)).count() % 2 == 1),
            Op::Add => num((0..args.len()).map(n).fold(0, |acc, x| (acc + x) % m)),
            Op::Mul => num((0..args.len()).map(n).fold(1, |acc, x| (acc * x) % m)),
            Op::Sub => num(n(0) + m - n(1) % m),
            Op::Div => {
                if n(1) == 0 {
                    domain.undefined()
                } else {
                    num(n(0) / n(1))
                }
            }
            Op::Pow => {
                let (mut base, mut exp, mut acc) = (n(0) % m, n(1), 1 % m);
                while exp > 0 {
                    if exp & 1 == 1 {
                        acc = acc * base % m;
                    }
                    base = base * base % m;
                    exp >>= 1;
                }
                num(acc)
            }
            Op::Eq => Value::from_bool(args[0] == args[1]),
            Op::Ite => {
                if truthy(0) {
                    args[1]
                } else {
                    args[2]
                }
            }
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Op {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Op, ExprError> {
        Op::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| ExprError::UnknownOperator(s.to_string()))
    }
}

/// An explicit table keyed by tuples of parent values.
///
/// Rows must cover every tuple of ordinary values. Tuples containing `bot`
/// may be listed; unlisted ones map to `bot`, so tables are strict like the
/// built-in operators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LookupTable {
    parents: Vec<String>,
    rows: BTreeMap<Vec<Value>, Value>,
}

impl LookupTable {
    pub fn new(parents: Vec<String>, rows: BTreeMap<Vec<Value>, Value>) -> LookupTable {
        LookupTable { parents, rows }
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn rows(&self) -> &BTreeMap<Vec<Value>, Value> {
        &self.rows
    }

    fn dense(&self, domain: &Domain) -> Result<Vec<Value>, ExprError> {
        let k = self.parents.len();
        for (key, out) in &self.rows {
            if key.len() != k {
                return Err(ExprError::TableRowWidth {
                    expected: k,
                    got: key.len(),
                });
            }
            if let Some(bad) = key.iter().chain(Some(out)).find(|v| !domain.contains(**v)) {
                return Err(ExprError::ValueOutOfDomain(*bad));
            }
        }
        let count = domain.tuple_count(k).ok_or(ExprError::TableTooLarge)?;
        if count > 1 << 20 {
            return Err(ExprError::TableTooLarge);
        }
        let mut dense = Vec::with_capacity(count);
        for tuple in domain.tuples(k) {
            match self.rows.get(&tuple) {
                Some(out) => dense.push(*out),
                None if tuple.iter().any(|v| v.is_bottom()) => dense.push(Value::Bottom),
                None => return Err(ExprError::TableIncomplete { missing: tuple }),
            }
        }
        Ok(dense)
    }
}

/// Mechanism expression over named variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Const(Value),
    Apply(Op, Vec<Expr>),
    Lookup(LookupTable),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("`{op}` expects {expected} argument(s), got {got}")]
    Arity { op: Op, expected: Arity, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {0} is not in the domain")]
    ValueOutOfDomain(Value),
    #[error("table row has {got} entries, expected {expected}")]
    TableRowWidth { expected: usize, got: usize },
    #[error("table has no row for input {}", fmt_tuple(missing))]
    TableIncomplete { missing: Vec<Value> },
    #[error("table is too large to tabulate")]
    TableTooLarge,
}

fn fmt_tuple(t: &[Value]) -> String {
    let inner: Vec<String> = t.iter().map(Value::to_string).collect();
    format!("({})", inner.join(", "))
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn constant(v: Value) -> Expr {
        Expr::Const(v)
    }

    pub fn apply(op: Op, args: Vec<Expr>) -> Expr {
        Expr::Apply(op, args)
    }

    /// Distinct variables mentioned anywhere in the expression.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Const(_) => {}
            Expr::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Expr::Lookup(t) => out.extend(t.parents.iter().map(String::as_str)),
        }
    }

    /// Replaces every variable by `f(name)`. Table parents must map to
    /// variables; a table parent mapped to anything else is an error.
    pub fn rename(&self, f: &dyn Fn(&str) -> Option<String>) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Var(v) => Expr::Var(f(v).ok_or_else(|| ExprError::UnknownVariable(v.clone()))?),
            Expr::Const(c) => Expr::Const(*c),
            Expr::Apply(op, args) => Expr::Apply(
                *op,
                args.iter().map(|a| a.rename(f)).collect::<Result<_, _>>()?,
            ),
            Expr::Lookup(t) => Expr::Lookup(LookupTable {
                parents: t
                    .parents
                    .iter()
                    .map(|p| f(p).ok_or_else(|| ExprError::UnknownVariable(p.clone())))
                    .collect::<Result<_, _>>()?,
                rows: t.rows.clone(),
            }),
        })
    }

    /// Resolves names to slots and checks arities, constants and tables.
    pub(crate) fn compile(
        &self,
        resolve: &dyn Fn(&str) -> Option<usize>,
        domain: &Domain,
    ) -> Result<Node, ExprError> {
        let slot = |name: &str| resolve(name).ok_or_else(|| ExprError::UnknownVariable(name.into()));
        Ok(match self {
            Expr::Var(v) => Node::Slot(slot(v)?),
            Expr::Const(c) => {
                if !domain.contains(*c) {
                    return Err(ExprError::ValueOutOfDomain(*c));
                }
                Node::Const(*c)
            }
            Expr::Apply(op, args) => {
                if !op.arity().accepts(args.len()) {
                    return Err(ExprError::Arity {
                        op: *op,
                        expected: op.arity(),
                        got: args.len(),
                    });
                }
                Node::Apply(
                    *op,
                    args.iter()
                        .map(|a| a.compile(resolve, domain))
                        .collect::<Result<_, _>>()?,
                )
            }
            Expr::Lookup(t) => Node::Lookup {
                args: t.parents.iter().map(|p| slot(p)).collect::<Result<_, _>>()?,
                table: t.dense(domain)?.into(),
            },
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Apply(op, args) => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Expr::Lookup(t) => {
                write!(f, "table({}) {{", t.parents.join(" "))?;
                for (i, (k, v)) in t.rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    f.write_str(" ")?;
                    for x in k {
                        write!(f, "{x} ")?;
                    }
                    write!(f, "-> {v}")?;
                }
                f.write_str(" }")
            }
        }
    }
}

/// Compiled expression over a slot array.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Node {
    Slot(usize),
    Const(Value),
    Apply(Op, Box<[Node]>),
    Lookup { args: Box<[usize]>, table: Arc<[Value]> },
}

impl Node {
    pub(crate) fn eval(&self, slots: &[Value], domain: &Domain) -> Value {
        match self {
            Node::Slot(i) => slots[*i],
            Node::Const(c) => *c,
            Node::Apply(op, args) => {
                let mut buf = [Value::FALSE; 8];
                if args.len() <= buf.len() {
                    for (b, a) in buf.iter_mut().zip(args.iter()) {
                        *b = a.eval(slots, domain);
                    }
                    op.apply(&buf[..args.len()], domain)
                } else {
                    let vals: Vec<Value> = args.iter().map(|a| a.eval(slots, domain)).collect();
                    op.apply(&vals, domain)
                }
            }
            Node::Lookup { args, table } => {
                let k = domain.size();
                let idx = args
                    .iter()
                    .fold(0, |acc, &s| acc * k + domain.index_of(slots[s]));
                table[idx]
            }
        }
    }

    /// Slots read by this node, deduplicated and sorted.
    pub(crate) fn slots(&self) -> Vec<usize> {
        let mut out = BTreeSet::new();
        self.collect_slots(&mut out);
        out.into_iter().collect()
    }

    fn collect_slots(&self, out: &mut BTreeSet<usize>) {
        match self {
            Node::Slot(i) => {
                out.insert(*i);
            }
            Node::Const(_) => {}
            Node::Apply(_, args) => args.iter().for_each(|a| a.collect_slots(out)),
            Node::Lookup { args, .. } => out.extend(args.iter().copied()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> Value {
        Value::Num(n)
    }

    #[test]
    fn boolean_operators() {
        let d = Domain::boolean();
        assert_eq!(Op::And.apply(&[v(1), v(1), v(0)], &d), v(0));
        assert_eq!(Op::And.apply(&[v(1)], &d), v(1));
        assert_eq!(Op::Or.apply(&[v(0), v(1)], &d), v(1));
        assert_eq!(Op::Xor.apply(&[v(1), v(1), v(1)], &d), v(1));
        assert_eq!(Op::Xor.apply(&[v(1), v(1)], &d), v(0));
        assert_eq!(Op::Not.apply(&[v(0)], &d), v(1));
        assert_eq!(Op::Ite.apply(&[v(0), v(1), v(0)], &d), v(0));
    }

    #[test]
    fn modular_arithmetic() {
        let d = Domain::modular(7).unwrap();
        assert_eq!(Op::Add.apply(&[v(5), v(4)], &d), v(2));
        assert_eq!(Op::Sub.apply(&[v(1), v(3)], &d), v(5));
        assert_eq!(Op::Mul.apply(&[v(5), v(2)], &d), v(3));
        assert_eq!(Op::Pow.apply(&[v(5), v(2)], &d), v(4));
        assert_eq!(Op::Pow.apply(&[v(0), v(0)], &d), v(1));
        assert_eq!(Op::Div.apply(&[v(6), v(4)], &d), v(1));
        // no bottom: undefined collapses to 0
        assert_eq!(Op::Div.apply(&[v(6), v(0)], &d), v(0));
    }

    #[test]
    fn bottom_is_strict() {
        let d = Domain::modular(7).unwrap().with_bottom();
        assert_eq!(Op::Div.apply(&[v(3), v(0)], &d), Value::Bottom);
        for op in Op::ALL {
            let n = match op.arity() {
                Arity::Exactly(k) | Arity::AtLeast(k) => k,
            };
            let mut args = vec![v(0); n];
            args[n - 1] = Value::Bottom;
            assert_eq!(op.apply(&args, &d), Value::Bottom, "{op}");
        }
        // even when the bottom sits in the branch ite would not take
        assert_eq!(Op::Ite.apply(&[v(1), v(2), Value::Bottom], &d), Value::Bottom);
    }

    #[test]
    fn compile_checks_arity_and_names() {
        let d = Domain::boolean();
        let resolve = |n: &str| (n == "A").then_some(0);
        let bad = Expr::apply(Op::Not, vec![Expr::var("A"), Expr::var("A")]);
        assert!(matches!(bad.compile(&resolve, &d), Err(ExprError::Arity { .. })));
        let missing = Expr::var("B");
        assert_eq!(
            missing.compile(&resolve, &d),
            Err(ExprError::UnknownVariable("B".into()))
        );
        assert_eq!(
            Expr::constant(v(2)).compile(&resolve, &d),
            Err(ExprError::ValueOutOfDomain(v(2)))
        );
    }

    #[test]
    fn tables_must_be_total() {
        let d = Domain::boolean();
        let mut rows = BTreeMap::new();
        rows.insert(vec![v(0)], v(1));
        let t = Expr::Lookup(LookupTable::new(vec!["A".into()], rows.clone()));
        let resolve = |n: &str| (n == "A").then_some(0);
        assert_eq!(
            t.compile(&resolve, &d),
            Err(ExprError::TableIncomplete { missing: vec![v(1)] })
        );
        rows.insert(vec![v(1)], v(0));
        let t = Expr::Lookup(LookupTable::new(vec!["A".into()], rows));
        let node = t.compile(&resolve, &d).unwrap();
        assert_eq!(node.eval(&[v(0)], &d), v(1));
        assert_eq!(node.eval(&[v(1)], &d), v(0));
    }

    #[test]
    fn table_rows_with_bottom_default_to_bottom() {
        let d = Domain::boolean().with_bottom();
        let rows = [(vec![v(0)], v(1)), (vec![v(1)], v(1))].into_iter().collect();
        let t = Expr::Lookup(LookupTable::new(vec!["A".into()], rows));
        let node = t.compile(&|_| Some(0), &d).unwrap();
        assert_eq!(node.eval(&[Value::Bottom], &d), Value::Bottom);
    }

    #[test]
    fn display_is_prefix_form() {
        let e = Expr::apply(
            Op::Xor,
            vec![
                Expr::apply(Op::And, vec![Expr::var("Water"), Expr::var("Sugar")]),
                Expr::var("U1"),
            ],
        );
        assert_eq!(e.to_string(), "xor(and(Water, Sugar), U1)");
        assert_eq!(
            e.variables().into_iter().collect::<Vec<_>>(),
            vec!["Sugar", "U1", "Water"]
        );
    }
}
