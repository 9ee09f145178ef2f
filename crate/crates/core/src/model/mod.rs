//! Finite-domain structural causal models.
//!
//! A [`CausalModel`] pairs a set of exogenous variables with one mechanism
//! per endogenous variable. Models are acyclic ("recursive"), immutable once
//! built, and evaluate in a fixed topological order.

mod domain;
mod expr;
mod valuation;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use domain::{Domain, DomainError, DomainKind, ParseValueError, Tuples, Value};
pub use expr::{Arity, Expr, ExprError, LookupTable, Op};
pub(crate) use expr::Node;
pub use valuation::{Coverage, Valuation};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("mechanism for `{variable}`: {source}")]
    Mechanism {
        variable: String,
        #[source]
        source: ExprError,
    },
    #[error("mechanisms are cyclic: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("`{0}` is exogenous; only endogenous variables can be intervened on")]
    NotEndogenous(String),
    #[error("`{0}` is endogenous; set it with an intervention, not in the context")]
    NotExogenous(String),
    #[error("no value given for exogenous variable `{0}`")]
    MissingExogenous(String),
    #[error("`{variable}` = {value} is outside the domain")]
    ValueOutOfDomain { variable: String, value: Value },
}

/// A structural causal model `(U, V, F)` over one finite domain.
///
/// Variables live in a single name-sorted slot layout; exogenous slots hold
/// no mechanism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CausalModel {
    domain: Domain,
    names: Vec<String>,
    exogenous: Vec<String>,
    endogenous: Vec<String>,
    mechanisms: BTreeMap<String, Expr>,
    compiled: Vec<Option<Node>>,
    order: Vec<usize>,
}

impl CausalModel {
    pub fn new<U, S>(
        domain: Domain,
        exogenous: U,
        mechanisms: impl IntoIterator<Item = (S, Expr)>,
    ) -> Result<CausalModel, ModelError>
    where
        U: IntoIterator,
        U::Item: Into<String>,
        S: Into<String>,
    {
        let mut exo = BTreeSet::new();
        for name in exogenous {
            let name = name.into();
            if !exo.insert(name.clone()) {
                return Err(ModelError::DuplicateVariable(name));
            }
        }
        let mut mechs = BTreeMap::new();
        for (name, expr) in mechanisms {
            let name = name.into();
            if exo.contains(&name) || mechs.contains_key(&name) {
                return Err(ModelError::DuplicateVariable(name));
            }
            mechs.insert(name, expr);
        }
        Self::build(domain, exo.into_iter().collect(), mechs)
    }

    fn build(
        domain: Domain,
        exogenous: Vec<String>,
        mechanisms: BTreeMap<String, Expr>,
    ) -> Result<CausalModel, ModelError> {
        let mut names: Vec<String> = exogenous.iter().chain(mechanisms.keys()).cloned().collect();
        names.sort();
        let resolve = |n: &str| names.binary_search_by(|x| x.as_str().cmp(n)).ok();
        let mut compiled = vec![None; names.len()];
        for (name, expr) in &mechanisms {
            let node = expr
                .compile(&resolve, &domain)
                .map_err(|source| ModelError::Mechanism {
                    variable: name.clone(),
                    source,
                })?;
            compiled[resolve(name).expect("declared")] = Some(node);
        }
        let order = topological_order(&names, &compiled)?;
        Ok(CausalModel {
            domain,
            endogenous: mechanisms.keys().cloned().collect(),
            exogenous,
            names,
            mechanisms,
            compiled,
            order,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Exogenous names, sorted.
    pub fn exogenous(&self) -> &[String] {
        &self.exogenous
    }

    /// Endogenous names, sorted.
    pub fn endogenous(&self) -> &[String] {
        &self.endogenous
    }

    /// All variable names, sorted.
    pub fn variables(&self) -> &[String] {
        &self.names
    }

    pub fn mechanism(&self, name: &str) -> Option<&Expr> {
        self.mechanisms.get(name)
    }

    pub fn mechanisms(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.mechanisms.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_exogenous(&self, name: &str) -> bool {
        self.exogenous.binary_search_by(|x| x.as_str().cmp(name)).is_ok()
    }

    pub fn is_endogenous(&self, name: &str) -> bool {
        self.mechanisms.contains_key(name)
    }

    /// Endogenous variables in evaluation order (ties broken by name).
    pub fn topological_order(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.names[i].as_str()).collect()
    }

    /// Evaluates the model on an exogenous context.
    ///
    /// Every exogenous variable must be assigned; endogenous entries in `exo`
    /// are rejected. The result is the unique consistent valuation extending
    /// `exo`.
    pub fn evaluate(&self, exo: &Valuation) -> Result<Valuation, ModelError> {
        let mut slots = self.context_slots(exo)?;
        self.eval_slots(&mut slots, &[]);
        Ok(self.valuation_of(&slots))
    }

    /// `M[X:=x]`: the mechanism of `X` becomes the constant `x`.
    pub fn intervene(&self, variable: &str, value: Value) -> Result<CausalModel, ModelError> {
        self.intervene_all([(variable, value)])
    }

    /// Applies assignments left to right; a later assignment to the same
    /// variable overwrites an earlier one.
    pub fn intervene_all<'a>(
        &self,
        assignments: impl IntoIterator<Item = (&'a str, Value)>,
    ) -> Result<CausalModel, ModelError> {
        let mut mechanisms = self.mechanisms.clone();
        for (var, value) in assignments {
            if self.is_exogenous(var) {
                return Err(ModelError::NotEndogenous(var.to_string()));
            }
            let slot = mechanisms
                .get_mut(var)
                .ok_or_else(|| ModelError::UnknownVariable(var.to_string()))?;
            if !self.domain.contains(value) {
                return Err(ModelError::ValueOutOfDomain {
                    variable: var.to_string(),
                    value,
                });
            }
            *slot = Expr::Const(value);
        }
        Self::build(self.domain, self.exogenous.clone(), mechanisms)
    }

    /// True iff every endogenous variable equals its mechanism applied to
    /// `val`. Missing variables make a valuation inconsistent.
    pub fn is_consistent(&self, val: &Valuation) -> bool {
        let mut slots = Vec::with_capacity(self.names.len());
        for name in &self.names {
            match val.get(name) {
                Some(v) if self.domain.contains(v) => slots.push(v),
                _ => return false,
            }
        }
        self.order.iter().all(|&i| {
            let node = self.compiled[i].as_ref().expect("endogenous");
            node.eval(&slots, &self.domain) == slots[i]
        })
    }

    /// Parent → child edges for every variable a mechanism mentions.
    pub fn syntactic_graph(&self) -> CausalGraph {
        let mut edges = BTreeSet::new();
        for (child, node) in self.compiled.iter().enumerate() {
            if let Some(node) = node {
                for p in node.slots() {
                    edges.insert((self.names[p].clone(), self.names[child].clone()));
                }
            }
        }
        CausalGraph {
            vertices: self.names.clone(),
            edges,
        }
    }

    /// The graph of true dependencies.
    ///
    /// `P → X` is kept iff two assignments to the variables `X`'s mechanism
    /// reads, differing only at `P`, give different outputs. Decided by
    /// enumerating the parents' cross-product.
    pub fn least_causal_graph(&self) -> CausalGraph {
        let mut edges = BTreeSet::new();
        let elements = self.domain.elements();
        let mut scratch = vec![Value::FALSE; self.names.len()];
        for (child, node) in self.compiled.iter().enumerate() {
            let Some(node) = node else { continue };
            let parents = node.slots();
            for (pi, &p) in parents.iter().enumerate() {
                let depends = self.domain.tuples(parents.len()).any(|tuple| {
                    for (&slot, &v) in parents.iter().zip(&tuple) {
                        scratch[slot] = v;
                    }
                    let base = node.eval(&scratch, &self.domain);
                    let differs = elements.iter().filter(|&&e| e != tuple[pi]).any(|&e| {
                        scratch[p] = e;
                        node.eval(&scratch, &self.domain) != base
                    });
                    scratch[p] = tuple[pi];
                    differs
                });
                if depends {
                    edges.insert((self.names[p].clone(), self.names[child].clone()));
                }
            }
        }
        CausalGraph {
            vertices: self.names.clone(),
            edges,
        }
    }

    pub(crate) fn slot_of(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|x| x.as_str().cmp(name)).ok()
    }

    pub(crate) fn slot_count(&self) -> usize {
        self.names.len()
    }

    pub(crate) fn name_of(&self, slot: usize) -> &str {
        &self.names[slot]
    }

    pub(crate) fn is_endogenous_slot(&self, slot: usize) -> bool {
        self.compiled[slot].is_some()
    }

    pub(crate) fn compiled(&self, slot: usize) -> Option<&Node> {
        self.compiled[slot].as_ref()
    }

    pub(crate) fn order(&self) -> &[usize] {
        &self.order
    }

    /// Slot array with exogenous values filled in, endogenous ones zeroed.
    pub(crate) fn context_slots(&self, exo: &Valuation) -> Result<Vec<Value>, ModelError> {
        for (name, value) in exo.iter() {
            if !self.is_exogenous(name) {
                return Err(if self.is_endogenous(name) {
                    ModelError::NotExogenous(name.to_string())
                } else {
                    ModelError::UnknownVariable(name.to_string())
                });
            }
            if !self.domain.contains(value) {
                return Err(ModelError::ValueOutOfDomain {
                    variable: name.to_string(),
                    value,
                });
            }
        }
        let mut slots = vec![Value::FALSE; self.names.len()];
        for name in &self.exogenous {
            let v = exo
                .get(name)
                .ok_or_else(|| ModelError::MissingExogenous(name.clone()))?;
            slots[self.slot_of(name).expect("declared")] = v;
        }
        Ok(slots)
    }

    /// Fills endogenous slots in topological order. `overrides[i] = Some(v)`
    /// pins slot `i` to `v`, which is an intervention without rebuilding the
    /// model. An empty `overrides` means none.
    pub(crate) fn eval_slots(&self, slots: &mut [Value], overrides: &[Option<Value>]) {
        for &i in &self.order {
            slots[i] = match overrides.get(i).copied().flatten() {
                Some(v) => v,
                None => self.compiled[i]
                    .as_ref()
                    .expect("endogenous")
                    .eval(slots, &self.domain),
            };
        }
    }

    pub(crate) fn valuation_of(&self, slots: &[Value]) -> Valuation {
        self.names.iter().cloned().zip(slots.iter().copied()).collect()
    }
}

/// Kahn's algorithm, always releasing the smallest ready slot so the order
/// is deterministic.
fn topological_order(names: &[String], compiled: &[Option<Node>]) -> Result<Vec<usize>, ModelError> {
    let n = names.len();
    let parents: Vec<Vec<usize>> = compiled
        .iter()
        .map(|c| c.as_ref().map(Node::slots).unwrap_or_default())
        .collect();
    let mut children = vec![Vec::new(); n];
    let mut pending = vec![0usize; n];
    for (child, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(child);
            pending[child] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::new();
    while let Some(i) = ready.pop_first() {
        if compiled[i].is_some() {
            order.push(i);
        }
        for &c in &children[i] {
            pending[c] -= 1;
            if pending[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if let Some(start) = (0..n).find(|&i| pending[i] > 0) {
        return Err(ModelError::Cycle(find_cycle(start, &parents, &pending, names)));
    }
    Ok(order)
}

/// Walks parent links among unreleased slots until a slot repeats.
fn find_cycle(start: usize, parents: &[Vec<usize>], pending: &[usize], names: &[String]) -> Vec<String> {
    let mut path = vec![start];
    let mut at = start;
    loop {
        let next = *parents[at]
            .iter()
            .find(|&&p| pending[p] > 0)
            .expect("an unreleased slot has an unreleased parent");
        if let Some(pos) = path.iter().position(|&x| x == next) {
            let mut cycle: Vec<String> = path[pos..].iter().rev().map(|&i| names[i].clone()).collect();
            cycle.push(cycle[0].clone());
            return cycle;
        }
        path.push(next);
        at = next;
    }
}

/// A directed graph over `U ∪ V`, edges parent → child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalGraph {
    vertices: Vec<String>,
    edges: BTreeSet<(String, String)>,
}

impl CausalGraph {
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges.contains(&(from.to_string(), to.to_string()))
    }

    pub fn parents(&self, node: &str) -> BTreeSet<&str> {
        self.edges
            .iter()
            .filter(|(_, c)| c == node)
            .map(|(p, _)| p.as_str())
            .collect()
    }

    pub fn is_subgraph_of(&self, other: &CausalGraph) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// Nodes reachable from `node` along edges, excluding `node` itself.
    pub fn descendants(&self, node: &str) -> BTreeSet<String> {
        self.reach(node, |(p, c)| (p.as_str(), c.as_str()))
    }

    /// Nodes that reach `node`, excluding `node` itself.
    pub fn ancestors(&self, node: &str) -> BTreeSet<String> {
        self.reach(node, |(p, c)| (c.as_str(), p.as_str()))
    }

    fn reach<'a>(&'a self, node: &str, dir: impl Fn(&'a (String, String)) -> (&'a str, &'a str)) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![node.to_string()];
        while let Some(at) = stack.pop() {
            for e in &self.edges {
                let (from, to) = dir(e);
                if from == at && seen.insert(to.to_string()) {
                    stack.push(to.to_string());
                }
            }
        }
        seen.remove(node);
        seen
    }
}

impl fmt::Display for CausalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, c) in &self.edges {
            writeln!(f, "{p} -> {c}")?;
        }
        Ok(())
    }
}
