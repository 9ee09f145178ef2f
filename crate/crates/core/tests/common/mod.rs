//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use causeway::model::{CausalModel, Domain, Expr, Valuation, Value};
use causeway::provenance::{Interpretation, ProvenanceGraph};

/// Straight-line evaluator over a model, written against the public
/// expression tree only.
pub struct Evaluator {
    domain: Domain,
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    steps: Vec<(usize, Expr)>,
}

impl Evaluator {
    pub fn new(m: &CausalModel) -> Evaluator {
        let names: Vec<String> = m.variables().to_vec();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let steps = m
            .topological_order()
            .into_iter()
            .filter_map(|n| m.mechanism(n).map(|e| (n.to_string(), e.clone())))
            .map(|(n, e)| (names.iter().position(|x| *x == n).unwrap(), e))
            .collect();
        Evaluator {
            domain: *m.domain(),
            names,
            index,
            steps,
        }
    }

    pub fn slot(&self, name: &str) -> usize {
        self.index[name]
    }

    fn expr(&self, e: &Expr, vals: &[Value]) -> Value {
        match e {
            Expr::Var(v) => vals[self.index[v]],
            Expr::Const(c) => *c,
            Expr::Apply(op, args) => {
                let a: Vec<Value> = args.iter().map(|x| self.expr(x, vals)).collect();
                op.apply(&a, &self.domain)
            }
            Expr::Lookup(t) => {
                let key: Vec<Value> = t.parents().iter().map(|p| vals[self.index[p]]).collect();
                t.rows().get(&key).copied().unwrap_or(Value::Bottom)
            }
        }
    }

    /// Evaluates with `fixed[i] = Some(v)` replacing the mechanism of slot `i`.
    pub fn run(&self, context: &Valuation, fixed: &[Option<Value>]) -> Vec<Value> {
        let mut vals = vec![Value::Num(0); self.names.len()];
        for (n, v) in context.iter() {
            vals[self.index[n]] = v;
        }
        for (i, e) in &self.steps {
            vals[*i] = match fixed[*i] {
                Some(v) => v,
                None => self.expr(e, &vals),
            };
        }
        vals
    }

    pub fn valuation(&self, vals: &[Value]) -> Valuation {
        self.names.iter().cloned().zip(vals.iter().copied()).collect()
    }
}

pub fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0u64..1 << items.len())
        .map(|m| (0..items.len()).filter(|i| m & (1 << i) != 0).map(|i| items[i].clone()).collect())
        .collect()
}

pub fn tuples(domain: &Domain, n: usize) -> Vec<Vec<Value>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                domain.elements().into_iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

fn mentions(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Const(_) => {}
        Expr::Apply(_, args) => args.iter().for_each(|a| mentions(a, out)),
        Expr::Lookup(t) => out.extend(t.parents().iter().cloned()),
    }
}

/// Variables whose mechanism can reach `y`, read off the expressions.
pub fn ancestors(m: &CausalModel, y: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![y.to_string()];
    while let Some(n) = stack.pop() {
        let mut ps = BTreeSet::new();
        if let Some(e) = m.mechanism(&n) {
            mentions(e, &mut ps);
        }
        for p in ps {
            if seen.insert(p.clone()) {
                stack.push(p);
            }
        }
    }
    seen
}

/// Weak cause, read directly off the definition: some `W ⊆ V − X`, `x'`
/// and `w'` flip `Y`, and fixing `X = x`, `W = w'` keeps `Y = y` whatever
/// subset `Z` of the remaining variables is reset to its actual value.
/// `W` and `Z` range over ancestors of `Y` only; fixing anything else
/// cannot change `Y`.
pub fn naive_weak(m: &CausalModel, ctx: &Valuation, causes: &Valuation, y: &str, yv: Value) -> bool {
    let ev = Evaluator::new(m);
    let n = m.variables().len();
    let sigma = ev.run(ctx, &vec![None; n]);
    let x_slots: Vec<usize> = causes.names().map(|c| ev.slot(c)).collect();
    let x_vals: Vec<Value> = causes.iter().map(|(_, v)| v).collect();
    let ys = ev.slot(y);
    if x_slots.iter().zip(&x_vals).any(|(&s, &v)| sigma[s] != v) || sigma[ys] != yv {
        return false;
    }
    let anc = ancestors(m, y);
    let rest: Vec<usize> = m
        .endogenous()
        .iter()
        .filter(|v| anc.contains(*v))
        .map(|v| ev.slot(v))
        .filter(|s| !x_slots.contains(s))
        .collect();
    let domain = m.domain();
    for w in subsets(&rest) {
        let z_pool: Vec<usize> = rest.iter().copied().filter(|s| !w.contains(s)).collect();
        for x_alt in tuples(domain, x_slots.len()) {
            for w_alt in tuples(domain, w.len()) {
                let mut fixed = vec![None; n];
                for (&s, &v) in x_slots.iter().zip(&x_alt).chain(w.iter().zip(&w_alt)) {
                    fixed[s] = Some(v);
                }
                if ev.run(ctx, &fixed)[ys] == yv {
                    continue;
                }
                let blocked = subsets(&z_pool).into_iter().all(|z| {
                    let mut fixed = vec![None; n];
                    for (&s, &v) in x_slots.iter().zip(&x_vals).chain(w.iter().zip(&w_alt)) {
                        fixed[s] = Some(v);
                    }
                    for &s in &z {
                        fixed[s] = Some(sigma[s]);
                    }
                    ev.run(ctx, &fixed)[ys] == yv
                });
                if blocked {
                    return true;
                }
            }
        }
    }
    false
}

/// All weak causes with at most `max` conjuncts, drawn from `V − {Y}`.
pub fn naive_weak_causes(m: &CausalModel, ctx: &Valuation, y: &str, yv: Value, max: usize) -> BTreeSet<Valuation> {
    let sigma = m.evaluate(ctx).unwrap();
    let pool: Vec<String> = m.endogenous().iter().filter(|v| *v != y).cloned().collect();
    subsets(&pool)
        .into_iter()
        .filter(|s| !s.is_empty() && s.len() <= max)
        .map(|s| s.iter().map(|v| (v.clone(), sigma.get(v).unwrap())).collect::<Valuation>())
        .filter(|x| naive_weak(m, ctx, x, y, yv))
        .collect()
}

/// Weak causes with no weak proper subset.
pub fn minimal(weak: &BTreeSet<Valuation>) -> BTreeSet<Valuation> {
    weak.iter()
        .filter(|x| !weak.iter().any(|o| o != *x && o.is_subset_of(x)))
        .cloned()
        .collect()
}

/// The four cake equations, computed directly.
pub fn cake(water: bool, sugar: bool, eggs: bool, flour: bool, butter: bool, pan: bool, u: [bool; 4]) -> [bool; 4] {
    let mix = (water && sugar && eggs && flour && butter) ^ u[0];
    let batter = mix ^ u[1];
    let bake = (batter && pan) ^ u[2];
    let cake = bake ^ u[3];
    [mix, batter, bake, cake]
}

/// Runs a graph on an input tuple by recursion from the result, applying
/// the interpretation at each process.
pub fn run_graph(g: &ProvenanceGraph, interp: &Interpretation, input: &[Value]) -> Value {
    fn value(g: &ProvenanceGraph, interp: &Interpretation, inputs: &BTreeMap<&str, Value>, a: &str) -> Value {
        if let Some(v) = inputs.get(a) {
            return *v;
        }
        let producer = g.generated_edges().iter().find(|e| e.artifact == a);
        match producer {
            None => g.artifact(a).unwrap().value,
            Some(e) => {
                let mut args: Vec<_> = g.used_edges().iter().filter(|u| u.process == e.process).collect();
                args.sort_by_key(|u| u.position);
                let vals: Vec<Value> = args.iter().map(|u| value(g, interp, inputs, &u.artifact)).collect();
                interp.apply(&g.process(&e.process).unwrap().name, &vals).unwrap()
            }
        }
    }
    let inputs: BTreeMap<&str, Value> = g.inputs().iter().map(String::as_str).zip(input.iter().copied()).collect();
    value(g, interp, &inputs, g.result())
}

/// Nodes reachable from `start` along `edges`, excluding `start`.
pub fn reachable(edges: &BTreeSet<(String, String)>, start: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![start.to_string()];
    while let Some(n) = stack.pop() {
        for (a, b) in edges {
            if *a == n && seen.insert(b.clone()) {
                stack.push(b.clone());
            }
        }
    }
    seen
}

/// `(x + y)^u mod 5` with `0^0 = 1`.
pub fn pow5(u: u32, x: u32, y: u32) -> u32 {
    let mut acc = 1;
    for _ in 0..u {
        acc = acc * ((x + y) % 5) % 5;
    }
    acc
}
