use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{CausalModel, Domain, Expr, Valuation, Value};
use crate::provenance::{compile_model, interpret_graph, Artifact, GraphFunction, Interpretation, ProvenanceGraph};

use super::{check_exogenous, space_size, ApproxError, Explanation, ProvenanceSemantics, SemanticsRule, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grade {
    Pointwise,
    Local,
    Global,
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grade::Pointwise => "pointwise",
            Grade::Local => "local",
            Grade::Global => "global",
        })
    }
}

/// Enumeration bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of `(u, u')` pairs to enumerate.
    pub pair_budget: u128,
    /// Largest number of `(τ, u)` target evaluations to tabulate.
    pub table_budget: u128,
    /// Largest intervention size; `None` means unbounded when `|V| <= 8`
    /// and 3 otherwise.
    pub tau_cap: Option<usize>,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            pair_budget: 1_000_000,
            table_budget: 10_000_000,
            tau_cap: None,
        }
    }
}

/// A failing `(u, u', τ)`: the explanation for `u`, run on `u'` under `τ`,
/// disagrees with the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub u: Vec<Value>,
    pub u_prime: Vec<Value>,
    pub tau: Valuation,
    pub expected: Valuation,
    pub actual: Valuation,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "explanation for {} run on {} under tau={}: expected {}, got {}",
            Tuple(&self.u),
            Tuple(&self.u_prime),
            self.tau,
            self.expected,
            self.actual
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub grade: Grade,
    pub causal: bool,
    pub holds: bool,
    /// The lexicographically first failing `(u, u', τ)`.
    pub counterexample: Option<Counterexample>,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = if self.causal { "causal" } else { "functional" };
        if self.holds {
            write!(f, "{} approximation ({mode}): holds", self.grade)
        } else {
            write!(f, "{} approximation ({mode}): fails", self.grade)?;
            if let Some(c) = &self.counterexample {
                write!(f, "\n  {c}")?;
            }
            Ok(())
        }
    }
}

struct Tuple<'a>(&'a [Value]);

impl fmt::Display for Tuple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(", "))
    }
}

/// An explanation compiled for repeated evaluation. Outputs are listed in
/// the order of the compared variables.
enum Evaluator {
    Graph { f: GraphFunction, perm: Vec<usize> },
    Model {
        model: CausalModel,
        input_slots: Vec<usize>,
        out_slots: Vec<usize>,
    },
}

impl Evaluator {
    fn eval(&self, u: &[Value], tau: &[(usize, Value)], out: &mut Vec<Value>) {
        out.clear();
        match self {
            Evaluator::Graph { f, perm } => {
                debug_assert!(tau.is_empty());
                let args: Vec<Value> = perm.iter().map(|&i| u[i]).collect();
                out.push(f.apply(&args).expect("arity checked"));
            }
            Evaluator::Model {
                model,
                input_slots,
                out_slots,
            } => {
                let mut slots = vec![Value::FALSE; model.slot_count()];
                for (&s, &v) in input_slots.iter().zip(u) {
                    slots[s] = v;
                }
                let mut overrides = vec![None; if tau.is_empty() { 0 } else { slots.len() }];
                for &(i, v) in tau {
                    overrides[out_slots[i]] = Some(v);
                }
                model.eval_slots(&mut slots, &overrides);
                out.extend(out_slots.iter().map(|&s| slots[s]));
            }
        }
    }
}

/// The enumerated input space together with the tabulated target.
struct Space<'a> {
    sem: &'a ProvenanceSemantics,
    domain: Domain,
    causal: bool,
    tuples: Vec<Vec<Value>>,
    /// Compared variables: `V` for causal targets, the result otherwise.
    vars: Vec<String>,
    taus: Vec<Vec<(usize, Value)>>,
    /// `table[t * N + j]` is the target on tuple `j` under `taus[t]`.
    table: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    Fixed,
    Case(Value),
    Constant(Vec<Value>),
}

impl<'a> Space<'a> {
    fn new(sem: &'a ProvenanceSemantics, target: Target<'_>, limits: &Limits) -> Result<Space<'a>, ApproxError> {
        let domain = *target.domain();
        sem.check_coverage(&domain)?;
        let n = space_size(&domain, sem.inputs().len())?;
        let tuples: Vec<Vec<Value>> = domain.tuples(sem.inputs().len()).collect();
        let (vars, taus) = match target {
            Target::Functional(f) => {
                if f.inputs() != sem.inputs() {
                    return Err(ApproxError::Signature(format!(
                        "semantics inputs ({}) differ from target inputs ({})",
                        sem.inputs().join(", "),
                        f.inputs().join(", ")
                    )));
                }
                (vec![sem.result().to_string()], vec![Vec::new()])
            }
            Target::Causal(f) => {
                let mut sorted = sem.inputs().to_vec();
                sorted.sort();
                if sorted != f.inputs() {
                    return Err(ApproxError::Signature(format!(
                        "semantics inputs ({}) differ from target inputs ({})",
                        sem.inputs().join(", "),
                        f.inputs().join(", ")
                    )));
                }
                if !f.variables().iter().any(|v| v == sem.result()) {
                    return Err(ApproxError::Signature(format!("result `{}` is not a target variable", sem.result())));
                }
                let cap = limits.tau_cap.unwrap_or(if f.variables().len() <= 8 { usize::MAX } else { 3 });
                let taus = interventions(f.variables().len(), &domain, cap, limits.table_budget / n.max(1) as u128)?;
                (f.variables().to_vec(), taus)
            }
        };
        let required = taus.len() as u128 * n as u128;
        if required > limits.table_budget {
            return Err(ApproxError::Budget {
                required,
                budget: limits.table_budget,
            });
        }
        let mut space = Space {
            sem,
            domain,
            causal: target.is_causal(),
            tuples,
            vars,
            taus,
            table: Vec::new(),
        };
        space.table = space.tabulate(target)?;
        Ok(space)
    }

    fn n(&self) -> usize {
        self.tuples.len()
    }

    fn context(&self, u: &[Value]) -> Valuation {
        self.sem.inputs().iter().cloned().zip(u.iter().copied()).collect()
    }

    fn tau_valuation(&self, tau: &[(usize, Value)]) -> Valuation {
        tau.iter().map(|&(i, v)| (self.vars[i].clone(), v)).collect()
    }

    fn tabulate(&self, target: Target<'_>) -> Result<Vec<Vec<Value>>, ApproxError> {
        match target {
            Target::Functional(f) => Ok(self.tuples.iter().map(|u| vec![f.apply(u)]).collect()),
            Target::Causal(f) => {
                if let Some(model) = f.model() {
                    let ev = self.model_evaluator(model.clone())?;
                    let mut out = Vec::with_capacity(self.taus.len() * self.n());
                    let mut buf = Vec::new();
                    for tau in &self.taus {
                        for u in &self.tuples {
                            ev.eval(u, tau, &mut buf);
                            out.push(buf.clone());
                        }
                    }
                    Ok(out)
                } else {
                    let mut out = Vec::with_capacity(self.taus.len() * self.n());
                    for tau in &self.taus {
                        let t = self.tau_valuation(tau);
                        for u in &self.tuples {
                            let v = f.eval(&t, &self.context(u))?;
                            out.push(self.vars.iter().map(|x| v.get(x).expect("total over V")).collect());
                        }
                    }
                    Ok(out)
                }
            }
        }
    }

    fn target(&self, tau: usize, j: usize) -> &[Value] {
        &self.table[tau * self.n() + j]
    }

    fn key(&self, j: usize) -> Key {
        match self.sem.rule() {
            SemanticsRule::Constant => Key::Constant(self.target(0, j).to_vec()),
            SemanticsRule::Fixed(_) => Key::Fixed,
            SemanticsRule::CaseSplit { variable, .. } => {
                let i = self.sem.inputs().iter().position(|x| x == variable).expect("checked");
                Key::Case(self.tuples[j][i])
            }
        }
    }

    fn explanation(&self, key: &Key, j: usize) -> Explanation {
        match (self.sem.rule(), key) {
            (SemanticsRule::Fixed(e), _) => e.clone(),
            (SemanticsRule::CaseSplit { cases, .. }, Key::Case(v)) => cases[v].clone(),
            _ => constant_explanation(self.sem, &self.domain, self.causal, &self.vars, &self.tuples[j], self.target(0, j)),
        }
    }

    fn model_evaluator(&self, model: CausalModel) -> Result<Evaluator, ApproxError> {
        if *model.domain() != self.domain {
            return Err(ApproxError::DomainMismatch {
                expected: self.domain,
                found: *model.domain(),
            });
        }
        check_exogenous(&model, self.sem.inputs())?;
        if self.causal {
            let mut endo = model.endogenous().to_vec();
            endo.sort();
            if endo != self.vars {
                return Err(ApproxError::Signature(format!(
                    "explanation variables {{{}}} differ from target variables {{{}}}",
                    endo.join(", "),
                    self.vars.join(", ")
                )));
            }
        }
        let slot = |n: &str| {
            model
                .slot_of(n)
                .ok_or_else(|| ApproxError::Signature(format!("explanation has no variable `{n}`")))
        };
        let input_slots = self.sem.inputs().iter().map(|n| slot(n)).collect::<Result<_, _>>()?;
        let out_slots = self.vars.iter().map(|n| slot(n)).collect::<Result<_, _>>()?;
        Ok(Evaluator::Model {
            input_slots,
            out_slots,
            model,
        })
    }

    fn evaluator(&self, e: Explanation) -> Result<Evaluator, ApproxError> {
        match e {
            Explanation::Model(m) => self.model_evaluator(m),
            Explanation::Graph { graph, interp } => {
                if *interp.domain() != self.domain {
                    return Err(ApproxError::DomainMismatch {
                        expected: self.domain,
                        found: *interp.domain(),
                    });
                }
                if self.causal {
                    return self.model_evaluator(compile_model(&graph, &interp, false)?.model);
                }
                if graph.result() != self.sem.result() {
                    return Err(ApproxError::Signature(format!(
                        "graph result `{}` is not `{}`",
                        graph.result(),
                        self.sem.result()
                    )));
                }
                let mut a = graph.inputs().to_vec();
                let mut b = self.sem.inputs().to_vec();
                a.sort();
                b.sort();
                if a != b {
                    return Err(ApproxError::Signature(format!(
                        "graph inputs ({}) differ from semantics inputs ({})",
                        graph.inputs().join(", "),
                        self.sem.inputs().join(", ")
                    )));
                }
                let perm = graph
                    .inputs()
                    .iter()
                    .map(|x| self.sem.inputs().iter().position(|y| y == x).expect("same inputs"))
                    .collect();
                Ok(Evaluator::Graph {
                    f: interpret_graph(&graph, &interp)?,
                    perm,
                })
            }
        }
    }

    /// First `τ` under which the explanation run on tuple `j` disagrees.
    fn first_failure(&self, ev: &Evaluator, j: usize, taus: impl Iterator<Item = usize>) -> Option<(usize, Vec<Value>)> {
        let mut buf = Vec::new();
        for t in taus {
            ev.eval(&self.tuples[j], &self.taus[t], &mut buf);
            if buf != self.target(t, j) {
                return Some((t, buf));
            }
        }
        None
    }

    fn counterexample(&self, i: usize, j: usize, t: usize, actual: Vec<Value>) -> Counterexample {
        let named = |vals: &[Value]| -> Valuation { self.vars.iter().cloned().zip(vals.iter().copied()).collect() };
        Counterexample {
            u: self.tuples[i].clone(),
            u_prime: self.tuples[j].clone(),
            tau: self.tau_valuation(&self.taus[t]),
            expected: named(self.target(t, j)),
            actual: named(&actual),
        }
    }
}

/// `τ` assignments: variable subsets by size then lexicographically, each
/// with every value tuple in domain order.
fn interventions(nvars: usize, domain: &Domain, cap: usize, budget: u128) -> Result<Vec<Vec<(usize, Value)>>, ApproxError> {
    let max = cap.min(nvars);
    let required: u128 = (0..=max)
        .map(|k| binomial(nvars, k).saturating_mul((domain.size() as u128).saturating_pow(k as u32)))
        .fold(0u128, |a, b| a.saturating_add(b));
    if required > budget {
        return Err(ApproxError::Budget { required, budget });
    }
    let mut out = Vec::new();
    for k in 0..=max {
        for subset in (0..nvars).combinations(k) {
            for values in domain.tuples(k) {
                out.push(subset.iter().copied().zip(values).collect());
            }
        }
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn constant_explanation(
    sem: &ProvenanceSemantics,
    domain: &Domain,
    causal: bool,
    vars: &[String],
    u: &[Value],
    observed: &[Value],
) -> Explanation {
    if causal {
        let model = CausalModel::new(
            *domain,
            sem.inputs().iter().cloned(),
            vars.iter().cloned().zip(observed.iter().map(|v| Expr::constant(*v))),
        )
        .expect("constant model is well formed");
        return Explanation::Model(model);
    }
    let mut artifacts: Vec<Artifact> = sem
        .inputs()
        .iter()
        .zip(u)
        .map(|(id, v)| Artifact { id: id.clone(), value: *v })
        .collect();
    if !sem.inputs().iter().any(|x| x == sem.result()) {
        artifacts.push(Artifact {
            id: sem.result().to_string(),
            value: observed[0],
        });
    }
    let graph = ProvenanceGraph::new(artifacts, vec![], vec![], vec![], sem.inputs().to_vec(), sem.result().to_string())
        .expect("constant graph is well formed");
    Explanation::Graph {
        graph,
        interp: Interpretation::new(*domain),
    }
}

impl ProvenanceSemantics {
    /// The explanation `Pf(u)` the semantics gives for one input tuple.
    pub fn explain(&self, target: Target<'_>, u: &[Value]) -> Result<Explanation, ApproxError> {
        let limits = Limits {
            tau_cap: Some(0),
            ..Limits::default()
        };
        let space = Space::new(self, target, &limits)?;
        let domain = *target.domain();
        if u.len() != self.inputs().len() || u.iter().any(|v| !domain.contains(*v)) {
            return Err(ApproxError::Signature(format!("{} is not an input tuple", Tuple(u))));
        }
        let j = domain.rank(u);
        Ok(space.explanation(&space.key(j), j))
    }
}

struct Cache<'s, 'a> {
    space: &'s Space<'a>,
    evaluators: HashMap<Key, Evaluator>,
}

impl<'s, 'a> Cache<'s, 'a> {
    fn get(&mut self, j: usize) -> Result<(Key, &Evaluator), ApproxError> {
        let key = self.space.key(j);
        if !self.evaluators.contains_key(&key) {
            let ev = self.space.evaluator(self.space.explanation(&key, j))?;
            self.evaluators.insert(key.clone(), ev);
        }
        let ev = &self.evaluators[&key];
        Ok((key, ev))
    }
}

/// Decides one grade of approximation by full enumeration.
pub fn check(sem: &ProvenanceSemantics, target: Target<'_>, grade: Grade, limits: &Limits) -> Result<Verdict, ApproxError> {
    if grade == Grade::Local && !target.is_causal() {
        return Err(ApproxError::LocalNeedsCausal);
    }
    let space = Space::new(sem, target, limits)?;
    let n = space.n();
    if grade == Grade::Global && (n as u128) * (n as u128) > limits.pair_budget {
        return Err(ApproxError::Budget {
            required: (n as u128) * (n as u128),
            budget: limits.pair_budget,
        });
    }
    let mut cache = Cache {
        space: &space,
        evaluators: HashMap::new(),
    };
    let all_taus = space.taus.len();
    let mut counterexample = None;
    match grade {
        Grade::Pointwise | Grade::Local => {
            let taus = if grade == Grade::Pointwise { 1 } else { all_taus };
            for i in 0..n {
                let (_, ev) = cache.get(i)?;
                if let Some((t, actual)) = space.first_failure(ev, i, 0..taus) {
                    counterexample = Some(space.counterexample(i, i, t, actual));
                    break;
                }
            }
        }
        Grade::Global => {
            // the first failing (u', τ) depends only on the explanation
            let mut verdicts: HashMap<Key, Option<(usize, usize, Vec<Value>)>> = HashMap::new();
            for i in 0..n {
                let (key, ev) = cache.get(i)?;
                let found = match verdicts.get(&key) {
                    Some(v) => v.clone(),
                    None => {
                        let v = (0..n).find_map(|j| space.first_failure(ev, j, 0..all_taus).map(|(t, a)| (j, t, a)));
                        verdicts.insert(key, v.clone());
                        v
                    }
                };
                if let Some((j, t, actual)) = found {
                    counterexample = Some(space.counterexample(i, j, t, actual));
                    break;
                }
            }
        }
    }
    Ok(Verdict {
        grade,
        causal: space.causal,
        holds: counterexample.is_none(),
        counterexample,
    })
}

/// `u ~> u'` over every pair of input tuples, as a dense matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictivePowerRelation {
    inputs: Vec<String>,
    domain: Domain,
    causal: bool,
    tuples: Vec<Vec<Value>>,
    matrix: Vec<bool>,
}

impl PredictivePowerRelation {
    pub fn size(&self) -> usize {
        self.tuples.len()
    }

    pub fn tuples(&self) -> &[Vec<Value>] {
        &self.tuples
    }

    pub fn is_causal(&self) -> bool {
        self.causal
    }

    pub fn holds_at(&self, i: usize, j: usize) -> bool {
        self.matrix[i * self.size() + j]
    }

    pub fn holds(&self, u: &[Value], u_prime: &[Value]) -> bool {
        self.holds_at(self.domain.rank(u), self.domain.rank(u_prime))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.size()).all(|i| self.holds_at(i, i))
    }

    pub fn is_total(&self) -> bool {
        self.matrix.iter().all(|b| *b)
    }

    pub fn pair_count(&self) -> usize {
        self.matrix.iter().filter(|b| **b).count()
    }

    pub fn density(&self) -> f64 {
        if self.matrix.is_empty() {
            return 1.0;
        }
        self.pair_count() as f64 / self.matrix.len() as f64
    }

    /// Related pairs, in lexicographic order of `(u, u')`.
    pub fn pairs(&self) -> impl Iterator<Item = (&[Value], &[Value])> {
        let n = self.size();
        (0..n * n)
            .filter(|k| self.matrix[*k])
            .map(move |k| (self.tuples[k / n].as_slice(), self.tuples[k % n].as_slice()))
    }

    /// One line per related pair, `(u) ~> (u')`.
    pub fn dump(&self) -> String {
        self.pairs()
            .map(|(a, b)| format!("{} ~> {}\n", Tuple(a), Tuple(b)))
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "inputs: ({})\nmode: {}\npairs: {} of {}\ndensity: {:.4}\nreflexive: {}\ntotal: {}\n",
            self.inputs.join(", "),
            if self.causal { "causal" } else { "functional" },
            self.pair_count(),
            self.matrix.len(),
            self.density(),
            self.is_reflexive(),
            self.is_total()
        )
    }

    /// `self ⊆ other` as sets of pairs.
    pub fn is_subset_of(&self, other: &PredictivePowerRelation) -> bool {
        self.matrix.iter().zip(&other.matrix).all(|(a, b)| !*a || *b)
    }
}

/// Computes `~>`. Rows are shared between inputs that receive the same
/// explanation and are computed in parallel.
pub fn predictive_power(sem: &ProvenanceSemantics, target: Target<'_>, limits: &Limits) -> Result<PredictivePowerRelation, ApproxError> {
    let space = Space::new(sem, target, limits)?;
    let n = space.n();
    let pairs = (n as u128) * (n as u128);
    if pairs > limits.pair_budget {
        return Err(ApproxError::Budget {
            required: pairs,
            budget: limits.pair_budget,
        });
    }
    let keys: Vec<Key> = (0..n).map(|j| space.key(j)).collect();
    let mut distinct: Vec<(Key, usize)> = Vec::new();
    let mut index: HashMap<&Key, usize> = HashMap::new();
    for (j, k) in keys.iter().enumerate() {
        if !index.contains_key(k) {
            index.insert(k, distinct.len());
            distinct.push((k.clone(), j));
        }
    }
    let all_taus = space.taus.len();
    let rows: Vec<Vec<bool>> = distinct
        .par_iter()
        .map(|(key, j)| {
            let ev = space.evaluator(space.explanation(key, *j))?;
            Ok((0..n).map(|jj| space.first_failure(&ev, jj, 0..all_taus).is_none()).collect())
        })
        .collect::<Result<_, ApproxError>>()?;
    let mut matrix = Vec::with_capacity(n * n);
    for k in &keys {
        matrix.extend_from_slice(&rows[index[k]]);
    }
    Ok(PredictivePowerRelation {
        inputs: sem.inputs().to_vec(),
        domain: space.domain,
        causal: space.causal,
        tuples: space.tuples.clone(),
        matrix,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerOrdering {
    Equal,
    LessOrEqual,
    GreaterOrEqual,
    Incomparable,
}

impl fmt::Display for PowerOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerOrdering::Equal => "equal",
            PowerOrdering::LessOrEqual => "less-or-equal",
            PowerOrdering::GreaterOrEqual => "greater-or-equal",
            PowerOrdering::Incomparable => "incomparable",
        })
    }
}

/// Orders two semantics by inclusion of their `~>` relations.
pub fn compare_power(a: &PredictivePowerRelation, b: &PredictivePowerRelation) -> Result<PowerOrdering, ApproxError> {
    if a.inputs != b.inputs || a.domain != b.domain {
        return Err(ApproxError::MismatchedSpaces);
    }
    Ok(match (a.is_subset_of(b), b.is_subset_of(a)) {
        (true, true) => PowerOrdering::Equal,
        (true, false) => PowerOrdering::LessOrEqual,
        (false, true) => PowerOrdering::GreaterOrEqual,
        (false, false) => PowerOrdering::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::super::{BlackBoxFunction, CausalFunction};
    use super::*;
    use crate::model::Op;

    fn v(n: u32) -> Value {
        Value::Num(n)
    }

    fn chain() -> CausalModel {
        CausalModel::new(
            Domain::modular(7).unwrap(),
            ["X"],
            [
                ("Y", Expr::apply(Op::Add, vec![Expr::var("X"), Expr::constant(v(1))])),
                ("Z", Expr::apply(Op::Mul, vec![Expr::var("Y"), Expr::constant(v(2))])),
            ],
        )
        .unwrap()
    }

    /// `(x + y)^u` over mod 5, with a per-u model using only add and mul.
    fn pow_target() -> CausalModel {
        CausalModel::new(
            Domain::modular(5).unwrap(),
            ["u", "x", "y"],
            [
                ("s", Expr::apply(Op::Add, vec![Expr::var("x"), Expr::var("y")])),
                ("r", Expr::apply(Op::Pow, vec![Expr::var("s"), Expr::var("u")])),
            ],
        )
        .unwrap()
    }

    fn pow_case(k: u32) -> CausalModel {
        let r = if k == 0 {
            Expr::constant(v(1))
        } else {
            Expr::apply(Op::Mul, (0..k).map(|_| Expr::var("s")).collect())
        };
        CausalModel::new(
            Domain::modular(5).unwrap(),
            ["u", "x", "y"],
            [("s", Expr::apply(Op::Add, vec![Expr::var("x"), Expr::var("y")])), ("r", r)],
        )
        .unwrap()
    }

    fn pow_split() -> ProvenanceSemantics {
        let cases: BTreeMap<Value, Explanation> = (0..5).map(|k| (v(k), Explanation::Model(pow_case(k)))).collect();
        ProvenanceSemantics::new(
            vec!["u".into(), "x".into(), "y".into()],
            "r",
            SemanticsRule::CaseSplit {
                variable: "u".into(),
                cases,
            },
        )
        .unwrap()
    }

    #[test]
    fn constant_semantics_is_pointwise_not_local() {
        let m = chain();
        let f = CausalFunction::of_model(&m);
        let sem = ProvenanceSemantics::constant(vec!["X".into()], "Z");
        let lim = Limits::default();
        assert!(check(&sem, Target::Causal(&f), Grade::Pointwise, &lim).unwrap().holds);
        let local = check(&sem, Target::Causal(&f), Grade::Local, &lim).unwrap();
        assert!(!local.holds);
        let c = local.counterexample.unwrap();
        assert_eq!(c.u, vec![v(0)]);
        // first τ in order: Y := 0, while the run had Y = 1
        assert_eq!(c.tau, [("Y", v(0))].into_iter().collect());
        assert_eq!(c.expected.get("Z"), Some(v(0)));
        assert_eq!(c.actual.get("Z"), Some(v(2)));
    }

    #[test]
    fn exact_model_is_global() {
        let m = chain();
        let f = CausalFunction::of_model(&m);
        let sem = ProvenanceSemantics::fixed(vec!["X".into()], "Z", Explanation::Model(m.clone()));
        let lim = Limits::default();
        for g in [Grade::Pointwise, Grade::Local, Grade::Global] {
            assert!(check(&sem, Target::Causal(&f), g, &lim).unwrap().holds);
        }
        let r = predictive_power(&sem, Target::Causal(&f), &lim).unwrap();
        assert!(r.is_total());
    }

    #[test]
    fn per_u_split_is_local_not_global() {
        let target = pow_target();
        let f = CausalFunction::of_model(&target);
        let sem = pow_split();
        let lim = Limits::default();
        assert!(check(&sem, Target::Causal(&f), Grade::Local, &lim).unwrap().holds);
        let global = check(&sem, Target::Causal(&f), Grade::Global, &lim).unwrap();
        assert!(!global.holds);
        let c = global.counterexample.unwrap();
        // u = (0,0,0) gets the u=0 model; first failing u' is (1,0,0) where 0^1 = 0 but the model says 1
        assert_eq!(c.u, vec![v(0), v(0), v(0)]);
        assert_eq!(c.u_prime, vec![v(1), v(0), v(0)]);
        assert!(c.tau.is_empty());
        let r = predictive_power(&sem, Target::Causal(&f), &lim).unwrap();
        assert!(r.is_reflexive());
        assert!(!r.is_total());
    }

    #[test]
    fn functional_power_of_constant_semantics() {
        let target = pow_target();
        let inputs: Vec<String> = vec!["u".into(), "x".into(), "y".into()];
        let f = BlackBoxFunction::from_model(&target, &inputs, "r").unwrap();
        let sem = ProvenanceSemantics::constant(inputs, "r");
        let r = predictive_power(&sem, Target::Functional(&f), &Limits::default()).unwrap();
        for (i, a) in r.tuples().iter().enumerate() {
            for (j, b) in r.tuples().iter().enumerate() {
                assert_eq!(r.holds_at(i, j), f.apply(a) == f.apply(b));
            }
        }
        let exact = ProvenanceSemantics::fixed(sem.inputs().to_vec(), "r", Explanation::Model(target.clone()));
        let q = predictive_power(&exact, Target::Functional(&f), &Limits::default()).unwrap();
        assert_eq!(compare_power(&r, &q).unwrap(), PowerOrdering::LessOrEqual);
        assert_eq!(compare_power(&q, &q).unwrap(), PowerOrdering::Equal);
        assert!(matches!(check(&sem, Target::Functional(&f), Grade::Local, &Limits::default()), Err(ApproxError::LocalNeedsCausal)));
    }

    #[test]
    fn intervention_enumeration_order() {
        let taus = interventions(2, &Domain::boolean(), usize::MAX, u128::MAX).unwrap();
        assert_eq!(taus.len(), 9);
        assert!(taus[0].is_empty());
        assert_eq!(taus[1], vec![(0, v(0))]);
        assert_eq!(taus[5], vec![(0, v(0)), (1, v(0))]);
        assert_eq!(interventions(2, &Domain::boolean(), 1, u128::MAX).unwrap().len(), 5);
        assert!(interventions(2, &Domain::boolean(), 2, 3).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let m = chain();
        let f = CausalFunction::of_model(&m);
        let sem = ProvenanceSemantics::constant(vec!["X".into()], "Z");
        let lim = Limits {
            pair_budget: 10,
            ..Limits::default()
        };
        assert!(matches!(
            predictive_power(&sem, Target::Causal(&f), &lim),
            Err(ApproxError::Budget { required: 49, .. })
        ));
    }
}
