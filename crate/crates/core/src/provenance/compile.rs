//! The two semantics of a provenance graph: the function it computes, and the
//! causal situation it induces.

use std::collections::{BTreeMap, HashMap};

use crate::cause::{CausalSituation, CauseError};
use crate::model::{CausalModel, Domain, Expr, ModelError, Node, Valuation, Value};

use super::{Diagnostic, Interpretation, ProvenanceGraph};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("graph is not valid: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
    #[error("expected {expected} input value(s), got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("input value {0} is outside the domain")]
    InputOutOfDomain(Value),
    #[error("labels are inconsistent at `{node}`: stored {stored}, recomputed {computed}")]
    Inconsistent {
        node: String,
        stored: Value,
        computed: Value,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Situation(CauseError),
}

fn require_valid(g: &ProvenanceGraph, interp: &Interpretation) -> Result<(), CompileError> {
    let report = g.validate(Some(interp));
    if report.is_valid() {
        Ok(())
    } else {
        Err(CompileError::Invalid(report.diagnostics))
    }
}

#[derive(Clone, Debug)]
enum Step {
    Input { slot: usize, index: usize },
    Const { slot: usize, value: Value },
    Copy { slot: usize, from: usize },
    Apply { slot: usize, function: Node, args: Vec<usize> },
}

/// `⟦G⟧ : D^n -> D`, prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct GraphFunction {
    domain: Domain,
    arity: usize,
    width: usize,
    steps: Vec<Step>,
    result: usize,
}

impl GraphFunction {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Value at the result node for inputs `v1..vn`. Stored labels of
    /// non-constant artifacts are ignored.
    pub fn apply(&self, input: &[Value]) -> Result<Value, CompileError> {
        if input.len() != self.arity {
            return Err(CompileError::InputArity {
                expected: self.arity,
                got: input.len(),
            });
        }
        if let Some(bad) = input.iter().find(|v| !self.domain.contains(**v)) {
            return Err(CompileError::InputOutOfDomain(*bad));
        }
        let mut slots = vec![Value::FALSE; self.width];
        let mut args = Vec::new();
        for step in &self.steps {
            match step {
                Step::Input { slot, index } => slots[*slot] = input[*index],
                Step::Const { slot, value } => slots[*slot] = *value,
                Step::Copy { slot, from } => slots[*slot] = slots[*from],
                Step::Apply { slot, function, args: from } => {
                    args.clear();
                    args.extend(from.iter().map(|&i| slots[i]));
                    slots[*slot] = function.eval(&args, &self.domain);
                }
            }
        }
        Ok(slots[self.result])
    }
}

/// Builds `⟦G⟧` by walking the graph in data-flow order.
pub fn interpret_graph(g: &ProvenanceGraph, interp: &Interpretation) -> Result<GraphFunction, CompileError> {
    require_valid(g, interp)?;
    let order = g.topological_order().expect("validated graphs are acyclic");
    let slot: HashMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut steps = Vec::with_capacity(order.len());
    for (i, id) in order.iter().enumerate() {
        let step = if let Some(p) = g.process(id) {
            let f = interp.function(&p.name).expect("validated graphs are sorted");
            Step::Apply {
                slot: i,
                function: f.compiled.clone(),
                args: g.arguments(id).iter().map(|a| slot[a]).collect(),
            }
        } else if let Some(index) = g.inputs().iter().position(|x| x == id) {
            Step::Input { slot: i, index }
        } else if let Some(p) = g.generators(id).first() {
            Step::Copy { slot: i, from: slot[p] }
        } else {
            Step::Const {
                slot: i,
                value: g.artifact(id).expect("artifact").value,
            }
        };
        steps.push(step);
    }
    Ok(GraphFunction {
        domain: *interp.domain(),
        arity: g.inputs().len(),
        width: order.len(),
        steps,
        result: slot[g.result()],
    })
}

/// The causal model `M_G` of a graph, with bookkeeping for its inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledGraph {
    pub model: CausalModel,
    /// Exogenous variable feeding each graph input, in input order.
    pub exogenous_inputs: Vec<String>,
    pub result: String,
}

/// Compiles `g` to `M_G`.
///
/// Every node becomes a variable named by its id. Inputs are exogenous, or
/// with `proxy_inputs` endogenous copies of fresh exogenous `U_<id>`
/// variables so that they can take part in causes. A generated artifact
/// copies its process, a process applies its function to its arguments in
/// position order, and an ungenerated non-input artifact is a constant.
pub fn compile_model(g: &ProvenanceGraph, interp: &Interpretation, proxy_inputs: bool) -> Result<CompiledGraph, CompileError> {
    require_valid(g, interp)?;
    let mut exogenous = Vec::new();
    let mut exogenous_inputs = Vec::new();
    let mut mechanisms: Vec<(String, Expr)> = Vec::new();
    for a in g.artifacts() {
        if g.is_input(&a.id) {
            if proxy_inputs {
                let mut u = format!("U_{}", a.id);
                while g.kind(&u).is_some() {
                    u.insert(0, '_');
                }
                mechanisms.push((a.id.clone(), Expr::var(&u)));
                exogenous_inputs.push(u.clone());
                exogenous.push(u);
            } else {
                exogenous.push(a.id.clone());
                exogenous_inputs.push(a.id.clone());
            }
        } else if let Some(p) = g.generators(&a.id).first() {
            mechanisms.push((a.id.clone(), Expr::var(*p)));
        } else {
            mechanisms.push((a.id.clone(), Expr::constant(a.value)));
        }
    }
    for p in g.processes() {
        let f = interp.function(&p.name).expect("validated graphs are sorted");
        let rename: BTreeMap<&str, &str> = f
            .params()
            .iter()
            .map(String::as_str)
            .zip(g.arguments(&p.id))
            .collect();
        let body = f
            .body()
            .rename(&|v| rename.get(v).map(|s| s.to_string()))
            .map_err(|source| ModelError::Mechanism {
                variable: p.id.clone(),
                source,
            })?;
        mechanisms.push((p.id.clone(), body));
    }
    // exogenous_inputs follows artifact order; the function's argument
    // order is the input list
    let ordered: Vec<String> = g
        .inputs()
        .iter()
        .map(|id| {
            let pos = g.artifacts().iter().filter(|a| g.is_input(&a.id)).position(|a| &a.id == id);
            exogenous_inputs[pos.expect("input artifact")].clone()
        })
        .collect();
    let model = CausalModel::new(*interp.domain(), exogenous, mechanisms)?;
    Ok(CompiledGraph {
        model,
        exogenous_inputs: ordered,
        result: g.result().to_string(),
    })
}

/// `(M_G, σ_G)`: the compiled model with every node valued by its stored
/// label (a process takes the value of its function on its arguments'
/// labels). Fails at the first node, in evaluation order, whose label
/// disagrees with its mechanism.
pub fn to_causal_situation(g: &ProvenanceGraph, interp: &Interpretation, proxy_inputs: bool) -> Result<CausalSituation, CompileError> {
    let compiled = compile_model(g, interp, proxy_inputs)?;
    let mut sigma = Valuation::new();
    for a in g.artifacts() {
        sigma.insert(a.id.clone(), a.value);
    }
    for (id, u) in g.inputs().iter().zip(&compiled.exogenous_inputs) {
        if u != id {
            sigma.insert(u.clone(), g.artifact(id).expect("input artifact").value);
        }
    }
    for p in g.processes() {
        let args: Vec<Value> = g
            .arguments(&p.id)
            .iter()
            .map(|a| g.artifact(a).expect("bipartite").value)
            .collect();
        let value = interp.apply(&p.name, &args).expect("validated graphs are sorted");
        sigma.insert(p.id.clone(), value);
    }
    CausalSituation::new(compiled.model, sigma).map_err(|e| match e {
        CauseError::Inconsistent {
            variable,
            stored,
            computed,
        } => CompileError::Inconsistent {
            node: variable,
            stored,
            computed,
        },
        other => CompileError::Situation(other),
    })
}
