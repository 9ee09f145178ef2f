//! How well a provenance semantics predicts the function it describes.
//!
//! A semantics maps each input tuple `u` to an explanation, either a
//! provenance graph under an interpretation or a causal model. Three grades
//! of fidelity are checked by enumeration:
//!
//! * pointwise: the explanation for `u` reproduces the run on `u`;
//! * local (causal targets only): it also reproduces the run on `u` under
//!   every intervention `τ`;
//! * global: the explanation for any `u` reproduces every run.
//!
//! The predictive-power relation `u ~> u'` records which explanations are
//! faithful on which other inputs.

mod check;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::model::{CausalModel, Domain, ModelError, Valuation, Value};
use crate::provenance::{interpret_graph, CompileError, Interpretation, ProvenanceGraph};

pub use check::{check, compare_power, predictive_power, Counterexample, Grade, Limits, PowerOrdering, PredictivePowerRelation, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ApproxError {
    #[error("domain mismatch: target uses {expected}, explanation uses {found}")]
    DomainMismatch { expected: Domain, found: Domain },
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error("case split on `{variable}` has no case for {missing}")]
    CaseSplitIncomplete { variable: String, missing: Value },
    #[error("case split variable `{0}` is not an input")]
    UnknownSplitVariable(String),
    #[error("case split value {0} is outside the domain")]
    CaseOutOfDomain(Value),
    #[error("local approximation is only defined for causal targets")]
    LocalNeedsCausal,
    #[error("enumeration needs {required} evaluations, over the budget of {budget}")]
    Budget { required: u128, budget: u128 },
    #[error("not a causal function: {0}")]
    NotCausal(String),
    #[error("input spaces differ")]
    MismatchedSpaces,
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Largest input space that will be tabulated.
const MAX_TABLE: u128 = 1 << 20;

fn space_size(domain: &Domain, n: usize) -> Result<usize, ApproxError> {
    let required = (domain.size() as u128).saturating_pow(n as u32);
    if required > MAX_TABLE {
        return Err(ApproxError::Budget {
            required,
            budget: MAX_TABLE,
        });
    }
    Ok(required as usize)
}

/// A function `D^n -> D` known only by its values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlackBoxFunction {
    domain: Domain,
    inputs: Vec<String>,
    table: Vec<Value>,
}

impl BlackBoxFunction {
    /// Tabulates `f` over `D^n`, `n` being the number of named inputs.
    pub fn tabulate(domain: Domain, inputs: Vec<String>, f: impl Fn(&[Value]) -> Value) -> Result<BlackBoxFunction, ApproxError> {
        space_size(&domain, inputs.len())?;
        let mut table = Vec::new();
        for u in domain.tuples(inputs.len()) {
            let v = f(&u);
            if !domain.contains(v) {
                return Err(ApproxError::Signature(format!("output {v} is outside {domain}")));
            }
            table.push(v);
        }
        Ok(BlackBoxFunction { domain, inputs, table })
    }

    /// The input-output behaviour of `model` from `inputs` (its exogenous
    /// variables, in argument order) to `result`.
    pub fn from_model(model: &CausalModel, inputs: &[String], result: &str) -> Result<BlackBoxFunction, ApproxError> {
        check_exogenous(model, inputs)?;
        if !model.variables().iter().any(|v| v == result) {
            return Err(ApproxError::Signature(format!("model has no variable `{result}`")));
        }
        BlackBoxFunction::tabulate(*model.domain(), inputs.to_vec(), |u| {
            let ctx: Valuation = inputs.iter().cloned().zip(u.iter().copied()).collect();
            model.evaluate(&ctx).expect("context is complete").get(result).expect("result exists")
        })
    }

    /// `⟦G⟧` as a black box over the graph's inputs.
    pub fn from_graph(g: &ProvenanceGraph, interp: &Interpretation) -> Result<BlackBoxFunction, ApproxError> {
        let f = interpret_graph(g, interp)?;
        BlackBoxFunction::tabulate(*interp.domain(), g.inputs().to_vec(), |u| f.apply(u).expect("arity matches"))
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn apply(&self, u: &[Value]) -> Value {
        self.table[self.domain.rank(u)]
    }
}

fn check_exogenous(model: &CausalModel, inputs: &[String]) -> Result<(), ApproxError> {
    let mut sorted = inputs.to_vec();
    sorted.sort();
    if sorted != model.exogenous() {
        return Err(ApproxError::Signature(format!(
            "expected exogenous variables {{{}}}, model has {{{}}}",
            sorted.join(", "),
            model.exogenous().join(", ")
        )));
    }
    Ok(())
}

type CausalFn = dyn Fn(&Valuation, &Valuation) -> Valuation + Send + Sync;

#[derive(Clone)]
enum CausalImpl {
    Model(CausalModel),
    Custom(Arc<CausalFn>),
}

/// A family `f_τ : D^U -> D^V` indexed by partial valuations `τ` of `V`,
/// with `τ ⊆ f_τ(u)`.
#[derive(Clone)]
pub struct CausalFunction {
    domain: Domain,
    inputs: Vec<String>,
    variables: Vec<String>,
    imp: CausalImpl,
}

impl fmt::Debug for CausalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CausalFunction")
            .field("domain", &self.domain)
            .field("inputs", &self.inputs)
            .field("variables", &self.variables)
            .finish_non_exhaustive()
    }
}

impl CausalFunction {
    /// `⟦M⟧`: `f_τ(u)` evaluates `M` intervened with `τ` on context `u`.
    pub fn of_model(model: &CausalModel) -> CausalFunction {
        CausalFunction {
            domain: *model.domain(),
            inputs: model.exogenous().to_vec(),
            variables: model.endogenous().to_vec(),
            imp: CausalImpl::Model(model.clone()),
        }
    }

    /// A causal function given by a closure from `(τ, u)` to a valuation of
    /// `V`. Containment `τ ⊆ f_τ(u)` is checked on every call.
    pub fn custom(
        domain: Domain,
        inputs: Vec<String>,
        variables: Vec<String>,
        f: impl Fn(&Valuation, &Valuation) -> Valuation + Send + Sync + 'static,
    ) -> CausalFunction {
        let mut inputs = inputs;
        let mut variables = variables;
        inputs.sort();
        variables.sort();
        CausalFunction {
            domain,
            inputs,
            variables,
            imp: CausalImpl::Custom(Arc::new(f)),
        }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `U`, sorted by name.
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    /// `V`, sorted by name.
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub(crate) fn model(&self) -> Option<&CausalModel> {
        match &self.imp {
            CausalImpl::Model(m) => Some(m),
            CausalImpl::Custom(_) => None,
        }
    }

    /// `f_τ(u)` restricted to `V`.
    pub fn eval(&self, tau: &Valuation, u: &Valuation) -> Result<Valuation, ApproxError> {
        for (x, _) in tau.iter() {
            if !self.variables.iter().any(|v| v == x) {
                return Err(ApproxError::Model(ModelError::NotEndogenous(x.to_string())));
            }
        }
        let out = match &self.imp {
            CausalImpl::Model(m) => {
                let full = m.intervene_all(tau.iter())?.evaluate(u)?;
                full.restrict(self.variables.iter().map(String::as_str))
            }
            CausalImpl::Custom(f) => f(tau, u),
        };
        if !tau.is_subset_of(&out) {
            return Err(ApproxError::NotCausal(format!("f_τ(u) = {out} does not extend τ = {tau}")));
        }
        if out.len() != self.variables.len() || self.variables.iter().any(|v| !out.contains(v)) {
            return Err(ApproxError::NotCausal(format!("f_τ(u) = {out} is not a valuation of V")));
        }
        Ok(out)
    }
}

/// What a semantics returns for one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Explanation {
    Graph {
        graph: ProvenanceGraph,
        interp: Interpretation,
    },
    Model(CausalModel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemanticsRule {
    /// The trivial semantics: a result disconnected from the inputs and
    /// labelled with the observed output (for causal targets, every
    /// variable a constant).
    Constant,
    /// One explanation for every input.
    Fixed(Explanation),
    /// An explanation chosen by the value of one input.
    CaseSplit {
        variable: String,
        cases: BTreeMap<Value, Explanation>,
    },
}

/// `Pf : D^n -> explanations`, over named inputs with a designated result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProvenanceSemantics {
    inputs: Vec<String>,
    result: String,
    rule: SemanticsRule,
}

impl ProvenanceSemantics {
    pub fn new(inputs: Vec<String>, result: impl Into<String>, rule: SemanticsRule) -> Result<ProvenanceSemantics, ApproxError> {
        if let SemanticsRule::CaseSplit { variable, .. } = &rule {
            if !inputs.contains(variable) {
                return Err(ApproxError::UnknownSplitVariable(variable.clone()));
            }
        }
        Ok(ProvenanceSemantics {
            inputs,
            result: result.into(),
            rule,
        })
    }

    pub fn constant(inputs: Vec<String>, result: impl Into<String>) -> ProvenanceSemantics {
        ProvenanceSemantics {
            inputs,
            result: result.into(),
            rule: SemanticsRule::Constant,
        }
    }

    pub fn fixed(inputs: Vec<String>, result: impl Into<String>, e: Explanation) -> ProvenanceSemantics {
        ProvenanceSemantics {
            inputs,
            result: result.into(),
            rule: SemanticsRule::Fixed(e),
        }
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn result(&self) -> &str {
        &self.result
    }

    pub fn rule(&self) -> &SemanticsRule {
        &self.rule
    }

    /// Every case of a split must be present for every domain value.
    pub fn check_coverage(&self, domain: &Domain) -> Result<(), ApproxError> {
        if let SemanticsRule::CaseSplit { variable, cases } = &self.rule {
            if let Some(bad) = cases.keys().find(|v| !domain.contains(**v)) {
                return Err(ApproxError::CaseOutOfDomain(*bad));
            }
            if let Some(missing) = domain.elements().into_iter().find(|v| !cases.contains_key(v)) {
                return Err(ApproxError::CaseSplitIncomplete {
                    variable: variable.clone(),
                    missing,
                });
            }
        }
        Ok(())
    }
}

/// What a semantics is measured against.
#[derive(Clone, Copy, Debug)]
pub enum Target<'a> {
    Functional(&'a BlackBoxFunction),
    Causal(&'a CausalFunction),
}

impl Target<'_> {
    pub fn domain(&self) -> &Domain {
        match self {
            Target::Functional(f) => f.domain(),
            Target::Causal(f) => f.domain(),
        }
    }

    pub fn is_causal(&self) -> bool {
        matches!(self, Target::Causal(_))
    }
}
