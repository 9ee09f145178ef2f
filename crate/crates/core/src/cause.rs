//! Halpern-Pearl weak and actual causes by exhaustive search.
//!
//! Given a consistent causal situation `(M, σ)`, `X⃗ = x⃗` is a weak cause of
//! `Y = y` when `σ` agrees with both and some contingency `W ⊆ V − X⃗` with
//! values `w⃗′`, together with alternative values `x⃗′`, satisfies
//!
//! * (a) `Y ≠ y` in `M[X⃗:=x⃗′, W:=w⃗′]`, and
//! * (b) `Y = y` in `M[X⃗:=x⃗, W:=w⃗′, Z:=σ(Z)]` for every
//!   `Z ⊆ V − (X⃗ ∪ W ∪ {Y})`.
//!
//! An actual cause is a weak cause none of whose proper subsets is one.
//!
//! The search is exponential. Two reductions keep it at desk scale without
//! changing any answer: contingency and `Z` variables are drawn only from
//! the syntactic ancestors of `Y` (a non-ancestor can neither flip `Y` nor
//! block it, so dropping it from a witness yields a smaller witness), and
//! actual-cause candidates are drawn from the same ancestor set.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::model::{CausalModel, ModelError, Valuation, Value};

/// Default bound on the size of candidate cause sets.
pub const DEFAULT_MAX_CAUSE_SIZE: usize = 3;

/// Variables are tracked in `u64` bitmasks.
const MAX_VARIABLES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CauseError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("situation does not assign `{0}`")]
    Incomplete(String),
    #[error("situation is inconsistent at `{variable}`: stored {stored}, mechanism gives {computed}")]
    Inconsistent {
        variable: String,
        stored: Value,
        computed: Value,
    },
    #[error("`{0}` is not an endogenous variable")]
    NotEndogenous(String),
    #[error("a cause needs at least one variable")]
    EmptyCause,
    #[error("`{0}` appears twice in the cause")]
    DuplicateCause(String),
    #[error("effect variable `{0}` cannot be part of its own cause")]
    EffectInCause(String),
    #[error("`{variable}` = {value} is outside the domain")]
    ValueOutOfDomain { variable: String, value: Value },
    #[error("effect {variable}={expected} does not hold in the situation ({variable}={actual})")]
    EffectMismatch {
        variable: String,
        expected: Value,
        actual: Value,
    },
    #[error("max cause size must be at least 1")]
    MaxSizeTooSmall,
    #[error("model has {0} variables; the search supports at most 64")]
    TooManyVariables(usize),
}

/// A causal model together with a consistent total valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalSituation {
    model: CausalModel,
    sigma: Valuation,
    slots: Vec<Value>,
}

impl CausalSituation {
    /// Checks that `sigma` is total over `U ∪ V` and consistent.
    pub fn new(model: CausalModel, sigma: Valuation) -> Result<CausalSituation, CauseError> {
        if model.slot_count() > MAX_VARIABLES {
            return Err(CauseError::TooManyVariables(model.slot_count()));
        }
        let mut slots = Vec::with_capacity(model.slot_count());
        for name in model.variables() {
            let v = sigma
                .get(name)
                .ok_or_else(|| CauseError::Incomplete(name.clone()))?;
            if !model.domain().contains(v) {
                return Err(CauseError::ValueOutOfDomain {
                    variable: name.clone(),
                    value: v,
                });
            }
            slots.push(v);
        }
        for &i in model.order() {
            let computed = model.compiled(i).expect("endogenous").eval(&slots, model.domain());
            if computed != slots[i] {
                return Err(CauseError::Inconsistent {
                    variable: model.name_of(i).to_string(),
                    stored: slots[i],
                    computed,
                });
            }
        }
        Ok(CausalSituation {
            sigma: model.valuation_of(&slots),
            model,
            slots,
        })
    }

    /// The situation reached by evaluating `model` on an exogenous context.
    pub fn from_context(model: CausalModel, context: &Valuation) -> Result<CausalSituation, CauseError> {
        let sigma = model.evaluate(context)?;
        CausalSituation::new(model, sigma)
    }

    pub fn model(&self) -> &CausalModel {
        &self.model
    }

    pub fn sigma(&self) -> &Valuation {
        &self.sigma
    }

    pub fn value(&self, name: &str) -> Option<Value> {
        self.sigma.get(name)
    }

    /// Exogenous part of `σ`.
    pub fn context(&self) -> Valuation {
        self.sigma.restrict(self.model.exogenous().iter().map(String::as_str))
    }

    fn endogenous_slot(&self, name: &str) -> Result<usize, CauseError> {
        self.model
            .slot_of(name)
            .filter(|&i| self.model.is_endogenous_slot(i))
            .ok_or_else(|| CauseError::NotEndogenous(name.to_string()))
    }

    fn check_value(&self, variable: &str, value: Value) -> Result<(), CauseError> {
        if self.model.domain().contains(value) {
            Ok(())
        } else {
            Err(CauseError::ValueOutOfDomain {
                variable: variable.to_string(),
                value,
            })
        }
    }

    /// Endogenous syntactic ancestors of `slot`, as a bitmask.
    fn ancestor_mask(&self, slot: usize) -> u64 {
        let mut mask = 0u64;
        let mut stack = vec![slot];
        while let Some(at) = stack.pop() {
            if let Some(node) = self.model.compiled(at) {
                for p in node.slots() {
                    if self.model.is_endogenous_slot(p) && mask & (1 << p) == 0 {
                        mask |= 1 << p;
                        stack.push(p);
                    }
                }
            }
        }
        mask & !(1 << slot)
    }
}

/// A candidate cause `X⃗ = x⃗` for the effect `Y = y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CauseQuery {
    causes: Valuation,
    effect: String,
    value: Value,
}

impl CauseQuery {
    pub fn new<S: Into<String>>(
        causes: impl IntoIterator<Item = (S, Value)>,
        effect: impl Into<String>,
        value: Value,
    ) -> CauseQuery {
        CauseQuery {
            causes: causes.into_iter().collect(),
            effect: effect.into(),
            value,
        }
    }

    pub fn causes(&self) -> &Valuation {
        &self.causes
    }

    pub fn effect(&self) -> (&str, Value) {
        (&self.effect, self.value)
    }
}

impl fmt::Display for CauseQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} => {}={}", self.causes, self.effect, self.value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CauseKind {
    Weak,
    Actual,
}

/// A cause together with the contingency that certifies it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WitnessedCause {
    pub query: CauseQuery,
    /// `W` with its values `w⃗′`.
    pub contingency: Valuation,
    /// `X⃗` with its alternative values `x⃗′`.
    pub counterfactual: Valuation,
    pub kind: CauseKind,
}

impl WitnessedCause {
    pub fn contingency_set(&self) -> Vec<&str> {
        self.contingency.names().collect()
    }

    /// Re-checks both conditions for the stored witness from scratch,
    /// building every intervened model explicitly and quantifying over all
    /// `Z`, not only the ancestors of `Y` the search looks at.
    pub fn replay(&self, sit: &CausalSituation) -> bool {
        let model = sit.model();
        let (y, y_val) = self.query.effect();
        if sit.value(y) != Some(y_val) || !self.query.causes.is_subset_of(sit.sigma()) {
            return false;
        }
        let fixed: BTreeSet<&str> = self
            .query
            .causes
            .names()
            .chain(self.contingency.names())
            .chain([y])
            .collect();
        if self.contingency.names().any(|w| self.query.causes.contains(w) || w == y) {
            return false;
        }
        let ctx = sit.context();
        let effect_under = |assign: Vec<(&str, Value)>| -> Option<Value> {
            model.intervene_all(assign).ok()?.evaluate(&ctx).ok()?.get(y)
        };
        let flipped: Vec<(&str, Value)> = self.counterfactual.iter().chain(self.contingency.iter()).collect();
        match effect_under(flipped) {
            Some(v) if v != y_val => {}
            _ => return false,
        }
        let rest: Vec<&str> = model
            .endogenous()
            .iter()
            .map(String::as_str)
            .filter(|n| !fixed.contains(n))
            .collect();
        (0..rest.len()).all(|k| {
            rest.iter().combinations(k).all(|zs| {
                let assign: Vec<(&str, Value)> = self
                    .query
                    .causes
                    .iter()
                    .chain(self.contingency.iter())
                    .chain(zs.iter().map(|z| (**z, sit.value(z).expect("total"))))
                    .collect();
                effect_under(assign) == Some(y_val)
            })
        }) && {
            let all: Vec<(&str, Value)> = self
                .query
                .causes
                .iter()
                .chain(self.contingency.iter())
                .chain(rest.iter().map(|z| (*z, sit.value(z).expect("total"))))
                .collect();
            effect_under(all) == Some(y_val)
        }
    }
}

impl fmt::Display for WitnessedCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            CauseKind::Weak => "a weak",
            CauseKind::Actual => "an actual",
        };
        write!(
            f,
            "{} is {kind} cause of {}={} [W={{{}}}, w'={}, x'={}]",
            self.query.causes,
            self.query.effect,
            self.query.value,
            self.contingency.names().join(", "),
            self.contingency,
            self.counterfactual
        )
    }
}

/// Bitmask-driven search state for one effect.
struct Search<'a> {
    sit: &'a CausalSituation,
    effect: usize,
    target: Value,
    /// Endogenous ancestors of the effect.
    relevant: u64,
    overrides: Vec<Option<Value>>,
    scratch: Vec<Value>,
    elements: Vec<Value>,
}

struct Witness {
    contingency: Vec<(usize, Value)>,
    counterfactual: Vec<Value>,
}

impl<'a> Search<'a> {
    fn new(sit: &'a CausalSituation, effect: usize, target: Value) -> Search<'a> {
        Search {
            sit,
            effect,
            target,
            relevant: sit.ancestor_mask(effect),
            overrides: vec![None; sit.slots.len()],
            scratch: sit.slots.clone(),
            elements: sit.model.domain().elements(),
        }
    }

    fn effect_value(&mut self) -> Value {
        self.sit.model.eval_slots(&mut self.scratch, &self.overrides);
        self.scratch[self.effect]
    }

    fn set(&mut self, slots: &[usize], values: impl IntoIterator<Item = Value>) {
        for (&s, v) in slots.iter().zip(values) {
            self.overrides[s] = Some(v);
        }
    }

    fn clear(&mut self) {
        self.overrides.iter_mut().for_each(|o| *o = None);
    }

    fn tuple(&self, rank: usize, width: usize) -> Vec<Value> {
        self.sit.model.domain().unrank(rank, width)
    }

    /// Looks for the first witness for `causes` (slots with σ values).
    fn weak(&mut self, causes: &[usize]) -> Option<Witness> {
        let cause_mask = causes.iter().fold(0u64, |m, &s| m | 1 << s);
        let pool: Vec<usize> = bits(self.relevant & !cause_mask).collect();
        let actual: Vec<Value> = causes.iter().map(|&s| self.sit.slots[s]).collect();
        let k = self.elements.len();
        let x_count = k.pow(causes.len() as u32);
        for size in 0..=pool.len() {
            for w in pool.iter().copied().combinations(size) {
                let w_mask = w.iter().fold(0u64, |m, &s| m | 1 << s);
                let z_pool: Vec<usize> = bits(self.relevant & !cause_mask & !w_mask).collect();
                let w_count = k.pow(size as u32);
                // condition (b) depends only on (W, w'), so memoize it per w'
                let mut blocked: Vec<Option<bool>> = vec![None; w_count];
                for xr in 0..x_count {
                    let x_alt = self.tuple(xr, causes.len());
                    for (wr, memo) in blocked.iter_mut().enumerate() {
                        let w_alt = self.tuple(wr, size);
                        self.clear();
                        self.set(causes, x_alt.iter().copied());
                        self.set(&w, w_alt.iter().copied());
                        if self.effect_value() == self.target {
                            continue;
                        }
                        let holds = match *memo {
                            Some(b) => b,
                            None => {
                                let b = self.condition_b(causes, &actual, &w, &w_alt, &z_pool);
                                *memo = Some(b);
                                b
                            }
                        };
                        if holds {
                            self.clear();
                            return Some(Witness {
                                contingency: w.iter().copied().zip(w_alt).collect(),
                                counterfactual: x_alt,
                            });
                        }
                    }
                }
            }
        }
        self.clear();
        None
    }

    fn condition_b(
        &mut self,
        causes: &[usize],
        actual: &[Value],
        w: &[usize],
        w_alt: &[Value],
        z_pool: &[usize],
    ) -> bool {
        for z in 0u64..(1 << z_pool.len()) {
            self.clear();
            self.set(causes, actual.iter().copied());
            self.set(w, w_alt.iter().copied());
            for (i, &s) in z_pool.iter().enumerate() {
                if z & (1 << i) != 0 {
                    self.overrides[s] = Some(self.sit.slots[s]);
                }
            }
            if self.effect_value() != self.target {
                return false;
            }
        }
        true
    }

    fn witnessed(&self, causes: &[usize], witness: Witness, kind: CauseKind) -> WitnessedCause {
        let model = &self.sit.model;
        let name = |s: usize| model.name_of(s).to_string();
        WitnessedCause {
            query: CauseQuery::new(
                causes.iter().map(|&s| (name(s), self.sit.slots[s])),
                name(self.effect),
                self.target,
            ),
            contingency: witness
                .contingency
                .into_iter()
                .map(|(s, v)| (name(s), v))
                .collect(),
            counterfactual: causes
                .iter()
                .map(|&s| name(s))
                .zip(witness.counterfactual)
                .collect(),
            kind,
        }
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1 << i) != 0)
}

/// Decides whether `query` is a weak cause in `sit`; returns the first
/// witness in search order.
///
/// Contingency sets are tried by increasing size, then lexicographically by
/// variable name; within a set, `x⃗′` tuples and then `w⃗′` tuples run in
/// domain order. Returns `Ok(None)` when condition 1 fails (the situation
/// disagrees with the query).
pub fn is_weak_cause(sit: &CausalSituation, query: &CauseQuery) -> Result<Option<WitnessedCause>, CauseError> {
    let (y, y_val) = query.effect();
    let effect = sit.endogenous_slot(y)?;
    sit.check_value(y, y_val)?;
    if query.causes.is_empty() {
        return Err(CauseError::EmptyCause);
    }
    let mut causes = Vec::new();
    for (name, value) in query.causes.iter() {
        if name == y {
            return Err(CauseError::EffectInCause(name.to_string()));
        }
        causes.push(sit.endogenous_slot(name)?);
        sit.check_value(name, value)?;
    }
    if sit.slots[effect] != y_val || query.causes.iter().any(|(n, v)| sit.value(n) != Some(v)) {
        return Ok(None);
    }
    let mut search = Search::new(sit, effect, y_val);
    Ok(search
        .weak(&causes)
        .map(|w| search.witnessed(&causes, w, CauseKind::Weak)))
}

/// All actual causes of `Y = y` with at most `max_size` conjuncts.
///
/// Candidates run by increasing size, lexicographically within a size, and
/// each cause carries its first witness. A candidate containing a smaller
/// weak cause is skipped, which is exactly the minimality condition.
pub fn actual_causes(
    sit: &CausalSituation,
    effect: (&str, Value),
    max_size: usize,
) -> Result<Vec<WitnessedCause>, CauseError> {
    if max_size < 1 {
        return Err(CauseError::MaxSizeTooSmall);
    }
    let (y, y_val) = effect;
    let effect_slot = sit.endogenous_slot(y)?;
    sit.check_value(y, y_val)?;
    let actual = sit.slots[effect_slot];
    if actual != y_val {
        return Err(CauseError::EffectMismatch {
            variable: y.to_string(),
            expected: y_val,
            actual,
        });
    }
    let mut search = Search::new(sit, effect_slot, y_val);
    // a non-ancestor of Y in a weak cause can be dropped, so it is never
    // part of an actual cause
    let pool: Vec<usize> = bits(search.relevant).collect();
    let mut weak_masks: Vec<u64> = Vec::new();
    let mut found = Vec::new();
    for size in 1..=max_size.min(pool.len()) {
        for causes in pool.iter().copied().combinations(size) {
            let mask = causes.iter().fold(0u64, |m, &s| m | 1 << s);
            if weak_masks.iter().any(|&w| w & !mask == 0) {
                continue;
            }
            if let Some(w) = search.weak(&causes) {
                weak_masks.push(mask);
                found.push(search.witnessed(&causes, w, CauseKind::Actual));
            }
        }
    }
    Ok(found)
}

/// True iff `X = x` is a conjunct of some actual cause of `Y = y` with at most
/// `max_size` conjuncts. A variable is never part of a cause of itself.
pub fn is_part_of_cause(
    sit: &CausalSituation,
    part: (&str, Value),
    effect: (&str, Value),
    max_size: usize,
) -> Result<bool, CauseError> {
    if part.0 == effect.0 {
        if max_size < 1 {
            return Err(CauseError::MaxSizeTooSmall);
        }
        return Ok(false);
    }
    Ok(actual_causes(sit, effect, max_size)?
        .iter()
        .any(|c| c.query.causes.get(part.0) == Some(part.1)))
}

/// Variables whose actual value is part of some actual cause of `effect`'s
/// actual value.
pub fn cause_parts(sit: &CausalSituation, effect: &str, max_size: usize) -> Result<BTreeSet<String>, CauseError> {
    let value = sit
        .value(effect)
        .ok_or_else(|| CauseError::NotEndogenous(effect.to_string()))?;
    Ok(actual_causes(sit, (effect, value), max_size)?
        .into_iter()
        .flat_map(|c| c.query.causes.names().map(str::to_string).collect::<Vec<_>>())
        .collect())
}
