use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::domain::Value;
use super::CausalModel;

/// An assignment of domain values to variable names.
///
/// The same type carries total valuations over `U ∪ V`, exogenous contexts,
/// interventions and contingency assignments; [`Valuation::coverage`] tells
/// them apart relative to a model.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Valuation(BTreeMap<String, Value>);

/// How much of a model a valuation assigns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    /// Every exogenous and endogenous variable.
    Total,
    /// Every endogenous variable, not every exogenous one.
    Endogenous,
    Partial,
}

impl Valuation {
    pub fn new() -> Valuation {
        Valuation::default()
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.0.get(name).copied()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) -> Option<Value> {
        self.0.insert(name.into(), value)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Entries in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, Value)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Keeps only the listed names.
    pub fn restrict<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Valuation {
        names
            .into_iter()
            .filter_map(|n| self.get(n).map(|v| (n.to_string(), v)))
            .collect()
    }

    /// True when every entry of `self` appears with the same value in `other`.
    pub fn is_subset_of(&self, other: &Valuation) -> bool {
        self.iter().all(|(k, v)| other.get(k) == Some(v))
    }

    pub fn coverage(&self, model: &CausalModel) -> Coverage {
        let endo = model.endogenous().iter().all(|n| self.contains(n));
        let exo = model.exogenous().iter().all(|n| self.contains(n));
        match (endo, exo) {
            (true, true) => Coverage::Total,
            (true, false) => Coverage::Endogenous,
            _ => Coverage::Partial,
        }
    }
}

impl<S: Into<String>> FromIterator<(S, Value)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (S, Value)>>(iter: I) -> Self {
        Valuation(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

impl<S: Into<String>> Extend<(S, Value)> for Valuation {
    fn extend<I: IntoIterator<Item = (S, Value)>>(&mut self, iter: I) {
        self.0.extend(iter.into_iter().map(|(k, v)| (k.into(), v)));
    }
}

impl<'a> IntoIterator for &'a Valuation {
    type Item = (&'a String, &'a Value);
    type IntoIter = std::collections::btree_map::Iter<'a, String, Value>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}
