//! Finite value domains.
//!
//! Every model works over one explicit, finite list of values. Arithmetic is
//! modular so that `add`, `mul` and `pow` never leave the domain, and an
//! optional error element `bot` stands in for undefined results such as
//! division by zero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A single domain element.
///
/// Ordinary values order before `Bottom`, which matches the element order a
/// [`Domain`] enumerates in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Num(u32),
    Bottom,
}

impl Value {
    pub const FALSE: Value = Value::Num(0);
    pub const TRUE: Value = Value::Num(1);

    pub fn from_bool(b: bool) -> Value {
        if b {
            Value::TRUE
        } else {
            Value::FALSE
        }
    }

    pub fn is_bottom(self) -> bool {
        matches!(self, Value::Bottom)
    }

    /// Numeric payload, `None` for bottom.
    pub fn num(self) -> Option<u32> {
        match self {
            Value::Num(n) => Some(n),
            Value::Bottom => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(n) => write!(f, "{n}"),
            Value::Bottom => f.write_str("bot"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` is not a value (expected a natural number or `bot`)")]
pub struct ParseValueError(pub String);

impl FromStr for Value {
    type Err = ParseValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "bot" | "⊥" => Ok(Value::Bottom),
            t => t
                .parse::<u32>()
                .map(Value::Num)
                .map_err(|_| ParseValueError(s.to_string())),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Num(n) => s.serialize_u32(*n),
            Value::Bottom => s.serialize_str("bot"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Value::Num(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Boolean,
    /// Integers modulo `m`, `m >= 2`.
    Modular(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u32),
    #[error("modulus {0} is too large for exhaustive enumeration (limit 256)")]
    ModulusTooLarge(u32),
}

/// An explicit finite domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    kind: DomainKind,
    bottom: bool,
}

impl Domain {
    pub const MAX_MODULUS: u32 = 256;

    pub fn boolean() -> Domain {
        Domain {
            kind: DomainKind::Boolean,
            bottom: false,
        }
    }

    pub fn modular(m: u32) -> Result<Domain, DomainError> {
        if m < 2 {
            return Err(DomainError::ModulusTooSmall(m));
        }
        if m > Self::MAX_MODULUS {
            return Err(DomainError::ModulusTooLarge(m));
        }
        Ok(Domain {
            kind: DomainKind::Modular(m),
            bottom: false,
        })
    }

    /// The same domain extended with the error element.
    pub fn with_bottom(self) -> Domain {
        Domain {
            bottom: true,
            ..self
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn has_bottom(&self) -> bool {
        self.bottom
    }

    /// Number of ordinary (non-bottom) values.
    pub fn modulus(&self) -> u32 {
        match self.kind {
            DomainKind::Boolean => 2,
            DomainKind::Modular(m) => m,
        }
    }

    pub fn size(&self) -> usize {
        self.modulus() as usize + usize::from(self.bottom)
    }

    /// Elements in enumeration order: `0, 1, …, m-1`, then `bot` if enabled.
    pub fn elements(&self) -> Vec<Value> {
        (0..self.size()).map(|i| self.element(i)).collect()
    }

    /// The `i`-th element in enumeration order.
    pub fn element(&self, i: usize) -> Value {
        let m = self.modulus() as usize;
        if i < m {
            Value::Num(i as u32)
        } else {
            debug_assert!(self.bottom && i == m);
            Value::Bottom
        }
    }

    /// Position of `v` in enumeration order. `v` must be a member.
    pub fn index_of(&self, v: Value) -> usize {
        match v {
            Value::Num(n) => n as usize,
            Value::Bottom => self.modulus() as usize,
        }
    }

    pub fn contains(&self, v: Value) -> bool {
        match v {
            Value::Num(n) => n < self.modulus(),
            Value::Bottom => self.bottom,
        }
    }

    /// Value used where an operator has no defined result: `bot` when the
    /// domain has one, otherwise `0`.
    pub fn undefined(&self) -> Value {
        if self.bottom {
            Value::Bottom
        } else {
            Value::FALSE
        }
    }

    /// Iterates `D^n` in lexicographic order, first coordinate most significant.
    pub fn tuples(&self, n: usize) -> Tuples {
        Tuples::new(*self, n)
    }

    /// Number of tuples in `D^n`, or `None` on overflow.
    pub fn tuple_count(&self, n: usize) -> Option<usize> {
        self.size().checked_pow(u32::try_from(n).ok()?)
    }

    /// Mixed-radix rank of a tuple in the order [`Domain::tuples`] produces.
    pub fn rank(&self, tuple: &[Value]) -> usize {
        tuple
            .iter()
            .fold(0, |acc, v| acc * self.size() + self.index_of(*v))
    }

    /// Inverse of [`Domain::rank`].
    pub fn unrank(&self, mut rank: usize, n: usize) -> Vec<Value> {
        let k = self.size();
        let mut out = vec![Value::FALSE; n];
        for slot in out.iter_mut().rev() {
            *slot = self.element(rank % k);
            rank /= k;
        }
        out
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            DomainKind::Boolean => f.write_str("bool")?,
            DomainKind::Modular(m) => write!(f, "mod {m}")?,
        }
        if self.bottom {
            f.write_str(" with bottom")?;
        }
        Ok(())
    }
}

/// Lexicographic enumeration of `D^n`.
#[derive(Clone, Debug)]
pub struct Tuples {
    domain: Domain,
    digits: Vec<usize>,
    done: bool,
}

impl Tuples {
    fn new(domain: Domain, n: usize) -> Tuples {
        Tuples {
            domain,
            digits: vec![0; n],
            done: false,
        }
    }
}

impl Iterator for Tuples {
    type Item = Vec<Value>;

    fn next(&mut self) -> Option<Vec<Value>> {
        if self.done {
            return None;
        }
        let out = self.digits.iter().map(|&d| self.domain.element(d)).collect();
        let k = self.domain.size();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < k {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements_put_bottom_last() {
        let d = Domain::modular(3).unwrap().with_bottom();
        assert_eq!(
            d.elements(),
            vec![Value::Num(0), Value::Num(1), Value::Num(2), Value::Bottom]
        );
        assert_eq!(d.size(), 4);
        assert!(d.contains(Value::Bottom));
        assert!(!Domain::boolean().contains(Value::Bottom));
        assert!(!Domain::boolean().contains(Value::Num(2)));
    }

    #[test]
    fn rejects_degenerate_modulus() {
        assert_eq!(Domain::modular(1), Err(DomainError::ModulusTooSmall(1)));
        assert!(Domain::modular(1000).is_err());
    }

    #[test]
    fn tuples_are_lexicographic_and_rank_matches() {
        let d = Domain::boolean();
        let all: Vec<_> = d.tuples(2).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(all[1], vec![Value::Num(0), Value::Num(1)]);
        for (i, t) in all.iter().enumerate() {
            assert_eq!(d.rank(t), i);
            assert_eq!(&d.unrank(i, 2), t);
        }
        assert_eq!(d.tuples(0).count(), 1);
    }

    #[test]
    fn value_parsing() {
        assert_eq!("bot".parse::<Value>(), Ok(Value::Bottom));
        assert_eq!(" 4".parse::<Value>(), Ok(Value::Num(4)));
        assert!("x".parse::<Value>().is_err());
        let v: Value = serde_json::from_str("\"bot\"").unwrap();
        assert_eq!(v, Value::Bottom);
        assert_eq!(serde_json::to_string(&Value::Num(3)).unwrap(), "3");
    }
}
