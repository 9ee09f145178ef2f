use std::collections::BTreeMap;

use crate::model::{Domain, Expr, ExprError, Node, Value};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("function `{0}` is defined more than once")]
    DuplicateFunction(String),
    #[error("function `{function}` repeats parameter `{param}`")]
    DuplicateParameter { function: String, param: String },
    #[error("function `{function}`: {source}")]
    Body {
        function: String,
        #[source]
        source: ExprError,
    },
}

/// The meaning of one process name: a function `D^n -> D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessFunction {
    params: Vec<String>,
    body: Expr,
    pub(crate) compiled: Node,
}

impl ProcessFunction {
    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

/// Process names with their arities and functions over one domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    domain: Domain,
    functions: BTreeMap<String, ProcessFunction>,
}

impl Interpretation {
    pub fn new(domain: Domain) -> Interpretation {
        Interpretation {
            domain,
            functions: BTreeMap::new(),
        }
    }

    /// Adds `name(params) := body`. The body may only mention the params.
    pub fn define(&mut self, name: impl Into<String>, params: Vec<String>, body: Expr) -> Result<(), InterpError> {
        let name = name.into();
        if self.functions.contains_key(&name) {
            return Err(InterpError::DuplicateFunction(name));
        }
        for (i, p) in params.iter().enumerate() {
            if params[..i].contains(p) {
                return Err(InterpError::DuplicateParameter {
                    function: name,
                    param: p.clone(),
                });
            }
        }
        let resolve = |v: &str| params.iter().position(|p| p == v);
        let compiled = body
            .compile(&resolve, &self.domain)
            .map_err(|source| InterpError::Body {
                function: name.clone(),
                source,
            })?;
        self.functions.insert(name, ProcessFunction { params, body, compiled });
        Ok(())
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// The sorting `ar(name)`.
    pub fn arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).map(ProcessFunction::arity)
    }

    pub fn function(&self, name: &str) -> Option<&ProcessFunction> {
        self.functions.get(name)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, &ProcessFunction)> {
        self.functions.iter().map(|(k, f)| (k.as_str(), f))
    }

    /// Applies `name` to `args`; `None` for an unknown name or wrong arity.
    pub fn apply(&self, name: &str, args: &[Value]) -> Option<Value> {
        let f = self.functions.get(name)?;
        (f.arity() == args.len()).then(|| f.compiled.eval(args, &self.domain))
    }
}
