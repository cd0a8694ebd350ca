use std::collections::BTreeMap;

use super::rational::{self, Rational};
use super::sort::Sort;
use super::var::{VarDecl, VarId};
use super::IrError;

/// A binding value: boolean or exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Rat(Rational),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            Value::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Value::Bool(_) => None,
            Value::Rat(r) => Some(r),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Rat(r) => write!(f, "{}", rational::display(r)),
        }
    }
}

/// A (possibly partial) variable assignment. Whether it is total is always
/// judged against an explicit set of declarations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    bindings: BTreeMap<VarId, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn bind(&mut self, v: VarId, value: Value) {
        self.bindings.insert(v, value);
    }

    pub fn with(mut self, v: VarId, value: Value) -> Self {
        self.bind(v, value);
        self
    }

    pub fn unbind(&mut self, v: VarId) -> Option<Value> {
        self.bindings.remove(&v)
    }

    pub fn get(&self, v: VarId) -> Option<&Value> {
        self.bindings.get(&v)
    }

    pub fn rational(&self, v: VarId) -> Option<&Rational> {
        self.get(v).and_then(Value::as_rational)
    }

    pub fn boolean(&self, v: VarId) -> Option<bool> {
        self.get(v).and_then(Value::as_bool)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &Value)> {
        self.bindings.iter().map(|(v, val)| (*v, val))
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bindings.keys().copied()
    }

    /// True when every declaration in `decls` is bound.
    pub fn is_total_for(&self, decls: &[VarDecl]) -> bool {
        decls.iter().all(|d| self.bindings.contains_key(&d.id))
    }

    /// Later bindings win on conflicts.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        for (v, val) in other.iter() {
            out.bind(v, val.clone());
        }
        out
    }

    /// Keeps only the bindings for the given declarations.
    pub fn restricted_to(&self, decls: &[VarDecl]) -> Assignment {
        let mut out = Assignment::new();
        for d in decls {
            if let Some(val) = self.get(d.id) {
                out.bind(d.id, val.clone());
            }
        }
        out
    }

    /// The numeric bindings as a map, for polynomial substitution.
    pub fn rational_bindings(&self) -> BTreeMap<VarId, Rational> {
        self.bindings
            .iter()
            .filter_map(|(v, val)| val.as_rational().map(|r| (*v, r.clone())))
            .collect()
    }

    /// Checks one binding against a declaration's sort and box.
    pub fn check_respects(&self, decl: &VarDecl) -> Result<(), IrError> {
        let Some(value) = self.get(decl.id) else {
            return Ok(());
        };
        let ok = match (&decl.sort, value) {
            (Sort::Bool, Value::Bool(_)) => true,
            (sort, Value::Rat(r)) if sort.is_numeric() => sort.admits(r),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(IrError::SortMismatch {
                var: decl.name.clone(),
                value: value.to_string(),
            })
        }
    }

    /// Fills every unbound declaration with the domain's least value
    /// (`false` for booleans, the interval lower bound for numerics).
    pub fn completed_with_lower_bounds(&self, decls: &[VarDecl]) -> Assignment {
        let mut out = self.clone();
        for d in decls {
            if out.get(d.id).is_none() {
                let v = match &d.sort {
                    Sort::Bool => Value::Bool(false),
                    s => Value::Rat(s.interval().expect("numeric sort").lo().clone()),
                };
                out.bind(d.id, v);
            }
        }
        out
    }
}

impl FromIterator<(VarId, Value)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (VarId, Value)>>(iter: T) -> Self {
        Assignment {
            bindings: iter.into_iter().collect(),
        }
    }
}
