//! Quantifier-free formulas over polynomial and boolean atoms.

use std::collections::BTreeSet;

use super::assign::Assignment;
use super::atom::{Atom, CmpOp, PolyAtom};
use super::poly::Polynomial;
use super::rational::Rational;
use super::var::VarId;
use super::IrError;

/// Propositional combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn cmp(poly: Polynomial, op: CmpOp, rhs: Rational) -> Formula {
        Formula::Atom(Atom::cmp(poly, op, rhs))
    }

    pub fn bool_var(v: VarId) -> Formula {
        Formula::Atom(Atom::Bool(v))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let fs: Vec<_> = fs.into_iter().collect();
        match fs.len() {
            0 => Formula::True,
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn or(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let fs: Vec<_> = fs.into_iter().collect();
        match fs.len() {
            0 => Formula::False,
            1 => fs.into_iter().next().unwrap(),
            _ => Formula::Or(fs),
        }
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    pub fn from_bool(b: bool) -> Formula {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| out.extend(a.vars()));
        out
    }

    /// Calls `f` on every atom leaf, left to right.
    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => {
                for g in gs {
                    g.visit_atoms(f);
                }
            }
            Formula::Implies(l, r) | Formula::Iff(l, r) => {
                l.visit_atoms(f);
                r.visit_atoms(f);
            }
        }
    }

    /// Standard two-valued semantics under a total assignment; polynomial
    /// atoms are evaluated in exact rational arithmetic.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool, IrError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(at) => at.eval(a)?,
            Formula::Not(g) => !g.evaluate(a)?,
            Formula::And(gs) => {
                let mut acc = true;
                for g in gs {
                    // Evaluate all children so unbound variables are always
                    // reported, independent of sibling values.
                    acc &= g.evaluate(a)?;
                }
                acc
            }
            Formula::Or(gs) => {
                let mut acc = false;
                for g in gs {
                    acc |= g.evaluate(a)?;
                }
                acc
            }
            Formula::Implies(l, r) => !l.evaluate(a)? || r.evaluate(a)?,
            Formula::Iff(l, r) => l.evaluate(a)? == r.evaluate(a)?,
        })
    }

    /// Three-valued (Kleene) evaluation under a partial assignment. `None`
    /// means the value is not determined by the bound variables.
    pub fn eval_partial(&self, a: &Assignment) -> Option<bool> {
        match self {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Atom(Atom::Bool(v)) => a.boolean(*v),
            Formula::Atom(Atom::Cmp(c)) => {
                let lhs = c.poly.eval_partial(a)?;
                Some(c.op.holds(&lhs, &c.rhs))
            }
            Formula::Not(g) => g.eval_partial(a).map(|b| !b),
            Formula::And(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval_partial(a) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Formula::Or(gs) => {
                let mut unknown = false;
                for g in gs {
                    match g.eval_partial(a) {
                        Some(true) => return Some(true),
                        Some(false) => {}
                        None => unknown = true,
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
            Formula::Implies(l, r) => match (l.eval_partial(a), r.eval_partial(a)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
            Formula::Iff(l, r) => Some(l.eval_partial(a)? == r.eval_partial(a)?),
        }
    }

    /// Replaces bound variables by constants. Polynomial atoms are
    /// re-normalized; the only simplification performed is constant folding
    /// of atoms that become variable-free.
    pub fn substitute(&self, a: &Assignment) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(Atom::Bool(v)) => match a.boolean(*v) {
                Some(b) => Formula::from_bool(b),
                None => self.clone(),
            },
            Formula::Atom(Atom::Cmp(c)) => {
                let bound = c.poly.bind(&a.rational_bindings());
                if bound.is_constant() {
                    Formula::from_bool(c.op.holds(bound.constant_term(), &c.rhs))
                } else {
                    Formula::Atom(Atom::cmp(bound, c.op, c.rhs.clone()))
                }
            }
            Formula::Not(g) => Formula::not(g.substitute(a)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.substitute(a)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.substitute(a)).collect()),
            Formula::Implies(l, r) => Formula::implies(l.substitute(a), r.substitute(a)),
            Formula::Iff(l, r) => Formula::iff(l.substitute(a), r.substitute(a)),
        }
    }

    /// Negation-normal form of `¬self`: negation is pushed to the leaves,
    /// comparison operators are flipped, and double negations vanish.
    /// Boolean variables keep an explicit `Not` literal.
    pub fn negate_to_nnf(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(Atom::Cmp(c)) => Formula::Atom(Atom::Cmp(c.negated())),
            Formula::Atom(Atom::Bool(_)) => Formula::not(self.clone()),
            Formula::Not(g) => g.to_nnf(),
            Formula::And(gs) => Formula::or(gs.iter().map(|g| g.negate_to_nnf())),
            Formula::Or(gs) => Formula::and(gs.iter().map(|g| g.negate_to_nnf())),
            Formula::Implies(l, r) => Formula::and([l.to_nnf(), r.negate_to_nnf()]),
            Formula::Iff(l, r) => Formula::or([
                Formula::and([l.to_nnf(), r.negate_to_nnf()]),
                Formula::and([l.negate_to_nnf(), r.to_nnf()]),
            ]),
        }
    }

    /// Negation-normal form of `self` (no `Implies`/`Iff`, negation only on
    /// boolean literals).
    pub fn to_nnf(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(g) => g.negate_to_nnf(),
            Formula::And(gs) => Formula::and(gs.iter().map(|g| g.to_nnf())),
            Formula::Or(gs) => Formula::or(gs.iter().map(|g| g.to_nnf())),
            Formula::Implies(l, r) => Formula::or([l.negate_to_nnf(), r.to_nnf()]),
            Formula::Iff(l, r) => Formula::or([
                Formula::and([l.to_nnf(), r.to_nnf()]),
                Formula::and([l.negate_to_nnf(), r.negate_to_nnf()]),
            ]),
        }
    }

    /// Connective-level constant folding. Does not touch atoms.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => self.clone(),
            Formula::Not(g) => match g.simplify() {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                Formula::Not(inner) => *inner,
                other => Formula::not(other),
            },
            Formula::And(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    match g.simplify() {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        Formula::And(inner) => out.extend(inner),
                        other => out.push(other),
                    }
                }
                Formula::and(out)
            }
            Formula::Or(gs) => {
                let mut out = Vec::new();
                for g in gs {
                    match g.simplify() {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        Formula::Or(inner) => out.extend(inner),
                        other => out.push(other),
                    }
                }
                Formula::or(out)
            }
            Formula::Implies(l, r) => match (l.simplify(), r.simplify()) {
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (Formula::True, r) => r,
                (l, Formula::False) => Formula::not(l).simplify(),
                (l, r) => Formula::implies(l, r),
            },
            Formula::Iff(l, r) => match (l.simplify(), r.simplify()) {
                (Formula::True, g) | (g, Formula::True) => g,
                (Formula::False, g) | (g, Formula::False) => Formula::not(g).simplify(),
                (l, r) => Formula::iff(l, r),
            },
        }
    }

    /// Convenience atom constructors for two polynomials.
    pub fn poly_cmp(lhs: &Polynomial, op: CmpOp, rhs: &Polynomial) -> Formula {
        let diff = lhs.sub(rhs);
        Formula::cmp(diff, op, Rational::from_integer(0.into()))
    }
}

/// Extracts all distinct polynomial atoms, in first-occurrence order.
pub fn collect_poly_atoms(f: &Formula) -> Vec<PolyAtom> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    f.visit_atoms(&mut |a| {
        if let Atom::Cmp(c) = a {
            if seen.insert(c.clone()) {
                out.push(c.clone());
            }
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::rat;
    use crate::ir::Value;

    fn x() -> VarId {
        VarId(0)
    }
    fn y() -> VarId {
        VarId(1)
    }

    /// (0 < y && y < 10) -> (y - 2x < 7)
    fn running_example() -> Formula {
        let py = Polynomial::var(y());
        let guard = Formula::and([
            Formula::cmp(py.clone(), CmpOp::Gt, rat(0)),
            Formula::cmp(py.clone(), CmpOp::Lt, rat(10)),
        ]);
        let body = Formula::cmp(
            py.sub(&Polynomial::var(x()).scale(&rat(2))),
            CmpOp::Lt,
            rat(7),
        );
        Formula::implies(guard, body)
    }

    #[test]
    fn evaluate_running_example() {
        let f = running_example();
        // x = 0, y = 9 falsifies: 9 - 0 = 9, not < 7.
        let a = Assignment::new()
            .with(x(), Value::Rat(rat(0)))
            .with(y(), Value::Rat(rat(9)));
        assert_eq!(f.evaluate(&a), Ok(false));
        // x = 2, y = 9 satisfies: 9 - 4 = 5 < 7.
        let a = Assignment::new()
            .with(x(), Value::Rat(rat(2)))
            .with(y(), Value::Rat(rat(9)));
        assert_eq!(f.evaluate(&a), Ok(true));
        // A false antecedent makes the implication vacuously true.
        let a = Assignment::new()
            .with(x(), Value::Rat(rat(0)))
            .with(y(), Value::Rat(rat(-5)));
        assert_eq!(f.evaluate(&a), Ok(true));
    }

    #[test]
    fn evaluate_reports_unbound_variable() {
        let f = running_example();
        let a = Assignment::new().with(y(), Value::Rat(rat(9)));
        assert_eq!(f.evaluate(&a), Err(IrError::UnboundVariable("v0".into())));
    }

    #[test]
    fn substitute_partial_renormalizes() {
        // y - 2x < 7 with y = 9 becomes -2x + 9 < 7, equivalent to x > 1.
        let f = Formula::cmp(
            Polynomial::var(y()).sub(&Polynomial::var(x()).scale(&rat(2))),
            CmpOp::Lt,
            rat(7),
        );
        let a = Assignment::new().with(y(), Value::Rat(rat(9)));
        let g = f.substitute(&a);
        let expected = Formula::cmp(Polynomial::var(x()).scale(&rat(-2)), CmpOp::Lt, rat(-2));
        assert_eq!(g, expected);
    }

    #[test]
    fn substitute_empty_is_identity() {
        let f = running_example();
        assert_eq!(f.substitute(&Assignment::new()), f);
    }

    #[test]
    fn negate_running_example() {
        // ¬((0<y<10) -> (y-2x<7)) = (0<y ∧ y<10) ∧ y-2x ≥ 7.
        let f = running_example();
        let n = f.negate_to_nnf();
        let py = Polynomial::var(y());
        let expected = Formula::and([
            Formula::and([
                Formula::cmp(py.clone(), CmpOp::Gt, rat(0)),
                Formula::cmp(py.clone(), CmpOp::Lt, rat(10)),
            ]),
            Formula::cmp(
                py.sub(&Polynomial::var(x()).scale(&rat(2))),
                CmpOp::Ge,
                rat(7),
            ),
        ]);
        assert_eq!(n, expected);
    }

    #[test]
    fn negate_implication_example() {
        // ¬(p>0 -> q>=1) = p>0 ∧ q<1.
        let p = Polynomial::var(x());
        let q = Polynomial::var(y());
        let f = Formula::implies(
            Formula::cmp(p.clone(), CmpOp::Gt, rat(0)),
            Formula::cmp(q.clone(), CmpOp::Ge, rat(1)),
        );
        let expected = Formula::and([
            Formula::cmp(p, CmpOp::Gt, rat(0)),
            Formula::cmp(q, CmpOp::Lt, rat(1)),
        ]);
        assert_eq!(f.negate_to_nnf(), expected);
    }

    #[test]
    fn double_negation_is_involutive() {
        let f = running_example();
        assert_eq!(Formula::not(Formula::not(f.clone())).to_nnf(), f.to_nnf());
    }
}
