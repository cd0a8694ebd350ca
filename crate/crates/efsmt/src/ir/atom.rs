use super::assign::Assignment;
use super::poly::Polynomial;
use super::rational::{self, Rational};
use super::var::VarId;
use super::IrError;

/// Comparison operator of a polynomial atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    /// The operator of the negated atom: `≤↔>`, `<↔≥`, `=↔≠`.
    pub fn negated(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Ge,
            CmpOp::Le => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Le,
            CmpOp::Ge => CmpOp::Lt,
            CmpOp::Eq => CmpOp::Ne,
            CmpOp::Ne => CmpOp::Eq,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
        }
    }

    /// True for `<`, `≤`, `>`, `≥` — the operators the Bernstein checker
    /// and the assume-guarantee form accept.
    pub fn is_order(self) -> bool {
        !matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn is_strict(self) -> bool {
        matches!(self, CmpOp::Lt | CmpOp::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

/// A polynomial comparison `poly op rhs`. The polynomial carries no constant
/// term; constants are folded into the right-hand side at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyAtom {
    pub poly: Polynomial,
    pub op: CmpOp,
    pub rhs: Rational,
}

impl PolyAtom {
    pub fn new(poly: Polynomial, op: CmpOp, rhs: Rational) -> Self {
        let c = poly.constant_term().clone();
        let poly = poly.sub(&Polynomial::constant(c.clone()));
        PolyAtom {
            poly,
            op,
            rhs: rhs - c,
        }
    }

    pub fn negated(&self) -> PolyAtom {
        PolyAtom {
            poly: self.poly.clone(),
            op: self.op.negated(),
            rhs: self.rhs.clone(),
        }
    }

    /// The polynomial `poly - rhs`, i.e. the atom in `p op 0` form.
    pub fn offset_poly(&self) -> Polynomial {
        self.poly.sub(&Polynomial::constant(self.rhs.clone()))
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, IrError> {
        let lhs = self.poly.eval(a)?;
        Ok(self.op.holds(&lhs, &self.rhs))
    }
}

impl std::fmt::Display for PolyAtom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {}",
            self.poly,
            self.op.symbol(),
            rational::display(&self.rhs)
        )
    }
}

/// Atomic formula: a polynomial comparison or a boolean variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Cmp(PolyAtom),
    Bool(VarId),
}

impl Atom {
    pub fn cmp(poly: Polynomial, op: CmpOp, rhs: Rational) -> Atom {
        Atom::Cmp(PolyAtom::new(poly, op, rhs))
    }

    pub fn vars(&self) -> Vec<VarId> {
        match self {
            Atom::Cmp(c) => c.poly.vars().into_iter().collect(),
            Atom::Bool(v) => vec![*v],
        }
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool, IrError> {
        match self {
            Atom::Cmp(c) => c.eval(a),
            Atom::Bool(v) => a
                .boolean(*v)
                .ok_or_else(|| IrError::UnboundVariable(v.to_string())),
        }
    }
}

impl std::fmt::Display for Atom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Atom::Cmp(c) => write!(f, "{c}"),
            Atom::Bool(v) => write!(f, "{v}"),
        }
    }
}
