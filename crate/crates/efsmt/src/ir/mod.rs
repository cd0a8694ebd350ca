//! Exact-arithmetic intermediate representation: variables, box domains,
//! sparse multivariate polynomials, formulas, and exists-forall problems.
//!
//! Everything in this module is immutable after construction and uses
//! arbitrary-precision rationals; there is no floating point anywhere in
//! the IR.

mod assign;
mod atom;
mod formula;
mod interval;
mod poly;
mod problem;
pub mod rational;
mod sort;
mod var;

pub use assign::{Assignment, Value};
pub use atom::{Atom, CmpOp, PolyAtom};
pub use formula::Formula;
pub use interval::Interval;
pub use poly::{AffineMap, Monomial, Polynomial, Powers};
pub use problem::{AgProblem, AgRule, EFProblem, ProblemBuilder, Quantifier};
pub use rational::Rational;
pub use sort::Sort;
pub use var::{VarDecl, VarId};

use thiserror::Error;

/// Errors raised while constructing or evaluating IR values.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum IrError {
    #[error("variable {0} is not bound by the assignment")]
    UnboundVariable(String),

    #[error("interval is empty: lower bound {lo} exceeds upper bound {hi}")]
    EmptyInterval { lo: String, hi: String },

    #[error("fixed-point step must be positive, got {0}")]
    NonPositiveStep(String),

    #[error("bounded-int endpoints must be integers, got [{lo}, {hi}]")]
    NonIntegerEndpoints { lo: String, hi: String },

    #[error("variable {0} is declared twice")]
    DuplicateVariable(String),

    #[error("free variable {0} of the matrix is not declared")]
    UndeclaredVariable(String),

    #[error("numeric variable {0} used in a polynomial atom has boolean sort")]
    BooleanInPolynomial(String),

    #[error("boolean atom refers to {0}, which has numeric sort")]
    NumericAsBoolean(String),

    #[error("value {value} does not respect the sort of variable {var}")]
    SortMismatch { var: String, value: String },

    #[error("formula is not in assume-guarantee form: {0}")]
    NotAgForm(String),
}
