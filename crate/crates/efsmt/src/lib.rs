//! Solver library for exists-forall quantified constraints over bounded
//! boolean, integer, real, and fixed-point variables.
//!
//! The core of the crate is a counterexample-guided two-solver loop
//! ([`engine::solve`]): an E-solver proposes candidate assignments for the
//! existential variables, an F-solver searches for universal counterexamples,
//! and each counterexample is turned into a constraint that shrinks the
//! candidate space. Nonlinear polynomial goals are discharged by a Bernstein
//! coefficient checker with box subdivision ([`bernstein`]); linear goals by
//! exact Fourier-Motzkin elimination over a DPLL atom skeleton ([`solver`]).
//!
//! On top of the engine, [`encoders`] reduces four cyber-physical design
//! problems to exists-forall form (priority orchestration, hybrid template
//! synthesis, BIBO stability via Routh conditions, Lyapunov certificate
//! search), each paired with an independent domain oracle. [`text`] provides
//! the s-expression problem format used by the `efsmt` command-line driver.
//!
//! All arithmetic in the intermediate representation is exact rational;
//! floating point appears only inside numeric test oracles.

pub mod bernstein;
pub mod encoders;
pub mod engine;
pub mod ir;
pub mod solver;
pub mod text;
pub mod transforms;

pub use ir::{
    Assignment, Atom, CmpOp, EFProblem, Formula, Interval, Polynomial, Rational, Sort, Value,
    VarDecl, VarId,
};
