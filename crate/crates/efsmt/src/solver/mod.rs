//! Quantifier-free satisfiability backends behind one session interface.
//!
//! A [`SolverSession`] owns a stack of asserted formulas with push/pop
//! contexts and dispatches `check` to one of three backends:
//!
//! * [`BackendKind::Enum`] — exhaustive DPLL-style search over finite grids
//!   (booleans, bounded integers, fixed-point numbers). Complete; never
//!   returns unknown.
//! * [`BackendKind::Linear`] — DPLL over the atom skeleton with each boolean
//!   solution's constraint set decided by exact Fourier-Motzkin elimination.
//! * [`BackendKind::External`] — an SMT-LIB 2 solver child process.
//!
//! The internal backends are deterministic: identical declarations and
//! assertion histories produce identical results. Box bounds of declared
//! numeric variables are always part of the constraint set.

mod enumerate;
mod external;
mod linear;
mod prepass;
pub mod smtlib;

pub use external::ExternalConfig;

use thiserror::Error;

use crate::ir::{Assignment, CmpOp, Formula, Polynomial, Value, VarDecl};

/// Result of a satisfiability check.
///
/// A `Sat` model may be partial; a partial model promises that every
/// completion consistent with the variable sorts satisfies the assertions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckResult {
    Sat(Assignment),
    Unsat,
    Unknown(String),
}

impl CheckResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, CheckResult::Sat(_))
    }
}

/// Counters accumulated over the lifetime of a session.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SessionStats {
    /// Number of `check` calls.
    pub checks: u64,
    /// Search-tree nodes visited by the internal backends.
    pub nodes: u64,
    /// Pruned branches (definite-false under a partial assignment) plus
    /// theory conflicts found by Fourier-Motzkin.
    pub conflicts: u64,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("pop called on an empty context stack")]
    PopOnEmptyStack,

    #[error("the {backend} backend does not support the sort of variable {var}")]
    UnsupportedSort { backend: &'static str, var: String },

    #[error("the linear backend cannot handle nonlinear atom: {0}")]
    NonlinearAtom(String),

    #[error("assertion mentions undeclared variable {0}")]
    UndeclaredVariable(String),

    #[error("failed to start external solver `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },

    #[error("i/o error talking to external solver: {0}")]
    Io(#[from] std::io::Error),
}

/// Backend selector for a session.
#[derive(Debug, Clone)]
pub enum BackendKind {
    /// Exhaustive search over finite grids.
    Enum,
    /// DPLL atom skeleton plus exact Fourier-Motzkin elimination.
    Linear,
    /// SMT-LIB 2 child process.
    External(ExternalConfig),
}

impl BackendKind {
    /// The internal backend a block of declarations naturally calls for:
    /// grids when every sort is finite, linear arithmetic otherwise.
    pub fn for_decls(decls: &[VarDecl]) -> BackendKind {
        if decls.iter().all(|d| d.sort.is_finite()) {
            BackendKind::Enum
        } else {
            BackendKind::Linear
        }
    }
}

/// A stack of asserted formulas with push/pop contexts and a
/// check-and-model interface.
#[derive(Debug)]
pub struct SolverSession {
    decls: Vec<VarDecl>,
    frames: Vec<usize>,
    assertions: Vec<Formula>,
    kind: BackendKind,
    external: Option<external::ExternalSolver>,
    stats: SessionStats,
}

impl SolverSession {
    pub fn new(kind: BackendKind, decls: Vec<VarDecl>) -> Result<Self, SolverError> {
        let external = match &kind {
            BackendKind::External(cfg) => Some(external::ExternalSolver::new(cfg.clone())?),
            _ => None,
        };
        Ok(SolverSession {
            decls,
            frames: Vec::new(),
            assertions: Vec::new(),
            kind,
            external,
            stats: SessionStats::default(),
        })
    }

    pub fn decls(&self) -> &[VarDecl] {
        &self.decls
    }

    pub fn stats(&self) -> &SessionStats {
        &self.stats
    }

    pub fn assertions(&self) -> &[Formula] {
        &self.assertions
    }

    pub fn push(&mut self) {
        self.frames.push(self.assertions.len());
        if let Some(ext) = &mut self.external {
            ext.push();
        }
    }

    pub fn pop(&mut self) -> Result<(), SolverError> {
        let mark = self.frames.pop().ok_or(SolverError::PopOnEmptyStack)?;
        self.assertions.truncate(mark);
        if let Some(ext) = &mut self.external {
            ext.pop();
        }
        Ok(())
    }

    pub fn assert(&mut self, f: Formula) -> Result<(), SolverError> {
        for v in f.free_vars() {
            if !self.decls.iter().any(|d| d.id == v) {
                return Err(SolverError::UndeclaredVariable(v.to_string()));
            }
        }
        if let Some(ext) = &mut self.external {
            ext.assert(&f);
        }
        self.assertions.push(f);
        Ok(())
    }

    /// Asserts `var = value` (or the boolean literal) — the shape the
    /// engine pushes for candidate instantiation.
    pub fn assert_binding(&mut self, decl: &VarDecl, value: &Value) -> Result<(), SolverError> {
        let f = binding_formula(decl, value);
        self.assert(f)
    }

    /// Decides the conjunction of all live assertions. Deterministic for
    /// the internal backends given identical declarations and history.
    pub fn check(&mut self) -> Result<CheckResult, SolverError> {
        self.stats.checks += 1;
        match &self.kind {
            BackendKind::Enum => enumerate::check(&self.decls, &self.assertions, &mut self.stats),
            BackendKind::Linear => linear::check(&self.decls, &self.assertions, &mut self.stats),
            BackendKind::External(_) => {
                let ext = self.external.as_mut().expect("external solver present");
                Ok(ext.check(&self.decls))
            }
        }
    }
}

/// The formula asserting that a variable takes a concrete value.
pub fn binding_formula(decl: &VarDecl, value: &Value) -> Formula {
    match value {
        Value::Bool(true) => Formula::bool_var(decl.id),
        Value::Bool(false) => Formula::not(Formula::bool_var(decl.id)),
        Value::Rat(r) => Formula::cmp(Polynomial::var(decl.id), CmpOp::Eq, r.clone()),
    }
}

/// Shrinks a model to a partial assignment whose every completion still
/// satisfies `goal`.
///
/// For each variable in declaration order the binding is tentatively
/// dropped and one auxiliary check asks whether `¬goal` is satisfiable for
/// any value of the dropped variables under the remaining bindings; if not,
/// the variable is dropped permanently. On any backend trouble the model is
/// kept as it stands.
pub fn generalize_model(
    kind: &BackendKind,
    decls: &[VarDecl],
    model: &Assignment,
    goal: &Formula,
) -> Assignment {
    let negated = goal.negate_to_nnf();
    let mut kept = model.clone();
    for d in decls {
        if kept.get(d.id).is_none() {
            continue;
        }
        let mut trial = kept.clone();
        trial.unbind(d.id);
        let refutable = (|| -> Result<CheckResult, SolverError> {
            let mut session = SolverSession::new(kind.clone(), decls.to_vec())?;
            session.assert(negated.clone())?;
            for decl in decls {
                if let Some(v) = trial.get(decl.id) {
                    session.assert_binding(decl, v)?;
                }
            }
            session.check()
        })();
        if let Ok(CheckResult::Unsat) = refutable {
            kept = trial;
        }
    }
    kept
}
