//! Exhaustive search over finite grids with DPLL-style pruning.
//!
//! Variables are assigned in declaration order, values in ascending domain
//! order (`false` before `true`), so the first model found is the
//! lexicographically-first satisfying grid point. After each assignment
//! every live assertion is evaluated in three-valued logic; a
//! definitely-false assertion prunes the whole subtree, and when all
//! assertions are definitely true the remaining variables are completed
//! with their least values. The search is exhaustive, so the verdict is
//! never unknown.

use super::prepass;
use super::{CheckResult, SessionStats, SolverError};
use crate::ir::{Assignment, Formula, Sort, Value, VarDecl};

pub(crate) fn check(
    decls: &[VarDecl],
    assertions: &[Formula],
    stats: &mut SessionStats,
) -> Result<CheckResult, SolverError> {
    let pre = prepass::run(decls, assertions);
    if pre.conflict {
        return Ok(CheckResult::Unsat);
    }

    let free: Vec<&VarDecl> = decls
        .iter()
        .filter(|d| pre.bindings.get(d.id).is_none())
        .collect();
    for d in &free {
        if !d.sort.is_finite() {
            return Err(SolverError::UnsupportedSort {
                backend: "enum",
                var: d.name.clone(),
            });
        }
    }

    let mut assignment = pre.bindings.clone();
    let live: Vec<usize> = (0..pre.residual.len()).collect();
    if search(&free, &pre.residual, live, 0, &mut assignment, stats) {
        let total = assignment.completed_with_lower_bounds(decls);
        Ok(CheckResult::Sat(total))
    } else {
        Ok(CheckResult::Unsat)
    }
}

fn values_of(sort: &Sort) -> Vec<Value> {
    match sort {
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        s => s
            .grid_points()
            .expect("finite numeric sort")
            .map(Value::Rat)
            .collect(),
    }
}

fn search(
    free: &[&VarDecl],
    formulas: &[Formula],
    live: Vec<usize>,
    depth: usize,
    assignment: &mut Assignment,
    stats: &mut SessionStats,
) -> bool {
    // Re-evaluate only the assertions not yet known to hold.
    let mut still_live = Vec::with_capacity(live.len());
    for idx in live {
        match formulas[idx].eval_partial(assignment) {
            Some(false) => {
                stats.conflicts += 1;
                return false;
            }
            Some(true) => {}
            None => still_live.push(idx),
        }
    }
    if still_live.is_empty() {
        // Every completion satisfies the assertions; the caller fills the
        // rest with least values to stay lexicographically first.
        return true;
    }
    if depth == free.len() {
        // Total assignment with an undecided assertion cannot happen: a
        // total assignment decides every atom.
        unreachable!("undecided assertion under a total assignment");
    }

    let decl = free[depth];
    for value in values_of(&decl.sort) {
        stats.nodes += 1;
        assignment.bind(decl.id, value);
        if search(free, formulas, still_live.clone(), depth + 1, assignment, stats) {
            return true;
        }
        assignment.unbind(decl.id);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::{rat, ratio};
    use crate::ir::{CmpOp, Interval, Polynomial, VarId};

    fn fixed_decl(id: u32, name: &str, lo: i64, hi: i64, step_num: i64, step_den: i64) -> VarDecl {
        VarDecl::new(
            VarId(id),
            name,
            Sort::fixed(Interval::of(lo, hi), ratio(step_num, step_den)).unwrap(),
        )
    }

    #[test]
    fn first_grid_point_above_zero() {
        // On the [0,10] grid with step 1/32, the least point with a > 0 is 1/32.
        let a = fixed_decl(0, "a", 0, 10, 1, 32);
        let assertions = vec![Formula::cmp(Polynomial::var(a.id), CmpOp::Gt, rat(0))];
        let mut stats = SessionStats::default();
        let r = check(&[a.clone()], &assertions, &mut stats).unwrap();
        match r {
            CheckResult::Sat(m) => assert_eq!(m.rational(a.id), Some(&ratio(1, 32))),
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn unsat_when_no_grid_point_fits() {
        let a = fixed_decl(0, "a", 0, 1, 1, 2);
        let assertions = vec![
            Formula::cmp(Polynomial::var(a.id), CmpOp::Gt, rat(0)),
            Formula::cmp(Polynomial::var(a.id), CmpOp::Lt, ratio(1, 2)),
        ];
        let mut stats = SessionStats::default();
        assert_eq!(
            check(&[a], &assertions, &mut stats).unwrap(),
            CheckResult::Unsat
        );
    }

    #[test]
    fn assert_false_is_unsat() {
        let mut stats = SessionStats::default();
        assert_eq!(
            check(&[], &[Formula::False], &mut stats).unwrap(),
            CheckResult::Unsat
        );
    }

    #[test]
    fn real_variable_is_rejected() {
        let x = VarDecl::new(VarId(0), "x", Sort::real(0, 1));
        let mut stats = SessionStats::default();
        let err = check(
            &[x],
            &[Formula::cmp(Polynomial::var(VarId(0)), CmpOp::Gt, rat(0))],
            &mut stats,
        );
        assert!(matches!(err, Err(SolverError::UnsupportedSort { .. })));
    }

    #[test]
    fn pruning_cuts_boolean_space() {
        // 20 booleans, but the first conjunct pins b0 = true and the
        // second is decided as soon as b1 is assigned; pruning must keep
        // the node count far below 2^20.
        let decls: Vec<VarDecl> = (0..20)
            .map(|i| VarDecl::new(VarId(i), format!("b{i}"), Sort::Bool))
            .collect();
        let assertions = vec![
            Formula::bool_var(VarId(0)),
            Formula::not(Formula::bool_var(VarId(1))),
        ];
        let mut stats = SessionStats::default();
        let r = check(&decls, &assertions, &mut stats).unwrap();
        assert!(r.is_sat());
        assert!(stats.nodes < 50, "nodes = {}", stats.nodes);
    }
}
