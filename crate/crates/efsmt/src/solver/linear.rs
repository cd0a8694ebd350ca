//! Linear backend: DPLL over the atom skeleton with exact Fourier-Motzkin
//! elimination deciding each boolean solution's constraint set.
//!
//! Equality atoms are expanded into `≤ ∧ ≥` and disequalities into
//! `< ∨ >` before the skeleton is built, so the theory layer sees only
//! order atoms. Elimination runs in reverse declaration order; models are
//! reconstructed per variable from the interval that survives elimination,
//! using a fixed extraction rule so regression outputs are stable:
//! endpoint for point intervals, otherwise one unit inside a strict bound
//! when that lands in the interval, otherwise the midpoint.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use super::prepass;
use super::{CheckResult, SessionStats, SolverError};
use crate::ir::rational::{rat, Rational};
use crate::ir::{Assignment, Atom, CmpOp, Formula, Value, VarDecl, VarId};

pub(crate) fn check(
    decls: &[VarDecl],
    assertions: &[Formula],
    stats: &mut SessionStats,
) -> Result<CheckResult, SolverError> {
    let pre = prepass::run(decls, assertions);
    if pre.conflict {
        return Ok(CheckResult::Unsat);
    }

    let formulas: Vec<Formula> = pre
        .residual
        .iter()
        .map(|f| expand_equalities(f).to_nnf())
        .collect();
    check_linearity(&formulas)?;

    let free: Vec<&VarDecl> = decls
        .iter()
        .filter(|d| pre.bindings.get(d.id).is_none())
        .collect();

    let mut ctx = Dpll {
        formulas: &formulas,
        free: &free,
        stats,
    };
    let live: Vec<usize> = (0..formulas.len()).collect();
    let mut atom_values: BTreeMap<Atom, bool> = BTreeMap::new();
    match ctx.search(live, &mut atom_values) {
        Some(model) => Ok(CheckResult::Sat(pre.bindings.merged(&model))),
        None => Ok(CheckResult::Unsat),
    }
}

/// Replaces `p = c` by `p ≤ c ∧ p ≥ c` and `p ≠ c` by `p < c ∨ p > c`.
fn expand_equalities(f: &Formula) -> Formula {
    match f {
        Formula::Atom(Atom::Cmp(c)) if c.op == CmpOp::Eq => Formula::and([
            Formula::cmp(c.poly.clone(), CmpOp::Le, c.rhs.clone()),
            Formula::cmp(c.poly.clone(), CmpOp::Ge, c.rhs.clone()),
        ]),
        Formula::Atom(Atom::Cmp(c)) if c.op == CmpOp::Ne => Formula::or([
            Formula::cmp(c.poly.clone(), CmpOp::Lt, c.rhs.clone()),
            Formula::cmp(c.poly.clone(), CmpOp::Gt, c.rhs.clone()),
        ]),
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(expand_equalities(g)),
        Formula::And(gs) => Formula::And(gs.iter().map(expand_equalities).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(expand_equalities).collect()),
        Formula::Implies(l, r) => {
            Formula::implies(expand_equalities(l), expand_equalities(r))
        }
        Formula::Iff(l, r) => Formula::iff(expand_equalities(l), expand_equalities(r)),
    }
}

fn check_linearity(formulas: &[Formula]) -> Result<(), SolverError> {
    let mut bad = None;
    for f in formulas {
        f.visit_atoms(&mut |a| {
            if bad.is_some() {
                return;
            }
            if let Atom::Cmp(c) = a {
                let nonlinear = c
                    .poly
                    .monomials()
                    .any(|m| m.powers.total_degree() > 1);
                if nonlinear {
                    bad = Some(c.to_string());
                }
            }
        });
    }
    match bad {
        Some(s) => Err(SolverError::NonlinearAtom(s)),
        None => Ok(()),
    }
}

struct Dpll<'a> {
    formulas: &'a [Formula],
    free: &'a [&'a VarDecl],
    stats: &'a mut SessionStats,
}

impl Dpll<'_> {
    fn search(
        &mut self,
        live: Vec<usize>,
        atom_values: &mut BTreeMap<Atom, bool>,
    ) -> Option<Assignment> {
        let mut still_live = Vec::with_capacity(live.len());
        for idx in live {
            match eval_with_atoms(&self.formulas[idx], atom_values) {
                Some(false) => {
                    self.stats.conflicts += 1;
                    return None;
                }
                Some(true) => {}
                None => still_live.push(idx),
            }
        }
        if still_live.is_empty() {
            return match self.theory_model(atom_values) {
                Some(model) => Some(model),
                None => {
                    self.stats.conflicts += 1;
                    None
                }
            };
        }
        let decision = still_live
            .iter()
            .find_map(|&idx| first_unassigned_atom(&self.formulas[idx], atom_values))
            .expect("undecided formula has an unassigned atom");
        for value in [false, true] {
            self.stats.nodes += 1;
            atom_values.insert(decision.clone(), value);
            if let Some(model) = self.search(still_live.clone(), atom_values) {
                atom_values.remove(&decision);
                return Some(model);
            }
            atom_values.remove(&decision);
        }
        None
    }

    /// Checks the constraints implied by the assigned order atoms with
    /// Fourier-Motzkin and, when feasible, extracts a rational model.
    fn theory_model(&mut self, atom_values: &BTreeMap<Atom, bool>) -> Option<Assignment> {
        let mut rows: BTreeSet<Row> = BTreeSet::new();
        for d in self.free {
            if let Some(iv) = d.sort.interval() {
                // lo <= v <= hi
                rows.insert(Row::upper(d.id, iv.hi().clone()));
                rows.insert(Row::lower(d.id, iv.lo().clone()));
            }
        }
        let mut model = Assignment::new();
        for (atom, value) in atom_values {
            match atom {
                Atom::Bool(v) => {
                    model.bind(*v, Value::Bool(*value));
                }
                Atom::Cmp(c) => {
                    let effective = if *value { c.clone() } else { c.negated() };
                    rows.extend(Row::from_atom(&effective));
                }
            }
        }

        // Eliminate numeric variables in reverse declaration order,
        // snapshotting the rows that mention each variable for
        // back-substitution.
        let numeric: Vec<VarId> = self
            .free
            .iter()
            .filter(|d| d.sort.is_numeric())
            .map(|d| d.id)
            .collect();
        let mut rows: Vec<Row> = rows.into_iter().collect();
        let mut snapshots: Vec<(VarId, Vec<Row>)> = Vec::new();
        for &v in numeric.iter().rev() {
            let (with_v, rest): (Vec<Row>, Vec<Row>) =
                rows.into_iter().partition(|r| r.coeffs.contains_key(&v));
            let mut next: BTreeSet<Row> = rest.into_iter().collect();
            let pos: Vec<&Row> = with_v
                .iter()
                .filter(|r| r.coeffs[&v].is_positive())
                .collect();
            let neg: Vec<&Row> = with_v
                .iter()
                .filter(|r| r.coeffs[&v].is_negative())
                .collect();
            for p in &pos {
                for n in &neg {
                    let combined = p.eliminate_with(n, v);
                    if combined.coeffs.is_empty() {
                        if !combined.constant_feasible() {
                            return None;
                        }
                    } else {
                        next.insert(combined.normalized());
                    }
                }
            }
            snapshots.push((v, with_v));
            rows = next.into_iter().collect();
        }
        for r in &rows {
            debug_assert!(r.coeffs.is_empty());
            if !r.constant_feasible() {
                return None;
            }
        }

        // Back-substitute in declaration order.
        let mut values: BTreeMap<VarId, Rational> = BTreeMap::new();
        for (v, snapshot) in snapshots.iter().rev() {
            let mut lo: Option<(Rational, bool)> = None;
            let mut hi: Option<(Rational, bool)> = None;
            for row in snapshot {
                let coeff = &row.coeffs[v];
                let mut rest = row.bound.clone();
                for (w, c) in &row.coeffs {
                    if w != v {
                        rest -= c * values.get(w).expect("earlier variable assigned");
                    }
                }
                let bound = rest / coeff;
                if coeff.is_positive() {
                    // v <= bound
                    if hi.as_ref().map(|(b, s)| bound < *b || (bound == *b && row.strict && !s)).unwrap_or(true) {
                        hi = Some((bound, row.strict));
                    }
                } else {
                    // v >= bound
                    if lo.as_ref().map(|(b, s)| bound > *b || (bound == *b && row.strict && !s)).unwrap_or(true) {
                        lo = Some((bound, row.strict));
                    }
                }
            }
            let (lo, lo_strict) = lo.expect("box row bounds every variable");
            let (hi, hi_strict) = hi.expect("box row bounds every variable");
            values.insert(*v, choose_value(lo, lo_strict, hi, hi_strict)?);
        }
        for (v, r) in values {
            model.bind(v, Value::Rat(r));
        }
        Some(model)
    }
}

/// Value selection inside a nonempty feasible interval.
fn choose_value(lo: Rational, lo_strict: bool, hi: Rational, hi_strict: bool) -> Option<Rational> {
    if lo > hi || (lo == hi && (lo_strict || hi_strict)) {
        return None;
    }
    if lo == hi {
        return Some(lo);
    }
    let fits = |c: &Rational| {
        (if lo_strict { c > &lo } else { c >= &lo }) && (if hi_strict { c < &hi } else { c <= &hi })
    };
    if hi_strict {
        let c = &hi - rat(1);
        if fits(&c) {
            return Some(c);
        }
    }
    if lo_strict {
        let c = &lo + rat(1);
        if fits(&c) {
            return Some(c);
        }
    }
    Some((lo + hi) / rat(2))
}

/// A linear row `Σ coeffs·v  (<|≤)  bound`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    coeffs: BTreeMap<VarId, Rational>,
    bound: Rational,
    strict: bool,
}

impl Row {
    fn upper(v: VarId, bound: Rational) -> Row {
        Row {
            coeffs: BTreeMap::from([(v, rat(1))]),
            bound,
            strict: false,
        }
    }

    fn lower(v: VarId, bound: Rational) -> Row {
        Row {
            coeffs: BTreeMap::from([(v, rat(-1))]),
            bound: -bound,
            strict: false,
        }
    }

    /// Rows of an order atom. The atom must be linear.
    fn from_atom(atom: &crate::ir::PolyAtom) -> Option<Row> {
        let (sign, strict) = match atom.op {
            CmpOp::Le => (rat(1), false),
            CmpOp::Lt => (rat(1), true),
            CmpOp::Ge => (rat(-1), false),
            CmpOp::Gt => (rat(-1), true),
            CmpOp::Eq | CmpOp::Ne => unreachable!("equalities expanded before the skeleton"),
        };
        let mut coeffs = BTreeMap::new();
        for m in atom.poly.monomials() {
            let (v, e) = m.powers.iter().next().expect("nonempty powers");
            debug_assert!(e == 1 && m.powers.iter().count() == 1);
            coeffs.insert(v, &m.coeff * &sign);
        }
        if coeffs.is_empty() {
            // Constant atom: keep as a 0 <= bound row for the feasibility
            // check.
        }
        Some(
            Row {
                coeffs,
                bound: &atom.rhs * &sign,
                strict,
            }
            .normalized(),
        )
    }

    /// Scales so the leading coefficient is ±1, for deduplication.
    fn normalized(mut self) -> Row {
        if let Some((_, c)) = self.coeffs.iter().next() {
            let scale = c.abs();
            if !scale.is_zero() && scale != rat(1) {
                for v in self.coeffs.values_mut() {
                    *v /= &scale;
                }
                self.bound /= &scale;
            }
        }
        self
    }

    /// Combines a positive-coefficient row with a negative-coefficient row
    /// to eliminate `v`.
    fn eliminate_with(&self, neg: &Row, v: VarId) -> Row {
        let cp = self.coeffs[&v].clone();
        let cn = neg.coeffs[&v].clone();
        debug_assert!(cp.is_positive() && cn.is_negative());
        let a = -cn; // scale for self
        let b = cp; // scale for neg
        let mut coeffs: BTreeMap<VarId, Rational> = BTreeMap::new();
        for (w, c) in &self.coeffs {
            if *w != v {
                *coeffs.entry(*w).or_insert_with(Rational::zero) += c * &a;
            }
        }
        for (w, c) in &neg.coeffs {
            if *w != v {
                *coeffs.entry(*w).or_insert_with(Rational::zero) += c * &b;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Row {
            coeffs,
            bound: &self.bound * &a + &neg.bound * &b,
            strict: self.strict || neg.strict,
        }
    }

    /// Feasibility of a variable-free row: `0 (<|≤) bound`.
    fn constant_feasible(&self) -> bool {
        if self.strict {
            self.bound.is_positive()
        } else {
            !self.bound.is_negative()
        }
    }
}

fn eval_with_atoms(f: &Formula, atoms: &BTreeMap<Atom, bool>) -> Option<bool> {
    match f {
        Formula::True => Some(true),
        Formula::False => Some(false),
        Formula::Atom(a) => atoms.get(a).copied(),
        Formula::Not(g) => eval_with_atoms(g, atoms).map(|b| !b),
        Formula::And(gs) => {
            let mut unknown = false;
            for g in gs {
                match eval_with_atoms(g, atoms) {
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
                match eval_with_atoms(g, atoms) {
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
        Formula::Implies(l, r) => match (eval_with_atoms(l, atoms), eval_with_atoms(r, atoms)) {
            (Some(false), _) | (_, Some(true)) => Some(true),
            (Some(true), Some(false)) => Some(false),
            _ => None,
        },
        Formula::Iff(l, r) => Some(eval_with_atoms(l, atoms)? == eval_with_atoms(r, atoms)?),
    }
}

/// First unassigned atom of a formula, in leaf order.
fn first_unassigned_atom(f: &Formula, atoms: &BTreeMap<Atom, bool>) -> Option<Atom> {
    let mut found = None;
    f.visit_atoms(&mut |a| {
        if found.is_none() && !atoms.contains_key(a) {
            found = Some(a.clone());
        }
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::ratio;
    use crate::ir::{Polynomial, Sort};

    fn real_decl(id: u32, name: &str, lo: i64, hi: i64) -> VarDecl {
        VarDecl::new(VarId(id), name, Sort::real(lo, hi))
    }

    fn run(decls: &[VarDecl], assertions: &[Formula]) -> CheckResult {
        let mut stats = SessionStats::default();
        check(decls, assertions, &mut stats).unwrap()
    }

    #[test]
    fn feasible_interval_extraction() {
        // 0 < y < 10 and y >= 7 over y in [-30,30]: the feasible interval
        // is [7,10); the strict upper bound puts the model at 10 - 1 = 9.
        let y = real_decl(0, "y", -30, 30);
        let py = Polynomial::var(y.id);
        let assertions = vec![
            Formula::cmp(py.clone(), CmpOp::Gt, rat(0)),
            Formula::cmp(py.clone(), CmpOp::Lt, rat(10)),
            Formula::cmp(py.clone(), CmpOp::Ge, rat(7)),
        ];
        match run(&[y.clone()], &assertions) {
            CheckResult::Sat(m) => assert_eq!(m.rational(y.id), Some(&rat(9))),
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn contradictory_strict_bounds_unsat() {
        let x = real_decl(0, "x", -10, 10);
        let px = Polynomial::var(x.id);
        let assertions = vec![
            Formula::cmp(px.clone(), CmpOp::Lt, rat(0)),
            Formula::cmp(px.clone(), CmpOp::Gt, rat(0)),
        ];
        assert_eq!(run(&[x], &assertions), CheckResult::Unsat);
    }

    #[test]
    fn box_only_check_picks_midpoints() {
        let x = real_decl(0, "x", -30, 30);
        match run(&[x.clone()], &[]) {
            CheckResult::Sat(m) => assert_eq!(m.rational(x.id), Some(&rat(0))),
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn strict_lower_bound_lands_one_unit_inside() {
        // x > 1 within [-30, 30]: feasible (1, 30], extraction gives 2.
        let x = real_decl(0, "x", -30, 30);
        let assertions = vec![Formula::cmp(Polynomial::var(x.id), CmpOp::Gt, rat(1))];
        match run(&[x.clone()], &assertions) {
            CheckResult::Sat(m) => assert_eq!(m.rational(x.id), Some(&rat(2))),
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn narrow_strict_interval_falls_back_to_midpoint() {
        // 0 < x <= 1/32: both unit offsets overshoot, midpoint 1/64.
        let x = real_decl(0, "x", 0, 10);
        let px = Polynomial::var(x.id);
        let assertions = vec![
            Formula::cmp(px.clone(), CmpOp::Gt, rat(0)),
            Formula::cmp(px.clone(), CmpOp::Le, ratio(1, 32)),
        ];
        match run(&[x.clone()], &assertions) {
            CheckResult::Sat(m) => assert_eq!(m.rational(x.id), Some(&ratio(1, 64))),
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn disequality_splits_into_disjunction() {
        // x != 0 with x in [0, 1]: the < branch is infeasible at the box
        // edge, the > branch gives a model.
        let x = real_decl(0, "x", 0, 1);
        let assertions = vec![Formula::cmp(Polynomial::var(x.id), CmpOp::Ne, rat(0))];
        match run(&[x.clone()], &assertions) {
            CheckResult::Sat(m) => {
                assert!(m.rational(x.id).unwrap() > &rat(0));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn equality_between_variables() {
        let x = real_decl(0, "x", 0, 10);
        let y = real_decl(1, "y", 3, 3);
        let diff = Polynomial::var(x.id).sub(&Polynomial::var(y.id));
        let assertions = vec![Formula::cmp(diff, CmpOp::Eq, rat(0))];
        match run(&[x.clone(), y.clone()], &assertions) {
            CheckResult::Sat(m) => {
                assert_eq!(m.rational(x.id), Some(&rat(3)));
                assert_eq!(m.rational(y.id), Some(&rat(3)));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn eq6_matrix_is_sat_with_positive_gains() {
        // m > 0 ∧ k_p > 0 ∧ k_i > 0 with k_p, k_i in [-100, 100] and
        // m fixed at 600.
        let kp = real_decl(0, "k_p", -100, 100);
        let ki = real_decl(1, "k_i", -100, 100);
        let m = real_decl(2, "m", 600, 1200);
        let assertions = vec![
            Formula::cmp(Polynomial::var(m.id), CmpOp::Gt, rat(0)),
            Formula::cmp(Polynomial::var(kp.id), CmpOp::Gt, rat(0)),
            Formula::cmp(Polynomial::var(ki.id), CmpOp::Gt, rat(0)),
        ];
        match run(&[kp.clone(), ki.clone(), m.clone()], &assertions) {
            CheckResult::Sat(model) => {
                assert!(model.rational(kp.id).unwrap() > &rat(0));
                assert!(model.rational(ki.id).unwrap() > &rat(0));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }

    #[test]
    fn nonlinear_atom_is_rejected() {
        let x = real_decl(0, "x", 0, 1);
        let sq = Polynomial::var(x.id).pow(2);
        let err = {
            let mut stats = SessionStats::default();
            check(
                &[x],
                &[Formula::cmp(sq, CmpOp::Gt, rat(0))],
                &mut stats,
            )
        };
        assert!(matches!(err, Err(SolverError::NonlinearAtom(_))));
    }

    #[test]
    fn boolean_skeleton_with_arithmetic() {
        // (p -> x > 5) ∧ p over x in [0, 10].
        let p = VarDecl::new(VarId(0), "p", Sort::Bool);
        let x = real_decl(1, "x", 0, 10);
        let assertions = vec![
            Formula::implies(
                Formula::bool_var(p.id),
                Formula::cmp(Polynomial::var(x.id), CmpOp::Gt, rat(5)),
            ),
            Formula::bool_var(p.id),
        ];
        match run(&[p.clone(), x.clone()], &assertions) {
            CheckResult::Sat(m) => {
                assert_eq!(m.boolean(p.id), Some(true));
                assert!(m.rational(x.id).unwrap() > &rat(5));
            }
            other => panic!("expected sat, got {other:?}"),
        }
    }
}
