//! Definite-binding extraction shared by the internal backends.
//!
//! Top-level conjuncts of the shape `v = c` (or bare boolean literals) fix a
//! variable outright; substituting them before search keeps pushed candidate
//! equalities from blowing up the atom skeleton or the enumeration, and lets
//! a session over mixed sorts behave like one over the residual variables.

use std::collections::BTreeMap;

use crate::ir::{Assignment, Atom, CmpOp, Formula, Value, VarDecl, VarId};

pub(crate) struct Prepass {
    pub bindings: Assignment,
    /// Substituted assertions with satisfied conjuncts dropped.
    pub residual: Vec<Formula>,
    /// Set when the definitional bindings already contradict each other,
    /// violate a sort, or falsify an assertion.
    pub conflict: bool,
}

pub(crate) fn run(decls: &[VarDecl], assertions: &[Formula]) -> Prepass {
    let mut bindings = Assignment::new();
    let mut residual: Vec<Formula> = assertions.to_vec();
    let by_id: BTreeMap<VarId, &VarDecl> = decls.iter().map(|d| (d.id, d)).collect();

    loop {
        let mut new_any = false;
        let mut conflict = false;
        for f in &residual {
            for conjunct in conjuncts(f) {
                if let Some((v, value)) = definite_binding(conjunct) {
                    match bindings.get(v) {
                        Some(old) if *old != value => conflict = true,
                        Some(_) => {}
                        None => {
                            let ok = match (by_id.get(&v), &value) {
                                (Some(d), Value::Rat(r)) => d.sort.admits(r),
                                (Some(d), Value::Bool(_)) => d.sort.is_bool(),
                                (None, _) => false,
                            };
                            if ok {
                                bindings.bind(v, value);
                                new_any = true;
                            } else {
                                conflict = true;
                            }
                        }
                    }
                }
            }
        }
        if conflict {
            return Prepass {
                bindings,
                residual,
                conflict: true,
            };
        }
        if !new_any {
            break;
        }
        let mut next = Vec::with_capacity(residual.len());
        for f in &residual {
            match f.substitute(&bindings).simplify() {
                Formula::True => {}
                Formula::False => {
                    return Prepass {
                        bindings,
                        residual: vec![Formula::False],
                        conflict: true,
                    }
                }
                g => next.push(g),
            }
        }
        residual = next;
    }

    Prepass {
        bindings,
        residual,
        conflict: false,
    }
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        Formula::And(gs) => gs.iter().flat_map(conjuncts).collect(),
        other => vec![other],
    }
}

/// Recognizes `c·v = r` (giving `v = r/c`), a bare boolean variable, or its
/// negation.
fn definite_binding(f: &Formula) -> Option<(VarId, Value)> {
    match f {
        Formula::Atom(Atom::Bool(v)) => Some((*v, Value::Bool(true))),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Atom(Atom::Bool(v)) => Some((*v, Value::Bool(false))),
            _ => None,
        },
        Formula::Atom(Atom::Cmp(c)) if c.op == CmpOp::Eq && c.poly.num_terms() == 1 => {
            let m = c.poly.monomials().next().expect("one term");
            let mut powers = m.powers.iter();
            let (v, e) = powers.next().expect("nonempty powers");
            if e == 1 && powers.next().is_none() {
                Some((v, Value::Rat(&c.rhs / &m.coeff)))
            } else {
                None
            }
        }
        _ => None,
    }
}
