//! Nonlinear universal checker: proves or refutes polynomial
//! assume-guarantee systems over boxes via Bernstein coefficient
//! enclosures with box subdivision.
//!
//! An atom `p op c` is proved on a sub-box when every Bernstein
//! coefficient of `p` satisfies the comparison, and refuted when a corner
//! coefficient — an exact value of `p` — violates it. Anything else
//! bisects the widest dimension and recurses; exhausting the depth budget
//! yields an undecided verdict, never a guess.

mod tensor;

pub use tensor::{normalize_box, BernsteinTensor};

use thiserror::Error;

use crate::ir::rational::Rational;
use crate::ir::{AgRule, Assignment, CmpOp, Interval, PolyAtom, Value, VarId};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BernsteinError {
    #[error("the Bernstein checker only handles order comparisons, got {0:?}")]
    UnsupportedOperator(CmpOp),

    #[error("requested degree {given} for {var} is below the polynomial degree {needed}")]
    DegreeTooSmall { var: String, needed: u32, given: u32 },

    #[error("polynomial variable {0} has no box")]
    UnboxedVariable(String),
}

/// Verdict for a single universally quantified atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomVerdict {
    Proved,
    Refuted(Assignment),
    Undecided,
}

/// Verdict for an assume-guarantee system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemVerdict {
    Proved,
    Refuted(Assignment),
    Undecided,
}

/// Decides `∀ ȳ ∈ box: p op c` by Bernstein enclosure with bisection up to
/// `max_depth`.
pub fn check_atom(
    atom: &PolyAtom,
    bounds: &[(VarId, Interval)],
    max_depth: u32,
) -> Result<AtomVerdict, BernsteinError> {
    let rule = AgRule {
        assumptions: Vec::new(),
        guarantee: atom.clone(),
    };
    Ok(match check_ag(&[rule], bounds, max_depth)? {
        SystemVerdict::Proved => AtomVerdict::Proved,
        SystemVerdict::Refuted(p) => AtomVerdict::Refuted(p),
        SystemVerdict::Undecided => AtomVerdict::Undecided,
    })
}

/// Decides a conjunction of assume-guarantee rules over a box.
///
/// Per sub-box a rule is discharged when some assumption is surely false
/// (its negation proved by the enclosure) or its guarantee is proved; it
/// is refuted when a corner point exactly satisfies every assumption and
/// violates the guarantee. Sub-boxes with live rules are bisected along
/// the widest dimension until the depth budget runs out.
pub fn check_ag(
    rules: &[AgRule],
    bounds: &[(VarId, Interval)],
    max_depth: u32,
) -> Result<SystemVerdict, BernsteinError> {
    for rule in rules {
        for atom in rule.assumptions.iter().chain([&rule.guarantee]) {
            if !atom.op.is_order() {
                return Err(BernsteinError::UnsupportedOperator(atom.op));
            }
            for v in atom.poly.vars() {
                if !bounds.iter().any(|(w, _)| *w == v) {
                    return Err(BernsteinError::UnboxedVariable(v.to_string()));
                }
            }
        }
    }

    // One tensor per distinct atom; rules index into the shared list so
    // subdivision splits each tensor once per node.
    let mut tensors: Vec<BernsteinTensor> = Vec::new();
    let mut indexed: Vec<(Vec<usize>, usize)> = Vec::new();
    let mut atoms: Vec<PolyAtom> = Vec::new();
    for rule in rules {
        let mut a_idx = Vec::with_capacity(rule.assumptions.len());
        for a in &rule.assumptions {
            a_idx.push(intern_atom(a, bounds, &mut atoms, &mut tensors)?);
        }
        let g_idx = intern_atom(&rule.guarantee, bounds, &mut atoms, &mut tensors)?;
        indexed.push((a_idx, g_idx));
    }

    let live: Vec<usize> = (0..indexed.len()).collect();
    let node = Node {
        atoms: &atoms,
        rules: &indexed,
    };
    Ok(node.check(tensors, live, 0, max_depth))
}

fn intern_atom(
    atom: &PolyAtom,
    bounds: &[(VarId, Interval)],
    atoms: &mut Vec<PolyAtom>,
    tensors: &mut Vec<BernsteinTensor>,
) -> Result<usize, BernsteinError> {
    if let Some(i) = atoms.iter().position(|a| a == atom) {
        return Ok(i);
    }
    tensors.push(BernsteinTensor::build(&atom.poly, bounds, None)?);
    atoms.push(atom.clone());
    Ok(atoms.len() - 1)
}

struct Node<'a> {
    atoms: &'a [PolyAtom],
    rules: &'a [(Vec<usize>, usize)],
}

impl Node<'_> {
    fn check(
        &self,
        tensors: Vec<BernsteinTensor>,
        live: Vec<usize>,
        depth: u32,
        max_depth: u32,
    ) -> SystemVerdict {
        // Discharge rules decided by the enclosures on this sub-box.
        let mut still_live = Vec::with_capacity(live.len());
        for &r in &live {
            let (assumptions, guarantee) = &self.rules[r];
            let vacuous = assumptions
                .iter()
                .any(|&i| surely_violates(&tensors[i], &self.atoms[i]));
            if vacuous || surely_holds(&tensors[*guarantee], &self.atoms[*guarantee]) {
                continue;
            }
            still_live.push(r);
        }
        if still_live.is_empty() {
            return SystemVerdict::Proved;
        }

        // Corner refutation: corner coefficients are exact values.
        let axes = tensors.first().map(|t| t.bounds().len()).unwrap_or(0);
        for corner in 0..(1usize << axes) {
            let upper: Vec<bool> = (0..axes).map(|a| corner >> a & 1 == 1).collect();
            for &r in &still_live {
                let (assumptions, guarantee) = &self.rules[r];
                let assumed = assumptions.iter().all(|&i| {
                    let val = tensors[i].corner_value(&upper);
                    self.atoms[i].op.holds(val, &self.atoms[i].rhs)
                });
                if !assumed {
                    continue;
                }
                let g = &self.atoms[*guarantee];
                let val = tensors[*guarantee].corner_value(&upper);
                if !g.op.holds(val, &g.rhs) {
                    return SystemVerdict::Refuted(full_corner_point(&tensors[0], &upper));
                }
            }
        }

        if depth >= max_depth {
            return SystemVerdict::Undecided;
        }
        let Some(axis) = tensors.first().and_then(BernsteinTensor::widest_axis) else {
            // A point box with live rules cannot be split further.
            return SystemVerdict::Undecided;
        };

        let mut lefts = Vec::with_capacity(tensors.len());
        let mut rights = Vec::with_capacity(tensors.len());
        for t in &tensors {
            let (l, r) = t.subdivide(axis);
            lefts.push(l);
            rights.push(r);
        }
        let left = self.check(lefts, still_live.clone(), depth + 1, max_depth);
        if let SystemVerdict::Refuted(_) = left {
            return left;
        }
        let right = self.check(rights, still_live, depth + 1, max_depth);
        match (left, right) {
            (_, r @ SystemVerdict::Refuted(_)) => r,
            (SystemVerdict::Proved, SystemVerdict::Proved) => SystemVerdict::Proved,
            _ => SystemVerdict::Undecided,
        }
    }
}

/// Every enclosure coefficient satisfies the comparison.
fn surely_holds(tensor: &BernsteinTensor, atom: &PolyAtom) -> bool {
    range_decides(tensor, atom.op, &atom.rhs)
}

/// Every enclosure coefficient satisfies the *negated* comparison, i.e.
/// the atom is false everywhere on the sub-box.
fn surely_violates(tensor: &BernsteinTensor, atom: &PolyAtom) -> bool {
    range_decides(tensor, atom.op.negated(), &atom.rhs)
}

fn range_decides(tensor: &BernsteinTensor, op: CmpOp, rhs: &Rational) -> bool {
    match op {
        CmpOp::Lt => tensor.max_coeff() < rhs,
        CmpOp::Le => tensor.max_coeff() <= rhs,
        CmpOp::Gt => tensor.min_coeff() > rhs,
        CmpOp::Ge => tensor.min_coeff() >= rhs,
        CmpOp::Eq | CmpOp::Ne => unreachable!("order operators checked at entry"),
    }
}

/// A witness point for a corner selector, covering every boxed axis.
fn full_corner_point(tensor: &BernsteinTensor, upper: &[bool]) -> Assignment {
    let mut a = Assignment::new();
    for (axis, v) in tensor.vars().iter().enumerate() {
        let iv = &tensor.bounds()[axis];
        let val = if upper[axis] {
            iv.hi().clone()
        } else {
            iv.lo().clone()
        };
        a.bind(*v, Value::Rat(val));
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::{rat, ratio};
    use crate::ir::Polynomial;

    fn v(n: u32) -> VarId {
        VarId(n)
    }

    #[test]
    fn square_example_proved_at_depth_zero() {
        // ∀x ∈ [1,3]: x² − 4x + 4 > −3.
        let x = Polynomial::var(v(0));
        let p = x
            .pow(2)
            .add(&x.scale(&rat(-4)))
            .add(&Polynomial::constant(rat(4)));
        let atom = PolyAtom::new(p, CmpOp::Gt, rat(-3));
        let verdict = check_atom(&atom, &[(v(0), Interval::of(1, 3))], 0).unwrap();
        assert_eq!(verdict, AtomVerdict::Proved);
    }

    #[test]
    fn corner_violation_refutes_with_witness() {
        // ∀x ∈ [−1,1]: x > 0 fails at the corner x = −1.
        let atom = PolyAtom::new(Polynomial::var(v(0)), CmpOp::Gt, rat(0));
        let verdict = check_atom(&atom, &[(v(0), Interval::of(-1, 1))], 5).unwrap();
        match verdict {
            AtomVerdict::Refuted(w) => assert_eq!(w.rational(v(0)), Some(&rat(-1))),
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn square_nonnegativity_proved_after_subdivision() {
        let atom = PolyAtom::new(Polynomial::var(v(0)).pow(2), CmpOp::Ge, rat(0));
        let verdict = check_atom(&atom, &[(v(0), Interval::of(-1, 1))], 10).unwrap();
        assert_eq!(verdict, AtomVerdict::Proved);
    }

    #[test]
    fn equality_operator_rejected() {
        let atom = PolyAtom::new(Polynomial::var(v(0)), CmpOp::Eq, rat(0));
        let err = check_atom(&atom, &[(v(0), Interval::of(0, 1))], 3);
        assert!(matches!(err, Err(BernsteinError::UnsupportedOperator(_))));
    }

    #[test]
    fn vacuous_rule_is_proved() {
        // (z > 10) → (z < -10) over z ∈ [-1, 1]: the assumption never holds.
        let z = Polynomial::var(v(0));
        let rule = AgRule {
            assumptions: vec![PolyAtom::new(z.clone(), CmpOp::Gt, rat(10))],
            guarantee: PolyAtom::new(z, CmpOp::Lt, rat(-10)),
        };
        let verdict = check_ag(&[rule], &[(v(0), Interval::of(-1, 1))], 3).unwrap();
        assert_eq!(verdict, SystemVerdict::Proved);
    }

    #[test]
    fn unconditional_false_guarantee_refuted_at_corner() {
        // true → z > 0 over z ∈ [-1, 1] is refuted at z = -1.
        let rule = AgRule {
            assumptions: vec![],
            guarantee: PolyAtom::new(Polynomial::var(v(0)), CmpOp::Gt, rat(0)),
        };
        let verdict = check_ag(&[rule], &[(v(0), Interval::of(-1, 1))], 5).unwrap();
        match verdict {
            SystemVerdict::Refuted(w) => assert_eq!(w.rational(v(0)), Some(&rat(-1))),
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn lyapunov_shape_proved() {
        // (z > -1 ∧ z < 1) → 16·z²(z+2)(z+3) ≥ 0 over z ∈ [−5,5]; the
        // certificate shape at the candidate (a, r) = (8, 1).
        let z = Polynomial::var(v(0));
        let guarantee_poly = z
            .pow(2)
            .scale(&rat(16))
            .mul(&z.add(&Polynomial::constant(rat(2))))
            .mul(&z.add(&Polynomial::constant(rat(3))));
        let rule = AgRule {
            assumptions: vec![
                PolyAtom::new(z.clone(), CmpOp::Gt, rat(-1)),
                PolyAtom::new(z.clone(), CmpOp::Lt, rat(1)),
            ],
            guarantee: PolyAtom::new(guarantee_poly, CmpOp::Ge, rat(0)),
        };
        let verdict = check_ag(&[rule], &[(v(0), Interval::of(-5, 5))], 10).unwrap();
        assert_eq!(verdict, SystemVerdict::Proved);
    }

    #[test]
    fn oversized_radius_is_refuted() {
        // With r = 5 the same certificate fails somewhere in (−3, −2).
        let z = Polynomial::var(v(0));
        let guarantee_poly = z
            .pow(2)
            .scale(&rat(16))
            .mul(&z.add(&Polynomial::constant(rat(2))))
            .mul(&z.add(&Polynomial::constant(rat(3))));
        let rule = AgRule {
            assumptions: vec![
                PolyAtom::new(z.clone(), CmpOp::Gt, rat(-5)),
                PolyAtom::new(z.clone(), CmpOp::Lt, rat(5)),
            ],
            guarantee: PolyAtom::new(guarantee_poly.clone(), CmpOp::Ge, rat(0)),
        };
        let verdict = check_ag(&[rule], &[(v(0), Interval::of(-5, 5))], 10).unwrap();
        match verdict {
            SystemVerdict::Refuted(w) => {
                let witness = w.rational(v(0)).unwrap().clone();
                assert!(witness > rat(-3) && witness < rat(-2));
                let val = guarantee_poly
                    .eval(&Assignment::new().with(v(0), Value::Rat(witness)))
                    .unwrap();
                assert!(val < rat(0));
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn depth_exhaustion_is_undecided() {
        // x² ≥ 0 at depth 0 on [−1,1]: the enclosure min is negative and
        // the corners satisfy the atom, so nothing is decided.
        let atom = PolyAtom::new(Polynomial::var(v(0)).pow(2), CmpOp::Ge, rat(0));
        let verdict = check_atom(&atom, &[(v(0), Interval::of(-1, 1))], 0).unwrap();
        assert_eq!(verdict, AtomVerdict::Undecided);
    }

    #[test]
    fn degenerate_axis_handled_as_constant() {
        let x = Polynomial::var(v(0));
        let atom = PolyAtom::new(x, CmpOp::Ge, ratio(1, 2));
        let verdict = check_atom(
            &atom,
            &[(v(0), Interval::new(ratio(1, 2), ratio(1, 2)).unwrap())],
            2,
        )
        .unwrap();
        assert_eq!(verdict, AtomVerdict::Proved);
    }
}
