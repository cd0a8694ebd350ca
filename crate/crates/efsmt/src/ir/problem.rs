use std::collections::BTreeSet;

use super::atom::{Atom, PolyAtom};
use super::formula::Formula;
use super::sort::Sort;
use super::var::{VarDecl, VarId};
use super::IrError;

/// Which quantifier block a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// An exists-forall problem: two ordered blocks of box-bounded variables and
/// a quantifier-free matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EFProblem {
    pub exists_vars: Vec<VarDecl>,
    pub forall_vars: Vec<VarDecl>,
    pub matrix: Formula,
}

impl EFProblem {
    pub fn new(
        exists_vars: Vec<VarDecl>,
        forall_vars: Vec<VarDecl>,
        matrix: Formula,
    ) -> Result<Self, IrError> {
        let p = EFProblem {
            exists_vars,
            forall_vars,
            matrix,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), IrError> {
        let mut seen = BTreeSet::new();
        for d in self.all_decls() {
            if !seen.insert(d.id) {
                return Err(IrError::DuplicateVariable(d.name.clone()));
            }
        }
        let declared: BTreeSet<VarId> = self.all_decls().map(|d| d.id).collect();
        for v in self.matrix.free_vars() {
            if !declared.contains(&v) {
                return Err(IrError::UndeclaredVariable(v.to_string()));
            }
        }
        // Sort discipline of atoms: polynomial atoms over numeric variables,
        // boolean atoms over bool variables. Numeric domains are bounded by
        // construction of Sort.
        let mut err = None;
        self.matrix.visit_atoms(&mut |a| {
            if err.is_some() {
                return;
            }
            match a {
                Atom::Cmp(c) => {
                    for v in c.poly.vars() {
                        if self.decl(v).map(|d| d.sort.is_bool()).unwrap_or(false) {
                            err = Some(IrError::BooleanInPolynomial(self.name_of(v)));
                        }
                    }
                }
                Atom::Bool(v) => {
                    if self.decl(*v).map(|d| !d.sort.is_bool()).unwrap_or(false) {
                        err = Some(IrError::NumericAsBoolean(self.name_of(*v)));
                    }
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn all_decls(&self) -> impl Iterator<Item = &VarDecl> {
        self.exists_vars.iter().chain(self.forall_vars.iter())
    }

    pub fn decl(&self, v: VarId) -> Option<&VarDecl> {
        self.all_decls().find(|d| d.id == v)
    }

    pub fn name_of(&self, v: VarId) -> String {
        self.decl(v).map(|d| d.name.clone()).unwrap_or(v.to_string())
    }

    pub fn quantifier_of(&self, v: VarId) -> Option<Quantifier> {
        if self.exists_vars.iter().any(|d| d.id == v) {
            Some(Quantifier::Exists)
        } else if self.forall_vars.iter().any(|d| d.id == v) {
            Some(Quantifier::Forall)
        } else {
            None
        }
    }

    /// True when every monomial of every polynomial atom is at most bilinear
    /// across the quantifier split: total degree over existential variables
    /// <= 1 and over universal variables <= 1. Such problems stay linear on
    /// both sides of the counterexample loop once the other side is fixed.
    pub fn linearizable(&self) -> bool {
        let exists: BTreeSet<VarId> = self.exists_vars.iter().map(|d| d.id).collect();
        let mut ok = true;
        self.matrix.visit_atoms(&mut |a| {
            if let Atom::Cmp(c) = a {
                for m in c.poly.monomials() {
                    let mut e_deg = 0u32;
                    let mut f_deg = 0u32;
                    for (v, e) in m.powers.iter() {
                        if exists.contains(&v) {
                            e_deg += e;
                        } else {
                            f_deg += e;
                        }
                    }
                    if e_deg > 1 || f_deg > 1 {
                        ok = false;
                    }
                }
            }
        });
        ok
    }

    /// True when all declared variables (of the given block, or both) have
    /// finite domains.
    pub fn all_finite(&self) -> bool {
        self.all_decls().all(|d| d.sort.is_finite())
    }
}

/// One assume-guarantee rule: `(⋀ assumptions) → guarantee`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgRule {
    pub assumptions: Vec<PolyAtom>,
    pub guarantee: PolyAtom,
}

impl AgRule {
    pub fn to_formula(&self) -> Formula {
        let guard = Formula::and(
            self.assumptions
                .iter()
                .map(|a| Formula::Atom(Atom::Cmp(a.clone()))),
        );
        let body = Formula::Atom(Atom::Cmp(self.guarantee.clone()));
        if self.assumptions.is_empty() {
            body
        } else {
            Formula::implies(guard, body)
        }
    }
}

/// An exists-forall problem whose matrix is a conjunction of
/// assume-guarantee rules over polynomial atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgProblem {
    pub exists_vars: Vec<VarDecl>,
    pub forall_vars: Vec<VarDecl>,
    pub rules: Vec<AgRule>,
}

impl AgProblem {
    /// The equivalent plain exists-forall problem.
    pub fn to_ef(&self) -> EFProblem {
        EFProblem {
            exists_vars: self.exists_vars.clone(),
            forall_vars: self.forall_vars.clone(),
            matrix: Formula::and(self.rules.iter().map(|r| r.to_formula())),
        }
    }

    /// Recognizes a matrix of assume-guarantee shape: a conjunction of rules,
    /// where each rule is a polynomial atom or an implication from a
    /// conjunction of polynomial atoms to one polynomial atom. Implications
    /// with a conjunction of guarantees are split into one rule per
    /// guarantee.
    pub fn from_ef(p: &EFProblem) -> Result<AgProblem, IrError> {
        let mut rules = Vec::new();
        collect_rules(&p.matrix, &mut rules)?;
        Ok(AgProblem {
            exists_vars: p.exists_vars.clone(),
            forall_vars: p.forall_vars.clone(),
            rules,
        })
    }
}

fn as_poly_atom(f: &Formula) -> Option<PolyAtom> {
    match f {
        Formula::Atom(Atom::Cmp(c)) => Some(c.clone()),
        _ => None,
    }
}

fn as_atom_conjunction(f: &Formula) -> Option<Vec<PolyAtom>> {
    match f {
        Formula::True => Some(Vec::new()),
        Formula::Atom(Atom::Cmp(c)) => Some(vec![c.clone()]),
        Formula::And(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(as_atom_conjunction(g)?);
            }
            Some(out)
        }
        _ => None,
    }
}

fn collect_rules(f: &Formula, out: &mut Vec<AgRule>) -> Result<(), IrError> {
    match f {
        Formula::True => Ok(()),
        Formula::And(gs) => {
            for g in gs {
                collect_rules(g, out)?;
            }
            Ok(())
        }
        Formula::Atom(Atom::Cmp(c)) => {
            out.push(AgRule {
                assumptions: Vec::new(),
                guarantee: c.clone(),
            });
            Ok(())
        }
        Formula::Implies(l, r) => {
            let assumptions = as_atom_conjunction(l)
                .ok_or_else(|| IrError::NotAgForm(format!("assumption side: {l:?}")))?;
            let guarantees = as_atom_conjunction(r)
                .ok_or_else(|| IrError::NotAgForm(format!("guarantee side: {r:?}")))?;
            if guarantees.is_empty() {
                return Ok(());
            }
            for g in guarantees {
                out.push(AgRule {
                    assumptions: assumptions.clone(),
                    guarantee: g,
                });
            }
            Ok(())
        }
        other => Err(IrError::NotAgForm(format!("{other:?}"))),
    }
}

/// Incremental builder assigning dense variable ids.
#[derive(Debug, Default)]
pub struct ProblemBuilder {
    exists: Vec<VarDecl>,
    forall: Vec<VarDecl>,
    next: u32,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        ProblemBuilder::default()
    }

    pub fn exists(&mut self, name: impl Into<String>, sort: Sort) -> VarId {
        let id = VarId(self.next);
        self.next += 1;
        self.exists.push(VarDecl::new(id, name, sort));
        id
    }

    pub fn forall(&mut self, name: impl Into<String>, sort: Sort) -> VarId {
        let id = VarId(self.next);
        self.next += 1;
        self.forall.push(VarDecl::new(id, name, sort));
        id
    }

    pub fn exists_decls(&self) -> &[VarDecl] {
        &self.exists
    }

    pub fn forall_decls(&self) -> &[VarDecl] {
        &self.forall
    }

    pub fn finish(self, matrix: Formula) -> Result<EFProblem, IrError> {
        EFProblem::new(self.exists, self.forall, matrix)
    }

    pub fn finish_ag(self, rules: Vec<AgRule>) -> AgProblem {
        AgProblem {
            exists_vars: self.exists,
            forall_vars: self.forall,
            rules,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::poly::Polynomial;
    use crate::ir::rational::rat;
    use crate::ir::CmpOp;

    #[test]
    fn linearizable_bilinear_example() {
        // s*y + 2t + t*z > 0 with exists {s,t}, forall {y,z}.
        let mut b = ProblemBuilder::new();
        let s = b.exists("s", Sort::real(-10, 10));
        let t = b.exists("t", Sort::real(-10, 10));
        let y = b.forall("y", Sort::real(-10, 10));
        let z = b.forall("z", Sort::real(-10, 10));
        let poly = Polynomial::var(s)
            .mul(&Polynomial::var(y))
            .add(&Polynomial::var(t).scale(&rat(2)))
            .add(&Polynomial::var(t).mul(&Polynomial::var(z)));
        let p = b.finish(Formula::cmp(poly, CmpOp::Gt, rat(0))).unwrap();
        assert!(p.linearizable());
    }

    #[test]
    fn linearizable_rejects_two_existential_factors() {
        // k_p * k_i > t * u: the monomial k_p*k_i has two existential
        // variables.
        let mut b = ProblemBuilder::new();
        let kp = b.exists("k_p", Sort::real(-100, 100));
        let ki = b.exists("k_i", Sort::real(-100, 100));
        let t = b.forall("t", Sort::real(0, 10));
        let u = b.forall("u", Sort::real(0, 10));
        let poly = Polynomial::var(kp)
            .mul(&Polynomial::var(ki))
            .sub(&Polynomial::var(t).mul(&Polynomial::var(u)));
        let p = b.finish(Formula::cmp(poly, CmpOp::Gt, rat(0))).unwrap();
        assert!(!p.linearizable());
    }

    #[test]
    fn linearizable_accepts_purely_linear() {
        let mut b = ProblemBuilder::new();
        let x = b.exists("x", Sort::real(-30, 30));
        let y = b.forall("y", Sort::real(-30, 30));
        let poly = Polynomial::var(y).sub(&Polynomial::var(x).scale(&rat(2)));
        let p = b.finish(Formula::cmp(poly, CmpOp::Lt, rat(7))).unwrap();
        assert!(p.linearizable());
    }

    #[test]
    fn validation_catches_undeclared_and_sort_misuse() {
        let mut b = ProblemBuilder::new();
        let _x = b.exists("x", Sort::real(0, 1));
        let stray = Formula::cmp(Polynomial::var(VarId(7)), CmpOp::Gt, rat(0));
        assert!(matches!(
            b.finish(stray),
            Err(IrError::UndeclaredVariable(_))
        ));

        let mut b = ProblemBuilder::new();
        let p = b.exists("p", Sort::Bool);
        let bad = Formula::cmp(Polynomial::var(p), CmpOp::Gt, rat(0));
        assert!(matches!(
            b.finish(bad),
            Err(IrError::BooleanInPolynomial(_))
        ));
    }

    #[test]
    fn ag_round_trip_structure() {
        let mut b = ProblemBuilder::new();
        let a = b.exists("a", Sort::real(0, 10));
        let z = b.forall("z", Sort::real(-5, 5));
        let assumption = PolyAtom::new(Polynomial::var(z), CmpOp::Lt, rat(1));
        let guarantee = PolyAtom::new(
            Polynomial::var(a).mul(&Polynomial::var(z)),
            CmpOp::Ge,
            rat(0),
        );
        let rules = vec![
            AgRule {
                assumptions: vec![],
                guarantee: PolyAtom::new(Polynomial::var(a), CmpOp::Gt, rat(0)),
            },
            AgRule {
                assumptions: vec![assumption],
                guarantee,
            },
        ];
        let ag = b.finish_ag(rules.clone());
        let ef = ag.to_ef();
        let back = AgProblem::from_ef(&ef).unwrap();
        assert_eq!(back.rules, rules);
    }
}
