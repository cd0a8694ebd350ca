//! Canonical printer for problem files: parse → print → parse is identity.

use num_traits::Zero;

use crate::ir::rational::{self, Rational};
use crate::ir::{Atom, CmpOp, EFProblem, Formula, Polynomial, Sort, VarDecl};

pub fn print_problem(p: &EFProblem) -> String {
    let mut out = String::new();
    for d in &p.exists_vars {
        out.push_str(&decl_line("declare-exists", d));
        out.push('\n');
    }
    for d in &p.forall_vars {
        out.push_str(&decl_line("declare-forall", d));
        out.push('\n');
    }
    // The canonical form keeps the whole matrix in one constrain form;
    // assume/guarantee grouping is surface syntax.
    out.push_str(&format!("(constrain {})\n", formula(&p.matrix, p)));
    out
}

fn decl_line(keyword: &str, d: &VarDecl) -> String {
    match &d.sort {
        Sort::Bool => format!("({keyword} {} bool)", d.name),
        Sort::BoundedInt(iv) => format!(
            "({keyword} {} int {} {})",
            d.name,
            num(iv.lo()),
            num(iv.hi())
        ),
        Sort::Real(iv) => format!(
            "({keyword} {} real {} {})",
            d.name,
            num(iv.lo()),
            num(iv.hi())
        ),
        Sort::Fixed(iv, step) => format!(
            "({keyword} {} fixed {} {} {})",
            d.name,
            num(iv.lo()),
            num(iv.hi()),
            num(step)
        ),
    }
}

fn num(r: &Rational) -> String {
    rational::display(r)
}

fn formula(f: &Formula, p: &EFProblem) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(Atom::Bool(v)) => p.name_of(*v),
        Formula::Atom(Atom::Cmp(c)) => {
            let op = match c.op {
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
                CmpOp::Eq => "=",
                CmpOp::Ne => "!=",
            };
            format!("({op} {} {})", term(&c.poly, p), num(&c.rhs))
        }
        Formula::Not(g) => format!("(not {})", formula(g, p)),
        Formula::And(gs) => nary("and", gs, p),
        Formula::Or(gs) => nary("or", gs, p),
        Formula::Implies(l, r) => format!("(=> {} {})", formula(l, p), formula(r, p)),
        Formula::Iff(l, r) => format!("(iff {} {})", formula(l, p), formula(r, p)),
    }
}

fn nary(op: &str, gs: &[Formula], p: &EFProblem) -> String {
    let parts: Vec<String> = gs.iter().map(|g| formula(g, p)).collect();
    format!("({op} {})", parts.join(" "))
}

fn term(poly: &Polynomial, p: &EFProblem) -> String {
    let mut parts: Vec<String> = Vec::new();
    for m in poly.monomials() {
        let mut factors: Vec<String> = Vec::new();
        if m.coeff != rational::rat(1) {
            factors.push(num(&m.coeff));
        }
        for (v, e) in m.powers.iter() {
            let name = p.name_of(v);
            if e == 1 {
                factors.push(name);
            } else {
                factors.push(format!("(^ {name} {e})"));
            }
        }
        parts.push(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            format!("(* {})", factors.join(" "))
        });
    }
    if !poly.constant_term().is_zero() || parts.is_empty() {
        parts.push(num(poly.constant_term()));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}
