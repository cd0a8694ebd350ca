//! SMT-LIB 2 text serialization and reply parsing.
//!
//! Serialization covers what the external adapter emits: `set-logic`,
//! `declare-fun`, `assert` (with box bounds as conjuncts), `push 1` /
//! `pop 1`, `check-sat`, and `get-value`. Rationals print as `(/ p q)` and
//! negative numbers as `(- k)`. Fixed-point variables are declared as a
//! real together with an auxiliary integer multiplier pinning the value to
//! the grid.
//!
//! Reply parsing is intentionally forgiving about whitespace but strict
//! about structure: any surprise yields an error that the adapter maps to
//! an unknown verdict.

use num_traits::{Signed, Zero};

use crate::ir::rational::{self, Rational};
use crate::ir::{Assignment, Atom, CmpOp, Formula, Polynomial, Sort, Value, VarDecl};
use crate::text::sexp::{self, Sexp};

/// A symbol an SMT-LIB solver will accept: alphanumerics and `_` pass
/// through, everything else is escaped into `|…|` quoting.
pub fn symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
        && !name.starts_with(|c: char| c.is_ascii_digit());
    if simple {
        name.to_string()
    } else {
        format!("|{}|", name.replace('|', "_"))
    }
}

fn aux_grid_symbol(name: &str) -> String {
    symbol(&format!("{name}!grid"))
}

/// The declarations plus bound assertions for one variable.
pub fn declare_lines(decl: &VarDecl) -> Vec<String> {
    let name = symbol(&decl.name);
    match &decl.sort {
        Sort::Bool => vec![format!("(declare-fun {name} () Bool)")],
        Sort::BoundedInt(iv) => vec![
            format!("(declare-fun {name} () Int)"),
            format!(
                "(assert (and (>= {name} {}) (<= {name} {})))",
                number(iv.lo()),
                number(iv.hi())
            ),
        ],
        Sort::Real(iv) => vec![
            format!("(declare-fun {name} () Real)"),
            format!(
                "(assert (and (>= {name} {}) (<= {name} {})))",
                number(iv.lo()),
                number(iv.hi())
            ),
        ],
        Sort::Fixed(iv, step) => {
            let k = aux_grid_symbol(&decl.name);
            vec![
                format!("(declare-fun {name} () Real)"),
                format!("(declare-fun {k} () Int)"),
                format!(
                    "(assert (= {name} (+ {} (* {} (to_real {k})))))",
                    number(iv.lo()),
                    number(step)
                ),
                format!(
                    "(assert (and (>= {k} 0) (<= {k} {})))",
                    (iv.width() / step).floor().to_integer()
                ),
            ]
        }
    }
}

/// Chooses the logic string from the declared sorts and the maximum atom
/// degree: `QF_LRA`/`QF_NRA` for all-real problems, the LIA/LIRA/NIA/NIRA
/// variants when integer-backed sorts are present.
pub fn logic_for(decls: &[VarDecl], nonlinear: bool) -> &'static str {
    let has_int = decls
        .iter()
        .any(|d| matches!(d.sort, Sort::BoundedInt(_) | Sort::Fixed(..)));
    let has_real = decls
        .iter()
        .any(|d| matches!(d.sort, Sort::Real(_) | Sort::Fixed(..)));
    match (has_int, has_real, nonlinear) {
        (false, _, false) => "QF_LRA",
        (false, _, true) => "QF_NRA",
        (true, false, false) => "QF_LIA",
        (true, false, true) => "QF_NIA",
        (true, true, false) => "QF_LIRA",
        (true, true, true) => "QF_NIRA",
    }
}

/// True when some atom of the formula has degree above one.
pub fn is_nonlinear(f: &Formula) -> bool {
    let mut nonlinear = false;
    f.visit_atoms(&mut |a| {
        if let Atom::Cmp(c) = a {
            if c.poly.monomials().any(|m| m.powers.total_degree() > 1) {
                nonlinear = true;
            }
        }
    });
    nonlinear
}

pub fn number(r: &Rational) -> String {
    fn positive(r: &Rational) -> String {
        if rational::is_integer(r) {
            r.numer().to_string()
        } else {
            format!("(/ {} {})", r.numer(), r.denom())
        }
    }
    if r.is_negative() {
        format!("(- {})", positive(&-r))
    } else {
        positive(r)
    }
}

pub fn assert_line(f: &Formula, decls: &[VarDecl]) -> String {
    format!("(assert {})", formula(f, decls))
}

pub fn formula(f: &Formula, decls: &[VarDecl]) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(Atom::Bool(v)) => var_name(*v, decls),
        Formula::Atom(Atom::Cmp(c)) => {
            let op = match c.op {
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
                CmpOp::Eq => "=",
                CmpOp::Ne => "distinct",
            };
            format!("({op} {} {})", polynomial(&c.poly, decls), number(&c.rhs))
        }
        Formula::Not(g) => format!("(not {})", formula(g, decls)),
        Formula::And(gs) => nary("and", gs, decls),
        Formula::Or(gs) => nary("or", gs, decls),
        Formula::Implies(l, r) => format!("(=> {} {})", formula(l, decls), formula(r, decls)),
        Formula::Iff(l, r) => format!("(= {} {})", formula(l, decls), formula(r, decls)),
    }
}

fn nary(op: &str, gs: &[Formula], decls: &[VarDecl]) -> String {
    if gs.is_empty() {
        return if op == "and" { "true".into() } else { "false".into() };
    }
    let parts: Vec<String> = gs.iter().map(|g| formula(g, decls)).collect();
    format!("({op} {})", parts.join(" "))
}

fn var_name(v: crate::ir::VarId, decls: &[VarDecl]) -> String {
    decls
        .iter()
        .find(|d| d.id == v)
        .map(|d| symbol(&d.name))
        .unwrap_or_else(|| v.to_string())
}

pub fn polynomial(p: &Polynomial, decls: &[VarDecl]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for m in p.monomials() {
        let mut factors: Vec<String> = Vec::new();
        if m.coeff != rational::rat(1) || m.powers.is_unit() {
            factors.push(number(&m.coeff));
        }
        for (v, e) in m.powers.iter() {
            for _ in 0..e {
                factors.push(var_name(v, decls));
            }
        }
        parts.push(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            format!("(* {})", factors.join(" "))
        });
    }
    if !p.constant_term().is_zero() || parts.is_empty() {
        parts.push(number(p.constant_term()));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

/// Verdict token of a `check-sat` reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatReply {
    Sat,
    Unsat,
    Unknown(String),
}

pub fn parse_check_sat(reply: &str) -> SatReply {
    match reply.trim() {
        "sat" => SatReply::Sat,
        "unsat" => SatReply::Unsat,
        "unknown" => SatReply::Unknown("backend returned unknown".into()),
        other => SatReply::Unknown(format!("unrecognized check-sat reply: {other:?}")),
    }
}

/// Parses a `get-value` reply `((name value) …)` back into an assignment.
/// Fixed-sort values that fall off the grid and any structural surprise
/// are errors.
pub fn parse_get_value(reply: &str, decls: &[VarDecl]) -> Result<Assignment, String> {
    let forms = sexp::parse_all(reply).map_err(|e| e.to_string())?;
    let [form] = forms.as_slice() else {
        return Err(format!("expected one reply form, got {}", forms.len()));
    };
    let pairs = form.as_list().ok_or("reply is not a list")?;
    let mut out = Assignment::new();
    for pair in pairs {
        let items = pair.as_list().ok_or("value entry is not a pair")?;
        let [name, value] = items else {
            return Err(format!("value entry has {} items", items.len()));
        };
        let name = name.as_atom().ok_or("value name is not a symbol")?;
        let name = name.trim_matches('|');
        let Some(decl) = decls.iter().find(|d| symbol(&d.name).trim_matches('|') == name) else {
            // Auxiliary symbols (grid multipliers) are ignored.
            continue;
        };
        let parsed = match &decl.sort {
            Sort::Bool => Value::Bool(parse_bool(value)?),
            _ => Value::Rat(parse_number(value)?),
        };
        if let Value::Rat(r) = &parsed {
            if !decl.sort.admits(r) {
                return Err(format!(
                    "model value {} for {} is outside its domain",
                    rational::display(r),
                    decl.name
                ));
            }
        }
        out.bind(decl.id, parsed);
    }
    Ok(out)
}

fn parse_bool(s: &Sexp) -> Result<bool, String> {
    match s.as_atom() {
        Some("true") => Ok(true),
        Some("false") => Ok(false),
        _ => Err(format!("expected boolean, got {s}")),
    }
}

/// Numeric model values: integers, decimals, `(/ p q)`, `(- v)`, and
/// `(to_real v)` wrappers.
pub fn parse_number(s: &Sexp) -> Result<Rational, String> {
    match s {
        Sexp::Atom(a, _) => {
            rational::parse_rational(a).ok_or_else(|| format!("expected number, got {a:?}"))
        }
        Sexp::List(items, _) => match items.first().and_then(Sexp::as_atom) {
            Some("-") if items.len() == 2 => Ok(-parse_number(&items[1])?),
            Some("/") if items.len() == 3 => {
                let num = parse_number(&items[1])?;
                let den = parse_number(&items[2])?;
                if den.is_zero() {
                    Err("division by zero in model value".into())
                } else {
                    Ok(num / den)
                }
            }
            Some("to_real") if items.len() == 2 => parse_number(&items[1]),
            _ => Err(format!("expected number, got {s}")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::{rat, ratio};
    use crate::ir::{Interval, VarId};

    #[test]
    fn check_sat_protocol_mapping() {
        assert_eq!(parse_check_sat("unsat\n"), SatReply::Unsat);
        assert_eq!(parse_check_sat("sat"), SatReply::Sat);
        assert_eq!(
            parse_check_sat("unknown"),
            SatReply::Unknown("backend returned unknown".into())
        );
        assert!(matches!(parse_check_sat("segfault"), SatReply::Unknown(_)));
    }

    #[test]
    fn get_value_with_rational() {
        let y = VarDecl::new(VarId(0), "y", Sort::real(-30, 30));
        let a = parse_get_value("((y (/ 17 2)))", &[y.clone()]).unwrap();
        assert_eq!(a.rational(y.id), Some(&ratio(17, 2)));
    }

    #[test]
    fn get_value_negative_and_bool() {
        let x = VarDecl::new(VarId(0), "x", Sort::real(-30, 30));
        let p = VarDecl::new(VarId(1), "p", Sort::Bool);
        let a = parse_get_value("((x (- 3)) (p true))", &[x.clone(), p.clone()]).unwrap();
        assert_eq!(a.rational(x.id), Some(&rat(-3)));
        assert_eq!(a.boolean(p.id), Some(true));
    }

    #[test]
    fn malformed_model_is_an_error() {
        let x = VarDecl::new(VarId(0), "x", Sort::real(0, 1));
        assert!(parse_get_value("((x", &[x.clone()]).is_err());
        assert!(parse_get_value("((x y))", &[x.clone()]).is_err());
        assert!(parse_get_value("((x 7))", &[x]).is_err()); // outside the box
    }

    #[test]
    fn numbers_render_in_smtlib_shape() {
        assert_eq!(number(&ratio(17, 2)), "(/ 17 2)");
        assert_eq!(number(&rat(-3)), "(- 3)");
        assert_eq!(number(&ratio(-1, 2)), "(- (/ 1 2))");
        assert_eq!(number(&rat(4)), "4");
    }

    #[test]
    fn declarations_cover_all_sorts() {
        let fixed = VarDecl::new(
            VarId(0),
            "a",
            Sort::fixed(Interval::of(0, 10), ratio(1, 32)).unwrap(),
        );
        let lines = declare_lines(&fixed);
        assert!(lines[0].contains("() Real"));
        assert!(lines.iter().any(|l| l.contains("|a!grid|")));
        assert!(lines.iter().any(|l| l.contains("(<= |a!grid| 320)")));
    }

    #[test]
    fn logic_strings_match_sort_mix() {
        let real = VarDecl::new(VarId(0), "x", Sort::real(0, 1));
        let int = VarDecl::new(
            VarId(1),
            "n",
            Sort::bounded_int(Interval::of(0, 5)).unwrap(),
        );
        assert_eq!(logic_for(&[real.clone()], false), "QF_LRA");
        assert_eq!(logic_for(&[real.clone()], true), "QF_NRA");
        assert_eq!(logic_for(&[int.clone()], false), "QF_LIA");
        assert_eq!(logic_for(&[real, int], false), "QF_LIRA");
    }
}
