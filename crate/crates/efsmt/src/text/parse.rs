//! Parser for the problem file format.
//!
//! A problem file is a sequence of declarations and constraint forms:
//!
//! ```text
//! (declare-exists x real -30 30)
//! (declare-forall y real -30 30)
//! (declare-exists a fixed 0 10 1/32)
//! (declare-exists p bool)
//! (declare-forall n int 0 5)
//! (assume (< 0 y))
//! (guarantee (< (- y (* 2 x)) 7))
//! (constrain (> x 0))
//! ```
//!
//! The matrix is `(⋀ assume → ⋀ guarantee) ∧ ⋀ constrain`. A file may
//! instead contain a single `(preset name (key value) …)` form naming a
//! built-in encoder preset.

use std::collections::BTreeMap;

use thiserror::Error;

use super::sexp::{self, Pos, Sexp};
use crate::ir::rational::{self, Rational};
use crate::ir::{
    CmpOp, EFProblem, Formula, Interval, IrError, Polynomial, ProblemBuilder, Sort, VarId,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{0}")]
    Syntax(#[from] sexp::SexpError),

    #[error("{pos}: {message}")]
    Semantic { pos: Pos, message: String },

    #[error("empty problem file: no declarations")]
    Empty,

    #[error("invalid problem: {0}")]
    Invalid(#[from] IrError),
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Semantic {
        pos,
        message: message.into(),
    })
}

/// A `(preset name (key value) …)` form, unresolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresetInvocation {
    pub name: String,
    pub options: BTreeMap<String, String>,
}

/// Outcome of parsing a problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum ParsedProblem {
    Problem(EFProblem),
    Preset(PresetInvocation),
}

pub fn parse_problem(input: &str) -> Result<ParsedProblem, ParseError> {
    let forms = sexp::parse_all(input)?;
    if forms.is_empty() {
        return Err(ParseError::Empty);
    }

    if let Some(head) = forms[0].as_list().and_then(|l| l.first()) {
        if head.as_atom() == Some("preset") {
            if forms.len() > 1 {
                return err(forms[1].pos(), "a preset form must be the only form");
            }
            return parse_preset(&forms[0]).map(ParsedProblem::Preset);
        }
    }

    let mut builder = ProblemBuilder::new();
    let mut names: BTreeMap<String, VarId> = BTreeMap::new();
    let mut assumes: Vec<(usize, Pos)> = Vec::new();
    let mut guars: Vec<(usize, Pos)> = Vec::new();
    let mut conds: Vec<(usize, Pos)> = Vec::new();
    let mut bodies: Vec<&Sexp> = Vec::new();

    for form in &forms {
        let pos = form.pos();
        let Some(items) = form.as_list() else {
            return err(pos, "expected a parenthesized form");
        };
        let Some(head) = items.first().and_then(Sexp::as_atom) else {
            return err(pos, "expected a form starting with a keyword");
        };
        match head {
            "declare-exists" | "declare-forall" => {
                let (name, sort) = parse_declaration(items, pos)?;
                if names.contains_key(&name) {
                    return err(pos, format!("variable {name} is declared twice"));
                }
                let id = if head == "declare-exists" {
                    builder.exists(&name, sort)
                } else {
                    builder.forall(&name, sort)
                };
                names.insert(name, id);
            }
            "assume" | "guarantee" | "constrain" => {
                if items.len() != 2 {
                    return err(pos, format!("{head} takes exactly one formula"));
                }
                let idx = bodies.len();
                bodies.push(&items[1]);
                match head {
                    "assume" => assumes.push((idx, pos)),
                    "guarantee" => guars.push((idx, pos)),
                    _ => conds.push((idx, pos)),
                }
            }
            "preset" => return err(pos, "a preset form must be the only form"),
            other => return err(pos, format!("unknown form {other:?}")),
        }
    }

    if names.is_empty() {
        return Err(ParseError::Empty);
    }

    let parse_body = |idx: usize| parse_formula(bodies[idx], &names);
    let assume_f = assumes
        .iter()
        .map(|(i, _)| parse_body(*i))
        .collect::<Result<Vec<_>, _>>()?;
    let guar_f = guars
        .iter()
        .map(|(i, _)| parse_body(*i))
        .collect::<Result<Vec<_>, _>>()?;
    let cond_f = conds
        .iter()
        .map(|(i, _)| parse_body(*i))
        .collect::<Result<Vec<_>, _>>()?;

    let mut parts: Vec<Formula> = Vec::new();
    if !guar_f.is_empty() {
        let body = Formula::and(guar_f);
        if assume_f.is_empty() {
            parts.push(body);
        } else {
            parts.push(Formula::implies(Formula::and(assume_f), body));
        }
    } else if !assume_f.is_empty() {
        // Assumptions without guarantees constrain nothing.
        parts.push(Formula::implies(Formula::and(assume_f), Formula::True));
    }
    parts.extend(cond_f);
    let matrix = Formula::and(parts);

    Ok(ParsedProblem::Problem(builder.finish(matrix)?))
}

fn parse_declaration(items: &[Sexp], pos: Pos) -> Result<(String, Sort), ParseError> {
    if items.len() < 3 {
        return err(pos, "declaration needs a name and a sort");
    }
    let Some(name) = items[1].as_atom() else {
        return err(items[1].pos(), "variable name must be a symbol");
    };
    let Some(sort_name) = items[2].as_atom() else {
        return err(items[2].pos(), "sort must be one of bool, int, real, fixed");
    };
    let arity_error = |want: &str| {
        err::<(String, Sort)>(
            pos,
            format!("{sort_name} declaration takes {want} after the sort"),
        )
    };
    let number = |s: &Sexp| -> Result<Rational, ParseError> {
        match s.as_atom().and_then(rational::parse_rational) {
            Some(r) => Ok(r),
            None => err(s.pos(), "expected a numeric literal"),
        }
    };
    let interval = |lo: &Sexp, hi: &Sexp| -> Result<Interval, ParseError> {
        Interval::new(number(lo)?, number(hi)?)
            .map_err(|e| ParseError::Semantic {
                pos,
                message: e.to_string(),
            })
    };
    let sort = match sort_name {
        "bool" => {
            if items.len() != 3 {
                return arity_error("nothing");
            }
            Sort::Bool
        }
        "int" => {
            if items.len() != 5 {
                return arity_error("lo hi");
            }
            Sort::bounded_int(interval(&items[3], &items[4])?).map_err(|e| {
                ParseError::Semantic {
                    pos,
                    message: e.to_string(),
                }
            })?
        }
        "real" => {
            if items.len() != 5 {
                return arity_error("lo hi");
            }
            Sort::Real(interval(&items[3], &items[4])?)
        }
        "fixed" => {
            if items.len() != 6 {
                return arity_error("lo hi step");
            }
            Sort::fixed(interval(&items[3], &items[4])?, number(&items[5])?).map_err(|e| {
                ParseError::Semantic {
                    pos,
                    message: e.to_string(),
                }
            })?
        }
        other => return err(items[2].pos(), format!("unknown sort {other:?}")),
    };
    Ok((name.to_string(), sort))
}

fn parse_preset(form: &Sexp) -> Result<PresetInvocation, ParseError> {
    let items = form.as_list().expect("checked by caller");
    if items.len() < 2 {
        return err(form.pos(), "preset needs a name");
    }
    let Some(name) = items[1].as_atom() else {
        return err(items[1].pos(), "preset name must be a symbol");
    };
    let mut options = BTreeMap::new();
    for opt in &items[2..] {
        let Some([key, value]) = opt.as_list().map(|l| {
            let mut it = l.iter();
            [it.next(), it.next()]
        }) else {
            return err(opt.pos(), "preset option must be (key value)");
        };
        let (Some(key), Some(value)) = (key, value) else {
            return err(opt.pos(), "preset option must be (key value)");
        };
        let (Some(k), Some(v)) = (key.as_atom(), value.as_atom()) else {
            return err(opt.pos(), "preset option key and value must be atoms");
        };
        if opt.as_list().map(|l| l.len()) != Some(2) {
            return err(opt.pos(), "preset option must be (key value)");
        }
        options.insert(k.to_string(), v.to_string());
    }
    Ok(PresetInvocation {
        name: name.to_string(),
        options,
    })
}

pub(super) fn parse_formula(
    s: &Sexp,
    names: &BTreeMap<String, VarId>,
) -> Result<Formula, ParseError> {
    match s {
        Sexp::Atom(a, pos) => match a.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            name => match names.get(name) {
                Some(v) => Ok(Formula::bool_var(*v)),
                None => err(*pos, format!("unknown variable {name:?}")),
            },
        },
        Sexp::List(items, pos) => {
            let Some(head) = items.first().and_then(Sexp::as_atom) else {
                return err(*pos, "formula must start with an operator");
            };
            let rest = &items[1..];
            match head {
                "not" => {
                    if rest.len() != 1 {
                        return err(*pos, "not takes one argument");
                    }
                    Ok(Formula::not(parse_formula(&rest[0], names)?))
                }
                "and" | "or" => {
                    if rest.is_empty() {
                        return err(*pos, format!("{head} needs at least one argument"));
                    }
                    let parts = rest
                        .iter()
                        .map(|g| parse_formula(g, names))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" {
                        Formula::and(parts)
                    } else {
                        Formula::or(parts)
                    })
                }
                "=>" | "iff" => {
                    if rest.len() != 2 {
                        return err(*pos, format!("{head} takes two arguments"));
                    }
                    let l = parse_formula(&rest[0], names)?;
                    let r = parse_formula(&rest[1], names)?;
                    Ok(if head == "=>" {
                        Formula::implies(l, r)
                    } else {
                        Formula::iff(l, r)
                    })
                }
                "<" | "<=" | ">" | ">=" | "=" | "!=" => {
                    if rest.len() != 2 {
                        return err(*pos, format!("{head} takes two arguments"));
                    }
                    let lhs = parse_term(&rest[0], names)?;
                    let rhs = parse_term(&rest[1], names)?;
                    let op = match head {
                        "<" => CmpOp::Lt,
                        "<=" => CmpOp::Le,
                        ">" => CmpOp::Gt,
                        ">=" => CmpOp::Ge,
                        "=" => CmpOp::Eq,
                        _ => CmpOp::Ne,
                    };
                    Ok(Formula::poly_cmp(&lhs, op, &rhs))
                }
                other => err(*pos, format!("unknown operator {other:?}")),
            }
        }
    }
}

fn parse_term(s: &Sexp, names: &BTreeMap<String, VarId>) -> Result<Polynomial, ParseError> {
    match s {
        Sexp::Atom(a, pos) => {
            if let Some(r) = rational::parse_rational(a) {
                return Ok(Polynomial::constant(r));
            }
            match names.get(a.as_str()) {
                Some(v) => Ok(Polynomial::var(*v)),
                None => err(*pos, format!("unknown variable {a:?}")),
            }
        }
        Sexp::List(items, pos) => {
            let Some(head) = items.first().and_then(Sexp::as_atom) else {
                return err(*pos, "term must start with an operator");
            };
            let rest = &items[1..];
            let parts = |rest: &[Sexp]| {
                rest.iter()
                    .map(|t| parse_term(t, names))
                    .collect::<Result<Vec<_>, ParseError>>()
            };
            match head {
                "+" => {
                    if rest.is_empty() {
                        return err(*pos, "+ needs at least one argument");
                    }
                    Ok(parts(rest)?
                        .into_iter()
                        .fold(Polynomial::zero(), |acc, p| acc.add(&p)))
                }
                "-" => match rest.len() {
                    0 => err(*pos, "- needs at least one argument"),
                    1 => Ok(parse_term(&rest[0], names)?.neg()),
                    _ => {
                        let mut terms = parts(rest)?.into_iter();
                        let first = terms.next().unwrap();
                        Ok(terms.fold(first, |acc, p| acc.sub(&p)))
                    }
                },
                "*" => {
                    if rest.is_empty() {
                        return err(*pos, "* needs at least one argument");
                    }
                    Ok(parts(rest)?
                        .into_iter()
                        .fold(Polynomial::constant(rational::rat(1)), |acc, p| acc.mul(&p)))
                }
                "^" => {
                    if rest.len() != 2 {
                        return err(*pos, "^ takes a term and an exponent");
                    }
                    let base = parse_term(&rest[0], names)?;
                    let exp = rest[1]
                        .as_atom()
                        .and_then(|a| a.parse::<u32>().ok())
                        .ok_or(ParseError::Semantic {
                            pos: rest[1].pos(),
                            message: "exponent must be a natural number".into(),
                        })?;
                    Ok(base.pow(exp))
                }
                other => err(*pos, format!("unknown term operator {other:?}")),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::rat;

    #[test]
    fn parses_the_six_line_running_example() {
        let doc = "\
(declare-exists x real -30 30)
(declare-forall y real -30 30)
(assume (> y 0))
(assume (< y 10))
(guarantee (< (- y (* 2 x)) 7))
";
        let ParsedProblem::Problem(p) = parse_problem(doc).unwrap() else {
            panic!("expected a problem");
        };
        assert_eq!(p.exists_vars.len(), 1);
        assert_eq!(p.forall_vars.len(), 1);
        assert!(matches!(p.matrix, Formula::Implies(..)));
        assert!(p.linearizable());
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        assert_eq!(parse_problem(""), Err(ParseError::Empty));
        assert_eq!(parse_problem("; only a comment\n"), Err(ParseError::Empty));
    }

    #[test]
    fn preset_form_parses() {
        let ParsedProblem::Preset(p) =
            parse_problem("(preset priority-demo (restricted true))").unwrap()
        else {
            panic!("expected a preset");
        };
        assert_eq!(p.name, "priority-demo");
        assert_eq!(p.options.get("restricted").map(String::as_str), Some("true"));
    }

    #[test]
    fn errors_carry_positions() {
        let doc = "(declare-exists x real -30 30)\n(assume (> z 0))\n(guarantee true)";
        match parse_problem(doc) {
            Err(ParseError::Semantic { pos, message }) => {
                assert_eq!(pos.line, 2);
                assert!(message.contains("unknown variable"));
            }
            other => panic!("expected a positioned error, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_or_bad_sorts_are_rejected() {
        assert!(parse_problem("(declare-exists x real 30 -30)(constrain true)").is_err());
        assert!(parse_problem("(declare-exists x float 0 1)(constrain true)").is_err());
        assert!(parse_problem("(declare-exists x fixed 0 1 0)(constrain true)").is_err());
    }

    #[test]
    fn exact_decimals_in_terms() {
        let doc = "(declare-exists x real 0 1)(constrain (> x 0.125))";
        let ParsedProblem::Problem(p) = parse_problem(doc).unwrap() else {
            panic!()
        };
        let mut rhs = None;
        p.matrix.visit_atoms(&mut |a| {
            if let crate::ir::Atom::Cmp(c) = a {
                rhs = Some(c.rhs.clone());
            }
        });
        assert_eq!(rhs, Some(rat(1) / rat(8)));
    }
}
