//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A polynomial is a map from power products to nonzero coefficients plus a
//! separate constant term. The map is ordered, so structural equality
//! coincides with mathematical equality and iteration order is canonical.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::assign::Assignment;
use super::rational::{self, Rational};
use super::var::VarId;
use super::IrError;

/// A power product `v1^e1 · v2^e2 · …`, sorted by variable id, exponents >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Powers(Vec<(VarId, u32)>);

impl Powers {
    pub fn unit() -> Self {
        Powers(Vec::new())
    }

    pub fn var(v: VarId) -> Self {
        Powers(vec![(v, 1)])
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, u32)>) -> Self {
        let mut map: BTreeMap<VarId, u32> = BTreeMap::new();
        for (v, e) in pairs {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Powers(map.into_iter().collect())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn exponent(&self, v: VarId) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| *w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    fn mul(&self, other: &Powers) -> Powers {
        Powers::from_pairs(self.iter().chain(other.iter()))
    }
}

/// One term of a polynomial: a nonzero coefficient and its power product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: Rational,
    pub powers: Powers,
}

/// Per-variable affine substitution `v ↦ scale · target + offset`.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub target: VarId,
    pub scale: Rational,
    pub offset: Rational,
}

/// Sparse multivariate polynomial in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Powers, Rational>,
    constant: Rational,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: VarId) -> Self {
        Polynomial::monomial(rational::rat(1), Powers::var(v))
    }

    pub fn monomial(coeff: Rational, powers: Powers) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(coeff, powers);
        p
    }

    fn add_term(&mut self, coeff: Rational, powers: Powers) {
        if coeff.is_zero() {
            return;
        }
        if powers.is_unit() {
            self.constant += coeff;
            return;
        }
        let entry = self.terms.entry(powers.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&powers);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    /// Non-constant terms in canonical order.
    pub fn monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.terms.iter().map(|(p, c)| Monomial {
            coeff: c.clone(),
            powers: p.clone(),
        })
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|p| p.vars()).collect()
    }

    pub fn degree_in(&self, v: VarId) -> u32 {
        self.terms.keys().map(|p| p.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|p| p.total_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.constant += &other.constant;
        for (p, c) in &other.terms {
            out.add_term(c.clone(), p.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        self.scale(&rational::rat(-1))
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> Polynomial {
        if k.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (p.clone(), c * k))
                .collect(),
            constant: &self.constant * k,
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        out.constant = &self.constant * &other.constant;
        for (p, c) in &self.terms {
            out.add_term(c * &other.constant, p.clone());
        }
        for (q, d) in &other.terms {
            out.add_term(&self.constant * d, q.clone());
            for (p, c) in &self.terms {
                out.add_term(c * d, p.mul(q));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(rational::rat(1));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Formal partial derivative with respect to `v`.
    pub fn derivative(&self, v: VarId) -> Polynomial {
        let mut out = Polynomial::zero();
        for (p, c) in &self.terms {
            let e = p.exponent(v);
            if e == 0 {
                continue;
            }
            let reduced = Powers::from_pairs(
                p.iter()
                    .map(|(w, k)| if w == v { (w, k - 1) } else { (w, k) }),
            );
            out.add_term(c * rational::rat(e as i64), reduced);
        }
        out
    }

    /// Substitutes rational constants for a subset of the variables.
    pub fn bind(&self, values: &BTreeMap<VarId, Rational>) -> Polynomial {
        let mut out = Polynomial::constant(self.constant.clone());
        for (p, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest: Vec<(VarId, u32)> = Vec::new();
            for (v, e) in p.iter() {
                match values.get(&v) {
                    Some(val) => {
                        for _ in 0..e {
                            coeff *= val;
                        }
                    }
                    None => rest.push((v, e)),
                }
            }
            out.add_term(coeff, Powers::from_pairs(rest));
        }
        out
    }

    /// Applies per-variable affine maps `v ↦ scale·target + offset`;
    /// unmapped variables are left untouched.
    pub fn affine_compose(&self, maps: &BTreeMap<VarId, AffineMap>) -> Polynomial {
        let mut out = Polynomial::constant(self.constant.clone());
        for (p, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            for (v, e) in p.iter() {
                let factor = match maps.get(&v) {
                    Some(m) => Polynomial::monomial(m.scale.clone(), Powers::var(m.target))
                        .add(&Polynomial::constant(m.offset.clone())),
                    None => Polynomial::var(v),
                };
                term = term.mul(&factor.pow(e));
            }
            out = out.add(&term);
        }
        out
    }

    /// Exact evaluation; every variable of the polynomial must be bound.
    pub fn eval(&self, a: &Assignment) -> Result<Rational, IrError> {
        let mut acc = self.constant.clone();
        for (p, c) in &self.terms {
            let mut term = c.clone();
            for (v, e) in p.iter() {
                let val = a
                    .rational(v)
                    .ok_or_else(|| IrError::UnboundVariable(v.to_string()))?;
                for _ in 0..e {
                    term *= val;
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Evaluation under a partial assignment: `None` when an unbound
    /// variable blocks the result.
    pub fn eval_partial(&self, a: &Assignment) -> Option<Rational> {
        if self.vars().iter().all(|v| a.rational(*v).is_some()) {
            self.eval(a).ok()
        } else {
            None
        }
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for m in self.monomials() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", rational::display(&m.coeff))?;
            for (v, e) in m.powers.iter() {
                if e == 1 {
                    write!(f, "·{v}")?;
                } else {
                    write!(f, "·{v}^{e}")?;
                }
            }
        }
        if !self.constant.is_zero() || first {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{}", rational::display(&self.constant))?;
        }
        Ok(())
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::constant(rational::rat(1))
    }
}

impl std::ops::Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        Polynomial::mul(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::{rat, ratio};

    fn v(n: u32) -> VarId {
        VarId(n)
    }

    /// x^2 - 4x + 4 as a polynomial in variable 0.
    fn square_example() -> Polynomial {
        let x = Polynomial::var(v(0));
        x.pow(2)
            .add(&x.scale(&rat(-4)))
            .add(&Polynomial::constant(rat(4)))
    }

    #[test]
    fn compose_shifts_square() {
        // x^2 - 4x + 4 with x = 2y + 1 gives 4y^2 - 4y + 1.
        let p = square_example();
        let mut maps = BTreeMap::new();
        maps.insert(
            v(0),
            AffineMap {
                target: v(1),
                scale: rat(2),
                offset: rat(1),
            },
        );
        let q = p.affine_compose(&maps);
        let y = Polynomial::var(v(1));
        let expected = y
            .pow(2)
            .scale(&rat(4))
            .add(&y.scale(&rat(-4)))
            .add(&Polynomial::constant(rat(1)));
        assert_eq!(q, expected);
    }

    #[test]
    fn compose_identity_is_noop() {
        let p = square_example();
        let mut maps = BTreeMap::new();
        maps.insert(
            v(0),
            AffineMap {
                target: v(0),
                scale: rat(1),
                offset: rat(0),
            },
        );
        assert_eq!(p.affine_compose(&maps), p);
    }

    #[test]
    fn difference_of_squares() {
        let x = Polynomial::var(v(0));
        let lhs = x.add(&Polynomial::constant(rat(1)));
        let rhs = x.add(&Polynomial::constant(rat(-1)));
        let expected = x.pow(2).add(&Polynomial::constant(rat(-1)));
        assert_eq!(lhs.mul(&rhs), expected);
    }

    #[test]
    fn derivative_and_bind() {
        let p = square_example();
        let d = p.derivative(v(0));
        let expected = Polynomial::var(v(0))
            .scale(&rat(2))
            .add(&Polynomial::constant(rat(-4)));
        assert_eq!(d, expected);

        let mut vals = BTreeMap::new();
        vals.insert(v(0), ratio(1, 2));
        let bound = p.bind(&vals);
        assert!(bound.is_constant());
        assert_eq!(*bound.constant_term(), ratio(9, 4));
    }

    #[test]
    fn canonical_equality() {
        let x = Polynomial::var(v(0));
        let y = Polynomial::var(v(1));
        let a = x.mul(&y).add(&y.mul(&x));
        let b = x.mul(&y).scale(&rat(2));
        assert_eq!(a, b);
        let cancel = x.sub(&x);
        assert!(cancel.is_zero());
    }
}
