//! Bernstein coefficient tensors over normalized boxes.
//!
//! The conversion from the power basis uses the standard per-variable
//! coefficient identity
//!
//! ```text
//!   b_I = Σ_{J ≤ I} [ C(I,J) / C(D,J) ] · a_J
//! ```
//!
//! applied one axis at a time, where `a_J` are the power-basis coefficients
//! of the polynomial scaled to the unit box and `D` is the per-axis degree
//! vector. Two properties carry all the reasoning downstream: the
//! coefficients enclose the polynomial's range over the box, and the
//! coefficients at extreme multi-indices equal the polynomial's exact
//! values at the corresponding box corners.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::BernsteinError;
use crate::ir::AffineMap;
use crate::ir::rational::{rat, ratio, Rational};
use crate::ir::{Assignment, Interval, Polynomial, Value, VarId};

/// Binomial coefficients are precomputed as exact rationals up to degree 16
/// (ample for the workloads here); larger arguments fall back to the
/// multiplicative formula.
fn binomial(n: u32, k: u32) -> Rational {
    static TABLE: OnceLock<Vec<Vec<Rational>>> = OnceLock::new();
    const PRECOMPUTED: u32 = 16;
    if k > n {
        return rat(0);
    }
    if n <= PRECOMPUTED {
        let table = TABLE.get_or_init(|| {
            let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(PRECOMPUTED as usize + 1);
            for i in 0..=(PRECOMPUTED as usize) {
                let mut row = vec![rat(1); i + 1];
                for j in 1..i {
                    row[j] = &rows[i - 1][j - 1] + &rows[i - 1][j];
                }
                rows.push(row);
            }
            rows
        });
        return table[n as usize][k as usize].clone();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rational::new(num, den)
}

/// Scales and translates `p` so that each boxed variable ranges over
/// `[0,1]` while the range of the polynomial is unchanged: the result `q`
/// satisfies `q(t) = p(lo + t·(hi−lo))` per coordinate. Variables with a
/// point interval are substituted as constants first.
pub fn normalize_box(p: &Polynomial, bounds: &[(VarId, Interval)]) -> Polynomial {
    let mut degenerate: BTreeMap<VarId, Rational> = BTreeMap::new();
    let mut maps: BTreeMap<VarId, AffineMap> = BTreeMap::new();
    for (v, iv) in bounds {
        if iv.is_point() {
            degenerate.insert(*v, iv.lo().clone());
        } else {
            maps.insert(
                *v,
                AffineMap {
                    target: *v,
                    scale: iv.width(),
                    offset: iv.lo().clone(),
                },
            );
        }
    }
    p.bind(&degenerate).affine_compose(&maps)
}

/// Dense multi-index Bernstein coefficient array for one polynomial over
/// one sub-box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernsteinTensor {
    /// Axis variables, ascending by id.
    vars: Vec<VarId>,
    /// Per-axis degree `D_i`.
    degrees: Vec<u32>,
    /// Per-axis length `D_i + 1` (row-major strides derive from this).
    dims: Vec<usize>,
    coeffs: Vec<Rational>,
    /// The original-coordinates sub-box the tensor represents.
    bounds: Vec<Interval>,
}

impl BernsteinTensor {
    /// Converts `p` (over the given box) to Bernstein form with per-axis
    /// degrees `degrees` (ascending variable order). Every variable of `p`
    /// must be boxed and every requested degree must cover the actual
    /// degree.
    pub fn build(
        p: &Polynomial,
        bounds: &[(VarId, Interval)],
        degrees: Option<&[u32]>,
    ) -> Result<BernsteinTensor, BernsteinError> {
        for v in p.vars() {
            if !bounds.iter().any(|(w, _)| *w == v) {
                return Err(BernsteinError::UnboxedVariable(v.to_string()));
            }
        }
        let unit = normalize_box(p, bounds);

        let mut bounds: Vec<(VarId, Interval)> = bounds.to_vec();
        bounds.sort_by_key(|(v, _)| *v);
        let vars: Vec<VarId> = bounds.iter().map(|(v, _)| *v).collect();
        let ivs: Vec<Interval> = bounds.iter().map(|(_, iv)| iv.clone()).collect();
        let actual: Vec<u32> = vars.iter().map(|v| unit.degree_in(*v)).collect();
        let degrees: Vec<u32> = match degrees {
            None => actual.clone(),
            Some(req) => {
                for (i, v) in vars.iter().enumerate() {
                    if req[i] < actual[i] {
                        return Err(BernsteinError::DegreeTooSmall {
                            var: v.to_string(),
                            needed: actual[i],
                            given: req[i],
                        });
                    }
                }
                req.to_vec()
            }
        };
        let dims: Vec<usize> = degrees.iter().map(|d| *d as usize + 1).collect();
        let size = dims.iter().product();

        // Power-basis coefficient array a_J.
        let mut coeffs = vec![Rational::zero(); size];
        let strides = strides_of(&dims);
        coeffs[0] = unit.constant_term().clone();
        for m in unit.monomials() {
            let mut idx = 0usize;
            for (v, e) in m.powers.iter() {
                let axis = vars.binary_search(&v).expect("boxed variable");
                idx += strides[axis] * e as usize;
            }
            coeffs[idx] += m.coeff;
        }

        // Per-axis lower-triangular transform to the Bernstein basis.
        for axis in 0..vars.len() {
            let d = degrees[axis];
            if d == 0 {
                continue;
            }
            let n = dims[axis];
            for line in lines(&dims, axis) {
                let mut power: Vec<Rational> = Vec::with_capacity(n);
                for i in 0..n {
                    power.push(coeffs[line[i]].clone());
                }
                for (i, slot) in line.iter().enumerate() {
                    let mut b = Rational::zero();
                    for (j, a) in power.iter().take(i + 1).enumerate() {
                        b += binomial(i as u32, j as u32) / binomial(d, j as u32) * a;
                    }
                    coeffs[*slot] = b;
                }
            }
        }

        Ok(BernsteinTensor {
            vars,
            degrees,
            dims,
            coeffs,
            bounds: ivs,
        })
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn min_coeff(&self) -> &Rational {
        self.coeffs.iter().min().expect("nonempty tensor")
    }

    pub fn max_coeff(&self) -> &Rational {
        self.coeffs.iter().max().expect("nonempty tensor")
    }

    /// Coefficient at a box corner (`true` selects the upper endpoint per
    /// axis); equal to the exact polynomial value there.
    pub fn corner_value(&self, upper: &[bool]) -> &Rational {
        let strides = strides_of(&self.dims);
        let mut idx = 0usize;
        for (axis, up) in upper.iter().enumerate() {
            if *up {
                idx += strides[axis] * self.degrees[axis] as usize;
            }
        }
        &self.coeffs[idx]
    }

    /// The original-coordinates corner point for a selector.
    pub fn corner_point(&self, upper: &[bool]) -> Assignment {
        let mut a = Assignment::new();
        for (axis, up) in upper.iter().enumerate() {
            let iv = &self.bounds[axis];
            let val = if *up { iv.hi().clone() } else { iv.lo().clone() };
            a.bind(self.vars[axis], Value::Rat(val));
        }
        a
    }

    /// De Casteljau split at the midpoint of one axis. The children
    /// represent the polynomial restricted to each half, re-normalized to
    /// unit boxes; the union of the children's boxes is the parent box.
    pub fn subdivide(&self, axis: usize) -> (BernsteinTensor, BernsteinTensor) {
        let half = ratio(1, 2);
        let mut left = self.clone();
        let mut right = self.clone();
        let d = self.degrees[axis] as usize;
        for line in lines(&self.dims, axis) {
            let mut scratch: Vec<Rational> =
                line.iter().map(|&i| self.coeffs[i].clone()).collect();
            left.coeffs[line[0]] = scratch[0].clone();
            right.coeffs[line[d]] = scratch[d].clone();
            for r in 1..=d {
                for i in 0..=(d - r) {
                    scratch[i] = (&scratch[i] + &scratch[i + 1]) * &half;
                }
                left.coeffs[line[r]] = scratch[0].clone();
                right.coeffs[line[d - r]] = scratch[d - r].clone();
            }
        }
        let (lo_half, hi_half) = self.bounds[axis].bisect();
        left.bounds[axis] = lo_half;
        right.bounds[axis] = hi_half;
        (left, right)
    }

    /// The axis with the widest interval, ties broken by lowest variable id
    /// (axes are already in ascending id order).
    pub fn widest_axis(&self) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (axis, iv) in self.bounds.iter().enumerate() {
            let w = iv.width();
            if w.is_zero() {
                continue;
            }
            match &best {
                Some((_, bw)) if *bw >= w => {}
                _ => best = Some((axis, w)),
            }
        }
        best.map(|(a, _)| a)
    }
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

/// Index lines along one axis: for each combination of the other indices,
/// the flat indices of the `dims[axis]` entries along `axis`, in order.
fn lines(dims: &[usize], axis: usize) -> Vec<Vec<usize>> {
    let strides = strides_of(dims);
    let other_size: usize = dims
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != axis)
        .map(|(_, d)| d)
        .product();
    let mut out = Vec::with_capacity(other_size);
    let mut fixed = vec![0usize; dims.len()];
    loop {
        let base: usize = fixed
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != axis)
            .map(|(i, &k)| strides[i] * k)
            .sum();
        out.push((0..dims[axis]).map(|k| base + strides[axis] * k).collect());
        // Advance the odometer over the non-axis dimensions.
        let mut carry = true;
        for i in (0..dims.len()).rev() {
            if i == axis || !carry {
                continue;
            }
            fixed[i] += 1;
            if fixed[i] < dims[i] {
                carry = false;
            } else {
                fixed[i] = 0;
            }
        }
        if carry {
            return out;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VarId {
        VarId(n)
    }

    /// 4y² − 4y + 1 over the unit interval.
    fn shifted_square() -> Polynomial {
        let y = Polynomial::var(v(0));
        y.pow(2)
            .scale(&rat(4))
            .add(&y.scale(&rat(-4)))
            .add(&Polynomial::constant(rat(1)))
    }

    #[test]
    fn normalize_square_example() {
        // x² − 4x + 4 on [1,3] normalizes to 4y² − 4y + 1.
        let x = Polynomial::var(v(0));
        let p = x
            .pow(2)
            .add(&x.scale(&rat(-4)))
            .add(&Polynomial::constant(rat(4)));
        let q = normalize_box(&p, &[(v(0), Interval::of(1, 3))]);
        assert_eq!(q, shifted_square());
    }

    #[test]
    fn normalize_unit_box_is_identity() {
        let p = shifted_square();
        let q = normalize_box(&p, &[(v(0), Interval::of(0, 1))]);
        assert_eq!(q, p);
    }

    #[test]
    fn coefficients_of_shifted_square() {
        // The exact conversion gives (1, -1, 1).
        let t = BernsteinTensor::build(
            &shifted_square(),
            &[(v(0), Interval::of(0, 1))],
            None,
        )
        .unwrap();
        assert_eq!(t.coeffs(), &[rat(1), rat(-1), rat(1)]);
    }

    #[test]
    fn constant_polynomial_has_constant_coefficients() {
        let p = Polynomial::constant(ratio(7, 3));
        let t = BernsteinTensor::build(
            &p,
            &[(v(0), Interval::of(-1, 1))],
            Some(&[2]),
        )
        .unwrap();
        assert!(t.coeffs().iter().all(|c| *c == ratio(7, 3)));
    }

    #[test]
    fn linear_interpolates_endpoints() {
        // t with D = 1 has coefficients (0, 1).
        let p = Polynomial::var(v(0));
        let t = BernsteinTensor::build(&p, &[(v(0), Interval::of(0, 1))], None).unwrap();
        assert_eq!(t.coeffs(), &[rat(0), rat(1)]);
    }

    #[test]
    fn degree_too_small_is_an_error() {
        let p = shifted_square();
        let err = BernsteinTensor::build(&p, &[(v(0), Interval::of(0, 1))], Some(&[1]));
        assert!(matches!(err, Err(BernsteinError::DegreeTooSmall { .. })));
    }

    #[test]
    fn corners_are_sharp() {
        // Coefficients at extreme multi-indices equal corner evaluations.
        let x = Polynomial::var(v(0));
        let y = Polynomial::var(v(1));
        let p = x.pow(2).mul(&y).add(&x.mul(&y)).sub(&y.pow(3).scale(&rat(2)));
        let bounds = [(v(0), Interval::of(-1, 2)), (v(1), Interval::of(0, 3))];
        let t = BernsteinTensor::build(&p, &bounds, None).unwrap();
        for corner in [[false, false], [false, true], [true, false], [true, true]] {
            let point = t.corner_point(&corner);
            let exact = p.eval(&point).unwrap();
            assert_eq!(*t.corner_value(&corner), exact);
        }
    }

    #[test]
    fn subdivision_corner_hits_midpoint() {
        let p = shifted_square();
        let t = BernsteinTensor::build(&p, &[(v(0), Interval::of(0, 1))], None).unwrap();
        let (left, right) = t.subdivide(0);
        // The shared corner value is p(1/2).
        let mid = Assignment::new().with(v(0), Value::Rat(ratio(1, 2)));
        let exact = p.eval(&mid).unwrap();
        assert_eq!(*left.corner_value(&[true]), exact);
        assert_eq!(*right.corner_value(&[false]), exact);
        // Children cover the parent box.
        assert_eq!(*left.bounds()[0].lo(), rat(0));
        assert_eq!(*left.bounds()[0].hi(), ratio(1, 2));
        assert_eq!(*right.bounds()[0].hi(), rat(1));
    }

    #[test]
    fn subdividing_constant_yields_identical_children() {
        let p = Polynomial::constant(rat(5));
        let t = BernsteinTensor::build(&p, &[(v(0), Interval::of(0, 4))], Some(&[3])).unwrap();
        let (l, r) = t.subdivide(0);
        assert_eq!(l.coeffs(), t.coeffs());
        assert_eq!(r.coeffs(), t.coeffs());
    }
}
