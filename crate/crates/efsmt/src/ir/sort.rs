use num_traits::Signed;

use super::interval::Interval;
use super::rational::{self, Rational};
use super::IrError;

/// Variable sort: boolean, or a numeric sort with a bounded box domain.
///
/// `Fixed` is the finite grid `{lo, lo+step, ...} ∩ [lo, hi]`; the step plays
/// the role of the smallest representable unit of a fixed-point encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sort {
    Bool,
    BoundedInt(Interval),
    Real(Interval),
    Fixed(Interval, Rational),
}

impl Sort {
    pub fn bounded_int(interval: Interval) -> Result<Self, IrError> {
        if !rational::is_integer(interval.lo()) || !rational::is_integer(interval.hi()) {
            return Err(IrError::NonIntegerEndpoints {
                lo: rational::display(interval.lo()),
                hi: rational::display(interval.hi()),
            });
        }
        Ok(Sort::BoundedInt(interval))
    }

    pub fn fixed(interval: Interval, step: Rational) -> Result<Self, IrError> {
        if !step.is_positive() {
            return Err(IrError::NonPositiveStep(rational::display(&step)));
        }
        Ok(Sort::Fixed(interval, step))
    }

    pub fn real(lo: i64, hi: i64) -> Self {
        Sort::Real(Interval::of(lo, hi))
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Sort::Bool)
    }

    pub fn is_numeric(&self) -> bool {
        !self.is_bool()
    }

    /// The box domain of a numeric sort.
    pub fn interval(&self) -> Option<&Interval> {
        match self {
            Sort::Bool => None,
            Sort::BoundedInt(i) | Sort::Real(i) | Sort::Fixed(i, _) => Some(i),
        }
    }

    /// True for sorts whose domain is a finite set of points.
    pub fn is_finite(&self) -> bool {
        !matches!(self, Sort::Real(_))
    }

    /// Grid step of a finite numeric sort (`1` for bounded integers).
    pub fn grid_step(&self) -> Option<Rational> {
        match self {
            Sort::BoundedInt(_) => Some(rational::rat(1)),
            Sort::Fixed(_, step) => Some(step.clone()),
            _ => None,
        }
    }

    /// Number of points of a finite numeric grid.
    pub fn grid_len(&self) -> Option<usize> {
        let step = self.grid_step()?;
        let iv = self.interval()?;
        let count = (iv.width() / step).floor().to_integer();
        Some(usize::try_from(count).expect("grid fits in usize") + 1)
    }

    /// Iterates the points of a finite numeric grid in ascending order.
    pub fn grid_points(&self) -> Option<impl Iterator<Item = Rational> + '_> {
        let step = self.grid_step()?;
        let iv = self.interval()?;
        let len = self.grid_len()?;
        let lo = iv.lo().clone();
        Some((0..len).map(move |k| &lo + &step * rational::rat(k as i64)))
    }

    /// Checks that a rational value lies in the sort's domain (and on the
    /// grid, for finite sorts).
    pub fn admits(&self, v: &Rational) -> bool {
        match self {
            Sort::Bool => false,
            Sort::Real(iv) => iv.contains(v),
            Sort::BoundedInt(iv) => iv.contains(v) && rational::is_integer(v),
            Sort::Fixed(iv, step) => {
                iv.contains(v) && rational::is_integer(&((v - iv.lo()) / step))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::rational::{rat, ratio};

    #[test]
    fn fixed_grid_point_count() {
        // [0,10] with step 1/32 is a 321-point grid.
        let s = Sort::fixed(Interval::of(0, 10), ratio(1, 32)).unwrap();
        assert_eq!(s.grid_len(), Some(321));
        let pts: Vec<_> = s.grid_points().unwrap().collect();
        assert_eq!(pts.len(), 321);
        assert_eq!(pts[0], rat(0));
        assert_eq!(pts[1], ratio(1, 32));
        assert_eq!(pts[320], rat(10));
    }

    #[test]
    fn step_larger_than_width_keeps_endpoints_only() {
        let s = Sort::fixed(Interval::of(0, 3), rat(5)).unwrap();
        let pts: Vec<_> = s.grid_points().unwrap().collect();
        assert_eq!(pts, vec![rat(0)]);
        // When the width is a multiple of the step, hi is on the grid.
        let s = Sort::fixed(Interval::of(0, 5), rat(5)).unwrap();
        let pts: Vec<_> = s.grid_points().unwrap().collect();
        assert_eq!(pts, vec![rat(0), rat(5)]);
    }

    #[test]
    fn admits_respects_grid() {
        let s = Sort::fixed(Interval::of(0, 1), ratio(1, 4)).unwrap();
        assert!(s.admits(&ratio(3, 4)));
        assert!(!s.admits(&ratio(1, 3)));
        assert!(!s.admits(&rat(2)));
        let b = Sort::bounded_int(Interval::of(-2, 2)).unwrap();
        assert!(b.admits(&rat(-2)));
        assert!(!b.admits(&ratio(1, 2)));
    }

    #[test]
    fn rejects_bad_constructions() {
        assert!(Sort::fixed(Interval::of(0, 1), rat(0)).is_err());
        assert!(Sort::bounded_int(
            Interval::new(ratio(1, 2), rat(3)).unwrap()
        )
        .is_err());
    }
}
