use super::rational::{self, Rational};
use super::IrError;

/// Closed rational interval `[lo, hi]` with `lo <= hi`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, IrError> {
        if lo > hi {
            return Err(IrError::EmptyInterval {
                lo: rational::display(&lo),
                hi: rational::display(&hi),
            });
        }
        Ok(Interval { lo, hi })
    }

    /// Interval from integer endpoints; panics if `lo > hi`.
    pub fn of(lo: i64, hi: i64) -> Self {
        Interval::new(rational::rat(lo), rational::rat(hi)).expect("lo <= hi")
    }

    pub fn point(v: Rational) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / rational::rat(2)
    }

    /// Splits at the midpoint into lower and upper halves.
    pub fn bisect(&self) -> (Interval, Interval) {
        let mid = self.midpoint();
        (
            Interval {
                lo: self.lo.clone(),
                hi: mid.clone(),
            },
            Interval {
                lo: mid,
                hi: self.hi.clone(),
            },
        )
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}, {}]",
            rational::display(&self.lo),
            rational::display(&self.hi)
        )
    }
}
