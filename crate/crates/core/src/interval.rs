use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A bounded interval with rational endpoints, `lo < hi`.
///
/// Open intervals serialize as `["lo","hi"]`; anything with a closed end
/// serializes as an object carrying the two flags.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntervalRepr", into = "IntervalRepr")]
pub struct Interval {
    lo: Rational,
    hi: Rational,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo >= hi {
            return Err(Error::DegenerateInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn open(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn closed(lo: Rational, hi: Rational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn is_open(&self) -> bool {
        !self.lo_closed && !self.hi_closed
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        self.lo.midpoint(&self.hi)
    }

    pub fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn interior(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lo_closed {
            x >= &self.lo
        } else {
            x > &self.lo
        };
        let below = if self.hi_closed {
            x <= &self.hi
        } else {
            x < &self.hi
        };
        above && below
    }

    /// True when the closure lies inside `[0,1]`.
    pub fn within_unit(&self) -> bool {
        !self.lo.is_negative() && self.hi <= Rational::one()
    }

    /// Intersection of the interiors, if nonempty.
    pub fn intersect_open(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        Interval::open(lo, hi).ok()
    }

    /// Distance between the two intervals; zero if they overlap or touch.
    pub fn gap(&self, other: &Interval) -> Rational {
        let a = &other.lo - &self.hi;
        let b = &self.lo - &other.hi;
        let g = a.max(b);
        if g.is_negative() {
            Rational::zero()
        } else {
            g
        }
    }

    /// True when the interiors share a point.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntervalRepr {
    Open(Rational, Rational),
    Flagged {
        lo: Rational,
        hi: Rational,
        lo_closed: bool,
        hi_closed: bool,
    },
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;

    fn try_from(repr: IntervalRepr) -> Result<Self> {
        match repr {
            IntervalRepr::Open(lo, hi) => Interval::open(lo, hi),
            IntervalRepr::Flagged {
                lo,
                hi,
                lo_closed,
                hi_closed,
            } => Interval::new(lo, hi, lo_closed, hi_closed),
        }
    }
}

impl From<Interval> for IntervalRepr {
    fn from(i: Interval) -> Self {
        if i.is_open() {
            IntervalRepr::Open(i.lo, i.hi)
        } else {
            IntervalRepr::Flagged {
                lo: i.lo,
                hi: i.hi,
                lo_closed: i.lo_closed,
                hi_closed: i.hi_closed,
            }
        }
    }
}
