use std::cmp::Ordering;
use std::fmt;

use crate::ext::ExtReal;

/// Bound `(rel, c)` on a difference `x - y`: `x - y < c` when `strict`,
/// `x - y <= c` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub strict: bool,
    pub c: ExtReal,
}

impl Weight {
    /// `(<=, +inf)`: no constraint at all.
    pub const INF: Weight = Weight { strict: false, c: ExtReal::PosInf };
    /// `(<, +inf)`: the difference is not `+inf`.
    pub const LT_INF: Weight = Weight { strict: true, c: ExtReal::PosInf };
    /// `(<=, -inf)`: the difference is `-inf`.
    pub const NEG_INF: Weight = Weight { strict: false, c: ExtReal::NegInf };
    /// `(<=, 0)`.
    pub const LE_ZERO: Weight = Weight { strict: false, c: ExtReal::ZERO };

    pub fn le(c: ExtReal) -> Self {
        Weight { strict: false, c }
    }

    pub fn lt(c: ExtReal) -> Self {
        Weight { strict: true, c }
    }

    pub fn new(strict: bool, c: ExtReal) -> Self {
        Weight { strict, c }
    }

    /// True when a difference with value `d` satisfies this bound.
    pub fn admits(&self, d: ExtReal) -> bool {
        if self.strict {
            d < self.c
        } else {
            d <= self.c
        }
    }

    /// `(<, -inf)` can never be satisfied.
    pub fn is_unsatisfiable(&self) -> bool {
        self.strict && self.c == ExtReal::NegInf
    }

    /// Path composition. Constants add with the absorbing-infinity algebra;
    /// the result is strict iff either summand is strict, except that an
    /// infinite sum is always non-strict (a strict infinite sum would not be
    /// implied by its summands).
    pub fn add(self, other: Weight) -> Weight {
        let c = self.c + other.c;
        let strict = if c.is_infinite() { false } else { self.strict || other.strict };
        Weight { strict, c }
    }

    pub fn min(self, other: Weight) -> Weight {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Ord for Weight {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.cmp(&other.c).then_with(|| other.strict.cmp(&self.strict))
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", if self.strict { "<" } else { "<=" }, self.c)
    }
}
