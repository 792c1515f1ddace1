//! Rigorous enclosures of probabilities.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::ExactRational;

/// A closed interval `[lo, hi]` inside `[0, 1]` known to contain an exact probability.
///
/// Construction rejects endpoints outside the unit interval instead of
/// clamping them: an out-of-range endpoint means an enclosure was computed
/// wrongly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbInterval {
    lo: ExactRational,
    hi: ExactRational,
}

impl ProbInterval {
    pub fn new(lo: ExactRational, hi: ExactRational) -> Result<Self> {
        if lo.is_negative() || hi > 1u64 || lo > hi {
            return Err(Error::internal(format!(
                "probability enclosure [{lo}, {hi}] is not a sub-interval of [0, 1]"
            )));
        }
        Ok(ProbInterval { lo, hi })
    }

    pub fn point(value: ExactRational) -> Result<Self> {
        Self::new(value.clone(), value)
    }

    pub fn lo(&self) -> &ExactRational {
        &self.lo
    }

    pub fn hi(&self) -> &ExactRational {
        &self.hi
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &ExactRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn is_subset_of(&self, other: &ProbInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// The enclosure of `1 - x` for every `x` in `self`.
    pub fn complement(&self) -> ProbInterval {
        let one = ExactRational::one();
        ProbInterval {
            lo: &one - &self.hi,
            hi: &one - &self.lo,
        }
    }

    /// Largest distance between a point of `self` and a point of `other`.
    pub fn max_distance(&self, other: &ProbInterval) -> ExactRational {
        let a = (&self.hi - &other.lo).abs();
        let b = (&other.hi - &self.lo).abs();
        a.max(b)
    }
}

impl fmt::Display for ProbInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lo = {}, hi = {}", self.lo, self.hi)
    }
}
