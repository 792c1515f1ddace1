//! Outward-rounded dyadic enclosures of the probability series.
//!
//! Every quantity is held as a pair of integers at the common scale `2^P`.
//! Explicit terms `1/(2^(e+1)-2)` are rounded down and up to that scale; the
//! remainder past the cutoff index is bracketed by geometric series in closed
//! form. Both roundings only ever widen the enclosure.

use std::ops::Add;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::model::ComplexityModel;
use crate::rational::ExactRational;

/// Extra bits of precision beyond the smallest explicit term.
const GUARD_BITS: u64 = 80;

/// Lower and upper bound on a non-negative quantity, both scaled by `2^P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Scaled {
    pub lo: BigUint,
    pub hi: BigUint,
}

impl Scaled {
    pub fn zero() -> Self {
        Scaled {
            lo: BigUint::zero(),
            hi: BigUint::zero(),
        }
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        Scaled {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }
}

impl Add<&Scaled> for Scaled {
    type Output = Scaled;
    fn add(self, rhs: &Scaled) -> Scaled {
        Scaled {
            lo: self.lo + &rhs.lo,
            hi: self.hi + &rhs.hi,
        }
    }
}

pub(crate) struct Series<'a> {
    model: &'a dyn ComplexityModel,
    cutoff: u64,
    precision: u64,
}

impl<'a> Series<'a> {
    /// Explicit terms cover `[first, cutoff)` where the cutoff is at least
    /// `first + depth` and strictly above `highest`.
    pub fn new(model: &'a dyn ComplexityModel, first: u64, highest: u64, depth: u64) -> Self {
        let cutoff = (first + depth).max(highest + 1);
        let precision = model.term_exponent(cutoff) + GUARD_BITS;
        Series {
            model,
            cutoff,
            precision,
        }
    }

    fn term(&self, index: u64) -> Scaled {
        let e = self.model.term_exponent(index);
        let denom = (BigUint::one() << (e + 1)) - 2u32;
        let (q, r) = (BigUint::one() << self.precision).div_rem(&denom);
        let hi = if r.is_zero() { q.clone() } else { &q + 1u32 };
        Scaled { lo: q, hi }
    }

    /// Sum of the terms with index in `[from, to)`; requires `to <= cutoff`.
    pub fn range(&self, from: u64, to: u64) -> Scaled {
        debug_assert!(from >= to || to <= self.cutoff);
        (from..to).fold(Scaled::zero(), |acc, i| acc + self.term(i))
    }

    /// Enclosure of the infinite tail starting at index `from`.
    pub fn tail(&self, from: u64) -> Scaled {
        let split = from.max(self.cutoff);
        self.range(from, self.cutoff.max(from)) + self.bracket(split)
    }

    fn bracket(&self, from: u64) -> Scaled {
        // sum_{i>=j} 2^-(e(i)+1) <= terms <= sum_{i>=j} 2^-(i + e(j) - j) = 2^(1 - e(j))
        let lo_exp = self.model.tail_lower_exponent(from);
        let hi_exp = self.model.term_exponent(from);
        let p = self.precision;
        Scaled {
            lo: if p >= lo_exp { BigUint::one() << (p - lo_exp) } else { BigUint::zero() },
            hi: if p + 1 >= hi_exp { BigUint::one() << (p + 1 - hi_exp) } else { BigUint::one() },
        }
    }

    /// Converts a scaled enclosure to exact rational endpoints.
    pub fn unscale(&self, s: &Scaled) -> Result<(ExactRational, ExactRational)> {
        let scale = BigUint::one() << self.precision;
        Ok((
            ExactRational::from_ratio(s.lo.clone(), scale.clone())?,
            ExactRational::from_ratio(s.hi.clone(), scale)?,
        ))
    }
}

/// Enclosure of `part / (part + rest)` for positive `part` and non-negative `rest`.
pub(crate) fn fraction(part: &Scaled, rest: &Scaled) -> Result<(ExactRational, ExactRational)> {
    let lo = ExactRational::from_ratio(part.lo.clone(), &part.lo + &rest.hi)?;
    let hi = ExactRational::from_ratio(part.hi.clone(), &part.hi + &rest.lo)?;
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Plain, SelfDelimiting};

    fn exact_term(e: u64) -> ExactRational {
        let d = (BigUint::one() << (e + 1)) - 2u32;
        ExactRational::from_ratio(BigUint::one(), d).unwrap()
    }

    #[test]
    fn terms_enclose_exact_values() {
        let m = SelfDelimiting::with_default_overhead();
        let s = Series::new(&m, 1, 1, 40);
        for i in 1..40 {
            let (lo, hi) = s.unscale(&s.term(i)).unwrap();
            let exact = exact_term(m.term_exponent(i));
            assert!(lo <= exact && exact <= hi, "index {i}");
        }
    }

    #[test]
    fn finite_range_matches_exact_sum() {
        let m = Plain::new(0);
        let s = Series::new(&m, 3, 3, 30);
        let (lo, hi) = s.unscale(&s.range(3, 20)).unwrap();
        let exact = (3..20).fold(ExactRational::zero(), |acc, i| acc + exact_term(i));
        assert!(lo <= exact && exact <= hi);
        assert!(&hi - &lo <= ExactRational::pow2(-60));
    }

    #[test]
    fn tail_beyond_cutoff_is_pure_bracket() {
        let m = Plain::new(0);
        let s = Series::new(&m, 1, 1, 10);
        let (lo, hi) = s.unscale(&s.tail(50)).unwrap();
        assert_eq!(lo, ExactRational::pow2(-50));
        assert_eq!(hi, ExactRational::pow2(-49));
    }
}
