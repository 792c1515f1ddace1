//! Prior, posterior and output-size probabilities with rigorous enclosures.
//!
//! The common `2^k` factor of numerator and denominator is cancelled before
//! any summation, so every quantity below is a ratio of series of the form
//! `sum 1/(2^(e(i)+1) - 2)`.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::interval::ProbInterval;
use crate::model::ComplexityModel;
use crate::rational::ExactRational;
use crate::series::{fraction, Series};

/// Number of explicit series terms used when the caller does not choose one.
pub fn default_depth(k: u64, m: u64) -> u64 {
    k.max(m) + 128
}

/// Lower and upper bound of a quantity that is not necessarily a probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lo: ExactRational,
    pub hi: ExactRational,
}

impl Bounds {
    pub fn contains(&self, value: &ExactRational) -> bool {
        &self.lo <= value && value <= &self.hi
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }
}

fn require_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::domain(format!("{name} must be a positive integer")));
    }
    Ok(())
}

fn interval(lo: ExactRational, hi: ExactRational) -> Result<ProbInterval> {
    ProbInterval::new(lo, hi)
}

/// Enclosure of the Bayes denominator with the `2^k` factor removed.
pub fn tail_sum(model: &dyn ComplexityModel, k: u64) -> Result<ProbInterval> {
    tail_sum_with_depth(model, k, default_depth(k, k))
}

pub fn tail_sum_with_depth(model: &dyn ComplexityModel, k: u64, depth: u64) -> Result<ProbInterval> {
    require_positive("k", k)?;
    let start = model.denominator_start(k)?;
    let series = Series::new(model, start, start, depth);
    let (lo, hi) = series.unscale(&series.tail(start))?;
    interval(lo, hi)
}

/// The prior `2^k / (2^(b(n)+1) - 2)` where `b(n)` is the model's complexity bound.
pub fn p1(model: &dyn ComplexityModel, k: u64, n: u64) -> Result<ExactRational> {
    require_positive("k", k)?;
    require_positive("n", n)?;
    let bound = model.complexity_bound(n);
    if k > bound {
        return Err(Error::domain(format!(
            "k = {k} exceeds the complexity bound {bound} of an {n}-bit output under {}",
            model.describe()
        )));
    }
    let num = BigInt::one() << k;
    let den = (BigInt::one() << (bound + 1)) - 2;
    ExactRational::new(num, den)
}

/// First output size whose series index falls inside the denominator's range.
pub fn smallest_output(model: &dyn ComplexityModel, k: u64) -> Result<u64> {
    let start = model.denominator_start(k)?;
    match model.constant() {
        Some(c) => Ok(start.saturating_sub(c).max(1)),
        None => {
            let mut n = 1;
            while model.output_index(n) < start {
                n += 1;
            }
            Ok(n)
        }
    }
}

fn check_output(model: &dyn ComplexityModel, k: u64, n: u64) -> Result<(u64, u64)> {
    require_positive("k", k)?;
    require_positive("n", n)?;
    let start = model.denominator_start(k)?;
    let index = model.output_index(n);
    if index < start {
        return Err(Error::domain(format!(
            "an {n}-bit output is not admissible for complexity k = {k} under {}",
            model.describe()
        )));
    }
    Ok((start, index))
}

/// The posterior probability that a complexity-`k` program's output has `n` bits.
pub fn p2(model: &dyn ComplexityModel, k: u64, n: u64) -> Result<ProbInterval> {
    p2_with_depth(model, k, n, default_depth(k, n))
}

pub fn p2_with_depth(model: &dyn ComplexityModel, k: u64, n: u64, depth: u64) -> Result<ProbInterval> {
    let (start, index) = check_output(model, k, n)?;
    let series = Series::new(model, start, index, depth);
    let term = series.range(index, index + 1);
    let rest = series.range(start, index) + series.tail(index + 1);
    let (lo, hi) = fraction(&term, &rest)?;
    interval(lo, hi)
}

/// The closed-form approximation `2^-(n+c-k+1)` of the posterior.
pub fn p2_closed(k: u64, n: u64, c: u64) -> Result<ExactRational> {
    require_positive("k", k)?;
    require_positive("n", n)?;
    if n + c < k {
        return Err(Error::domain(format!("n + c = {} is below k = {k}", n + c)));
    }
    Ok(ExactRational::pow2(-((n + c - k + 1) as i64)))
}

fn check_threshold(model: &dyn ComplexityModel, k: u64, m: u64) -> Result<(u64, u64)> {
    require_positive("k", k)?;
    require_positive("m", m)?;
    let start = model.denominator_start(k)?;
    let from = model.numerator_start(m)?;
    if from < start {
        return Err(Error::domain(format!(
            "threshold m = {m} is below the admissible range for k = {k} under {}",
            model.describe()
        )));
    }
    Ok((start, from))
}

/// Whether `tail_prob(model, k, m)` is defined.
pub fn is_admissible_threshold(model: &dyn ComplexityModel, k: u64, m: u64) -> bool {
    check_threshold(model, k, m).is_ok()
}

/// Probability that the output of a halting complexity-`k` program has at least `m` bits.
/// The default depth follows the numerator's first series index rather than
/// `m`, so thresholds sharing that index get identical enclosures.
pub fn tail_prob(model: &dyn ComplexityModel, k: u64, m: u64) -> Result<ProbInterval> {
    let (_, from) = check_threshold(model, k, m)?;
    tail_prob_with_depth(model, k, m, default_depth(k, from))
}

pub fn tail_prob_with_depth(model: &dyn ComplexityModel, k: u64, m: u64, depth: u64) -> Result<ProbInterval> {
    let (start, from) = check_threshold(model, k, m)?;
    let series = Series::new(model, start, from, depth);
    let upper = series.tail(from);
    let lower = series.range(start, from);
    let (lo, hi) = fraction(&upper, &lower)?;
    interval(lo, hi)
}

/// The closed form `2^-(m+c-k)` of the tail probability.
pub fn tail_closed(k: u64, m: u64, c: u64) -> Result<ExactRational> {
    require_positive("k", k)?;
    require_positive("m", m)?;
    if m + c < k {
        return Err(Error::domain(format!("m + c = {} is below k = {k}", m + c)));
    }
    Ok(ExactRational::pow2(-((m + c - k) as i64)))
}

/// Probability that the output of a halting complexity-`k` program has fewer than `m` bits.
pub fn below_prob(model: &dyn ComplexityModel, k: u64, m: u64) -> Result<ProbInterval> {
    Ok(tail_prob(model, k, m)?.complement())
}

pub fn below_prob_with_depth(model: &dyn ComplexityModel, k: u64, m: u64, depth: u64) -> Result<ProbInterval> {
    Ok(tail_prob_with_depth(model, k, m, depth)?.complement())
}

/// Sum of the posterior over every admissible output size up to `upto_n`, plus
/// an enclosure of the remaining mass. Must contain exactly one.
pub fn posterior_total(model: &dyn ComplexityModel, k: u64, upto_n: u64, depth: u64) -> Result<Bounds> {
    let first = smallest_output(model, k)?;
    if upto_n < first {
        return Err(Error::domain(format!(
            "upper output size {upto_n} is below the first admissible size {first}"
        )));
    }
    let mut lo = ExactRational::zero();
    let mut hi = ExactRational::zero();
    for n in first..=upto_n {
        let p = p2_with_depth(model, k, n, depth)?;
        lo = &lo + p.lo();
        hi = &hi + p.hi();
    }

    let start = model.denominator_start(k)?;
    let after = model.output_index(upto_n) + 1;
    let series = Series::new(model, start, after, depth);
    let (rlo, rhi) = fraction(&series.tail(after), &series.range(start, after))?;
    Ok(Bounds {
        lo: lo + rlo,
        hi: hi + rhi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Plain, SelfDelimiting};

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn p1_examples() {
        assert_eq!(p1(&Plain::new(0), 4, 4).unwrap(), r("8/15"));
        assert_eq!(p1(&Plain::new(0), 1, 1).unwrap(), r("1"));
        assert_eq!(p1(&Plain::new(2), 3, 3).unwrap(), r("4/31"));
        assert!(matches!(p1(&Plain::new(0), 5, 4), Err(Error::Domain(_))));
        assert!(p1(&Plain::new(0), 0, 4).is_err());
        // sd: bound(4) = 4 + 3
        assert_eq!(p1(&SelfDelimiting::with_default_overhead(), 7, 4).unwrap(), r("128/254"));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(p2_closed(10, 10, 0).unwrap(), r("1/2"));
        assert_eq!(p2_closed(10, 15, 3).unwrap(), r("1/512"));
        for (k, n, c) in [(5, 5, 0), (7, 4, 3), (12, 2, 10)] {
            assert_eq!(p2_closed(k, n, c).unwrap(), r("1/2"));
        }
        assert!(p2_closed(10, 5, 2).is_err());
        assert_eq!(tail_closed(10, 60, 0).unwrap(), ExactRational::pow2(-50));
        assert_eq!(tail_closed(20, 30, 5).unwrap(), ExactRational::pow2(-15));
        assert_eq!(tail_closed(8, 5, 3).unwrap(), r("1"));
        assert!(tail_closed(10, 5, 2).is_err());
    }

    #[test]
    fn tail_sum_bracketing() {
        let m = Plain::new(0);
        for k in 1..80 {
            let s = tail_sum(&m, k).unwrap();
            assert!(s.lo() > &ExactRational::pow2(-(k as i64)), "k={k}");
            assert!(s.hi() < &ExactRational::pow2(1 - k as i64), "k={k}");
        }
        let s = tail_sum(&m, 10).unwrap();
        let target = ExactRational::pow2(-10);
        let tol = ExactRational::pow2(-19);
        assert!((s.lo() - &target).abs() <= tol && (s.hi() - &target).abs() <= tol);
        assert!(tail_sum(&m, 0).is_err());
        assert!(tail_sum(&SelfDelimiting::with_default_overhead(), 1).is_err());
    }

    #[test]
    fn tail_prob_boundary_is_one() {
        let m = Plain::new(0);
        let t = tail_prob(&m, 10, 10).unwrap();
        assert!(t.contains(&r("1")));
        let b = below_prob(&m, 10, 10).unwrap();
        assert!(b.contains(&r("0")));
        assert!(tail_prob(&Plain::new(2), 10, 7).is_err());
        assert!(tail_prob(&Plain::new(2), 10, 8).is_ok());
    }

    #[test]
    fn far_tail_is_tiny() {
        let m = Plain::new(0);
        let t = tail_prob(&m, 10, 60).unwrap();
        assert!(t.hi() <= &ExactRational::pow2(-50));
        let b = below_prob(&m, 10, 60).unwrap();
        assert!(b.lo() >= &(r("1") - ExactRational::pow2(-49)));
    }

    #[test]
    fn p2_rejects_inadmissible_output() {
        assert!(p2(&Plain::new(0), 10, 9).is_err());
        assert!(p2(&Plain::new(1), 10, 9).is_ok());
        // k = 20 under the default overhead has l = 15.
        let sd = SelfDelimiting::with_default_overhead();
        assert!(p2(&sd, 20, 14).is_err());
        assert!(p2(&sd, 20, 15).is_ok());
    }

    #[test]
    fn deeper_truncation_nests() {
        let sd = SelfDelimiting::with_default_overhead();
        let models: [&dyn ComplexityModel; 2] = [&Plain::new(0), &sd];
        for m in models {
            let mut prev = tail_prob_with_depth(m, 12, 20, 4).unwrap();
            for depth in [8, 16, 32, 64, 128] {
                let next = tail_prob_with_depth(m, 12, 20, depth).unwrap();
                assert!(next.is_subset_of(&prev), "{} depth {depth}", m.describe());
                assert!(next.width() <= prev.width());
                prev = next;
            }
            assert!(prev.width() < ExactRational::pow2(-100));
        }
    }
}
