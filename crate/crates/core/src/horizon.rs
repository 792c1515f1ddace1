//! Step budgets derived from the output-size tail, and the closed-form lower bound.

use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::model::ComplexityModel;
use crate::prob::{below_prob, is_admissible_threshold, tail_prob};
use crate::rational::ExactRational;

/// Extra bits scanned beyond the closed-form estimate before giving up.
const SCAN_SLACK: u64 = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizonResult {
    pub m_star: u64,
    pub budget: BigUint,
    pub epsilon: ExactRational,
    pub model: String,
}

fn check_epsilon(epsilon: &ExactRational) -> Result<()> {
    if epsilon <= &ExactRational::zero() || epsilon >= &ExactRational::one() {
        return Err(Error::domain(format!("epsilon must lie strictly between 0 and 1, got {epsilon}")));
    }
    Ok(())
}

/// Smallest `q` with `2^-q <= epsilon`, i.e. `ceil(log2(1/epsilon))`.
pub fn epsilon_bits(epsilon: &ExactRational) -> Result<u64> {
    check_epsilon(epsilon)?;
    let mut q = 0u64;
    while ExactRational::pow2(-(q as i64)) > *epsilon {
        q += 1;
    }
    Ok(q)
}

/// Smallest `m` for which the tail probability is defined.
pub fn smallest_threshold(model: &dyn ComplexityModel, k: u64) -> Result<u64> {
    model.denominator_start(k)?;
    if let Some(c) = model.constant() {
        return Ok(k.saturating_sub(c).max(1));
    }
    (1..=k)
        .find(|&m| is_admissible_threshold(model, k, m))
        .ok_or_else(|| Error::internal(format!("no admissible threshold up to k = {k}")))
}

/// Minimal `m` with `tail_prob(model, k, m).hi <= epsilon`.
pub fn horizon_bits(model: &dyn ComplexityModel, k: u64, epsilon: &ExactRational) -> Result<u64> {
    let q = epsilon_bits(epsilon)?;
    let first = smallest_threshold(model, k)?;
    let limit = k + q + SCAN_SLACK;
    for m in first..=limit {
        if tail_prob(model, k, m)?.hi() <= epsilon {
            return Ok(m);
        }
    }
    Err(Error::internal(format!(
        "tail probability did not drop below {epsilon} by m = {limit}"
    )))
}

/// `2^m* - 1`: every step count of at most `m*` bits.
pub fn budget_steps(model: &dyn ComplexityModel, k: u64, epsilon: &ExactRational) -> Result<BigUint> {
    Ok(budget_for_bits(horizon_bits(model, k, epsilon)?))
}

pub fn budget_for_bits(bits: u64) -> BigUint {
    (BigUint::one() << bits) - 1u32
}

pub fn horizon(model: &dyn ComplexityModel, k: u64, epsilon: &ExactRational) -> Result<HorizonResult> {
    let m_star = horizon_bits(model, k, epsilon)?;
    Ok(HorizonResult {
        m_star,
        budget: budget_for_bits(m_star),
        epsilon: epsilon.clone(),
        model: model.describe(),
    })
}

/// The loose characteristic time `2^(k+51)`.
pub fn paper_characteristic(k: u64) -> BigUint {
    BigUint::one() << (k + 51)
}

/// `1 - 2^(k - m + b)`.
pub fn lower_bound_closed(k: u64, m: u64, b: u64) -> Result<ExactRational> {
    if m < k + b {
        return Err(Error::domain(format!("lower bound needs m >= k + b, got m = {m}, k = {k}, b = {b}")));
    }
    Ok(ExactRational::one() - ExactRational::pow2(k as i64 - m as i64 + b as i64))
}

/// A threshold where the closed-form lower bound exceeds the certified enclosure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundViolation {
    pub m: u64,
    pub lower_bound: ExactRational,
    pub below_lo: ExactRational,
}

/// All `m` in range where `lower_bound_closed(k, m, b)` is above `below_prob(model, k, m).lo`.
///
/// `b = 0` is accepted as a probe even though the bound is only claimed for `b > 1`.
pub fn check_lower_bound(
    model: &dyn ComplexityModel,
    k: u64,
    m_range: RangeInclusive<u64>,
    b: u64,
) -> Result<Vec<BoundViolation>> {
    let mut violations = Vec::new();
    for m in m_range {
        let bound = lower_bound_closed(k, m, b)?;
        let below = below_prob(model, k, m)?;
        if &bound > below.lo() {
            violations.push(BoundViolation {
                m,
                lower_bound: bound,
                below_lo: below.lo().clone(),
            });
        }
    }
    Ok(violations)
}

/// Smallest `b` in `0..=max_b` with no violations over the range, if any.
pub fn minimal_certified_b(
    model: &dyn ComplexityModel,
    k: u64,
    m_range: RangeInclusive<u64>,
    max_b: u64,
) -> Result<Option<u64>> {
    for b in 0..=max_b {
        let lo = (*m_range.start()).max(k + b);
        if check_lower_bound(model, k, lo..=*m_range.end(), b)?.is_empty() {
            return Ok(Some(b));
        }
    }
    Ok(None)
}
