//! Arbitrary-precision rationals in canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number, always stored reduced with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(BigRational);

impl ExactRational {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::domain("rational with zero denominator"));
        }
        Ok(ExactRational(BigRational::new(numerator, denominator)))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(value.into()))
    }

    /// `num / den` for non-negative big integers; `den` must be non-zero.
    pub fn from_ratio(num: BigUint, den: BigUint) -> Result<Self> {
        Self::new(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Self {
        ExactRational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactRational(BigRational::one())
    }

    /// Exactly `2^exp`, for any sign of `exp`.
    pub fn pow2(exp: i64) -> Self {
        let magnitude = BigInt::one() << exp.unsigned_abs();
        if exp >= 0 {
            ExactRational(BigRational::from_integer(magnitude))
        } else {
            ExactRational(BigRational::new_raw(BigInt::one(), magnitude))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        ExactRational(self.0.abs())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        Ok(ExactRational(&self.0 / &rhs.0))
    }

    /// If the value is exactly `2^e` for an integer `e`, returns `e`.
    pub fn as_power_of_two(&self) -> Option<i64> {
        let num = self.numer();
        let den = self.denom();
        if num.sign() != Sign::Plus {
            return None;
        }
        let is_pow2 = |v: &BigInt| v.magnitude().count_ones() == 1;
        if den.is_one() && is_pow2(num) {
            return num.bits().checked_sub(1).map(|b| b as i64);
        }
        if num.is_one() && is_pow2(den) {
            return Some(-((den.bits() - 1) as i64));
        }
        None
    }

    /// Lossy conversion, for human-facing summaries only.
    pub fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Plain decimal rendering rounded half-up to `digits` significant digits.
    ///
    /// Never uses exponent notation. Zero renders as `"0"`.
    pub fn to_significant(&self, digits: usize) -> String {
        assert!(digits > 0, "at least one significant digit");
        if self.is_zero() {
            return "0".to_string();
        }
        let negative = self.is_negative();
        let x = self.0.abs();
        let ten = BigInt::from(10);

        // Decimal exponent e with 10^e <= x < 10^(e+1).
        let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
        let pow10 = |p: i64| -> BigRational {
            let m = num_traits::pow(ten.clone(), p.unsigned_abs() as usize);
            if p >= 0 {
                BigRational::from_integer(m)
            } else {
                BigRational::new(BigInt::one(), m)
            }
        };
        if x < pow10(e) {
            e -= 1;
        }

        let scaled = &x * pow10(digits as i64 - 1 - e);
        // Round half-up.
        let (q, r) = scaled.numer().div_rem(scaled.denom());
        let mut mantissa = if r.clone() * 2 >= *scaled.denom() { q + 1 } else { q };
        if mantissa == num_traits::pow(ten.clone(), digits) {
            mantissa /= &ten;
            e += 1;
        }
        let body = mantissa.to_string();
        debug_assert_eq!(body.len(), digits);

        let mut out = String::new();
        if negative {
            out.push('-');
        }
        if e < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-e - 1) as usize));
            out.push_str(&body);
        } else if (e as usize) + 1 >= digits {
            out.push_str(&body);
            out.extend(std::iter::repeat_n('0', e as usize + 1 - digits));
        } else {
            let split = e as usize + 1;
            out.push_str(&body[..split]);
            out.push('.');
            out.push_str(&body[split..]);
        }
        out
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `a`, `a/b`, and powers of two written `2^N` or `2^-N`.
impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::domain(format!("cannot parse `{s}` as a rational (expected a/b or 2^-N)"));
        if let Some(exp) = s.strip_prefix("2^") {
            let exp: i64 = exp.parse().map_err(|_| bad())?;
            return Ok(Self::pow2(exp));
        }
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Self::new(n, d)
            }
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(Self::from_integer(n))
            }
        }
    }
}

impl From<BigRational> for ExactRational {
    fn from(value: BigRational) -> Self {
        ExactRational(value)
    }
}

impl From<ExactRational> for BigRational {
    fn from(value: ExactRational) -> Self {
        value.0
    }
}

impl From<u64> for ExactRational {
    fn from(value: u64) -> Self {
        Self::from_integer(value)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactRational> for &ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: &ExactRational) -> ExactRational {
                ExactRational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for ExactRational {
            type Output = ExactRational;
            fn $method(self, rhs: ExactRational) -> ExactRational {
                ExactRational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational(-self.0)
    }
}

impl PartialEq<u64> for ExactRational {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}

impl PartialOrd<u64> for ExactRational {
    fn partial_cmp(&self, other: &u64) -> Option<Ordering> {
        self.0.partial_cmp(&BigRational::from_integer(BigInt::from(*other)))
    }
}
