//! Numeric types shared by the metrics.
//!
//! Proportions and means are exact [`Rational`]s. Entropies are computed in any
//! floating-point [`Scalar`]; the crate root fixes `f64` as [`Bits`].

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{Float, FromPrimitive};

use crate::error::{Error, Result};

/// Exact non-negative rational used for proportions, fractions and thresholds.
pub type Rational = Ratio<u64>;

/// Floating-point types the entropy functions are generic over.
pub trait Scalar: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}

/// Nearest `T` to `r`.
pub fn to_scalar<T: Scalar>(r: &Rational) -> T {
    let num = T::from_u64(*r.numer()).expect("u64 converts to a float");
    let den = T::from_u64(*r.denom()).expect("u64 converts to a float");
    num / den
}

/// Parses `"3/4"`, `"0.75"`, `"1"` or `"1e-1"`-free decimals into an exact rational.
pub fn parse_fraction(text: &str) -> Result<Rational> {
    let bad = || Error::BadFraction(text.to_string());
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        let d: u64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if !digits(int) || !digits(frac) || frac.len() > 18 {
        return Err(bad());
    }
    let scale = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Rational::new(num, scale))
}

/// A threshold in `[0, 1]`.
pub fn unit_fraction(text: &str) -> Result<Rational> {
    let r = parse_fraction(text)?;
    if r > Rational::from_integer(1) {
        return Err(Error::ThresholdOutOfRange(text.to_string()));
    }
    Ok(r)
}
