use crate::error::{Error, Result};
use crate::scalar::{to_scalar, Rational, Scalar};

/// `−p·log₂p − (1−p)·log₂(1−p)`, with `0·log₂0 = 0`.
pub fn binary_entropy<T: Scalar>(p: T) -> Result<T> {
    let zero = T::zero();
    let one = T::one();
    if p.is_nan() || p < zero || p > one {
        return Err(Error::ProbabilityOutOfRange(p.to_string()));
    }
    let term = |x: T| if x == zero { zero } else { -x * x.log2() };
    Ok(term(p) + term(one - p))
}

/// Entropy of an exact proportion. `p` and `1 − p` give bit-identical results,
/// so equal or complementary proportions cancel exactly when subtracted.
pub fn entropy_of<T: Scalar>(p: &Rational) -> Result<T> {
    let one = Rational::from_integer(1);
    if *p > one {
        return Err(Error::ProbabilityOutOfRange(p.to_string()));
    }
    let low = (*p).min(one - p);
    if low * 2 == one {
        return Ok(T::one());
    }
    binary_entropy(to_scalar::<T>(&low))
}
