//! Exact rational numbers.
//!
//! Density limits and specialized Siegel series values are rationals with
//! arbitrary-precision numerator and denominator, always reduced and with
//! positive denominator. `num_rational::BigRational` maintains exactly that
//! normal form, so it is used directly.

use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;

/// Rational from an integer pair, reducing and normalizing the sign.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    Rational::from(BigInt::from(num))
}

/// `base^exp` for a possibly negative exponent, as an exact rational.
///
/// `base` must be nonzero when `exp < 0`.
pub fn rat_pow(base: &BigInt, exp: i64) -> Rational {
    use num_traits::One;
    if exp >= 0 {
        Rational::from(base.pow(exp as u32))
    } else {
        Rational::new(BigInt::one(), base.pow((-exp) as u32))
    }
}
