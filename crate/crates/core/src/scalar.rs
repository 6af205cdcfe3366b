//! Scalar traits shared by the containers.
//!
//! Every container in this crate (jet polynomials, power series, tower
//! elements) is generic over [`Scalar`]. The p-adic specific operations
//! (valuations, division by p) live on [`PadicLike`], which carries the prime
//! as an associated constant so that mixing primes is a type error.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sentinel absolute precision of exact values.
pub const EXACT: i64 = i64::MAX / 4;

/// Clamp a precision or valuation into the sentinel range.
#[inline]
pub(crate) fn clamp(x: i64) -> i64 {
    x.min(EXACT)
}

/// Commutative ring scalars with optional absolute precision.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_bigint(n: &BigInt) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    /// `num / den`, known to absolute precision `prec` when the result is not exact.
    fn from_ratio(num: &BigInt, den: &BigInt, prec: i64) -> Result<Self>;

    /// Multiplicative inverse; inexact results are capped at `prec`.
    fn inverse(&self, prec: i64) -> Result<Self>;

    /// Lower the absolute precision to at most `prec`. No-op for exact types.
    fn cap(self, _prec: i64) -> Self {
        self
    }

    /// Absolute precision, or `None` when the value is exact.
    fn precision(&self) -> Option<i64> {
        None
    }

    /// A lower bound for the p-adic valuation, used to skip products that
    /// vanish at the working precision. Types without one return 0.
    fn val_hint(&self) -> i64 {
        0
    }

    /// `p^k` when arithmetic modulo it fits in machine words (products below
    /// `2^64`). Types without such a representation return `None`.
    fn word_modulus(_k: i64) -> Option<u64> {
        None
    }

    /// The integral value reduced modulo `p^k`; `None` when not integral.
    fn word_residue(&self, _k: i64) -> Option<u64> {
        None
    }

    /// Inverse of [`Scalar::word_residue`]: `r` known modulo `p^k`.
    fn from_word_residue(r: u64, _k: i64) -> Self {
        Self::from_i64(r as i64)
    }
}

/// Scalars living over `Z_p` or `F_p` for a fixed prime.
pub trait PadicLike: Scalar {
    const P: u32;

    /// A lower bound for the valuation. Exact for nonzero values; for a
    /// zero-at-precision value it is the precision itself.
    fn val_lower(&self) -> i64;

    /// Multiply by `p^k`, where `k` may be negative (leaving `Z_p` when the
    /// valuation drops below zero).
    fn shift(&self, k: i64) -> Result<Self>;

    /// Divide by `p^k`, insisting that the quotient stays integral when the
    /// input was.
    fn div_exact(&self, k: i64) -> Result<Self>;

    /// Residue class modulo p. Requires non-negative valuation.
    fn residue(&self) -> Result<u32>;

    /// The standard lift `0 <= r < p` of a residue.
    fn from_residue(r: u32) -> Self {
        Self::from_i64(r as i64)
    }

    fn is_unit(&self) -> bool {
        !self.is_zero() && self.val_lower() == 0
    }
}

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_ratio(num: &BigInt, den: &BigInt, _prec: i64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::NotUnit("zero denominator".into()));
        }
        Ok(BigRational::new(num.clone(), den.clone()))
    }

    fn inverse(&self, _prec: i64) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotUnit("0".into()));
        }
        Ok(self.recip())
    }
}

/// p-adic valuation of a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u32) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut m = n.abs();
    let mut v = 0;
    while (&m % &pb).is_zero() {
        m /= &pb;
        v += 1;
    }
    Some(v)
}

/// p-adic valuation of a nonzero rational.
pub fn rat_valuation(x: &BigRational, p: u32) -> Option<i64> {
    Some(int_valuation(x.numer(), p)? - int_valuation(x.denom(), p)?)
}
