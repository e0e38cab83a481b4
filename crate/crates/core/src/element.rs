//! Storage backends for field elements.
//!
//! Elements are exact integers held either in an `f64` (exact up to 2^53,
//! the mantissa width) or an `i64` (exact up to 2^63). All kernels are
//! generic over the backend; the two must agree bit-for-bit on any input
//! that fits the smaller capacity.

use std::fmt;

/// An exact-integer scalar backend.
///
/// Implementations must perform `add`/`sub`/`mul`/`neg` exactly as long as
/// every operand and result stays below `2^NATIVE_GAMMA` in magnitude.
pub trait Element:
    Copy + Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Bit capacity of the exact integer range: values in (-2^γ, 2^γ).
    const NATIVE_GAMMA: u32;
    const NAME: &'static str;

    fn from_i64(v: i64) -> Self;
    /// Exact conversion back; the value must be integral and in range.
    fn to_i64(self) -> i64;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(self) -> bool;

    fn add(self, rhs: Self) -> Self;
    fn sub(self, rhs: Self) -> Self;
    fn mul(self, rhs: Self) -> Self;
    fn neg(self) -> Self;

    /// Truncated remainder (sign of the dividend), exact on integral values.
    fn rem_trunc(self, m: Self) -> Self;

    fn abs_u128(self) -> u128;
}

impl Element for f64 {
    const NATIVE_GAMMA: u32 = 53;
    const NAME: &'static str = "f64";

    #[inline(always)]
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    #[inline(always)]
    fn to_i64(self) -> i64 {
        self as i64
    }
    #[inline(always)]
    fn zero() -> Self {
        0.0
    }
    #[inline(always)]
    fn one() -> Self {
        1.0
    }
    #[inline(always)]
    fn is_zero(self) -> bool {
        self == 0.0
    }
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    #[inline(always)]
    fn neg(self) -> Self {
        -self
    }
    #[inline(always)]
    fn rem_trunc(self, m: Self) -> Self {
        self % m
    }
    #[inline(always)]
    fn abs_u128(self) -> u128 {
        self.abs() as u128
    }
}

impl Element for i64 {
    const NATIVE_GAMMA: u32 = 63;
    const NAME: &'static str = "i64";

    #[inline(always)]
    fn from_i64(v: i64) -> Self {
        v
    }
    #[inline(always)]
    fn to_i64(self) -> i64 {
        self
    }
    #[inline(always)]
    fn zero() -> Self {
        0
    }
    #[inline(always)]
    fn one() -> Self {
        1
    }
    #[inline(always)]
    fn is_zero(self) -> bool {
        self == 0
    }
    #[inline(always)]
    fn add(self, rhs: Self) -> Self {
        self + rhs
    }
    #[inline(always)]
    fn sub(self, rhs: Self) -> Self {
        self - rhs
    }
    #[inline(always)]
    fn mul(self, rhs: Self) -> Self {
        self * rhs
    }
    #[inline(always)]
    fn neg(self) -> Self {
        -self
    }
    #[inline(always)]
    fn rem_trunc(self, m: Self) -> Self {
        self % m
    }
    #[inline(always)]
    fn abs_u128(self) -> u128 {
        self.unsigned_abs() as u128
    }
}
