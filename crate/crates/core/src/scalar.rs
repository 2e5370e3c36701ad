//! Scalar abstractions shared by the exact and the floating-point halves of
//! the crate.
//!
//! [`ExactInt`] covers the integer types that may back the automaton: the
//! arbitrary-precision [`BigInt`] (default) and a checked `i64` fast path.
//! Every arithmetic helper goes through the `checked_*` operations so that a
//! fixed-width overflow panics instead of wrapping.
//!
//! [`Real`] covers `f32` and `f64` for the sampling and QM bridges.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use nalgebra::RealField;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, ToPrimitive, Zero};

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Largest magnitude that converts to `f64` without rounding.
pub const F64_EXACT_LIMIT_BITS: u64 = 53;

/// An exact integer scalar.
pub trait ExactInt:
    Clone
    + Debug
    + Display
    + Eq
    + Ord
    + Hash
    + Zero
    + One
    + Integer
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromStr
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Number of bits of `|self|` (zero for zero).
    fn magnitude_bits(&self) -> u64;

    fn add_exact(&self, rhs: &Self) -> Self {
        self.checked_add(rhs).unwrap_or_else(|| overflow("addition", self, rhs))
    }

    fn sub_exact(&self, rhs: &Self) -> Self {
        self.checked_sub(rhs)
            .unwrap_or_else(|| overflow("subtraction", self, rhs))
    }

    fn mul_exact(&self, rhs: &Self) -> Self {
        self.checked_mul(rhs)
            .unwrap_or_else(|| overflow("multiplication", self, rhs))
    }

    fn neg_exact(&self) -> Self {
        Self::zero().sub_exact(self)
    }

    /// Exact division by two, `None` when odd.
    fn halve(&self) -> Option<Self> {
        let two = Self::from_i64(2);
        let (q, r) = self.div_rem(&two);
        r.is_zero().then_some(q)
    }

    /// Decimal digit count of `|self|`, estimated from the bit length
    /// (may undercount by one).
    fn decimal_digits(&self) -> u64 {
        let bits = self.magnitude_bits();
        if bits == 0 {
            1
        } else {
            ((bits - 1) as f64 * LOG10_2).floor() as u64 + 1
        }
    }

    /// Conversion to `f64` that refuses anything beyond 2^53 in magnitude.
    fn to_f64_exact(&self) -> Option<f64> {
        if self.magnitude_bits() > F64_EXACT_LIMIT_BITS {
            None
        } else {
            self.to_f64()
        }
    }
}

#[cold]
fn overflow<T: Display>(what: &str, a: &T, b: &T) -> ! {
    panic!("fixed-width integer overflow in {what} of {a} and {b}")
}

impl ExactInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }

    fn magnitude_bits(&self) -> u64 {
        self.bits()
    }
}

impl ExactInt for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }

    fn magnitude_bits(&self) -> u64 {
        64 - u64::from(self.unsigned_abs().leading_zeros())
    }

    fn decimal_digits(&self) -> u64 {
        self.unsigned_abs().checked_ilog10().map_or(1, |d| u64::from(d) + 1)
    }
}

/// A floating-point scalar usable by the continuum and QM bridges.
pub trait Real: RealField + Copy + FromPrimitive + Display {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64;
}

impl Real for f64 {
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn to_f64_lossy(self) -> f64 {
        f64::from(self)
    }
}
