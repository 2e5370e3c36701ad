use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::ExactInt;

/// A complex number with exact integer parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianInteger<T> {
    pub re: T,
    pub im: T,
}

impl<T: ExactInt> GaussianInteger<T> {
    pub fn new(re: T, im: T) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(T::from_i64(re), T::from_i64(im))
    }

    pub fn real(re: T) -> Self {
        Self::new(re, T::zero())
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(T::zero(), T::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg_exact())
    }

    /// Multiplication by an integer.
    pub fn scale(&self, k: &T) -> Self {
        Self::new(self.re.mul_exact(k), self.im.mul_exact(k))
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> T {
        self.re.mul_exact(&self.re).add_exact(&self.im.mul_exact(&self.im))
    }

    /// `Re(conj(self) * rhs)`, two products instead of four.
    pub fn re_conj_mul(&self, rhs: &Self) -> T {
        self.re.mul_exact(&rhs.re).add_exact(&self.im.mul_exact(&rhs.im))
    }

    pub fn magnitude_bits(&self) -> u64 {
        self.re.magnitude_bits().max(self.im.magnitude_bits())
    }
}

impl<T: ExactInt> fmt::Display for GaussianInteger<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < T::zero() {
            write!(f, "{}-{}i", self.re, self.im.neg_exact())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl<T: ExactInt> Add for &GaussianInteger<T> {
    type Output = GaussianInteger<T>;

    fn add(self, rhs: Self) -> GaussianInteger<T> {
        GaussianInteger::new(self.re.add_exact(&rhs.re), self.im.add_exact(&rhs.im))
    }
}

impl<T: ExactInt> Sub for &GaussianInteger<T> {
    type Output = GaussianInteger<T>;

    fn sub(self, rhs: Self) -> GaussianInteger<T> {
        GaussianInteger::new(self.re.sub_exact(&rhs.re), self.im.sub_exact(&rhs.im))
    }
}

impl<T: ExactInt> Mul for &GaussianInteger<T> {
    type Output = GaussianInteger<T>;

    fn mul(self, rhs: Self) -> GaussianInteger<T> {
        let re = self.re.mul_exact(&rhs.re).sub_exact(&self.im.mul_exact(&rhs.im));
        let im = self.re.mul_exact(&rhs.im).add_exact(&self.im.mul_exact(&rhs.re));
        GaussianInteger::new(re, im)
    }
}

impl<T: ExactInt> Neg for &GaussianInteger<T> {
    type Output = GaussianInteger<T>;

    fn neg(self) -> GaussianInteger<T> {
        GaussianInteger::new(self.re.neg_exact(), self.im.neg_exact())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: ExactInt> $tr for GaussianInteger<T> {
            type Output = GaussianInteger<T>;

            fn $m(self, rhs: Self) -> GaussianInteger<T> {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: ExactInt> Neg for GaussianInteger<T> {
    type Output = GaussianInteger<T>;

    fn neg(self) -> GaussianInteger<T> {
        -&self
    }
}

impl<T: ExactInt> Zero for GaussianInteger<T> {
    fn zero() -> Self {
        GaussianInteger::zero()
    }

    fn is_zero(&self) -> bool {
        GaussianInteger::is_zero(self)
    }
}
