//! Coefficient fields for the series kit.
//!
//! Two fields are supported: exact rationals ([`rug::Rational`]) and
//! fixed-precision binary floats ([`rug::Float`]). Float coefficients carry
//! their own precision, so constructors take an existing value (`*_like`) to
//! learn it.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

pub trait Scalar: Clone + PartialOrd + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn int_like(&self, v: i64) -> Self;
    fn ratio_like(&self, num: i64, den: i64) -> Self;

    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    /// Caller guarantees `rhs` is nonzero.
    fn over(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn times_int(&self, k: i64) -> Self;
    fn over_int(&self, k: i64) -> Self;

    fn is_zero(&self) -> bool;
    fn signum(&self) -> Ordering;
    fn abs(&self) -> Self;
    /// `None` for negative input, or when the root is not representable
    /// (a rational that is not a perfect square).
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;

    fn is_exact() -> bool;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn int_like(&self, v: i64) -> Self {
        Rational::from(v)
    }
    fn ratio_like(&self, num: i64, den: i64) -> Self {
        Rational::from((num, den))
    }
    fn plus(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn over(&self, rhs: &Self) -> Self {
        Rational::from(self / rhs)
    }
    fn negated(&self) -> Self {
        Rational::from(-self)
    }
    fn times_int(&self, k: i64) -> Self {
        Rational::from(self * Integer::from(k))
    }
    fn over_int(&self, k: i64) -> Self {
        Rational::from(self / Integer::from(k))
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == Ordering::Equal
    }
    fn signum(&self) -> Ordering {
        self.cmp0()
    }
    fn abs(&self) -> Self {
        Rational::from(self.abs_ref())
    }
    fn sqrt(&self) -> Option<Self> {
        if self.cmp0() == Ordering::Less {
            return None;
        }
        let (num, den) = (self.numer(), self.denom());
        if num.is_perfect_square() && den.is_perfect_square() {
            Some(Rational::from((
                Integer::from(num.sqrt_ref()),
                Integer::from(den.sqrt_ref()),
            )))
        } else {
            None
        }
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Float {
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn int_like(&self, v: i64) -> Self {
        Float::with_val(self.prec(), v)
    }
    fn ratio_like(&self, num: i64, den: i64) -> Self {
        Float::with_val(self.prec(), num) / den
    }
    fn plus(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self + rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self - rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self * rhs)
    }
    fn over(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self / rhs)
    }
    fn negated(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn times_int(&self, k: i64) -> Self {
        Float::with_val(self.prec(), self * k)
    }
    fn over_int(&self, k: i64) -> Self {
        Float::with_val(self.prec(), self / k)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn signum(&self) -> Ordering {
        self.cmp0().unwrap_or(Ordering::Equal)
    }
    fn abs(&self) -> Self {
        Float::with_val(self.prec(), self.abs_ref())
    }
    fn sqrt(&self) -> Option<Self> {
        match self.cmp0() {
            Some(Ordering::Less) | None => None,
            _ => Some(Float::with_val(self.prec(), self.sqrt_ref())),
        }
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
    fn is_exact() -> bool {
        false
    }
}

/// Γ(k + 1/2) = √π · (2k−1)!! / 2^k at `prec` bits.
pub fn gamma_half_integer(k: u32, prec: u32) -> Float {
    let mut double_fact = Integer::from(1);
    let mut j = 2 * i64::from(k) - 1;
    while j > 1 {
        double_fact *= j;
        j -= 2;
    }
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let root_pi = pi.sqrt();
    let two_k = Integer::from(2).pow(k);
    root_pi * Float::with_val(prec, double_fact) / Float::with_val(prec, two_k)
}
