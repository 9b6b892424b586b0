//! Truncated power series and Puiseux series in half-integer powers.
//!
//! Everything here is generic over [`Scalar`], so the same code runs exactly
//! over rationals (used by the property suite and the WDVV residual check) and
//! at fixed binary precision (used for the local expansions at the branch
//! point).

mod evaluator;
mod puiseux;

pub use evaluator::{Complex, SeriesEvaluator, TailPolicy};
pub use puiseux::{revert_even, PuiseuxSeries};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `c₀ + c₁v + … + c_K v^K + O(v^{K+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    var: String,
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    pub fn new(var: impl Into<String>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument(
                "a truncated series needs at least the constant term".into(),
            ));
        }
        Ok(TruncatedSeries {
            var: var.into(),
            coeffs,
        })
    }

    /// Zero series of order `order`, with coefficients shaped like `like`.
    pub fn zero(var: impl Into<String>, like: &T, order: usize) -> Self {
        TruncatedSeries {
            var: var.into(),
            coeffs: vec![like.zero_like(); order + 1],
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        TruncatedSeries {
            var: self.var.clone(),
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.clone(), other.var.clone()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.coeffs[k].plus(&other.coeffs[k]))
            .collect();
        Ok(TruncatedSeries {
            var: self.var.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| self.coeffs[k].minus(&other.coeffs[k]))
            .collect();
        Ok(TruncatedSeries {
            var: self.var.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(|a| a.times(c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            var: self.var.clone(),
            coeffs: self.coeffs.iter().map(Scalar::negated).collect(),
        }
    }

    /// Adds `c` to the constant term.
    pub fn shift(&self, c: &T) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].plus(c);
        out
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let n = self.order().min(other.order());
        let coeffs = (0..=n)
            .map(|k| {
                let mut acc = self.coeffs[0].times(&other.coeffs[k]);
                for j in 1..=k {
                    acc = acc.plus(&self.coeffs[j].times(&other.coeffs[k - j]));
                }
                acc
            })
            .collect();
        Ok(TruncatedSeries {
            var: self.var.clone(),
            coeffs,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        if other.coeffs[0].is_zero() {
            return Err(Error::NonInvertibleConstant);
        }
        let n = self.order().min(other.order());
        let lead = &other.coeffs[0];
        let mut q: Vec<T> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc = acc.minus(&other.coeffs[j].times(&q[k - j]));
            }
            q.push(acc.over(lead));
        }
        Ok(TruncatedSeries {
            var: self.var.clone(),
            coeffs: q,
        })
    }

    /// Term-wise derivative; the order drops by one (an order-0 series
    /// differentiates to the order-0 zero series).
    pub fn differentiate(&self) -> Self {
        if self.order() == 0 {
            return TruncatedSeries::zero(self.var.clone(), &self.coeffs[0], 0);
        }
        let coeffs = (1..=self.order())
            .map(|k| self.coeffs[k].times_int(k as i64))
            .collect();
        TruncatedSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    /// Antiderivative with zero constant term; the order rises by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(self.coeffs[0].zero_like());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.over_int(k as i64 + 1)),
        );
        TruncatedSeries {
            var: self.var.clone(),
            coeffs,
        }
    }

    /// `self(inner(v))`, where `inner` has zero constant term. The result
    /// has the order of `inner`, capped so that no unknown coefficient of
    /// `self` could contribute.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument(
                "inner series of a composition must have zero constant term".into(),
            ));
        }
        let valuation = inner
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(inner.order() + 1);
        // Terms a_k inner^k with k > order(self) start at v^{k·valuation}.
        let cap = (self.order() + 1)
            .saturating_mul(valuation)
            .saturating_sub(1);
        let n = inner.order().min(cap);
        let inner = TruncatedSeries {
            var: inner.var.clone(),
            coeffs: inner.coeffs[..=n].to_vec(),
        };
        // Horner: (((a_K)·u + a_{K−1})·u + …) + a_0
        let mut acc = TruncatedSeries::zero(inner.var.clone(), &self.coeffs[0], n);
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(&inner)?;
            acc.coeffs[0] = acc.coeffs[0].plus(a);
        }
        Ok(acc)
    }

    /// Square root of a series whose constant term has a representable root.
    pub fn sqrt(&self) -> Result<Self> {
        let r0 = self.coeffs[0].sqrt().ok_or_else(|| {
            Error::InvalidArgument("constant term has no representable square root".into())
        })?;
        if r0.is_zero() {
            return Err(Error::NonInvertibleConstant);
        }
        let two_r0 = r0.times_int(2);
        let mut r = vec![r0];
        for n in 1..=self.order() {
            let mut acc = self.coeffs[n].clone();
            for i in 1..n {
                acc = acc.minus(&r[i].times(&r[n - i]));
            }
            r.push(acc.over(&two_r0));
        }
        Ok(TruncatedSeries {
            var: self.var.clone(),
            coeffs: r,
        })
    }

    /// Compositional inverse of a series with `a₀ = 0`, `a₁ ≠ 0`.
    pub fn revert(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Reversion("constant term must vanish".into()));
        }
        if self.order() < 1 || self.coeffs[1].is_zero() {
            return Err(Error::Reversion("linear coefficient must be nonzero".into()));
        }
        let n = self.order();
        let a1 = &self.coeffs[1];
        let zero = a1.zero_like();
        let mut inv = vec![zero.clone(), a1.int_like(1).over(a1)];
        inv.resize(n + 1, zero);
        // Fix one coefficient per pass: [u^k] self(inv(u)) must vanish for k ≥ 2.
        for k in 2..=n {
            let partial = TruncatedSeries {
                var: self.var.clone(),
                coeffs: inv[..=k].to_vec(),
            };
            let composed = self.truncate(k).compose(&partial)?;
            inv[k] = composed.coeffs[k].negated().over(a1);
        }
        Ok(TruncatedSeries {
            var: self.var.clone(),
            coeffs: inv,
        })
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = self.coeffs[self.order()].clone();
        for c in self.coeffs[..self.order()].iter().rev() {
            acc = acc.times(x).plus(c);
        }
        acc
    }
}

/// JSON record for a series (truncated series use `min_half_exponent = 0`
/// and integer steps; Puiseux series use half-integer steps).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub var: String,
    pub min_half_exponent: i64,
    pub coeffs: Vec<String>,
    pub precision_bits: Option<u32>,
}
