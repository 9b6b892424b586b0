use std::cmp::Ordering;

use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `Σ_{k=m}^{K} γ_k s^{k/2} + O(s^{(K+1)/2})`.
///
/// `min_half_exponent` is `m`; the stored leading coefficient is nonzero
/// unless the series is identically zero to its order, in which case no
/// coefficients are stored and `m = K + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxSeries<T> {
    var: String,
    min_half_exponent: i64,
    coeffs: Vec<T>,
}

impl<T: Scalar> PuiseuxSeries<T> {
    /// Builds `Σ coeffs[i] s^{(m+i)/2}`, stripping exact leading zeros.
    pub fn new(var: impl Into<String>, min_half_exponent: i64, coeffs: Vec<T>) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(coeffs.len());
        PuiseuxSeries {
            var: var.into(),
            min_half_exponent: min_half_exponent + lead as i64,
            coeffs: coeffs[lead..].to_vec(),
        }
    }

    /// Reads a truncated series in `σ = s^{1/2}` as a Puiseux series in `s`.
    pub fn from_sigma_series(var: impl Into<String>, series: &TruncatedSeries<T>) -> Self {
        PuiseuxSeries::new(var, 0, series.coeffs().to_vec())
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn min_half_exponent(&self) -> i64 {
        self.min_half_exponent
    }

    /// Highest half-exponent that is known.
    pub fn order(&self) -> i64 {
        self.min_half_exponent + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.first()
    }

    /// Coefficient of `s^{k/2}`: `None` beyond the known order, zero below
    /// the leading term.
    pub fn coeff(&self, k: i64) -> Option<T>
    where
        T: Clone,
    {
        if k > self.order() {
            return None;
        }
        if k < self.min_half_exponent {
            return self.coeffs.first().map(Scalar::zero_like);
        }
        Some(self.coeffs[(k - self.min_half_exponent) as usize].clone())
    }

    fn check_var(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch(self.var.clone(), other.var.clone()));
        }
        Ok(())
    }

    fn any_coeff(&self, other: &Self) -> Option<T> {
        self.coeffs.first().or(other.coeffs.first()).map(Scalar::zero_like)
    }

    fn zero_to(var: String, order: i64) -> Self {
        PuiseuxSeries {
            var,
            min_half_exponent: order + 1,
            coeffs: Vec::new(),
        }
    }

    fn combine(&self, other: &Self, negate_rhs: bool) -> Result<Self> {
        self.check_var(other)?;
        let order = self.order().min(other.order());
        let Some(zero) = self.any_coeff(other) else {
            return Ok(Self::zero_to(self.var.clone(), order));
        };
        let m = self.min_half_exponent.min(other.min_half_exponent);
        let coeffs = (m..=order)
            .map(|k| {
                let a = self.coeff(k).unwrap_or_else(|| zero.clone());
                let b = other.coeff(k).unwrap_or_else(|| zero.clone());
                if negate_rhs {
                    a.minus(&b)
                } else {
                    a.plus(&b)
                }
            })
            .collect();
        Ok(PuiseuxSeries::new(self.var.clone(), m, coeffs))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, true)
    }

    pub fn scale(&self, c: &T) -> Self {
        PuiseuxSeries::new(
            self.var.clone(),
            self.min_half_exponent,
            self.coeffs.iter().map(|a| a.times(c)).collect(),
        )
    }

    /// Drops the coefficient of `s^{k/2}` (sets it to zero) and renormalizes.
    /// Used when a coefficient is known analytically to vanish but carries
    /// rounding noise.
    pub fn with_zeroed(&self, k: i64) -> Self {
        let mut coeffs = self.coeffs.clone();
        if k >= self.min_half_exponent && k <= self.order() {
            let i = (k - self.min_half_exponent) as usize;
            coeffs[i] = coeffs[i].zero_like();
        }
        PuiseuxSeries::new(self.var.clone(), self.min_half_exponent, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        let m = self.min_half_exponent + other.min_half_exponent;
        if self.is_zero() || other.is_zero() {
            let order = (self.min_half_exponent + other.order())
                .min(other.min_half_exponent + self.order());
            return Ok(Self::zero_to(self.var.clone(), order));
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let mut acc = self.coeffs[0].times(&other.coeffs[k]);
                for j in 1..=k {
                    acc = acc.plus(&self.coeffs[j].times(&other.coeffs[k - j]));
                }
                acc
            })
            .collect();
        Ok(PuiseuxSeries::new(self.var.clone(), m, coeffs))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_var(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.min_half_exponent - other.min_half_exponent;
        if self.is_zero() {
            let order = self.order() - other.min_half_exponent;
            return Ok(Self::zero_to(self.var.clone(), order));
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let lead = &other.coeffs[0];
        let mut q: Vec<T> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..=k {
                acc = acc.minus(&other.coeffs[j].times(&q[k - j]));
            }
            q.push(acc.over(lead));
        }
        Ok(PuiseuxSeries::new(self.var.clone(), m, q))
    }
}

/// Inverts `ẑ(t₁+τ) = b₀ + b₂τ² + b₃τ³ + …` (with `b₁ ≈ 0`, `b₂ < 0`) for τ
/// as a Puiseux series in `s = b₀ − ẑ`.
///
/// Of the two branches, the one with `τ < 0` for small `s > 0` is returned:
/// `τ(s) = −s^{1/2}/√(−b₂) + …`. With `z` known to order `K`, τ is known to
/// `s^{(K−1)/2}`.
pub fn revert_even<T: Scalar>(z: &TruncatedSeries<T>, b1_tol: &T) -> Result<PuiseuxSeries<T>> {
    let k_max = z.order();
    if k_max < 3 {
        return Err(Error::Reversion(format!(
            "need the expansion to order >= 3, got {k_max}"
        )));
    }
    let b1 = z.coeff(1);
    if b1.abs() > *b1_tol {
        return Err(Error::Reversion(format!(
            "linear coefficient b1 = {:e} exceeds tolerance",
            b1.to_f64()
        )));
    }
    let b2 = z.coeff(2);
    if b2.signum() != Ordering::Less {
        return Err(Error::Reversion(format!(
            "quadratic coefficient b2 = {:e} must be negative",
            b2.to_f64()
        )));
    }
    let root = b2.negated().sqrt().ok_or_else(|| {
        Error::Reversion("√(−b2) is not representable in this coefficient field".into())
    })?;

    // −(ẑ − b₀) = τ²·(−b₂)·u(τ) with u = 1 + (b₃/b₂)τ + …, known to τ^{K−2}.
    let u: Vec<T> = (2..=k_max).map(|k| z.coeff(k).over(b2)).collect();
    let u = TruncatedSeries::new(z.var(), u)?;
    let r = u.sqrt()?;
    // φ(τ) = √(−b₂)·τ·√u(τ) satisfies φ² = s; φ < 0 on the τ < 0 branch.
    let mut phi = vec![b2.zero_like()];
    phi.extend(r.coeffs().iter().map(|c| c.times(&root)));
    let phi = TruncatedSeries::new(z.var(), phi)?;
    let psi = phi.revert()?;
    // τ = ψ(−σ), σ = s^{1/2}
    let tau: Vec<T> = psi
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| if n % 2 == 1 { c.negated() } else { c.clone() })
        .collect();
    Ok(PuiseuxSeries::new("s", 1, tau))
}

#[cfg(test)]
mod tests {
    use rug::{Float, Rational};

    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn half_power_product() {
        let a = PuiseuxSeries::new("s", -1, vec![q(1, 1), q(0, 1)]);
        let b = PuiseuxSeries::new("s", 1, vec![q(1, 1), q(0, 1)]);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.min_half_exponent(), 0);
        assert_eq!(p.coeff(0), Some(q(1, 1)));
    }

    #[test]
    fn monomial_division() {
        let (alpha, beta, gamma) = (q(3, 1), q(-2, 5), q(7, 2));
        let a = PuiseuxSeries::new("s", -1, vec![alpha.clone(), beta.clone()]);
        let b = PuiseuxSeries::new("s", 1, vec![gamma.clone(), q(0, 1)]);
        let r = a.div(&b).unwrap();
        assert_eq!(r.min_half_exponent(), -2);
        assert_eq!(r.coeff(-2), Some(Rational::from(&alpha / &gamma)));
        assert_eq!(r.coeff(-1), Some(Rational::from(&beta / &gamma)));
    }

    #[test]
    fn division_by_zero_series() {
        let a = PuiseuxSeries::new("s", 0, vec![q(1, 1)]);
        let z = PuiseuxSeries::new("s", 0, vec![q(0, 1), q(0, 1)]);
        assert!(z.is_zero());
        assert!(matches!(a.div(&z), Err(Error::DivisionByZero)));
    }

    #[test]
    fn leading_law_for_genus_one_quotient() {
        // N = −(c/16)s^{−1/2} + 1, D = −3c s^{1/2} + 2s ⇒ N/D = s^{−1}/48 + …
        let c = q(-5, 3);
        let n = PuiseuxSeries::new("s", -1, vec![&c * q(-1, 16), q(1, 1)]);
        let d = PuiseuxSeries::new("s", 1, vec![&c * q(-3, 1), q(2, 1)]);
        let r = n.div(&d).unwrap();
        assert_eq!(r.min_half_exponent(), -2);
        assert_eq!(r.coeff(-2), Some(q(1, 48)));
    }

    #[test]
    fn revert_pure_square() {
        // ẑ = x₀ − τ² ⇒ τ = −s^{1/2}
        let z = TruncatedSeries::new("tau", vec![q(2, 1), q(0, 1), q(-1, 1), q(0, 1), q(0, 1)])
            .unwrap();
        let tau = revert_even(&z, &q(0, 1)).unwrap();
        assert_eq!(tau.min_half_exponent(), 1);
        assert_eq!(tau.coeff(1), Some(q(-1, 1)));
        for k in 2..=tau.order() {
            assert_eq!(tau.coeff(k), Some(q(0, 1)));
        }
    }

    #[test]
    fn revert_with_cubic_term() {
        // ẑ − x₀ = −τ² + τ³ ⇒ τ = −s^{1/2} + s/2 + O(s^{3/2})
        let z = TruncatedSeries::new("tau", vec![q(0, 1), q(0, 1), q(-1, 1), q(1, 1)]).unwrap();
        let tau = revert_even(&z, &q(0, 1)).unwrap();
        assert_eq!(tau.coeff(1), Some(q(-1, 1)));
        assert_eq!(tau.coeff(2), Some(q(1, 2)));
    }

    #[test]
    fn revert_rejects_bad_input() {
        let pos = TruncatedSeries::new("tau", vec![q(0, 1), q(0, 1), q(1, 1), q(0, 1)]).unwrap();
        assert!(revert_even(&pos, &q(0, 1)).is_err());
        let slope = TruncatedSeries::new("tau", vec![q(0, 1), q(1, 100), q(-1, 1), q(0, 1)]).unwrap();
        assert!(revert_even(&slope, &q(1, 1000)).is_err());
        assert!(revert_even(&slope, &q(1, 10)).is_ok());
    }

    #[test]
    fn revert_float_composition_residual() {
        let prec = 256;
        let f = |v: f64| Float::with_val(prec, v);
        let z = TruncatedSeries::new(
            "tau",
            vec![f(2.5), f(0.0), f(-3.25), f(1.5), f(0.75), f(-2.0), f(0.125), f(4.0), f(1.0)],
        )
        .unwrap();
        let tau = revert_even(&z, &f(0.0)).unwrap();
        let mut sig = vec![f(0.0)];
        sig.extend(tau.coeffs().iter().cloned());
        let sig = TruncatedSeries::new("tau", sig).unwrap();
        let back = z.compose(&sig).unwrap();
        let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 16)));
        for (k, c) in back.coeffs().iter().enumerate() {
            let expect = match k {
                0 => f(2.5),
                2 => f(-1.0),
                _ => f(0.0),
            };
            assert!(Float::with_val(prec, c - &expect).abs() < tol, "k = {k}");
        }
    }
}
