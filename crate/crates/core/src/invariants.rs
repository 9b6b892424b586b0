//! Genus-0 and genus-1 invariants `n_{g,d}` of the projective plane.
//!
//! `n_{0,d}` is the number of rational degree-`d` curves through `3d−1`
//! general points divided by `(3d−1)!`. It obeys the quadratic recursion
//! with weights [`kontsevich_weight`]. `n_{1,d}` is defined by the genus-1
//! relation `(27 + 2F₀′ − 3F₀″)F₁′ = (F₀‴ − 3F₀″ + 2F₀′)/8` with
//! `F_g(z) = Σ n_{g,d} e^{dz}`, which in coefficients reads
//!
//! ```text
//! 27·d·n_{1,d} = d(d−1)(d−2)/8 · n_{0,d} + Σ_{j=1}^{d−1} j(3j−2) n_{0,j} (d−j) n_{1,d−j}
//! ```
//!
//! Tables hold exact rationals for small `d` and `P`-bit floats further out.
//! MPFR's exponent range covers `e^{−d·x₀}` for every practical `d`, so the
//! floats are stored directly; [`ScaledValue`] is the log-scale form used on
//! disk.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Genus {
    Zero,
    One,
}

impl Genus {
    pub fn index(self) -> u8 {
        match self {
            Genus::Zero => 0,
            Genus::One => 1,
        }
    }

    pub fn from_index(g: u8) -> Result<Genus> {
        match g {
            0 => Ok(Genus::Zero),
            1 => Ok(Genus::One),
            _ => Err(Error::InvalidArgument(format!("genus must be 0 or 1, got {g}"))),
        }
    }
}

/// A value `mantissa · e^{log_value}` with `mantissa ∈ [1, e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledValue {
    pub log_value: i64,
    pub mantissa: Float,
}

/// Extra bits carried by the mantissa so that `from_float ∘ to_float` is
/// the identity at the table precision.
pub(crate) const MANTISSA_GUARD_BITS: u32 = 64;

impl ScaledValue {
    /// Returns `None` for zero or non-positive values.
    pub fn from_float(v: &Float) -> Option<ScaledValue> {
        if v.cmp0() != Some(Ordering::Greater) {
            return None;
        }
        let prec = v.prec() + MANTISSA_GUARD_BITS;
        let ln = Float::with_val(prec, v.ln_ref());
        let k = ln.to_integer_round(rug::float::Round::Down)?.0.to_i64()?;
        let scale = Float::with_val(prec, -k).exp();
        Some(ScaledValue {
            log_value: k,
            mantissa: Float::with_val(prec, v * scale),
        })
    }

    pub fn to_float(&self, prec: u32) -> Float {
        let work = prec.max(self.mantissa.prec()) + 16;
        let scale = Float::with_val(work, self.log_value).exp();
        Float::with_val(prec, Float::with_val(work, &self.mantissa * scale))
    }
}

/// `n_{g,d}` for `d = 1..=dmax`: exact entries for `d ≤ exact_len`, float
/// entries for `d ≤ scaled_len`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTable {
    genus: Genus,
    exact: Vec<Rational>,
    scaled: Vec<Float>,
    precision_bits: u32,
}

impl InvariantTable {
    /// Table from arbitrary exact values (index 0 holds `d = 1`).
    pub fn from_exact(genus: Genus, values: Vec<Rational>) -> InvariantTable {
        InvariantTable {
            genus,
            exact: values,
            scaled: Vec::new(),
            precision_bits: 0,
        }
    }

    pub fn from_parts(
        genus: Genus,
        exact: Vec<Rational>,
        scaled: Vec<Float>,
        precision_bits: u32,
    ) -> InvariantTable {
        InvariantTable {
            genus,
            exact,
            scaled,
            precision_bits,
        }
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn dmax(&self) -> usize {
        self.exact.len().max(self.scaled.len())
    }

    pub fn exact_len(&self) -> usize {
        self.exact.len()
    }

    pub fn scaled_len(&self) -> usize {
        self.scaled.len()
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn exact(&self, d: usize) -> Option<&Rational> {
        d.checked_sub(1).and_then(|i| self.exact.get(i))
    }

    pub fn exact_values(&self) -> &[Rational] {
        &self.exact
    }

    pub fn scaled(&self, d: usize) -> Option<&Float> {
        d.checked_sub(1).and_then(|i| self.scaled.get(i))
    }

    pub fn scaled_values(&self) -> &[Float] {
        &self.scaled
    }

    pub fn scaled_entry(&self, d: usize) -> Option<ScaledValue> {
        self.scaled(d).and_then(ScaledValue::from_float)
    }

    /// Best available value at `prec` bits: the float entry if present,
    /// otherwise the rounded exact entry.
    pub fn value(&self, d: usize, prec: u32) -> Option<Float> {
        if let Some(v) = self.scaled(d) {
            return Some(Float::with_val(prec, v));
        }
        self.exact(d).map(|q| Float::with_val(prec, q))
    }

    /// Replaces the exact entry at `d` (test and tamper-detection support).
    pub fn set_exact(&mut self, d: usize, v: Rational) {
        self.exact[d - 1] = v;
    }

    pub fn set_scaled(&mut self, d: usize, v: Float) {
        self.scaled[d - 1] = v;
    }

    /// Distance of a float entry from the exact one in units in the last
    /// place of the table precision; `None` unless both entries exist.
    pub fn scaled_error_ulps(&self, d: usize) -> Option<f64> {
        let (exact, v) = (self.exact(d)?, self.scaled(d)?);
        let work = v.prec().max(self.precision_bits) + 16;
        let diff = Float::with_val(work, v - exact).abs();
        if exact.cmp0() == Ordering::Equal {
            return Some(if diff.is_zero() { 0.0 } else { f64::INFINITY });
        }
        let e = Float::with_val(self.precision_bits, exact).get_exp().expect("nonzero");
        let ulp = Float::with_val(work, Float::i_exp(1, e - self.precision_bits as i32));
        Some((diff / ulp).to_f64())
    }

    /// First `d` whose float entry is more than `max_ulps` units in the last
    /// place from the exact entry, with that distance.
    pub fn scaled_exact_mismatch(&self, max_ulps: f64) -> Option<(usize, f64)> {
        (1..=self.exact_len().min(self.scaled_len()))
            .map(|d| (d, self.scaled_error_ulps(d).expect("both present")))
            .find(|&(_, u)| u > max_ulps)
    }

    /// Copy restricted to `d ≤ dmax`.
    pub fn truncated(&self, dmax: usize) -> InvariantTable {
        InvariantTable {
            genus: self.genus,
            exact: self.exact.iter().take(dmax).cloned().collect(),
            scaled: self.scaled.iter().take(dmax).cloned().collect(),
            precision_bits: self.precision_bits,
        }
    }
}

fn check_degrees(d1: u64, d2: u64) -> Result<()> {
    if d1 == 0 || d2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "degrees must be positive, got ({d1}, {d2})"
        )));
    }
    Ok(())
}

/// Integer numerator `d₁d₂(3d₁d₂(d+2) − 2d²)` of the weight (with `d = d₁+d₂`).
fn weight_numerator(d1: u64, d2: u64) -> i128 {
    let (a, b) = (d1 as i128, d2 as i128);
    let d = a + b;
    a * b * (3 * a * b * (d + 2) - 2 * d * d)
}

/// Denominator `2(3d−3)(3d−2)(3d−1)` of the weight.
fn weight_denominator(d: u64) -> i128 {
    let d = d as i128;
    2 * (3 * d - 3) * (3 * d - 2) * (3 * d - 1)
}

/// `T(d₁, d₂) = d₁d₂(3d₁d₂(d+2) − 2d²) / (2(3d−3)(3d−2)(3d−1))`, `d = d₁+d₂`.
pub fn kontsevich_weight(d1: u64, d2: u64) -> Result<Rational> {
    check_degrees(d1, d2)?;
    let num = Integer::from(weight_numerator(d1, d2));
    let den = Integer::from(weight_denominator(d1 + d2));
    Ok(Rational::from((num, den)))
}

/// Exact genus-0 table for `d = 1..=dmax`.
pub fn genus0_table(dmax: usize) -> Result<InvariantTable> {
    if dmax == 0 {
        return Err(Error::InvalidArgument("dmax must be at least 1".into()));
    }
    let mut n: Vec<Rational> = Vec::with_capacity(dmax);
    n.push(Rational::from((1, 2)));
    for d in 2..=dmax {
        // Common denominator per d: accumulate Σ w(j, d−j) n_j n_{d−j} once.
        let mut acc = Rational::new();
        for j in 1..=d / 2 {
            let k = d - j;
            let mut term = Rational::from(&n[j - 1] * &n[k - 1]);
            let w = weight_numerator(j as u64, k as u64) * if j == k { 1 } else { 2 };
            term *= Integer::from(w);
            acc += term;
        }
        acc /= Integer::from(weight_denominator(d as u64));
        n.push(acc);
    }
    Ok(InvariantTable::from_exact(Genus::Zero, n))
}

/// Exact genus-1 table for `d = 1..=dmax` from an exact genus-0 table.
pub fn genus1_table(dmax: usize, g0: &InvariantTable) -> Result<InvariantTable> {
    if g0.genus() != Genus::Zero {
        return Err(Error::InvalidArgument("genus-1 recursion needs a genus-0 table".into()));
    }
    if g0.exact_len() < dmax {
        return Err(Error::TableTooShort {
            requested: dmax,
            available: g0.exact_len(),
        });
    }
    let n0 = g0.exact_values();
    // j(3j−2)·n_{0,j}, the coefficients of 3F₀″ − 2F₀′
    let p: Vec<Rational> = (1..=dmax)
        .map(|j| Rational::from(&n0[j - 1] * Integer::from(j * (3 * j - 2))))
        .collect();
    let mut n1: Vec<Rational> = Vec::with_capacity(dmax);
    for d in 1..=dmax {
        let cubic = Integer::from(d * (d.saturating_sub(1)) * (d.saturating_sub(2)));
        let mut acc = Rational::from(&n0[d - 1] * cubic) / 8u32;
        for j in 1..d {
            let k = d - j;
            acc += Rational::from(&p[j - 1] * &n1[k - 1]) * Integer::from(k);
        }
        acc /= Integer::from(27 * d);
        n1.push(acc);
    }
    Ok(InvariantTable::from_exact(Genus::One, n1))
}

/// Extra bits carried by float table entries beyond the table precision.
/// Rounding in the recursion grows to ~10² units in the last place by
/// `d = 200`; sixteen guard bits keep entries within one unit of the table
/// precision.
pub const SCALED_GUARD_BITS: u32 = 16;

/// Precision at which float entries of a `prec`-bit table are computed
/// and stored.
pub fn scaled_working_precision(prec: u32) -> u32 {
    prec + SCALED_GUARD_BITS
}

/// Extends genus-0 float values `prefix` (for `d = 1..=prefix.len()`) up to
/// `dmax` for a `prec`-bit table; entries carry
/// [`scaled_working_precision`] bits. Summation order is fixed, so results
/// are reproducible bit for bit.
pub fn extend_genus0_scaled(prefix: Vec<Float>, dmax: usize, prec: u32) -> Vec<Float> {
    let prec = scaled_working_precision(prec);
    let mut n = prefix;
    if n.is_empty() && dmax >= 1 {
        n.push(Float::with_val(prec, 0.5));
    }
    let mut term = Float::new(prec);
    let mut w = Float::new(prec);
    for d in n.len() + 1..=dmax {
        let mut acc = Float::new(prec);
        for j in 1..=d / 2 {
            let k = d - j;
            let mult = if j == k { 1 } else { 2 };
            w.assign_i128(weight_numerator(j as u64, k as u64) * mult);
            term.assign_prod(&n[j - 1], &n[k - 1]);
            term *= &w;
            acc += &term;
        }
        acc /= Float::with_val(prec, weight_denominator(d as u64));
        n.push(acc);
    }
    n
}

/// Extends genus-1 float values up to `dmax` from genus-0 floats, with the
/// same precision convention as [`extend_genus0_scaled`].
pub fn extend_genus1_scaled(
    prefix: Vec<Float>,
    g0: &[Float],
    dmax: usize,
    prec: u32,
) -> Result<Vec<Float>> {
    let prec = scaled_working_precision(prec);
    if g0.len() < dmax {
        return Err(Error::TableTooShort {
            requested: dmax,
            available: g0.len(),
        });
    }
    let p: Vec<Float> = (1..=dmax)
        .map(|j| Float::with_val(prec, &g0[j - 1] * (j * (3 * j - 2)) as u64))
        .collect();
    let mut n1 = prefix;
    let mut term = Float::new(prec);
    for d in n1.len() + 1..=dmax {
        let cubic = (d * d.saturating_sub(1) * d.saturating_sub(2)) as u64;
        let mut acc = Float::with_val(prec, &g0[d - 1] * cubic);
        acc /= 8u32;
        for j in 1..d {
            let k = d - j;
            term.assign_prod(&p[j - 1], &n1[k - 1]);
            term *= k as u64;
            acc += &term;
        }
        acc /= (27 * d) as u64;
        n1.push(acc);
    }
    Ok(n1)
}

trait AssignExt {
    fn assign_i128(&mut self, v: i128);
    fn assign_prod(&mut self, a: &Float, b: &Float);
}

impl AssignExt for Float {
    fn assign_i128(&mut self, v: i128) {
        rug::Assign::assign(self, v);
    }
    fn assign_prod(&mut self, a: &Float, b: &Float) {
        rug::Assign::assign(self, a * b);
    }
}

/// Genus-0 table with exact entries to `d_exact` and `prec`-bit entries to
/// `d_float`.
pub fn genus0_full(d_exact: usize, d_float: usize, prec: u32) -> Result<InvariantTable> {
    let exact = genus0_table(d_exact.max(1))?;
    let scaled = extend_genus0_scaled(Vec::new(), d_float, prec);
    Ok(InvariantTable::from_parts(
        Genus::Zero,
        exact.exact,
        scaled,
        prec,
    ))
}

/// Genus-1 companion of [`genus0_full`].
pub fn genus1_full(g0: &InvariantTable, d_exact: usize, d_float: usize) -> Result<InvariantTable> {
    let exact = genus1_table(d_exact.max(1), g0)?;
    let scaled = extend_genus1_scaled(
        Vec::new(),
        g0.scaled_values(),
        d_float,
        g0.precision_bits().max(2),
    )?;
    Ok(InvariantTable::from_parts(
        Genus::One,
        exact.exact,
        scaled,
        g0.precision_bits(),
    ))
}

/// Coefficients of `q¹..q^order` in
/// `(27 + 2F′ − 3F″)F‴ − (6F − 33F′ + 54F″ + F″²)`, `F = Σ n_d q^d`,
/// where `′` is `q·d/dq` (differentiation in `z`, `q = e^z`).
#[derive(Clone, Debug, PartialEq)]
pub struct WdvvResidual {
    pub coeffs: Vec<Rational>,
}

impl WdvvResidual {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.cmp0() == Ordering::Equal)
    }

    /// Smallest `d` with a nonzero coefficient of `q^d`.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| c.cmp0() != Ordering::Equal)
            .map(|i| i + 1)
    }
}

pub fn verify_wdvv_series(g0: &InvariantTable, order: usize) -> Result<WdvvResidual> {
    if order > g0.exact_len() {
        return Err(Error::TableTooShort {
            requested: order,
            available: g0.exact_len(),
        });
    }
    let theta = |j: u32| -> Result<TruncatedSeries<Rational>> {
        let mut c = vec![Rational::new()];
        c.extend((1..=order).map(|d| {
            Rational::from(g0.exact(d).expect("checked above") * Integer::from(d).pow(j))
        }));
        TruncatedSeries::new("q", c)
    };
    let (f, f1, f2, f3) = (theta(0)?, theta(1)?, theta(2)?, theta(3)?);
    let r = |v: i64| Rational::from(v);
    let lhs = f1
        .scale(&r(2))
        .sub(&f2.scale(&r(3)))?
        .shift(&r(27))
        .mul(&f3)?;
    let rhs = f
        .scale(&r(6))
        .sub(&f1.scale(&r(33)))?
        .add(&f2.scale(&r(54)))?
        .add(&f2.mul(&f2)?)?;
    let res = lhs.sub(&rhs)?;
    Ok(WdvvResidual {
        coeffs: res.into_coeffs().into_iter().skip(1).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoundViolation {
    pub d: usize,
    pub side: BoundSide,
}

/// Checks `(1/27)^d d^{−7/2} ≤ n_{0,d} ≤ 3(4/15)^d d^{−7/2}` for every entry.
///
/// Exact entries are compared as `(n·27^d)²·d⁷ ≥ 1` and
/// `(n·(15/4)^d)²·d⁷ ≤ 9`. Float-only entries are compared in log form and
/// flagged only when the violation exceeds the rounding margin.
pub fn verify_bounds(g0: &InvariantTable) -> Vec<BoundViolation> {
    let mut out = Vec::new();
    for d in 1..=g0.dmax() {
        let (lower_ok, upper_ok) = match g0.exact(d) {
            Some(n) => bounds_exact(n, d),
            None => match g0.scaled(d) {
                Some(v) => bounds_float(v, d),
                None => continue,
            },
        };
        if !lower_ok {
            out.push(BoundViolation {
                d,
                side: BoundSide::Lower,
            });
        }
        if !upper_ok {
            out.push(BoundViolation {
                d,
                side: BoundSide::Upper,
            });
        }
    }
    out
}

fn bounds_exact(n: &Rational, d: usize) -> (bool, bool) {
    if n.cmp0() != Ordering::Greater {
        return (false, true);
    }
    let dd = u32::try_from(d).expect("degree fits in u32");
    let d7 = Integer::from(d).pow(7);
    let low = Rational::from(n * Integer::from(27).pow(dd));
    let low = Rational::from(low.square_ref()) * &d7;
    let up = n * Rational::from((15, 4)).pow(dd);
    let up = Rational::from(up.square_ref()) * &d7;
    (low >= 1, up <= 9)
}

fn bounds_float(v: &Float, d: usize) -> (bool, bool) {
    if v.cmp0() != Some(Ordering::Greater) {
        return (false, true);
    }
    let prec = v.prec();
    let ln_n = Float::with_val(prec, v.ln_ref());
    let ln_d = Float::with_val(prec, d).ln();
    let df = Float::with_val(prec, d);
    let ln27 = Float::with_val(prec, 27).ln();
    let ln_ratio = Float::with_val(prec, 15).ln() - Float::with_val(prec, 4).ln();
    let ln3 = Float::with_val(prec, 3).ln();
    // log-margins; both are exact-zero only on the boundary itself
    let low = Float::with_val(prec, &ln_n + &df * &ln27) + Float::with_val(prec, &ln_d * 3.5f64);
    let up = Float::with_val(prec, &ln3 - &ln_n) - Float::with_val(prec, &df * &ln_ratio)
        - Float::with_val(prec, &ln_d * 3.5f64);
    let slack = Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2)) * (d as f64 * 8.0);
    (low >= -slack.clone(), up >= -slack)
}

/// Weight function and seed for a comparison sequence
/// `n_d = Σ_{j=1}^{d−1} f(j)f(d−j)/f(d) · n_j n_{d−j}`.
#[derive(Clone)]
pub struct ComparisonSpec {
    pub name: &'static str,
    pub weight: fn(u64) -> Rational,
    pub seed: Rational,
}

impl ComparisonSpec {
    pub fn unit(seed: Rational) -> ComparisonSpec {
        ComparisonSpec {
            name: "unit",
            weight: |_| Rational::from(1),
            seed,
        }
    }

    /// `f₁(d) = d(3d−2)/54`
    pub fn lower(seed: Rational) -> ComparisonSpec {
        ComparisonSpec {
            name: "f1",
            weight: |d| Rational::from((Integer::from(d * (3 * d - 2)), Integer::from(54))),
            seed,
        }
    }

    /// `f₂(d) = 2d²/15`
    pub fn upper(seed: Rational) -> ComparisonSpec {
        ComparisonSpec {
            name: "f2",
            weight: |d| Rational::from((Integer::from(2 * d * d), Integer::from(15))),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonTable {
    /// `n_d`, index 0 holds `d = 1`.
    pub values: Vec<Rational>,
    /// `m_d = f(d)·n_d` from the recursion.
    pub linearized: Vec<Rational>,
}

/// `(2d−2)! / (d!(d−1)!)`, the Catalan number `C_{d−1}`.
pub fn catalan(n: u32) -> Integer {
    Integer::from(Integer::binomial_u(2 * n, n)) / (n + 1)
}

pub fn comparison_sequence(spec: &ComparisonSpec, dmax: usize) -> Result<ComparisonTable> {
    if spec.seed.cmp0() != Ordering::Greater {
        return Err(Error::InvalidArgument("comparison seed must be positive".into()));
    }
    if dmax == 0 {
        return Err(Error::InvalidArgument("dmax must be at least 1".into()));
    }
    let f: Vec<Rational> = (1..=dmax as u64).map(spec.weight).collect();
    if let Some(d) = f.iter().position(|v| v.cmp0() != Ordering::Greater) {
        return Err(Error::InvalidArgument(format!(
            "weight f({}) must be positive",
            d + 1
        )));
    }
    let mut n = vec![spec.seed.clone()];
    for d in 2..=dmax {
        let mut acc = Rational::new();
        for j in 1..d {
            let k = d - j;
            let w = Rational::from(&f[j - 1] * &f[k - 1]) / &f[d - 1];
            acc += w * Rational::from(&n[j - 1] * &n[k - 1]);
        }
        n.push(acc);
    }
    let linearized: Vec<Rational> = n.iter().zip(&f).map(|(a, b)| Rational::from(a * b)).collect();
    let m1 = &linearized[0];
    for (i, m) in linearized.iter().enumerate() {
        let d = i as u32 + 1;
        let closed = Rational::from(m1.pow(d)) * catalan(d - 1);
        if *m != closed {
            return Err(Error::InvalidArgument(format!(
                "Catalan closed form disagrees with the recursion at d = {d}"
            )));
        }
    }
    Ok(ComparisonTable {
        values: n,
        linearized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn weight_values() {
        assert_eq!(kontsevich_weight(1, 1).unwrap(), q(1, 30));
        assert_eq!(kontsevich_weight(1, 2).unwrap(), q(1, 28));
        assert!(kontsevich_weight(0, 3).is_err());
        assert!(kontsevich_weight(2, 0).is_err());
    }

    #[test]
    fn weight_symmetry() {
        for a in 1..=50 {
            for b in 1..=50 {
                assert_eq!(kontsevich_weight(a, b).unwrap(), kontsevich_weight(b, a).unwrap());
            }
        }
    }

    #[test]
    fn small_genus0_values() {
        assert_eq!(genus0_table(1).unwrap().exact_values(), &[q(1, 2)]);
        let t = genus0_table(3).unwrap();
        assert_eq!(t.exact(2), Some(&q(1, 120)));
        assert_eq!(t.exact(3), Some(&q(1, 3360)));
        assert!(genus0_table(0).is_err());
    }

    #[test]
    fn float_entries_within_two_ulps() {
        for prec in [64, 128, 256] {
            let g0 = genus0_full(200, 200, prec).unwrap();
            let g1 = genus1_full(&g0, 200, 200).unwrap();
            assert_eq!(g0.scaled_exact_mismatch(2.0), None, "genus 0 at {prec} bits");
            assert_eq!(g1.scaled_exact_mismatch(2.0), None, "genus 1 at {prec} bits");
        }
    }

    #[test]
    fn genus0_counts_are_classical() {
        // N_d = n_{0,d}·(3d−1)!: 1, 1, 12, 620, 87304, 26312976
        let t = genus0_table(6).unwrap();
        let expected = [1u64, 1, 12, 620, 87304, 26312976];
        for (d, n) in expected.iter().enumerate() {
            let d = d + 1;
            let fact = Integer::from(Integer::factorial(3 * d as u32 - 1));
            let count = Rational::from(t.exact(d).unwrap() * fact);
            assert_eq!(count, Rational::from(*n), "d = {d}");
        }
    }

    #[test]
    fn small_genus1_values() {
        let g0 = genus0_table(3).unwrap();
        let g1 = genus1_table(3, &g0).unwrap();
        assert_eq!(g1.exact(1), Some(&q(0, 1)));
        assert_eq!(g1.exact(2), Some(&q(0, 1)));
        assert_eq!(g1.exact(3), Some(&q(1, 362880)));
        assert!(genus1_table(4, &g0).is_err());
    }

    #[test]
    fn genus1_counts_are_classical() {
        // elliptic plane curves through 3d points: 0, 0, 1, 225, 87192
        let g0 = genus0_table(5).unwrap();
        let g1 = genus1_table(5, &g0).unwrap();
        let expected = [0u64, 0, 1, 225, 87192];
        for (d, n) in expected.iter().enumerate() {
            let d = d + 1;
            let fact = Integer::from(Integer::factorial(3 * d as u32));
            let count = Rational::from(g1.exact(d).unwrap() * fact);
            assert_eq!(count, Rational::from(*n), "d = {d}");
        }
    }

    #[test]
    fn wdvv_residual_vanishes() {
        let t = genus0_table(10).unwrap();
        assert!(verify_wdvv_series(&t, 10).unwrap().is_zero());
    }

    #[test]
    fn wdvv_detects_perturbation() {
        let mut t = genus0_table(10).unwrap();
        let bumped = Rational::from(t.exact(3).unwrap() + 1u32);
        t.set_exact(3, bumped);
        assert_eq!(verify_wdvv_series(&t, 10).unwrap().first_nonzero(), Some(3));
    }

    #[test]
    fn wdvv_zero_table() {
        let t = InvariantTable::from_exact(Genus::Zero, vec![Rational::new(); 8]);
        assert!(verify_wdvv_series(&t, 8).unwrap().is_zero());
    }

    #[test]
    fn bounds_small_degrees() {
        assert!(verify_bounds(&genus0_table(30).unwrap()).is_empty());
        let (lo, up) = bounds_exact(&q(1, 2), 1);
        assert!(lo && up);
    }

    #[test]
    fn bounds_report_scaled_entry() {
        let mut t = genus0_table(12).unwrap();
        let big = Rational::from(t.exact(7).unwrap() * 1_000_000u32);
        t.set_exact(7, big);
        assert_eq!(
            verify_bounds(&t),
            vec![BoundViolation {
                d: 7,
                side: BoundSide::Upper
            }]
        );
    }

    #[test]
    fn bounds_float_entries() {
        let prec = 256;
        let t = genus0_full(1, 400, prec).unwrap();
        assert!(verify_bounds(&t).is_empty());
        let mut bad = t.clone();
        // the bounds have ~200 nats of slack at d = 300
        let factor = Float::with_val(prec, 250).exp();
        let v = Float::with_val(prec, bad.scaled(300).unwrap() * factor);
        bad.set_scaled(300, v);
        assert_eq!(verify_bounds(&bad).len(), 1);
    }

    #[test]
    fn catalan_comparison() {
        let t = comparison_sequence(&ComparisonSpec::unit(q(1, 1)), 5).unwrap();
        assert_eq!(t.values, vec![q(1, 1), q(1, 1), q(2, 1), q(5, 1), q(14, 1)]);
        assert!(comparison_sequence(&ComparisonSpec::unit(q(0, 1)), 5).is_err());
        assert!(comparison_sequence(&ComparisonSpec::unit(q(-1, 2)), 5).is_err());
    }

    #[test]
    fn lower_comparison_second_term() {
        let t = comparison_sequence(&ComparisonSpec::lower(q(1, 2)), 2).unwrap();
        assert_eq!(t.values[1], q(27, 4 * 54 * 54 * 4));
    }

    #[test]
    fn closed_form_for_all_specs() {
        for spec in [
            ComparisonSpec::unit(q(3, 7)),
            ComparisonSpec::lower(q(1, 2)),
            ComparisonSpec::upper(q(1, 2)),
            ComparisonSpec::upper(q(1, 1)),
        ] {
            assert!(comparison_sequence(&spec, 12).is_ok(), "{}", spec.name);
        }
    }

    #[test]
    fn sandwich_with_matching_seed() {
        let n0 = genus0_table(40).unwrap();
        let lo = comparison_sequence(&ComparisonSpec::lower(q(1, 2)), 40).unwrap();
        let hi = comparison_sequence(&ComparisonSpec::upper(q(1, 2)), 40).unwrap();
        for d in 1..=40 {
            let n = n0.exact(d).unwrap();
            assert!(&lo.values[d - 1] <= n && n <= &hi.values[d - 1], "d = {d}");
        }
    }

    #[test]
    fn scaled_value_roundtrip() {
        let prec = 256;
        let g = genus0_full(1, 300, prec).unwrap();
        for d in [1, 2, 17, 299] {
            let v = g.scaled(d).unwrap();
            let s = ScaledValue::from_float(v).unwrap();
            assert_eq!(&s.to_float(v.prec()), v, "d = {d}");
            assert!(s.mantissa >= 1 && s.mantissa < std::f64::consts::E);
        }
        assert!(ScaledValue::from_float(&Float::new(prec)).is_none());
    }

    #[test]
    fn float_table_matches_exact() {
        let prec = 256;
        let exact = genus0_table(200).unwrap();
        let g0 = genus0_full(200, 200, prec).unwrap();
        let g1x = genus1_table(200, &exact).unwrap();
        let g1 = genus1_full(&g0, 200, 200).unwrap();
        let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 8)));
        for d in 1..=200 {
            let e = Float::with_val(prec, exact.exact(d).unwrap());
            let rel = Float::with_val(prec, g0.scaled(d).unwrap() - &e).abs() / &e;
            assert!(rel <= tol, "genus 0, d = {d}: {rel:e}");
            if d >= 3 {
                let e = Float::with_val(prec, g1x.exact(d).unwrap());
                let rel = Float::with_val(prec, g1.scaled(d).unwrap() - &e).abs() / &e;
                assert!(rel <= tol, "genus 1, d = {d}: {rel:e}");
            }
        }
    }
}
