use std::cmp::Ordering;

use rug::Float;

use crate::error::{Error, Result};
use crate::invariants::InvariantTable;

/// A complex number as a pair of MPFR floats.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Float,
    pub im: Float,
}

impl Complex {
    pub fn real(re: Float) -> Complex {
        let im = Float::new(re.prec());
        Complex { re, im }
    }

    pub fn new(re: Float, im: Float) -> Complex {
        Complex { re, im }
    }

    pub fn abs(&self) -> Float {
        let prec = self.re.prec();
        Float::with_val(prec, self.re.hypot_ref(&self.im))
    }

    pub fn dist(&self, other: &Complex) -> Float {
        let prec = self.re.prec();
        let dr = Float::with_val(prec, &self.re - &other.re);
        let di = Float::with_val(prec, &self.im - &other.im);
        dr.hypot(&di)
    }
}

/// How truncation tails are bounded when summing `Σ p(d) n_{0,d} e^{dz}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailPolicy {
    /// Evaluation is refused for `Re z ≥ x̂₀ − margin`.
    pub margin: f64,
    /// Number of trailing term ratios used for the empirical tail.
    pub ratio_window: usize,
    pub safety_factor: f64,
    /// Empirical tails with a larger ratio are a hard failure.
    pub max_ratio: f64,
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy {
            margin: 0.05,
            ratio_window: 10,
            safety_factor: 10.0,
            max_ratio: 0.99,
        }
    }
}

/// Polynomial weight `p(d) = Σ c_i d^i` (degree ≤ 3).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Weight([i64; 4]);

impl Weight {
    fn derivative(j: u32) -> Weight {
        let mut c = [0; 4];
        c[j as usize] = 1;
        Weight(c)
    }

    fn at(&self, d: usize) -> i64 {
        let d = d as i64;
        self.0.iter().rev().fold(0, |acc, &c| acc * d + c)
    }

    fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0).unwrap_or(0)
    }

    fn abs_sum(&self) -> f64 {
        self.0.iter().map(|c| c.unsigned_abs() as f64).sum()
    }
}

/// Evaluates `F₀(z) = Σ n_{0,d} e^{dz}`, its `z`-derivatives, and the
/// flow coordinates `x, y, w` from a genus-0 table, with a truncation
/// point chosen to honor an absolute-error budget.
#[derive(Clone, Debug)]
pub struct SeriesEvaluator<'a> {
    table: &'a InvariantTable,
    prec: u32,
    policy: TailPolicy,
    x0_hint: Option<f64>,
}

impl<'a> SeriesEvaluator<'a> {
    pub fn new(table: &'a InvariantTable, prec: u32) -> SeriesEvaluator<'a> {
        SeriesEvaluator {
            table,
            prec,
            policy: TailPolicy::default(),
            x0_hint: None,
        }
    }

    pub fn with_policy(mut self, policy: TailPolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Current best estimate of `x₀`; evaluations closer than the policy
    /// margin are refused.
    pub fn with_x0_hint(mut self, x0: f64) -> Self {
        self.x0_hint = Some(x0);
        self
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// `F₀^{(j)}(z)` for `j ≤ 3`.
    pub fn eval_f0(&self, z: &Complex, deriv: u32, abs_err: f64) -> Result<Complex> {
        if deriv > 3 {
            return Err(Error::InvalidArgument(format!(
                "derivative order {deriv} exceeds 3"
            )));
        }
        self.eval_weighted(z, Weight::derivative(deriv), abs_err)
    }

    pub fn eval_f0_real(&self, z: &Float, deriv: u32, abs_err: f64) -> Result<Float> {
        Ok(self.eval_f0(&Complex::real(z.clone()), deriv, abs_err)?.re)
    }

    /// `x(z) = Σ (3d−1)(3d−2) n_{0,d} e^{dz}`.
    pub fn eval_x(&self, z: &Float, abs_err: f64) -> Result<Float> {
        Ok(self
            .eval_weighted(&Complex::real(z.clone()), Weight([2, -9, 9, 0]), abs_err)?
            .re)
    }

    /// `y(z) = Σ d(3d−1) n_{0,d} e^{dz}`.
    pub fn eval_y(&self, z: &Float, abs_err: f64) -> Result<Float> {
        Ok(self
            .eval_weighted(&Complex::real(z.clone()), Weight([0, -1, 3, 0]), abs_err)?
            .re)
    }

    /// `w(z) = Σ d² n_{0,d} e^{dz}`.
    pub fn eval_w(&self, z: &Float, abs_err: f64) -> Result<Float> {
        Ok(self
            .eval_weighted(&Complex::real(z.clone()), Weight([0, 0, 1, 0]), abs_err)?
            .re)
    }

    /// Number of terms needed for `abs_err` at real part `re_z`.
    fn truncation_point(&self, re_z: f64, weight: Weight, abs_err: f64) -> Result<usize> {
        let fail = |reason: String| Error::TailAccuracy {
            re_z,
            abs_err,
            reason,
        };
        if abs_err.partial_cmp(&0.0) != Some(Ordering::Greater) {
            return Err(fail("error budget must be positive".into()));
        }
        if let Some(x0) = self.x0_hint {
            if re_z >= x0 - self.policy.margin {
                return Err(fail(format!(
                    "too close to the singularity (x0 ≈ {x0}, margin {})",
                    self.policy.margin
                )));
            }
        }
        let dmax = self.table.dmax();
        let log_budget = abs_err.ln();
        let rho = 4.0 * re_z.exp() / 15.0;
        if rho < 1.0 {
            // |p(d) n_d e^{dz}| ≤ C d^{deg} · 3(4/15)^d d^{−7/2} e^{d·Re z}
            let c = weight.abs_sum() * 3.0;
            let deg = weight.degree() as f64;
            let log_rho = rho.ln();
            let log_geo = -(1.0 - rho).ln();
            for big_d in 0..=dmax {
                let next = (big_d + 1) as f64;
                let log_tail = c.ln() + (deg - 3.5) * next.ln() + next * log_rho + log_geo;
                if log_tail <= log_budget {
                    return Ok(big_d.max(1));
                }
            }
            return Err(fail(format!("table of {dmax} terms is too short")));
        }
        // Empirical tail: geometric extrapolation from trailing term ratios.
        let window = self.policy.ratio_window;
        let mut log_terms: Vec<f64> = Vec::with_capacity(dmax);
        let mut worst_ratio = 0.0f64;
        for d in 1..=dmax {
            let n = self
                .table
                .value(d, 64)
                .ok_or_else(|| fail(format!("missing entry d = {d}")))?;
            let p = weight.at(d).unsigned_abs() as f64;
            let log_t = if p == 0.0 || n.is_zero() {
                f64::NEG_INFINITY
            } else {
                n.ln().to_f64() + p.ln() + d as f64 * re_z
            };
            log_terms.push(log_t);
            if d <= window + 1 {
                continue;
            }
            let ratio = (d - window..d)
                .map(|i| (log_terms[i] - log_terms[i - 1]).exp())
                .fold(0.0f64, f64::max);
            worst_ratio = ratio;
            if ratio > self.policy.max_ratio {
                continue;
            }
            let log_tail = self.policy.safety_factor.ln() + log_t + ratio.ln() - (1.0 - ratio).ln();
            if log_tail <= log_budget {
                return Ok(d);
            }
        }
        Err(fail(format!(
            "tail not resolved within {dmax} terms (last term ratio {worst_ratio:.4})"
        )))
    }

    fn eval_weighted(&self, z: &Complex, weight: Weight, abs_err: f64) -> Result<Complex> {
        let re_z = z.re.to_f64();
        let big_d = self.truncation_point(re_z, weight, abs_err)?;
        let work = self.prec + 32;
        // e^{z} = e^{Re z}(cos Im z + i sin Im z), powers by repeated product
        let mag = Float::with_val(work, z.re.exp_ref());
        let (s, c) = Float::with_val(work, &z.im).sin_cos(Float::new(work));
        let step = (Float::with_val(work, &mag * &c), Float::with_val(work, &mag * &s));
        let mut pw = step.clone();
        let mut re = Float::new(work);
        let mut im = Float::new(work);
        let mut tmp = Float::new(work);
        for d in 1..=big_d {
            if d > 1 {
                let a = Float::with_val(work, &pw.0 * &step.0) - Float::with_val(work, &pw.1 * &step.1);
                let b = Float::with_val(work, &pw.0 * &step.1) + Float::with_val(work, &pw.1 * &step.0);
                pw = (a, b);
            }
            let p = weight.at(d);
            if p == 0 {
                continue;
            }
            let n = self.table.value(d, work).ok_or(Error::TableTooShort {
                requested: d,
                available: self.table.dmax(),
            })?;
            let coef = n * p;
            rug::Assign::assign(&mut tmp, &coef * &pw.0);
            re += &tmp;
            rug::Assign::assign(&mut tmp, &coef * &pw.1);
            im += &tmp;
        }
        Ok(Complex {
            re: Float::with_val(self.prec, re),
            im: Float::with_val(self.prec, im),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::genus0_full;

    fn table() -> InvariantTable {
        genus0_full(50, 3000, 256).unwrap()
    }

    #[test]
    fn deep_left_is_dominated_by_first_term() {
        let t = table();
        let ev = SeriesEvaluator::new(&t, 256);
        let z = Float::with_val(256, -50);
        let v = ev.eval_f0_real(&z, 0, 1e-30).unwrap();
        assert!(v.to_f64().abs() <= (-49.0f64).exp());
        assert!(v > 0);
    }

    #[test]
    fn derivative_chain_at_zero() {
        let t = table();
        let ev = SeriesEvaluator::new(&t, 256);
        let z = Float::new(256);
        let f: Vec<Float> = (0..4).map(|j| ev.eval_f0_real(&z, j, 1e-40).unwrap()).collect();
        assert!(f[0] > 0);
        assert!(f[0] < f[1] && f[1] < f[2] && f[2] < f[3]);
    }

    #[test]
    fn periodic_in_imaginary_direction() {
        let t = table();
        let ev = SeriesEvaluator::new(&t, 256);
        let tau = Float::with_val(256, rug::float::Constant::Pi) * 2u32;
        let z = Complex::new(Float::with_val(256, 0.7), Float::with_val(256, 0.3));
        let z2 = Complex::new(z.re.clone(), Float::with_val(256, &z.im + &tau));
        let a = ev.eval_f0(&z, 1, 1e-30).unwrap();
        let b = ev.eval_f0(&z2, 1, 1e-30).unwrap();
        assert!(a.dist(&b) < 2e-30);
    }

    #[test]
    fn tail_honesty() {
        let t = table();
        let ev = SeriesEvaluator::new(&t, 256).with_x0_hint(1.98);
        for zr in [-3.0, 0.5, 1.3, 1.7] {
            let z = Float::with_val(256, zr);
            let mut eps = 1e-6;
            let mut prev = ev.eval_f0_real(&z, 2, eps).unwrap();
            for _ in 0..6 {
                eps /= 2.0;
                let cur = ev.eval_f0_real(&z, 2, eps).unwrap();
                assert!(Float::with_val(256, &cur - &prev).abs() <= 2.0 * eps, "z = {zr}");
                prev = cur;
            }
        }
    }

    #[test]
    fn refuses_points_near_singularity() {
        let t = table();
        let ev = SeriesEvaluator::new(&t, 256).with_x0_hint(1.98);
        let z = Float::with_val(256, 1.96);
        assert!(matches!(
            ev.eval_f0_real(&z, 0, 1e-10),
            Err(Error::TailAccuracy { .. })
        ));
    }
}
