//! Large-degree expansions of `n_{0,d}` and `n_{1,d}` and their empirical
//! validation against the tables.
//!
//! ```text
//! n_{0,d} ≈ e^{−dx₀} Σ_{k=3}^{N−1} a⁰_k d^{−k−1/2}
//! n_{1,d} ≈ e^{−dx₀} (1/(48d) + Σ_{k=0}^{N−1} a¹_k d^{−k−3/2})
//! ```
//!
//! Comparisons are made on the rescaled quantities `n_{g,d}·e^{dx₀}`, which
//! stay of moderate size; MPFR's exponent range covers the unscaled values.

use std::ops::RangeInclusive;

use rug::Float;

use crate::check::Check;
use crate::error::{Error, Result};
use crate::invariants::{Genus, InvariantTable, ScaledValue};

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticModel {
    genus: Genus,
    x0: Float,
    /// Genus 0: `a⁰_3..a⁰_{N−1}`. Genus 1: `a¹_0..a¹_{N−1}`.
    coeffs: Vec<Float>,
    terms: usize,
}

impl AsymptoticModel {
    /// `N`-term genus-0 model from `a0 = [a⁰_3, a⁰_4, …]`; `N ≥ 4`.
    pub fn genus0(x0: &Float, a0: &[Float], terms: usize) -> Result<AsymptoticModel> {
        if terms < 4 {
            return Err(Error::InvalidArgument(format!(
                "genus-0 model needs N >= 4, got {terms}"
            )));
        }
        let need = terms - 3;
        if a0.len() < need {
            return Err(Error::InvalidArgument(format!(
                "N = {terms} needs {need} genus-0 coefficients, have {}",
                a0.len()
            )));
        }
        Ok(AsymptoticModel {
            genus: Genus::Zero,
            x0: x0.clone(),
            coeffs: a0[..need].to_vec(),
            terms,
        })
    }

    /// `N`-term genus-1 model from `a1 = [a¹_0, a¹_1, …]`; `N = 0` is the
    /// leading term `1/(48d)` alone.
    pub fn genus1(x0: &Float, a1: &[Float], terms: usize) -> Result<AsymptoticModel> {
        if a1.len() < terms {
            return Err(Error::InvalidArgument(format!(
                "N = {terms} needs {terms} genus-1 coefficients, have {}",
                a1.len()
            )));
        }
        Ok(AsymptoticModel {
            genus: Genus::One,
            x0: x0.clone(),
            coeffs: a1[..terms].to_vec(),
            terms,
        })
    }

    pub fn genus(&self) -> Genus {
        self.genus
    }

    pub fn x0(&self) -> &Float {
        &self.x0
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    /// Exponent of the first omitted term: `−(N+1/2)` or `−(N+3/2)`.
    pub fn remainder_exponent(&self) -> f64 {
        match self.genus {
            Genus::Zero => -(self.terms as f64 + 0.5),
            Genus::One => -(self.terms as f64 + 1.5),
        }
    }

    /// The model times `e^{dx₀}`.
    pub fn rescaled(&self, d: usize) -> Float {
        let prec = self.x0.prec();
        let df = Float::with_val(prec, d);
        let inv = Float::with_val(prec, df.recip_ref());
        let (mut pw, mut acc) = match self.genus {
            // d^{−7/2}
            Genus::Zero => {
                let p = Float::with_val(prec, df.recip_sqrt_ref()) * &inv * &inv * &inv;
                (p, Float::new(prec))
            }
            // d^{−3/2}, after the 1/(48d) term
            Genus::One => {
                let p = Float::with_val(prec, df.recip_sqrt_ref()) * &inv;
                (p, Float::with_val(prec, &inv / 48u32))
            }
        };
        for a in &self.coeffs {
            acc += Float::with_val(prec, a * &pw);
            pw *= &inv;
        }
        acc
    }

    /// The model value itself.
    pub fn eval(&self, d: usize) -> Float {
        let prec = self.x0.prec();
        let scale = Float::with_val(prec, -Float::with_val(prec, &self.x0 * d as u64)).exp();
        self.rescaled(d) * scale
    }

    /// Log-scaled model value; `None` where the truncated sum is not
    /// positive.
    pub fn eval_scaled(&self, d: usize) -> Option<ScaledValue> {
        ScaledValue::from_float(&self.eval(d))
    }
}

/// `n_{g,d}·e^{dx₀}`.
pub fn rescaled_entry(table: &InvariantTable, x0: &Float, d: usize) -> Result<Float> {
    let prec = x0.prec();
    let n = table.value(d, prec).ok_or(Error::TableTooShort {
        requested: d,
        available: table.dmax(),
    })?;
    let scale = Float::with_val(prec, Float::with_val(prec, x0 * d as u64).exp_ref());
    Ok(n * scale)
}

/// `|n_{g,d}e^{dx₀} − model·e^{dx₀}|` over `window`.
pub fn residuals(
    table: &InvariantTable,
    model: &AsymptoticModel,
    window: RangeInclusive<usize>,
) -> Result<Vec<(usize, Float)>> {
    window
        .map(|d| {
            let exact = rescaled_entry(table, &model.x0, d)?;
            Ok((d, (exact - model.rescaled(d)).abs()))
        })
        .collect()
}

/// Largest residual over `window`.
pub fn max_residual(
    table: &InvariantTable,
    model: &AsymptoticModel,
    window: RangeInclusive<usize>,
) -> Result<Float> {
    let r = residuals(table, model, window)?;
    Ok(r
        .into_iter()
        .map(|(_, e)| e)
        .fold(Float::new(model.x0.prec()), |a, b| if b > a { b } else { a }))
}

/// Ordinary least squares slope of `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits `ln y = slope·ln x + intercept` after trimming `trim` (a fraction)
/// of the points at each end.
pub fn loglog_fit(points: &[(f64, f64)], trim: f64) -> Result<LogLogFit> {
    let cut = (points.len() as f64 * trim).floor() as usize;
    let kept = &points[cut..points.len() - cut];
    if kept.len() < 2 {
        return Err(Error::Fit("too few points left after trimming".into()));
    }
    let n = kept.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in kept {
        sx += x.ln();
        sy += y.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in kept {
        let dx = x.ln() - mx;
        sxx += dx * dx;
        sxy += dx * (y.ln() - my);
    }
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        points: kept.len(),
    })
}

/// Fraction trimmed at each end of a fit window.
pub const FIT_TRIM: f64 = 0.1;

/// Slope of `ln E(d)` against `ln d`, where `E(d)` is the rescaled residual
/// of `model`. Residuals within 2^24 ulps of the rescaled entry
/// are rejected as numerical noise.
pub fn residual_order_fit(
    table: &InvariantTable,
    model: &AsymptoticModel,
    window: RangeInclusive<usize>,
) -> Result<LogLogFit> {
    if window.clone().count() < 8 {
        return Err(Error::InvalidArgument(
            "fit window needs at least 8 degrees".into(),
        ));
    }
    let prec = model.x0.prec();
    let ulp_scale = Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 24)));
    let mut pts = Vec::new();
    for (d, e) in residuals(table, model, window)? {
        let floor = Float::with_val(prec, rescaled_entry(table, &model.x0, d)? * &ulp_scale);
        if e <= floor {
            return Err(Error::Fit(format!(
                "residual at d = {d} is at the noise floor ({:e}); raise precision or shrink the window",
                e.to_f64()
            )));
        }
        pts.push((d as f64, e.to_f64()));
    }
    loglog_fit(&pts, FIT_TRIM)
}

/// Slope of `|48d·e^{dx₀}·n_{1,d} − 1|` against `d`.
pub fn genus1_gap_fit(table: &InvariantTable, x0: &Float, window: RangeInclusive<usize>) -> Result<LogLogFit> {
    let mut pts = Vec::new();
    for d in window {
        let r = rescaled_entry(table, x0, d)? * (48 * d as u64);
        pts.push((d as f64, (r - 1u32).abs().to_f64()));
    }
    loglog_fit(&pts, FIT_TRIM)
}

/// `d`-th root sequences and their gaps to `e^{−x₀}` and to each other.
#[derive(Clone, Debug, PartialEq)]
pub struct RootDiagnostics {
    pub degrees: Vec<usize>,
    pub root0: Vec<f64>,
    pub root1: Vec<f64>,
    pub gap0: Vec<f64>,
    pub gap1: Vec<f64>,
    pub cross_gap: Vec<f64>,
}

/// `r_g(d) = exp(ln n_{g,d} / d)` over the common range of the tables;
/// degrees where the genus-1 entry vanishes are skipped.
pub fn root_convergence(
    table0: &InvariantTable,
    table1: &InvariantTable,
    x0: &Float,
) -> Result<RootDiagnostics> {
    let prec = x0.prec();
    let limit = Float::with_val(prec, -x0).exp();
    let dmax = table0.dmax().min(table1.dmax());
    let mut out = RootDiagnostics {
        degrees: Vec::new(),
        root0: Vec::new(),
        root1: Vec::new(),
        gap0: Vec::new(),
        gap1: Vec::new(),
        cross_gap: Vec::new(),
    };
    for d in 1..=dmax {
        let n1 = table1.value(d, prec).expect("d within range");
        if n1.is_zero() {
            continue;
        }
        let n0 = table0.value(d, prec).expect("d within range");
        let root = |n: Float| (n.ln() / d as u32).exp();
        let r0 = root(n0);
        let r1 = root(n1);
        out.degrees.push(d);
        out.gap0.push(Float::with_val(prec, &r0 - &limit).abs().to_f64());
        out.gap1.push(Float::with_val(prec, &r1 - &limit).abs().to_f64());
        out.cross_gap.push(Float::with_val(prec, &r0 - &r1).abs().to_f64());
        out.root0.push(r0.to_f64());
        out.root1.push(r1.to_f64());
    }
    Ok(out)
}

impl RootDiagnostics {
    /// All three gaps strictly decreasing over the upper half of the range
    /// and below `threshold` at the end. Fewer than two points gives no
    /// checks.
    pub fn checks(&self, threshold: f64) -> Vec<Check> {
        let Some(&dmax) = self.degrees.last() else {
            return Vec::new();
        };
        let start = self.degrees.partition_point(|&d| d < dmax / 2);
        if self.degrees.len() - start < 2 {
            return Vec::new();
        }
        let mut checks = Vec::new();
        for (name, gaps) in [
            ("root_gap_genus0", &self.gap0),
            ("root_gap_genus1", &self.gap1),
            ("root_gap_cross", &self.cross_gap),
        ] {
            let tail = &gaps[start..];
            let bad = tail.windows(2).position(|w| w[1] >= w[0]);
            let last = *tail.last().expect("nonempty");
            checks.push(Check::new(
                format!("{name}_decreasing"),
                bad.is_none(),
                match bad {
                    None => format!("strictly decreasing over d in [{}, {dmax}]", self.degrees[start]),
                    Some(i) => format!("increases at d = {}", self.degrees[start + i + 1]),
                },
            ));
            checks.push(Check::new(
                format!("{name}_small"),
                last < threshold,
                format!("{last:.3e} at d = {dmax} (threshold {threshold:.0e})"),
            ));
        }
        checks
    }
}

/// One row of plot data: rescaled table value, rescaled model and their
/// difference.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotRow {
    pub genus: u8,
    pub d: usize,
    pub exact: Float,
    pub model: Float,
    pub rescaled_exact: Float,
    pub rescaled_model: Float,
}

pub fn plot_rows(
    table: &InvariantTable,
    model: &AsymptoticModel,
    window: RangeInclusive<usize>,
) -> Result<Vec<PlotRow>> {
    window
        .map(|d| {
            let prec = model.x0.prec();
            Ok(PlotRow {
                genus: model.genus.index(),
                d,
                exact: table.value(d, prec).ok_or(Error::TableTooShort {
                    requested: d,
                    available: table.dmax(),
                })?,
                model: model.eval(d),
                rescaled_exact: rescaled_entry(table, &model.x0, d)?,
                rescaled_model: model.rescaled(d),
            })
        })
        .collect()
}

/// CSV with header `genus,d,exact,model,rescaled_exact,rescaled_model,rescaled_residual`.
pub fn plot_csv(rows: &[PlotRow]) -> String {
    let mut out = String::from("genus,d,exact,model,rescaled_exact,rescaled_model,rescaled_residual\n");
    let s = |f: &Float| f.to_string_radix(10, Some(20));
    for r in rows {
        let res = Float::with_val(r.rescaled_exact.prec(), &r.rescaled_exact - &r.rescaled_model);
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.genus,
            r.d,
            s(&r.exact),
            s(&r.model),
            s(&r.rescaled_exact),
            s(&r.rescaled_model),
            s(&res)
        ));
    }
    out
}

/// Windows and tolerances for [`validate`]. The defaults assume a table
/// through `d = 5000`; shorter tables shrink the windows proportionally.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationParams {
    pub genus0_ratio_from: usize,
    pub genus0_ratio_tol: f64,
    pub genus1_ratio_from: usize,
    pub genus1_ratio_tol: f64,
    pub genus0_fit_terms: Vec<usize>,
    pub genus1_fit_terms: Vec<usize>,
    pub slope_tol: f64,
    pub dominance_from: usize,
    pub root_gap_threshold: f64,
    /// Shift applied to `x₀` in the sensitivity probe.
    pub x0_perturbation: f64,
}

impl Default for ValidationParams {
    fn default() -> Self {
        ValidationParams {
            genus0_ratio_from: 2000,
            genus0_ratio_tol: 0.01,
            genus1_ratio_from: 500,
            genus1_ratio_tol: 0.1,
            genus0_fit_terms: vec![4, 5, 6],
            genus1_fit_terms: vec![0, 1, 2],
            slope_tol: 0.25,
            dominance_from: 1000,
            root_gap_threshold: 1e-2,
            x0_perturbation: 1e-3,
        }
    }
}

/// Named fit results alongside the pass/fail checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Validation {
    pub checks: Vec<Check>,
    pub slopes: Vec<(String, f64)>,
}

/// Compares the expansions against the tables: leading ratios, remainder
/// orders, weak dominance of longer models, `d`-th root convergence, and
/// the sensitivity of the fits to `x₀`.
pub fn validate(
    g0: &InvariantTable,
    g1: &InvariantTable,
    x0: &Float,
    a0: &[Float],
    a1: &[Float],
    params: &ValidationParams,
) -> Result<Validation> {
    let dmax = g0.dmax().min(g1.dmax());
    let half = (dmax / 2).max(1);
    let fit_window = half..=dmax;
    let mut checks = Vec::new();
    let mut slopes = Vec::new();

    let lead0 = AsymptoticModel::genus0(x0, a0, 4)?;
    let from0 = params.genus0_ratio_from.min(half);
    let mut worst = (0.0f64, from0);
    for d in from0..=dmax {
        let r = (rescaled_entry(g0, x0, d)? / lead0.rescaled(d)).to_f64();
        if (r - 1.0).abs() > worst.0 {
            worst = ((r - 1.0).abs(), d);
        }
    }
    checks.push(Check::new(
        "genus0_leading_ratio",
        worst.0 <= params.genus0_ratio_tol,
        format!(
            "max |n e^(d x0) d^3.5 / a0_3 - 1| = {:.3e} at d = {} over [{from0}, {dmax}]",
            worst.0, worst.1
        ),
    ));

    for &n in &params.genus0_fit_terms {
        let m = AsymptoticModel::genus0(x0, a0, n)?;
        let expect = m.remainder_exponent();
        match residual_order_fit(g0, &m, fit_window.clone()) {
            Ok(fit) => {
                slopes.push((format!("genus0_N{n}"), fit.slope));
                checks.push(Check::new(
                    format!("genus0_order_N{n}"),
                    (fit.slope - expect).abs() <= params.slope_tol,
                    format!("slope {:.4} (expected {expect})", fit.slope),
                ));
            }
            Err(e) => checks.push(Check::new(format!("genus0_order_N{n}"), false, e.to_string())),
        }
    }

    let dom_window = params.dominance_from.min(half)..=dmax;
    let max_n0 = a0.len() + 3;
    let mut prev = max_residual(g0, &AsymptoticModel::genus0(x0, a0, 4)?, dom_window.clone())?;
    let mut bad = Vec::new();
    for n in 5..=max_n0 {
        let cur = max_residual(g0, &AsymptoticModel::genus0(x0, a0, n)?, dom_window.clone())?;
        if cur > prev {
            bad.push(n);
        }
        prev = cur;
    }
    checks.push(Check::new(
        "genus0_weak_dominance",
        bad.is_empty(),
        if bad.is_empty() {
            format!("max residual non-increasing for N = 4..{max_n0}")
        } else {
            format!("max residual grows when going to N = {bad:?}")
        },
    ));

    let from1 = params.genus1_ratio_from.min(half);
    let mut worst1 = (0.0f64, from1);
    for d in from1..=dmax {
        let r = (rescaled_entry(g1, x0, d)? * (48 * d as u64)).to_f64();
        if (r - 1.0).abs() > worst1.0 {
            worst1 = ((r - 1.0).abs(), d);
        }
    }
    checks.push(Check::new(
        "genus1_leading_ratio",
        worst1.0 <= params.genus1_ratio_tol,
        format!(
            "max |48 d e^(d x0) n - 1| = {:.3e} at d = {} over [{from1}, {dmax}]",
            worst1.0, worst1.1
        ),
    ));
    let gap = genus1_gap_fit(g1, x0, from1..=dmax)?;
    slopes.push(("genus1_gap".into(), gap.slope));
    checks.push(Check::new(
        "genus1_gap_decay",
        (gap.slope + 0.5).abs() <= params.slope_tol,
        format!("slope {:.4} (expected -0.5)", gap.slope),
    ));
    for &n in &params.genus1_fit_terms {
        let m = AsymptoticModel::genus1(x0, a1, n)?;
        let expect = m.remainder_exponent();
        match residual_order_fit(g1, &m, fit_window.clone()) {
            Ok(fit) => {
                slopes.push((format!("genus1_N{n}"), fit.slope));
                checks.push(Check::new(
                    format!("genus1_order_N{n}"),
                    (fit.slope - expect).abs() <= params.slope_tol,
                    format!("slope {:.4} (expected {expect})", fit.slope),
                ));
            }
            Err(e) => checks.push(Check::new(format!("genus1_order_N{n}"), false, e.to_string())),
        }
    }

    checks.extend(root_convergence(g0, g1, x0)?.checks(params.root_gap_threshold));

    // Shifting x₀ turns the residual into exponential growth; the fitted
    // order must move far from the true one.
    let shifted = Float::with_val(x0.prec(), x0 + params.x0_perturbation);
    let probe = AsymptoticModel::genus0(&shifted, a0, 4)?;
    let n4 = lead0.remainder_exponent();
    let (moved, detail) = match residual_order_fit(g0, &probe, fit_window) {
        Ok(fit) => (
            (fit.slope - n4).abs() > 1.0,
            format!("slope {:.3} with x0 shifted by {:e}", fit.slope, params.x0_perturbation),
        ),
        Err(e) => (true, format!("fit fails with x0 shifted: {e}")),
    };
    checks.push(Check::new("x0_sensitivity", moved, detail));

    Ok(Validation { checks, slopes })
}
