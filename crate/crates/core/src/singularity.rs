//! Location of the dominant singularity `x₀` and the expansion coefficients
//! of the invariants around it.
//!
//! Everything is done on the real side `s = x₀ − z > 0`. Writing
//! `F₀″(x₀ − s) = Σ c′_k s^{k/2}`, the half-integer powers transfer to
//! coefficient asymptotics through
//! `[e^{dz}] (x₀ − z)^α = e^{−dx₀} d^{−α−1} / Γ(−α)`.

use std::cmp::Ordering;

use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::flow::{
    default_init_eps, init_state, integrate_to_event, EventResult, FlowState, IntegratorConfig,
};
use crate::invariants::InvariantTable;
use crate::scalar::gamma_half_integer;
use crate::series::{revert_even, PuiseuxSeries, TruncatedSeries};

/// `[ln(15/4), ln 27]`: the `d`-th roots of the two-sided bounds on `n_{0,d}`.
pub fn x0_bracket(prec: u32) -> (Float, Float) {
    let lo = Float::with_val(prec, Float::with_val(prec, 15) / 4u32).ln();
    let hi = Float::with_val(prec, 27).ln();
    (lo, hi)
}

fn check_bracket(x0: &Float) -> Result<()> {
    let (lo, hi) = x0_bracket(x0.prec());
    if *x0 < lo || *x0 > hi {
        return Err(Error::OutOfBracket {
            x0: x0.to_f64(),
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    }
    Ok(())
}

/// `x₀ = ẑ(t₁)`.
pub fn x0_from_flow(ev: &EventResult) -> Result<Float> {
    let x0 = ev.state.z.clone();
    check_bracket(&x0)?;
    Ok(x0)
}

/// Roots of the truncated equations and the extrapolated `x₀`.
#[derive(Clone, Debug)]
pub struct SeriesEstimate {
    pub d_list: Vec<usize>,
    pub roots: Vec<Float>,
    pub x0: Float,
}

/// Root of `Σ_{d≤D} d(3d−2) n_{0,d} e^{dx} = 27`.
///
/// Newton on `ln S(x) − ln 27`, which is convex and increasing, from a
/// starting point to the right of the root; the iterates decrease
/// monotonically.
pub fn truncated_root(g0: &InvariantTable, big_d: usize, start: &Float) -> Result<Float> {
    let prec = start.prec();
    if big_d == 0 || big_d > g0.dmax() {
        return Err(Error::TableTooShort {
            requested: big_d,
            available: g0.dmax(),
        });
    }
    let coef: Vec<Float> = (1..=big_d)
        .map(|d| {
            let n = g0.value(d, prec).expect("d <= dmax");
            n * (d as u64 * (3 * d as u64 - 2))
        })
        .collect();
    let sums = |x: &Float| {
        let q = Float::with_val(prec, x.exp_ref());
        let mut pw = Float::with_val(prec, 1);
        let mut s = Float::new(prec);
        let mut ds = Float::new(prec);
        let mut term = Float::new(prec);
        for (i, c) in coef.iter().enumerate() {
            pw *= &q;
            rug::Assign::assign(&mut term, c * &pw);
            s += &term;
            term *= (i + 1) as u32;
            ds += &term;
        }
        (s, ds)
    };
    let ln27 = Float::with_val(prec, 27).ln();
    let (lo, _) = x0_bracket(prec);
    if sums(&lo).0 >= 27u32 {
        return Err(Error::RootSolve(format!(
            "truncated sum at D = {big_d} already exceeds 27 at the lower bracket end"
        )));
    }
    let mut x = start.clone();
    if sums(&x).0 < 27u32 {
        return Err(Error::RootSolve(format!(
            "starting point is left of the root for D = {big_d}"
        )));
    }
    let stop = Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 8)));
    for _ in 0..200 {
        let (s, ds) = sums(&x);
        let g = Float::with_val(prec, s.ln_ref()) - &ln27;
        let delta = g * s / ds;
        x -= &delta;
        if delta.abs() <= stop {
            return Ok(x);
        }
    }
    Err(Error::RootSolve(format!(
        "Newton did not converge for D = {big_d}"
    )))
}

/// `x₀` from truncations of `(3F₀″ − 2F₀′)(x₀) = 27`.
///
/// The truncated roots satisfy `x(D) − x₀ ~ u/D` with corrections in
/// further half-integer powers of `1/D`. The model
/// `x(D) = x₀ + Σ_{j=1}^{n−1} α_j D^{−(j+1)/2}` is solved exactly through
/// the `n` points of `d_list`.
pub fn x0_from_series(g0: &InvariantTable, d_list: &[usize], prec: u32) -> Result<SeriesEstimate> {
    if d_list.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three truncation orders".into(),
        ));
    }
    if d_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "truncation orders must be strictly increasing".into(),
        ));
    }
    let mut start = Float::with_val(prec, 54).ln();
    let mut roots = Vec::with_capacity(d_list.len());
    for &big_d in d_list {
        let r = truncated_root(g0, big_d, &start)?;
        if let Some(prev) = roots.last() {
            if r >= *prev {
                return Err(Error::Fit(format!(
                    "truncated roots are not decreasing at D = {big_d}; table may be corrupt"
                )));
            }
        }
        start = r.clone();
        roots.push(r);
    }
    let n = d_list.len();
    let rows: Vec<Vec<Float>> = d_list
        .iter()
        .map(|&big_d| {
            let inv_root = Float::with_val(prec, big_d).sqrt().recip();
            let mut row = vec![Float::with_val(prec, 1)];
            let mut pw = Float::with_val(prec, &inv_root * &inv_root);
            for _ in 1..n {
                row.push(pw.clone());
                pw *= &inv_root;
            }
            row
        })
        .collect();
    let sol = solve_linear(rows, roots.clone())?;
    let x0 = sol[0].clone();
    check_bracket(&x0)?;
    Ok(SeriesEstimate {
        d_list: d_list.to_vec(),
        roots,
        x0,
    })
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Result<Vec<Float>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .as_abs()
                    .partial_cmp(&*a[j][col].as_abs())
                    .unwrap_or(Ordering::Equal)
            })
            .expect("nonempty range");
        if a[piv][col].is_zero() {
            return Err(Error::Fit("singular extrapolation system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let (top, rest) = a.split_at_mut(r);
            let (pivot, row) = (&top[col], &mut rest[0]);
            let f = Float::with_val(row[col].prec(), &row[col] / &pivot[col]);
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= Float::with_val(f.prec(), &f * p);
            }
            let t = Float::with_val(f.prec(), &f * &b[col]);
            b[r] -= t;
        }
    }
    let mut x = vec![Float::new(b[0].prec()); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= Float::with_val(acc.prec(), &a[r][c] * &x[c]);
        }
        x[r] = acc / &a[r][r];
    }
    Ok(x)
}

/// `c′_k` with `ŵ(t₁ + τ(s)) = Σ c′_k s^{k/2}`, where `τ(s)` is the `τ < 0`
/// branch of `ẑ(t₁+τ) = x₀ − s`. Known through `s^{(K−1)/2}` for a local
/// expansion of order `K`.
pub fn cprime_from_local(ev: &EventResult) -> Result<Vec<Float>> {
    let tau = revert_even(&ev.local.z, &ev.event_tol)?;
    let mut sigma = vec![Float::new(ev.precision_bits)];
    for k in 1..=tau.order() {
        sigma.push(tau.coeff(k).expect("k within order"));
    }
    let inner = TruncatedSeries::new(ev.local.w.var(), sigma)?;
    let composed = ev.local.w.compose(&inner)?;
    Ok(composed.into_coeffs())
}

/// `(F₀, F₀′)` at the state's `z`, from `F₀′ = 3w − y`,
/// `F₀ = (x + 18w − 9y)/2`.
pub fn boundary_values(state: &FlowState) -> (Float, Float) {
    let p = state.prec();
    let f0p = Float::with_val(p, &state.w * 3u32) - &state.y;
    let f0 = (Float::with_val(p, &state.w * 18u32) + &state.x - Float::with_val(p, &state.y * 9u32))
        / 2u32;
    (f0, f0p)
}

/// `a⁰_k = 4(−1)^k Γ(k+1/2) c′_{2k−5} / (π(2k−1)(2k−3))` for
/// `k = 3..=k_max`.
pub fn genus0_coeffs(cprime: &[Float], k_max: usize) -> Result<Vec<Float>> {
    if k_max < 3 || 2 * k_max - 5 >= cprime.len() {
        return Err(Error::InvalidArgument(format!(
            "a0 up to k = {k_max} needs c' through index {}, have {}",
            2 * k_max.max(3) - 5,
            cprime.len()
        )));
    }
    let prec = cprime[0].prec();
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let out: Vec<Float> = (3..=k_max)
        .map(|k| {
            let g = gamma_half_integer(k as u32, prec);
            let den = Float::with_val(prec, &pi * ((2 * k - 1) * (2 * k - 3)) as u32);
            let v = g * &cprime[2 * k - 5] * 4u32 / den;
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    if out[0].cmp0() != Some(Ordering::Greater) {
        return Err(Error::Sign(format!(
            "leading genus-0 coefficient a0_3 = {:e} is not positive",
            out[0].to_f64()
        )));
    }
    Ok(out)
}

/// The genus-one quotient and its transferred coefficients.
#[derive(Clone, Debug)]
pub struct Genus1Coefficients {
    /// `F₁′(x₀ − s) = Σ_{d≥−2} g′_d s^{d/2}`.
    pub gprime: PuiseuxSeries<Float>,
    /// `a¹_k = (−1)^k Γ(k+1/2) g′_{2k−1} / π` for `k = 0..`.
    pub a1: Vec<Float>,
    /// Constant term of `27 + 2F₀′ − 3F₀″` at `x₀` before it was zeroed.
    pub denominator_constant: Float,
}

/// Expands `F₁′ = (F₀‴ − 3F₀″ + 2F₀′) / (8(27 + 2F₀′ − 3F₀″))` on the
/// `s`-side from the `c′_k` and `F₀′(x₀)`.
pub fn genus1_coeffs(
    cprime: &[Float],
    f0p: &Float,
    k_max: usize,
    constant_tol: &Float,
) -> Result<Genus1Coefficients> {
    let prec = f0p.prec();
    if cprime.len() < 4 {
        return Err(Error::InvalidArgument("need at least c'_0..c'_3".into()));
    }
    let kk = cprime.len() - 1;
    let w = PuiseuxSeries::new("s", 0, cprime.to_vec());
    // F₀′(x₀ − s) = F₀′(x₀) − Σ 2c′_k/(k+2) s^{(k+2)/2}
    let mut fp = vec![f0p.clone(), Float::new(prec)];
    fp.extend(
        cprime
            .iter()
            .enumerate()
            .map(|(k, c)| -Float::with_val(prec, c * 2u32) / (k as u32 + 2)),
    );
    let fp = PuiseuxSeries::new("s", 0, fp);
    // F₀‴(x₀ − s) = −Σ (k/2) c′_k s^{k/2 − 1}
    let fppp: Vec<Float> = (1..=kk)
        .map(|k| -Float::with_val(prec, &cprime[k] * k as u32) / 2u32)
        .collect();
    let fppp = PuiseuxSeries::new("s", -1, fppp);

    let mut twenty_seven = vec![Float::new(prec); kk + 3];
    twenty_seven[0] = Float::with_val(prec, 27);
    let twenty_seven = PuiseuxSeries::new("s", 0, twenty_seven);
    let den = twenty_seven
        .add(&fp.scale(&Float::with_val(prec, 2)))?
        .sub(&w.scale(&Float::with_val(prec, 3)))?;
    let denominator_constant = den.coeff(0).unwrap_or_else(|| Float::new(prec));
    if Float::with_val(prec, denominator_constant.abs_ref()) > *constant_tol {
        return Err(Error::LocalExpansion(format!(
            "27 + 2F0' - 3F0'' does not vanish at x0 (constant term {:e})",
            denominator_constant.to_f64()
        )));
    }
    let den = den.with_zeroed(0);
    let num = fppp
        .sub(&w.scale(&Float::with_val(prec, 3)))?
        .add(&fp.scale(&Float::with_val(prec, 2)))?
        .scale(&Float::with_val(prec, 0.125));
    let gprime = num.div(&den)?;
    if gprime.min_half_exponent() != -2 {
        return Err(Error::LocalExpansion(format!(
            "genus-one quotient starts at s^({}/2), expected s^-1",
            gprime.min_half_exponent()
        )));
    }
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let mut a1 = Vec::new();
    for k in 0..=k_max {
        let Some(g) = gprime.coeff(2 * k as i64 - 1) else {
            break;
        };
        let v = gamma_half_integer(k as u32, prec) * g / &pi;
        a1.push(if k % 2 == 1 { -v } else { v });
    }
    Ok(Genus1Coefficients {
        gprime,
        a1,
        denominator_constant,
    })
}

#[derive(Clone, Debug)]
pub struct SingularityConfig {
    pub precision_bits: u32,
    pub z_init: f64,
    pub taylor_order: usize,
    /// Expansion terms `N`; the local order defaults to `2N + 8`.
    pub terms: usize,
    pub local_order: Option<usize>,
    pub series_d_list: Vec<usize>,
    /// Allowed `|x₀(flow) − x₀(series)|`.
    pub cross_tol: f64,
}

impl Default for SingularityConfig {
    fn default() -> Self {
        SingularityConfig {
            precision_bits: 256,
            z_init: -30.0,
            taylor_order: 30,
            terms: 8,
            local_order: None,
            series_d_list: vec![1000, 2000, 3000, 4000, 5000],
            cross_tol: 1e-8,
        }
    }
}

impl SingularityConfig {
    pub fn local_order(&self) -> usize {
        self.local_order.unwrap_or(2 * self.terms + 8)
    }
}

#[derive(Clone, Debug)]
pub struct SingularityReport {
    pub x0: Float,
    /// Series-method estimate, when the table was long enough.
    pub x0_alt: Option<Float>,
    pub series: Option<SeriesEstimate>,
    pub event: EventResult,
    pub cprime: Vec<Float>,
    pub f0_at_x0: Float,
    pub f0prime_at_x0: Float,
    /// `a⁰_3, a⁰_4, …`
    pub a0: Vec<Float>,
    /// `a¹_0, a¹_1, …`
    pub a1: Vec<Float>,
    pub gprime: PuiseuxSeries<Float>,
    pub terms: usize,
    /// Slope of `ln|c′_k|` against `k`; `e^{−2·slope}` estimates the
    /// radius of convergence in `s`.
    pub cprime_growth: Option<f64>,
    pub checks: Vec<Check>,
}

/// Least-squares slope of `ln|c_k|` against `k` over `k ≥ 2` (zero entries
/// skipped).
pub fn cprime_growth_rate(cprime: &[Float]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = cprime
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as f64, Float::with_val(c.prec(), c.abs_ref()).ln().to_f64()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Runs the flow from `cfg.z_init`, expands at the event, and derives all
/// coefficients. `g0` must cover the series truncation orders for the
/// cross-check; shorter tables skip it.
pub fn analyze(g0: &InvariantTable, cfg: &SingularityConfig) -> Result<SingularityReport> {
    let prec = cfg.precision_bits;
    let s0 = init_state(cfg.z_init, g0, default_init_eps(cfg.z_init, prec), prec)?;
    let mut icfg = IntegratorConfig::for_precision(prec);
    icfg.order = cfg.taylor_order;
    let event = integrate_to_event(&s0, &icfg, cfg.local_order(), cfg.z_init)?;
    report_from_event(g0, cfg, event)
}

/// Coefficient extraction and checks for an already located event.
pub fn report_from_event(
    g0: &InvariantTable,
    cfg: &SingularityConfig,
    event: EventResult,
) -> Result<SingularityReport> {
    let prec = event.precision_bits;
    let x0 = x0_from_flow(&event)?;
    let mut checks = Vec::new();
    let (lo, hi) = x0_bracket(prec);
    checks.push(Check::new(
        "x0_in_bracket",
        x0 >= lo && x0 <= hi,
        format!("{:.10} in [{:.7}, {:.7}]", x0.to_f64(), lo.to_f64(), hi.to_f64()),
    ));

    let series = match cfg.series_d_list.last() {
        Some(&dlast) if dlast <= g0.dmax() => Some(x0_from_series(g0, &cfg.series_d_list, prec)?),
        _ => None,
    };
    if let Some(s) = &series {
        let gap = Float::with_val(prec, &x0 - &s.x0).abs().to_f64();
        checks.push(Check::new(
            "x0_cross_method",
            gap <= cfg.cross_tol,
            format!("|flow - series| = {gap:.3e} (tolerance {:.0e})", cfg.cross_tol),
        ));
    }

    let cprime = cprime_from_local(&event)?;
    let c = event.c();
    let b2 = &event.b()[2];
    let c1_expected = -Float::with_val(prec, &c[1] / Float::with_val(prec, -b2).sqrt());
    let c1_gap = Float::with_val(prec, &cprime[1] - &c1_expected).abs().to_f64();
    checks.push(Check::new(
        "cprime0_equals_c0",
        cprime[0] == c[0],
        format!("c'_0 = {:.12e}", cprime[0].to_f64()),
    ));
    checks.push(Check::new(
        "cprime1_closed_form",
        c1_gap <= 1e-30,
        format!("|c'_1 + c_1/sqrt(-b_2)| = {c1_gap:.3e}"),
    ));
    checks.push(Check::new(
        "cprime1_negative",
        cprime[1].cmp0() == Some(Ordering::Less),
        format!("c'_1 = {:.12e}", cprime[1].to_f64()),
    ));

    let (f0, f0p) = boundary_values(&event.state);
    let ident = (Float::with_val(prec, &f0p * 2u32) + 27u32 - Float::with_val(prec, &cprime[0] * 3u32))
        .abs();
    let ident_tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32 / 2) + 8));
    checks.push(Check::new(
        "boundary_identity",
        ident <= ident_tol,
        format!("|27 + 2F0'(x0) - 3c'_0| = {:.3e}", ident.to_f64()),
    ));

    let k0_max = ((cprime.len() - 1 + 5) / 2).min(cfg.terms);
    let a0 = genus0_coeffs(&cprime, k0_max)?;
    checks.push(Check::new(
        "a0_3_positive",
        true,
        format!("a0_3 = {:.12e}", a0[0].to_f64()),
    ));

    let g1 = genus1_coeffs(&cprime, &f0p, cfg.terms, &ident_tol)?;
    let g_lead = g1.gprime.coeff(-2).expect("leading term present");
    let lead_gap = (Float::with_val(prec, &g_lead - Rational::from((1, 48)))).abs().to_f64();
    checks.push(Check::new(
        "gprime_leading_1_48",
        lead_gap <= 1e-10,
        format!("|g'_-2 - 1/48| = {lead_gap:.3e}"),
    ));

    let cprime_growth = cprime_growth_rate(&cprime);
    Ok(SingularityReport {
        x0,
        x0_alt: series.as_ref().map(|s| s.x0.clone()),
        series,
        event,
        cprime,
        f0_at_x0: f0,
        f0prime_at_x0: f0p,
        a0,
        a1: g1.a1,
        gprime: g1.gprime,
        terms: cfg.terms,
        cprime_growth,
        checks,
    })
}

fn dec(f: &Float) -> String {
    f.to_string_radix(10, None)
}

impl SingularityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[Float]| v.iter().map(dec).collect::<Vec<_>>();
        json!({
            "x0": dec(&self.x0),
            "x0_alt": self.x0_alt.as_ref().map(dec),
            "series_roots": self.series.as_ref().map(|s| json!({
                "d": s.d_list,
                "roots": list(&s.roots),
            })),
            "event": self.event.to_json(),
            "cprime": list(&self.cprime),
            "F0_at_x0": dec(&self.f0_at_x0),
            "F0prime_at_x0": dec(&self.f0prime_at_x0),
            "a0": { "first_k": 3, "values": list(&self.a0) },
            "a1": { "first_k": 0, "values": list(&self.a1) },
            "gprime": {
                "min_half_exponent": self.gprime.min_half_exponent(),
                "values": list(self.gprime.coeffs()),
            },
            "cprime1_sign": if self.cprime[1].cmp0() == Some(Ordering::Less) { "negative" } else { "nonnegative" },
            "cprime_log_growth": self.cprime_growth,
            "terms": self.terms,
            "precision_bits": self.event.precision_bits,
            "checks": self.checks,
        })
    }
}

/// Reads the headline numbers back from a report written by
/// [`SingularityReport::to_json`].
#[derive(Clone, Debug)]
pub struct ReportSummary {
    pub x0: Float,
    pub a0: Vec<Float>,
    pub a1: Vec<Float>,
    pub precision_bits: u32,
}

impl ReportSummary {
    pub fn from_json(v: &Value) -> Result<ReportSummary> {
        let prec = v["precision_bits"]
            .as_u64()
            .ok_or_else(|| Error::Parse("missing precision_bits".into()))? as u32;
        let parse = |s: &Value| -> Result<Float> {
            let s = s
                .as_str()
                .ok_or_else(|| Error::Parse("expected a decimal string".into()))?;
            Float::parse(s)
                .map(|p| Float::with_val(prec, p))
                .map_err(|e| Error::Parse(format!("{s}: {e}")))
        };
        let parse_list = |s: &Value| -> Result<Vec<Float>> {
            s.as_array()
                .ok_or_else(|| Error::Parse("expected a list".into()))?
                .iter()
                .map(parse)
                .collect()
        };
        Ok(ReportSummary {
            x0: parse(&v["x0"])?,
            a0: parse_list(&v["a0"]["values"])?,
            a1: parse_list(&v["a1"]["values"])?,
            precision_bits: prec,
        })
    }
}
