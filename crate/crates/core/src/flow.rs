//! The polynomial flow
//!
//! ```text
//! x′ = 27x + 4y²
//! y′ = 9x + 18y + 2yw
//! w′ = 3x + 6y + 9w + w²
//! z′ = 27 − 2y + 3w
//! ```
//!
//! in the time variable `t` with `dt/dz = 1/(27 + 2F₀′ − 3F₀″)`, where
//! `x = 9F₀″ − 9F₀′ + 2F₀`, `y = 3F₀″ − F₀′`, `w = F₀″`. Started deep in the
//! region of convergence, the trajectory reaches `2y − 3w = 27` at a unique
//! time `t₁`, where `z′` vanishes and `z(t₁) = x₀` is the dominant
//! singularity of `F₀`.
//!
//! Integration uses an adaptive Taylor method. The right-hand side is
//! polynomial, so Taylor coefficients come from a Cauchy-product recurrence
//! and every step carries a dense polynomial used for event location.

use std::cmp::Ordering;

use rug::Float;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::invariants::InvariantTable;
use crate::series::{SeriesEvaluator, TruncatedSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: Float,
    pub x: Float,
    pub y: Float,
    pub w: Float,
    pub z: Float,
}

impl FlowState {
    pub fn new(t: Float, x: Float, y: Float, w: Float, z: Float) -> FlowState {
        FlowState { t, x, y, w, z }
    }

    /// `x = y = w = 0` at `z = z0`.
    pub fn vacuum(z0: f64, prec: u32) -> FlowState {
        FlowState {
            t: Float::new(prec),
            x: Float::new(prec),
            y: Float::new(prec),
            w: Float::new(prec),
            z: Float::with_val(prec, z0),
        }
    }

    pub fn prec(&self) -> u32 {
        self.x.prec()
    }

    /// `2y − 3w`, which equals `3F₀″ − 2F₀′`.
    pub fn event_function(&self) -> Float {
        let prec = self.prec();
        Float::with_val(prec, &self.y * 2u32) - Float::with_val(prec, &self.w * 3u32)
    }
}

/// `(x′, y′, w′, z′)` at `s`.
pub fn vector_field(s: &FlowState) -> [Float; 4] {
    let p = s.prec();
    let f = |v: Float| Float::with_val(p, v);
    let yy = f(Float::with_val(p, &s.y * &s.y));
    let yw = f(Float::with_val(p, &s.y * &s.w));
    let ww = f(Float::with_val(p, &s.w * &s.w));
    let dx = f(Float::with_val(p, &s.x * 27u32) + yy * 4u32);
    let dy = f(Float::with_val(p, &s.x * 9u32) + Float::with_val(p, &s.y * 18u32) + yw * 2u32);
    let dw = f(Float::with_val(p, &s.x * 3u32)
        + Float::with_val(p, &s.y * 6u32)
        + Float::with_val(p, &s.w * 9u32)
        + ww);
    let dz = f(Float::with_val(p, 27u32) - s.event_function());
    [dx, dy, dw, dz]
}

/// Taylor coefficients `[X, Y, W, Z]` of the solution through `s`, to
/// order `order`, from `(k+1)·V_{k+1} = [τ^k] rhs(V)`.
pub fn taylor_coefficients(s: &FlowState, order: usize) -> [Vec<Float>; 4] {
    let p = s.prec();
    let mut x = vec![s.x.clone()];
    let mut y = vec![s.y.clone()];
    let mut w = vec![s.w.clone()];
    let mut z = vec![s.z.clone()];
    let mut acc = Float::new(p);
    let mut tmp = Float::new(p);
    for k in 0..order {
        let conv = |a: &[Float], b: &[Float], acc: &mut Float, tmp: &mut Float| {
            rug::Assign::assign(&mut *acc, 0);
            for i in 0..=k {
                rug::Assign::assign(&mut *tmp, &a[i] * &b[k - i]);
                *acc += &*tmp;
            }
            acc.clone()
        };
        let yy = conv(&y, &y, &mut acc, &mut tmp);
        let yw = conv(&y, &w, &mut acc, &mut tmp);
        let ww = conv(&w, &w, &mut acc, &mut tmp);
        let kp1 = (k + 1) as u32;
        let nx = (Float::with_val(p, &x[k] * 27u32) + yy * 4u32) / kp1;
        let ny = (Float::with_val(p, &x[k] * 9u32) + Float::with_val(p, &y[k] * 18u32) + yw * 2u32)
            / kp1;
        let nw = (Float::with_val(p, &x[k] * 3u32)
            + Float::with_val(p, &y[k] * 6u32)
            + Float::with_val(p, &w[k] * 9u32)
            + ww)
            / kp1;
        let mut nz = Float::with_val(p, &w[k] * 3u32) - Float::with_val(p, &y[k] * 2u32);
        if k == 0 {
            nz += 27u32;
        }
        nz /= kp1;
        x.push(nx);
        y.push(ny);
        w.push(nw);
        z.push(nz);
    }
    [x, y, w, z]
}

fn horner(c: &[Float], tau: &Float) -> Float {
    let p = c[0].prec();
    let mut acc = c[c.len() - 1].clone();
    for a in c[..c.len() - 1].iter().rev() {
        acc = Float::with_val(p, &acc * tau) + a;
    }
    acc
}

fn horner_derivative(c: &[Float], tau: &Float) -> Float {
    let p = c[0].prec();
    let n = c.len() - 1;
    if n == 0 {
        return Float::new(p);
    }
    let mut acc = Float::with_val(p, &c[n] * n as u32);
    for k in (1..n).rev() {
        acc = Float::with_val(p, &acc * tau) + Float::with_val(p, &c[k] * k as u32);
    }
    acc
}

/// Initial state on the trajectory at `z = z_init`, from the series of
/// `x, y, w` evaluated to absolute error `eps`. The time origin is `t = 0`.
pub fn init_state(z_init: f64, g0: &InvariantTable, eps: f64, prec: u32) -> Result<FlowState> {
    if z_init > -5.0 {
        return Err(Error::InvalidArgument(format!(
            "z_init = {z_init} must be <= -5 so the series converges fast"
        )));
    }
    if eps.partial_cmp(&0.0) != Some(Ordering::Greater) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let ev = SeriesEvaluator::new(g0, prec);
    let z = Float::with_val(prec, z_init);
    Ok(FlowState {
        t: Float::new(prec),
        x: ev.eval_x(&z, eps)?,
        y: ev.eval_y(&z, eps)?,
        w: ev.eval_w(&z, eps)?,
        z,
    })
}

/// Default initialization accuracy: `e^{z_init}·2^{−(P−8)}`, i.e. nearly
/// full relative precision in `x, y, w`.
pub fn default_init_eps(z_init: f64, prec: u32) -> f64 {
    (z_init - f64::from(prec.saturating_sub(8)) * std::f64::consts::LN_2).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// Taylor order per step.
    pub order: usize,
    /// Per-step error target, relative to each component's magnitude.
    pub local_tol: Float,
    /// Accepted residual `|2y − 3w − 27|` at the event.
    pub event_tol: Float,
    /// Give up past this time.
    pub horizon: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl IntegratorConfig {
    pub fn for_precision(prec: u32) -> IntegratorConfig {
        IntegratorConfig {
            order: 30,
            local_tol: Float::with_val(prec, Float::i_exp(1, -(prec as i32 - 12))),
            event_tol: Float::with_val(prec, Float::i_exp(1, -(prec as i32 / 2))),
            horizon: 20.0,
            max_step: 0.25,
            max_steps: 1_000_000,
        }
    }
}

/// Diagnostics for one accepted step.
#[derive(Clone, Debug)]
pub struct StepRecord {
    /// State at the start of the step.
    pub start: FlowState,
    pub h: Float,
    /// Absolute size of the last two Taylor terms at `h` (largest component).
    pub local_error: Float,
    /// `|d/dt(2y−3w) − (9x + (9+w)(2y−3w) + 2wy)|` at the step midpoint,
    /// from the dense Taylor polynomial.
    pub identity_residual: Float,
    /// Bound the residual is held to: ten local errors per unit time plus a
    /// rounding floor.
    pub identity_bound: Float,
}

#[derive(Clone, Debug)]
pub struct LocalSeries {
    pub x: TruncatedSeries<Float>,
    pub y: TruncatedSeries<Float>,
    pub w: TruncatedSeries<Float>,
    pub z: TruncatedSeries<Float>,
}

/// The event `2y − 3w = 27` and the local expansion there.
#[derive(Clone, Debug)]
pub struct EventResult {
    /// Relative to the time origin of the start state.
    pub t1: Float,
    pub state: FlowState,
    /// `|2y − 3w − 27|` at the returned state.
    pub event_residual: Float,
    pub local: LocalSeries,
    pub precision_bits: u32,
    pub z_init: f64,
    pub event_tol: Float,
    pub local_tol: Float,
}

impl EventResult {
    /// `b_k`, the coefficients of `ẑ(t₁+τ)`.
    pub fn b(&self) -> &[Float] {
        self.local.z.coeffs()
    }

    /// `c_k`, the coefficients of `ŵ(t₁+τ)`.
    pub fn c(&self) -> &[Float] {
        self.local.w.coeffs()
    }

    pub fn to_json(&self) -> Value {
        let s = |f: &Float| f.to_string_radix(10, None);
        json!({
            "t1": s(&self.t1),
            "state": {
                "x": s(&self.state.x),
                "y": s(&self.state.y),
                "w": s(&self.state.w),
                "z": s(&self.state.z),
            },
            "b": self.b().iter().map(s).collect::<Vec<_>>(),
            "c": self.c().iter().map(s).collect::<Vec<_>>(),
            "precision_bits": self.precision_bits,
            "z_init": self.z_init,
            "tolerances": {
                "event": s(&self.event_tol),
                "local": s(&self.local_tol),
                "event_residual": s(&self.event_residual),
            },
        })
    }
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub event: EventResult,
    pub steps: Vec<StepRecord>,
}

fn step_size(coeffs: &[Vec<Float>; 4], cfg: &IntegratorConfig) -> Option<Float> {
    let p = coeffs[0][0].prec();
    let k = cfg.order;
    let mut best: Option<Float> = None;
    for c in coeffs {
        let scale = if c[0].is_zero() {
            Float::with_val(p, 1)
        } else {
            Float::with_val(p, c[0].abs_ref())
        };
        let tol = Float::with_val(p, &cfg.local_tol * &scale);
        for j in [k - 1, k] {
            if c[j].is_zero() {
                continue;
            }
            let ratio = tol.clone() / Float::with_val(p, c[j].abs_ref());
            let h = ratio.root(j as u32);
            best = Some(match best {
                Some(b) if b < h => b,
                _ => h,
            });
        }
    }
    best.map(|h| h * 0.9f64)
}

fn local_error(coeffs: &[Vec<Float>; 4], h: &Float) -> Float {
    let p = h.prec();
    let k = coeffs[0].len() - 1;
    let hk1 = Float::with_val(p, rug::ops::Pow::pow(h, k as u32 - 1));
    let hk = Float::with_val(p, rug::ops::Pow::pow(h, k as u32));
    coeffs
        .iter()
        .map(|c| Float::with_val(p, c[k - 1].abs_ref()) * &hk1 + Float::with_val(p, c[k].abs_ref()) * &hk)
        .fold(Float::new(p), |a, b| if a > b { a } else { b })
}

fn eval_state(coeffs: &[Vec<Float>; 4], t: &Float, tau: &Float) -> FlowState {
    let p = t.prec();
    FlowState {
        t: Float::with_val(p, t + tau),
        x: horner(&coeffs[0], tau),
        y: horner(&coeffs[1], tau),
        w: horner(&coeffs[2], tau),
        z: horner(&coeffs[3], tau),
    }
}

/// `2Y − 3W` with the target 27 subtracted from the constant term.
fn event_poly(coeffs: &[Vec<Float>; 4]) -> Vec<Float> {
    let p = coeffs[0][0].prec();
    let mut g: Vec<Float> = coeffs[1]
        .iter()
        .zip(&coeffs[2])
        .map(|(y, w)| Float::with_val(p, y * 2u32) - Float::with_val(p, w * 3u32))
        .collect();
    g[0] -= 27u32;
    g
}

fn identity_check(coeffs: &[Vec<Float>; 4], h: &Float, err: &Float) -> (Float, Float) {
    let p = h.prec();
    let mid = Float::with_val(p, h / 2u32);
    let g = event_poly(coeffs);
    let dg = horner_derivative(&g, &mid);
    let x = horner(&coeffs[0], &mid);
    let y = horner(&coeffs[1], &mid);
    let w = horner(&coeffs[2], &mid);
    let e = Float::with_val(p, &y * 2u32) - Float::with_val(p, &w * 3u32);
    let rhs = Float::with_val(p, &x * 9u32)
        + Float::with_val(p, Float::with_val(p, &w + 9u32) * &e)
        + Float::with_val(p, &w * &y) * 2u32;
    let residual = Float::with_val(p, &dg - &rhs).abs();
    let ulp = Float::with_val(p, Float::i_exp(1, -(p as i32 - 16)));
    let floor = (Float::with_val(p, dg.abs_ref()) + rhs.abs() + 1u32) * ulp * coeffs[0].len() as u32;
    let bound = Float::with_val(p, err / h) * 10u32 + floor;
    (residual, bound)
}

/// Integrates from `s0` to the event `2y − 3w = 27`, returning the event and
/// per-step diagnostics.
pub fn integrate_with_trace(
    s0: &FlowState,
    cfg: &IntegratorConfig,
    local_order: usize,
    z_init: f64,
) -> Result<FlowRun> {
    let p = s0.prec();
    if s0.event_function() >= 27u32 {
        return Err(Error::InvalidArgument(
            "start state already satisfies 2y - 3w >= 27".into(),
        ));
    }
    let min_step = Float::with_val(p, Float::i_exp(1, -(p as i32 / 2)));
    let mut state = s0.clone();
    let mut steps = Vec::new();
    for _ in 0..cfg.max_steps {
        if state.t.to_f64() >= cfg.horizon {
            return Err(Error::EventNotReached {
                horizon: cfg.horizon,
            });
        }
        let coeffs = taylor_coefficients(&state, cfg.order);
        let remaining = Float::with_val(p, cfg.horizon) - &state.t;
        let cap = Float::with_val(p, cfg.max_step).min(&remaining);
        let h = match step_size(&coeffs, cfg) {
            Some(h) if h < cap => h,
            _ => cap,
        };
        if h < min_step {
            return Err(Error::StepUnderflow {
                t: state.t.to_f64(),
                h: h.to_f64(),
            });
        }
        let g = event_poly(&coeffs);
        let g_end = horner(&g, &h);
        let crossed = g_end.cmp0() != Some(Ordering::Less);
        let tau = if crossed { locate_root(&g, &h) } else { h.clone() };
        let err = local_error(&coeffs, &tau);
        let (identity_residual, identity_bound) = identity_check(&coeffs, &tau, &err);
        steps.push(StepRecord {
            start: state.clone(),
            h: tau.clone(),
            local_error: err,
            identity_residual,
            identity_bound,
        });
        state = eval_state(&coeffs, &state.t, &tau);
        if crossed {
            let state = polish_event(state, cfg.order);
            let event_residual = Float::with_val(p, state.event_function() - 27u32).abs();
            if event_residual > cfg.event_tol {
                return Err(Error::LocalExpansion(format!(
                    "event residual {:e} above tolerance {:e}",
                    event_residual.to_f64(),
                    cfg.event_tol.to_f64()
                )));
            }
            let local = local_taylor(&state, local_order, &cfg.event_tol)?;
            let t1 = Float::with_val(p, &state.t - &s0.t);
            return Ok(FlowRun {
                event: EventResult {
                    t1,
                    state,
                    event_residual,
                    local,
                    precision_bits: p,
                    z_init,
                    event_tol: cfg.event_tol.clone(),
                    local_tol: cfg.local_tol.clone(),
                },
                steps,
            });
        }
    }
    Err(Error::EventNotReached {
        horizon: state.t.to_f64(),
    })
}

pub fn integrate_to_event(
    s0: &FlowState,
    cfg: &IntegratorConfig,
    local_order: usize,
    z_init: f64,
) -> Result<EventResult> {
    integrate_with_trace(s0, cfg, local_order, z_init).map(|run| run.event)
}

/// Root of the event polynomial in `(0, h]`; `g(0) < 0 ≤ g(h)`.
fn locate_root(g: &[Float], h: &Float) -> Float {
    let p = h.prec();
    let mut lo = Float::new(p);
    let mut hi = h.clone();
    // bracket down to ~2^-24 relative, then Newton on the dense polynomial
    for _ in 0..24 {
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        if horner(g, &mid).cmp0() == Some(Ordering::Less) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = Float::with_val(p, &lo + &hi) / 2u32;
    let stop = Float::with_val(p, Float::i_exp(1, -(p as i32 - 4))) * h;
    for _ in 0..50 {
        let v = horner(g, &tau);
        let dv = horner_derivative(g, &tau);
        if dv.is_zero() {
            break;
        }
        let delta = Float::with_val(p, &v / &dv);
        tau -= &delta;
        if delta.abs() <= stop {
            break;
        }
    }
    tau.clamp(&Float::new(p), h)
}

/// Newton steps on freshly expanded polynomials at the located event.
fn polish_event(mut state: FlowState, order: usize) -> FlowState {
    let p = state.prec();
    let floor = Float::with_val(p, Float::i_exp(27, -(p as i32 - 8)));
    for _ in 0..6 {
        let coeffs = taylor_coefficients(&state, order.min(12));
        let g = event_poly(&coeffs);
        if Float::with_val(p, g[0].abs_ref()) <= floor {
            break;
        }
        let mut tau = Float::new(p);
        for _ in 0..8 {
            let v = horner(&g, &tau);
            let dv = horner_derivative(&g, &tau);
            tau -= v / dv;
        }
        state = eval_state(&coeffs, &state.t, &tau);
    }
    state
}

/// Order-`order` Taylor expansions of `x̂, ŷ, ŵ, ẑ` in `τ = t − t(s)`,
/// without any admissibility checks.
pub fn taylor_expansion(s: &FlowState, order: usize) -> LocalSeries {
    let [x, y, w, z] = taylor_coefficients(s, order);
    let mk = |c: Vec<Float>| TruncatedSeries::new("tau", c).expect("order >= 0");
    LocalSeries {
        x: mk(x),
        y: mk(y),
        w: mk(w),
        z: mk(z),
    }
}

/// Local expansion at the event. Checks `|b₁| ≤ b1_tol`, `b₂ < 0`, `c₁ > 0`.
pub fn local_taylor(s: &FlowState, order: usize, b1_tol: &Float) -> Result<LocalSeries> {
    if order < 2 {
        return Err(Error::InvalidArgument("local order must be at least 2".into()));
    }
    let local = taylor_expansion(s, order);
    let b = local.z.coeffs();
    if Float::with_val(s.prec(), b[1].abs_ref()) > *b1_tol {
        return Err(Error::LocalExpansion(format!(
            "b1 = {:e} exceeds tolerance; not at the event",
            b[1].to_f64()
        )));
    }
    if b[2].cmp0() != Some(Ordering::Less) {
        return Err(Error::LocalExpansion(format!(
            "b2 = {:e} must be negative",
            b[2].to_f64()
        )));
    }
    let c1 = local.w.coeff(1);
    if c1.cmp0() != Some(Ordering::Greater) {
        return Err(Error::LocalExpansion(format!(
            "c1 = {:e} must be positive",
            c1.to_f64()
        )));
    }
    Ok(local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::genus0_full;

    const P: u32 = 256;

    fn st(x: f64, y: f64, w: f64, z: f64) -> FlowState {
        let f = |v: f64| Float::with_val(P, v);
        FlowState::new(f(0.0), f(x), f(y), f(w), f(z))
    }

    #[test]
    fn field_at_vacuum() {
        let d = vector_field(&FlowState::vacuum(-3.0, P));
        assert_eq!(d.map(|v| v.to_f64()), [0.0, 0.0, 0.0, 27.0]);
    }

    #[test]
    fn field_at_ones() {
        let d = vector_field(&st(1.0, 1.0, 1.0, 0.0));
        assert_eq!(d.map(|v| v.to_f64()), [31.0, 29.0, 19.0, 28.0]);
    }

    #[test]
    fn z_rate_is_event_gap() {
        let s = st(0.3, 5.25, -1.5, 2.0);
        let d = vector_field(&s);
        assert_eq!(d[3], Float::with_val(P, 27u32) - s.event_function());
    }

    #[test]
    fn first_taylor_coefficients_are_the_field() {
        let s = st(0.7, 1.3, 0.4, -2.0);
        let c = taylor_coefficients(&s, 5);
        let d = vector_field(&s);
        for i in 0..4 {
            assert_eq!(c[i][1], d[i]);
        }
    }

    #[test]
    fn vacuum_expansion() {
        let l = taylor_expansion(&FlowState::vacuum(-1.0, P), 6);
        for s in [&l.x, &l.y, &l.w] {
            assert!(s.coeffs().iter().all(|c| c.is_zero()));
        }
        assert_eq!(l.z.coeff(1).to_f64(), 27.0);
        assert!(l.z.coeffs()[2..].iter().all(|c| c.is_zero()));
        let tol = Float::with_val(P, 1e-10);
        assert!(local_taylor(&FlowState::vacuum(-1.0, P), 6, &tol).is_err());
    }

    #[test]
    fn vacuum_never_reaches_event() {
        let cfg = IntegratorConfig::for_precision(P);
        let r = integrate_to_event(&FlowState::vacuum(-30.0, P), &cfg, 8, -30.0);
        assert!(matches!(r, Err(Error::EventNotReached { .. })));
    }

    #[test]
    fn init_deep_left() {
        let g0 = genus0_full(20, 40, P).unwrap();
        let s = init_state(-50.0, &g0, default_init_eps(-50.0, P), P).unwrap();
        let e = (-50.0f64).exp();
        let rel = |v: &Float, target: f64| ((v.to_f64() - target) / target).abs();
        let bound = (-45.0f64).exp();
        assert!(rel(&s.x, e) <= bound);
        assert!(rel(&s.y, e) <= bound);
        assert!(rel(&s.w, e / 2.0) <= bound);
        assert!(rel(&s.event_function(), e / 2.0) <= bound);
        assert!(init_state(-4.0, &g0, 1e-30, P).is_err());
    }

    #[test]
    fn event_from_minus_thirty() {
        let g0 = genus0_full(20, 60, P).unwrap();
        let s0 = init_state(-30.0, &g0, default_init_eps(-30.0, P), P).unwrap();
        let cfg = IntegratorConfig::for_precision(P);
        let ev = integrate_to_event(&s0, &cfg, 12, -30.0).unwrap();
        let zp = &vector_field(&ev.state)[3];
        assert!(Float::with_val(P, zp.abs_ref()) <= Float::with_val(P, 1e-30));
        let b2 = ev.b()[2].to_f64();
        assert!(b2 < 0.0);
        // b₂ = z″/2 = −(9x + 27(9 + w) + 2wy)/2 at the event
        let s = &ev.state;
        let expect = -(9.0 * s.x.to_f64() + 27.0 * (9.0 + s.w.to_f64()) + 2.0 * s.w.to_f64() * s.y.to_f64())
            / 2.0;
        assert!((b2 - expect).abs() < 1e-9 * expect.abs());
        let c1 = ev.c()[1].to_f64();
        let w = s.w.to_f64();
        let c1_expect = 3.0 * s.x.to_f64() + 6.0 * s.y.to_f64() + 9.0 * w + w * w;
        assert!((c1 - c1_expect).abs() < 1e-9 * c1_expect);
    }

    #[test]
    fn taylor_order_robustness() {
        let s = st(0.7, 1.3, 0.4, -2.0);
        let a = taylor_expansion(&s, 20);
        let b = taylor_expansion(&s, 24);
        for k in 0..=20 {
            assert_eq!(a.w.coeff(k), b.w.coeff(k));
            assert_eq!(a.z.coeff(k), b.z.coeff(k));
        }
    }
}
