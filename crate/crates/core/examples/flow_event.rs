//! Integrates the flow from a starting point deep in the convergent region
//! to the event `2y − 3w = 27`, and prints the per-step diagnostics.
//!
//! `cargo run --release --example flow_event -- 256 -30`

use gwasym::flow::{default_init_eps, init_state, integrate_with_trace, IntegratorConfig};
use gwasym::invariants::genus0_table;

fn main() -> gwasym::Result<()> {
    let mut args = std::env::args().skip(1);
    let prec: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);
    let z_init: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(-30.0);

    let g0 = genus0_table(200)?;
    let s0 = init_state(z_init, &g0, default_init_eps(z_init, prec), prec)?;
    let cfg = IntegratorConfig::for_precision(prec);
    let run = integrate_with_trace(&s0, &cfg, 24, z_init)?;

    let worst = run
        .steps
        .iter()
        .map(|s| s.identity_residual.to_f64() / s.identity_bound.to_f64())
        .fold(0.0, f64::max);
    let ev = &run.event;
    println!("steps: {}", run.steps.len());
    println!("worst identity residual / bound: {worst:.3e}");
    println!("t1 = {}", ev.t1.to_string_radix(10, Some(30)));
    println!("x0 = z(t1) = {}", ev.state.z.to_string_radix(10, Some(50)));
    println!("event residual: {:.3e}", ev.event_residual.to_f64());
    println!("b2 = {:.15}  c0 = {:.15}  c1 = {:.15}", ev.b()[2].to_f64(), ev.c()[0].to_f64(), ev.c()[1].to_f64());
    Ok(())
}
