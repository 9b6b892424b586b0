//! Locates the singularity `x₀` by the flow and by truncated series roots,
//! then extracts the expansion coefficients for both genera.
//!
//! `cargo run --release --example singularity`

use gwasym::config::RunConfig;
use gwasym::invariants::genus0_full;
use gwasym::singularity::analyze;

fn main() -> gwasym::Result<()> {
    let cfg = RunConfig::default();
    let g0 = genus0_full(cfg.d_exact, cfg.d_float, cfg.precision_bits)?;
    let r = analyze(&g0, &cfg.singularity())?;

    println!("x0 (flow)   = {}", r.x0.to_string_radix(10, Some(60)));
    if let Some(alt) = &r.x0_alt {
        println!("x0 (series) = {}", alt.to_string_radix(10, Some(20)));
    }
    println!("F0(x0) = {:.15}, F0'(x0) = {:.15}", r.f0_at_x0.to_f64(), r.f0prime_at_x0.to_f64());
    for (i, a) in r.a0.iter().enumerate() {
        println!("a0[{}] = {:+.12e}", i + 3, a.to_f64());
    }
    for (i, a) in r.a1.iter().enumerate() {
        println!("a1[{i}] = {:+.12e}", a.to_f64());
    }
    for c in &r.checks {
        println!("{}", c.line());
    }
    Ok(())
}
