//! Compares the asymptotic expansions with the float tables through
//! `d = 5000`: leading ratios, fitted remainder orders, and dominance of
//! longer expansions. Writes plot data to `asymptotics.csv`.
//!
//! `cargo run --release --example asymptotics`

use gwasym::asymptotics::{plot_csv, plot_rows, validate, AsymptoticModel, ValidationParams};
use gwasym::config::RunConfig;
use gwasym::invariants::{genus0_full, genus1_full};
use gwasym::singularity::analyze;

fn main() -> gwasym::Result<()> {
    let cfg = RunConfig::default();
    let g0 = genus0_full(cfg.d_exact, cfg.d_float, cfg.precision_bits)?;
    let g1 = genus1_full(&g0, cfg.d_exact, cfg.d_float)?;
    let r = analyze(&g0, &cfg.singularity())?;

    let v = validate(&g0, &g1, &r.x0, &r.a0, &r.a1, &ValidationParams::default())?;
    for (name, slope) in &v.slopes {
        println!("{name:<24} {slope:+.5}");
    }
    for c in &v.checks {
        println!("{}", c.line());
    }

    let m0 = AsymptoticModel::genus0(&r.x0, &r.a0, cfg.terms)?;
    let m1 = AsymptoticModel::genus1(&r.x0, &r.a1, cfg.terms)?;
    let mut rows = plot_rows(&g0, &m0, 1..=cfg.d_float)?;
    rows.extend(plot_rows(&g1, &m1, 3..=cfg.d_float)?);
    std::fs::write("asymptotics.csv", plot_csv(&rows))?;
    println!("wrote {} rows to asymptotics.csv", rows.len());
    Ok(())
}
