//! `d`-th roots of both tables approach `e^{−x₀}` from either side.
//!
//! `cargo run --release --example root_convergence`

use gwasym::asymptotics::root_convergence;
use gwasym::config::RunConfig;
use gwasym::invariants::{genus0_full, genus1_full};
use gwasym::singularity::analyze;
use rug::Float;

fn main() -> gwasym::Result<()> {
    let cfg = RunConfig::default();
    let g0 = genus0_full(cfg.d_exact, cfg.d_float, cfg.precision_bits)?;
    let g1 = genus1_full(&g0, cfg.d_exact, cfg.d_float)?;
    let r = analyze(&g0, &cfg.singularity())?;
    let limit = Float::with_val(64, -&r.x0).exp();
    println!("e^-x0 = {:.12}", limit.to_f64());

    let diag = root_convergence(&g0, &g1, &r.x0)?;
    println!("{:>6} {:>14} {:>14} {:>11} {:>11}", "d", "root0", "root1", "gap0", "gap1");
    for (i, d) in diag.degrees.iter().enumerate() {
        if d % 500 == 0 || *d <= 5 {
            println!(
                "{d:>6} {:>14.10} {:>14.10} {:>11.3e} {:>11.3e}",
                diag.root0[i], diag.root1[i], diag.gap0[i], diag.gap1[i]
            );
        }
    }
    for c in diag.checks(cfg.root_gap_threshold) {
        println!("{}", c.line());
    }
    Ok(())
}
