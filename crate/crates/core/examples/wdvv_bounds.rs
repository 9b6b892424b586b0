//! Structural checks on the genus-0 table: the differential identity of the
//! generating function holds exactly, every entry sits between the two
//! comparison bounds, and the comparison sequences match their Catalan
//! closed forms.
//!
//! `cargo run --release --example wdvv_bounds -- 150`

use rug::Rational;

use gwasym::invariants::{comparison_sequence, genus0_table, verify_bounds, verify_wdvv_series, ComparisonSpec};

fn main() -> gwasym::Result<()> {
    let dmax: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(120);
    let g0 = genus0_table(dmax)?;

    let order = dmax.min(60);
    let res = verify_wdvv_series(&g0, order)?;
    match res.first_nonzero() {
        None => println!("identity residual vanishes through q^{order}"),
        Some(d) => println!("identity residual nonzero at q^{d}"),
    }

    let v = verify_bounds(&g0);
    println!("bound violations for d <= {dmax}: {}", v.len());
    for b in v.iter().take(5) {
        println!("  d = {} {:?}", b.d, b.side);
    }

    let seed = Rational::from((1, 2));
    for spec in [
        ComparisonSpec::unit(seed.clone()),
        ComparisonSpec::lower(seed.clone()),
        ComparisonSpec::upper(seed),
    ] {
        let t = comparison_sequence(&spec, 30)?;
        println!(
            "comparison {:>4}: closed form holds to d = 30, n_30 = {:.6e}",
            spec.name,
            t.values[29].to_f64()
        );
    }
    Ok(())
}
