//! Exact genus-0 and genus-1 invariants of the plane, with the classical
//! rational-curve counts recovered from them.
//!
//! `cargo run --release --example invariants -- 12`

use rug::{Integer, Rational};

use gwasym::invariants::{genus0_table, genus1_table};

fn main() -> gwasym::Result<()> {
    let dmax: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let g0 = genus0_table(dmax)?;
    let g1 = genus1_table(dmax, &g0)?;
    println!("{:>3}  {:>28}  {:>28}  N_d = n_0,d (3d-1)!", "d", "n_0,d", "n_1,d");
    for d in 1..=dmax {
        let n0 = g0.exact(d).expect("in range");
        let n1 = g1.exact(d).expect("in range");
        let count = Rational::from(n0 * Integer::from(Integer::factorial(3 * d as u32 - 1)));
        println!("{d:>3}  {:>28}  {:>28}  {count}", short(n0), short(n1));
    }
    Ok(())
}

fn short(q: &Rational) -> String {
    let s = q.to_string();
    if s.len() <= 28 {
        s
    } else {
        format!("{:.6e}", q.to_f64())
    }
}
