//! Truncated power series and Puiseux inversion near a fold.
//!
//! Reverts `sin`'s Taylor polynomial exactly over the rationals, then
//! inverts `z(τ) = 1 − τ² + τ³/3` near its critical point, giving
//! `τ(s) = −s^{1/2} + …` with `s = 1 − z`.
//!
//! `cargo run --example series_reversion`

use rug::{Float, Rational};

use gwasym::series::{revert_even, TruncatedSeries};

fn main() -> gwasym::Result<()> {
    let order = 9;
    let mut sin = Vec::new();
    let mut fact = Rational::from(1);
    for k in 0..=order {
        if k > 0 {
            fact *= k as u32;
        }
        sin.push(match k % 4 {
            1 => Rational::from(fact.recip_ref()),
            3 => -Rational::from(fact.recip_ref()),
            _ => Rational::new(),
        });
    }
    let sin = TruncatedSeries::new("x", sin)?;
    let asin = sin.revert()?;
    println!("arcsin x = {}", render(asin.coeffs()));
    let round = sin.compose(&asin)?;
    println!("sin(arcsin x) = {}", render(round.coeffs()));

    let prec = 128;
    let f = |v: f64| Float::with_val(prec, v);
    let z = TruncatedSeries::new("tau", vec![f(1.0), f(0.0), f(-1.0), Float::with_val(prec, 1) / 3u32, f(0.0), f(0.0), f(0.0), f(0.0)])?;
    let tau = revert_even(&z, &f(1e-30))?;
    println!("tau(s) with s = 1 - z, half-exponents from {}:", tau.min_half_exponent());
    for (i, c) in tau.coeffs().iter().enumerate() {
        println!("  s^({}/2): {:.12}", tau.min_half_exponent() + i as i64, c.to_f64());
    }
    Ok(())
}

fn render(c: &[Rational]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, q)| q.cmp0() != std::cmp::Ordering::Equal)
        .map(|(k, q)| format!("({q}) x^{k}"))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}
