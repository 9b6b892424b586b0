#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rug::Rational;

use gwasym::series::{PuiseuxSeries, TruncatedSeries};

pub const CASES: u32 = 100;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rational::from((n, d)))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=30, 1i64..=12, any::<bool>()).prop_map(|(n, d, neg)| Rational::from((if neg { -n } else { n }, d)))
}

fn series_of(order: usize) -> impl Strategy<Value = TruncatedSeries<Rational>> {
    proptest::collection::vec(rational(), order + 1).prop_map(|c| TruncatedSeries::new("x", c).expect("nonempty"))
}

/// Three series of a common order.
pub fn series_triple() -> impl Strategy<Value = [TruncatedSeries<Rational>; 3]> {
    (0usize..=8).prop_flat_map(|n| (series_of(n), series_of(n), series_of(n)).prop_map(|(a, b, c)| [a, b, c]))
}

/// A series with zero constant term and invertible linear term.
pub fn invertible_series() -> impl Strategy<Value = TruncatedSeries<Rational>> {
    (1usize..=8).prop_flat_map(|n| {
        (nonzero_rational(), proptest::collection::vec(rational(), n - 1)).prop_map(|(a1, rest)| {
            let mut c = vec![Rational::new(), a1];
            c.extend(rest);
            TruncatedSeries::new("x", c).expect("nonempty")
        })
    })
}

fn puiseux() -> impl Strategy<Value = PuiseuxSeries<Rational>> {
    (-6i64..=6, nonzero_rational(), proptest::collection::vec(rational(), 0..6)).prop_map(|(m, lead, rest)| {
        let mut c = vec![lead];
        c.extend(rest);
        PuiseuxSeries::new("s", m, c)
    })
}

pub fn puiseux_pair() -> impl Strategy<Value = (PuiseuxSeries<Rational>, PuiseuxSeries<Rational>)> {
    (puiseux(), puiseux())
}

fn check(cond: bool, what: &str) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

fn lift(e: gwasym::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub fn ring_axioms([a, b, c]: [TruncatedSeries<Rational>; 3]) -> Result<(), TestCaseError> {
    let n = a.order();
    let zero = TruncatedSeries::zero("x", &Rational::new(), n);
    let mut one_c = vec![Rational::new(); n + 1];
    one_c[0] = Rational::from(1);
    let one = TruncatedSeries::new("x", one_c).map_err(lift)?;

    let add = |p: &TruncatedSeries<Rational>, q: &TruncatedSeries<Rational>| p.add(q).map_err(lift);
    let mul = |p: &TruncatedSeries<Rational>, q: &TruncatedSeries<Rational>| p.mul(q).map_err(lift);

    check(add(&a, &b)? == add(&b, &a)?, "addition commutes")?;
    check(add(&add(&a, &b)?, &c)? == add(&a, &add(&b, &c)?)?, "addition associates")?;
    check(mul(&a, &b)? == mul(&b, &a)?, "multiplication commutes")?;
    check(mul(&mul(&a, &b)?, &c)? == mul(&a, &mul(&b, &c)?)?, "multiplication associates")?;
    check(
        mul(&a, &add(&b, &c)?)? == add(&mul(&a, &b)?, &mul(&a, &c)?)?,
        "distributivity",
    )?;
    check(add(&a, &zero)? == a, "additive identity")?;
    check(mul(&a, &one)? == a, "multiplicative identity")?;
    check(add(&a, &a.neg())? == zero, "additive inverse")?;
    Ok(())
}

pub fn reversion_round_trip(f: TruncatedSeries<Rational>) -> Result<(), TestCaseError> {
    let g = f.revert().map_err(lift)?;
    let mut id = vec![Rational::new(); f.order() + 1];
    id[1] = Rational::from(1);
    let id = TruncatedSeries::new("x", id).map_err(lift)?;
    check(f.compose(&g).map_err(lift)? == id, "f(g(x)) = x")?;
    check(g.compose(&f).map_err(lift)? == id, "g(f(x)) = x")?;
    Ok(())
}

pub fn puiseux_division_law((a, b): (PuiseuxSeries<Rational>, PuiseuxSeries<Rational>)) -> Result<(), TestCaseError> {
    let q = a.div(&b).map_err(lift)?;
    check(
        q.min_half_exponent() == a.min_half_exponent() - b.min_half_exponent(),
        "leading exponents subtract",
    )?;
    let lead = Rational::from(a.leading().expect("nonzero") / b.leading().expect("nonzero"));
    check(q.leading() == Some(&lead), "leading coefficients divide")?;
    // q·b reproduces a to the known order
    let back = q.mul(&b).map_err(lift)?;
    for k in a.min_half_exponent()..=back.order().min(a.order()) {
        check(back.coeff(k) == a.coeff(k), "quotient times divisor")?;
    }
    Ok(())
}
