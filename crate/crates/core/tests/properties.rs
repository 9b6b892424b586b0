use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Float, Rational};

use gwasym::asymptotics::AsymptoticModel;
use gwasym::config::RunConfig;
use gwasym::invariants::{
    genus0_full, genus0_table, genus1_full, genus1_table, kontsevich_weight, ComparisonSpec, ScaledValue,
};
use gwasym::series::SeriesEvaluator;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(100) })]

    #[test]
    fn weight_is_symmetric_and_positive(d1 in 1u64..3000, d2 in 1u64..3000) {
        let w = kontsevich_weight(d1, d2).unwrap();
        prop_assert_eq!(&w, &kontsevich_weight(d2, d1).unwrap());
        prop_assert!(w > 0);
    }

    #[test]
    fn comparison_weights_are_positive(d in 1u64..100_000) {
        let seed = Rational::from((1, 2));
        for spec in [ComparisonSpec::unit(seed.clone()), ComparisonSpec::lower(seed.clone()), ComparisonSpec::upper(seed.clone())] {
            prop_assert!((spec.weight)(d) > 0, "{} at d = {}", spec.name, d);
        }
    }

    #[test]
    fn scaled_value_roundtrip(mant in 1.0f64..2.0, exp in -20_000i32..20_000, prec in 64u32..400) {
        let v = Float::with_val(prec, mant) * Float::with_val(prec, Float::i_exp(1, exp));
        let s = ScaledValue::from_float(&v).unwrap();
        prop_assert_eq!(s.to_float(prec), v);
        prop_assert!(s.mantissa >= 1 && s.mantissa < std::f64::consts::E);
    }

    #[test]
    fn model_leading_terms(x0 in 1.0f64..3.0, a in -10.0f64..10.0, d in 1usize..100_000) {
        let prec = 192;
        let x0 = Float::with_val(prec, x0);
        let a = [Float::with_val(prec, a)];
        // the genus-1 model without corrections is 1/(48d) up to rounding
        let m1 = AsymptoticModel::genus1(&x0, &[], 0).unwrap();
        let lead = Float::with_val(prec, 48 * d).recip();
        let rel = (Float::with_val(prec, m1.rescaled(d) - &lead) / &lead).abs();
        prop_assert!(rel <= Float::with_val(prec, Float::i_exp(1, 4 - prec as i32)));
        // the shortest genus-0 model is a⁰_3 d^{-7/2}
        let m0 = AsymptoticModel::genus0(&x0, &a, 4).unwrap();
        let back = m0.rescaled(d) * Float::with_val(prec, d).pow(3.5f64);
        let err = Float::with_val(prec, back - &a[0]).abs().to_f64();
        prop_assert!(err <= 1e-50 * a[0].to_f64().abs().max(1.0));
    }

    #[test]
    fn evaluator_honors_budget(z in -20.0f64..-5.0, k in 5i32..60, which in 0usize..3) {
        let prec = 256;
        let g0 = genus0_full(60, 400, prec).unwrap();
        let ev = SeriesEvaluator::new(&g0, prec);
        let z = Float::with_val(prec, z);
        let budget = 10f64.powi(-k);
        let eval = |err: f64| match which {
            0 => ev.eval_x(&z, err),
            1 => ev.eval_y(&z, err),
            _ => ev.eval_w(&z, err),
        }
        .unwrap();
        let rough = eval(budget);
        let fine = eval(budget * 1e-30);
        prop_assert!(Float::with_val(prec, rough - fine).abs().to_f64() <= budget);
    }

    #[test]
    fn config_validation_matches_constraints(
        prec in 0u32..512,
        d_exact in 0usize..400,
        d_float in 0usize..400,
        terms in 0usize..12,
        z_init in -60.0f64..5.0,
    ) {
        let cfg = RunConfig { precision_bits: prec, d_exact, d_float, terms, z_init, ..Default::default() };
        let ok = prec >= 64 && d_exact >= 1 && d_exact <= d_float && terms >= 4 && z_init <= -5.0;
        prop_assert_eq!(cfg.validate().is_ok(), ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn table_prefixes_and_signs(n in 1usize..80) {
        let full0 = genus0_table(80).unwrap();
        let full1 = genus1_table(80, &full0).unwrap();
        let g0 = genus0_table(n).unwrap();
        let g1 = genus1_table(n, &g0).unwrap();
        prop_assert_eq!(g0.exact_values(), &full0.exact_values()[..n]);
        prop_assert_eq!(g1.exact_values(), &full1.exact_values()[..n]);
        prop_assert_eq!(g0.exact(1), Some(&Rational::from((1, 2))));
        prop_assert!(g0.exact_values().iter().all(|v| *v > 0));
        prop_assert!(g1.exact_values().iter().all(|v| *v >= 0));
        prop_assert!(g1.exact_values().iter().take(2).all(|v| *v == 0));
    }

    #[test]
    fn float_entries_track_exact_ones(prec in 64u32..320, n in 1usize..120) {
        let g0 = genus0_full(n, n, prec).unwrap();
        let g1 = genus1_full(&g0, n, n).unwrap();
        prop_assert_eq!(g0.scaled_exact_mismatch(2.0), None);
        prop_assert_eq!(g1.scaled_exact_mismatch(2.0), None);
    }
}
