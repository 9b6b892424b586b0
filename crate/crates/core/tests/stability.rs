use rug::Float;

use gwasym::invariants::genus0_full;
use gwasym::singularity::{analyze, SingularityConfig};

/// Leading coefficients must not move when the local expansion order grows.
#[test]
fn leading_coefficients_stable_in_local_order() {
    let g0 = genus0_full(200, 200, 256).unwrap();
    let base = SingularityConfig::default();
    let k = base.local_order();
    let run = |order: usize| {
        let cfg = SingularityConfig {
            local_order: Some(order),
            ..base.clone()
        };
        analyze(&g0, &cfg).unwrap()
    };
    let (a, b) = (run(k), run(k + 4));
    let pairs = [
        ("a0_3", &a.a0[0], &b.a0[0]),
        ("a0_4", &a.a0[1], &b.a0[1]),
        ("a1_0", &a.a1[0], &b.a1[0]),
    ];
    for (name, u, v) in pairs {
        let gap = Float::with_val(256, u - v).abs().to_f64();
        assert!(gap <= 1e-10, "{name}: orders {k} and {} differ by {gap:e}", k + 4);
    }
    assert_eq!(a.x0, b.x0);
}
