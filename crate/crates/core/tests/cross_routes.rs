use g2kit_core::qfunction::{g2_via_q, g2_via_q_transient};
use g2kit_core::regression::{classify, g2_curve, g2_transient};
use g2kit_core::{Complex, MomentState, SystemParams, TauGrid};
use proptest::prelude::*;

fn stable() -> impl Strategy<Value = SystemParams> {
    (0.2f64..3.0, 0.0f64..0.45, 0.0f64..1.0, 0.0f64..core::f64::consts::TAU, 0.01f64..1.5)
        .prop_map(|(mu, frac, b, arg, extra)| SystemParams::new(mu, frac * mu, Complex::from_polar(b, arg), b + extra))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_route_equals_regression(p in stable(), tau_max in 0.5f64..20.0) {
        let grid = TauGrid::uniform(tau_max, 16).unwrap();
        let (q, r) = (g2_via_q(&p, &grid).unwrap(), g2_curve(&p, &grid).unwrap());
        for k in 0..grid.len() {
            prop_assert!((q.g2.as_ref().unwrap()[k] - r.g2.as_ref().unwrap()[k]).abs() <= 1e-8);
            prop_assert!((q.g1[k] - r.g1[k]).norm() <= 1e-8);
        }
    }

    #[test]
    fn transient_routes_agree(p in stable(), x in -1.0f64..1.0, y in -1.0f64..1.0, t in 0.0f64..3.0) {
        let grid = TauGrid::uniform(4.0, 8).unwrap();
        let s0 = MomentState::coherent(Complex::new(x, y));
        let q = g2_via_q_transient(&p, &s0, t, &grid);
        let r = g2_transient(&p, &s0, t, &grid);
        if let (Ok(q), Ok(r)) = (q, r) {
            for k in 0..grid.len() {
                let (a, b) = (q.g2.as_ref().unwrap()[k], r.g2.as_ref().unwrap()[k]);
                prop_assert!((a - b).abs() <= 1e-8 * b.max(1.0));
            }
        }
    }
}

#[test]
fn standard_curve_is_bunched_and_super_poissonian() {
    let p = SystemParams::real(1.0, 0.2, 0.0, 0.5);
    let curve = g2_curve(&p, &TauGrid::uniform(5.0, 100).unwrap()).unwrap();
    assert_eq!(classify(&curve, 1e-6).unwrap().to_string(), "bunched, super-Poissonian");
}
