use proptest::prelude::*;

use shock_core::gas::{lax_admissible, rh_residual_scaled, sigma_eps, sigma_star, EndState, GasParams, ShockData, ShockFamily};
use shock_core::linalg::eigen3;
use shock_core::slow_fast::{fast_f, layer_matrix, manifold_constant_a, reduced_logistic, FastState};
use shock_core::verify::one_shock_map;
use shock_core::wave::{jacobian_left, vector_field, PhaseState};

fn gas_strategy() -> impl Strategy<Value = GasParams> {
    (1.05f64..3.0, 0.2f64..5.0, 0.1f64..10.0, 0.1f64..10.0)
        .prop_map(|(g, r, mu, ka)| GasParams::new(r, g, mu, ka).unwrap())
}

fn case() -> impl Strategy<Value = (GasParams, EndState, f64)> {
    (gas_strategy(), 0.2f64..5.0, -5.0f64..5.0, 0.1f64..10.0, 1e-4f64..0.3).prop_map(|(gas, v, u, th, frac)| {
        let left = EndState::new(v, u, th, &gas).unwrap();
        (gas, left, frac * v)
    })
}

fn field_scale(shock: &ShockData, gas: &GasParams) -> f64 {
    let l = &shock.left;
    let s = shock.sigma_eps.abs();
    let m = gas.mu().min(gas.tau()).min(gas.kappa());
    l.v.max(shock.right.v) / m * (1.0 + s) * (1.0 + l.p) * (1.0 + l.u.abs() + l.theta) * (1.0 + s * l.v)
}

proptest! {
    #[test]
    fn hugoniot_closes_and_is_lax((gas, left, eps) in case()) {
        let shock = ShockData::three_shock(left, eps, &gas).unwrap();
        let res = rh_residual_scaled(&shock.left, &shock.right, shock.sigma_eps, &gas);
        prop_assert!(res.iter().all(|r| r.abs() < 1e-12), "{res:?}");
        prop_assert_eq!(lax_admissible(&shock.left, &shock.right), Some(ShockFamily::Three));
        prop_assert!(shock.sigma_eps > 0.0 && shock.sigma_eps < shock.sigma_star);
        prop_assert!((shock.right.v - shock.left.v - eps).abs() <= 1e-14 * shock.right.v);
        let mirror = shock.mirrored();
        prop_assert_eq!(lax_admissible(&mirror.left, &mirror.right), Some(ShockFamily::One));
    }

    #[test]
    fn speed_tends_to_characteristic((gas, left, eps) in case()) {
        let s0 = sigma_eps(&left, 0.0, &gas).unwrap();
        prop_assert!((s0 - sigma_star(&left, &gas)).abs() <= 1e-14 * s0);
        let s = sigma_eps(&left, eps, &gas).unwrap();
        let half = sigma_eps(&left, 0.5 * eps, &gas).unwrap();
        prop_assert!(s < half && half < s0);
    }

    #[test]
    fn field_vanishes_at_end_states((gas, left, eps) in case()) {
        let shock = ShockData::three_shock(left, eps, &gas).unwrap();
        let tol = 1e-13 * field_scale(&shock, &gas);
        for end in [shock.left, shock.right] {
            let s = PhaseState::new(end.v, end.u, end.theta).unwrap();
            let f = vector_field(&s, &shock, &gas);
            prop_assert!(f.iter().all(|x| x.abs() <= tol), "{f:?} vs {tol}");
        }
    }

    #[test]
    fn left_state_is_a_saddle_with_one_unstable_direction((gas, left, eps) in case()) {
        let shock = ShockData::three_shock(left, eps, &gas).unwrap();
        let e = eigen3(&jacobian_left(&shock, &gas));
        prop_assert_eq!(e.count_positive(), 1, "{:?}", e.values);
        prop_assert_eq!(e.count_negative(), 2, "{:?}", e.values);
    }

    #[test]
    fn layer_eigenvalues_are_stable((gas, left, _eps) in case()) {
        let lm = layer_matrix(&left, &gas);
        prop_assert!(lm.eigenvalues.iter().all(|z| z[0] < 0.0), "{:?}", lm.eigenvalues);
        let [[_, _], [c, d]] = lm.matrix;
        let [z1, z2] = lm.eigenvalues;
        prop_assert!((z1[0] + z2[0] - d).abs() <= 1e-12 * d.abs());
        let prod = z1[0] * z2[0] - z1[1] * z2[1];
        prop_assert!((prod + c).abs() <= 1e-12 * c.abs());
    }

    #[test]
    fn fast_f_vanishes_at_end_states((gas, left, eps) in case()) {
        let zero = FastState { w0: 0.0, w1: 0.0, w2: 0.0 };
        let one = FastState { w0: 1.0, w1: 0.0, w2: 0.0 };
        prop_assert_eq!(fast_f(&zero, eps, &left, &gas), 0.0);
        let scale = fast_f(&FastState { w0: 0.5, w1: 0.0, w2: 0.0 }, eps, &left, &gas).abs();
        let at_one = fast_f(&one, eps, &left, &gas);
        prop_assert!(at_one.abs() <= 1e-12 * scale.max(1.0), "{at_one} vs {scale}");
    }

    #[test]
    fn critical_manifold_is_a_zero_set((gas, left, _eps) in case(), w0 in -0.5f64..1.5) {
        let a = manifold_constant_a(&left, &gas);
        let w = FastState { w0, w1: a * (w0 - w0 * w0), w2: 0.0 };
        let scale = fast_f(&FastState { w0, w1: 0.0, w2: 0.0 }, 0.0, &left, &gas).abs();
        let f = fast_f(&w, 0.0, &left, &gas);
        prop_assert!(f.abs() <= 1e-12 * scale.max(1.0), "{f} vs {scale}");
    }

    #[test]
    fn one_shock_map_is_an_involution((gas, left, eps) in case()) {
        let shock = ShockData::three_shock(left, eps, &gas).unwrap();
        let once = one_shock_map(&shock);
        prop_assert_eq!(once.family, ShockFamily::One);
        prop_assert_eq!(one_shock_map(&once), shock);
        prop_assert_eq!(once.canonical(), shock);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn logistic_solves_reduced_flow(z in -40.0f64..40.0) {
        let a = 1.142_472_963_48;
        let w = reduced_logistic(z, a);
        let h = 1e-4;
        let d = (reduced_logistic(z + h, a) - reduced_logistic(z - h, a)) / (2.0 * h);
        prop_assert!((d - a * w * (1.0 - w)).abs() <= 1e-8, "z = {z}");
        prop_assert!((reduced_logistic(-z, a) - (1.0 - w)).abs() <= 1e-15);
    }
}
