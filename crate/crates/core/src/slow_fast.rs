//! Slow-fast form of the profile equation for the volume.
//!
//! With `w0 = (v - v_-)/eps`, `w1 = v'/eps^2`, `w2 = v''/eps^2` and the slow
//! variable `z = eps xi`, the third-order equation for `v` becomes
//!
//! ```text
//! dw0/dz = w1,   eps dw1/dz = w2,   eps dw2/dz = f(w, eps)
//! ```
//!
//! The critical manifold `{w2 = 0, f = 0}` is the graph `w1 = A (w0 - w0^2)`,
//! so at leading order the profile is a logistic curve with rate `A`.

use serde::Serialize;

use crate::gas::{sigma_eps, sigma_star, EndState, GasParams, ShockData};
use crate::shooting::Profile;
use crate::wave::second_derivative;

/// Compact set containing the rescaled volume along profiles.
pub const K_SET: (f64, f64) = (-0.5, 1.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FastState {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

/// `f(w, eps)`, finite at `eps = 0`.
///
/// Written so that no term divides by `eps`: the `O(eps)` part of the
/// Hugoniot relation for `sigma_eps^2` is expanded by hand.
pub fn fast_f(w: &FastState, eps: f64, left: &EndState, gas: &GasParams) -> f64 {
    let FastState { w0, w1, w2 } = *w;
    let (r, g) = (gas.r(), gas.gamma());
    let (mu, tau, ka) = (gas.mu(), gas.tau(), gas.kappa());
    let (vm, pm) = (left.v, left.p);
    let s = sigma_eps(left, eps.max(0.0), gas).unwrap_or(f64::NAN);
    let s2 = s * s;
    let vv = eps * w0 + vm;
    let mtk = mu * tau * ka;

    // (gamma p_- - s^2 v_-) / eps, using s^2 = gamma p_- / (v_- + (gamma+1) eps / 2)
    let jump = g * pm * 0.5 * (g + 1.0) / (vm + 0.5 * (g + 1.0) * eps);
    let je = r * s / (g - 1.0)
        * (vm * vm * w0 * jump + (eps * w0 * w0 + 2.0 * w0 * vm) * w0 * (g * pm - s2 * vm)
            - vv * vv * s2 * w0 * w0);
    let t2 = r * s * vv.powi(3) / ((g - 1.0) * ka)
        * (-s * (mu + tau) / (mu * tau) * w1 / vv - w2 / (vv * vv)
            + eps * eps * w1 * w1 / vv.powi(3));
    let t3 = r * vv * vv / mtk
        * (-0.5 * s2 * s * w0 * w0 - eps * s2 * tau * w0 * w1 / vv
            - 0.5 * eps * eps * tau * tau * s * w1 * w1 / (vv * vv)
            + pm * tau * w1 / vv);
    let t4 = vv
        * ((1.0 / (mu * tau)) * ((pm - s2 * vm - 2.0 * eps * s2 * w0) * w1 - s * (mu + tau) * w2)
            + eps * eps * 3.0 * w1 * w2 / (vv * vv)
            - eps.powi(4) * 2.0 * w1.powi(3) / vv.powi(3));
    je / mtk + t2 + t3 + t4
}

/// The rescaled field `(w0', w1', w2')` in the slow variable.
///
/// For `eps > 0` this is `(w1, w2/eps, f/eps)`; at `eps = 0` the undivided
/// components `(w1, w2, f)` are returned.
pub fn fast_field(w: &FastState, eps: f64, left: &EndState, gas: &GasParams) -> [f64; 3] {
    let f = fast_f(w, eps, left, gas);
    if eps > 0.0 {
        [w.w1, w.w2 / eps, f / eps]
    } else {
        [w.w1, w.w2, f]
    }
}

/// Rate `A` of the reduced logistic flow.
pub fn manifold_constant_a(left: &EndState, gas: &GasParams) -> f64 {
    let (r, g) = (gas.r(), gas.gamma());
    let ss = sigma_star(left, gas);
    r * g * ss * 0.5 * (g + 1.0) / (r * gas.tau() + r * g * gas.mu() + (g - 1.0).powi(2) * gas.kappa())
}

pub fn critical_manifold_w1(w0: f64, a: f64) -> f64 {
    a * (w0 - w0 * w0)
}

/// Linearization of the layer problem in `(w1, w2)` with its eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerMatrix {
    pub matrix: [[f64; 2]; 2],
    /// `(re, im)` pairs, larger real part first.
    pub eigenvalues: [[f64; 2]; 2],
}

pub fn layer_matrix(left: &EndState, gas: &GasParams) -> LayerMatrix {
    let (r, g) = (gas.r(), gas.gamma());
    let (mu, tau, ka) = (gas.mu(), gas.tau(), gas.kappa());
    let mtk = mu * tau * ka;
    let ss = sigma_star(left, gas);
    let c = -(left.v * left.p / (g - 1.0)) * (r * tau + r * g * mu + (g - 1.0).powi(2) * ka) / mtk;
    let d = -(ss * left.v / mtk) * (r * mu * tau / (g - 1.0) + (mu + tau) * ka);
    // x^2 - d x - c = 0
    let disc = d * d + 4.0 * c;
    let eigenvalues = if disc >= 0.0 {
        let sq = disc.sqrt();
        // avoid cancellation in the smaller-magnitude root
        let big = 0.5 * (d - sq.copysign(-d));
        let small = if big != 0.0 { -c / big } else { 0.0 };
        let (hi, lo) = if small >= big { (small, big) } else { (big, small) };
        [[hi, 0.0], [lo, 0.0]]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [[0.5 * d, im], [0.5 * d, -im]]
    };
    LayerMatrix {
        matrix: [[0.0, 1.0], [c, d]],
        eigenvalues,
    }
}

/// Logistic solution with `w0(0) = 1/2`.
pub fn reduced_logistic(z: f64, a: f64) -> f64 {
    let x = a * z;
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescaledSample {
    pub z: f64,
    pub w: FastState,
}

/// Slow-variable samples of a profile; `v''` comes from the field, not from
/// differencing.
pub fn rescale_profile(p: &Profile, shock: &ShockData) -> Vec<RescaledSample> {
    let eps = shock.eps;
    let vm = shock.left.v;
    p.xi
        .iter()
        .zip(&p.states)
        .zip(&p.derivs)
        .map(|((&x, s), d)| {
            let vpp = second_derivative(s, shock, &p.gas)[0];
            RescaledSample {
                z: eps * x,
                w: FastState {
                    w0: (s.v - vm) / eps,
                    w1: d[0] / (eps * eps),
                    w2: vpp / (eps * eps),
                },
            }
        })
        .collect()
}

/// Sup-norm distances from the critical manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManifoldResidual {
    /// `sup |w1 - A (w0 - w0^2)|`
    pub r1: f64,
    /// `sup |w2|`
    pub r2: f64,
}

pub fn slow_manifold_residual(p: &Profile, shock: &ShockData, gas: &GasParams) -> ManifoldResidual {
    let a = manifold_constant_a(&shock.left, gas);
    manifold_residual_of(&rescale_profile(p, shock), a)
}

pub fn manifold_residual_of(samples: &[RescaledSample], a: f64) -> ManifoldResidual {
    samples.iter().fold(ManifoldResidual { r1: 0.0, r2: 0.0 }, |acc, s| ManifoldResidual {
        r1: acc.r1.max((s.w.w1 - critical_manifold_w1(s.w.w0, a)).abs()),
        r2: acc.r2.max(s.w.w2.abs()),
    })
}

/// `sup_z |w0(z) - 1/(1 + exp(-A z))|` over the profile nodes.
pub fn logistic_deviation(p: &Profile, shock: &ShockData, gas: &GasParams) -> f64 {
    let a = manifold_constant_a(&shock.left, gas);
    p.xi
        .iter()
        .zip(&p.states)
        .map(|(&x, s)| ((s.v - shock.left.v) / shock.eps - reduced_logistic(shock.eps * x, a)).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::{theta_from_v, PhaseState};
    use approx::assert_relative_eq;

    fn p0() -> (GasParams, EndState) {
        let gas = GasParams::new(1.0, 5.0 / 3.0, 1.0, 1.0).unwrap();
        let left = EndState::new(1.0, 0.0, 1.0, &gas).unwrap();
        (gas, left)
    }

    const A_P0: f64 = 1.142_472_963_48;

    #[test]
    fn constant_a_values() {
        let (gas, left) = p0();
        assert_relative_eq!(manifold_constant_a(&left, &gas), A_P0, epsilon = 1e-10);
        let far = EndState::new(4.0, 0.0, 1.0, &gas).unwrap();
        assert_relative_eq!(manifold_constant_a(&far, &gas), A_P0 / 4.0, epsilon = 1e-10);
        let air = GasParams::new(1.0, 1.4, 1.0, 1.0).unwrap();
        let l = EndState::new(1.0, 0.0, 1.0, &air).unwrap();
        assert_relative_eq!(manifold_constant_a(&l, &air), 1.0769829, epsilon = 1e-7);
    }

    #[test]
    fn constant_a_second_route() {
        let (gas, left) = p0();
        let (g, r) = (gas.gamma(), gas.r());
        let s = sigma_star(&left, &gas);
        let a = s.powi(3) * (g + 1.0) / (2.0 * (g - 1.0)) * (left.v / left.p)
            / (g * gas.mu() / (g - 1.0) + gas.tau() / (g - 1.0) + (g - 1.0) * gas.kappa() / r);
        assert_relative_eq!(a, manifold_constant_a(&left, &gas), max_relative = 1e-14);
    }

    #[test]
    fn critical_manifold_points() {
        assert_eq!(critical_manifold_w1(0.0, A_P0), 0.0);
        assert_eq!(critical_manifold_w1(1.0, A_P0), 0.0);
        assert_relative_eq!(critical_manifold_w1(0.5, A_P0), 0.285_618_240_87, epsilon = 1e-10);
    }

    #[test]
    fn fast_field_zeros() {
        let (gas, left) = p0();
        for eps in [0.0, 0.0125, 0.05, 0.1, 0.2] {
            let z = FastState { w0: 0.0, w1: 0.0, w2: 0.0 };
            assert_eq!(fast_f(&z, eps, &left, &gas), 0.0);
            let one = FastState { w0: 1.0, w1: 0.0, w2: 0.0 };
            assert!(fast_f(&one, eps, &left, &gas).abs() < 1e-12, "{eps}");
        }
        let a = manifold_constant_a(&left, &gas);
        let mid = FastState { w0: 0.5, w1: a / 4.0, w2: 0.0 };
        assert!(fast_f(&mid, 0.0, &left, &gas).abs() < 1e-12);
        let f = fast_field(&mid, 0.0, &left, &gas);
        assert_eq!(f[0], a / 4.0);
    }

    #[test]
    fn fast_f_matches_unscaled_third_derivative() {
        // v''' from the temperature equation, divided by eps^2
        let (gas, left) = p0();
        let eps = 0.05;
        let shock = ShockData::three_shock(left, eps, &gas).unwrap();
        let (mu, tau, r) = (gas.mu(), gas.tau(), gas.r());
        let s = shock.sigma_eps;
        for &(w0, w1, w2) in &[(0.3, 0.2, 0.01), (0.7, 0.25, -0.02), (0.5, 0.28, 0.0)] {
            let v = left.v + eps * w0;
            let vp = eps * eps * w1;
            let vpp = eps * eps * w2;
            let u = crate::wave::u_from_v(v, vp, &shock, &gas);
            let (theta, _) = theta_from_v(v, vp, vpp, None, &shock, &gas);
            let st = PhaseState::from_array([v, u, theta]);
            let dth = crate::wave::vector_field(&st, &shock, &gas)[2];
            let vppp = v / (mu * tau)
                * ((left.p - 2.0 * s * s * v + s * s * left.v) * vp - s * (mu + tau) * vpp - r * dth)
                + 3.0 * vp * vpp / v
                - 2.0 * vp.powi(3) / (v * v);
            let f = fast_f(&FastState { w0, w1, w2 }, eps, &left, &gas);
            assert_relative_eq!(f, vppp / (eps * eps), epsilon = 1e-8, max_relative = 1e-6);
        }
    }

    #[test]
    fn layer_matrix_values() {
        let (gas, left) = p0();
        let l = layer_matrix(&left, &gas);
        assert_eq!(l.matrix[0], [0.0, 1.0]);
        assert_relative_eq!(l.matrix[1][0], -9.4166667, epsilon = 1e-7);
        assert_relative_eq!(l.matrix[1][1], -6.4549722, epsilon = 1e-7);
        assert_relative_eq!(l.eigenvalues[0][0], -2.2274861, epsilon = 1e-7);
        assert_relative_eq!(l.eigenvalues[1][0], -4.2274861, epsilon = 1e-7);
        assert_eq!(l.eigenvalues[0][1], 0.0);
    }

    #[test]
    fn layer_matrix_matches_fast_f_derivatives() {
        let (gas, left) = p0();
        let a = manifold_constant_a(&left, &gas);
        let h = 1e-6;
        let at = |w1: f64, w2: f64| fast_f(&FastState { w0: 0.3, w1, w2 }, 0.0, &left, &gas);
        let w1 = critical_manifold_w1(0.3, a);
        let l = layer_matrix(&left, &gas);
        assert_relative_eq!((at(w1 + h, 0.0) - at(w1 - h, 0.0)) / (2.0 * h), l.matrix[1][0], epsilon = 1e-6);
        assert_relative_eq!((at(w1, h) - at(w1, -h)) / (2.0 * h), l.matrix[1][1], epsilon = 1e-6);
    }

    #[test]
    fn logistic_values() {
        assert_eq!(reduced_logistic(0.0, A_P0), 0.5);
        assert_relative_eq!(reduced_logistic(3f64.ln() / A_P0, A_P0), 0.75, epsilon = 1e-15);
        assert_eq!(reduced_logistic(1e4, A_P0), 1.0);
        assert_eq!(reduced_logistic(-1e4, A_P0), 0.0);
    }

    #[test]
    fn perturbed_w1_raises_r1() {
        let a = A_P0;
        let mut samples: Vec<RescaledSample> = (0..=100)
            .map(|k| {
                let z = -10.0 + 0.2 * k as f64;
                let w0 = reduced_logistic(z, a);
                RescaledSample {
                    z,
                    w: FastState { w0, w1: critical_manifold_w1(w0, a), w2: 0.0 },
                }
            })
            .collect();
        let r = manifold_residual_of(&samples, a);
        assert!(r.r1 < 1e-15 && r.r2 == 0.0);
        samples[40].w.w1 += 0.1;
        assert!(manifold_residual_of(&samples, a).r1 >= 0.1 - 1e-15);
    }
}
