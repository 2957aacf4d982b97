//! First-order phase-space form of the traveling-wave equations.
//!
//! Integrating the profile system once from the left end gives
//!
//! ```text
//! v'     = (v/tau)   [ -sigma (v - v_-) - (u - u_-) ]
//! u'     = (v/mu)    [ -sigma (u - u_-) + p - p_- ]
//! theta' = (v/kappa) [ -sigma (R/(gamma-1) (theta - theta_-) - (u - u_-)^2 / 2) + p_- (u - u_-) ]
//! ```
//!
//! whose critical points are exactly the two end states.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gas::{GasParams, ShockData, ShockFamily};
use crate::linalg::{eigen3, eigenvector, Eigen3, Matrix3};

/// A point `(v, u, theta)` of phase space with `v > 0`, `theta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseState {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl PhaseState {
    pub fn new(v: f64, u: f64, theta: f64) -> Result<Self> {
        if !(v > 0.0) || !(theta > 0.0) || !u.is_finite() || !v.is_finite() || !theta.is_finite()
        {
            return Err(Error::Domain(format!(
                "phase state needs v > 0, theta > 0 (got v={v}, u={u}, theta={theta})"
            )));
        }
        Ok(Self { v, u, theta })
    }

    pub fn from_array(y: [f64; 3]) -> Self {
        Self {
            v: y[0],
            u: y[1],
            theta: y[2],
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.v, self.u, self.theta]
    }
}

/// Right-hand side of the phase-space system.
pub fn vector_field(s: &PhaseState, shock: &ShockData, gas: &GasParams) -> [f64; 3] {
    field_array(&s.as_array(), shock, gas)
}

pub(crate) fn field_array(y: &[f64; 3], shock: &ShockData, gas: &GasParams) -> [f64; 3] {
    let [v, u, theta] = *y;
    let l = &shock.left;
    let sigma = shock.sigma_eps;
    let du = u - l.u;
    let b1 = -sigma * (v - l.v) - du;
    let b2 = -sigma * du + gas.r() * theta / v - l.p;
    let b3 = -sigma * (gas.r() / (gas.gamma() - 1.0) * (theta - l.theta) - 0.5 * du * du) + l.p * du;
    [
        v / gas.tau() * b1,
        v / gas.mu() * b2,
        v / gas.kappa() * b3,
    ]
}

/// Analytic Jacobian of [`vector_field`] at `s`.
pub fn jacobian(s: &PhaseState, shock: &ShockData, gas: &GasParams) -> Matrix3 {
    let PhaseState { v, u, theta } = *s;
    let l = &shock.left;
    let sigma = shock.sigma_eps;
    let (r, g1) = (gas.r(), gas.gamma() - 1.0);
    let (tau, mu, kappa) = (gas.tau(), gas.mu(), gas.kappa());
    let du = u - l.u;
    let b1 = -sigma * (v - l.v) - du;
    let b2 = -sigma * du + r * theta / v - l.p;
    let b3 = -sigma * (r / g1 * (theta - l.theta) - 0.5 * du * du) + l.p * du;
    Matrix3([
        [b1 / tau - sigma * v / tau, -v / tau, 0.0],
        [b2 / mu - r * theta / (mu * v), -sigma * v / mu, r / mu],
        [
            b3 / kappa,
            v / kappa * (sigma * du + l.p),
            -sigma * v * r / (g1 * kappa),
        ],
    ])
}

/// Jacobian at the left end state.
pub fn jacobian_left(shock: &ShockData, gas: &GasParams) -> Matrix3 {
    let l = &shock.left;
    jacobian(&PhaseState::from_array(l.as_array()), shock, gas)
}

/// Jacobian of the same field evaluated at the right end state.
pub fn jacobian_right(shock: &ShockData, gas: &GasParams) -> Matrix3 {
    let r = &shock.right;
    jacobian(&PhaseState::from_array(r.as_array()), shock, gas)
}

/// Second derivative along the flow, `J(y) f(y)`.
pub fn second_derivative(s: &PhaseState, shock: &ShockData, gas: &GasParams) -> [f64; 3] {
    jacobian(s, shock, gas).mul_vec(&vector_field(s, shock, gas))
}

/// Tangent of the heteroclinic at its saddle end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnstableDirection {
    /// The positive eigenvalue of the left Jacobian (canonical 3-shock).
    pub lambda: f64,
    /// Unit vector whose `v` component has the sign of `v_+ - v_-`.
    pub direction: [f64; 3],
    pub eigenvalues: [[f64; 2]; 3],
}

/// Unit eigenvector of [`jacobian_left`] for the unique positive eigenvalue.
///
/// 1-shocks are handled through their canonical 3-shock: the direction is
/// mapped by `u -> -u` and oriented by `sign(v_+ - v_-)`.
pub fn unstable_direction(shock: &ShockData, gas: &GasParams) -> Result<UnstableDirection> {
    if !(shock.eps > 0.0) {
        return Err(Error::DegenerateShock);
    }
    let canon = shock.canonical();
    let jac = jacobian_left(&canon, gas);
    let eig = eigen3(&jac);
    if eig.count_positive() != 1 || eig.values[0].im != 0.0 {
        return Err(Error::DegenerateShock);
    }
    let lambda = eig.values[0].re;
    let scale = jac.max_abs();
    if !(lambda > 1e-12 * scale) {
        return Err(Error::DegenerateShock);
    }
    let mut r = eigenvector(&jac, lambda)?;
    if r[0] < 0.0 {
        r = r.map(|x| -x);
    }
    let residual = {
        let jr = jac.mul_vec(&r);
        crate::linalg::norm(&[jr[0] - lambda * r[0], jr[1] - lambda * r[1], jr[2] - lambda * r[2]])
    };
    if residual > 1e-10 * scale.max(1.0) {
        return Err(Error::Domain(format!(
            "eigenvector residual {residual:e} above tolerance"
        )));
    }
    if shock.family == ShockFamily::One {
        r = [-r[0], r[1], -r[2]];
    }
    Ok(UnstableDirection {
        lambda,
        direction: r,
        eigenvalues: eigen_pairs(&eig),
    })
}

pub(crate) fn eigen_pairs(e: &Eigen3) -> [[f64; 2]; 3] {
    e.values.map(|z| [z.re, z.im])
}

/// Integrated profile equations, left minus right. Zero along exact profiles.
pub fn residual_integrated(
    s: &PhaseState,
    d: &[f64; 3],
    shock: &ShockData,
    gas: &GasParams,
) -> [f64; 3] {
    let PhaseState { v, u, theta } = *s;
    let l = &shock.left;
    let sigma = shock.sigma_eps;
    let p = gas.r() * theta / v;
    let [dv, du, dtheta] = *d;
    [
        -sigma * (v - l.v) - (u - l.u) - gas.tau() * dv / v,
        -sigma * (u - l.u) + (p - l.p) - gas.mu() * du / v,
        -sigma * (gas.r() / (gas.gamma() - 1.0) * (theta - l.theta) + 0.5 * (u * u - l.u * l.u))
            + (p * u - l.p * l.u)
            - gas.kappa() * dtheta / v
            - gas.mu() * u * du / v,
    ]
}

/// Second-order (divergence-form) profile equations evaluated with centered
/// differences on five equally spaced samples `(xi, state)`.
///
/// Each equation is written as `d/dxi Phi = 0`; `Phi` is built at nodes 1 and
/// 3 (its inner derivatives from their neighbours) and differenced across the
/// centre. Second-order accurate in the spacing.
pub fn residual_second_order(
    window: &[(f64, PhaseState); 5],
    shock: &ShockData,
    gas: &GasParams,
) -> Result<[f64; 3]> {
    let h = window[1].0 - window[0].0;
    if !(h > 0.0) {
        return Err(Error::Spacing);
    }
    for k in 1..5 {
        let hk = window[k].0 - window[k - 1].0;
        if (hk - h).abs() > 1e-9 * h.max(window[k].0.abs() * 1e-6) {
            return Err(Error::Spacing);
        }
    }
    let sigma = shock.sigma_eps;
    let (r, g1) = (gas.r(), gas.gamma() - 1.0);
    let flux = |i: usize| -> [f64; 3] {
        let s = &window[i].1;
        let prev = &window[i - 1].1;
        let next = &window[i + 1].1;
        let dv = (next.v - prev.v) / (2.0 * h);
        let du = (next.u - prev.u) / (2.0 * h);
        let dth = (next.theta - prev.theta) / (2.0 * h);
        let p = r * s.theta / s.v;
        [
            -sigma * s.v - s.u - gas.tau() * dv / s.v,
            -sigma * s.u + p - gas.mu() * du / s.v,
            -sigma * (r / g1 * s.theta + 0.5 * s.u * s.u) + p * s.u
                - gas.kappa() * dth / s.v
                - gas.mu() * s.u * du / s.v,
        ]
    };
    let (f1, f3) = (flux(1), flux(3));
    Ok([
        (f3[0] - f1[0]) / (2.0 * h),
        (f3[1] - f1[1]) / (2.0 * h),
        (f3[2] - f1[2]) / (2.0 * h),
    ])
}

/// Velocity reconstructed from the volume profile, `u_- - sigma (v - v_-) - tau v'/v`.
pub fn u_from_v(v: f64, vprime: f64, shock: &ShockData, gas: &GasParams) -> f64 {
    let l = &shock.left;
    l.u - shock.sigma_eps * (v - l.v) - gas.tau() * vprime / v
}

/// Temperature reconstructed from the volume profile and, when `v'''` is
/// given, its derivative.
pub fn theta_from_v(
    v: f64,
    vp: f64,
    vpp: f64,
    vppp: Option<f64>,
    shock: &ShockData,
    gas: &GasParams,
) -> (f64, Option<f64>) {
    let l = &shock.left;
    let s = shock.sigma_eps;
    let (mu, tau, r) = (gas.mu(), gas.tau(), gas.r());
    let theta = v / r
        * (l.p - s * s * (v - l.v) - s * (mu + tau) * vp / v - mu * tau * vpp / (v * v)
            + mu * tau * vp * vp / (v * v * v));
    let dtheta = vppp.map(|vppp| {
        ((l.p - 2.0 * s * s * v + s * s * l.v) * vp
            - s * (mu + tau) * vpp
            - mu * tau * (vppp / v - 3.0 * vp * vpp / (v * v) + 2.0 * vp.powi(3) / v.powi(3)))
            / r
    });
    (theta, dtheta)
}
