//! Polytropic gas closures and the Hugoniot curve through a left state.
//!
//! The shock curve is parametrized by the amplitude `eps = v_+ - v_-`. Only the
//! 3-shock branch is built directly; 1-shocks come from
//! [`crate::verify::one_shock_map`].

use serde::Serialize;

use crate::error::{Error, Result};

/// Gas constants. Derived `cp` and `tau` are computed once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasParams {
    #[serde(rename = "R")]
    r: f64,
    gamma: f64,
    mu: f64,
    kappa: f64,
    cp: f64,
    tau: f64,
}

impl GasParams {
    pub fn new(r: f64, gamma: f64, mu: f64, kappa: f64) -> Result<Self> {
        let finite = [r, gamma, mu, kappa].iter().all(|x| x.is_finite());
        if !finite || r <= 0.0 || gamma <= 1.0 || mu <= 0.0 || kappa <= 0.0 {
            return Err(Error::Domain(format!(
                "gas parameters need R > 0, gamma > 1, mu > 0, kappa > 0 (got R={r}, gamma={gamma}, mu={mu}, kappa={kappa})"
            )));
        }
        let cp = gamma * r / (gamma - 1.0);
        let tau = kappa * (gamma - 1.0) / (gamma * r);
        Ok(Self {
            r,
            gamma,
            mu,
            kappa,
            cp,
            tau,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    /// Specific heat at constant pressure, `gamma R / (gamma - 1)`.
    pub fn cp(&self) -> f64 {
        self.cp
    }
    /// Brenner coefficient `kappa / cp`.
    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// A constant state `(v, u, theta)` with its pressure and total energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndState {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub p: f64,
    #[serde(rename = "E")]
    pub energy: f64,
}

impl EndState {
    pub fn new(v: f64, u: f64, theta: f64, gas: &GasParams) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::Domain(format!("velocity must be finite (got {u})")));
        }
        let p = pressure(v, theta, gas)?;
        let energy = gas.r * theta / (gas.gamma - 1.0) + 0.5 * u * u;
        Ok(Self {
            v,
            u,
            theta,
            p,
            energy,
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.v, self.u, self.theta]
    }
}

/// Which characteristic family a shock belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShockFamily {
    #[serde(rename = "1-shock")]
    One,
    #[serde(rename = "3-shock")]
    Three,
}

impl ShockFamily {
    /// Sign of `v_+ - v_-` (and of the shock speed) for this family.
    pub fn sign(self) -> f64 {
        match self {
            ShockFamily::One => -1.0,
            ShockFamily::Three => 1.0,
        }
    }
}

/// Left/right end states joined by a shock of amplitude `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShockData {
    pub left: EndState,
    pub right: EndState,
    pub eps: f64,
    pub sigma_eps: f64,
    pub sigma_star: f64,
    pub family: ShockFamily,
}

/// Default amplitude cap as a fraction of `v_-`.
pub const DEFAULT_EPS_MAX_FRACTION: f64 = 0.3;

impl ShockData {
    /// The 3-shock of amplitude `eps` from `left`, capped at `0.3 v_-`.
    pub fn three_shock(left: EndState, eps: f64, gas: &GasParams) -> Result<Self> {
        Self::three_shock_capped(left, eps, gas, DEFAULT_EPS_MAX_FRACTION * left.v)
    }

    pub fn three_shock_capped(
        left: EndState,
        eps: f64,
        gas: &GasParams,
        eps_max: f64,
    ) -> Result<Self> {
        if eps > eps_max {
            return Err(Error::AmplitudeTooLarge {
                eps,
                reason: format!("exceeds eps_max = {eps_max}"),
            });
        }
        let right = hugoniot_right_state(&left, eps, gas)?;
        Ok(Self {
            left,
            right,
            eps,
            sigma_eps: sigma_eps(&left, eps, gas)?,
            sigma_star: sigma_star(&left, gas),
            family: ShockFamily::Three,
        })
    }

    /// Image under `x -> -x, u -> -u, sigma -> -sigma`. The end states trade
    /// places, so a 3-shock becomes a 1-shock and vice versa. Involution.
    pub fn mirrored(&self) -> Self {
        let flip = |s: &EndState| EndState { u: -s.u, ..*s };
        Self {
            left: flip(&self.right),
            right: flip(&self.left),
            eps: self.eps,
            sigma_eps: -self.sigma_eps,
            sigma_star: -self.sigma_star,
            family: match self.family {
                ShockFamily::One => ShockFamily::Three,
                ShockFamily::Three => ShockFamily::One,
            },
        }
    }

    /// The 3-shock representative: `self` or its mirror image.
    pub fn canonical(&self) -> Self {
        match self.family {
            ShockFamily::Three => *self,
            ShockFamily::One => self.mirrored(),
        }
    }
}

/// Ideal polytropic pressure `R theta / v`.
pub fn pressure(v: f64, theta: f64, gas: &GasParams) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) || !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!(
            "pressure needs v > 0 and theta > 0 (got v={v}, theta={theta})"
        )));
    }
    Ok(gas.r * theta / v)
}

pub fn brenner_tau(gas: &GasParams) -> f64 {
    gas.tau
}

/// Acoustic speed `sqrt(gamma p_- / v_-)` of the 3-shock family.
pub fn sigma_star(left: &EndState, gas: &GasParams) -> f64 {
    (gas.gamma * left.p / left.v).sqrt()
}

/// Shock speed on the Hugoniot curve, `sqrt(gamma p_-) / sqrt(v_- + (gamma+1) eps / 2)`.
pub fn sigma_eps(left: &EndState, eps: f64, gas: &GasParams) -> Result<f64> {
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("amplitude must be >= 0 (got {eps})")));
    }
    let radicand = left.v + 0.5 * (gas.gamma + 1.0) * eps;
    if !(radicand > 0.0) || !radicand.is_finite() {
        return Err(Error::Domain(format!(
            "v_- + (gamma+1) eps / 2 must be positive (got {radicand})"
        )));
    }
    Ok((gas.gamma * left.p).sqrt() / radicand.sqrt())
}

/// Right state of the 3-shock with amplitude `eps`.
pub fn hugoniot_right_state(left: &EndState, eps: f64, gas: &GasParams) -> Result<EndState> {
    let sigma = sigma_eps(left, eps, gas)?;
    let du = -sigma * eps;
    let g1 = gas.gamma - 1.0;
    let theta = left.theta + g1 / (2.0 * gas.r) * du * du - g1 / gas.r * left.p * eps;
    if !(theta > 0.0) {
        return Err(Error::AmplitudeTooLarge {
            eps,
            reason: format!("right temperature {theta} is not positive"),
        });
    }
    EndState::new(left.v + eps, left.u + du, theta, gas)
}

/// Left-hand sides of the Rankine-Hugoniot relations (mass, momentum, energy).
pub fn rh_residual(left: &EndState, right: &EndState, sigma: f64, _gas: &GasParams) -> [f64; 3] {
    [
        -sigma * (right.v - left.v) - (right.u - left.u),
        -sigma * (right.u - left.u) + right.p - left.p,
        -sigma * (right.energy - left.energy) + right.p * right.u - left.p * left.u,
    ]
}

/// [`rh_residual`] divided by the reference scales `sigma_* v_-`, `p_-` and
/// `p_- sigma_* v_-`.
pub fn rh_residual_scaled(
    left: &EndState,
    right: &EndState,
    sigma: f64,
    gas: &GasParams,
) -> [f64; 3] {
    let res = rh_residual(left, right, sigma, gas);
    let c = sigma_star(left, gas) * left.v;
    [res[0] / c, res[1] / left.p, res[2] / (left.p * c)]
}

/// Lax entropy classification of a pair of states.
pub fn lax_admissible(left: &EndState, right: &EndState) -> Option<ShockFamily> {
    if left.v < right.v && left.u > right.u && left.theta > right.theta {
        Some(ShockFamily::Three)
    } else if left.v > right.v && left.u > right.u && left.theta < right.theta {
        Some(ShockFamily::One)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p0() -> (GasParams, EndState) {
        let gas = GasParams::new(1.0, 5.0 / 3.0, 1.0, 1.0).unwrap();
        let left = EndState::new(1.0, 0.0, 1.0, &gas).unwrap();
        (gas, left)
    }

    #[test]
    fn pressure_examples() {
        let (gas, _) = p0();
        assert_eq!(pressure(1.0, 1.0, &gas).unwrap(), 1.0);
        assert_eq!(pressure(2.0, 1.0, &gas).unwrap(), 0.5);
        assert_relative_eq!(
            pressure(1.1, 0.9382353, &gas).unwrap(),
            0.8529412,
            epsilon = 1e-7
        );
        assert!(matches!(pressure(0.0, 1.0, &gas), Err(Error::Domain(_))));
        assert!(matches!(pressure(1.0, -1.0, &gas), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_examples() {
        let (gas, _) = p0();
        assert_relative_eq!(brenner_tau(&gas), 0.4, epsilon = 1e-15);
        assert_relative_eq!(gas.cp(), 2.5, epsilon = 1e-15);
        let g2 = GasParams::new(1.0, 2.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(brenner_tau(&g2), 1.0, epsilon = 1e-15);
        let air = GasParams::new(287.0, 1.4, 1.0, 0.026).unwrap();
        assert_relative_eq!(air.cp(), 1004.5, epsilon = 1e-9);
        assert_relative_eq!(brenner_tau(&air), 2.5883e-5, max_relative = 1e-4);
    }

    #[test]
    fn invalid_gas_rejected() {
        assert!(GasParams::new(0.0, 1.4, 1.0, 1.0).is_err());
        assert!(GasParams::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(GasParams::new(1.0, 1.4, -1.0, 1.0).is_err());
        assert!(GasParams::new(1.0, 1.4, 1.0, 0.0).is_err());
        assert!(GasParams::new(f64::NAN, 1.4, 1.0, 1.0).is_err());
    }

    #[test]
    fn sigma_star_examples() {
        let (gas, left) = p0();
        assert_relative_eq!(sigma_star(&left, &gas), 1.2909944, epsilon = 1e-7);
        let l4 = EndState::new(4.0, 0.0, 1.0, &gas).unwrap();
        assert_relative_eq!(sigma_star(&l4, &gas), 0.3227486, epsilon = 1e-7);
        let hot = EndState::new(1.0, 0.0, 4.0, &gas).unwrap();
        assert_relative_eq!(
            sigma_star(&hot, &gas),
            2.0 * sigma_star(&left, &gas),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sigma_eps_examples() {
        let (gas, left) = p0();
        assert_relative_eq!(sigma_eps(&left, 0.1, &gas).unwrap(), 1.2126781, epsilon = 1e-7);
        assert_eq!(sigma_eps(&left, 0.0, &gas).unwrap(), sigma_star(&left, &gas));
        assert_eq!(sigma_eps(&left, 0.05, &gas).unwrap(), 1.25);
        assert!(sigma_eps(&left, -0.1, &gas).is_err());
    }

    #[test]
    fn hugoniot_examples() {
        let (gas, left) = p0();
        let r = hugoniot_right_state(&left, 0.1, &gas).unwrap();
        assert_relative_eq!(r.v, 1.1, epsilon = 1e-15);
        assert_relative_eq!(r.u, -0.1212678, epsilon = 1e-7);
        assert_relative_eq!(r.theta, 0.9382353, epsilon = 1e-7);
        let z = hugoniot_right_state(&left, 0.0, &gas).unwrap();
        assert_eq!(z.as_array(), left.as_array());
        let h = hugoniot_right_state(&left, 0.05, &gas).unwrap();
        assert_relative_eq!(h.u, -0.0625, epsilon = 1e-15);
        assert_relative_eq!(h.theta, 0.96796875, epsilon = 1e-14);
    }

    #[test]
    fn amplitude_too_large() {
        let (gas, left) = p0();
        // theta_+ = 1 + eps^2 sigma^2/3 - 2 eps/3 crosses zero near eps ~ 1.9
        assert!(matches!(
            hugoniot_right_state(&left, 3.0, &gas),
            Err(Error::AmplitudeTooLarge { .. })
        ));
        assert!(matches!(
            ShockData::three_shock(left, 0.5, &gas),
            Err(Error::AmplitudeTooLarge { .. })
        ));
    }

    #[test]
    fn rh_residual_examples() {
        let (gas, left) = p0();
        let s = ShockData::three_shock(left, 0.1, &gas).unwrap();
        let res = rh_residual_scaled(&s.left, &s.right, s.sigma_eps, &gas);
        assert!(res.iter().all(|x| x.abs() < 1e-12), "{res:?}");
        let same = rh_residual(&left, &left, 0.7, &gas);
        assert_eq!(same, [0.0; 3]);

        let mut hot = s.right;
        hot.theta += 0.01;
        hot = EndState::new(hot.v, hot.u, hot.theta, &gas).unwrap();
        let res = rh_residual(&s.left, &hot, s.sigma_eps, &gas);
        // energy residual: -sigma R/(gamma-1) dtheta + u_+ R dtheta / v_+
        let expected = -s.sigma_eps * 1.5 * 0.01 + s.right.u * 0.01 / s.right.v;
        assert_relative_eq!(res[2], expected, epsilon = 1e-12);
        assert!(res[2].abs() > 0.5 * s.sigma_eps * 1.5 * 0.01);
    }

    #[test]
    fn lax_examples() {
        let (gas, left) = p0();
        let r = hugoniot_right_state(&left, 0.1, &gas).unwrap();
        assert_eq!(lax_admissible(&left, &r), Some(ShockFamily::Three));
        // x -> -x, u -> -u swaps the roles of the two ends
        let ml = EndState::new(r.v, -r.u, r.theta, &gas).unwrap();
        let mr = EndState::new(left.v, -left.u, left.theta, &gas).unwrap();
        assert_eq!(lax_admissible(&ml, &mr), Some(ShockFamily::One));
        assert_eq!(lax_admissible(&left, &left), None);
    }
}
