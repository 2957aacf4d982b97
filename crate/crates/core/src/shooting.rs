//! Construction of the heteroclinic orbit by shooting along the unstable
//! manifold of the left state.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gas::{GasParams, ShockData, ShockFamily};
use crate::integrate::{hermite, integrate_adaptive, integrate_rk4, Flow, State, StepControl, Trajectory};
use crate::linalg::{eigen3, norm};
use crate::slow_fast::manifold_constant_a;
use crate::wave::{field_array, jacobian_left, unstable_direction, vector_field, PhaseState};

/// Tolerances and truncation radii for [`shoot_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Seed offset along the unstable eigenvector, as a fraction of `eps`.
    pub delta: f64,
    /// Cap on the forward integration length; `None` means `50 / (A eps)`.
    pub max_span: Option<f64>,
    /// End-state capture radius, as a fraction of `eps`.
    pub stop_tol: f64,
    /// Largest admissible step; `None` means `1 / max |Re lambda|` of the left Jacobian.
    pub max_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            delta: 1e-8,
            max_span: None,
            stop_tol: 1e-6,
            max_step: None,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !pos(self.rel_tol) || !pos(self.abs_tol) || !pos(self.delta) || !pos(self.stop_tol) {
            return Err(Error::Domain("integrator tolerances must be positive".into()));
        }
        if self.delta > 1e-3 {
            return Err(Error::Domain(format!("delta = {} exceeds 1e-3", self.delta)));
        }
        if self.max_span.is_some_and(|s| !pos(s)) || self.max_step.is_some_and(|s| !pos(s)) {
            return Err(Error::Domain("max_span and max_step must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileMeta {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub evaluations: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub delta: f64,
    pub stop_tol: f64,
    pub max_step: f64,
    pub lambda_plus: f64,
    /// Raw coordinate of the midpoint before normalization (seed at 0).
    pub shift: f64,
    /// Number of nodes produced by the linear-manifold extension.
    pub extension_nodes: usize,
}

/// A traveling-wave profile sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub xi: Vec<f64>,
    pub states: Vec<PhaseState>,
    pub derivs: Vec<[f64; 3]>,
    pub shock: ShockData,
    pub gas: GasParams,
    pub meta: ProfileMeta,
}

impl Profile {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.xi[0], self.xi[self.len() - 1])
    }

    /// Piecewise cubic Hermite evaluation from node values and field slopes.
    pub fn eval(&self, x: f64) -> Result<PhaseState> {
        let (lo, hi) = self.span();
        if !(x >= lo && x <= hi) {
            return Err(Error::Range(x));
        }
        let n = self.len();
        if n == 1 {
            return Ok(self.states[0]);
        }
        let k = self.xi.partition_point(|&t| t <= x).clamp(1, n - 1);
        Ok(PhaseState::from_array(hermite(
            self.xi[k - 1],
            self.xi[k],
            &self.states[k - 1].as_array(),
            &self.states[k].as_array(),
            &self.derivs[k - 1],
            &self.derivs[k],
            x,
        )))
    }

    /// Distances of the first and last nodes from the left and right states.
    pub fn endpoint_gaps(&self) -> (f64, f64) {
        let gap = |s: &PhaseState, e: [f64; 3]| {
            let a = s.as_array();
            norm(&[a[0] - e[0], a[1] - e[1], a[2] - e[2]])
        };
        (
            gap(&self.states[0], self.shock.left.as_array()),
            gap(&self.states[self.len() - 1], self.shock.right.as_array()),
        )
    }

    /// Image under `xi -> -xi`, `u -> -u`, `sigma -> -sigma`. An involution.
    pub fn mirrored(&self) -> Profile {
        let shock = self.shock.mirrored();
        let xi: Vec<f64> = self.xi.iter().rev().map(|x| -x).collect();
        let states: Vec<PhaseState> = self
            .states
            .iter()
            .rev()
            .map(|s| PhaseState {
                v: s.v,
                u: -s.u,
                theta: s.theta,
            })
            .collect();
        let derivs = states.iter().map(|s| vector_field(s, &shock, &self.gas)).collect();
        let mut meta = self.meta;
        meta.shift = -meta.shift;
        Profile {
            xi,
            states,
            derivs,
            shock,
            gas: self.gas,
            meta,
        }
    }

    /// Resample onto `n` equally spaced nodes covering the whole span.
    pub fn uniform(&self, n: usize) -> Result<Profile> {
        if n < 2 {
            return Err(Error::Domain("uniform resampling needs at least 2 nodes".into()));
        }
        let (lo, hi) = self.span();
        let h = (hi - lo) / (n - 1) as f64;
        let mut grid: Vec<f64> = (0..n).map(|k| lo + k as f64 * h).collect();
        grid[n - 1] = hi;
        resample(self, &grid)
    }
}

fn resolved_max_step(shock: &ShockData, gas: &GasParams, opts: &IntegratorOptions) -> f64 {
    opts.max_step.unwrap_or_else(|| {
        let e = eigen3(&jacobian_left(shock, gas));
        let m = e.values.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
        1.0 / m
    })
}

fn seed(shock: &ShockData, gas: &GasParams, opts: &IntegratorOptions) -> Result<(State, f64, [f64; 3])> {
    let d = unstable_direction(shock, gas)?;
    let l = shock.left.as_array();
    let a = opts.delta * shock.eps;
    let y0 = std::array::from_fn(|i| l[i] + a * d.direction[i]);
    Ok((y0, d.lambda, d.direction))
}

/// Integrate the heteroclinic from `left + delta eps r` to the right state,
/// prepend the linear-manifold tail down to `stop_tol eps` from the left
/// state, and normalize so that `v(0)` is the midpoint.
pub fn shoot_profile(shock: &ShockData, gas: &GasParams, opts: &IntegratorOptions) -> Result<Profile> {
    opts.validate()?;
    if !(shock.eps > 0.0) {
        return Err(Error::DegenerateShock);
    }
    if shock.family == ShockFamily::One {
        return Ok(shoot_profile(&shock.canonical(), gas, opts)?.mirrored());
    }
    let (y0, lambda, r) = seed(shock, gas, opts)?;
    let max_step = resolved_max_step(shock, gas, opts);
    let max_span = opts
        .max_span
        .unwrap_or_else(|| 50.0 / (manifold_constant_a(&shock.left, gas) * shock.eps));
    let ctl = StepControl {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_step,
        initial_step: None,
    };
    let right = shock.right.as_array();
    let radius = opts.stop_tol * shock.eps;
    let mut captured = false;
    let traj = integrate_adaptive(
        |y| field_array(y, shock, gas),
        y0,
        0.0,
        max_span,
        &ctl,
        |_, y| {
            let d = norm(&[y[0] - right[0], y[1] - right[1], y[2] - right[2]]);
            if d <= radius {
                captured = true;
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;
    if !captured {
        let (xi, state) = traj.last();
        return Err(Error::IntegrationFailure {
            xi,
            state,
            reason: format!("right state not captured within span {max_span}"),
        });
    }

    // Linear unstable-manifold tail for xi < 0.
    let mut xi = Vec::new();
    let mut states = Vec::new();
    if opts.delta > opts.stop_tol {
        let x_end = (opts.stop_tol / opts.delta).ln() / lambda;
        let n = (x_end.abs() / max_step).ceil() as usize;
        let l = shock.left.as_array();
        for k in (1..=n).rev() {
            let x = x_end * k as f64 / n as f64;
            let a = opts.delta * shock.eps * (lambda * x).exp();
            xi.push(x);
            states.push(PhaseState::from_array(std::array::from_fn(|i| l[i] + a * r[i])));
        }
    }
    let extension_nodes = xi.len();
    xi.extend_from_slice(&traj.xi);
    states.extend(traj.y.iter().map(|y| PhaseState::from_array(*y)));
    for s in &states {
        if !(s.v > 0.0 && s.theta > 0.0) {
            return Err(Error::IntegrationFailure {
                xi: 0.0,
                state: s.as_array(),
                reason: "profile left the physical domain".into(),
            });
        }
    }
    let derivs = states.iter().map(|s| vector_field(s, shock, gas)).collect();
    let profile = Profile {
        xi,
        states,
        derivs,
        shock: *shock,
        gas: *gas,
        meta: ProfileMeta {
            accepted_steps: traj.stats.accepted,
            rejected_steps: traj.stats.rejected,
            evaluations: traj.stats.evaluations,
            rel_tol: opts.rel_tol,
            abs_tol: opts.abs_tol,
            delta: opts.delta,
            stop_tol: opts.stop_tol,
            max_step,
            lambda_plus: lambda,
            shift: 0.0,
            extension_nodes,
        },
    };
    normalize_shift(&profile, shock)
}

/// Translate the grid so that `v(0) = (v_- + v_+)/2`.
pub fn normalize_shift(p: &Profile, shock: &ShockData) -> Result<Profile> {
    let mid = 0.5 * (shock.left.v + shock.right.v);
    let n = p.len();
    let k = (0..n.saturating_sub(1))
        .find(|&k| (p.states[k].v - mid) * (p.states[k + 1].v - mid) <= 0.0)
        .ok_or_else(|| Error::Normalization(format!("midpoint v = {mid} not bracketed")))?;

    let vat = |x: f64| -> f64 {
        hermite(
            p.xi[k],
            p.xi[k + 1],
            &p.states[k].as_array(),
            &p.states[k + 1].as_array(),
            &p.derivs[k],
            &p.derivs[k + 1],
            x,
        )[0]
            - mid
    };
    let (mut a, mut b) = (p.xi[k], p.xi[k + 1]);
    let fa0 = p.states[k].v - mid;
    let star = if fa0 == 0.0 {
        a
    } else if p.states[k + 1].v - mid == 0.0 {
        b
    } else {
        let sa = fa0.signum();
        while b - a > 1e-15 * a.abs().max(b.abs()).max(1.0) {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if vat(m).signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };

    let snap = 1e-12 * star.abs().max(1.0);
    let mut out = p.clone();
    let hit = [k, k + 1].into_iter().find(|&j| (p.xi[j] - star).abs() <= snap);
    let shift = match hit {
        Some(j) => p.xi[j],
        None => {
            let s = PhaseState::from_array(hermite(
                p.xi[k],
                p.xi[k + 1],
                &p.states[k].as_array(),
                &p.states[k + 1].as_array(),
                &p.derivs[k],
                &p.derivs[k + 1],
                star,
            ));
            out.xi.insert(k + 1, star);
            out.states.insert(k + 1, s);
            out.derivs.insert(k + 1, vector_field(&s, &p.shock, &p.gas));
            star
        }
    };
    if shift != 0.0 {
        for x in &mut out.xi {
            *x -= shift;
        }
    }
    if let Some(j) = hit {
        out.xi[j] = 0.0;
    } else {
        out.xi[k + 1] = 0.0;
    }
    out.meta.shift += shift;
    Ok(out)
}

/// Fixed-step RK4 from the same seed as [`shoot_profile`] over `[0, xi_end]`
/// in raw (unshifted) coordinates of the canonical 3-shock.
pub fn reintegrate_fixed_rk4(
    shock: &ShockData,
    gas: &GasParams,
    h: f64,
    xi_end: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if !(shock.eps > 0.0) {
        return Err(Error::DegenerateShock);
    }
    let canon = shock.canonical();
    let (y0, _, _) = seed(&canon, gas, opts)?;
    integrate_rk4(|y| field_array(y, &canon, gas), y0, 0.0, xi_end, h)
}

/// [`reintegrate_fixed_rk4`] wrapped as a normalized [`Profile`], for
/// comparisons free of the translation mode.
///
/// Rounding near the saddle shifts any computed orbit along itself by an
/// amount of order `1e-16 / (delta eps lambda)`; only normalized profiles are
/// comparable.
pub fn oracle_profile(
    shock: &ShockData,
    gas: &GasParams,
    h: f64,
    xi_end: f64,
    opts: &IntegratorOptions,
) -> Result<Profile> {
    let canon = shock.canonical();
    let t = reintegrate_fixed_rk4(&canon, gas, h, xi_end, opts)?;
    let d = unstable_direction(&canon, gas)?;
    let p = Profile {
        xi: t.xi,
        states: t.y.iter().map(|y| PhaseState::from_array(*y)).collect(),
        derivs: t.dy,
        shock: canon,
        gas: *gas,
        meta: ProfileMeta {
            accepted_steps: t.stats.accepted,
            rejected_steps: 0,
            evaluations: t.stats.evaluations,
            rel_tol: 0.0,
            abs_tol: 0.0,
            delta: opts.delta,
            stop_tol: opts.stop_tol,
            max_step: h,
            lambda_plus: d.lambda,
            shift: 0.0,
            extension_nodes: 0,
        },
    };
    let p = normalize_shift(&p, &canon)?;
    Ok(if shock.family == ShockFamily::One { p.mirrored() } else { p })
}

/// Sup-norm distance of two profiles over the nodes of `b` inside the span of `a`.
pub fn profile_distance(a: &Profile, b: &Profile) -> Result<f64> {
    let (lo, hi) = a.span();
    let mut sup = 0.0f64;
    for (x, s) in b.xi.iter().zip(&b.states) {
        if *x < lo || *x > hi {
            continue;
        }
        let y = a.eval(*x)?.as_array();
        let z = s.as_array();
        for i in 0..3 {
            sup = sup.max((y[i] - z[i]).abs());
        }
    }
    Ok(sup)
}

/// Shape-preserving cubic interpolation of the states onto `grid`; the
/// derivatives are re-evaluated from the field.
pub fn resample(p: &Profile, grid: &[f64]) -> Result<Profile> {
    let (lo, hi) = p.span();
    if let Some(&x) = grid.iter().find(|&&x| !(x >= lo && x <= hi)) {
        return Err(Error::Range(x));
    }
    let n = p.len();
    let mut states = Vec::with_capacity(grid.len());
    for &x in grid {
        if n == 1 {
            states.push(p.states[0]);
            continue;
        }
        let k = p.xi.partition_point(|&t| t <= x).clamp(1, n - 1);
        let (x0, x1) = (p.xi[k - 1], p.xi[k]);
        let y0 = p.states[k - 1].as_array();
        let y1 = p.states[k].as_array();
        let h = x1 - x0;
        let mut d0 = p.derivs[k - 1];
        let mut d1 = p.derivs[k];
        for i in 0..3 {
            let slope = (y1[i] - y0[i]) / h;
            if slope == 0.0 {
                d0[i] = 0.0;
                d1[i] = 0.0;
                continue;
            }
            let mut a = d0[i] / slope;
            let mut b = d1[i] / slope;
            if a < 0.0 {
                a = 0.0;
            }
            if b < 0.0 {
                b = 0.0;
            }
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                a *= t;
                b *= t;
            }
            d0[i] = a * slope;
            d1[i] = b * slope;
        }
        let y = if x == x0 {
            y0
        } else if x == x1 {
            y1
        } else {
            hermite(x0, x1, &y0, &y1, &d0, &d1, x)
        };
        states.push(PhaseState::from_array(y));
    }
    let derivs = states.iter().map(|s| vector_field(s, &p.shock, &p.gas)).collect();
    Ok(Profile {
        xi: grid.to_vec(),
        states,
        derivs,
        shock: p.shock,
        gas: p.gas,
        meta: p.meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::EndState;

    fn p0(eps: f64) -> (GasParams, ShockData) {
        let gas = GasParams::new(1.0, 5.0 / 3.0, 1.0, 1.0).unwrap();
        let left = EndState::new(1.0, 0.0, 1.0, &gas).unwrap();
        (gas, ShockData::three_shock(left, eps, &gas).unwrap())
    }

    #[test]
    fn options_validation() {
        assert!(IntegratorOptions::default().validate().is_ok());
        let bad = IntegratorOptions {
            delta: 1e-2,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = IntegratorOptions {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn zero_amplitude_is_degenerate() {
        let (gas, s) = p0(0.0);
        assert_eq!(
            shoot_profile(&s, &gas, &IntegratorOptions::default()),
            Err(Error::DegenerateShock)
        );
    }

    #[test]
    fn profile_basic_invariants() {
        let (gas, s) = p0(0.1);
        let p = shoot_profile(&s, &gas, &IntegratorOptions::default()).unwrap();
        assert!(p.xi.windows(2).all(|w| w[1] > w[0]));
        let (gl, gr) = p.endpoint_gaps();
        assert!(gl <= 1e-6 * 0.1 && gr <= 1e-6 * 0.1, "{gl} {gr}");
        let z = p.xi.iter().position(|&x| x == 0.0).unwrap();
        assert!((p.states[z].v - 1.05).abs() < 1e-10);
        for (s, d) in p.states.iter().zip(&p.derivs) {
            assert_eq!(*d, vector_field(s, &p.shock, &gas));
        }
    }

    #[test]
    fn normalization_is_idempotent() {
        let (gas, s) = p0(0.1);
        let p = shoot_profile(&s, &gas, &IntegratorOptions::default()).unwrap();
        let q = normalize_shift(&p, &s).unwrap();
        assert_eq!(p.xi, q.xi);
    }

    #[test]
    fn normalization_moves_offset_profile() {
        let (gas, s) = p0(0.1);
        let p = shoot_profile(&s, &gas, &IntegratorOptions::default()).unwrap();
        // shift so that v(0) = 1.02
        let mut q = p.clone();
        let k = q.states.iter().position(|st| st.v >= 1.02).unwrap();
        let off = q.xi[k];
        for x in &mut q.xi {
            *x -= off;
        }
        let r = normalize_shift(&q, &s).unwrap();
        let v0 = r.eval(0.0).unwrap().v;
        assert!((v0 - 1.05).abs() < 1e-10, "{v0}");
    }

    #[test]
    fn normalization_requires_bracket() {
        let (gas, s) = p0(0.1);
        let p = shoot_profile(&s, &gas, &IntegratorOptions::default()).unwrap();
        let k = p.xi.iter().position(|&x| x == 0.0).unwrap();
        let mut q = p.clone();
        q.xi.truncate(k - 1);
        q.states.truncate(k - 1);
        q.derivs.truncate(k - 1);
        assert!(matches!(normalize_shift(&q, &s), Err(Error::Normalization(_))));
    }

    #[test]
    fn resample_preserves_endpoints_and_monotonicity() {
        let (gas, s) = p0(0.1);
        let p = shoot_profile(&s, &gas, &IntegratorOptions::default()).unwrap();
        let q = p.uniform(501).unwrap();
        assert_eq!(q.states[0], p.states[0]);
        assert_eq!(q.states[500], p.states[p.len() - 1]);
        assert!(q.states.windows(2).all(|w| w[1].v >= w[0].v));
        let (lo, hi) = p.span();
        assert_eq!(resample(&p, &[hi + 1.0]), Err(Error::Range(hi + 1.0)));
        assert_eq!(resample(&p, &[lo - 1.0]), Err(Error::Range(lo - 1.0)));
    }

    #[test]
    fn mirrored_profile_is_involution() {
        let (gas, s) = p0(0.1);
        let p = shoot_profile(&s, &gas, &IntegratorOptions::default()).unwrap();
        let m = p.mirrored();
        assert!(m.xi.windows(2).all(|w| w[1] > w[0]));
        assert!(m.shock.sigma_eps < 0.0);
        let back = m.mirrored();
        assert_eq!(back.xi, p.xi);
        assert_eq!(back.states, p.states);
        assert_eq!(back.shock, p.shock);
    }

    #[test]
    fn one_shock_shooting_matches_mirror() {
        let (gas, s) = p0(0.1);
        let opts = IntegratorOptions::default();
        let p = shoot_profile(&s.mirrored(), &gas, &opts).unwrap();
        let q = shoot_profile(&s, &gas, &opts).unwrap().mirrored();
        assert_eq!(p.xi, q.xi);
        assert_eq!(p.states, q.states);
    }

    #[test]
    fn capture_failure_on_short_span() {
        let (gas, s) = p0(0.1);
        let opts = IntegratorOptions {
            max_span: Some(5.0),
            ..Default::default()
        };
        assert!(matches!(
            shoot_profile(&s, &gas, &opts),
            Err(Error::IntegrationFailure { .. })
        ));
    }

    #[test]
    fn rk4_zero_span_is_seed() {
        let (gas, s) = p0(0.1);
        let opts = IntegratorOptions::default();
        let t = reintegrate_fixed_rk4(&s, &gas, 0.01, 0.0, &opts).unwrap();
        assert_eq!(t.len(), 1);
        let (y0, _, _) = seed(&s, &gas, &opts).unwrap();
        assert_eq!(t.y[0], y0);
    }
}
