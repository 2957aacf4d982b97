//! Explicit Runge-Kutta integrators for small autonomous systems.

use serde::Serialize;

use crate::error::{Error, Result};

pub type State = [f64; 3];

/// Accepted nodes of an integration with their derivatives.
///
/// Between nodes the solution is the cubic Hermite interpolant of the
/// neighbouring values and slopes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub xi: Vec<f64>,
    pub y: Vec<State>,
    pub dy: Vec<State>,
    pub stats: StepStats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn last(&self) -> (f64, State) {
        let n = self.len() - 1;
        (self.xi[n], self.y[n])
    }

    /// Dense-output evaluation at `x` inside the span.
    pub fn eval(&self, x: f64) -> Result<State> {
        let n = self.len();
        if n == 0 || x < self.xi[0] || x > self.xi[n - 1] || x.is_nan() {
            return Err(Error::Range(x));
        }
        if n == 1 {
            return Ok(self.y[0]);
        }
        let k = self.xi.partition_point(|&t| t <= x).clamp(1, n - 1);
        Ok(hermite(
            self.xi[k - 1],
            self.xi[k],
            &self.y[k - 1],
            &self.y[k],
            &self.dy[k - 1],
            &self.dy[k],
            x,
        ))
    }
}

pub(crate) fn hermite(x0: f64, x1: f64, y0: &State, y1: &State, d0: &State, d1: &State, x: f64) -> State {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    std::array::from_fn(|i| h00 * y0[i] + h10 * h * d0[i] + h01 * y1[i] + h11 * h * d1[i])
}

/// Controls for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
}

/// Outcome of a stop predicate evaluated after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

// Dormand-Prince 5(4) tableau (autonomous, so the nodes c_i are not needed).
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const ALPHA: f64 = 0.7 / 4.0;
const BETA: f64 = 0.4 / 4.0;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn finite(y: &State) -> bool {
    y.iter().all(|x| x.is_finite())
}

/// Integrate `y' = f(y)` from `x0` towards `x_end` (either direction) with
/// the Dormand-Prince 5(4) pair and a PI step-size controller.
///
/// `stop` is called after every accepted step with the new node and may end
/// the integration early.
pub fn integrate_adaptive<F, S>(
    f: F,
    y0: State,
    x0: f64,
    x_end: f64,
    ctl: &StepControl,
    mut stop: S,
) -> Result<Trajectory>
where
    F: Fn(&State) -> State,
    S: FnMut(f64, &State) -> Flow,
{
    if !(ctl.rel_tol > 0.0) || !(ctl.abs_tol >= 0.0) || !(ctl.max_step > 0.0) {
        return Err(Error::Domain("step control needs positive tolerances".into()));
    }
    if !x0.is_finite() || !x_end.is_finite() {
        return Err(Error::Domain("integration span must be finite".into()));
    }
    let dir = if x_end >= x0 { 1.0 } else { -1.0 };
    let span = (x_end - x0).abs();
    let mut k1 = f(&y0);
    let mut traj = Trajectory {
        xi: vec![x0],
        y: vec![y0],
        dy: vec![k1],
        stats: StepStats {
            evaluations: 1,
            ..Default::default()
        },
    };
    if span == 0.0 {
        return Ok(traj);
    }

    let scale = |y: &State, i: usize, ynew: &State| {
        ctl.abs_tol + ctl.rel_tol * y[i].abs().max(ynew[i].abs())
    };
    let mut h = ctl
        .initial_step
        .unwrap_or_else(|| initial_step(&f, &y0, &k1, ctl))
        .min(ctl.max_step)
        .min(span);
    let mut x = x0;
    let mut y = y0;
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;

    loop {
        let remaining = (x_end - x) * dir;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        if h <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
            return Err(Error::IntegrationFailure {
                xi: x,
                state: y,
                reason: "step size underflow".into(),
            });
        }
        let hs = h * dir;
        let k2 = f(&axpy(&y, hs, &[(A21, &k1)]));
        let k3 = f(&axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(&axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(&axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(&axpy(
            &y,
            hs,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let ynew = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(&ynew);
        traj.stats.evaluations += 6;

        let err = if finite(&ynew) && finite(&k7) {
            let e = axpy(
                &[0.0; 3],
                hs,
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            );
            ((0..3).map(|i| (e[i] / scale(&y, i, &ynew)).powi(2)).sum::<f64>() / 3.0).sqrt()
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            let err = err.max(1e-10);
            let mut fac = SAFETY * err.powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_prev = err;
            rejected_last = false;
            x = if last { x_end } else { x + hs };
            y = ynew;
            k1 = k7;
            traj.xi.push(x);
            traj.y.push(y);
            traj.dy.push(k1);
            traj.stats.accepted += 1;
            if stop(x, &y) == Flow::Stop {
                break;
            }
            h = (h * fac).min(ctl.max_step);
        } else {
            traj.stats.rejected += 1;
            rejected_last = true;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-ALPHA)).max(FAC_MIN)
            } else {
                FAC_MIN
            };
            h *= fac;
        }
    }
    Ok(traj)
}

fn initial_step<F: Fn(&State) -> State>(f: &F, y0: &State, f0: &State, ctl: &StepControl) -> f64 {
    let sc: State = std::array::from_fn(|i| ctl.abs_tol + ctl.rel_tol * y0[i].abs());
    let rms = |v: &State| ((0..3).map(|i| (v[i] / sc[i]).powi(2)).sum::<f64>() / 3.0).sqrt();
    let d0 = rms(y0);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(&y1);
    let diff: State = std::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Classical fourth-order Runge-Kutta with a fixed step from `x0` to `x_end`.
///
/// The final step is shortened when `h` does not divide the span.
pub fn integrate_rk4<F>(f: F, y0: State, x0: f64, x_end: f64, h: f64) -> Result<Trajectory>
where
    F: Fn(&State) -> State,
{
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    if !(x_end >= x0) {
        return Err(Error::Domain("rk4 span must be forward".into()));
    }
    let span = x_end - x0;
    let n_full = (span / h * (1.0 + 1e-12)).floor() as usize;
    let mut traj = Trajectory {
        xi: Vec::with_capacity(n_full + 2),
        y: Vec::with_capacity(n_full + 2),
        dy: Vec::with_capacity(n_full + 2),
        stats: StepStats::default(),
    };
    let mut y = y0;
    let mut k1 = f(&y);
    traj.xi.push(x0);
    traj.y.push(y);
    traj.dy.push(k1);
    let step = |x: f64, hh: f64, y: &mut State, k1: &mut State, traj: &mut Trajectory| -> Result<()> {
        let k2 = f(&axpy(y, hh, &[(0.5, k1)]));
        let k3 = f(&axpy(y, hh, &[(0.5, &k2)]));
        let k4 = f(&axpy(y, hh, &[(1.0, &k3)]));
        *y = axpy(
            y,
            hh,
            &[(1.0 / 6.0, k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
        );
        *k1 = f(y);
        if !finite(y) || !finite(k1) {
            return Err(Error::IntegrationFailure {
                xi: x,
                state: *y,
                reason: "non-finite state in fixed-step integration".into(),
            });
        }
        traj.stats.evaluations += 4;
        traj.stats.accepted += 1;
        traj.xi.push(x + hh);
        traj.y.push(*y);
        traj.dy.push(*k1);
        Ok(())
    };
    for i in 0..n_full {
        let x = x0 + i as f64 * h;
        step(x, h, &mut y, &mut k1, &mut traj)?;
        // keep the grid on exact multiples of h
        let last = traj.xi.len() - 1;
        traj.xi[last] = x0 + (i + 1) as f64 * h;
    }
    let x = *traj.xi.last().unwrap();
    let rest = x_end - x;
    if rest > 1e-12 * h {
        step(x, rest, &mut y, &mut k1, &mut traj)?;
        let last = traj.xi.len() - 1;
        traj.xi[last] = x_end;
    }
    traj.stats.evaluations += 1;
    Ok(traj)
}
