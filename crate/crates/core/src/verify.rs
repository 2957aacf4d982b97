//! Numerical checks of the profile estimates, single amplitude and sweeps.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gas::{rh_residual_scaled, sigma_star, EndState, GasParams, ShockData, ShockFamily, DEFAULT_EPS_MAX_FRACTION};
use crate::linalg::eigen3;
use crate::shooting::{shoot_profile, IntegratorOptions, Profile};
use crate::slow_fast::{layer_matrix, logistic_deviation, manifold_constant_a, slow_manifold_residual};
use crate::wave::{jacobian_left, residual_integrated, second_derivative};

/// Uniform node count used for all sup-norm checks.
pub const CHECK_NODES: usize = 4001;
/// Default exclusion threshold for [`tail_bound`] and [`second_derivative_domination`].
pub const TAIL_ETA: f64 = 1e-6;
/// Tail fit window for `|v - v_end| / eps`.
pub const FIT_WINDOW: (f64, f64) = (1e-5, 1e-2);
/// Minimum number of e-folds a tail fit must cover.
pub const FIT_MIN_EFOLDS: f64 = 5.0;

/// Image under `xi -> -xi`, `u -> -u`, `sigma -> -sigma`.
pub trait OneShockMap: Sized {
    fn one_shock_map(&self) -> Self;
}

impl OneShockMap for ShockData {
    fn one_shock_map(&self) -> Self {
        self.mirrored()
    }
}

impl OneShockMap for Profile {
    fn one_shock_map(&self) -> Self {
        self.mirrored()
    }
}

pub fn one_shock_map<T: OneShockMap>(x: &T) -> T {
    x.one_shock_map()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneReport {
    /// Expected signs of `(v', u', theta')`.
    pub expected: [i8; 3],
    pub pass: bool,
    /// First node (index, xi) where a sign differs.
    pub first_violation: Option<(usize, f64)>,
}

pub fn expected_signs(family: ShockFamily) -> [i8; 3] {
    match family {
        ShockFamily::Three => [1, -1, -1],
        ShockFamily::One => [-1, -1, 1],
    }
}

pub fn check_monotone(p: &Profile) -> Result<MonotoneReport> {
    if p.is_empty() || !(p.shock.eps > 0.0) {
        return Err(Error::DegenerateProfile("zero-amplitude profile".into()));
    }
    let first = p.states[0];
    if p.states.iter().all(|s| *s == first) {
        return Err(Error::DegenerateProfile("constant profile".into()));
    }
    let expected = expected_signs(p.shock.family);
    let first_violation = p.derivs.iter().enumerate().find_map(|(k, d)| {
        let ok = (0..3).all(|i| d[i] * f64::from(expected[i]) > 0.0);
        (!ok).then_some((k, p.xi[k]))
    });
    Ok(MonotoneReport {
        expected,
        pass: first_violation.is_none(),
        first_violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimates {
    /// `sup |u' + sigma_* v'| / |v'|`
    pub r_u: f64,
    /// `sup |theta' + ((gamma-1) p_-/R) v'| / |v'|`
    pub r_theta: f64,
    pub coef_u: f64,
    pub coef_theta: f64,
}

pub fn ratio_estimates(p: &Profile, shock: &ShockData, gas: &GasParams) -> RatioEstimates {
    let coef_u = sigma_star(&shock.left, gas);
    let coef_theta = (gas.gamma() - 1.0) * shock.left.p / gas.r();
    let (mut r_u, mut r_theta) = (0.0f64, 0.0f64);
    for d in &p.derivs {
        let dv = d[0].abs();
        r_u = r_u.max((d[1] + coef_u * d[0]).abs() / dv);
        r_theta = r_theta.max((d[2] + coef_theta * d[0]).abs() / dv);
    }
    RatioEstimates {
        r_u,
        r_theta,
        coef_u,
        coef_theta,
    }
}

/// `sup max(|v''|, |u''|, |theta''|) / (eps |v'|)` over nodes with
/// `(v_+ - v)(v - v_-) >= eta eps^2`.
///
/// Closer to the end states `v'` sits at the rounding floor of the state
/// and the quotient is noise.
pub fn second_derivative_domination(p: &Profile, shock: &ShockData, eta: f64) -> Result<f64> {
    let floor = eta * shock.eps * shock.eps;
    let (vm, vp) = (shock.left.v, shock.right.v);
    let mut sup = None;
    for (s, d) in p.states.iter().zip(&p.derivs) {
        if (vp - s.v) * (s.v - vm) < floor {
            continue;
        }
        let dd = second_derivative(s, shock, &p.gas);
        let r = dd.iter().fold(0.0f64, |m, x| m.max(x.abs())) / (shock.eps * d[0].abs());
        sup = Some(sup.map_or(r, |m: f64| m.max(r)));
    }
    sup.ok_or(Error::EmptyWindow)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub min: f64,
    pub max: f64,
    /// `sup |ratio - A|`
    pub sup_dev: f64,
    pub a: f64,
    pub nodes: usize,
}

/// Extremes of `v' / ((v_+ - v)(v - v_-))` over nodes with
/// `(v_+ - v)(v - v_-) >= eta eps^2`.
pub fn tail_bound(p: &Profile, shock: &ShockData, eta: f64) -> Result<TailBound> {
    let a = manifold_constant_a(&shock.left, &p.gas);
    let floor = eta * shock.eps * shock.eps;
    let (vm, vp) = (shock.left.v, shock.right.v);
    let mut out = TailBound {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        sup_dev: 0.0,
        a,
        nodes: 0,
    };
    for (s, d) in p.states.iter().zip(&p.derivs) {
        let den = (vp - s.v) * (s.v - vm);
        if den < floor {
            continue;
        }
        let ratio = d[0] / den;
        out.min = out.min.min(ratio);
        out.max = out.max.max(ratio);
        out.sup_dev = out.sup_dev.max((ratio - a).abs());
        out.nodes += 1;
    }
    if out.nodes == 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        n,
    })
}

/// Least-squares slope of `y = c x`.
pub fn fit_through_origin(x: &[f64], y: &[f64]) -> Option<f64> {
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    if x.is_empty() || x.len() != y.len() || sxx == 0.0 {
        return None;
    }
    Some(x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / sxx)
}

/// Slope of `ln y` against `ln x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// Rate of `v - v_-` as `xi -> -inf`.
    pub lambda_minus: f64,
    /// Rate of `v_+ - v` as `xi -> +inf`.
    pub lambda_plus: f64,
    pub amp_minus: f64,
    pub amp_plus: f64,
    /// Rates of `|v'|` on the same windows.
    pub deriv_lambda_minus: f64,
    pub deriv_lambda_plus: f64,
    pub nodes_minus: usize,
    pub nodes_plus: usize,
}

fn tail_fit(xs: &[f64], gaps: &[f64], dvs: &[f64], side: &str) -> Result<(f64, f64, f64)> {
    if xs.len() < 3 {
        return Err(Error::FitWindow(format!("{side} window has {} nodes", xs.len())));
    }
    let lg: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let (lo, hi) = lg.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo < FIT_MIN_EFOLDS {
        return Err(Error::FitWindow(format!(
            "{side} window covers {:.2} e-folds",
            hi - lo
        )));
    }
    let fit = linear_fit(xs, &lg).ok_or_else(|| Error::FitWindow(format!("{side} fit degenerate")))?;
    let ld: Vec<f64> = dvs.iter().map(|d| d.abs().ln()).collect();
    let dfit = linear_fit(xs, &ld).ok_or_else(|| Error::FitWindow(format!("{side} fit degenerate")))?;
    Ok((fit.slope, fit.intercept.exp(), dfit.slope))
}

/// Exponential tail rates from least squares on `ln |v - v_end|`.
pub fn decay_fit(p: &Profile, shock: &ShockData) -> Result<DecayFit> {
    let eps = shock.eps;
    let (vm, vp) = (shock.left.v, shock.right.v);
    let inside = |g: f64| g / eps >= FIT_WINDOW.0 && g / eps <= FIT_WINDOW.1;
    let (mut xm, mut gm, mut dm) = (vec![], vec![], vec![]);
    let (mut xp, mut gp, mut dp) = (vec![], vec![], vec![]);
    for ((&x, s), d) in p.xi.iter().zip(&p.states).zip(&p.derivs) {
        let (a, b) = ((s.v - vm).abs(), (vp - s.v).abs());
        if x < 0.0 && inside(a) {
            xm.push(x);
            gm.push(a);
            dm.push(d[0]);
        } else if x > 0.0 && inside(b) {
            xp.push(x);
            gp.push(b);
            dp.push(d[0]);
        }
    }
    let (sm, am, dsm) = tail_fit(&xm, &gm, &dm, "left")?;
    let (sp, ap, dsp) = tail_fit(&xp, &gp, &dp, "right")?;
    Ok(DecayFit {
        lambda_minus: sm,
        lambda_plus: -sp,
        amp_minus: am,
        amp_plus: ap,
        deriv_lambda_minus: dsm,
        deriv_lambda_plus: -dsp,
        nodes_minus: xm.len(),
        nodes_plus: xp.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaGap {
    pub gap: f64,
    /// `gap / eps`, zero at `eps = 0`.
    pub ratio: f64,
    /// `sigma_* (gamma+1) / (4 v_-)`, the small-amplitude limit of `ratio`.
    pub limit: f64,
}

pub fn sigma_gap(shock: &ShockData, gas: &GasParams) -> SigmaGap {
    let gap = (shock.sigma_eps - shock.sigma_star).abs();
    SigmaGap {
        gap,
        ratio: if shock.eps > 0.0 { gap / shock.eps } else { 0.0 },
        limit: shock.sigma_star.abs() * (gas.gamma() + 1.0) / (4.0 * shock.canonical().left.v),
    }
}

/// Linear extrapolation to `eps = 0` of a first-order quantity `g(eps)`
/// sampled at a coarse and a fine amplitude.
pub fn richardson(eps_coarse: f64, g_coarse: f64, eps_fine: f64, g_fine: f64) -> f64 {
    (eps_coarse * g_fine - eps_fine * g_coarse) / (eps_coarse - eps_fine)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    pub details: String,
}

impl Check {
    fn at_most(name: &str, value: f64, tolerance: f64, details: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: value <= tolerance,
            value,
            tolerance,
            details: details.into(),
        }
    }
}

/// Scalar diagnostics of one profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    pub eps: f64,
    pub a: f64,
    pub lambda_unstable: f64,
    pub left_positive: usize,
    pub left_negative: usize,
    pub endpoint_gap_left: f64,
    pub endpoint_gap_right: f64,
    pub midpoint_error: f64,
    pub monotone: bool,
    pub r_u: f64,
    pub r_theta: f64,
    pub second_derivative_ratio: f64,
    pub tail_min: f64,
    pub tail_max: f64,
    pub tail_dev: f64,
    pub lambda_minus: Option<f64>,
    pub lambda_plus: Option<f64>,
    pub r1: f64,
    pub r2: f64,
    pub logistic_dev: f64,
    pub sigma_gap: f64,
    pub sigma_gap_ratio: f64,
    pub max_dv: f64,
    pub integrated_residual: f64,
    pub rh_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    pub nodes: usize,
    pub check_nodes: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub span: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub shock: ShockData,
    pub checks: Vec<Check>,
    pub diagnostics: Diagnostics,
    pub decay: Option<DecayFit>,
    /// Empirical constants: each first-order quantity divided by `eps`.
    pub constants: Vec<(String, f64)>,
    pub grid: GridInfo,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Shoot, resample and run every check for a single amplitude.
pub fn verify(left: &EndState, gas: &GasParams, eps: f64, opts: &IntegratorOptions) -> Result<VerificationReport> {
    let shock = ShockData::three_shock(*left, eps, gas)?;
    verify_shock(&shock, gas, opts)
}

/// As [`verify`] for given shock data; 1-shocks are checked through their
/// canonical 3-shock plus a sign check of the mirrored profile.
pub fn verify_shock(shock: &ShockData, gas: &GasParams, opts: &IntegratorOptions) -> Result<VerificationReport> {
    let canon = shock.canonical();
    let profile = shoot_profile(&canon, gas, opts)?;
    let (diag, decay, fine) = diagnostics(&profile, &canon, gas)?;

    let a = diag.a;
    let sstar = canon.sigma_star;
    let ctheta = (gas.gamma() - 1.0) * canon.left.p / gas.r();
    let first_order = 2.0 * canon.eps * a.max(1.0);
    let sd_tol = 4.0 * a * 1f64.max(sstar).max(ctheta);
    let capture = opts.stop_tol * canon.eps;

    let mut checks = vec![
        Check::at_most("hugoniot_closure", diag.rh_residual, 1e-12, "scaled Rankine-Hugoniot residual"),
        Check {
            name: "spectral_structure".into(),
            pass: diag.left_positive == 1 && diag.left_negative == 2 && layer_stable(&canon, gas),
            value: diag.left_positive as f64,
            tolerance: 1.0,
            details: format!(
                "left Jacobian: {} positive, {} negative; layer eigenvalues negative",
                diag.left_positive, diag.left_negative
            ),
        },
        Check::at_most(
            "endpoint_capture",
            diag.endpoint_gap_left.max(diag.endpoint_gap_right),
            capture,
            format!("left {:e}, right {:e}", diag.endpoint_gap_left, diag.endpoint_gap_right),
        ),
        Check::at_most("normalization", diag.midpoint_error, 1e-10, "|v(0) - (v_- + v_+)/2|"),
        Check {
            name: "monotone".into(),
            pass: diag.monotone,
            value: if diag.monotone { 0.0 } else { 1.0 },
            tolerance: 0.0,
            details: "signs (+, -, -) of (v', u', theta') at every node".into(),
        },
        Check::at_most("integrated_residual", diag.integrated_residual, 1e-12, "sup over nodes"),
        Check::at_most("ratio_u", diag.r_u, 0.5, format!("target coefficient sigma_* = {sstar}")),
        Check::at_most("ratio_theta", diag.r_theta, 0.5, format!("target coefficient (gamma-1) p_-/R = {ctheta}")),
        Check::at_most("second_derivative", diag.second_derivative_ratio, sd_tol, "sup max|y''| / (eps |v'|)"),
        Check::at_most("tail_deviation", diag.tail_dev, 0.3 * a, format!("sup |ratio - A|, A = {a}")),
        Check {
            name: "tail_range".into(),
            pass: diag.tail_min >= 0.5 * a && diag.tail_max <= 2.0 * a,
            value: diag.tail_max / diag.tail_min,
            tolerance: 4.0,
            details: format!("ratio in [{}, {}], required within [A/2, 2A]", diag.tail_min, diag.tail_max),
        },
        Check::at_most("slow_manifold_r1", diag.r1, first_order, "sup |w1 - A (w0 - w0^2)|"),
        Check::at_most("slow_manifold_r2", diag.r2, first_order, "sup |w2|"),
        Check::at_most("logistic_deviation", diag.logistic_dev, first_order, "sup |w0 - logistic|"),
        Check::at_most(
            "sigma_gap",
            diag.sigma_gap_ratio,
            sigma_gap(&canon, gas).limit,
            "|sigma_eps - sigma_*| / eps against its small-amplitude limit",
        ),
    ];
    match decay {
        Some(d) => {
            let worst = [d.lambda_minus, d.lambda_plus]
                .iter()
                .map(|l| (l / (a * canon.eps) - 1.0).abs())
                .fold(0.0, f64::max);
            checks.push(Check::at_most(
                "decay_rates",
                worst,
                0.2,
                format!(
                    "lambda_-/(A eps) = {}, lambda_+/(A eps) = {}",
                    d.lambda_minus / (a * canon.eps),
                    d.lambda_plus / (a * canon.eps)
                ),
            ));
        }
        None => checks.push(Check {
            name: "decay_rates".into(),
            pass: false,
            value: f64::NAN,
            tolerance: 0.2,
            details: "tail fit window too short".into(),
        }),
    }
    if shock.family == ShockFamily::One {
        let mirrored = profile.mirrored();
        let m = check_monotone(&mirrored)?;
        checks.push(Check {
            name: "one_shock_signs".into(),
            pass: m.pass,
            value: if m.pass { 0.0 } else { 1.0 },
            tolerance: 0.0,
            details: "signs (-, -, +) of the mirrored profile".into(),
        });
    }

    let e = canon.eps;
    let constants = vec![
        ("r_u/eps".into(), diag.r_u / e),
        ("r_theta/eps".into(), diag.r_theta / e),
        ("tail_dev/eps".into(), diag.tail_dev / e),
        ("r1/eps".into(), diag.r1 / e),
        ("r2/eps".into(), diag.r2 / e),
        ("logistic_dev/eps".into(), diag.logistic_dev / e),
        ("sigma_gap/eps".into(), diag.sigma_gap_ratio),
    ];
    Ok(VerificationReport {
        shock: *shock,
        checks,
        diagnostics: diag,
        decay,
        constants,
        grid: GridInfo {
            nodes: profile.len(),
            check_nodes: fine.len(),
            accepted_steps: profile.meta.accepted_steps,
            rejected_steps: profile.meta.rejected_steps,
            span: profile.span(),
        },
    })
}

fn layer_stable(shock: &ShockData, gas: &GasParams) -> bool {
    layer_matrix(&shock.left, gas).eigenvalues.iter().all(|e| e[0] < 0.0)
}

/// Scalar diagnostics of a canonical 3-shock profile, computed on
/// [`CHECK_NODES`] uniform nodes.
pub fn diagnostics(profile: &Profile, shock: &ShockData, gas: &GasParams) -> Result<(Diagnostics, Option<DecayFit>, Profile)> {
    let fine = profile.uniform(CHECK_NODES)?;
    let a = manifold_constant_a(&shock.left, gas);
    let eig = eigen3(&jacobian_left(shock, gas));
    let (gl, gr) = profile.endpoint_gaps();
    let mid = 0.5 * (shock.left.v + shock.right.v);
    let midpoint_error = (profile.eval(0.0)?.v - mid).abs();
    let monotone = check_monotone(profile)?.pass && check_monotone(&fine)?.pass;
    let ratios = ratio_estimates(&fine, shock, gas);
    let tail = tail_bound(&fine, shock, TAIL_ETA)?;
    let decay = decay_fit(&fine, shock).ok();
    let res = slow_manifold_residual(&fine, shock, gas);
    let gap = sigma_gap(shock, gas);
    let integrated_residual = profile
        .states
        .iter()
        .zip(&profile.derivs)
        .map(|(s, d)| residual_integrated(s, d, shock, gas).iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .fold(0.0, f64::max);
    let rh = rh_residual_scaled(&shock.left, &shock.right, shock.sigma_eps, gas)
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    let diag = Diagnostics {
        eps: shock.eps,
        a,
        lambda_unstable: eig.values[0].re,
        left_positive: eig.count_positive(),
        left_negative: eig.count_negative(),
        endpoint_gap_left: gl,
        endpoint_gap_right: gr,
        midpoint_error,
        monotone,
        r_u: ratios.r_u,
        r_theta: ratios.r_theta,
        second_derivative_ratio: second_derivative_domination(&fine, shock, TAIL_ETA)?,
        tail_min: tail.min,
        tail_max: tail.max,
        tail_dev: tail.sup_dev,
        lambda_minus: decay.map(|d| d.lambda_minus),
        lambda_plus: decay.map(|d| d.lambda_plus),
        r1: res.r1,
        r2: res.r2,
        logistic_dev: logistic_deviation(&fine, shock, gas),
        sigma_gap: gap.gap,
        sigma_gap_ratio: gap.ratio,
        max_dv: profile.derivs.iter().map(|d| d[0]).fold(0.0, f64::max),
        integrated_residual,
        rh_residual: rh,
    };
    Ok((diag, decay, fine))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMember {
    pub eps: f64,
    pub report: Option<VerificationReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: LineFit,
}

/// Diagnostics expected to be first order in `eps`.
pub const FIRST_ORDER: [&str; 7] = ["r_u", "r_theta", "r1", "r2", "tail_dev", "logistic_dev", "sigma_gap"];
/// Admissible log-log slope for first-order diagnostics.
pub const SLOPE_WINDOW: (f64, f64) = (0.8, 1.2);
/// Admissible shrink factor of a first-order diagnostic when `eps` halves.
pub const HALVING_WINDOW: (f64, f64) = (1.6, 2.6);
/// Admissible `|slope|` of the second-derivative ratio (bounded in `eps`).
pub const BOUNDED_SLOPE: f64 = 0.2;
/// Admissible relative error of the through-origin rate slope against `A`.
pub const RATE_SLOPE_TOL: f64 = 0.2;

fn series(d: &Diagnostics, name: &str) -> f64 {
    match name {
        "r_u" => d.r_u,
        "r_theta" => d.r_theta,
        "r1" => d.r1,
        "r2" => d.r2,
        "tail_dev" => d.tail_dev,
        "logistic_dev" => d.logistic_dev,
        "sigma_gap" => d.sigma_gap,
        "second_derivative_ratio" => d.second_derivative_ratio,
        _ => f64::NAN,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    /// Strictly decreasing amplitudes.
    pub eps: Vec<f64>,
    pub members: Vec<SweepMember>,
    /// Log-log fits against `eps` (three or more successful members).
    pub slopes: Vec<NamedFit>,
    /// Through-origin slope of the fitted decay rates against `eps`, divided by `A`.
    pub rate_slope_over_a: Option<f64>,
    /// Richardson extrapolation of `|sigma_eps - sigma_*| / eps` to `eps = 0`.
    pub sigma_gap_limit_estimate: Option<f64>,
    /// Slope windows and halving factors; empty with fewer than three members.
    pub checks: Vec<Check>,
}

impl SweepReport {
    pub fn slope(&self, name: &str) -> Option<f64> {
        self.slopes.iter().find(|f| f.name == name).map(|f| f.fit.slope)
    }

    /// Diagnostics of members that succeeded, in sweep order.
    pub fn ok_members(&self) -> Vec<&Diagnostics> {
        self.members
            .iter()
            .filter_map(|m| m.report.as_ref().map(|r| &r.diagnostics))
            .collect()
    }

    /// Every member computed, every member check and every sweep check passed.
    pub fn all_pass(&self) -> bool {
        self.members
            .iter()
            .all(|m| m.report.as_ref().is_some_and(|r| r.all_pass()))
            && self.checks.iter().all(|c| c.pass)
    }
}

/// [`sweep`] with the default amplitude cap.
pub fn sweep(left: &EndState, gas: &GasParams, eps_list: &[f64], opts: &IntegratorOptions) -> Result<SweepReport> {
    sweep_capped(left, gas, eps_list, opts, DEFAULT_EPS_MAX_FRACTION * left.v)
}

/// Verify every amplitude (concurrently) and fit the scaling of each
/// diagnostic. Per-amplitude failures are recorded, not propagated.
pub fn sweep_capped(
    left: &EndState,
    gas: &GasParams,
    eps_list: &[f64],
    opts: &IntegratorOptions,
    eps_max: f64,
) -> Result<SweepReport> {
    if eps_list.is_empty() {
        return Err(Error::Usage("empty amplitude list".into()));
    }
    if eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::Usage("amplitudes must be positive".into()));
    }
    let mut eps: Vec<f64> = eps_list.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Usage("duplicate amplitudes".into()));
    }
    opts.validate()?;

    let members: Vec<SweepMember> = eps
        .par_iter()
        .map(|&e| {
            let run = || -> Result<VerificationReport> {
                let shock = ShockData::three_shock_capped(*left, e, gas, eps_max)?;
                verify_shock(&shock, gas, opts)
            };
            match run() {
                Ok(r) => SweepMember {
                    eps: e,
                    report: Some(r),
                    error: None,
                },
                Err(err) => SweepMember {
                    eps: e,
                    report: None,
                    error: Some(err.to_string()),
                },
            }
        })
        .collect();

    let ok: Vec<Diagnostics> = members
        .iter()
        .filter_map(|m| m.report.as_ref().map(|r| r.diagnostics))
        .collect();
    let xs: Vec<f64> = ok.iter().map(|d| d.eps).collect();
    let mut slopes = Vec::new();
    let mut checks = Vec::new();
    if ok.len() >= 3 {
        for name in FIRST_ORDER.iter().chain(["second_derivative_ratio"].iter()) {
            let ys: Vec<f64> = ok.iter().map(|d| series(d, name)).collect();
            let fit = loglog_fit(&xs, &ys);
            if let Some(fit) = fit {
                slopes.push(NamedFit {
                    name: name.to_string(),
                    fit,
                });
            }
            let slope = fit.map_or(f64::NAN, |f| f.slope);
            checks.push(if *name == "second_derivative_ratio" {
                Check {
                    name: format!("slope_{name}"),
                    pass: slope.abs() <= BOUNDED_SLOPE,
                    value: slope,
                    tolerance: BOUNDED_SLOPE,
                    details: "bounded uniformly in eps: |log-log slope| small".into(),
                }
            } else {
                Check {
                    name: format!("slope_{name}"),
                    pass: slope >= SLOPE_WINDOW.0 && slope <= SLOPE_WINDOW.1,
                    value: slope,
                    tolerance: SLOPE_WINDOW.1,
                    details: format!("log-log slope in [{}, {}]", SLOPE_WINDOW.0, SLOPE_WINDOW.1),
                }
            });
            if *name != "second_derivative_ratio" {
                for w in ok.windows(2).filter(|w| w[0].eps == 2.0 * w[1].eps) {
                    let f = series(&w[0], name) / series(&w[1], name);
                    checks.push(Check {
                        name: format!("halving_{name}@{}", w[1].eps),
                        pass: f >= HALVING_WINDOW.0 && f <= HALVING_WINDOW.1,
                        value: f,
                        tolerance: HALVING_WINDOW.1,
                        details: format!("shrink factor in [{}, {}]", HALVING_WINDOW.0, HALVING_WINDOW.1),
                    });
                }
            }
        }
    }
    let rate_slope_over_a = {
        let mut x = vec![];
        let mut y = vec![];
        for d in &ok {
            for l in [d.lambda_minus, d.lambda_plus].into_iter().flatten() {
                x.push(d.eps);
                y.push(l);
            }
        }
        if ok.len() >= 2 {
            fit_through_origin(&x, &y).map(|s| s / ok[0].a)
        } else {
            None
        }
    };
    if ok.len() >= 3 {
        let v = rate_slope_over_a.unwrap_or(f64::NAN);
        checks.push(Check {
            name: "rate_slope".into(),
            pass: (v - 1.0).abs() <= RATE_SLOPE_TOL,
            value: v,
            tolerance: RATE_SLOPE_TOL,
            details: "decay-rate slope through origin divided by A, within 20% of 1".into(),
        });
    }
    let sigma_gap_limit_estimate = (ok.len() >= 2).then(|| {
        let n = ok.len();
        richardson(ok[n - 2].eps, ok[n - 2].sigma_gap_ratio, ok[n - 1].eps, ok[n - 1].sigma_gap_ratio)
    });
    Ok(SweepReport {
        eps,
        members,
        slopes,
        rate_slope_over_a,
        sigma_gap_limit_estimate,
        checks,
    })
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
    fn sigma_gap_values() {
        let (gas, left) = p0();
        let s = ShockData::three_shock(left, 0.1, &gas).unwrap();
        let g = sigma_gap(&s, &gas);
        assert_relative_eq!(g.gap, 0.0783163, epsilon = 1e-7);
        assert_relative_eq!(g.ratio, 0.783163, epsilon = 1e-6);
        assert_relative_eq!(g.limit, 0.8606629, epsilon = 1e-7);
        let z = ShockData::three_shock(left, 0.0, &gas).unwrap();
        assert_eq!(sigma_gap(&z, &gas).gap, 0.0);
        assert_eq!(sigma_gap(&z, &gas).ratio, 0.0);
    }

    #[test]
    fn fits() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let f = linear_fit(&x, &y).unwrap();
        assert_relative_eq!(f.slope, 2.0);
        assert_relative_eq!(f.intercept, 1.0);
        assert_relative_eq!(fit_through_origin(&x, &[2.0, 4.0, 6.0, 8.0]).unwrap(), 2.0);
        let l = loglog_fit(&[0.1, 0.05, 0.025], &[0.3, 0.15, 0.075]).unwrap();
        assert_relative_eq!(l.slope, 1.0, epsilon = 1e-12);
        assert!(loglog_fit(&[0.1, 0.0], &[1.0, 1.0]).is_none());
        assert!(linear_fit(&[1.0], &[1.0]).is_none());
        assert_relative_eq!(richardson(0.1, 0.78, 0.05, 0.82), 0.86, epsilon = 1e-14);
        assert_relative_eq!(richardson(0.3, 0.5, 0.1, 0.7), 0.8, epsilon = 1e-14);
    }

    #[test]
    fn sweep_usage_errors() {
        let (gas, left) = p0();
        let o = IntegratorOptions::default();
        assert!(matches!(sweep(&left, &gas, &[], &o), Err(Error::Usage(_))));
        assert!(matches!(sweep(&left, &gas, &[0.1, -0.1], &o), Err(Error::Usage(_))));
        assert!(matches!(sweep(&left, &gas, &[0.1, 0.1], &o), Err(Error::Usage(_))));
    }

    #[test]
    fn single_member_sweep_has_no_slopes() {
        let (gas, left) = p0();
        let r = sweep(&left, &gas, &[0.1], &IntegratorOptions::default()).unwrap();
        assert_eq!(r.members.len(), 1);
        assert!(r.members[0].report.is_some());
        assert!(r.slopes.is_empty() && r.checks.is_empty());
    }

    #[test]
    fn expected_sign_patterns() {
        assert_eq!(expected_signs(ShockFamily::Three), [1, -1, -1]);
        assert_eq!(expected_signs(ShockFamily::One), [-1, -1, 1]);
    }
}
