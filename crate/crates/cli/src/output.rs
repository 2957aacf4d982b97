use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use shock_core::gas::{rh_residual_scaled, lax_admissible, GasParams, ShockData, ShockFamily};
use shock_core::shooting::{Profile, ProfileMeta};
use shock_core::verify::{Check, DecayFit, Diagnostics, GridInfo, LineFit, SweepReport, VerificationReport};
use shock_core::wave::second_derivative;

use crate::Config;

/// Bumped whenever a key is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(e: impl Display) -> Self {
        Failure { code: 2, message: e.to_string() }
    }

    pub fn compute(e: impl Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }

    pub fn io(e: impl Display) -> Self {
        Failure { code: 3, message: e.to_string() }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(doc).map_err(Failure::compute)?;
    s.push('\n');
    Ok(s)
}

/// Write to `path`, or to stdout when there is none.
pub fn write_output(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Failure::io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::io(format!("stdout: {e}")))
        }
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        ryu::Buffer::new().format_finite(x).to_owned()
    } else {
        x.to_string()
    }
}

pub const CSV_HEADER: &str = "xi,v,u,theta,dv,du,dtheta,d2v";

pub fn profile_csv(p: &Profile) -> String {
    let mut s = String::with_capacity(p.len() * 160);
    s.push_str(CSV_HEADER);
    s.push('\n');
    for ((x, st), d) in p.xi.iter().zip(&p.states).zip(&p.derivs) {
        let d2 = second_derivative(st, &p.shock, &p.gas);
        let row = [*x, st.v, st.u, st.theta, d[0], d[1], d[2], d2[0]];
        for (k, val) in row.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            s.push_str(&num(*val));
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct EndstateDoc<'a> {
    schema_version: u32,
    config: &'a Config,
    shock: &'a ShockData,
    rh_residual: [f64; 3],
    lax: Option<ShockFamily>,
}

pub fn endstate_document<'a>(config: &'a Config, shock: &'a ShockData, gas: &GasParams) -> impl Serialize + 'a {
    EndstateDoc {
        schema_version: SCHEMA_VERSION,
        config,
        rh_residual: rh_residual_scaled(&shock.left, &shock.right, shock.sigma_eps, gas),
        lax: lax_admissible(&shock.left, &shock.right),
        shock,
    }
}

#[derive(Serialize)]
struct Row {
    xi: f64,
    v: f64,
    u: f64,
    theta: f64,
    dv: f64,
    du: f64,
    dtheta: f64,
    d2v: f64,
}

#[derive(Serialize)]
struct ProfileDoc<'a> {
    schema_version: u32,
    config: &'a Config,
    shock: &'a ShockData,
    meta: &'a ProfileMeta,
    rows: Vec<Row>,
}

pub fn profile_document<'a>(config: &'a Config, p: &'a Profile) -> impl Serialize + 'a {
    let rows = p
        .xi
        .iter()
        .zip(&p.states)
        .zip(&p.derivs)
        .map(|((&xi, s), d)| Row {
            xi,
            v: s.v,
            u: s.u,
            theta: s.theta,
            dv: d[0],
            du: d[1],
            dtheta: d[2],
            d2v: second_derivative(s, &p.shock, &p.gas)[0],
        })
        .collect();
    ProfileDoc {
        schema_version: SCHEMA_VERSION,
        config,
        shock: &p.shock,
        meta: &p.meta,
        rows,
    }
}

/// Tail rates in the orientation of `family`; diagnostics are always of the 3-shock.
fn oriented_rates(d: &Diagnostics, family: ShockFamily) -> (Option<f64>, Option<f64>) {
    match family {
        ShockFamily::Three => (d.lambda_minus, d.lambda_plus),
        ShockFamily::One => (d.lambda_plus, d.lambda_minus),
    }
}

#[derive(Serialize)]
struct VerifyFits<'a> {
    lambda_minus: Option<f64>,
    lambda_plus: Option<f64>,
    slopes: Option<BTreeMap<String, LineFit>>,
    constants: BTreeMap<String, f64>,
    decay: Option<&'a DecayFit>,
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    schema_version: u32,
    config: &'a Config,
    shock: Option<&'a ShockData>,
    pass: bool,
    checks: Vec<Check>,
    fits: Option<VerifyFits<'a>>,
    diagnostics: Option<&'a Diagnostics>,
    grid: Option<&'a GridInfo>,
}

pub fn verify_document<'a>(config: &'a Config, rep: &'a VerificationReport) -> impl Serialize + 'a {
    let (lambda_minus, lambda_plus) = oriented_rates(&rep.diagnostics, rep.shock.family);
    VerifyDoc {
        schema_version: SCHEMA_VERSION,
        config,
        shock: Some(&rep.shock),
        pass: rep.all_pass(),
        checks: rep.checks.clone(),
        fits: Some(VerifyFits {
            lambda_minus,
            lambda_plus,
            slopes: None,
            constants: rep.constants.iter().cloned().collect(),
            decay: rep.decay.as_ref(),
        }),
        diagnostics: Some(&rep.diagnostics),
        grid: Some(&rep.grid),
    }
}

/// Report for an amplitude rejected before any profile was computed.
pub fn failed_verify_document(config: &Config, check: Check) -> impl Serialize + '_ {
    VerifyDoc {
        schema_version: SCHEMA_VERSION,
        config,
        shock: None,
        pass: false,
        checks: vec![check],
        fits: None,
        diagnostics: None,
        grid: None,
    }
}

#[derive(Serialize)]
struct SweepFits {
    lambda_minus: Vec<Option<f64>>,
    lambda_plus: Vec<Option<f64>>,
    slopes: Option<BTreeMap<String, LineFit>>,
    rate_slope_over_a: Option<f64>,
    sigma_gap_limit_estimate: Option<f64>,
}

#[derive(Serialize)]
struct SweepMemberDoc<'a> {
    eps: f64,
    pass: bool,
    shock: Option<ShockData>,
    error: Option<&'a str>,
    checks: Option<&'a [Check]>,
    constants: Option<BTreeMap<String, f64>>,
    diagnostics: Option<&'a Diagnostics>,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    schema_version: u32,
    config: &'a Config,
    shock: Option<ShockData>,
    pass: bool,
    checks: &'a [Check],
    fits: SweepFits,
    members: Vec<SweepMemberDoc<'a>>,
}

pub fn sweep_document<'a>(config: &'a Config, sw: &'a SweepReport, family: u8) -> impl Serialize + 'a {
    let fam = if family == 1 { ShockFamily::One } else { ShockFamily::Three };
    let orient = |s: &ShockData| if family == 1 { s.mirrored() } else { *s };
    let rates: Vec<(Option<f64>, Option<f64>)> = sw
        .members
        .iter()
        .map(|m| m.report.as_ref().map_or((None, None), |r| oriented_rates(&r.diagnostics, fam)))
        .collect();
    let slopes = if sw.slopes.is_empty() {
        None
    } else {
        Some(sw.slopes.iter().map(|f| (f.name.clone(), f.fit)).collect())
    };
    let members = sw
        .members
        .iter()
        .map(|m| SweepMemberDoc {
            eps: m.eps,
            pass: m.report.as_ref().is_some_and(|r| r.all_pass()),
            shock: m.report.as_ref().map(|r| orient(&r.shock)),
            error: m.error.as_deref(),
            checks: m.report.as_ref().map(|r| r.checks.as_slice()),
            constants: m.report.as_ref().map(|r| r.constants.iter().cloned().collect()),
            diagnostics: m.report.as_ref().map(|r| &r.diagnostics),
        })
        .collect();
    SweepDoc {
        schema_version: SCHEMA_VERSION,
        config,
        shock: None,
        pass: sw.all_pass(),
        checks: &sw.checks,
        fits: SweepFits {
            lambda_minus: rates.iter().map(|r| r.0).collect(),
            lambda_plus: rates.iter().map(|r| r.1).collect(),
            slopes,
            rate_slope_over_a: sw.rate_slope_over_a,
            sigma_gap_limit_estimate: sw.sigma_gap_limit_estimate,
        },
        members,
    }
}
