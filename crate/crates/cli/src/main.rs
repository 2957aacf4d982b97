//! `shockprof`: compute and check viscous shock profiles from the command line.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shock_core::gas::{EndState, GasParams, ShockData, DEFAULT_EPS_MAX_FRACTION};
use shock_core::shooting::{shoot_profile, IntegratorOptions};
use shock_core::verify::{sweep_capped, verify_shock, Check};
use shock_core::Error;

use output::{write_output, Failure};

#[derive(Parser, Debug)]
#[command(name = "shockprof", version, about = "Viscous shock profiles with Brenner-type volume diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Right state and shock speeds for a given amplitude.
    Endstate {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        /// Write the document here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shoot the profile and write it as CSV (or JSON).
    Profile {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[command(flatten)]
        integ: IntegArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run every check for one amplitude and write a JSON report.
    Verify {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[command(flatten)]
        integ: IntegArgs,
        #[arg(long)]
        report: PathBuf,
    },
    /// Verify a list of amplitudes and fit their scaling.
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        /// Comma-separated amplitudes, e.g. 0.1,0.05,0.025
        #[arg(long, allow_hyphen_values = true)]
        eps_list: String,
        #[command(flatten)]
        integ: IntegArgs,
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Gas constants and the left state of the 3-shock. All required.
#[derive(Args, Debug, Clone)]
struct StateArgs {
    #[arg(long)]
    gamma: f64,
    #[arg(long = "R")]
    r: f64,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    kappa: f64,
    #[arg(long = "v", visible_alias = "v-minus")]
    v: f64,
    #[arg(long = "u", visible_alias = "u-minus", allow_negative_numbers = true)]
    u: f64,
    #[arg(long = "theta", visible_alias = "theta-minus")]
    theta: f64,
    /// 3 (default) or 1; a 1-shock is the mirror image of the 3-shock from the given state.
    #[arg(long, default_value_t = 3, value_parser = parse_family)]
    family: u8,
    /// Largest admissible amplitude [default: 0.3 v].
    #[arg(long)]
    eps_max: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct IntegArgs {
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    delta: f64,
    #[arg(long, default_value_t = 1e-6)]
    stop_tol: f64,
    #[arg(long)]
    max_span: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
}

impl IntegArgs {
    fn options(&self) -> Result<IntegratorOptions, Failure> {
        let o = IntegratorOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            delta: self.delta,
            max_span: self.max_span,
            stop_tol: self.stop_tol,
            max_step: self.max_step,
        };
        o.validate().map_err(Failure::usage)?;
        Ok(o)
    }
}

#[derive(Serialize, Debug, Clone)]
pub struct Config {
    pub command: &'static str,
    pub gas: GasParams,
    pub left: EndState,
    pub family: u8,
    pub eps: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    pub eps_max: f64,
    pub options: Option<IntegratorOptions>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

struct Physical {
    gas: GasParams,
    left: EndState,
    eps_max: f64,
}

fn physical(s: &StateArgs) -> Result<Physical, Failure> {
    let gas = GasParams::new(s.r, s.gamma, s.mu, s.kappa).map_err(Failure::usage)?;
    let left = EndState::new(s.v, s.u, s.theta, &gas).map_err(Failure::usage)?;
    let eps_max = s.eps_max.unwrap_or(DEFAULT_EPS_MAX_FRACTION * left.v);
    if !(eps_max > 0.0) {
        return Err(Failure::usage("--eps-max must be positive"));
    }
    Ok(Physical { gas, left, eps_max })
}

fn parse_family(s: &str) -> Result<u8, String> {
    match s {
        "1" => Ok(1),
        "3" => Ok(3),
        _ => Err(format!("expected 1 or 3, got '{s}'")),
    }
}

fn check_eps(eps: f64) -> Result<(), Failure> {
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(Failure::usage(format!(
            "--eps must be a non-negative amplitude (got {eps}); use --family 1 for 1-shocks"
        )));
    }
    Ok(())
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>, Failure> {
    if s.trim().is_empty() {
        return Err(Failure::usage("--eps-list is empty"));
    }
    let list = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("invalid amplitude '{t}' in --eps-list")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    for &e in &list {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Failure::usage(format!("amplitudes must be positive (got {e})")));
        }
    }
    Ok(list)
}

fn oriented(shock: ShockData, family: u8) -> ShockData {
    if family == 1 {
        shock.mirrored()
    } else {
        shock
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Endstate { state, eps, out } => {
            check_eps(eps)?;
            let ph = physical(&state)?;
            let shock = ShockData::three_shock_capped(ph.left, eps, &ph.gas, ph.eps_max).map_err(Failure::compute)?;
            let config = Config {
                command: "endstate",
                gas: ph.gas,
                left: ph.left,
                family: state.family,
                eps: Some(eps),
                eps_list: None,
                eps_max: ph.eps_max,
                options: None,
                format: None,
                out: out.clone(),
            };
            let shock = oriented(shock, state.family);
            let doc = output::endstate_document(&config, &shock, &ph.gas);
            write_output(out.as_deref(), &output::to_json(&doc)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Profile {
            state,
            eps,
            integ,
            out,
            format,
        } => {
            check_eps(eps)?;
            let ph = physical(&state)?;
            let opts = integ.options()?;
            let shock = ShockData::three_shock_capped(ph.left, eps, &ph.gas, ph.eps_max).map_err(Failure::compute)?;
            let mut profile = shoot_profile(&shock, &ph.gas, &opts).map_err(Failure::compute)?;
            if state.family == 1 {
                profile = profile.mirrored();
            }
            let body = match format {
                Format::Csv => output::profile_csv(&profile),
                Format::Json => {
                    let config = Config {
                        command: "profile",
                        gas: ph.gas,
                        left: ph.left,
                        family: state.family,
                        eps: Some(eps),
                        eps_list: None,
                        eps_max: ph.eps_max,
                        options: Some(opts),
                        format: Some(format),
                        out: Some(out.clone()),
                    };
                    let doc = output::profile_document(&config, &profile);
                    output::to_json(&doc)?
                }
            };
            write_output(Some(&out), &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            state,
            eps,
            integ,
            report,
        } => {
            check_eps(eps)?;
            let ph = physical(&state)?;
            let opts = integ.options()?;
            let config = Config {
                command: "verify",
                gas: ph.gas,
                left: ph.left,
                family: state.family,
                eps: Some(eps),
                eps_list: None,
                eps_max: ph.eps_max,
                options: Some(opts),
                format: None,
                out: Some(report.clone()),
            };
            let shock = match ShockData::three_shock_capped(ph.left, eps, &ph.gas, ph.eps_max) {
                Ok(s) => oriented(s, state.family),
                Err(e @ Error::AmplitudeTooLarge { .. }) => {
                    let check = Check {
                        name: "amplitude".into(),
                        pass: false,
                        value: eps,
                        tolerance: ph.eps_max,
                        details: e.to_string(),
                    };
                    let doc = output::failed_verify_document(&config, check);
                    write_output(Some(&report), &output::to_json(&doc)?)?;
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(Failure::compute(e)),
            };
            let rep = verify_shock(&shock, &ph.gas, &opts).map_err(Failure::compute)?;
            let doc = output::verify_document(&config, &rep);
            write_output(Some(&report), &output::to_json(&doc)?)?;
            for c in rep.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {} (value {}, tolerance {})", c.name, c.value, c.tolerance);
            }
            Ok(if rep.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep {
            state,
            eps_list,
            integ,
            report,
        } => {
            let list = parse_eps_list(&eps_list)?;
            let ph = physical(&state)?;
            let opts = integ.options()?;
            let sw = sweep_capped(&ph.left, &ph.gas, &list, &opts, ph.eps_max).map_err(|e| match e {
                Error::Usage(_) => Failure::usage(e),
                other => Failure::compute(other),
            })?;
            let config = Config {
                command: "sweep",
                gas: ph.gas,
                left: ph.left,
                family: state.family,
                eps: None,
                eps_list: Some(sw.eps.clone()),
                eps_max: ph.eps_max,
                options: Some(opts),
                format: None,
                out: Some(report.clone()),
            };
            let doc = output::sweep_document(&config, &sw, state.family);
            write_output(Some(&report), &output::to_json(&doc)?)?;
            for m in &sw.members {
                if let Some(e) = &m.error {
                    eprintln!("eps = {}: {e}", m.eps);
                }
            }
            Ok(if sw.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
