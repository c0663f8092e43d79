//! Command-line front end: `potential`, `energy`, `force`, `kernel`, `sweep`
//! and `check`, all driven by the same TOML run configuration.
//!
//! Exit codes: `0` success, `1` invalid input or a failed check, `2` a
//! quadrature that did not converge (no partial output is written).

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::energy::{
    energy_analytic, energy_brute_force, energy_via_kernel, kernel_f, large_distance_energy,
    relative_difference, EnergyBreakdown, LargeDistanceEnergy,
};
use crate::error::CasimirError;
use crate::force::{force_finite_difference, force_spectral, ForceResult};
use crate::pair_potential::pair_u_detailed;
use crate::polarizability::{diluteness_report, DilutenessReport};
use crate::validation::{run_builtin_checks, CheckOutcome};

pub use config::{ConfigError, Format, RunConfig};
use config::{apply_overrides, get_path, load_table, set_path, SweepTarget};
use output::{num, render_csv, render_json, Table};

/// Environment variable overriding `run.workers`.
pub const WORKERS_ENV: &str = "CASIMIR_BALL_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "casimir-ball", version, about = "Casimir energy and surface force of a dilute dielectric ball")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandKind {
    Potential,
    Energy,
    Force,
    Kernel,
    Sweep,
    Check,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the retarded pair potential U(r) on `potential.r`.
    Potential(CommonArgs),
    /// Ball energy by the closed form, the kernel integral and brute force.
    Energy(CommonArgs),
    /// Surface pressure from the spectral formula and from the energy slope.
    Force(CommonArgs),
    /// Tabulate the dimensionless kernel f(N, p) on `kernel.n` x `kernel.p`.
    Kernel(CommonArgs),
    /// Repeat a target command over a grid of one config parameter.
    Sweep(CommonArgs),
    /// Run the built-in consistency checks.
    Check(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a config key, e.g. `--set geometry.a=2.0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Write the result here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Command {
    fn split(&self) -> (CommandKind, &CommonArgs) {
        match self {
            Command::Potential(a) => (CommandKind::Potential, a),
            Command::Energy(a) => (CommandKind::Energy, a),
            Command::Force(a) => (CommandKind::Force, a),
            Command::Kernel(a) => (CommandKind::Kernel, a),
            Command::Sweep(a) => (CommandKind::Sweep, a),
            Command::Check(a) => (CommandKind::Check, a),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] CasimirError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(e) if e.is_convergence_failure() => 2,
            _ => 1,
        }
    }
}

/// Relative differences between the energy routes. Agreement means the
/// kernel route within [`KERNEL_AGREEMENT`] and brute force within
/// [`BRUTE_FORCE_AGREEMENT`] of the closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyAgreement {
    pub analytic_vs_brute: Option<f64>,
    pub analytic_vs_kernel: f64,
    pub brute_agrees: Option<bool>,
    pub kernel_agrees: bool,
}

pub const KERNEL_AGREEMENT: f64 = 1e-7;
pub const BRUTE_FORCE_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyResults {
    pub n: f64,
    pub analytic: EnergyBreakdown,
    pub kernel: EnergyBreakdown,
    pub brute_force: Option<EnergyBreakdown>,
    pub large_distance: LargeDistanceEnergy,
    pub diluteness: DilutenessReport,
    pub agreement: EnergyAgreement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub config: RunConfig,
    pub results: EnergyResults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceResults {
    pub n: f64,
    /// Absent for the static model, which has no spectral density.
    pub spectral: Option<ForceResult>,
    pub finite_difference: ForceResult,
    pub relative_difference: Option<f64>,
    pub attractive: bool,
    pub diluteness: DilutenessReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceReport {
    pub config: RunConfig,
    pub results: ForceResults,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

/// Output of one command before rendering.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub json: Value,
    pub table: Table,
    pub passed: bool,
    pub dilute_warning: Option<f64>,
}

impl Rendered {
    fn tabular(config: &RunConfig, table: Table) -> Result<Self, CliError> {
        Ok(Rendered {
            json: json!({ "config": to_value(config)?, "results": table.to_records() }),
            table,
            passed: true,
            dilute_warning: None,
        })
    }

    pub fn render(&self, format: Format, digits: usize) -> Result<String, CliError> {
        match format {
            Format::Json => render_json(&self.json, digits).map_err(|e| CliError::Output(e.to_string())),
            Format::Csv => render_csv(&self.table, digits).map_err(|e| CliError::Output(e.to_string())),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Output(e.to_string()))
}

fn dilute_warning(report: &DilutenessReport) -> Option<f64> {
    report.warning.then_some(report.max_epsilon_minus_one)
}

pub fn potential_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let model = cfg.model()?;
    let radii = cfg.potential.r.points("potential.r")?;
    let rows = radii
        .par_iter()
        .map(|&r| pair_u_detailed(&model, r, &cfg.quadrature).map(|res| (r, res)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["r", "u", "error_estimate"]);
    for (r, res) in rows {
        table.push(vec![num(r), num(res.value), num(res.error_estimate)]);
    }
    Ok(table)
}

pub fn kernel_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let ns = cfg.kernel.n.points("kernel.n")?;
    let ps = cfg.kernel.p.points("kernel.p")?;
    let mut table = Table::new(&["n", "p", "f", "in_domain"]);
    for &n in &ns {
        for &p in &ps {
            let k = kernel_f(n, p);
            table.push(vec![num(k.n), num(k.p), num(k.f_value), Value::Bool(k.in_domain)]);
        }
    }
    Ok(table)
}

pub fn energy_report(cfg: &RunConfig) -> Result<EnergyReport, CliError> {
    let geom = cfg.geometry()?;
    let model = cfg.model()?;
    let analytic = energy_analytic(&geom, &model, &cfg.quadrature)?;
    let kernel = energy_via_kernel(&geom, &model, &cfg.quadrature)?;
    let brute_force = if cfg.energy.brute_force {
        Some(energy_brute_force(&geom, &model, &cfg.quadrature_nested)?)
    } else {
        None
    };
    let large_distance = large_distance_energy(&geom, &model, &cfg.quadrature)?;
    let analytic_vs_kernel = relative_difference(kernel.total, analytic.total);
    let analytic_vs_brute = brute_force.map(|b| relative_difference(b.total, analytic.total));
    let agreement = EnergyAgreement {
        analytic_vs_brute,
        analytic_vs_kernel,
        brute_agrees: analytic_vs_brute.map(|d| d <= BRUTE_FORCE_AGREEMENT),
        kernel_agrees: analytic_vs_kernel <= KERNEL_AGREEMENT,
    };
    Ok(EnergyReport {
        config: cfg.clone(),
        results: EnergyResults {
            n: geom.ratio(),
            analytic,
            kernel,
            brute_force,
            large_distance,
            diluteness: diluteness_report(&model, geom.rho),
            agreement,
        },
    })
}

impl EnergyReport {
    pub fn table(&self) -> Table {
        let r = &self.results;
        let terms = r.analytic.terms.unwrap_or_default();
        let mut table = Table::new(&[
            "n",
            "analytic_total",
            "volume_term",
            "surface_term",
            "constant_term",
            "large_distance_term",
            "analytic_error",
            "kernel_total",
            "brute_force_total",
            "analytic_vs_kernel",
            "analytic_vs_brute",
            "large_distance_closed_form",
            "max_epsilon_minus_one",
        ]);
        table.push(vec![
            num(r.n),
            num(r.analytic.total),
            num(terms.volume_term),
            num(terms.surface_term),
            num(terms.constant_term),
            num(terms.large_distance_term),
            num(r.analytic.error_estimate),
            num(r.kernel.total),
            r.brute_force.map_or(Value::Null, |b| num(b.total)),
            num(r.agreement.analytic_vs_kernel),
            r.agreement.analytic_vs_brute.map_or(Value::Null, num),
            num(r.large_distance.closed_form),
            num(r.diluteness.max_epsilon_minus_one),
        ]);
        table
    }
}

pub fn force_report(cfg: &RunConfig) -> Result<ForceReport, CliError> {
    let geom = cfg.geometry()?;
    let model = cfg.model()?;
    let spectral = match force_spectral(&geom, &model, &cfg.quadrature) {
        Ok(f) => Some(f),
        Err(CasimirError::ModelKind { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let finite_difference = force_finite_difference(&geom, &model, &cfg.quadrature, cfg.force.step)?;
    let primary = spectral.unwrap_or(finite_difference);
    Ok(ForceReport {
        config: cfg.clone(),
        results: ForceResults {
            n: geom.ratio(),
            spectral,
            finite_difference,
            relative_difference: spectral
                .map(|s| relative_difference(finite_difference.pressure, s.pressure)),
            attractive: primary.pressure < 0.0,
            diluteness: diluteness_report(&model, geom.rho),
        },
    })
}

impl ForceReport {
    pub fn table(&self) -> Table {
        let r = &self.results;
        let mut table = Table::new(&[
            "n",
            "spectral_pressure",
            "spectral_error",
            "finite_difference_pressure",
            "finite_difference_error",
            "relative_difference",
            "attractive",
        ]);
        table.push(vec![
            num(r.n),
            r.spectral.map_or(Value::Null, |s| num(s.pressure)),
            r.spectral.map_or(Value::Null, |s| num(s.error_estimate)),
            num(r.finite_difference.pressure),
            num(r.finite_difference.error_estimate),
            r.relative_difference.map_or(Value::Null, num),
            Value::Bool(r.attractive),
        ]);
        table
    }
}

pub fn check_report() -> CheckReport {
    let checks = run_builtin_checks();
    CheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn run_target(target: SweepTarget, cfg: &RunConfig) -> Result<(Table, Option<f64>), CliError> {
    Ok(match target {
        SweepTarget::Potential => (potential_table(cfg)?, None),
        SweepTarget::Kernel => (kernel_table(cfg)?, None),
        SweepTarget::Energy => {
            let r = energy_report(cfg)?;
            (r.table(), dilute_warning(&r.results.diluteness))
        }
        SweepTarget::Force => {
            let r = force_report(cfg)?;
            (r.table(), dilute_warning(&r.results.diluteness))
        }
    })
}

/// Runs the sweep target once per grid value of `sweep.parameter`.
pub fn sweep_table(cfg: &RunConfig) -> Result<(Table, Option<f64>), CliError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| ConfigError::field("sweep", "section is required for the sweep command"))?;
    let base = cfg.to_table()?;
    let param = sweep.parameter.as_str();
    let integral = match get_path(&base, param) {
        Some(toml::Value::Float(_)) => false,
        Some(toml::Value::Integer(_)) => true,
        Some(_) => return Err(ConfigError::field("sweep.parameter", format!("`{param}` is not numeric")).into()),
        None => return Err(ConfigError::field("sweep.parameter", format!("`{param}` does not name a config field")).into()),
    };
    let grid = sweep.grid.points("sweep.grid")?;
    let point_configs = grid
        .iter()
        .map(|&v| {
            let mut table = base.clone();
            table.remove("sweep");
            let value = if integral {
                if v.fract() != 0.0 {
                    return Err(ConfigError::field("sweep.grid", format!("`{param}` takes integers, got {v}")));
                }
                toml::Value::Integer(v as i64)
            } else {
                toml::Value::Float(v)
            };
            set_path(&mut table, param, value)?;
            RunConfig::from_table(&table)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let parts = point_configs
        .par_iter()
        .zip(grid.par_iter())
        .map(|(point, &v)| {
            run_target(sweep.target, point).map(|(t, w)| (t.with_leading(param, num(v)), w))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut warning: Option<f64> = None;
    let mut table = Table::default();
    for (part, w) in parts {
        table.columns = part.columns;
        table.rows.extend(part.rows);
        if let Some(w) = w {
            warning = Some(warning.map_or(w, |prev| prev.max(w)));
        }
    }
    Ok((table, warning))
}

/// Runs one command on a parsed configuration.
pub fn execute(kind: CommandKind, cfg: &RunConfig) -> Result<Rendered, CliError> {
    match kind {
        CommandKind::Potential => Rendered::tabular(cfg, potential_table(cfg)?),
        CommandKind::Kernel => Rendered::tabular(cfg, kernel_table(cfg)?),
        CommandKind::Sweep => {
            let (table, warning) = sweep_table(cfg)?;
            let mut r = Rendered::tabular(cfg, table)?;
            r.dilute_warning = warning;
            Ok(r)
        }
        CommandKind::Energy => {
            let report = energy_report(cfg)?;
            Ok(Rendered {
                json: to_value(&report)?,
                table: report.table(),
                passed: true,
                dilute_warning: dilute_warning(&report.results.diluteness),
            })
        }
        CommandKind::Force => {
            let report = force_report(cfg)?;
            Ok(Rendered {
                json: to_value(&report)?,
                table: report.table(),
                passed: true,
                dilute_warning: dilute_warning(&report.results.diluteness),
            })
        }
        CommandKind::Check => {
            let report = check_report();
            let mut table = Table::new(&["name", "passed", "metric", "threshold", "detail"]);
            for c in &report.checks {
                table.push(vec![
                    json!(c.name),
                    Value::Bool(c.passed),
                    num(c.metric),
                    num(c.threshold),
                    json!(c.detail),
                ]);
            }
            Ok(Rendered {
                json: to_value(&report)?,
                table,
                passed: report.passed,
                dilute_warning: None,
            })
        }
    }
}

fn worker_count(cfg: &RunConfig) -> Result<Option<usize>, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::field(WORKERS_ENV, format!("expected a positive integer, got `{text}`"))),
        },
        Err(_) => Ok(cfg.run.workers),
    }
}

fn run_command(command: &Command) -> Result<bool, CliError> {
    let (kind, args) = command.split();
    let mut table = load_table(args.config.as_deref())?;
    apply_overrides(&mut table, &args.set)?;
    let cfg = RunConfig::from_table(&table)?;
    let format = args.format.unwrap_or(cfg.output.format);
    let path = args
        .output
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(PathBuf::from));

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = worker_count(&cfg)? {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Output(e.to_string()))?;
    let rendered = pool.install(|| execute(kind, &cfg))?;

    if let Some(eps) = rendered.dilute_warning {
        eprintln!(
            "warning: epsilon - 1 reaches {eps:.3e}; the dilute approximation may be inaccurate"
        );
    }
    let text = rendered.render(format, cfg.output.precision)?;
    match path {
        Some(p) => std::fs::write(&p, text)
            .map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Output(e.to_string()))?;
        }
    }
    if !rendered.passed {
        eprintln!("error: one or more checks failed");
    }
    Ok(rendered.passed)
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_command(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
