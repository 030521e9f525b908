use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use hbm_core::algebra::parse_rational;
use hbm_core::reference::{
    exact_period, regularized_period_quadrature, regularized_period_ode, simulate_regularized, weak_solution_samples,
    OdeTolerances, PeriodResult,
};
use hbm_core::solver::{error_table, solve_hbm_with, CellStatus, ErrorTableEntry, HbmSolution, SolveOptions};
use hbm_core::{Budget, HbmError, LexStrategy};
use num_traits::Signed;
use serde_json::json;
use thiserror::Error;

use crate::{BudgetArgs, Format, Method, PeriodArgs, SolveArgs, Strategy, TableArgs, TrajectoryArgs, WeaksolArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Budget(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<HbmError> for CliError {
    fn from(e: HbmError) -> Self {
        match e {
            HbmError::InvalidInput(_) | HbmError::Domain(_) | HbmError::Parse(_) => CliError::Invalid(e.to_string()),
            HbmError::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    let io_err = |source| CliError::Io { path: path.map_or("<stdout>".into(), |p| p.display().to_string()), source };
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p).map_err(io_err)?);
            w.write_all(body.as_bytes()).map_err(io_err)?;
            w.flush().map_err(io_err)?;
            log::info!("wrote {}", p.display());
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
    }
    Ok(())
}

fn budget(args: &BudgetArgs) -> Result<Budget, CliError> {
    let time_limit = match args.time_limit {
        None => None,
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(invalid(format!("time limit must be positive, got {s}"))),
    };
    Ok(Budget { max_spairs: args.budget_spairs, max_coefficient_bits: args.budget_bits, time_limit })
}

fn strategy(s: Strategy) -> LexStrategy {
    match s {
        Strategy::Via => LexStrategy::ViaGrevlex,
        Strategy::Packed => LexStrategy::PackedGrevlex,
        Strategy::Direct => LexStrategy::Direct,
    }
}

fn check_digits(digits: usize) -> Result<(), CliError> {
    if digits == 0 {
        return Err(invalid("digits must be at least 1"));
    }
    Ok(())
}

fn check_positive(name: &str, value: f64) -> Result<(), CliError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(invalid(format!("{name} must be positive, got {value}")));
    }
    Ok(())
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    check_digits(args.digits)?;
    if args.order == 0 {
        return Err(invalid("order must be at least 1"));
    }
    let amplitude = parse_rational(&args.amplitude)?;
    if !amplitude.is_positive() {
        return Err(invalid(format!("amplitude must be positive, got {}", args.amplitude)));
    }
    let options = SolveOptions {
        digits: args.digits,
        budget: budget(&args.budget)?,
        strategy: strategy(args.budget.strategy),
        amplitude,
    };
    log::info!("solving m = {}, N = {}", args.m, args.order);
    let sol = solve_hbm_with(args.m, args.order, &options)?;
    let body = match args.format {
        Format::Text => sol.to_text(),
        Format::Json => format!("{:#}\n", sol.to_json()),
        Format::Csv => solution_csv(&sol),
    };
    emit(args.out.as_deref(), &body)
}

fn solution_csv(sol: &HbmSolution) -> String {
    let json = sol.to_json();
    let mut out = String::from("quantity,value\n");
    let _ = writeln!(out, "omega,{}", sol.omega_decimal());
    for c in json["coefficients"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "{},{}", c["name"].as_str().unwrap_or(""), c["decimal"].as_str().unwrap_or(""));
    }
    let _ = writeln!(out, "C_N,{}", sol.period_coefficient_decimal());
    let _ = writeln!(out, "residual,{}", sol.residual_decimal());
    let _ = writeln!(out, "univariate_degree,{}", sol.univariate_degree());
    out
}

pub fn table(args: &TableArgs) -> Result<(), CliError> {
    check_digits(args.digits)?;
    if args.min_m > args.max_m {
        return Err(invalid(format!("min-m {} exceeds max-m {}", args.min_m, args.max_m)));
    }
    let options = SolveOptions {
        digits: args.digits,
        budget: budget(&args.budget)?,
        strategy: strategy(args.budget.strategy),
        ..SolveOptions::default()
    };
    let entries: Vec<ErrorTableEntry> = if args.max_order == 0 {
        Vec::new()
    } else {
        log::info!("table for m = {}..={}, N = 1..={}", args.min_m, args.max_m, args.max_order);
        error_table(args.max_m, args.max_order, &options).into_iter().filter(|e| e.m >= args.min_m).collect()
    };
    for e in &entries {
        match &e.status {
            CellStatus::Solved => {}
            CellStatus::BudgetExhausted { reason, stats } => {
                log::warn!("(m={}, N={}) budget exhausted: {reason}; {stats}", e.m, e.order)
            }
            CellStatus::Failed { message } => log::warn!("(m={}, N={}) failed: {message}", e.m, e.order),
        }
    }
    let body = match args.format {
        Format::Text => table_text(&entries, args),
        Format::Csv => {
            let mut out = String::from("m,N,C_N,error_percent\n");
            for e in &entries {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    e.m,
                    e.order,
                    e.period_coefficient_display(args.digits),
                    e.error_percent_display()
                );
            }
            out
        }
        Format::Json => {
            let cells: Vec<_> = entries
                .iter()
                .map(|e| {
                    let mut cell = json!({
                        "m": e.m,
                        "N": e.order,
                        "C_N": e.period_coefficient.as_ref().map(|_| e.period_coefficient_display(args.digits)),
                        "error_percent": e.error_percent_f64(),
                        "error_percent_display": e.error_percent_display(),
                    });
                    // Tagged status fields (`status`, and `reason`/`stats` or `message`) sit beside the values.
                    if let (Some(obj), Ok(serde_json::Value::Object(status))) =
                        (cell.as_object_mut(), serde_json::to_value(&e.status))
                    {
                        obj.extend(status);
                    }
                    cell
                })
                .collect();
            format!("{:#}\n", serde_json::Value::Array(cells))
        }
    };
    emit(args.out.as_deref(), &body)
}

fn table_text(entries: &[ErrorTableEntry], args: &TableArgs) -> String {
    if entries.is_empty() {
        return String::new();
    }
    let width = 8;
    let mut out = format!("{:>4} |", "m\\N");
    for n in 1..=args.max_order {
        let _ = write!(out, "{n:>width$}");
    }
    out.push('\n');
    out.push_str(&"-".repeat(6 + width * args.max_order));
    out.push('\n');
    for m in args.min_m..=args.max_m {
        let _ = write!(out, "{m:>4} |");
        for e in entries.iter().filter(|e| e.m == m) {
            let _ = write!(out, "{:>width$}", e.error_percent_display());
        }
        out.push('\n');
    }
    out
}

pub fn period(args: &PeriodArgs) -> Result<(), CliError> {
    check_positive("amplitude", args.amplitude)?;
    if let Some(k) = args.k {
        check_positive("k", k)?;
    }
    let mut methods = args.method.clone();
    methods.dedup();
    let mut results: Vec<PeriodResult> = Vec::new();
    for method in methods {
        let result = match method {
            Method::Exact => exact_period(args.amplitude)?,
            Method::Quadrature | Method::Ode => {
                let k = args.k.ok_or_else(|| invalid("--k is required for the quadrature and ode methods"))?;
                if method == Method::Quadrature {
                    regularized_period_quadrature(args.amplitude, k)?
                } else {
                    regularized_period_ode(args.amplitude, k)?
                }
            }
        };
        results.push(result);
    }
    let body = match args.format {
        Format::Text => {
            let mut out = String::new();
            for r in &results {
                let name = serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(str::to_owned));
                let k = r.k.map_or(String::new(), |k| format!(", k = {k}"));
                let _ = writeln!(
                    out,
                    "{:<10} T = {:.12} (A = {}{k}, estimated error {:.1e})",
                    name.unwrap_or_default(),
                    r.value,
                    r.amplitude,
                    r.estimated_error
                );
            }
            out
        }
        Format::Json => format!("{:#}\n", json!(results)),
        Format::Csv => {
            let mut out = String::from("method,amplitude,k,period,estimated_error\n");
            for r in &results {
                let name = serde_json::to_value(r.method).ok().and_then(|v| v.as_str().map(str::to_owned));
                let _ = writeln!(
                    out,
                    "{},{:.16e},{},{:.16e},{:.16e}",
                    name.unwrap_or_default(),
                    r.amplitude,
                    r.k.map_or(String::new(), |k| format!("{k:.16e}")),
                    r.value,
                    r.estimated_error
                );
            }
            out
        }
    };
    emit(args.out.as_deref(), &body)
}

/// `traj.csv` with k = 0.02 becomes `traj_k0.02.csv`.
fn suffixed(path: &Path, k: f64) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_k{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}_k{k}"),
    };
    path.with_file_name(name)
}

pub fn trajectory(args: &TrajectoryArgs) -> Result<(), CliError> {
    check_positive("amplitude", args.amplitude)?;
    check_positive("t-max", args.t_max)?;
    check_positive("rtol", args.rtol)?;
    check_positive("atol", args.atol)?;
    for &k in &args.k {
        check_positive("k", k)?;
    }
    if args.k.len() > 1 && args.out.is_none() {
        return Err(invalid("--out is required when several k values are given"));
    }
    let tol = OdeTolerances { rtol: args.rtol, atol: args.atol };
    for &k in &args.k {
        log::info!("integrating A = {}, k = {k} up to t = {}", args.amplitude, args.t_max);
        let traj = simulate_regularized(args.amplitude, k, args.t_max, tol)?;
        log::info!("{} steps, energy drift {:.1e}", traj.points.len(), traj.max_energy_drift);
        let mut body = String::from("t,x,y\n");
        for p in &traj.points {
            let _ = writeln!(body, "{:.16e},{:.16e},{:.16e}", p.t, p.x, p.y);
        }
        let path = match &args.out {
            Some(p) if args.k.len() > 1 => Some(suffixed(p, k)),
            other => other.clone(),
        };
        emit(path.as_deref(), &body)?;
    }
    Ok(())
}

pub fn weaksol(args: &WeaksolArgs) -> Result<(), CliError> {
    check_positive("amplitude", args.amplitude)?;
    check_positive("step", args.step)?;
    if !(args.from.is_finite() && args.to.is_finite()) || args.from > args.to {
        return Err(invalid(format!("need finite from <= to, got {} and {}", args.from, args.to)));
    }
    let samples = weak_solution_samples(args.amplitude, args.from, args.to, args.step)?;
    let mut body = String::from("t,x\n");
    for (t, x) in samples {
        let _ = writeln!(body, "{t:.16e},{x:.16e}");
    }
    emit(args.out.as_deref(), &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_file_names() {
        assert_eq!(suffixed(Path::new("out/traj.csv"), 0.02), PathBuf::from("out/traj_k0.02.csv"));
        assert_eq!(suffixed(Path::new("traj"), 1.0), PathBuf::from("traj_k1"));
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::from(HbmError::InvalidInput("x".into())).exit_code(), 2);
        let stats = Default::default();
        assert_eq!(CliError::from(HbmError::BudgetExhausted { reason: "r".into(), stats }).exit_code(), 3);
        assert_eq!(CliError::from(HbmError::DivisionByZero).exit_code(), 1);
    }
}
