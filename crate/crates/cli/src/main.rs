//! `hbm`: harmonic balance solves, error tables, reference periods and CSV data.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "hbm", version, about = "Exact harmonic balance for x^(m+1) x'' + x^m = 0")]
struct Cli {
    /// Only print errors on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,

    /// More diagnostics on stderr (repeat for trace).
    #[arg(short, long, global = true, action = clap::ArgAction::Count, conflicts_with = "quiet")]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the balance system for one (m, N).
    Solve(SolveArgs),
    /// Relative error table e_N(m) in percent.
    Table(TableArgs),
    /// Exact and regularised reference periods.
    Period(PeriodArgs),
    /// Write sampled curves as CSV.
    #[command(subcommand)]
    Emit(EmitCommand),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Grevlex basis, then FGLM to lex.
    Via,
    /// As `via`, computing the grevlex basis in ω².
    Packed,
    /// Buchberger directly in lex.
    Direct,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Maximum number of S-pairs processed.
    #[arg(long, env = "HBM_BUDGET_SPAIRS", default_value_t = 1_000_000)]
    pub budget_spairs: u64,

    /// Maximum total coefficient bit-length of the working basis.
    #[arg(long, default_value_t = 100_000_000)]
    pub budget_bits: u64,

    /// Wall-clock limit in seconds for each basis computation.
    #[arg(long, env = "HBM_TIME_LIMIT")]
    pub time_limit: Option<f64>,

    #[arg(long, value_enum, default_value_t = Strategy::Via)]
    pub strategy: Strategy,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Exponent m of the oscillator.
    #[arg(long)]
    pub m: u32,

    /// Number of harmonics N.
    #[arg(long)]
    pub order: usize,

    /// Amplitude A, exact: `1`, `0.5`, `3/2`.
    #[arg(long, default_value = "1")]
    pub amplitude: String,

    /// Significant digits of ω and C_N.
    #[arg(long, default_value_t = 30)]
    pub digits: usize,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(flatten)]
    pub budget: BudgetArgs,

    /// Output file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[arg(long, default_value_t = 0)]
    pub min_m: u32,

    #[arg(long)]
    pub max_m: u32,

    /// Largest N; 0 gives an empty table.
    #[arg(long)]
    pub max_order: usize,

    /// Significant digits of C_N in CSV and JSON.
    #[arg(long, default_value_t = 12)]
    pub digits: usize,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(flatten)]
    pub budget: BudgetArgs,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Quadrature,
    Ode,
}

#[derive(Args, Debug)]
pub struct PeriodArgs {
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    /// Regularisation parameter; required by `quadrature` and `ode`.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,

    /// Repeat for several methods.
    #[arg(long, value_enum, default_values_t = vec![Method::Exact])]
    pub method: Vec<Method>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum EmitCommand {
    /// Phase-plane trajectory of the regularised oscillator; columns t,x,y.
    Trajectory(TrajectoryArgs),
    /// Samples of the weak periodic solution; columns t,x.
    Weaksol(WeaksolArgs),
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    /// Repeat or comma-separate for a sweep; each k gets its own file.
    #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub k: Vec<f64>,

    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,

    #[arg(long, default_value_t = 1e-12)]
    pub rtol: f64,

    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,

    /// Output file; with several k values `_k<k>` is added before the extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WeaksolArgs {
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,

    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,

    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,

    #[arg(long)]
    pub step: f64,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_logging(quiet: bool, verbose: u8) {
    let level = match (quiet, verbose) {
        (true, _) => "error",
        (false, 0) => "info",
        (false, 1) => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Table(args) => commands::table(&args),
        Command::Period(args) => commands::period(&args),
        Command::Emit(EmitCommand::Trajectory(args)) => commands::trajectory(&args),
        Command::Emit(EmitCommand::Weaksol(args)) => commands::weaksol(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.quiet, cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
