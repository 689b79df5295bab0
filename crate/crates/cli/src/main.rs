//! `ballinterp`: cubature checks, kernel evaluation and Lebesgue-constant experiments
//! for hyperinterpolation on Gegenbauer-weighted balls.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ballinterp", version, about = "Hyperinterpolation on the unit ball with Gegenbauer weights")]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare a cubature rule against exact monomial integrals.
    CubatureCheck(CubatureCheckArgs),
    /// Evaluate the ball reproducing kernel K_n(w_{m/2}; x, y).
    Kernel(KernelArgs),
    /// Estimate Lebesgue constants and write one CSV row per degree.
    Lebesgue(ExperimentArgs),
    /// Estimate Lebesgue constants and fit their log-log growth rate.
    Growth(GrowthArgs),
    /// Report the sup error of hyperinterpolating a built-in function.
    Approx(ApproxArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainKind {
    Ball,
    Sphere,
}

#[derive(Debug, Args)]
struct CubatureCheckArgs {
    #[arg(long, value_enum, default_value_t = DomainKind::Ball)]
    domain: DomainKind,
    /// Ball dimension.
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Weight parameter: w = (1 - |x|^2)^((m-1)/2).
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Sphere dimension (sphere domain only).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Exactness degree of the built-in rule.
    #[arg(long, default_value_t = 10)]
    degree: usize,
    /// Check this rule file instead of a built-in rule.
    #[arg(long)]
    rule_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// First point, comma-separated (random if omitted).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x: Option<Point>,
    /// Second point, comma-separated (random if omitted).
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Option<Point>,
    /// Also evaluate the Gram–Schmidt basis kernel and print the relative gap.
    #[arg(long)]
    check_onb: bool,
    /// Seed for random points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Single operator degree.
    #[arg(long, conflicts_with = "n_list")]
    n: Option<usize>,
    /// Strictly increasing comma-separated operator degrees.
    #[arg(long, value_parser = parse_n_list)]
    n_list: Option<NList>,
    /// Radial grid levels per unit of n (floor 64 levels); default depends on d.
    #[arg(long)]
    grid_scale: Option<usize>,
    /// CSV output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use this rule file for every degree instead of built-in degree-2n rules.
    #[arg(long)]
    rule_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GrowthArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Fit a synthetic power law with the expected exponent instead of measuring.
    #[arg(long)]
    self_test: bool,
    /// Exit with status 1 if |slope - expected| exceeds this.
    #[arg(long)]
    slope_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    /// exp(x_1)
    Exp1,
    /// 1 / (1 + 25 |x|^2)
    Runge,
    /// |x|
    Absnorm,
    /// 1
    Const,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    #[arg(long, value_enum)]
    function: Function,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, conflicts_with = "n_list")]
    n: Option<usize>,
    #[arg(long, value_parser = parse_n_list)]
    n_list: Option<NList>,
    /// Radial levels G of the error grid (2G+1 points per full angle).
    #[arg(long, default_value_t = 50)]
    grid_levels: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct NList(Vec<usize>);

fn parse_n_list(s: &str) -> Result<NList, String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("'{v}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty degree list".into());
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err("degrees must be strictly increasing".into());
    }
    Ok(NList(values))
}

#[derive(Debug, Clone, PartialEq)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("'{v}': {e}"))
                .and_then(|x| if x.is_finite() { Ok(x) } else { Err(format!("'{v}' is not finite")) })
        })
        .collect::<Result<_, _>>()
        .map(Point)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(commands::EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(commands::EXIT_NUMERICAL);
        }
    }
    let outcome = match cli.command {
        Command::CubatureCheck(args) => commands::cubature_check(args),
        Command::Kernel(args) => commands::kernel(args),
        Command::Lebesgue(args) => commands::lebesgue(args),
        Command::Growth(args) => commands::growth(args),
        Command::Approx(args) => commands::approx(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
