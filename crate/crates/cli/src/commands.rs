use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use ballinterp::cubature::{ball_rule, exactness_report, sphere_rule, BallWeight, CubatureRule, Domain};
use ballinterp::hyperinterp::{
    default_grid_scale, growth_fit, lebesgue_constant, sup_error, Hyperinterpolant, KernelOperator, LebesgueReport,
    PolarGrid, CSV_HEADER,
};
use ballinterp::kernels::BallKernelSpec;
use ballinterp::oracle::{build_onb, MAX_ONB_DEGREE, MAX_ONB_VARIABLES};
use ballinterp::Error;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ApproxArgs, CubatureCheckArgs, DomainKind, ExperimentArgs, Function, GrowthArgs, KernelArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NUMERICAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Largest relative gap accepted by `kernel --check-onb`.
const ONB_GAP_TOL: f64 = 1e-8;
/// Largest sup error accepted when approximating a constant.
const CONSTANT_TOL: f64 = 1e-12;

pub struct CommandError {
    pub code: u8,
    pub message: String,
}

impl CommandError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::DomainMismatch(_)
            | Error::DegreeDeficiency { .. }
            | Error::LengthMismatch { .. }
            | Error::OutsideBall { .. }
            | Error::Parse { .. } => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, CommandError>;

fn io_error(path: &Path, e: io::Error) -> CommandError {
    CommandError {
        code: EXIT_NUMERICAL,
        message: format!("{}: {e}", path.display()),
    }
}

fn read_rule(path: &Path) -> Result<CubatureRule, CommandError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    CubatureRule::read_text(BufReader::new(file)).map_err(|e| match e {
        Error::Io(e) => io_error(path, e),
        other => {
            let mut err = CommandError::from(other);
            err.message = format!("{}: {}", path.display(), err.message);
            err
        }
    })
}

fn weight(d: usize, m: usize) -> Result<BallWeight, CommandError> {
    Ok(BallWeight::new(d, m)?)
}

pub fn cubature_check(args: CubatureCheckArgs) -> CmdResult {
    let rule = match (&args.rule_file, args.domain) {
        (Some(path), _) => read_rule(path)?,
        (None, DomainKind::Ball) => ball_rule(weight(args.d, args.m)?, args.degree)?,
        (None, DomainKind::Sphere) => sphere_rule(args.dim, args.degree)?,
    };
    let report = exactness_report(&rule);
    println!("{report}");
    Ok(if report.passed() { EXIT_OK } else { EXIT_NUMERICAL })
}

fn random_ball_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return x;
        }
    }
}

fn format_point(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn kernel(args: KernelArgs) -> CmdResult {
    let w = weight(args.d, args.m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let x = args.x.map(|p| p.0).unwrap_or_else(|| random_ball_point(&mut rng, args.d));
    let y = args.y.map(|p| p.0).unwrap_or_else(|| random_ball_point(&mut rng, args.d));
    let spec = BallKernelSpec::new(w, args.n)?;
    let value = spec.kernel(&x, &y)?;
    eprintln!("K_{}({w}; x = ({}), y = ({}))", args.n, format_point(&x), format_point(&y));
    println!("{value}");
    if !args.check_onb {
        return Ok(EXIT_OK);
    }
    if args.n > MAX_ONB_DEGREE || args.d > MAX_ONB_VARIABLES {
        eprintln!(
            "note: basis check limited to degree ≤ {MAX_ONB_DEGREE} and d ≤ {MAX_ONB_VARIABLES}; skipped"
        );
        return Ok(EXIT_OK);
    }
    let basis = build_onb(Domain::WeightedBall(w), args.n)?;
    let reference = basis.onb_kernel_upto(args.n, &x, &y)?;
    let gap = (value - reference).abs() / value.abs().max(reference.abs()).max(f64::MIN_POSITIVE);
    println!("onb {reference}");
    println!("relative_gap {gap:.3e}");
    Ok(if gap <= ONB_GAP_TOL { EXIT_OK } else { EXIT_NUMERICAL })
}

fn degrees(n: Option<usize>, n_list: Option<super::NList>) -> Result<Vec<usize>, CommandError> {
    match (n, n_list) {
        (Some(n), None) => Ok(vec![n]),
        (None, Some(list)) => Ok(list.0),
        _ => Err(CommandError::usage("give exactly one of --n or --n-list")),
    }
}

fn run_experiment(args: &ExperimentArgs) -> Result<(BallWeight, Vec<LebesgueReport>), CommandError> {
    let w = weight(args.d, args.m)?;
    let ns = degrees(args.n, args.n_list.clone())?;
    let supplied = args.rule_file.as_deref().map(read_rule).transpose()?;
    let scale = args.grid_scale.unwrap_or_else(|| default_grid_scale(args.d));
    if scale == 0 {
        return Err(CommandError::usage("--grid-scale must be positive"));
    }
    let mut reports = Vec::with_capacity(ns.len());
    for n in ns {
        let start = Instant::now();
        let rule = match &supplied {
            Some(rule) => rule.clone(),
            None => ball_rule(w, 2 * n)?,
        };
        let op = Hyperinterpolant::build(w, n, rule)?;
        let grid = PolarGrid::for_rule(op.rule(), n, scale)?;
        let report = lebesgue_constant(&op, &grid)?;
        eprintln!(
            "n = {n:>3}: estimate {:.6} at |x| = {:.4} ({} nodes, {} grid points, {:.1?})",
            report.estimate,
            report.argmax_radius(),
            report.rule_nodes,
            report.grid_points + report.refinement_points,
            start.elapsed()
        );
        reports.push(report);
    }
    Ok((w, reports))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CommandError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_lines(path: Option<&Path>, lines: &[String]) -> Result<(), CommandError> {
    let mut out = open_output(path)?;
    let fail = |e: io::Error| match path {
        Some(p) => io_error(p, e),
        None => io_error(Path::new("<stdout>"), e),
    };
    for line in lines {
        out.write_all(line.as_bytes()).map_err(fail)?;
        out.write_all(b"\n").map_err(fail)?;
    }
    out.flush().map_err(fail)
}

pub fn lebesgue(args: ExperimentArgs) -> CmdResult {
    let (_, reports) = run_experiment(&args)?;
    let mut lines = vec![CSV_HEADER.to_string()];
    lines.extend(reports.iter().map(LebesgueReport::csv_row));
    write_lines(args.out.as_deref(), &lines)?;
    Ok(EXIT_OK)
}

fn expected_exponent(d: usize, m: usize) -> f64 {
    (d as f64 - 1.0) / 2.0 + m as f64 / 2.0
}

fn slope_line(slope: f64, expected: f64, residual: f64) -> String {
    format!("slope,{slope:.16e},expected,{expected:.16e},residual,{residual:.16e}")
}

pub fn growth(args: GrowthArgs) -> CmdResult {
    let exp = &args.experiment;
    let expected = expected_exponent(exp.d, exp.m);
    if args.self_test {
        weight(exp.d, exp.m)?;
        let ns = match degrees(exp.n, exp.n_list.clone()) {
            Ok(ns) => ns,
            Err(_) => vec![4, 6, 8, 12, 16, 24],
        };
        let points: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 3.0 * (n as f64).powf(expected))).collect();
        let fit = growth_fit(&points).map_err(|e| CommandError::usage(e.to_string()))?;
        let mut lines = vec!["n,synthetic_estimate".to_string()];
        lines.extend(points.iter().map(|(n, e)| format!("{n},{e:.16e}")));
        lines.push(slope_line(fit.slope, expected, fit.max_abs_residual));
        write_lines(exp.out.as_deref(), &lines)?;
        return Ok(if (fit.slope - expected).abs() <= 1e-12 { EXIT_OK } else { EXIT_NUMERICAL });
    }
    let ns = degrees(exp.n, exp.n_list.clone())?;
    if ns.len() < 4 || ns[0] == 0 {
        return Err(CommandError::usage("growth needs at least 4 positive degrees in --n-list"));
    }
    let (_, reports) = run_experiment(exp)?;
    let points: Vec<(usize, f64)> = reports.iter().map(|r| (r.n, r.estimate)).collect();
    let fit = growth_fit(&points)?;
    let mut lines = vec![CSV_HEADER.to_string()];
    lines.extend(reports.iter().map(LebesgueReport::csv_row));
    lines.push(slope_line(fit.slope, expected, fit.max_abs_residual));
    write_lines(exp.out.as_deref(), &lines)?;
    eprintln!("fitted slope {:.4}, expected {expected}", fit.slope);
    match args.slope_tolerance {
        Some(tol) if !((fit.slope - expected).abs() <= tol) => Ok(EXIT_NUMERICAL),
        _ => Ok(EXIT_OK),
    }
}

fn evaluate(function: Function, x: &[f64]) -> f64 {
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    match function {
        Function::Exp1 => x[0].exp(),
        Function::Runge => 1.0 / (1.0 + 25.0 * norm_sq),
        Function::Absnorm => norm_sq.sqrt(),
        Function::Const => 1.0,
    }
}

pub fn approx(args: ApproxArgs) -> CmdResult {
    let w = weight(args.d, args.m)?;
    let ns = degrees(args.n, args.n_list.clone())?;
    if args.grid_levels == 0 {
        return Err(CommandError::usage("--grid-levels must be positive"));
    }
    let grid = PolarGrid::new(Domain::WeightedBall(w), args.grid_levels, ballinterp::cubature::Symmetry::NONE)?;
    let points = grid.points();
    let f = |x: &[f64]| evaluate(args.function, x);
    println!("function,d,m,n,rule_degree,grid_points,sup_error");
    let mut status = EXIT_OK;
    for n in ns {
        let op = Hyperinterpolant::build(w, n, ball_rule(w, 2 * n)?)?;
        let samples = op.sample(f)?;
        let error = sup_error(&op, &samples, f, &points)?;
        let name = format!("{:?}", args.function).to_lowercase();
        println!("{name},{},{},{n},{},{},{error:.16e}", args.d, args.m, 2 * n, grid.len());
        if args.function == Function::Const && !(error <= CONSTANT_TOL) {
            status = EXIT_NUMERICAL;
        }
    }
    Ok(status)
}
