//! Command-line front end: transforms, inversion, convolution and the
//! verification suites. Exit codes: 0 pass, 1 verification failure, 2 usage
//! error, 3 numerical failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use halfhartley::catalog::{lookup, names, CatalogEntry};
use halfhartley::convolution::{convolve, factorization_residual, Route};
use halfhartley::csvio::{read_sampled_function, write_samples};
use halfhartley::function::{geometric_grid, linear_grid, DecayClass, SampledFunction};
use halfhartley::hartley::{hartley_inverse, hartley_transform, Method};
use halfhartley::quadrature::QuadratureConfig;
use halfhartley::report::VerificationReport;
use halfhartley::verify::{run_suite, Suite, VerifyConfig};

/// Tolerance for pairwise agreement of the convolution routes.
const ROUTE_TOLERANCE: f64 = 2e-3;

#[derive(Parser)]
#[command(name = "halfhartley", version, about = "Half-Hartley transform toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward transform of a catalog function or sampled CSV.
    Transform(TransformArgs),
    /// Recover a function from samples of its transform.
    Invert(InvertArgs),
    /// Convolution of two catalog functions.
    Convolve(ConvolveArgs),
    /// Run a verification suite and write its JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    xmin: f64,
    #[arg(long)]
    xmax: f64,
    #[arg(long)]
    n: usize,
    /// Geometric instead of uniform spacing.
    #[arg(long)]
    log_grid: bool,
}

#[derive(Args)]
struct TolArg {
    /// Absolute and relative quadrature tolerance.
    #[arg(long, env = "HALFHARTLEY_TOL", default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["function", "input"])))]
struct TransformArgs {
    /// Catalog name.
    #[arg(long)]
    function: Option<String>,
    /// CSV with header `x,value`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Decay of CSV input beyond its last sample: exponential, gaussian,
    /// compact:END or polynomial:P.
    #[arg(long, default_value = "polynomial:1", requires = "input")]
    decay: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
    method: MethodArg,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    tol: TolArg,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    /// CSV of transform samples with header `x,value`.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    tol: TolArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvolveArgs {
    #[arg(long)]
    f: String,
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 0.5)]
    xmin: f64,
    #[arg(long, default_value_t = 2.0)]
    xmax: f64,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long)]
    log_grid: bool,
    #[arg(long, value_enum, default_value_t = RouteArg::Parseval)]
    route: RouteArg,
    /// Compare all routes and the factorization identity.
    #[arg(long)]
    check_routes: bool,
    /// JSON report path for --check-routes; standard error when absent.
    #[arg(long, requires = "check_routes")]
    report: Option<PathBuf>,
    /// Exit 3 when a checked residual exceeds its tolerance.
    #[arg(long, requires = "check_routes")]
    strict: bool,
    #[command(flatten)]
    tol: TolArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// Multiplies every tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    /// JSON report path; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record wall time in the report. Off by default so that reports are
    /// byte-identical across runs.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Regularized,
    Mellin,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Direct => Method::Direct,
            MethodArg::Regularized => Method::Regularized,
            MethodArg::Mellin => Method::Mellin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Parseval,
    MellinLine,
    DoubleMb,
}

impl From<RouteArg> for Route {
    fn from(r: RouteArg) -> Self {
        match r {
            RouteArg::Parseval => Route::Parseval,
            RouteArg::MellinLine => Route::MellinLine,
            RouteArg::DoubleMb => Route::DoubleMb,
        }
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
    /// Checks ran but did not all pass.
    Verification,
}

impl From<halfhartley::Error> for Failure {
    fn from(e: halfhartley::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Transform(a) => cmd_transform(a),
        Command::Invert(a) => cmd_invert(a),
        Command::Convolve(a) => cmd_convolve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn quadrature(tol: &TolArg) -> Result<QuadratureConfig, Failure> {
    let cfg = QuadratureConfig::default().with_tol(tol.tol);
    cfg.validate()?;
    Ok(cfg)
}

fn make_grid(xmin: f64, xmax: f64, n: usize, log: bool) -> Result<Vec<f64>, Failure> {
    let ok = xmin > 0.0 && xmax.is_finite() && xmax >= xmin && n >= 1 && (n == 1 || xmax > xmin);
    if !ok {
        return Err(Failure::Usage(format!(
            "grid needs 0 < xmin < xmax and n >= 1, got xmin = {xmin}, xmax = {xmax}, n = {n}"
        )));
    }
    Ok(if log {
        geometric_grid(xmin, xmax, n)
    } else {
        linear_grid(xmin, xmax, n)
    })
}

fn parse_decay(s: &str) -> Result<DecayClass, Failure> {
    let bad = || Failure::Usage(format!("bad decay '{s}'"));
    let param = |v: &str| f64::from_str(v).ok().filter(|p| p.is_finite() && *p > 0.0).ok_or_else(bad);
    match s.split_once(':') {
        None if s == "exponential" => Ok(DecayClass::Exponential),
        None if s == "gaussian" => Ok(DecayClass::Gaussian),
        Some(("compact", v)) => Ok(DecayClass::Compact { end: param(v)? }),
        Some(("polynomial", v)) => Ok(DecayClass::Polynomial { exponent: param(v)? }),
        _ => Err(bad()),
    }
}

fn catalog_entry(name: &str) -> Result<&'static CatalogEntry, Failure> {
    lookup(name).ok_or_else(|| {
        Failure::Usage(format!("unknown function '{name}'; known: {}", names().join(", ")))
    })
}

fn read_csv(path: &Path, decay: DecayClass) -> Result<SampledFunction, Failure> {
    let file = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    read_sampled_function(file, decay).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Writes the whole output in one go, to a file or standard output.
fn emit(path: Option<&Path>, bytes: &[u8]) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().lock().write_all(bytes)?),
    }
}

fn emit_samples(path: Option<&Path>, x: &[f64], values: &[f64]) -> CmdResult {
    let mut buf = Vec::new();
    write_samples(&mut buf, x, values)?;
    emit(path, &buf)
}

fn cmd_transform(a: TransformArgs) -> CmdResult {
    let cfg = quadrature(&a.tol)?;
    let grid = make_grid(a.grid.xmin, a.grid.xmax, a.grid.n, a.grid.log_grid)?;
    let method = Method::from(a.method);
    let result = match (&a.function, &a.input) {
        (Some(name), _) => hartley_transform(&catalog_entry(name)?.func, &grid, method, &cfg)?,
        (None, Some(path)) => {
            let f = read_csv(path, parse_decay(&a.decay)?)?;
            hartley_transform(&f, &grid, method, &cfg)?
        }
        (None, None) => unreachable!("clap enforces a source"),
    };
    emit_samples(a.output.as_deref(), &result.x_grid, &result.values)
}

fn cmd_invert(a: InvertArgs) -> CmdResult {
    let cfg = quadrature(&a.tol)?;
    let grid = make_grid(a.grid.xmin, a.grid.xmax, a.grid.n, a.grid.log_grid)?;
    // Transforms of L2 functions decay like 1/x.
    let h = read_csv(&a.input, DecayClass::Polynomial { exponent: 1.0 })?;
    let values = grid
        .iter()
        .map(|&x| hartley_inverse(&h, x, &cfg).map(|e| e.value))
        .collect::<Result<Vec<_>, _>>()?;
    emit_samples(a.output.as_deref(), &grid, &values)
}

fn cmd_convolve(a: ConvolveArgs) -> CmdResult {
    let (f, g) = (catalog_entry(&a.f)?, catalog_entry(&a.g)?);
    let cfg = quadrature(&a.tol)?;
    let grid = make_grid(a.xmin, a.xmax, a.n, a.log_grid)?;
    let route = Route::from(a.route);
    let primary = convolve(f, g, &grid, route, &cfg)?;
    if a.check_routes {
        let report = route_report(f, g, &primary.values, route, &grid, &cfg)?;
        let json = report.to_json() + "\n";
        match &a.report {
            Some(p) => emit(Some(p), json.as_bytes())?,
            None => eprint!("{json}"),
        }
        if !report.pass {
            for c in report.failures() {
                eprintln!("residual over tolerance: {} = {:e}", c.name, c.measured);
            }
            if a.strict {
                return Err(Failure::Numerical("convolution residuals exceed tolerance".into()));
            }
        }
    }
    emit_samples(a.output.as_deref(), &primary.x_grid, &primary.values)
}

fn route_report(
    f: &CatalogEntry,
    g: &CatalogEntry,
    primary: &[f64],
    route: Route,
    grid: &[f64],
    cfg: &QuadratureConfig,
) -> Result<VerificationReport, Failure> {
    let echo = serde_json::json!({
        "f": f.name(),
        "g": g.name(),
        "route": route,
        "x_grid": grid,
        "route_tolerance": ROUTE_TOLERANCE,
        "quadrature": cfg,
    });
    let mut report = VerificationReport::new("convolve", echo);
    for other in [Route::Parseval, Route::MellinLine, Route::DoubleMb] {
        if other == route {
            continue;
        }
        let values = convolve(f, g, grid, other, cfg)?.values;
        for ((x, p), v) in grid.iter().zip(primary).zip(values) {
            let name = format!("{} vs {} at x = {x}", route_name(route), route_name(other));
            report.at_most(name, (p - v).abs(), ROUTE_TOLERANCE, 0.0);
        }
    }
    report.absorb(factorization_residual(f, g, grid, cfg)?);
    Ok(report)
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Parseval => "parseval",
        Route::MellinLine => "mellin_line",
        Route::DoubleMb => "double_mb",
    }
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let suite = Suite::from_str(&a.suite)?;
    let mut cfg = VerifyConfig::new(suite);
    cfg.tol_scale = a.tol_scale;
    let start = Instant::now();
    let mut report = run_suite(&cfg)?;
    if a.timing {
        report.wall_time_ms = start.elapsed().as_millis() as u64;
    }
    let json = report.to_json() + "\n";
    emit(a.report.as_deref(), json.as_bytes())?;
    for c in report.failures() {
        eprintln!("FAIL {}: measured {:e}, bound {:e}", c.name, c.measured, c.bound);
    }
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
