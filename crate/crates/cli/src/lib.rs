//! `fchain`: simulate, estimate, test and study Fréchet copula Markov chains from the
//! command line.
//!
//! Paths travel as `t,x` CSV, reports as JSON, plots as SVG. Exit status is 0 on
//! success, 1 on domain or data errors and 2 on usage errors.

pub mod svg;

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use frechet_chain::chain::{
    make_params, n_step_matrix, simulate_bernoulli_chain, simulate_uniform_chain, transition_counts,
    transition_matrix, BinaryPath, Origin, RealPath, Regime,
};
use frechet_chain::estimation::{
    boundary_estimate, indicator_estimate, indicator_point, mean_estimate, mle_ci, mle_half,
    robust_estimate, Estimate, Method, Parameter,
};
use frechet_chain::inference::lrt;
use frechet_chain::io::{read_path, write_binary_path, write_real_path, PathData};
use frechet_chain::mixing::{phi_closed, psi_closed};
use frechet_chain::montecarlo::{
    lrt_grid, mc_estimator_comparison, mc_mle_study, symmetry_report, Estimator, MCReport, StudyConfig,
};
use frechet_chain::Error;

use crate::svg::{emit_svg, Chart, Series};

const P_LESS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];
const P_GREATER: [f64; 4] = [0.6, 0.7, 0.8, 0.9];
const A_ALL: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Parser)]
#[command(name = "fchain", version, about = "Fréchet copula Markov chains: simulation, estimation and testing")]
pub struct Cli {
    /// Progress and timing on standard error; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a path and write it as `t,x` CSV.
    Simulate(SimulateArgs),
    /// Print the one-step and n-step transition matrices.
    Transition(TransitionArgs),
    /// Closed-form ψ and φ mixing coefficients for lags 1..=N.
    Mixing(MixingArgs),
    /// Estimate from a path CSV.
    Estimate(EstimateArgs),
    /// Likelihood-ratio test of independence on a path CSV.
    Lrt(LrtArgs),
    /// Coverage study of the MLE intervals.
    Mc(StudyArgs),
    /// Coverage study comparing the MLE, sample-mean and robust estimators of p.
    Compare(StudyArgs),
    /// One simulated chain and one LRT per (a, p) cell.
    LrtGrid(LrtGridArgs),
    /// Tables of coverage, interval length and LRT results over the standard grids.
    Table(TableArgs),
    /// SVG line charts.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Marginal {
    Bernoulli,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Mle,
    Mean,
    Robust,
    MleHalf,
    Indicator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Mle,
    Mean,
    Robust,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Mle => Estimator::Mle,
            EstimatorArg::Mean => Estimator::Mean,
            EstimatorArg::Robust => Estimator::Robust,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    MleLess,
    MleGreater,
    LrtLess,
    LrtGreater,
    CompareLess,
    CompareGreater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Symmetry,
    Mixing,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub a: f64,
    /// Required for Bernoulli marginals, ignored for uniform ones.
    #[arg(long)]
    pub p: Option<f64>,
    /// Number of steps; the path has n + 1 states.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Marginal::Bernoulli)]
    pub marginal: Marginal,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TransitionArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 30)]
    pub max_lag: u32,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Mle)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Seed of the auxiliary noise of the robust estimator.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LrtArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 400)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Estimators to run; `mc` defaults to mle, `compare` to all three.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub estimators: Vec<EstimatorArg>,
    /// Also write one CSV row per replication and interval.
    #[arg(long)]
    pub reps_csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LrtGridArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub a_values: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_values: Vec<f64>,
    #[arg(long, default_value_t = 9999)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub which: TableKind,
    /// Replications per cell of the coverage tables.
    #[arg(long, default_value_t = 400)]
    pub reps: usize,
    /// Overrides the table's sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub kind: PlotKind,
    #[arg(long, default_value_t = 0.5)]
    pub a: f64,
    /// Required for mixing plots.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 30)]
    pub max_lag: u32,
    #[arg(long, default_value_t = 9999)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

/// Failure of one invocation, mapped onto an exit status by [`run`].
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("Usage: fchain <COMMAND> [OPTIONS]; see `fchain --help`");
            2
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {}: {e}", e.name());
            1
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: IoError: {msg}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let start = Instant::now();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Transition(args) => transition(args),
        Command::Mixing(args) => mixing(args),
        Command::Estimate(args) => estimate(args),
        Command::Lrt(args) => lrt_cmd(args),
        Command::Mc(args) => study(args, false, cli.verbose),
        Command::Compare(args) => study(args, true, cli.verbose),
        Command::LrtGrid(args) => lrt_grid_cmd(args),
        Command::Table(args) => table(args, cli.verbose),
        Command::Plot(args) => plot(args),
    };
    if cli.verbose > 0 {
        eprintln!("finished in {:.2}s", start.elapsed().as_secs_f64());
    }
    result
}

/// Resolves `--format` against the formats a subcommand supports; the first is the default.
fn format_of(output: &Output, allowed: &[Format]) -> CliResult<Format> {
    match output.format {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => {
            let names: Vec<_> = allowed.iter().map(|f| f.name()).collect();
            Err(CliError::Usage(format!("--format {} is not supported here (expected {})", f.name(), names.join("|"))))
        }
    }
}

fn write_bytes(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => File::create(path)?.write_all(bytes)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn write_json(out: Option<&Path>, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(out, text.as_bytes())
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

/// Shortest round-trip form; switches to exponent notation for extreme magnitudes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn simulate(args: &SimulateArgs) -> CliResult<()> {
    format_of(&args.output, &[Format::Csv])?;
    let mut buf = Vec::new();
    match args.marginal {
        Marginal::Bernoulli => {
            let p = args.p.ok_or_else(|| CliError::Usage("--p is required for Bernoulli marginals".into()))?;
            let path = simulate_bernoulli_chain(&make_params(args.a, p)?, args.n, args.seed)?;
            write_binary_path(&mut buf, &path)?;
        }
        Marginal::Uniform => {
            let path = simulate_uniform_chain(args.a, args.n, args.seed)?;
            write_real_path(&mut buf, &path)?;
        }
    }
    write_bytes(args.output.out.as_deref(), &buf)
}

fn transition(args: &TransitionArgs) -> CliResult<()> {
    format_of(&args.output, &[Format::Json])?;
    let params = make_params(args.a, args.p)?;
    let value = json!({
        "a": args.a,
        "p": args.p,
        "regime": params.regime(),
        "n": args.n,
        "matrix": transition_matrix(&params).entries(),
        "n_step": n_step_matrix(&params, args.n).entries(),
    });
    write_json(args.output.out.as_deref(), &value)
}

fn mixing_series(a: f64, p: f64, max_lag: u32) -> CliResult<(Vec<f64>, Vec<f64>)> {
    if max_lag == 0 {
        return Err(CliError::Usage("--max-lag must be at least 1".into()));
    }
    let params = make_params(a, p)?;
    let psi = (1..=max_lag).map(|n| psi_closed(&params, n)).collect();
    let phi = (1..=max_lag).map(|n| phi_closed(&params, n)).collect();
    Ok((psi, phi))
}

fn mixing_chart(a: f64, p: f64, psi: &[f64], phi: &[f64]) -> Chart {
    let pts = |v: &[f64]| v.iter().enumerate().map(|(i, &y)| ((i + 1) as f64, y)).collect();
    Chart {
        title: format!("Mixing coefficients, a = {a}, p = {p}"),
        x_label: "lag n".into(),
        y_label: "coefficient".into(),
        series: vec![Series { name: "psi".into(), points: pts(psi) }, Series { name: "phi".into(), points: pts(phi) }],
    }
}

fn mixing(args: &MixingArgs) -> CliResult<()> {
    let format = format_of(&args.output, &[Format::Csv, Format::Json, Format::Svg])?;
    let (psi, phi) = mixing_series(args.a, args.p, args.max_lag)?;
    let out = args.output.out.as_deref();
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = psi
                .iter()
                .zip(&phi)
                .enumerate()
                .map(|(i, (s, f))| vec![(i + 1).to_string(), num(*s), num(*f)])
                .collect();
            write_bytes(out, csv_text(&["n", "psi", "phi"], &rows).as_bytes())
        }
        Format::Json => {
            let lags: Vec<u32> = (1..=args.max_lag).collect();
            write_json(out, &json!({ "a": args.a, "p": args.p, "lag": lags, "psi": psi, "phi": phi }))
        }
        Format::Svg => write_bytes(out, emit_svg(&mixing_chart(args.a, args.p, &psi, &phi))?.as_bytes()),
    }
}

fn load_path(input: &Path) -> CliResult<PathData> {
    let file = File::open(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    Ok(read_path(BufReader::new(file))?)
}

fn binary(data: PathData, what: &str) -> CliResult<BinaryPath> {
    match data {
        PathData::Binary(path) => Ok(path),
        PathData::Real(_) => Err(Error::Domain(format!("{what} needs a binary path; the input has non-binary values")).into()),
    }
}

fn regime_of(p: f64) -> Value {
    if p > 0.0 && p < 1.0 {
        json!(Regime::of(p))
    } else {
        Value::Null
    }
}

fn estimate_json(e: &Estimate, n: usize, regime: Value) -> Value {
    json!({
        "method": e.method,
        "point": e.point,
        "stderr": e.stderr,
        "ci": [e.ci_low, e.ci_high],
        "alpha": e.alpha,
        "n": n,
        "regime": regime,
        "boundary": false,
    })
}

fn boundary_json(method: Method, point: f64, alpha: f64, n: usize, regime: Value) -> Value {
    json!({
        "method": method,
        "point": point,
        "stderr": null,
        "ci": null,
        "alpha": alpha,
        "n": n,
        "regime": regime,
        "boundary": true,
    })
}

fn with_parameter(mut v: Value, which: Parameter) -> Value {
    v["parameter"] = json!(which);
    v
}

fn estimate(args: &EstimateArgs) -> CliResult<()> {
    format_of(&args.output, &[Format::Json])?;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {} must lie in (0, 1)", args.alpha)).into());
    }
    let data = load_path(&args.input)?;
    let n = data.n();
    let alpha = args.alpha;
    let value = match args.method {
        MethodArg::Indicator => {
            let path = match data {
                PathData::Real(p) => p,
                PathData::Binary(p) => {
                    RealPath::new(p.states().iter().map(|&x| x as f64).collect(), Origin::External)?
                }
            };
            match indicator_estimate(&path, alpha) {
                Ok(e) => estimate_json(&e, n, Value::Null),
                Err(Error::DegenerateData(_)) => boundary_json(Method::Indicator, indicator_point(&path), alpha, n, Value::Null),
                Err(e) => return Err(e.into()),
            }
        }
        MethodArg::Mle => {
            let path = binary(data, "mle")?;
            let counts = transition_counts(&path);
            match mle_ci(&counts, alpha) {
                Ok((ea, ep)) => {
                    let regime = regime_of(ep.point);
                    json!([
                        with_parameter(estimate_json(&ea, n, regime.clone()), Parameter::A),
                        with_parameter(estimate_json(&ep, n, regime), Parameter::P),
                    ])
                }
                Err(Error::DegenerateData(_)) => {
                    let (a, p) = boundary_estimate(&counts);
                    let regime = regime_of(p);
                    json!([
                        with_parameter(boundary_json(Method::Mle, a, alpha, n, regime.clone()), Parameter::A),
                        with_parameter(boundary_json(Method::Mle, p, alpha, n, regime), Parameter::P),
                    ])
                }
                Err(e) => return Err(e.into()),
            }
        }
        MethodArg::Mean => {
            let path = binary(data, "mean")?;
            match mean_estimate(&path, alpha) {
                Ok(e) => estimate_json(&e, n, regime_of(e.point)),
                Err(Error::DegenerateData(_)) => boundary_json(Method::Mean, path.mean(), alpha, n, regime_of(path.mean())),
                Err(e) => return Err(e.into()),
            }
        }
        MethodArg::Robust => {
            let path = binary(data, "robust")?;
            let e = robust_estimate(&path, alpha, args.seed)?;
            estimate_json(&e, n, regime_of(e.center))
        }
        MethodArg::MleHalf => {
            let path = binary(data, "mle-half")?;
            let counts = transition_counts(&path);
            let regime = json!(Regime::Half);
            match mle_half(&counts, alpha) {
                Ok(e) => estimate_json(&e, n, regime),
                Err(Error::DegenerateData(_)) => boundary_json(Method::MleHalf, boundary_estimate(&counts).0, alpha, n, regime),
                Err(e) => return Err(e.into()),
            }
        }
    };
    write_json(args.output.out.as_deref(), &value)
}

fn lrt_cmd(args: &LrtArgs) -> CliResult<()> {
    format_of(&args.output, &[Format::Json])?;
    let path = binary(load_path(&args.input)?, "lrt")?;
    let r = lrt(&path, args.alpha)?;
    let value = json!({
        "statistic": r.statistic,
        "df": r.df,
        "p_value": r.p_value,
        "alpha": args.alpha,
        "decision": r.decision,
        "clamped": r.clamped,
        "regime": r.regime,
    });
    write_json(args.output.out.as_deref(), &value)
}

fn report_json(report: &MCReport) -> CliResult<Value> {
    let mut value = serde_json::to_value(report)?;
    // wall-clock time would make seeded output differ between runs
    if let Some(obj) = value.as_object_mut() {
        obj.remove("runtime_secs");
    }
    Ok(value)
}

fn summary_csv(report: &MCReport) -> String {
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.estimator.as_str().to_string(),
                r.parameter.as_str().to_string(),
                num(r.coverage),
                num(r.ciml),
                r.degenerate_count.to_string(),
                r.reps_effective.to_string(),
            ]
        })
        .collect();
    csv_text(&["estimator", "parameter", "coverage", "ciml", "degenerate_count", "reps_effective"], &rows)
}

fn reps_csv(report: &MCReport) -> String {
    let rows: Vec<Vec<String>> = report
        .replications
        .iter()
        .map(|r| {
            vec![
                r.rep.to_string(),
                r.estimator.as_str().to_string(),
                r.parameter.as_str().to_string(),
                opt(r.point),
                opt(r.ci_lo),
                opt(r.ci_hi),
                r.covered.to_string(),
                opt(r.length),
                r.degenerate.to_string(),
            ]
        })
        .collect();
    csv_text(&["rep", "estimator", "parameter", "point", "ci_lo", "ci_hi", "covered", "length", "degenerate"], &rows)
}

fn study(args: &StudyArgs, compare: bool, verbose: u8) -> CliResult<()> {
    let format = format_of(&args.output, &[Format::Json, Format::Csv])?;
    let params = make_params(args.a, args.p)?;
    let mut cfg = StudyConfig::new(params, args.n, args.reps, args.alpha, args.seed)?;
    let estimators: Vec<Estimator> = if !args.estimators.is_empty() {
        args.estimators.iter().map(|&e| e.into()).collect()
    } else if compare {
        Estimator::ALL.to_vec()
    } else {
        vec![Estimator::Mle]
    };
    cfg = cfg.with_estimators(&estimators);
    let report = if compare { mc_estimator_comparison(&cfg)? } else { mc_mle_study(&cfg)? };
    if verbose > 0 {
        eprintln!("{} replications in {:.2}s", args.reps, report.runtime_secs);
    }
    if let Some(path) = &args.reps_csv {
        write_bytes(Some(path), reps_csv(&report).as_bytes())?;
    }
    let out = args.output.out.as_deref();
    match format {
        Format::Csv => write_bytes(out, summary_csv(&report).as_bytes()),
        _ => write_json(out, &report_json(&report)?),
    }
}

fn lrt_grid_cmd(args: &LrtGridArgs) -> CliResult<()> {
    let format = format_of(&args.output, &[Format::Json, Format::Csv])?;
    let cells = lrt_grid(&args.a_values, &args.p_values, args.n, args.seed, args.alpha)?;
    let out = args.output.out.as_deref();
    match format {
        Format::Csv => write_bytes(out, lrt_rows_csv(&cells).as_bytes()),
        _ => write_json(out, &serde_json::to_value(&cells)?),
    }
}

fn lrt_rows_csv(cells: &[frechet_chain::montecarlo::GridCell]) -> String {
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| match &c.result {
            Some(r) => vec![
                num(c.a),
                num(c.p),
                num(r.statistic),
                num(r.p_value),
                r.decision.as_str().to_string(),
                r.clamped.to_string(),
                String::new(),
            ],
            None => vec![
                num(c.a),
                num(c.p),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                c.error.clone().unwrap_or_default(),
            ],
        })
        .collect();
    csv_text(&["a", "p", "statistic", "p_value", "decision", "clamped", "error"], &rows)
}

fn coverage_row(report: &MCReport, e: Estimator, which: Parameter) -> CliResult<(f64, f64)> {
    report
        .row(e, which)
        .map(|r| (r.ciml, r.coverage))
        .ok_or_else(|| Error::Eval(format!("no summary for {} / {}", e.as_str(), which.as_str())).into())
}

fn table(args: &TableArgs, verbose: u8) -> CliResult<()> {
    format_of(&args.output, &[Format::Csv])?;
    let ns = |default: &[usize]| if args.n.is_empty() { default.to_vec() } else { args.n.clone() };
    // every cell draws from its own sub-seed, fixed by its position in the table
    let mut cell = 0u64;
    let mut next_seed = || {
        cell += 1;
        frechet_chain::rng::derive_seed(args.seed, cell, frechet_chain::rng::TAG_GRID)
    };
    let text = match args.which {
        TableKind::MleLess | TableKind::MleGreater => {
            let (a_values, p_values): (&[f64], &[f64]) = if args.which == TableKind::MleLess {
                (&[0.1, 0.2, 0.7, 0.9], &[0.1, 0.3, 0.4])
            } else {
                (&[0.1, 0.3, 0.7, 0.9], &[0.6, 0.7, 0.9])
            };
            let mut rows = Vec::new();
            for n in ns(&[499, 999, 4999]) {
                for &a in a_values {
                    for &p in p_values {
                        let cfg = StudyConfig::new(make_params(a, p)?, n, args.reps, args.alpha, next_seed())?;
                        let report = mc_mle_study(&cfg)?;
                        let (la, ca) = coverage_row(&report, Estimator::Mle, Parameter::A)?;
                        let (lp, cp) = coverage_row(&report, Estimator::Mle, Parameter::P)?;
                        if verbose > 1 {
                            eprintln!("n={n} a={a} p={p}: {:.2}s", report.runtime_secs);
                        }
                        let mut row = vec![n.to_string()];
                        row.extend([a, p, la, lp, ca, cp].map(num));
                        rows.push(row);
                    }
                }
            }
            csv_text(&["n", "a", "p", "ciml_a", "ciml_p", "cp_a", "cp_p"], &rows)
        }
        TableKind::LrtLess | TableKind::LrtGreater => {
            let p_values = if args.which == TableKind::LrtLess { P_LESS } else { P_GREATER };
            let mut text = String::new();
            for (i, n) in ns(&[9999]).into_iter().enumerate() {
                let cells = lrt_grid(&A_ALL, &p_values, n, next_seed(), args.alpha)?;
                let block = lrt_rows_csv(&cells);
                // one header, then the n column prepended to every row
                for (k, line) in block.lines().enumerate() {
                    if k == 0 {
                        if i == 0 {
                            text.push_str(&format!("n,{line}\n"));
                        }
                    } else {
                        text.push_str(&format!("{n},{line}\n"));
                    }
                }
            }
            text
        }
        TableKind::CompareLess | TableKind::CompareGreater => {
            let p_values = if args.which == TableKind::CompareLess { P_LESS } else { P_GREATER };
            let a = 0.5;
            let mut rows = Vec::new();
            for n in ns(&[99, 499, 999, 4999, 9999]) {
                for &p in &p_values {
                    let cfg = StudyConfig::new(make_params(a, p)?, n, args.reps, args.alpha, next_seed())?;
                    let report = mc_estimator_comparison(&cfg)?;
                    let mut row = vec![n.to_string(), num(a), num(p)];
                    for e in Estimator::ALL {
                        let (l, c) = coverage_row(&report, e, Parameter::P)?;
                        row.push(num(l));
                        row.push(num(c));
                    }
                    if verbose > 1 {
                        eprintln!("n={n} p={p}: {:.2}s", report.runtime_secs);
                    }
                    rows.push(row);
                }
            }
            csv_text(
                &["n", "a", "p", "ciml_mle", "cp_mle", "ciml_mean", "cp_mean", "ciml_robust", "cp_robust"],
                &rows,
            )
        }
    };
    write_bytes(args.output.out.as_deref(), text.as_bytes())
}

fn plot(args: &PlotArgs) -> CliResult<()> {
    format_of(&args.output, &[Format::Svg])?;
    let chart = match args.kind {
        PlotKind::Mixing => {
            let p = args.p.ok_or_else(|| CliError::Usage("--p is required for mixing plots".into()))?;
            let (psi, phi) = mixing_series(args.a, p, args.max_lag)?;
            mixing_chart(args.a, p, &psi, &phi)
        }
        PlotKind::Symmetry => {
            let report = symmetry_report(args.a, &A_ALL, args.n, args.reps, args.seed, args.alpha)?;
            let mc = report.points.iter().map(|pt| (pt.p, pt.ciml)).collect();
            let closed = report.points.iter().map(|pt| (pt.p, pt.closed_form)).collect();
            Chart {
                title: format!("Mean interval length for p, a = {}, n = {}", args.a, args.n),
                x_label: "p".into(),
                y_label: "CI length".into(),
                series: vec![
                    Series { name: "Monte Carlo".into(), points: mc },
                    Series { name: "asymptotic".into(), points: closed },
                ],
            }
        }
    };
    write_bytes(args.output.out.as_deref(), emit_svg(&chart)?.as_bytes())
}
