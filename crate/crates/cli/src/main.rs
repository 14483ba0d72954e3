//! `coarse-eur`: evaluate, tabulate and check entropic uncertainty bounds for
//! coarse-grained position and momentum measurements (`ħ = 1`).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coarse_eur::bounds::{find_crossing, BoundRequest, Curve, Family, FamilySelector};
use coarse_eur::coarsegrain::{random_hermite_states, SampledState, StateSpec, Verifier};
use coarse_eur::majorization::Truncation;
use coarse_eur::prolate::{self, Method};
use coarse_eur::sweep::{self, Scale, SweepConfig};
use coarse_eur::{Error, Execution};
use serde_json::{json, Value};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_BRACKET: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "coarse-eur", version, about)]
#[command(
    after_help = "Exit codes: 0 success, 1 verification failure, 2 usage, 3 domain, 4 I/O, 5 bracket.\n\
Set RUST_LOG=warn (or debug) for diagnostics on standard error."
)]
struct Cli {
    /// Evaluate everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower bounds on H_a[q] + H_b[p] at one value of gamma = Delta * delta.
    #[command(allow_negative_numbers = true)]
    Bound(BoundArgs),
    /// Tabulate B, R and MAJ_2..MAJ_4 over a grid of gamma (CSV).
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Locate where two bound curves cross by bisection.
    #[command(allow_negative_numbers = true)]
    Crossing(CrossingArgs),
    /// Check the bounds on concrete states.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Top eigenvalue lambda0(c) of the time and band limiting operator.
    #[command(allow_negative_numbers = true)]
    Prolate(ProlateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    /// Best applicable family for equal orders.
    Best,
    /// Best of B and R for conjugate orders.
    Conjugate,
    B,
    R,
    Maj,
}

impl From<FamilyArg> for FamilySelector {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Best => FamilySelector::BestSameOrder,
            FamilyArg::Conjugate => FamilySelector::BestConjugate,
            FamilyArg::B => FamilySelector::Single(Family::B),
            FamilyArg::R => FamilySelector::Single(Family::R),
            FamilyArg::Maj => FamilySelector::Single(Family::Maj),
        }
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    gamma: f64,
    /// Renyi order; `inf` for the min-entropy.
    #[arg(long, default_value = "1")]
    alpha: f64,
    /// Truncation of the majorizing vector; an integer >= 2 or `inf`.
    #[arg(long, default_value = "4")]
    n: Truncation,
    #[arg(long, value_enum, default_value_t = FamilyArg::Best)]
    family: FamilyArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    gamma_min: f64,
    #[arg(long)]
    gamma_max: f64,
    #[arg(long, default_value_t = 500)]
    points: usize,
    /// `linear` or `log`.
    #[arg(long, default_value = "linear")]
    scale: Scale,
    #[arg(long, default_value = "1")]
    alpha: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CrossingArgs {
    /// First curve: `B`, `R`, `ZERO` or `MAJ:<n>`.
    #[arg(long)]
    a: Curve,
    /// Second curve.
    #[arg(long)]
    b: Curve,
    #[arg(long, default_value = "1")]
    alpha: f64,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], required = true)]
    bracket: Vec<f64>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StateKind {
    Gaussian,
    Random,
    /// A single Hermite function h_level.
    Hermite,
    /// Samples read from `--file`.
    Sampled,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    state: StateKind,
    /// Position spread of the Gaussian.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    center: f64,
    #[arg(long, default_value_t = 0.0)]
    momentum: f64,
    /// Hermite levels in each random state, or the level of `--state hermite`.
    #[arg(long, default_value_t = coarse_eur::coarsegrain::DEFAULT_RANDOM_LEVELS)]
    levels: usize,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Position bin width.
    #[arg(long)]
    delta: f64,
    /// Momentum bin width.
    #[arg(long)]
    delta_p: f64,
    #[arg(long, default_value = "1")]
    alpha: f64,
    #[arg(long, default_value = "4")]
    n: Truncation,
    /// Number of random states.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = coarse_eur::coarsegrain::DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Series,
    Nystrom,
    Asymptotic,
}

#[derive(Args, Debug)]
struct ProlateArgs {
    #[arg(long)]
    c: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    /// Quadrature nodes for the Nystrom method.
    #[arg(long, default_value_t = prolate::DEFAULT_NODES)]
    nodes: usize,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Output(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Bracket { .. }) => EXIT_BRACKET,
            Failure::Core(Error::Io(_)) | Failure::Output(_) => EXIT_IO,
            Failure::Core(_) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => e.fmt(f),
            Failure::Output(e) => write!(f, "I/O error: {e}"),
        }
    }
}

/// Non-finite numbers as strings (`"inf"`), everything else as a number.
fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn truncation(n: Truncation) -> Value {
    match n {
        Truncation::Finite(n) => json!(n),
        Truncation::Unbounded => json!("inf"),
    }
}

fn print_json(value: &Value) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_bound(args: &BoundArgs) -> Result<ExitCode, Failure> {
    let result = BoundRequest {
        gamma: args.gamma,
        alpha: args.alpha,
        n: args.n,
        family: args.family.into(),
    }
    .evaluate()?;
    match args.format {
        Format::Json => {
            let bounds: serde_json::Map<String, Value> = result
                .values
                .iter()
                .map(|(f, v)| (f.as_str().to_string(), number(*v)))
                .collect();
            let omitted: serde_json::Map<String, Value> = result
                .omitted
                .iter()
                .map(|(f, why)| (f.as_str().to_string(), json!(why)))
                .collect();
            print_json(&json!({
                "gamma": number(args.gamma),
                "alpha": number(args.alpha),
                "n": truncation(args.n),
                "bounds": bounds,
                "omitted": omitted,
                "dominant": result.dominant.as_str(),
            }))?;
        }
        Format::Csv => {
            let mut out = io::stdout().lock();
            writeln!(out, "gamma,alpha,n,family,value")?;
            for (f, v) in &result.values {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{},{},{:.16e}",
                    args.gamma, args.alpha, args.n, f, v
                )?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(args: &SweepArgs, exec: Execution) -> Result<ExitCode, Failure> {
    let cfg = SweepConfig::new(
        args.gamma_min,
        args.gamma_max,
        args.points,
        args.scale,
        args.alpha,
    )?;
    let rows = sweep::sweep(&cfg, exec)?;
    match &args.out {
        Some(path) => sweep::write_csv(BufWriter::new(File::create(path)?), &rows)?,
        None => sweep::write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_crossing(args: &CrossingArgs) -> Result<ExitCode, Failure> {
    let bracket = (args.bracket[0], args.bracket[1]);
    let gamma_star = find_crossing(args.a, args.b, args.alpha, bracket, args.tol)?;
    print_json(&json!({
        "a": args.a.to_string(),
        "b": args.b.to_string(),
        "alpha": number(args.alpha),
        "bracket": [bracket.0, bracket.1],
        "tol": args.tol,
        "gamma_star": gamma_star,
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn states_for(args: &VerifyArgs) -> Result<Vec<StateSpec>, Failure> {
    Ok(match args.state {
        StateKind::Gaussian => vec![StateSpec::shifted_gaussian(
            args.sigma,
            args.center,
            args.momentum,
        )?],
        StateKind::Hermite => vec![StateSpec::hermite_level(args.levels)?],
        StateKind::Random => random_hermite_states(args.trials, args.levels, args.seed)?,
        StateKind::Sampled => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| Error::Domain("--state sampled needs --file".into()))?;
            let reader = BufReader::new(File::open(path)?);
            vec![StateSpec::Sampled(SampledState::read_from(reader)?)]
        }
    })
}

fn cmd_verify(args: &VerifyArgs, exec: Execution) -> Result<ExitCode, Failure> {
    let verifier = Verifier::new(args.delta, args.delta_p, args.alpha, args.n)?;
    let states = states_for(args)?;
    let outcomes = verifier.check_all(&states, exec)?;
    let passes = outcomes.iter().filter(|t| t.pass()).count();
    let eur_failures = outcomes.iter().filter(|t| !t.eur.pass).count();
    let majorization_failures = outcomes.iter().filter(|t| !t.majorized).count();
    let min_margin = outcomes
        .iter()
        .map(|t| t.eur.margin)
        .fold(f64::INFINITY, f64::min);
    print_json(&json!({
        "state": format!("{:?}", args.state).to_lowercase(),
        "gamma": verifier.gamma(),
        "alpha": number(args.alpha),
        "n": truncation(args.n),
        "bound": verifier.bound,
        "trials": outcomes.len(),
        "passes": passes,
        "eur_failures": eur_failures,
        "majorization_failures": majorization_failures,
        "min_margin": number(min_margin),
    }))?;
    Ok(if passes == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    })
}

fn cmd_prolate(args: &ProlateArgs) -> Result<ExitCode, Failure> {
    let eval = match args.method {
        MethodArg::Auto => prolate::lambda0(args.c)?,
        MethodArg::Series => prolate::lambda0_by(args.c, Method::Series, args.nodes)?,
        MethodArg::Nystrom => prolate::lambda0_by(args.c, Method::Nystrom, args.nodes)?,
        MethodArg::Asymptotic => prolate::lambda0_by(args.c, Method::Asymptotic, args.nodes)?,
    };
    print_json(&json!({
        "c": eval.c,
        "lambda0": eval.lambda0,
        "deficit": eval.deficit,
        "method": eval.method.as_str(),
    }))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    log::debug!("parallel execution: {}", exec.is_parallel());
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Sweep(a) => cmd_sweep(a, exec),
        Command::Crossing(a) => cmd_crossing(a),
        Command::Verify(a) => cmd_verify(a, exec),
        Command::Prolate(a) => cmd_prolate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
