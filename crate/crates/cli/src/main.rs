//! `shapley-oofa`: design generation, Shapley estimation and benchmarks.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 COA requested for a
//! non-prime-power `d`, 4 enumeration limit exceeded, 5 file or parse error,
//! 6 no reference values available for a benchmark.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use shapley_oofa::analysis::{bench::VERSION, run_benchmark, BenchConfig};
use shapley_oofa::designs::{coa_random, ls_random, write_design_csv};
use shapley_oofa::estimators::{estimate, Limits, Method, LIMITS_ENV};
use shapley_oofa::exec::with_jobs;
use shapley_oofa::games::build_game;
use shapley_oofa::Error;

#[derive(Parser, Debug)]
#[command(name = "shapley-oofa", version, about = "Shapley value estimation with order-of-addition designs")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random COA or Latin-square design as CSV.
    Design(DesignArgs),
    /// Compute or estimate the Shapley values of a built-in game.
    Shapley(ShapleyArgs),
    /// Run a replicated benchmark described by a JSON config.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Coa,
    Ls,
}

#[derive(Args, Debug)]
struct DesignArgs {
    /// Design family.
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of players; COA needs a prime power of at least 3.
    #[arg(long)]
    d: usize,
    /// Master seed for the random row/column permutations.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GameName {
    Airport,
    Voting,
    Connectivity,
    Additive,
    LinearGaussian,
}

impl GameName {
    fn as_str(self) -> &'static str {
        match self {
            GameName::Airport => "airport",
            GameName::Voting => "voting",
            GameName::Connectivity => "connectivity",
            GameName::Additive => "additive",
            GameName::LinearGaussian => "linear-gaussian",
        }
    }
}

#[derive(Args, Debug)]
struct ShapleyArgs {
    /// exact-perm, exact-subset, srs, ls, coa or coa-pad.
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, value_enum)]
    game: GameName,
    /// Airport weights, or additive coefficients: one number per line.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Edge list for the connectivity game.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Linear-Gaussian coefficients, one per line.
    #[arg(long)]
    beta: Option<PathBuf>,
    /// Linear-Gaussian covariance, one row per line.
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Linear-Gaussian intercept.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta0: f64,
    /// Number of players of the voting game.
    #[arg(long)]
    d: Option<usize>,
    /// Permutations for srs.
    #[arg(long)]
    samples: Option<usize>,
    /// Designs for ls, coa and coa-pad.
    #[arg(long)]
    designs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    /// Cache connectivity values across scans.
    #[arg(long)]
    memo: bool,
    /// Largest d for exact-perm (default 9, or from SHAPLEY_DESIGNS_LIMITS).
    #[arg(long)]
    perm_limit: Option<usize>,
    /// Largest d for exact-subset (default 20, or from SHAPLEY_DESIGNS_LIMITS).
    #[arg(long)]
    subset_limit: Option<usize>,
    /// Output JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// JSON benchmark config.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads.
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    /// CSV report path; overrides the config's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_method(text: &str) -> Result<Method, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

/// A message and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    /// Maps library errors; `input` is the code for invalid input content.
    fn from_error(err: Error, input: u8) -> Self {
        let code = match &err {
            Error::NotPrimePower(_) => 3,
            Error::LimitExceeded { .. } => 4,
            Error::Io(_) | Error::Json(_) | Error::Parse { .. } => 5,
            Error::NoTruth(_) => 6,
            _ => input,
        };
        let mut message = err.to_string();
        if code == 3 {
            message.push_str("; use --method coa-pad to pad with null players, or --kind ls");
        }
        Failure { code, message }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Shapley(args) => cmd_shapley(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> CmdResult {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| Failure::from_error(e.into(), 5))?;
            log::info!("wrote {}", path.display());
        }
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::from_error(e.into(), 5))?,
    }
    Ok(())
}

fn run_jobs<R: Send>(jobs: Option<u16>, f: impl FnOnce() -> R + Send) -> Result<R, Failure> {
    match jobs {
        Some(k) => with_jobs(k as usize, f).map_err(|e| Failure::from_error(e, 2)),
        None => Ok(f()),
    }
}

fn cmd_design(args: DesignArgs) -> CmdResult {
    let design = match args.kind {
        Kind::Coa => coa_random(args.d, args.seed),
        Kind::Ls => ls_random(args.d, args.seed),
    }
    .map_err(|e| Failure::from_error(e, 2))?;
    let mut bytes = Vec::new();
    write_design_csv(&design, &mut bytes).map_err(|e| Failure::from_error(e, 5))?;
    emit(args.out.as_deref(), &bytes)
}

/// Game parameters from the flags, in the form the game registry takes.
fn game_params(args: &ShapleyArgs) -> Result<Value, Failure> {
    let path = |p: &Option<PathBuf>, flag: &str| -> Result<Value, Failure> {
        p.as_ref()
            .map(|p| Value::String(p.display().to_string()))
            .ok_or_else(|| Failure::usage(format!("--game {} needs {flag}", args.game.as_str())))
    };
    let mut map = Map::new();
    match args.game {
        GameName::Airport => {
            map.insert("weights_file".into(), path(&args.weights, "--weights FILE")?);
        }
        GameName::Additive => {
            map.insert("c_file".into(), path(&args.weights, "--weights FILE")?);
        }
        GameName::Voting => {
            let d = args.d.ok_or_else(|| Failure::usage("--game voting needs --d N"))?;
            map.insert("d".into(), json!(d));
        }
        GameName::Connectivity => {
            map.insert("graph_file".into(), path(&args.graph, "--graph FILE")?);
            if args.memo {
                map.insert("memo".into(), json!(true));
            }
        }
        GameName::LinearGaussian => {
            map.insert("beta_file".into(), path(&args.beta, "--beta FILE")?);
            map.insert("sigma_file".into(), path(&args.sigma, "--sigma FILE")?);
            map.insert("beta0".into(), json!(args.beta0));
        }
    }
    Ok(Value::Object(map))
}

fn limits(args: &ShapleyArgs) -> Result<Limits, Failure> {
    let mut limits = Limits::from_env().map_err(|e| Failure::usage(format!("{e} (from {LIMITS_ENV})")))?;
    if let Some(p) = args.perm_limit {
        limits.perm = p;
    }
    if let Some(s) = args.subset_limit {
        limits.subset = s;
    }
    limits.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(limits)
}

fn cmd_shapley(args: ShapleyArgs) -> CmdResult {
    let limits = limits(&args)?;
    let size = match args.method {
        Method::Srs => args.samples.ok_or_else(|| Failure::usage("--method srs needs --samples M"))?,
        Method::Ls | Method::Coa | Method::CoaPad => args
            .designs
            .ok_or_else(|| Failure::usage(format!("--method {} needs --designs NC", args.method.token())))?,
        Method::ExactPerm | Method::ExactSubset => 0,
    };
    let params = game_params(&args)?;
    let game = build_game(args.game.as_str(), &params).map_err(|e| Failure::from_error(e, 5))?;
    let est = run_jobs(args.jobs, || estimate(args.method, &*game, size, args.seed, &limits))?
        .map_err(|e| Failure::from_error(e, 2))?;

    let manifest = json!({
        "command": "shapley",
        "version": VERSION,
        "method": args.method.token(),
        "game": args.game.as_str(),
        "game_params": params,
        "samples": args.samples,
        "designs": args.designs,
        "seed": args.seed,
        "jobs": args.jobs,
        "limits": limits,
    });
    let mut out = json!({
        "values": est.values,
        "method": est.method,
        "m": est.permutations,
        "evaluations": est.evaluations,
        "seed": est.seed,
        "d": game.num_players(),
        "wall_ms": est.elapsed.as_secs_f64() * 1e3,
        "manifest": manifest,
    });
    if let Some(star) = est.d_star {
        out["d_star"] = json!(star);
    }
    let mut text = serde_json::to_string_pretty(&out).map_err(|e| Failure::from_error(e.into(), 5))?;
    text.push('\n');
    emit(args.out.as_deref(), text.as_bytes())
}

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let mut config = BenchConfig::load(&args.config).map_err(|e| Failure::from_error(e, 5))?;
    if let Some(out) = &args.out {
        config.output_path = Some(out.clone());
    }
    let output = config
        .output_path
        .clone()
        .ok_or_else(|| Failure::usage("no report path: set output_path in the config or pass --out"))?;
    let report = run_jobs(args.jobs, || run_benchmark(&config))?.map_err(|e| Failure::from_error(e, 5))?;
    let (csv, summary) = report.write_files(&output).map_err(|e| Failure::from_error(e, 5))?;
    println!("{}", csv.display());
    println!("{}", summary.display());
    Ok(())
}
