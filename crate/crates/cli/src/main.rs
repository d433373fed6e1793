//! `reachtube` command-line front end.

mod bench;
mod output;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use reachtube::model::{builtin_benchmarks, parse_init, InitFile, InitialSet};
use reachtube::reachtube::{run, RunConfig, RunSummary};
use reachtube::{parse_model, OdeSystem};

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Numerical(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "reachtube", version, about = "Validated Lagrangian reachtubes for nonlinear ODEs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the reachtube of a model file.
    Run(RunArgs),
    /// Run the built-in benchmark suite and print a summary table.
    Bench(BenchArgs),
    /// List the built-in benchmarks.
    ListModels(ListArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ListFormat {
    Text,
    Json,
}

fn parse_order(s: &str) -> Result<u32, String> {
    match s.trim().parse::<u32>() {
        Ok(p @ (1 | 2 | 4)) => Ok(p),
        _ => Err(format!("`{s}` is not a supported order; allowed orders are 1, 2 and 4")),
    }
}

/// Comma-separated numbers.
#[derive(Clone, Debug)]
struct List(Vec<f64>);

fn parse_list(s: &str) -> Result<List, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("invalid number `{v}`")))
        .collect::<Result<_, _>>()
        .map(List)
}

fn parse_weights(s: &str) -> Result<(String, PathBuf), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=FILE, got `{s}`"))?;
    Ok((k.trim().to_string(), PathBuf::from(v.trim())))
}

#[derive(Args)]
struct RunArgs {
    /// Model file (`x1' = ...` per line)
    #[arg(long)]
    model: PathBuf,
    /// Initial-set file with `center`, `radius` and optionally `dt`, `T`, `order`
    #[arg(long)]
    init: Option<PathBuf>,
    /// Initial center, comma separated
    #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
    center: Option<List>,
    /// Initial radius, one value or one per dimension
    #[arg(long, value_parser = parse_list)]
    radius: Option<List>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    /// Runge-Kutta order: 1, 2 or 4
    #[arg(long, value_parser = parse_order)]
    order: Option<u32>,
    /// 1-based index of a time variable excluded from volumes
    #[arg(long)]
    time_var: Option<usize>,
    /// Write the tube here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Emit every N-th step (averages always use all steps)
    #[arg(long, default_value_t = 1)]
    every: usize,
    /// Absolute box-volume cap
    #[arg(long)]
    blowup_threshold: Option<f64>,
    /// Use the ellipsoid hull alone as the reachset enclosure
    #[arg(long)]
    no_intersection: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmarks to run, by label or name
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    only: Vec<String>,
    #[arg(long, value_parser = parse_order, default_value = "1")]
    order: u32,
    /// Directory for per-model CSV tubes
    #[arg(long)]
    out: Option<PathBuf>,
    /// Controller weights for a neural benchmark, NAME=FILE
    #[arg(long, value_parser = parse_weights)]
    weights: Vec<(String, PathBuf)>,
}

#[derive(Args)]
struct ListArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: ListFormat,
}

/// Writes to standard output; a closed pipe is not an error.
fn say(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Usage(format!("writing output: {e}"))),
        _ => Ok(()),
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &PathBuf) -> Result<OdeSystem, CliError> {
    let text = read(path)?;
    let name = path.file_stem().map_or("model".into(), |s| s.to_string_lossy().into_owned());
    parse_model(&text)
        .map(|m| m.with_name(name))
        .map_err(|e| CliError::Parse(format!("{}:{e}", path.display())))
}

fn build_config(args: &RunArgs, sys: &OdeSystem) -> Result<RunConfig, CliError> {
    let file = match &args.init {
        Some(p) => parse_init(&read(p)?).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?,
        None => InitFile::default(),
    };
    let center = args.center.clone().map(|l| l.0).or(file.center.clone());
    let radius = args.radius.clone().map(|l| l.0).or(file.radius.clone());
    let (Some(center), Some(radius)) = (center, radius) else {
        return Err(CliError::Usage("initial set needs --init FILE or both --center and --radius".into()));
    };
    let initial = InitialSet::new(center, &radius).map_err(|e| CliError::Usage(e.to_string()))?;
    let dt = args.dt.or(file.dt).ok_or_else(|| CliError::Usage("missing --dt".into()))?;
    let horizon = args.horizon.or(file.horizon).ok_or_else(|| CliError::Usage("missing --horizon".into()))?;
    let order = match args.order.or(file.order) {
        Some(p) => parse_order(&p.to_string()).map_err(CliError::Usage)?,
        None => 1,
    };
    let time_index = match args.time_var {
        Some(0) => return Err(CliError::Usage("--time-var is 1-based".into())),
        Some(k) => Some(k - 1),
        None => sys.time_index(),
    };
    let cfg = RunConfig::new(initial, dt, horizon)
        .with_order(order)
        .with_time_index(time_index)
        .with_blowup_threshold(args.blowup_threshold)
        .with_output_every(args.every)
        .with_intersection(!args.no_intersection);
    cfg.validate(sys.dim()).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn emit(args: &RunArgs, sys: &OdeSystem, summary: &RunSummary) -> io::Result<()> {
    let sink: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match args.format {
        Format::Csv => output::write_csv(sink, sys.dim(), &summary.steps).map_err(io::Error::other),
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, &output::to_json(sys.name(), sys.dim(), summary))?;
            writeln!(sink)?;
            sink.flush()
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let sys = load_model(&args.model)?;
    let cfg = build_config(&args, &sys)?;
    let summary = run(&sys, &cfg);
    if !summary.floored.is_empty() {
        let dims: Vec<String> = summary.floored.iter().map(|j| format!("x{}", j + 1)).collect();
        log::warn!("zero radii raised to the floor for {}", dims.join(", "));
    }
    emit(&args, &sys, &summary).map_err(|e| CliError::Usage(format!("writing output: {e}")))?;
    say(&format!("{}\n", output::summary_line(&summary)))?;
    match &summary.failure {
        None => Ok(()),
        Some(e) => Err(CliError::Numerical(format!("run stopped: {e}"))),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let benches = bench::select(&args.only, &args.weights)?;
    if benches.is_empty() {
        return Err(CliError::Usage("no benchmarks selected".into()));
    }
    let rows = bench::run_all(&benches, args.order, args.out.as_deref())?;
    say(&bench::render(&rows))?;
    if rows.iter().all(|r| !r.summary.completed) {
        return Err(CliError::Numerical("every benchmark failed".into()));
    }
    Ok(())
}

fn cmd_list(args: ListArgs) -> Result<(), CliError> {
    let all = builtin_benchmarks();
    match args.format {
        ListFormat::Json => {
            let items: Vec<_> = all
                .iter()
                .map(|b| {
                    json!({
                        "label": b.label,
                        "name": b.name(),
                        "dim": b.system.dim(),
                        "dt": b.dt,
                        "horizon": b.horizon,
                        "center": b.initial.center(),
                        "radius": b.initial.radii(),
                        "time_var": b.system.time_index().map(|k| k + 1),
                        "needs_weights": b.neural.is_some(),
                    })
                })
                .collect();
            let text = serde_json::to_string_pretty(&items).map_err(|e| CliError::Usage(e.to_string()))?;
            say(&format!("{text}\n"))?;
        }
        ListFormat::Text => {
            let mut text = String::new();
            for b in &all {
                let r = b.initial.radii().iter().copied().fold(0.0, f64::max);
                let extra = if b.neural.is_some() { "  (needs --weights)" } else { "" };
                text.push_str(&format!(
                    "{:<4} {:<24} dt={} T={} r={}{extra}\n",
                    b.label,
                    format!("{} ({})", b.name(), b.system.dim()),
                    output::fmt_f64(b.dt),
                    output::fmt_f64(b.horizon),
                    output::fmt_f64(r),
                ));
            }
            say(&text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LRTNG_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::ListModels(a) => cmd_list(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
