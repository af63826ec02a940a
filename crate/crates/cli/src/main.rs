//! `lingctl`: file-based pipeline for linguistic-complexity control.
//!
//! extract -> fit-stats -> annotate -> build-eval -> evaluate -> report

mod commands;
mod config;
mod io;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "lingctl",
    version,
    about = "Linguistic-complexity control toolkit"
)]
struct Cli {
    /// Worker threads for extraction and scoring; also caps in-flight
    /// requests during `evaluate`. Defaults to the machine's parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON file with shared defaults (seed, m, k, sigma, stats, endpoint).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the fourteen features of each text.
    Extract(ExtractArgs),
    /// Check feature vectors against the validity rules.
    Validate(ValidateArgs),
    /// Fit standardization statistics on valid feature vectors.
    FitStats(FitStatsArgs),
    /// Tag training prompts with controls measured from their outputs.
    Annotate(AnnotateArgs),
    /// Sample perturbed valid feature vectors around references.
    SampleControls(SampleArgs),
    /// Build evaluation tasks with sampled control targets.
    BuildEval(BuildEvalArgs),
    /// Query a model endpoint for every task; resumable.
    Evaluate(EvaluateArgs),
    /// Score responses and write tables and radar data.
    Report(ReportArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// JSONL with `text` (or `output`) and optional `id` per line.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Feature JSONL as written by `extract`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitStatsArgs {
    /// Feature JSONL as written by `extract`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AnnotateArgs {
    /// Alpaca-style dataset (JSONL or JSON array).
    #[arg(long = "in")]
    input: PathBuf,
    /// Recorded in the manifest; annotation itself does not read it.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Drop report, one `{"id","reason"}` per line.
    #[arg(long)]
    dropped: Option<PathBuf>,
    /// Hold out this many examples before annotating.
    #[arg(long, requires = "holdout_out")]
    holdout: Option<usize>,
    /// Where the held-out examples are written, as JSONL.
    #[arg(long)]
    holdout_out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Feature JSONL as written by `extract`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BuildEvalArgs {
    /// Alpaca-style test examples (JSONL or JSON array).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    /// Subset size is drawn from 1..=m.
    #[arg(long, conflicts_with = "n")]
    m: Option<usize>,
    /// Use exactly n controls per task.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_attempts: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    dropped: Option<PathBuf>,
    /// Examples whose sampling failed, one `{"id","reason"}` per line.
    #[arg(long)]
    skipped: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Task JSONL as written by `build-eval`.
    #[arg(long)]
    tasks: PathBuf,
    /// Endpoint JSON file.
    #[arg(long)]
    endpoint: Option<PathBuf>,
    /// Response ledger; existing successful records are reused.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    N,
    Sigma,
}

#[derive(Args)]
struct ReportArgs {
    /// Response ledger of a single run.
    #[arg(long, requires = "targets")]
    responses: Option<PathBuf>,
    /// Task JSONL the single run answered.
    #[arg(long, requires = "responses")]
    targets: Option<PathBuf>,
    /// Baseline name of the single run.
    #[arg(long, default_value = "model")]
    name: String,
    /// Additional run as `NAME=TARGETS,RESPONSES`; repeatable.
    #[arg(long = "run", value_name = "NAME=TARGETS,RESPONSES")]
    runs: Vec<String>,
    /// Also write a sweep table over the runs.
    #[arg(long, value_enum)]
    sweep: Option<SweepArg>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().map(|c| c.to_string()).collect();
            let report = serde_json::json!({"error": chain[0], "causes": &chain[1..]});
            eprintln!("{report}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(jobs) = cli.jobs {
        anyhow::ensure!(jobs >= 1, "--jobs must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()?;
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Extract(a) => commands::extract(&a.input, &a.out),
        Command::Validate(a) => commands::validate(&a.input, a.out.as_deref()),
        Command::FitStats(a) => commands::fit_stats(&a.input, &a.out),
        Command::Annotate(a) => commands::annotate(commands::AnnotateOpts {
            input: a.input,
            stats: cfg.stats(a.stats),
            m: cfg.m(a.m),
            seed: cfg.seed(a.seed),
            out: a.out,
            dropped: a.dropped,
            holdout: a.holdout.zip(a.holdout_out),
        }),
        Command::SampleControls(a) => commands::sample_controls(commands::SampleOpts {
            input: a.input,
            stats: need(cfg.stats(a.stats), "--stats")?,
            sigma: cfg.sigma(a.sigma),
            k: cfg.k(a.k),
            seed: cfg.seed(a.seed),
            max_attempts: cfg.max_attempts(a.max_attempts),
            out: a.out,
        }),
        Command::BuildEval(a) => commands::build_eval(commands::BuildEvalOpts {
            input: a.input,
            stats: need(cfg.stats(a.stats), "--stats")?,
            k: cfg.k(a.k),
            sigma: cfg.sigma(a.sigma),
            m: cfg.m(a.m),
            n: a.n,
            seed: cfg.seed(a.seed),
            max_attempts: cfg.max_attempts(a.max_attempts),
            out: a.out,
            dropped: a.dropped,
            skipped: a.skipped,
        }),
        Command::Evaluate(a) => commands::evaluate(
            &a.tasks,
            &need(cfg.endpoint(a.endpoint), "--endpoint")?,
            &a.out,
            cli.jobs,
        ),
        Command::Report(a) => {
            let mut runs = Vec::new();
            if let (Some(t), Some(r)) = (a.targets, a.responses) {
                runs.push((a.name, t, r));
            }
            for spec in &a.runs {
                runs.push(commands::parse_run(spec)?);
            }
            let sweep = a.sweep.map(|s| match s {
                SweepArg::N => lingctl_core::eval::SweepKind::NSweep,
                SweepArg::Sigma => lingctl_core::eval::SweepKind::SigmaSweep,
            });
            commands::report(&runs, sweep, &a.out)
        }
    }
}

fn need(path: Option<PathBuf>, flag: &str) -> anyhow::Result<PathBuf> {
    path.ok_or_else(|| anyhow::anyhow!("{flag} is required (or set it in --config)"))
}
