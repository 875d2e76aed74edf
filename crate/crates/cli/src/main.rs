//! `assent` command line.
//!
//! `assent synth`     — write a seeded synthetic project directory
//! `assent evaluate`  — order preservation of metrics over project directories
//! `assent stats`     — Wilcoxon / Benjamini-Hochberg / Cliff's delta over a table
//! `assent overlap`   — fault-consideration regions per metric

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use assent::metrics::{Metric, DEFAULT_COS_OPERATORS};
use assent::model::ProjectBundle;
use assent::report::{self, read_metric_table};
use assent::run::{self, GroundTruth, RunConfig};
use assent::stats::{compare_metrics, Alternative};
use assent::synth::{SynthSpec, DEFAULT_OPERATORS};
use assent::{io, Error, Result};

#[derive(Parser)]
#[command(name = "assent", version, about = "Order-preservation evaluation of test suite effectiveness metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic project with planted order-preservation values.
    Synth(SynthArgs),
    /// Evaluate metrics by order preservation over one or more projects.
    Evaluate(EvaluateArgs),
    /// Pairwise significance and effect size between the metric columns of a table.
    Stats(StatsArgs),
    /// Which faults each metric considers, as Venn-style regions.
    Overlap(OverlapArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    tests: usize,
    #[arg(long, default_value_t = 200)]
    mutants: usize,
    #[arg(long, default_value_t = 8)]
    faults: usize,
    /// Fraction of faults the mutation score preserves.
    #[arg(long, default_value_t = 0.75)]
    planted_op: f64,
    /// Fraction of faults statement coverage preserves (default: --planted-op).
    #[arg(long)]
    planted_sc: Option<f64>,
    /// Fraction of faults branch coverage preserves (default: --planted-op).
    #[arg(long)]
    planted_bc: Option<f64>,
    #[arg(long, default_value_t = 120)]
    statements: usize,
    #[arg(long, default_value_t = 60)]
    branches: usize,
    #[arg(long, default_value_t = 1)]
    triggering_per_fault: usize,
    #[arg(long, default_value_t = 0.05)]
    base_kill_prob: f64,
    #[arg(long, default_value_t = 0.3)]
    base_cover_prob: f64,
    #[arg(long, default_value_t = 0.1)]
    unkillable_fraction: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SelectionArgs {
    #[arg(long, default_value_t = 20)]
    reps: u32,
    #[arg(long, default_value_t = 30)]
    rms_percent: u32,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_COS_OPERATORS.map(String::from))]
    cos_ops: Vec<String>,
    #[arg(long, default_value_t = 100)]
    kmeans_max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Project directories, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    data: Vec<PathBuf>,
    /// Default: all seven; MS is left out under the mutant ground truth.
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    /// real | mutant
    #[arg(long, default_value = "real")]
    ground_truth: String,
    /// per-fault | random:N
    #[arg(long, default_value = "per-fault")]
    pairs: String,
    #[command(flatten)]
    selection: SelectionArgs,
    /// Real-fault op_table.csv to compute change rates against (mutant ground truth only).
    #[arg(long)]
    compare_rq1: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    /// op_table.csv or change_rates.csv
    #[arg(long)]
    op_table: PathBuf,
    /// Comma-separated subset of the table's metric columns (default: all).
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    #[arg(long, default_value = "wilcoxon")]
    test: String,
    #[arg(long, default_value = "bh")]
    adjust: String,
    #[arg(long, default_value = "cliffs")]
    effect: String,
    /// two-sided | less | greater
    #[arg(long, default_value = "two-sided")]
    alternative: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OverlapArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    data: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "ms,cos,sc,bc")]
    metrics: Vec<String>,
    /// Keep RMS/CMS, counting a fault as considered in at least half of the repetitions.
    #[arg(long)]
    include_stochastic: bool,
    #[command(flatten)]
    selection: SelectionArgs,
    #[arg(long)]
    out: PathBuf,
}

fn parse_metrics(names: &[String]) -> Result<Vec<Metric>> {
    names.iter().map(|n| n.parse()).collect()
}

fn load_all(dirs: &[PathBuf]) -> Result<Vec<ProjectBundle>> {
    dirs.iter()
        .map(|d| {
            log::info!("loading {}", d.display());
            io::load_project(d)
        })
        .collect()
}

fn run_config(metrics: &[String], ground_truth: &str, pairs: &str, sel: &SelectionArgs) -> Result<RunConfig> {
    let cfg = RunConfig {
        metrics: parse_metrics(metrics)?,
        ground_truth: ground_truth.parse()?,
        repetitions: sel.reps,
        rms_percent: sel.rms_percent,
        cos_operators: sel.cos_ops.iter().map(|s| s.trim().to_string()).collect(),
        seed: sel.seed,
        pairs: pairs.parse()?,
        kmeans_max_iters: sel.kmeans_max_iters,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn path_strings(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

fn synth(args: SynthArgs) -> Result<()> {
    let spec = SynthSpec {
        seed: args.seed,
        num_tests: args.tests,
        num_mutants: args.mutants,
        num_statements: args.statements,
        num_branches: args.branches,
        num_faults: args.faults,
        operator_alphabet: DEFAULT_OPERATORS.map(String::from).to_vec(),
        base_kill_prob: args.base_kill_prob,
        unkillable_fraction: args.unkillable_fraction,
        planted_ms_op: args.planted_op,
        triggering_per_fault: args.triggering_per_fault,
        planted_sc_op: args.planted_sc.unwrap_or(args.planted_op),
        planted_bc_op: args.planted_bc.unwrap_or(args.planted_op),
        base_cover_prob: args.base_cover_prob,
    };
    let name = args
        .out
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| format!("synth-{}", spec.seed));
    let bundle = assent::synth::generate_named(&spec, &name)?;
    io::write_project(&args.out, &bundle)?;
    report::write_json(&args.out.join("synth_spec.json"), &spec)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let metrics = if args.metrics.is_empty() {
        let mutant = args.ground_truth.parse::<GroundTruth>()? == GroundTruth::Mutant;
        Metric::ALL
            .iter()
            .filter(|m| !(mutant && **m == Metric::Ms))
            .map(|m| m.name().to_string())
            .collect()
    } else {
        args.metrics.clone()
    };
    let cfg = run_config(&metrics, &args.ground_truth, &args.pairs, &args.selection)?;
    let baseline = match &args.compare_rq1 {
        Some(path) if cfg.ground_truth == GroundTruth::Mutant => Some(read_metric_table(path)?.baseline()),
        Some(_) => return Err(Error::Config("--compare-rq1 needs --ground-truth mutant".into())),
        None => None,
    };
    let bundles = load_all(&args.data)?;
    let evaluation = run::evaluate(&bundles, &cfg, baseline.as_ref())?;
    report::write_evaluation(
        &args.out,
        &evaluation,
        evaluate_inputs(&args.data, args.compare_rq1.as_deref()),
    )?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct EvaluateInputs {
    data: Vec<String>,
    compare_rq1: Option<String>,
}

fn evaluate_inputs(data: &[PathBuf], compare: Option<&Path>) -> EvaluateInputs {
    EvaluateInputs {
        data: path_strings(data),
        compare_rq1: compare.map(|p| p.display().to_string()),
    }
}

fn stats(args: StatsArgs) -> Result<()> {
    for (flag, got, supported) in [
        ("--test", &args.test, "wilcoxon"),
        ("--adjust", &args.adjust, "bh"),
        ("--effect", &args.effect, "cliffs"),
    ] {
        if got != supported {
            return Err(Error::Config(format!("{flag} `{got}` is not supported (only `{supported}`)")));
        }
    }
    let alternative: Alternative = args.alternative.parse()?;
    let table = read_metric_table(&args.op_table)?;
    let (metrics, samples) = if args.metrics.is_empty() {
        (table.metrics.clone(), table.samples())
    } else {
        let all = table.samples();
        let mut names = Vec::new();
        let mut cols = Vec::new();
        for want in &args.metrics {
            let i = table
                .metrics
                .iter()
                .position(|m| m.eq_ignore_ascii_case(want.trim()))
                .ok_or_else(|| Error::Input(format!("table has no column `{want}`")))?;
            names.push(table.metrics[i].clone());
            cols.push(all[i].clone());
        }
        (names, cols)
    };
    if metrics.len() < 2 {
        return Err(Error::Input("need at least two metric columns to compare".into()));
    }
    let report = compare_metrics(&metrics, &samples, alternative)?;
    report::write_stats(&args.out, &report)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}

fn overlap(args: OverlapArgs) -> Result<()> {
    let cfg = run_config(&args.metrics, "real", "per-fault", &args.selection)?;
    let bundles = load_all(&args.data)?;
    let outcome = run::run_overlap(&bundles, &cfg, args.include_stochastic)?;
    report::write_overlap(&args.out, &outcome)?;
    log::info!("wrote {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Stats(a) => stats(a),
        Command::Overlap(a) => overlap(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
