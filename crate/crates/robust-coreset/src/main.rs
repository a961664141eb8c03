//! Thin command-line front end over the library: `run` one experiment,
//! `sweep` a parameter grid, `oracle` for exact optima, `validate` for
//! instance files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use robust_coreset::harness::{self, ReportFormat, StreamOrder, TrialConfig, TrialRecord};
use robust_coreset::instance::{self, GenConfig, ItemSet};
use robust_coreset::{
    brute_force_opt, AdversaryModel, InstanceSource, ItemId, PMatroid, UtilityOracle,
};

#[derive(Parser)]
#[command(
    name = "robust-coreset",
    about = "Deletion-robust streaming submodular maximization toolkit",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and emit per-trial records.
    Run(RunArgs),
    /// Cartesian sweep over comma-separated eps and d lists.
    Sweep(SweepArgs),
    /// Print the exact optimum for an instance, optionally after deletions.
    Oracle(OracleArgs),
    /// Check an instance file against every format invariant.
    Validate {
        /// Instance file to check.
        instance: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    JsonLines,
}

impl From<OutputFormat> for ReportFormat {
    fn from(format: OutputFormat) -> ReportFormat {
        match format {
            OutputFormat::Csv => ReportFormat::Csv,
            OutputFormat::JsonLines => ReportFormat::JsonLines,
        }
    }
}

#[derive(Args)]
struct SourceArgs {
    /// Instance file (JSON).
    #[arg(long, conflicts_with = "gen")]
    instance: Option<PathBuf>,
    /// Synthetic instance spec, e.g. `kind=modular,n=24,k=4` or
    /// `kind=coverage,n=24,k=4,universe=30,groups=6,cap=1`.
    #[arg(long)]
    gen: Option<String>,
    /// Seed for the synthetic generator.
    #[arg(long, default_value_t = 0)]
    gen_seed: u64,
}

impl SourceArgs {
    fn resolve(&self) -> anyhow::Result<InstanceSource> {
        match (&self.instance, &self.gen) {
            (Some(path), None) => Ok(InstanceSource::File(path.clone())),
            (None, Some(spec)) => Ok(InstanceSource::Generated {
                config: GenConfig::parse(spec)?,
                seed: self.gen_seed,
            }),
            (None, None) => bail!("one of --instance or --gen is required"),
            (Some(_), Some(_)) => bail!("--instance and --gen are mutually exclusive"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Exchange threshold parameter (> 0).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Buffer slack in (0, 1); buffer capacity is ceil(d / eps).
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Deletion budget the coreset must survive.
    #[arg(long, default_value_t = 0)]
    d: usize,
    /// Deletion model: fixed:<ids> | random | top | greedy.
    #[arg(long, default_value = "random")]
    adversary: String,
    /// Seed for the random adversary (independent of --seed).
    #[arg(long, default_value_t = 0)]
    adversary_seed: u64,
    /// Master seed; trial i runs with a seed mixed from (seed, i).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of seeded trials.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Shuffle the stream order once with this seed before all trials.
    #[arg(long)]
    shuffle_seed: Option<u64>,
    /// Report destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

impl RunArgs {
    fn to_config(&self) -> anyhow::Result<TrialConfig> {
        let mut cfg = TrialConfig::new(self.source.resolve()?);
        cfg.alpha = self.alpha;
        cfg.eps = self.eps;
        cfg.deletions = self.d;
        cfg.adversary = AdversaryModel::parse(&self.adversary, self.adversary_seed)?;
        cfg.master_seed = self.seed;
        cfg.trials = self.trials;
        if let Some(seed) = self.shuffle_seed {
            cfg.stream_order = StreamOrder::Shuffled { seed };
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated eps values overriding --eps.
    #[arg(long)]
    eps_list: Option<String>,
    /// Comma-separated d values overriding --d.
    #[arg(long)]
    d_list: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Items to delete before solving, e.g. `2,5,7`.
    #[arg(long)]
    delete: Option<String>,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run_command(&args),
        Command::Sweep(args) => sweep_command(&args),
        Command::Oracle(args) => oracle_command(&args),
        Command::Validate { instance } => validate_command(&instance),
    }
}

fn open_sink(out: &Option<PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn print_summary(label: &str, summary: &harness::ExperimentSummary) {
    eprintln!(
        "{label}: trials={} mean_ratio={:.4} min_ratio={:.4} floor={:.4} \
         mean_coreset={:.2} max_coreset={} max_stream_queries={}",
        summary.trials,
        summary.mean_ratio,
        summary.min_ratio,
        summary.theoretical_floor,
        summary.mean_coreset_size,
        summary.max_coreset_size,
        summary.max_stream_queries,
    );
}

fn run_command(args: &RunArgs) -> anyhow::Result<()> {
    let cfg = args.to_config()?;
    let summary = harness::run_experiment(&cfg)?;
    print_summary("experiment", &summary);
    let mut sink = open_sink(&args.out)?;
    harness::emit_report(&summary.records, args.format.into(), &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn sweep_command(args: &SweepArgs) -> anyhow::Result<()> {
    let eps_values: Vec<f64> = match &args.eps_list {
        Some(list) => list
            .split(',')
            .map(|part| part.trim().parse().context("bad eps value"))
            .collect::<anyhow::Result<_>>()?,
        None => vec![args.run.eps],
    };
    let d_values: Vec<usize> = match &args.d_list {
        Some(list) => list
            .split(',')
            .map(|part| part.trim().parse().context("bad d value"))
            .collect::<anyhow::Result<_>>()?,
        None => vec![args.run.d],
    };

    let base = args.run.to_config()?;
    let mut all_records: Vec<TrialRecord> = Vec::new();
    for &eps in &eps_values {
        for &d in &d_values {
            let mut cfg = base.clone();
            cfg.eps = eps;
            cfg.deletions = d;
            let summary = harness::run_experiment(&cfg)?;
            print_summary(&format!("eps={eps} d={d}"), &summary);
            all_records.extend(summary.records);
        }
    }
    let mut sink = open_sink(&args.run.out)?;
    harness::emit_report(&all_records, args.run.format.into(), &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn oracle_command(args: &OracleArgs) -> anyhow::Result<()> {
    let instance = match args.source.resolve()? {
        InstanceSource::File(path) => instance::load_instance(&path)?,
        InstanceSource::Generated { config, seed } => instance::generate_synthetic(&config, seed)?,
        InstanceSource::Inline(inst) => inst,
    };
    let oracle = UtilityOracle::from_instance(&instance)?;
    let pm = PMatroid::from_instance(&instance)?;

    let mut ground = instance.ground_set();
    if let Some(list) = &args.delete {
        for part in list.split(',').filter(|part| !part.is_empty()) {
            let id: u32 = part.trim().parse().context("bad item id in --delete")?;
            ground.remove(&ItemId(id));
        }
    }
    let (best, value) = brute_force_opt(&oracle, &pm, &ground)?;
    let ids: Vec<String> = best.iter().map(|id| id.to_string()).collect();
    println!("optimum = {{{}}}", ids.join(", "));
    println!("value   = {value}");
    Ok(())
}

fn validate_command(path: &PathBuf) -> anyhow::Result<()> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let inst = instance::Instance::from_json(&text)?;
    let report = instance::validate_instance(&inst);
    if report.is_empty() {
        let ground: ItemSet = inst.ground_set();
        println!(
            "ok: {} items, {} matroid(s), function kind `{}`, {} distinct ids",
            inst.n(),
            inst.p(),
            inst.function.kind_name(),
            ground.len()
        );
        Ok(())
    } else {
        eprint!("{report}");
        eprintln!("{} validation issue(s) found", report.issues().len());
        std::process::exit(1);
    }
}
