use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adfg_core::conformance::{measure, rename_sources};
use adfg_core::pipeline::merge_models;
use adfg_core::rename::merge_in_order;
use adfg_core::{
    discover, discover_dfg, evaluate, is_acyclic, model_stats, parse_log, read_grouping, synth, to_dot, write_grouping,
    write_log, ConformanceError, Dfg, EventLog, LogConfig, Manifest, MergeError, MergeMode, MergedModel, Partition,
    PartitionError, PipelineConfig, PipelineError, RenameMap, Timing,
};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "adfg", version, about = "Discover acyclic directly-follows graphs from event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a log, discover a model per sublog and merge them.
    Discover(DiscoverArgs),
    /// Split a log into DFG-acyclic sublogs.
    Partition(PartitionArgs),
    /// Merge two models (model JSON or log CSV files).
    Merge(MergeArgs),
    /// Merge a sequence of models, or the sublogs named by a manifest.
    MergeAll(MergeAllArgs),
    /// Fitness, precision and size of a model against a log.
    Conformance(ConformanceArgs),
    /// Size and cycle statistics of a model.
    Stats(StatsArgs),
    /// Convert a model to DOT or canonical JSON.
    Export(ExportArgs),
    /// Write a seeded synthetic log.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct LogArgs {
    /// Field delimiter of log CSV files.
    #[arg(long, default_value = ",")]
    delimiter: char,
    #[arg(long, default_value = "case_id")]
    case_column: String,
    #[arg(long, default_value = "activity")]
    activity_column: String,
    #[arg(long, default_value = "timestamp")]
    timestamp_column: String,
    /// chrono format of timestamps; common formats are tried when omitted.
    #[arg(long)]
    timestamp_format: Option<String>,
}

impl LogArgs {
    fn config(&self) -> Result<LogConfig> {
        if !self.delimiter.is_ascii() {
            bail!("delimiter must be an ASCII character");
        }
        Ok(LogConfig {
            delimiter: self.delimiter as u8,
            case_column: self.case_column.clone(),
            timestamp_column: self.timestamp_column.clone(),
            activity_column: self.activity_column.clone(),
            timestamp_format: self.timestamp_format.clone(),
        })
    }
}

#[derive(Args)]
struct MergeOptions {
    #[arg(long, value_enum, default_value_t = Strategy::Accurate)]
    strategy: Strategy,
    /// Search nodes explored by the feedback vertex set solver before it
    /// falls back to a greedy choice.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    fvs_budget: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Naive,
    Accurate,
}

impl From<Strategy> for MergeMode {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Naive => MergeMode::Naive,
            Strategy::Accurate => MergeMode::Accurate,
        }
    }
}

#[derive(Args)]
struct TimingArgs {
    /// Outer timing runs.
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
    /// Repetitions of the measured stage per run.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repetitions: u64,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct DiscoverArgs {
    log: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Discover the plain DFG of the whole log instead.
    #[arg(long)]
    standard: bool,
    /// `case_id,group` CSV used instead of the partition heuristic.
    #[arg(long, conflicts_with = "standard")]
    grouping: Option<PathBuf>,
    /// Merge order over sublog indices, e.g. `2,0,1`.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    #[arg(long, default_value_t = 2_000_000)]
    cycle_cap: u64,
    #[command(flatten)]
    merge: MergeOptions,
    #[command(flatten)]
    timing: TimingArgs,
    #[command(flatten)]
    log_args: LogArgs,
}

#[derive(Args)]
struct PartitionArgs {
    log: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    grouping: Option<PathBuf>,
    #[command(flatten)]
    log_args: LogArgs,
}

#[derive(Args)]
struct MergeArgs {
    first: PathBuf,
    second: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    no_dot: bool,
    #[command(flatten)]
    merge: MergeOptions,
    #[command(flatten)]
    log_args: LogArgs,
}

#[derive(Args)]
struct MergeAllArgs {
    /// Model JSON or log CSV files, merged in this order.
    #[arg(required_unless_present = "manifest", conflicts_with = "manifest")]
    models: Vec<PathBuf>,
    /// Partition manifest; its sublogs are cut from `--log`.
    #[arg(long, requires = "log")]
    manifest: Option<PathBuf>,
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    merge: MergeOptions,
    #[command(flatten)]
    log_args: LogArgs,
}

#[derive(Args)]
struct ConformanceArgs {
    model: PathBuf,
    log: PathBuf,
    /// Rename map produced by a merge.
    #[arg(long)]
    rename: Option<PathBuf>,
    /// Manifest assigning each case to a source of the rename map.
    #[arg(long, requires = "rename", conflicts_with = "source")]
    manifest: Option<PathBuf>,
    /// Rename the whole log as this source of the rename map.
    #[arg(long, requires = "rename")]
    source: Option<usize>,
    #[arg(long, default_value_t = 2_000_000)]
    cycle_cap: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    log_args: LogArgs,
}

#[derive(Args)]
struct StatsArgs {
    model: PathBuf,
    #[arg(long, default_value_t = 2_000_000)]
    cycle_cap: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Args)]
struct ExportArgs {
    model: PathBuf,
    #[arg(long, value_enum)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// Traces around one order with swaps and omissions.
    Random,
    /// Groups with conflicting orders, plus a grouping file.
    Conflict,
    /// Two logs from department-like schedules.
    Department,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Kind::Random)]
    kind: Kind,
    #[arg(long, default_value_t = 30)]
    traces: usize,
    #[arg(long, default_value_t = 15)]
    activities: usize,
    #[arg(long, default_value_t = 3)]
    groups: usize,
    /// Activities per department log.
    #[arg(long, default_value_t = 40)]
    nodes: usize,
    #[arg(long)]
    out: PathBuf,
}

/// A result that should never occur, reported with exit code 3.
#[derive(Debug)]
struct Internal(String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "internal error: {}", self.0)
    }
}

impl std::error::Error for Internal {}

fn merge_code(e: &MergeError) -> u8 {
    match e {
        MergeError::CyclicResult => 3,
        MergeError::CyclicInput(_) | MergeError::DuplicateLabels { .. } => 2,
        MergeError::NoModels | MergeError::BadOrder(_) | MergeError::Model(_) => 1,
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Internal>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<MergeError>() {
            return merge_code(e);
        }
        if let Some(e) = cause.downcast_ref::<PipelineError>() {
            return match e {
                PipelineError::Merge(m) => merge_code(m),
                PipelineError::Partition(_) | PipelineError::Conformance(_) | PipelineError::CyclicSublog(_) => 2,
                PipelineError::Model(_) | PipelineError::Grouping(_) => 1,
            };
        }
        if cause.is::<PartitionError>() || cause.is::<ConformanceError>() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Discover(a) => run_discover(a),
        Command::Partition(a) => run_partition(a),
        Command::Merge(a) => run_merge(a),
        Command::MergeAll(a) => run_merge_all(a),
        Command::Conformance(a) => run_conformance(a),
        Command::Stats(a) => run_stats(a),
        Command::Export(a) => run_export(a),
        Command::Generate(a) => run_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &json_bytes(value)?)
}

fn write_csv(path: &Path, log: &EventLog, config: &LogConfig) -> Result<()> {
    let mut buf = Vec::new();
    write_log(log, &mut buf, config)?;
    write_atomic(path, &buf)
}

/// Prints to standard output, or writes atomically when `out` is given.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => Ok(std::io::stdout().write_all(bytes)?),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?))
}

fn read_log(path: &Path, config: &LogConfig) -> Result<EventLog> {
    parse_log(open(path)?, config).with_context(|| format!("reading log {}", path.display()))
}

fn read_model(path: &Path) -> Result<Dfg> {
    let text = std::fs::read_to_string(path).with_context(|| format!("opening {}", path.display()))?;
    Dfg::from_json(&text).with_context(|| format!("reading model {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// A model file, or the standard model of a log file.
fn read_model_or_log(path: &Path, config: &LogConfig) -> Result<Dfg> {
    if is_csv(path) {
        Ok(discover_dfg(&read_log(path, config)?)?)
    } else {
        read_model(path)
    }
}

fn write_merged(out: &Path, merged: &MergedModel, dot: bool) -> Result<()> {
    if !is_acyclic(&merged.model) {
        return Err(Internal("merged model is cyclic".into()).into());
    }
    write_atomic(&out.join("model.json"), format!("{}\n", merged.model.to_json()).as_bytes())?;
    write_json(&out.join("rename_map.json"), &merged.rename_map)?;
    write_json(&out.join("merge_steps.json"), &merged.steps)?;
    if dot {
        write_atomic(&out.join("model.dot"), to_dot(&merged.model).as_bytes())?;
    }
    Ok(())
}

fn timing(args: &TimingArgs, f: impl FnMut() -> Result<()>) -> Option<Timing> {
    (!args.no_timing).then(|| {
        let mut f = f;
        measure(args.runs as usize, args.repetitions as usize, || f().is_ok())
    })
}

#[derive(Serialize)]
struct TimingReport {
    full_discovery: Timing,
    #[serde(skip_serializing_if = "Option::is_none")]
    merge_only: Option<Timing>,
}

fn run_discover(a: DiscoverArgs) -> Result<()> {
    let config = a.log_args.config()?;
    let log = read_log(&a.log, &config)?;
    if a.standard {
        let model = discover_dfg(&log)?;
        let mut report = evaluate(&model, &log, None, a.cycle_cap)?;
        report.timing = timing(&a.timing, || discover_dfg(&log).map(drop).map_err(Into::into));
        write_atomic(&a.out.join("model.json"), format!("{}\n", model.to_json()).as_bytes())?;
        write_atomic(&a.out.join("model.dot"), to_dot(&model).as_bytes())?;
        write_json(&a.out.join("rename_map.json"), &RenameMap::identity(0, &model))?;
        write_json(&a.out.join("metrics.json"), &report)?;
        if let Some(t) = report.timing {
            write_json(&a.out.join("timing.json"), &TimingReport { full_discovery: t, merge_only: None })?;
        }
        return Ok(());
    }
    let grouping: Option<HashMap<String, String>> = match &a.grouping {
        Some(p) => Some(read_grouping(open(p)?).with_context(|| format!("reading grouping {}", p.display()))?),
        None => None,
    };
    let pipeline = PipelineConfig { mode: a.merge.strategy.into(), fvs_budget: a.merge.fvs_budget, order: a.order.clone() };
    let d = discover(&log, grouping.as_ref(), &pipeline)?;
    let mut report = evaluate(&d.merged.model, &d.renamed_log, None, a.cycle_cap)?;
    let full = timing(&a.timing, || discover(&log, grouping.as_ref(), &pipeline).map(drop).map_err(Into::into));
    let merge_only = timing(&a.timing, || merge_models(&d.models, &pipeline).map(drop).map_err(Into::into));
    report.timing = full;
    write_merged(&a.out, &d.merged, true)?;
    write_json(&a.out.join("manifest.json"), &d.partition.manifest())?;
    write_csv(&a.out.join("renamed_log.csv"), &d.renamed_log, &config)?;
    write_json(&a.out.join("metrics.json"), &report)?;
    if let Some(t) = full {
        write_json(&a.out.join("timing.json"), &TimingReport { full_discovery: t, merge_only })?;
    }
    Ok(())
}

fn run_partition(a: PartitionArgs) -> Result<()> {
    let config = a.log_args.config()?;
    let log = read_log(&a.log, &config)?;
    let cyclic = log.cyclic_cases();
    if !cyclic.is_empty() {
        return Err(PartitionError::CyclicLog(cyclic).into());
    }
    let partition = match &a.grouping {
        Some(p) => Partition::from_grouping(&log, &read_grouping(open(p)?)?).map_err(|e| anyhow!(e))?,
        None => adfg_core::partition_log(&log)?,
    };
    for (i, s) in partition.sublogs.iter().enumerate() {
        write_csv(&a.out.join(format!("sublog_{i}.csv")), s, &config)?;
    }
    write_json(&a.out.join("manifest.json"), &partition.manifest())
}

fn run_merge(a: MergeArgs) -> Result<()> {
    let config = a.log_args.config()?;
    let m1 = read_model_or_log(&a.first, &config)?;
    let m2 = read_model_or_log(&a.second, &config)?;
    let merged = adfg_core::merge_with_duplicates(&m1, &m2, a.merge.strategy.into(), a.merge.fvs_budget)?;
    write_merged(&a.out, &merged, !a.no_dot)
}

fn run_merge_all(a: MergeAllArgs) -> Result<()> {
    let config = a.log_args.config()?;
    let models: Vec<Dfg> = match (&a.manifest, &a.log) {
        (Some(m), Some(l)) => {
            let manifest: Manifest = read_json(m)?;
            let log = read_log(l, &config)?;
            let partition = Partition::from_manifest(&log, &manifest).map_err(|e| anyhow!(e))?;
            partition.sublogs.iter().map(discover_dfg).collect::<Result<_, _>>()?
        }
        _ => a.models.iter().map(|p| read_model_or_log(p, &config)).collect::<Result<_>>()?,
    };
    let order = a.order.clone().unwrap_or_else(|| (0..models.len()).collect());
    let merged = merge_in_order(&models, &order, a.merge.strategy.into(), a.merge.fvs_budget)?;
    write_merged(&a.out, &merged, true)
}

fn run_conformance(a: ConformanceArgs) -> Result<()> {
    let config = a.log_args.config()?;
    let model = read_model(&a.model)?;
    let log = read_log(&a.log, &config)?;
    let renamed = match &a.rename {
        None => log,
        Some(r) => {
            let map: RenameMap = read_json(r)?;
            match (&a.manifest, a.source) {
                (Some(m), _) => {
                    let manifest: Manifest = read_json(m)?;
                    let partition = Partition::from_manifest(&log, &manifest).map_err(|e| anyhow!(e))?;
                    let indexed: Vec<usize> = manifest.0.keys().copied().collect();
                    if indexed.iter().enumerate().any(|(i, &k)| i != k) {
                        bail!("manifest indices must be 0..{}", indexed.len());
                    }
                    rename_sources(&partition.sublogs, &map, &model)?
                }
                (None, source) => {
                    let source = match source {
                        Some(s) => s,
                        None if map.0.len() == 1 => *map.0.keys().next().expect("one source"),
                        None => bail!("the rename map has {} sources; pass --source or --manifest", map.0.len()),
                    };
                    let labels: &BTreeMap<String, String> = map.source(source).ok_or(ConformanceError::MissingSource(source))?;
                    adfg_core::rename_log(&log, labels, &model)?
                }
            }
        }
    };
    let report = evaluate(&model, &renamed, None, a.cycle_cap)?;
    emit(a.out.as_deref(), &json_bytes(&report)?)
}

fn run_stats(a: StatsArgs) -> Result<()> {
    let model = read_model(&a.model)?;
    emit(None, &json_bytes(&model_stats(&model, a.cycle_cap))?)
}

fn run_export(a: ExportArgs) -> Result<()> {
    let model = read_model(&a.model)?;
    let text = match a.format {
        Format::Dot => to_dot(&model),
        Format::Json => format!("{}\n", model.to_json()),
    };
    emit(a.out.as_deref(), text.as_bytes())
}

fn run_generate(a: GenerateArgs) -> Result<()> {
    let config = LogConfig::default();
    let mut rng = synth::rng(a.seed);
    match a.kind {
        Kind::Random => {
            let log = synth::random_acyclic_log(&mut rng, a.traces, a.activities);
            write_csv(&a.out.join("log.csv"), &log, &config)
        }
        Kind::Conflict => {
            let (log, grouping) = synth::conflict_log(&mut rng, a.groups);
            write_csv(&a.out.join("log.csv"), &log, &config)?;
            let mut buf = Vec::new();
            write_grouping(&grouping, &mut buf)?;
            write_atomic(&a.out.join("grouping.csv"), &buf)
        }
        Kind::Department => {
            let (l1, l2) = synth::department_logs(&mut rng, a.nodes);
            write_csv(&a.out.join("m1.csv"), &l1, &config)?;
            write_csv(&a.out.join("m2.csv"), &l2, &config)
        }
    }
}
