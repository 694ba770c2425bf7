//! `mspgemm` command line.
//!
//! Exit status: 0 on success, 1 for usage errors, 2 for unreadable or
//! invalid input, 3 when an internal consistency check fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use log::warn;
use masked_spgemm::kernels::{Sources, DEFAULT_BATCH_SIZE, DEFAULT_K};
use masked_spgemm::multiply::flops;
use masked_spgemm::sparse::{generate, simple_graph, write_matrix_market_pattern, GeneratorSpec};
use masked_spgemm::{Algorithm, MultiplyPlan, Phases};

use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentReport, InputSource, SemiringChoice, DEFAULT_TRIALS};
use crate::profile::performance_profile;
use crate::record::{read_records_file, Benchmark, ExperimentRecord, RecordWriter, ResumeSet};
use crate::sweep::{default_thread_counts, density_sweep, geometric, scale_sweep, thread_sweep, write_winner_grid, DensitySweep};
use crate::traffic::{traffic_estimate, TrafficInputs, TrafficKind};

/// Words per 64-byte cache line of 8-byte words.
const LINE_WORDS: u64 = 8;

#[derive(Debug, Parser)]
#[command(name = "mspgemm", version, about = "Masked sparse matrix multiplication benchmarks")]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated matrix as a Matrix Market pattern file.
    Gen(GenArgs),
    /// Time one masked multiply per plan.
    Multiply(MultiplyArgs),
    /// Count triangles.
    Tricount(KernelArgs),
    /// Compute the k-truss.
    Ktruss(KtrussArgs),
    /// Betweenness centrality.
    Bc(BcArgs),
    /// Best plan per (scale, input degree, mask degree) cell.
    SweepDensity(DensityArgs),
    /// One benchmark over increasing R-MAT scales.
    SweepScale(ScaleArgs),
    /// One benchmark at several worker counts.
    SweepThreads(ThreadArgs),
    /// Performance profile table from a results CSV.
    Profile(ProfileArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphKindArg {
    Er,
    Rmat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BenchmarkArg {
    Multiply,
    Tricount,
    Ktruss,
    Bc,
}

impl From<BenchmarkArg> for Benchmark {
    fn from(b: BenchmarkArg) -> Self {
        match b {
            BenchmarkArg::Multiply => Benchmark::Multiply,
            BenchmarkArg::Tricount => Benchmark::Tricount,
            BenchmarkArg::Ktruss => Benchmark::Ktruss,
            BenchmarkArg::Bc => Benchmark::Bc,
        }
    }
}

fn spec_for(kind: GraphKindArg, scale: u32, degree: f64, seed: u64) -> GeneratorSpec {
    match kind {
        GraphKindArg::Er => GeneratorSpec::erdos_renyi(scale, degree, seed),
        GraphKindArg::Rmat => GeneratorSpec::rmat(scale, degree, seed),
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output path.
    pub output: PathBuf,
    #[arg(long = "gen", value_enum, default_value_t = GraphKindArg::Rmat)]
    pub kind: GraphKindArg,
    #[arg(long, default_value_t = 10)]
    pub scale: u32,
    #[arg(long, default_value_t = 16.0)]
    pub degree: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Symmetrize and drop self-loops.
    #[arg(long)]
    pub simple: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Matrix Market file. Without one a graph is generated.
    #[arg(conflicts_with_all = ["kind", "scale", "degree"])]
    pub input: Option<PathBuf>,
    #[arg(long = "gen", value_enum, default_value_t = GraphKindArg::Rmat)]
    pub kind: GraphKindArg,
    #[arg(long, default_value_t = 10)]
    pub scale: u32,
    #[arg(long, default_value_t = 16.0)]
    pub degree: f64,
    /// Generator seed (also seeds random BC sources).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl InputArgs {
    fn source(&self) -> InputSource {
        match &self.input {
            Some(p) => InputSource::File(p.clone()),
            None => InputSource::Generated(spec_for(self.kind, self.scale, self.degree, self.seed)),
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Algorithms, comma separated: msa, hash, mca, heap, heapdot, inner
    /// or heapN. Default: all six.
    #[arg(long, value_delimiter = ',')]
    pub algo: Vec<Algorithm>,
    /// Phase modes, comma separated: 1p, 2p. Default: both.
    #[arg(long, value_delimiter = ',')]
    pub phases: Vec<Phases>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    /// Rows per scheduling step.
    #[arg(long, default_value_t = masked_spgemm::multiply::DEFAULT_GRAIN)]
    pub grain: usize,
    /// Append records to this CSV; cells already in it are skipped.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Request pinned worker threads (hint only).
    #[arg(long)]
    pub pin: bool,
}

impl PlanArgs {
    fn plans(&self) -> Vec<MultiplyPlan> {
        let algos: &[Algorithm] = if self.algo.is_empty() { &Algorithm::ALL } else { &self.algo };
        let phases: &[Phases] = if self.phases.is_empty() { &Phases::ALL } else { &self.phases };
        algos
            .iter()
            .flat_map(|&a| phases.iter().map(move |&p| MultiplyPlan::new(a, p).with_grain(self.grain)))
            .collect()
    }
}

#[derive(Debug, Args)]
pub struct MultiplyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Keep only positions absent from the mask.
    #[arg(long)]
    pub complemented: bool,
    /// arithmetic or plus-pair.
    #[arg(long, default_value = "arithmetic")]
    pub semiring: SemiringChoice,
    /// Draw an Erdős–Rényi mask of this degree (generated inputs only).
    /// Default: the input's own pattern.
    #[arg(long, conflicts_with = "input")]
    pub mask_degree: Option<f64>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct KtrussArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct BcOptions {
    /// Sources per batch.
    #[arg(long, default_value_t = DEFAULT_BATCH_SIZE)]
    pub batch: usize,
    /// Number of random sources. Default: every vertex.
    #[arg(long)]
    pub sources: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BcArgs {
    #[command(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    pub bc: BcOptions,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [12u32, 14, 16, 18, 20, 22])]
    pub scales: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = geometric(1, 8))]
    pub degrees: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = geometric(1, 8))]
    pub mask_degrees: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Winner grid CSV. Default: standard output.
    #[arg(long)]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScaleArgs {
    #[arg(long, value_enum, default_value_t = BenchmarkArg::Tricount)]
    pub bench: BenchmarkArg,
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, value_delimiter = ',', default_values_t = (8u32..=20).collect::<Vec<_>>())]
    pub scales: Vec<u32>,
    #[arg(long, default_value_t = 16.0)]
    pub degree: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[command(flatten)]
    pub bc: BcOptions,
}

#[derive(Debug, Args)]
pub struct ThreadArgs {
    #[arg(long, value_enum, default_value_t = BenchmarkArg::Tricount)]
    pub bench: BenchmarkArg,
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Worker counts, comma separated. Default: powers of two up to the
    /// core count.
    #[arg(long, value_delimiter = ',')]
    pub threads: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub scale: u32,
    #[arg(long, default_value_t = 16.0)]
    pub degree: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[command(flatten)]
    pub bc: BcOptions,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Results CSV.
    pub csv: PathBuf,
    /// Only records of this benchmark.
    #[arg(long, value_enum)]
    pub bench: Option<BenchmarkArg>,
    /// Slowdown factors to tabulate.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.25, 1.5, 2.0, 4.0, 8.0, 16.0, f64::INFINITY])]
    pub x: Vec<f64>,
}

/// Parses `args`, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();

    let stdout = io::stdout();
    match panic::catch_unwind(AssertUnwindSafe(|| execute(cli.command, &mut stdout.lock()))) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => 3,
    }
}

/// Runs one command, writing its report to `out`.
pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen(a) => gen(a, out),
        Command::Multiply(a) => multiply(a, out),
        Command::Tricount(a) => {
            let cfg = kernel_config(Benchmark::Tricount, &a);
            single(cfg, &a.input, &a.plan, out)
        }
        Command::Ktruss(a) => {
            let mut cfg = kernel_config(Benchmark::Ktruss, &a.kernel);
            cfg.k = a.k;
            single(cfg, &a.kernel.input, &a.kernel.plan, out)
        }
        Command::Bc(a) => {
            let mut cfg = kernel_config(Benchmark::Bc, &a.kernel);
            apply_bc(&mut cfg, &a.bc, a.kernel.input.seed);
            single(cfg, &a.kernel.input, &a.kernel.plan, out)
        }
        Command::SweepDensity(a) => sweep_density(a, out),
        Command::SweepScale(a) => sweep_scale(a, out),
        Command::SweepThreads(a) => sweep_threads(a, out),
        Command::Profile(a) => profile(a, out),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<()> {
    let m = generate(&spec_for(a.kind, a.scale, a.degree, a.seed), ())?;
    let m = if a.simple { simple_graph(&m, ())? } else { m };
    write_matrix_market_pattern(BufWriter::new(File::create(&a.output)?), &m)?;
    writeln!(out, "wrote {}: {}x{} with {} entries", a.output.display(), m.nrows(), m.ncols(), m.nnz())?;
    Ok(())
}

fn kernel_config(benchmark: Benchmark, a: &KernelArgs) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(benchmark);
    cfg.plans = a.plan.plans();
    cfg.trials = a.plan.trials;
    cfg.threads = a.threads;
    cfg
}

fn apply_bc(cfg: &mut ExperimentConfig, bc: &BcOptions, seed: u64) {
    cfg.bc.batch_size = bc.batch;
    if let Some(count) = bc.sources {
        cfg.bc.sources = Sources::Random { count, seed };
    }
}

/// CSV sink plus the cells it already holds.
struct CsvSink {
    writer: Option<RecordWriter<File>>,
    previous: Vec<ExperimentRecord>,
}

impl CsvSink {
    fn open(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(CsvSink { writer: None, previous: Vec::new() });
        };
        let previous = match std::fs::metadata(path) {
            Ok(m) if m.len() > 0 => read_records_file(path)?,
            _ => Vec::new(),
        };
        Ok(CsvSink { writer: Some(RecordWriter::append(path)?), previous })
    }

    fn resume(&self) -> ResumeSet {
        ResumeSet::from_records(&self.previous)
    }

    fn write(&mut self, r: &ExperimentRecord) -> Result<()> {
        if let Some(w) = &mut self.writer {
            w.write(r)?;
        }
        Ok(())
    }
}

fn pin_hint(plan: &PlanArgs) {
    if plan.pin {
        warn!("thread pinning is not applied by this build; use the OS (e.g. taskset) to bind workers");
    }
}

fn single(cfg: ExperimentConfig, input: &InputArgs, plan: &PlanArgs, out: &mut dyn Write) -> Result<()> {
    pin_hint(plan);
    let mut sink = CsvSink::open(plan.csv.as_deref())?;
    let report = run_experiment(&cfg, &[input.source()], &sink.resume(), &mut |r| sink.write(r))?;
    if let Some(m) = report.measurements.first() {
        writeln!(out, "{}", m.summary)?;
    }
    print_report(&report, out)
}

fn print_report(report: &ExperimentReport, out: &mut dyn Write) -> Result<()> {
    for m in &report.measurements {
        let r = &m.record;
        let unit = r.benchmark_kind().map_or("metric", |b| b.metric_name());
        writeln!(
            out,
            "{:<12} input={} threads={} seconds={:.6} flops={} {unit}={:.4}",
            r.plan_label(),
            r.input,
            r.threads,
            r.seconds,
            r.flops,
            r.metric
        )?;
    }
    for s in &report.skipped {
        writeln!(out, "{:<12} skipped: {}", s.plan, s.reason)?;
    }
    if report.resumed > 0 {
        writeln!(out, "{} cells already in the CSV were not rerun", report.resumed)?;
    }
    Ok(())
}

fn multiply(a: MultiplyArgs, out: &mut dyn Write) -> Result<()> {
    if a.complemented {
        if let Some(bad) = a.plan.algo.iter().find(|x| !x.supports_complement()) {
            return Err(BenchError::Usage(format!("--algo {bad} cannot be combined with --complemented")));
        }
    }
    let mut cfg = ExperimentConfig::new(Benchmark::Multiply);
    cfg.plans = a.plan.plans();
    if a.complemented {
        cfg.plans.retain(|p| p.algorithm.supports_complement());
    }
    cfg.trials = a.plan.trials;
    cfg.threads = a.threads;
    cfg.complemented = a.complemented;
    cfg.semiring = a.semiring;
    cfg.mask_degree = a.mask_degree;

    if let (Some(path), false) = (&a.input.input, a.complemented) {
        // cost model for A ⊙ (A·A)
        let m = InputSource::File(path.clone()).load()?;
        let t = TrafficInputs {
            nnz_a: m.nnz() as u64,
            nnz_b: m.nnz() as u64,
            nnz_m: m.nnz() as u64,
            n: m.ncols().max(1) as u64,
            line_words: LINE_WORDS,
            flops: flops(&m, &m),
        };
        writeln!(
            out,
            "traffic (words): pull={} push={}",
            traffic_estimate(TrafficKind::Pull, &t),
            traffic_estimate(TrafficKind::Push, &t)
        )?;
    }
    single(cfg, &a.input, &a.plan, out)
}

fn sweep_density(a: DensityArgs, out: &mut dyn Write) -> Result<()> {
    pin_hint(&a.plan);
    let cfg = DensitySweep {
        scales: a.scales,
        input_degrees: a.degrees,
        mask_degrees: a.mask_degrees,
        plans: a.plan.plans(),
        trials: a.plan.trials,
        threads: a.threads,
        seed: a.seed,
    };
    let mut sink = CsvSink::open(a.plan.csv.as_deref())?;
    let previous = std::mem::take(&mut sink.previous);
    let cells = density_sweep(&cfg, &previous, &mut |r| sink.write(r))?;
    match a.grid {
        Some(path) => write_winner_grid(File::create(path)?, &cells)?,
        None => write_winner_grid(out, &cells)?,
    }
    Ok(())
}

fn sweep_config(bench: BenchmarkArg, plan: &PlanArgs, k: usize, bc: &BcOptions, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(bench.into());
    cfg.plans = plan.plans();
    cfg.trials = plan.trials;
    cfg.k = k;
    apply_bc(&mut cfg, bc, seed);
    cfg
}

fn sweep_scale(a: ScaleArgs, out: &mut dyn Write) -> Result<()> {
    pin_hint(&a.plan);
    let mut cfg = sweep_config(a.bench, &a.plan, a.k, &a.bc, a.seed);
    cfg.threads = a.threads;
    let mut sink = CsvSink::open(a.plan.csv.as_deref())?;
    let resume = sink.resume();
    let report = scale_sweep(&cfg, &a.scales, a.degree, a.seed, &resume, &mut |r| sink.write(r))?;
    print_report(&report, out)
}

fn sweep_threads(a: ThreadArgs, out: &mut dyn Write) -> Result<()> {
    pin_hint(&a.plan);
    let cfg = sweep_config(a.bench, &a.plan, a.k, &a.bc, a.seed);
    let threads = if a.threads.is_empty() { default_thread_counts() } else { a.threads };
    if threads.contains(&0) {
        return Err(BenchError::Usage("thread counts must be positive".into()));
    }
    let input = InputSource::Generated(GeneratorSpec::rmat(a.scale, a.degree, a.seed));
    let mut sink = CsvSink::open(a.plan.csv.as_deref())?;
    let resume = sink.resume();
    let report = thread_sweep(&cfg, &input, &threads, &resume, &mut |r| sink.write(r))?;
    print_report(&report, out)
}

fn profile(a: ProfileArgs, out: &mut dyn Write) -> Result<()> {
    let mut records = read_records_file(&a.csv)?;
    if let Some(b) = a.bench {
        let name = Benchmark::from(b).name();
        records.retain(|r| r.benchmark == name);
    }
    if records.is_empty() {
        return Err(BenchError::Usage(format!("no matching records in {}", a.csv.display())));
    }
    let p = performance_profile(&records);
    writeln!(out, "cases: {}", p.cases)?;
    write!(out, "{}", p.table(&a.x))?;
    Ok(())
}
