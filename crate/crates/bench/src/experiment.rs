//! Runs benchmark cells: every plan on every input, `trials` times each,
//! keeping the fastest trial.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use log::{info, warn};
use masked_spgemm::kernels::{betweenness_centrality, k_truss, triangle_count, BcConfig, DEFAULT_K};
use masked_spgemm::multiply::masked_multiply_auto;
use masked_spgemm::sparse::{generate, read_matrix_market, simple_graph, GeneratorSpec, GraphKind};
use masked_spgemm::{arithmetic_semiring, plus_pair_semiring, CsrMatrix, MultiplyPlan};

use crate::error::{BenchError, Result};
use crate::record::{Benchmark, ExperimentRecord, ResumeSet};

pub const DEFAULT_TRIALS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SemiringChoice {
    #[default]
    Arithmetic,
    PlusPair,
}

impl FromStr for SemiringChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "arithmetic" | "plus-times" => Ok(SemiringChoice::Arithmetic),
            "plus-pair" => Ok(SemiringChoice::PlusPair),
            other => Err(format!("unknown semiring {other:?} (expected arithmetic or plus-pair)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    File(PathBuf),
    Generated(GeneratorSpec),
}

impl InputSource {
    pub fn descriptor(&self) -> String {
        match self {
            InputSource::File(p) => p.display().to_string(),
            InputSource::Generated(g) => {
                let kind = match g.kind {
                    GraphKind::ErdosRenyi => "er",
                    GraphKind::Rmat => "rmat",
                };
                format!("{kind}-s{}-d{}-seed{}", g.scale, g.avg_degree, g.seed)
            }
        }
    }

    pub fn scale(&self) -> Option<u32> {
        match self {
            InputSource::Generated(g) => Some(g.scale),
            InputSource::File(_) => None,
        }
    }

    pub fn degree(&self) -> Option<f64> {
        match self {
            InputSource::Generated(g) => Some(g.avg_degree),
            InputSource::File(_) => None,
        }
    }

    pub fn load(&self) -> Result<CsrMatrix<f64>> {
        Ok(match self {
            InputSource::File(p) => read_matrix_market(p)?,
            InputSource::Generated(g) => generate(g, 1.0)?,
        })
    }
}

impl fmt::Display for InputSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub benchmark: Benchmark,
    pub plans: Vec<MultiplyPlan>,
    pub trials: usize,
    /// Worker threads; 0 means all cores.
    pub threads: usize,
    /// Multiply only: complement the mask.
    pub complemented: bool,
    /// Multiply only: draw the mask as an Erdős–Rényi pattern of this degree
    /// instead of using the input's own pattern. Generated inputs only.
    pub mask_degree: Option<f64>,
    pub semiring: SemiringChoice,
    pub k: usize,
    pub bc: BcConfig,
}

impl ExperimentConfig {
    pub fn new(benchmark: Benchmark) -> Self {
        ExperimentConfig {
            benchmark,
            plans: MultiplyPlan::all().collect(),
            trials: DEFAULT_TRIALS,
            threads: 0,
            complemented: false,
            mask_degree: None,
            semiring: SemiringChoice::Arithmetic,
            k: DEFAULT_K,
            bc: BcConfig::default(),
        }
    }
}

/// Plan-independent result of one run, compared across plans.
#[derive(Debug, Clone, PartialEq)]
pub enum Summary {
    Product { nnz: usize, values: Vec<f64> },
    Triangles(u64),
    Truss { edges: usize, iterations: usize },
    Centrality(Vec<f64>),
}

impl Summary {
    fn agrees_with(&self, other: &Summary) -> bool {
        // floating-point sums may be associated differently per algorithm
        fn close(a: &[f64], b: &[f64]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0))
        }
        match (self, other) {
            (Summary::Centrality(a), Summary::Centrality(b)) => close(a, b),
            (Summary::Product { nnz: n1, values: a }, Summary::Product { nnz: n2, values: b }) => {
                n1 == n2 && close(a, b)
            }
            _ => self == other,
        }
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Summary::Product { nnz, .. } => write!(f, "nnz: {nnz}"),
            Summary::Triangles(t) => write!(f, "triangles: {t}"),
            Summary::Truss { edges, iterations } => write!(f, "edges: {edges} iterations: {iterations}"),
            Summary::Centrality(s) => {
                let max = s.iter().copied().fold(0.0, f64::max);
                write!(f, "vertices: {} max score: {max}", s.len())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Measurement {
    pub record: ExperimentRecord,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub plan: String,
    pub input: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub measurements: Vec<Measurement>,
    pub skipped: Vec<Skipped>,
    /// Cells found in the resume set and not rerun.
    pub resumed: usize,
}

impl ExperimentReport {
    pub fn records(&self) -> impl Iterator<Item = &ExperimentRecord> {
        self.measurements.iter().map(|m| &m.record)
    }

    pub fn extend(&mut self, other: ExperimentReport) {
        self.measurements.extend(other.measurements);
        self.skipped.extend(other.skipped);
        self.resumed += other.resumed;
    }
}

enum Prepared {
    Product {
        a: CsrMatrix<f64>,
        b: CsrMatrix<f64>,
        mask: CsrMatrix<()>,
    },
    Graph(CsrMatrix<f64>),
}

fn prepare(cfg: &ExperimentConfig, input: &InputSource) -> Result<Prepared> {
    match cfg.benchmark {
        Benchmark::Multiply => {
            let a = input.load()?;
            let (b, mask) = match input {
                InputSource::Generated(g) => {
                    let b = generate(&GeneratorSpec { seed: g.seed.wrapping_add(1), ..*g }, 1.0)?;
                    let mask = match cfg.mask_degree {
                        Some(d) => generate(&GeneratorSpec::erdos_renyi(g.scale, d, g.seed.wrapping_add(2)), ())?,
                        None => a.pattern(),
                    };
                    (b, mask)
                }
                InputSource::File(_) => {
                    if cfg.mask_degree.is_some() {
                        return Err(BenchError::Usage("a mask degree needs a generated input".into()));
                    }
                    let mask = a.pattern();
                    (a.clone(), mask)
                }
            };
            Ok(Prepared::Product { a, b, mask })
        }
        _ => Ok(Prepared::Graph(simple_graph(&input.load()?, 1.0)?)),
    }
}

/// Reason a plan cannot run this benchmark, if any.
pub fn unsupported(cfg: &ExperimentConfig, plan: &MultiplyPlan) -> Option<String> {
    let complemented = match cfg.benchmark {
        Benchmark::Multiply => cfg.complemented,
        Benchmark::Bc => true,
        Benchmark::Tricount | Benchmark::Ktruss => false,
    };
    plan.check(complemented).err().map(|e| match cfg.benchmark {
        Benchmark::Bc => format!("betweenness centrality needs complemented masks: {e}"),
        _ => e.to_string(),
    })
}

/// One run: (seconds inside masked multiplies, work count, summary).
fn run_once(cfg: &ExperimentConfig, input: &Prepared, plan: &MultiplyPlan) -> Result<(f64, u64, Summary)> {
    match (cfg.benchmark, input) {
        (Benchmark::Multiply, Prepared::Product { a, b, mask }) => {
            let view = mask.mask().with_complement(cfg.complemented);
            let out = match cfg.semiring {
                SemiringChoice::Arithmetic => masked_multiply_auto(view, a, b, plan, arithmetic_semiring())?,
                SemiringChoice::PlusPair => masked_multiply_auto(view, a, b, plan, plus_pair_semiring())?,
            };
            let summary = Summary::Product {
                nnz: out.matrix.nnz(),
                values: out.matrix.values().to_vec(),
            };
            Ok((out.stats.seconds(), out.stats.generated_flops, summary))
        }
        (Benchmark::Tricount, Prepared::Graph(g)) => {
            let t = triangle_count(g, plan)?;
            Ok((t.trace.total_seconds(), t.trace.total_flops(), Summary::Triangles(t.triangles)))
        }
        (Benchmark::Ktruss, Prepared::Graph(g)) => {
            let t = k_truss(g, cfg.k, plan)?;
            let summary = Summary::Truss {
                edges: t.graph.nnz() / 2,
                iterations: t.iterations,
            };
            Ok((t.trace.total_seconds(), t.trace.total_flops(), summary))
        }
        (Benchmark::Bc, Prepared::Graph(g)) => {
            let bc = betweenness_centrality(g, &cfg.bc, plan)?;
            let work = bc.sources as u64 * bc.edges as u64;
            Ok((bc.trace.total_seconds(), work, Summary::Centrality(bc.scores)))
        }
        _ => unreachable!("input prepared for another benchmark"),
    }
}

/// Runs every plan of `cfg` on every input. Unsupported combinations are
/// skipped and logged; cells present in `resume` are not rerun. Each new
/// record is handed to `sink` as soon as it is measured.
///
/// Panics if two plans disagree on a result.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    inputs: &[InputSource],
    resume: &ResumeSet,
    sink: &mut dyn FnMut(&ExperimentRecord) -> Result<()>,
) -> Result<ExperimentReport> {
    if cfg.trials == 0 {
        return Err(BenchError::Usage("trials must be at least 1".into()));
    }
    let mut report = ExperimentReport::default();
    for input in inputs {
        let descriptor = input.descriptor();
        let mut prepared = None;
        let mut reference: Option<(String, Summary)> = None;
        for plan in &cfg.plans {
            let plan = plan.with_workers(cfg.threads);
            let label = plan.label();
            if let Some(reason) = unsupported(cfg, &plan) {
                warn!("skipping {label} on {descriptor}: {reason}");
                report.skipped.push(Skipped {
                    plan: label,
                    input: descriptor.clone(),
                    reason,
                });
                continue;
            }
            let mut record = ExperimentRecord {
                benchmark: cfg.benchmark.name().into(),
                algorithm: plan.algorithm.name(),
                phases: plan.phases.name().into(),
                complemented: cfg.benchmark == Benchmark::Multiply && cfg.complemented,
                input: descriptor.clone(),
                scale: input.scale(),
                degree: input.degree(),
                mask_degree: if cfg.benchmark == Benchmark::Multiply { cfg.mask_degree } else { None },
                threads: plan.effective_workers(),
                trial: 0,
                seconds: f64::INFINITY,
                flops: 0,
                metric: 0.0,
            };
            if resume.contains(&record) {
                info!("{label} on {descriptor} already recorded");
                report.resumed += 1;
                continue;
            }
            if prepared.is_none() {
                prepared = Some(prepare(cfg, input)?);
            }
            let data = prepared.as_ref().unwrap();

            let mut summary = None;
            for trial in 0..cfg.trials {
                let (seconds, work, s) = run_once(cfg, data, &plan)?;
                if seconds < record.seconds {
                    record.seconds = seconds;
                    record.trial = trial;
                }
                if trial == 0 {
                    record.flops = work;
                    summary = Some(s);
                } else {
                    assert_eq!(record.flops, work, "{label}: work count changed between trials");
                }
            }
            let summary = summary.unwrap();
            record.metric = cfg.benchmark.metric(record.flops, record.seconds);
            match &reference {
                None => reference = Some((label.clone(), summary.clone())),
                Some((first, expected)) => assert!(
                    expected.agrees_with(&summary),
                    "{label} and {first} disagree on {descriptor}: {summary} vs {expected}"
                ),
            }
            sink(&record)?;
            report.measurements.push(Measurement { record, summary });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use masked_spgemm::Algorithm;

    fn k4_file() -> (tempfile::TempPath, InputSource) {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "%%MatrixMarket matrix coordinate pattern symmetric").unwrap();
        writeln!(f, "4 4 6").unwrap();
        for (i, j) in [(2, 1), (3, 1), (4, 1), (3, 2), (4, 2), (4, 3)] {
            writeln!(f, "{i} {j}").unwrap();
        }
        let path = f.into_temp_path();
        let src = InputSource::File(path.to_path_buf());
        (path, src)
    }

    fn no_sink(_: &ExperimentRecord) -> Result<()> {
        Ok(())
    }

    #[test]
    fn tricount_k4_under_every_algorithm() {
        let (_keep, k4) = k4_file();
        let mut cfg = ExperimentConfig::new(Benchmark::Tricount);
        cfg.plans = Algorithm::ALL.iter().map(|&a| MultiplyPlan::new(a, masked_spgemm::Phases::One)).collect();
        cfg.trials = 2;
        cfg.threads = 1;
        let report = run_experiment(&cfg, &[k4], &ResumeSet::default(), &mut no_sink).unwrap();
        assert_eq!(report.measurements.len(), 6);
        for m in &report.measurements {
            assert_eq!(m.summary, Summary::Triangles(4));
            assert_eq!(m.record.recomputed_metric(), Some(m.record.metric));
            assert!(m.record.trial < 2);
        }
    }

    #[test]
    fn bc_skips_inner_and_mca() {
        let mut cfg = ExperimentConfig::new(Benchmark::Bc);
        cfg.trials = 1;
        cfg.threads = 1;
        cfg.bc.batch_size = 16;
        let input = InputSource::Generated(GeneratorSpec::rmat(5, 4.0, 3));
        let report = run_experiment(&cfg, &[input], &ResumeSet::default(), &mut no_sink).unwrap();
        assert_eq!(report.measurements.len(), 8);
        let skipped: Vec<_> = report.skipped.iter().map(|s| s.plan.as_str()).collect();
        assert_eq!(skipped, ["MCA-1P", "MCA-2P", "INNER-1P", "INNER-2P"]);
        assert!(report.skipped.iter().all(|s| s.reason.contains("complemented")));
    }

    #[test]
    fn same_seed_same_flops() {
        let mut cfg = ExperimentConfig::new(Benchmark::Multiply);
        cfg.trials = 1;
        cfg.threads = 1;
        cfg.mask_degree = Some(4.0);
        let input = InputSource::Generated(GeneratorSpec::erdos_renyi(7, 8.0, 9));
        let a = run_experiment(&cfg, &[input.clone()], &ResumeSet::default(), &mut no_sink).unwrap();
        let b = run_experiment(&cfg, &[input], &ResumeSet::default(), &mut no_sink).unwrap();
        let fa: Vec<u64> = a.records().map(|r| r.flops).collect();
        let fb: Vec<u64> = b.records().map(|r| r.flops).collect();
        assert_eq!(fa, fb);
        assert!(fa.iter().all(|&f| f > 0));
    }

    #[test]
    fn resume_skips_recorded_cells() {
        let mut cfg = ExperimentConfig::new(Benchmark::Ktruss);
        cfg.trials = 1;
        cfg.threads = 1;
        cfg.k = 4;
        let input = InputSource::Generated(GeneratorSpec::rmat(6, 8.0, 1));
        let mut seen = Vec::new();
        let first = run_experiment(&cfg, &[input.clone()], &ResumeSet::default(), &mut |r| {
            seen.push(r.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 12);
        let resume = ResumeSet::from_records(first.records());
        let again = run_experiment(&cfg, &[input], &resume, &mut no_sink).unwrap();
        assert_eq!(again.measurements.len(), 0);
        assert_eq!(again.resumed, 12);
    }

    #[test]
    fn complemented_multiply_skips_pull_and_compressed() {
        let mut cfg = ExperimentConfig::new(Benchmark::Multiply);
        cfg.trials = 1;
        cfg.threads = 1;
        cfg.complemented = true;
        let input = InputSource::Generated(GeneratorSpec::erdos_renyi(6, 4.0, 2));
        let report = run_experiment(&cfg, &[input], &ResumeSet::default(), &mut no_sink).unwrap();
        assert_eq!(report.skipped.len(), 4);
        assert!(report.records().all(|r| r.complemented));
    }
}
