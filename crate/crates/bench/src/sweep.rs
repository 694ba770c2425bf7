//! Parameter sweeps built on [`run_experiment`].

use std::io;

use log::info;
use masked_spgemm::multiply::masked_multiply_auto;
use masked_spgemm::sparse::{generate, GeneratorSpec};
use masked_spgemm::{arithmetic_semiring, CsrMatrix, MultiplyPlan};

use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentReport, InputSource, DEFAULT_TRIALS};
use crate::profile::plan_rank;
use crate::record::{Benchmark, ExperimentRecord, ResumeSet};

/// Powers of two from `lo` to `hi` inclusive.
pub fn geometric(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|e| f64::from(1u32 << e)).collect()
}

/// Winner grid over Erdős–Rényi inputs of varying size, input degree and
/// mask degree.
#[derive(Debug, Clone)]
pub struct DensitySweep {
    pub scales: Vec<u32>,
    pub input_degrees: Vec<f64>,
    pub mask_degrees: Vec<f64>,
    pub plans: Vec<MultiplyPlan>,
    pub trials: usize,
    pub threads: usize,
    pub seed: u64,
}

impl Default for DensitySweep {
    fn default() -> Self {
        DensitySweep {
            scales: (12..=22).step_by(2).collect(),
            input_degrees: geometric(1, 8),
            mask_degrees: geometric(1, 8),
            plans: MultiplyPlan::all().collect(),
            trials: DEFAULT_TRIALS,
            threads: 0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCell {
    pub scale: u32,
    pub degree: f64,
    pub mask_degree: f64,
    pub winner: String,
    pub seconds: f64,
}

fn cell_input(scale: u32, degree: f64, seed: u64) -> String {
    format!("er-s{scale}-d{degree}-seed{seed}")
}

/// Times every plan on `M ⊙ (A·B)` with independent Erdős–Rényi `A`, `B`
/// and `M` per cell. All plans are checked against each other before any
/// timing is recorded. Cells and plans already in `previous` are not rerun
/// but still count toward the winner.
pub fn density_sweep(
    cfg: &DensitySweep,
    previous: &[ExperimentRecord],
    sink: &mut dyn FnMut(&ExperimentRecord) -> Result<()>,
) -> Result<Vec<DensityCell>> {
    if cfg.trials == 0 {
        return Err(BenchError::Usage("trials must be at least 1".into()));
    }
    let resume = ResumeSet::from_records(previous);
    let mut cells = Vec::new();
    for &scale in &cfg.scales {
        for &degree in &cfg.input_degrees {
            for &mask_degree in &cfg.mask_degrees {
                let input = cell_input(scale, degree, cfg.seed);
                let mut cell_records: Vec<ExperimentRecord> = previous
                    .iter()
                    .filter(|r| {
                        r.benchmark == Benchmark::Multiply.name()
                            && r.input == input
                            && r.mask_degree == Some(mask_degree)
                            && !r.complemented
                    })
                    .cloned()
                    .collect();

                let mut pending = Vec::new();
                for plan in &cfg.plans {
                    let plan = plan.with_workers(cfg.threads);
                    let record = ExperimentRecord {
                        benchmark: Benchmark::Multiply.name().into(),
                        algorithm: plan.algorithm.name(),
                        phases: plan.phases.name().into(),
                        complemented: false,
                        input: input.clone(),
                        scale: Some(scale),
                        degree: Some(degree),
                        mask_degree: Some(mask_degree),
                        threads: plan.effective_workers(),
                        trial: 0,
                        seconds: f64::INFINITY,
                        flops: 0,
                        metric: 0.0,
                    };
                    if !resume.contains(&record) {
                        pending.push((plan, record));
                    }
                }

                if !pending.is_empty() {
                    info!("density cell scale={scale} degree={degree} mask={mask_degree}");
                    let a = generate(&GeneratorSpec::erdos_renyi(scale, degree, cfg.seed), 1.0)?;
                    let b = generate(&GeneratorSpec::erdos_renyi(scale, degree, cfg.seed.wrapping_add(1)), 1.0)?;
                    let m = generate(&GeneratorSpec::erdos_renyi(scale, mask_degree, cfg.seed.wrapping_add(2)), ())?;
                    let mut reference: Option<(String, CsrMatrix<f64>)> = None;
                    for (plan, record) in &mut pending {
                        for trial in 0..cfg.trials {
                            let out = masked_multiply_auto(m.mask(), &a, &b, plan, arithmetic_semiring())?;
                            if trial == 0 {
                                record.flops = out.stats.generated_flops;
                                match &reference {
                                    None => reference = Some((plan.label(), out.matrix)),
                                    Some((first, c)) => assert!(
                                        *c == out.matrix,
                                        "{} and {first} disagree on {input} with mask degree {mask_degree}",
                                        plan.label()
                                    ),
                                }
                            }
                            if out.stats.seconds() < record.seconds {
                                record.seconds = out.stats.seconds();
                                record.trial = trial;
                            }
                        }
                        record.metric = Benchmark::Multiply.metric(record.flops, record.seconds);
                        sink(record)?;
                        cell_records.push(record.clone());
                    }
                }

                if let Some(best) = cell_records.iter().min_by(|x, y| {
                    x.seconds
                        .total_cmp(&y.seconds)
                        .then(plan_rank(&x.plan_label()).cmp(&plan_rank(&y.plan_label())))
                }) {
                    cells.push(DensityCell {
                        scale,
                        degree,
                        mask_degree,
                        winner: best.plan_label(),
                        seconds: best.seconds,
                    });
                }
            }
        }
    }
    Ok(cells)
}

pub fn write_winner_grid<W: io::Write>(w: W, cells: &[DensityCell]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["scale", "degree", "mask_degree", "winner", "seconds"])?;
    for c in cells {
        out.write_record([
            c.scale.to_string(),
            c.degree.to_string(),
            c.mask_degree.to_string(),
            c.winner.clone(),
            c.seconds.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// One benchmark over R-MAT inputs of increasing scale.
pub fn scale_sweep(
    base: &ExperimentConfig,
    scales: &[u32],
    degree: f64,
    seed: u64,
    resume: &ResumeSet,
    sink: &mut dyn FnMut(&ExperimentRecord) -> Result<()>,
) -> Result<ExperimentReport> {
    let inputs: Vec<InputSource> = scales
        .iter()
        .map(|&s| InputSource::Generated(GeneratorSpec::rmat(s, degree, seed)))
        .collect();
    run_experiment(base, &inputs, resume, sink)
}

/// One benchmark on one input at several worker counts.
pub fn thread_sweep(
    base: &ExperimentConfig,
    input: &InputSource,
    threads: &[usize],
    resume: &ResumeSet,
    sink: &mut dyn FnMut(&ExperimentRecord) -> Result<()>,
) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::default();
    for &t in threads {
        let cfg = ExperimentConfig { threads: t, ..base.clone() };
        report.extend(run_experiment(&cfg, std::slice::from_ref(input), resume, sink)?);
    }
    Ok(report)
}

/// 1, 2, 4, … up to the core count, always ending at the core count.
pub fn default_thread_counts() -> Vec<usize> {
    let max = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut v: Vec<usize> = std::iter::successors(Some(1usize), |&t| Some(t * 2))
        .take_while(|&t| t < max)
        .collect();
    v.push(max);
    v
}
