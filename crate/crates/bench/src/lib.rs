//! Benchmark harness for masked SpGEMM: experiment runner, parameter
//! sweeps, performance profiles, a memory-traffic cost model and the
//! `mspgemm` command line.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod profile;
pub mod record;
pub mod sweep;
pub mod traffic;

pub use error::{BenchError, Result};
pub use experiment::{
    run_experiment, ExperimentConfig, ExperimentReport, InputSource, Measurement, SemiringChoice, Skipped,
    Summary, DEFAULT_TRIALS,
};
pub use profile::{performance_profile, PerformanceProfile};
pub use record::{Benchmark, ExperimentRecord, RecordWriter, ResumeSet, CSV_HEADER};
pub use sweep::{density_sweep, scale_sweep, thread_sweep, DensityCell, DensitySweep};
pub use traffic::{traffic_estimate, TrafficInputs, TrafficKind};
