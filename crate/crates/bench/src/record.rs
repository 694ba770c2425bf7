//! One benchmark measurement per CSV row.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Column order of every CSV the harness writes.
pub const CSV_HEADER: [&str; 13] = [
    "benchmark",
    "algorithm",
    "phases",
    "complemented",
    "input",
    "scale",
    "degree",
    "mask_degree",
    "threads",
    "trial",
    "seconds",
    "flops",
    "metric",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Multiply,
    Tricount,
    Ktruss,
    Bc,
}

impl Benchmark {
    pub const ALL: [Benchmark; 4] = [Benchmark::Multiply, Benchmark::Tricount, Benchmark::Ktruss, Benchmark::Bc];

    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Multiply => "multiply",
            Benchmark::Tricount => "tricount",
            Benchmark::Ktruss => "ktruss",
            Benchmark::Bc => "bc",
        }
    }

    pub fn from_name(s: &str) -> Option<Benchmark> {
        Benchmark::ALL.into_iter().find(|b| b.name() == s)
    }

    /// Rate derived from a work count and a time. For `bc` the work count is
    /// traversed edges (sources × stored edges) and the rate is MTEPS; for
    /// everything else it is multiply flops and the rate is GFLOPS.
    pub fn metric(self, work: u64, seconds: f64) -> f64 {
        match self {
            Benchmark::Bc => work as f64 / seconds / 1e6,
            _ => work as f64 / seconds / 1e9,
        }
    }

    pub fn metric_name(self) -> &'static str {
        match self {
            Benchmark::Bc => "MTEPS",
            _ => "GFLOPS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub benchmark: String,
    pub algorithm: String,
    pub phases: String,
    pub complemented: bool,
    pub input: String,
    pub scale: Option<u32>,
    pub degree: Option<f64>,
    pub mask_degree: Option<f64>,
    pub threads: usize,
    /// Index of the reported (fastest) trial.
    pub trial: usize,
    pub seconds: f64,
    /// Work count the metric is derived from.
    pub flops: u64,
    pub metric: f64,
}

impl ExperimentRecord {
    pub fn benchmark_kind(&self) -> Option<Benchmark> {
        Benchmark::from_name(&self.benchmark)
    }

    pub fn recomputed_metric(&self) -> Option<f64> {
        self.benchmark_kind().map(|b| b.metric(self.flops, self.seconds))
    }

    /// `ALGO-PHASES`, e.g. `MSA-1P`.
    pub fn plan_label(&self) -> String {
        format!("{}-{}", self.algorithm, self.phases).to_ascii_uppercase()
    }

    /// Identifies the configuration, ignoring measured fields. Two records
    /// with the same key measure the same cell.
    pub fn key(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{}|{}|{}|{}|{}|{}|{}|{}|{}",
            self.benchmark,
            self.algorithm,
            self.phases,
            self.complemented,
            self.input,
            self.scale.map(|s| s.to_string()).unwrap_or_default(),
            opt(self.degree),
            opt(self.mask_degree),
            self.threads
        )
    }
}

/// Configurations already present in an earlier CSV.
#[derive(Debug, Clone, Default)]
pub struct ResumeSet {
    done: HashSet<String>,
}

impl ResumeSet {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ExperimentRecord>) -> Self {
        ResumeSet {
            done: records.into_iter().map(ExperimentRecord::key).collect(),
        }
    }

    pub fn contains(&self, r: &ExperimentRecord) -> bool {
        self.done.contains(&r.key())
    }

    pub fn insert(&mut self, r: &ExperimentRecord) {
        self.done.insert(r.key());
    }

    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }
}

pub fn read_records<R: io::Read>(reader: R) -> csv::Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(csv::Error::from(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unexpected CSV header: {}", headers.iter().collect::<Vec<_>>().join(",")),
        )));
    }
    rdr.deserialize().collect()
}

pub fn read_records_file(path: impl AsRef<Path>) -> csv::Result<Vec<ExperimentRecord>> {
    read_records(File::open(path)?)
}

/// Writes records with the fixed header. Appending to a non-empty file
/// skips the header.
pub struct RecordWriter<W: io::Write> {
    inner: csv::Writer<W>,
}

impl<W: io::Write> RecordWriter<W> {
    pub fn new(w: W, write_header: bool) -> csv::Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        if write_header {
            inner.write_record(CSV_HEADER)?;
        }
        Ok(RecordWriter { inner })
    }

    pub fn write(&mut self, r: &ExperimentRecord) -> csv::Result<()> {
        self.inner.serialize(r)?;
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.inner.into_inner().map_err(|e| e.into_error()).expect("flush")
    }
}

impl RecordWriter<File> {
    pub fn append(path: impl AsRef<Path>) -> csv::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        let empty = file.metadata()?.len() == 0;
        RecordWriter::new(file, empty)
    }
}
