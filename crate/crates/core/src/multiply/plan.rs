use std::fmt;
use std::str::FromStr;

use crate::accum::NInspect;
use crate::error::{Error, Result};

/// Masked SpGEMM scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Push-based, dense masked sparse accumulator.
    Msa,
    /// Push-based, open-addressing hash accumulator.
    Hash,
    /// Push-based, mask-compressed accumulator.
    Mca,
    /// Push-based multiway merge. `Heap(Limit(1))` is "heap",
    /// `Heap(Unbounded)` is "heapdot".
    Heap(NInspect),
    /// Pull-based: one sparse dot product per mask entry.
    Inner,
}

impl Algorithm {
    pub const HEAP: Algorithm = Algorithm::Heap(NInspect::Limit(1));
    pub const HEAP_DOT: Algorithm = Algorithm::Heap(NInspect::Unbounded);

    /// The six benchmarked schemes.
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Msa,
        Algorithm::Hash,
        Algorithm::Mca,
        Algorithm::HEAP,
        Algorithm::HEAP_DOT,
        Algorithm::Inner,
    ];

    pub fn supports_complement(self) -> bool {
        !matches!(self, Algorithm::Mca | Algorithm::Inner)
    }

    /// Whether `B` must be supplied column-major.
    pub fn pulls(self) -> bool {
        self == Algorithm::Inner
    }

    pub fn name(self) -> String {
        match self {
            Algorithm::Msa => "msa".into(),
            Algorithm::Hash => "hash".into(),
            Algorithm::Mca => "mca".into(),
            Algorithm::Heap(NInspect::Limit(1)) => "heap".into(),
            Algorithm::Heap(NInspect::Unbounded) => "heapdot".into(),
            Algorithm::Heap(NInspect::Limit(n)) => format!("heap{n}"),
            Algorithm::Inner => "inner".into(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase();
        Ok(match s.as_str() {
            "msa" => Algorithm::Msa,
            "hash" => Algorithm::Hash,
            "mca" => Algorithm::Mca,
            "heap" => Algorithm::HEAP,
            "heapdot" => Algorithm::HEAP_DOT,
            "inner" => Algorithm::Inner,
            other => match other.strip_prefix("heap").and_then(|n| n.parse().ok()) {
                Some(n) => Algorithm::Heap(NInspect::Limit(n)),
                None => return Err(Error::InvalidConfig(format!("unknown algorithm {s:?}"))),
            },
        })
    }
}

/// One-phase (bounded temporary buffers, then copy) or two-phase (symbolic
/// count, exact allocation, numeric pass).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phases {
    One,
    Two,
}

impl Phases {
    pub const ALL: [Phases; 2] = [Phases::One, Phases::Two];

    pub fn name(self) -> &'static str {
        match self {
            Phases::One => "1p",
            Phases::Two => "2p",
        }
    }
}

impl fmt::Display for Phases {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Phases {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1p" | "1" | "one" => Ok(Phases::One),
            "2p" | "2" | "two" => Ok(Phases::Two),
            other => Err(Error::InvalidConfig(format!("unknown phase mode {other:?}"))),
        }
    }
}

pub const DEFAULT_GRAIN: usize = 64;

/// How to run one masked multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiplyPlan {
    pub algorithm: Algorithm,
    pub phases: Phases,
    /// Worker threads; 0 means all available cores.
    pub workers: usize,
    /// Rows handed out per scheduling step.
    pub grain: usize,
}

impl MultiplyPlan {
    pub fn new(algorithm: Algorithm, phases: Phases) -> Self {
        MultiplyPlan {
            algorithm,
            phases,
            workers: 1,
            grain: DEFAULT_GRAIN,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        MultiplyPlan { workers, ..self }
    }

    pub fn with_grain(self, grain: usize) -> Self {
        MultiplyPlan { grain, ..self }
    }

    /// Every algorithm × phase combination.
    pub fn all() -> impl Iterator<Item = MultiplyPlan> {
        Algorithm::ALL
            .into_iter()
            .flat_map(|a| Phases::ALL.into_iter().map(move |p| MultiplyPlan::new(a, p)))
    }

    /// Rejects combinations the algorithm cannot run.
    pub fn check(&self, complemented: bool) -> Result<()> {
        if complemented && !self.algorithm.supports_complement() {
            return Err(Error::UnsupportedPlan(format!(
                "{} does not support complemented masks",
                self.algorithm
            )));
        }
        if self.grain == 0 {
            return Err(Error::InvalidConfig("grain must be at least 1".into()));
        }
        Ok(())
    }

    /// Resolved worker count.
    pub fn effective_workers(&self) -> usize {
        if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        }
    }

    /// Label such as `MSA-1P`.
    pub fn label(&self) -> String {
        format!("{}-{}", self.algorithm.name(), self.phases.name()).to_ascii_uppercase()
    }
}
