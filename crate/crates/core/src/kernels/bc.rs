//! Batched multi-source betweenness centrality (Brandes) on unweighted
//! graphs.
//!
//! Frontiers are `batch × n` sparse matrices, one row per source. The
//! forward sweep expands `F ← ¬visited ⊙ (F·A)`, which counts shortest paths
//! and never revisits a vertex. The backward sweep walks the levels in
//! reverse, pulling dependencies through `Aᵀ` under each previous level's
//! pattern. Scores are not halved: for an undirected graph every pair is
//! counted from both endpoints.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::KernelTrace;
use crate::error::{Error, Result};
use crate::multiply::{masked_multiply, MultiplyPlan, Rhs};
use crate::semiring::arithmetic_semiring;
use crate::sparse::CsrMatrix;

pub const DEFAULT_BATCH_SIZE: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sources {
    All,
    List(Vec<usize>),
    /// `count` distinct vertices drawn with the given seed.
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcConfig {
    pub batch_size: usize,
    pub sources: Sources,
}

impl Default for BcConfig {
    fn default() -> Self {
        BcConfig {
            batch_size: DEFAULT_BATCH_SIZE,
            sources: Sources::All,
        }
    }
}

impl BcConfig {
    /// Resolves the source list for a graph with `n` vertices.
    pub fn resolve_sources(&self, n: usize) -> Result<Vec<usize>> {
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1".into()));
        }
        let sources = match &self.sources {
            Sources::All => (0..n).collect(),
            Sources::List(list) => {
                let mut seen = vec![false; n];
                for &s in list {
                    if s >= n {
                        return Err(Error::InvalidConfig(format!("source {s} out of range")));
                    }
                    if std::mem::replace(&mut seen[s], true) {
                        return Err(Error::InvalidConfig(format!("duplicate source {s}")));
                    }
                }
                list.clone()
            }
            Sources::Random { count, seed } => {
                if *count > n {
                    return Err(Error::InvalidConfig(format!(
                        "{count} sources requested from {n} vertices"
                    )));
                }
                let mut all: Vec<usize> = (0..n).collect();
                all.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
                all.truncate(*count);
                all
            }
        };
        Ok(sources)
    }
}

#[derive(Debug, Clone)]
pub struct Betweenness {
    pub scores: Vec<f64>,
    pub sources: usize,
    /// Stored (directed) edges of the input.
    pub edges: usize,
    pub trace: KernelTrace,
}

impl Betweenness {
    /// Traversed edges per second over the masked-multiply time.
    pub fn teps(&self) -> f64 {
        self.sources as f64 * self.edges as f64 / self.trace.total_seconds()
    }
}

/// Union of two patterns with the same shape.
fn pattern_union<A, B>(a: &CsrMatrix<A>, b: &CsrMatrix<B>) -> CsrMatrix<()> {
    let mut row_ptr = Vec::with_capacity(a.nrows() + 1);
    row_ptr.push(0);
    let mut cols = Vec::with_capacity(a.nnz() + b.nnz());
    for i in 0..a.nrows() {
        let (x, y) = (a.row(i).0, b.row(i).0);
        let (mut p, mut q) = (0, 0);
        while p < x.len() || q < y.len() {
            let next = match (x.get(p), y.get(q)) {
                (Some(&u), Some(&v)) if u == v => {
                    p += 1;
                    q += 1;
                    u
                }
                (Some(&u), Some(&v)) if u < v => {
                    p += 1;
                    u
                }
                (Some(&u), None) => {
                    p += 1;
                    u
                }
                (_, Some(&v)) => {
                    q += 1;
                    v
                }
                (None, None) => unreachable!(),
            };
            cols.push(next);
        }
        row_ptr.push(cols.len());
    }
    let n = cols.len();
    CsrMatrix::from_parts_unchecked(a.nrows(), a.ncols(), row_ptr, cols, vec![(); n])
}

/// Betweenness scores summed over the configured sources.
pub fn betweenness_centrality<T: Copy>(
    g: &CsrMatrix<T>,
    cfg: &BcConfig,
    plan: &MultiplyPlan,
) -> Result<Betweenness> {
    if g.nrows() != g.ncols() {
        return Err(Error::NotSquare {
            nrows: g.nrows(),
            ncols: g.ncols(),
        });
    }
    plan.check(true).map_err(|_| {
        Error::UnsupportedPlan(format!(
            "{} cannot run betweenness centrality: complemented masks unsupported",
            plan.algorithm
        ))
    })?;
    let n = g.nrows();
    let sources = cfg.resolve_sources(n)?;
    let a = g.filter(|i, j, _| i != j).map(|_| 1.0f64);
    let at = a.transpose();
    let semiring = arithmetic_semiring::<f64>();

    let mut scores = vec![0.0f64; n];
    let mut trace = KernelTrace::default();

    for batch in sources.chunks(cfg.batch_size) {
        let b = batch.len();
        let frontier0 = CsrMatrix::from_triples(
            b,
            n,
            batch.iter().enumerate().map(|(r, &s)| (r, s, 1.0)),
            |x, _| x,
        )?;

        // forward: levels[d] holds shortest-path counts of vertices at depth d
        let mut visited = frontier0.pattern();
        let mut levels = vec![frontier0];
        loop {
            let prev = levels.last().unwrap();
            let next = masked_multiply(visited.mask().complement(), prev, Rhs::Csr(&a), plan, semiring)?;
            trace.push(next.stats);
            if next.matrix.nnz() == 0 {
                break;
            }
            visited = pattern_union(&visited, &next.matrix);
            levels.push(next.matrix);
        }

        // backward: dependencies aligned with each level's stored entries
        let mut delta: Vec<Vec<f64>> = levels.iter().map(|l| vec![0.0; l.nnz()]).collect();
        for d in (1..levels.len()).rev() {
            let level = &levels[d];
            let weights: Vec<f64> = level
                .values()
                .iter()
                .zip(&delta[d])
                .map(|(&sigma, &dep)| (1.0 + dep) / sigma)
                .collect();
            let w = CsrMatrix::from_parts_unchecked(
                b,
                n,
                level.row_ptr().to_vec(),
                level.col_idx().to_vec(),
                weights,
            );
            let parent = &levels[d - 1];
            let t = masked_multiply(parent.mask(), &w, Rhs::Csr(&at), plan, semiring)?;
            trace.push(t.stats);
            let t = t.matrix;
            for r in 0..b {
                let (pc, pv) = parent.row(r);
                let base = parent.row_ptr()[r];
                let (tc, tv) = t.row(r);
                let mut p = 0;
                for (&i, &x) in tc.iter().zip(tv) {
                    while pc[p] < i {
                        p += 1;
                    }
                    delta[d - 1][base + p] += x * pv[p];
                }
            }
        }
        for (d, level) in levels.iter().enumerate().skip(1) {
            for (&v, &dep) in level.col_idx().iter().zip(&delta[d]) {
                scores[v] += dep;
            }
        }
    }

    Ok(Betweenness {
        scores,
        sources: sources.len(),
        edges: a.nnz(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiply::{Algorithm, Phases};

    fn undirected(n: usize, edges: &[(usize, usize)]) -> CsrMatrix<f64> {
        CsrMatrix::from_triples(n, n, edges.iter().flat_map(|&(a, b)| [(a, b, 1.0), (b, a, 1.0)]), |x, _| x)
            .unwrap()
    }

    #[test]
    fn path_graph() {
        let g = undirected(3, &[(0, 1), (1, 2)]);
        for alg in [Algorithm::Msa, Algorithm::Hash, Algorithm::HEAP, Algorithm::HEAP_DOT] {
            let bc = betweenness_centrality(&g, &BcConfig::default(), &MultiplyPlan::new(alg, Phases::One)).unwrap();
            assert_eq!(bc.scores, vec![0.0, 2.0, 0.0]);
        }
    }

    #[test]
    fn star_graph() {
        let g = undirected(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let bc = betweenness_centrality(&g, &BcConfig { batch_size: 2, sources: Sources::All }, &MultiplyPlan::new(Algorithm::Hash, Phases::Two)).unwrap();
        // 4·3 ordered leaf pairs route through the center
        assert_eq!(bc.scores, vec![12.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn unsupported_plans() {
        let g = undirected(3, &[(0, 1), (1, 2)]);
        for alg in [Algorithm::Mca, Algorithm::Inner] {
            let r = betweenness_centrality(&g, &BcConfig::default(), &MultiplyPlan::new(alg, Phases::One));
            assert!(matches!(r, Err(Error::UnsupportedPlan(_))));
        }
    }

    #[test]
    fn source_resolution() {
        let cfg = BcConfig { batch_size: 4, sources: Sources::Random { count: 5, seed: 3 } };
        let s = cfg.resolve_sources(10).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s, cfg.resolve_sources(10).unwrap());
        let dup = BcConfig { batch_size: 4, sources: Sources::List(vec![1, 1]) };
        assert!(dup.resolve_sources(10).is_err());
        let zero = BcConfig { batch_size: 0, sources: Sources::All };
        assert!(zero.resolve_sources(10).is_err());
    }
}
