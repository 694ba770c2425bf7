//! Independent reference implementations used by the integration and
//! acceptance suites. Nothing here calls into the multiply kernels.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use masked_spgemm::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `nrows × ncols` integer matrix with about `degree` entries per row.
pub fn random_matrix(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize, degree: usize) -> CsrMatrix<i64> {
    let mut triples = Vec::new();
    for i in 0..nrows {
        for _ in 0..degree {
            triples.push((i, rng.gen_range(0..ncols), rng.gen_range(-9i64..=9)));
        }
    }
    CsrMatrix::from_triples(nrows, ncols, triples, |x, _| x).unwrap()
}

pub fn random_pattern(rng: &mut ChaCha8Rng, nrows: usize, ncols: usize, degree: usize) -> CsrMatrix<()> {
    random_matrix(rng, nrows, ncols, degree).pattern()
}

/// Dense `mask ⊙ (A·B)` (or `¬mask ⊙ (A·B)`): an entry is present iff at
/// least one product lands on an admitted position.
pub fn dense_masked_product(
    mask: &CsrMatrix<()>,
    complemented: bool,
    a: &CsrMatrix<i64>,
    b: &CsrMatrix<i64>,
) -> Vec<(usize, usize, i64)> {
    let (m, k, n) = (a.nrows(), a.ncols(), b.ncols());
    let mut da = vec![vec![None::<i64>; k]; m];
    for (i, j, v) in a.triples() {
        da[i][j] = Some(v);
    }
    let mut db = vec![vec![None::<i64>; n]; k];
    for (i, j, v) in b.triples() {
        db[i][j] = Some(v);
    }
    let mut dm = vec![vec![false; n]; m];
    for (i, j, _) in mask.triples() {
        dm[i][j] = true;
    }
    let mut out = Vec::new();
    for i in 0..m {
        for j in 0..n {
            if dm[i][j] == complemented {
                continue;
            }
            let mut acc: Option<i64> = None;
            for p in 0..k {
                if let (Some(x), Some(y)) = (da[i][p], db[p][j]) {
                    acc = Some(acc.unwrap_or(0) + x * y);
                }
            }
            if let Some(v) = acc {
                out.push((i, j, v));
            }
        }
    }
    out
}

/// Adjacency sets of a pattern.
pub fn adjacency<T: Copy>(g: &CsrMatrix<T>) -> Vec<HashSet<usize>> {
    (0..g.nrows()).map(|i| g.row(i).0.iter().copied().collect()).collect()
}

/// Triangles by enumerating all vertex triples.
pub fn brute_force_triangles<T: Copy>(g: &CsrMatrix<T>) -> u64 {
    let n = g.nrows();
    let adj = adjacency(g);
    let mut count = 0u64;
    for a in 0..n {
        for b in a + 1..n {
            if !adj[a].contains(&b) {
                continue;
            }
            for c in b + 1..n {
                if adj[a].contains(&c) && adj[b].contains(&c) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// k-truss by repeatedly counting common neighbours per edge.
pub fn support_oracle_k_truss<T: Copy>(g: &CsrMatrix<T>, k: usize) -> HashSet<(usize, usize)> {
    let mut adj: Vec<HashSet<usize>> = adjacency(g);
    for (i, a) in adj.iter_mut().enumerate() {
        a.remove(&i);
    }
    loop {
        let mut doomed = Vec::new();
        for i in 0..adj.len() {
            for &j in &adj[i] {
                let support = adj[i].intersection(&adj[j]).count();
                if support + 2 < k {
                    doomed.push((i, j));
                }
            }
        }
        if doomed.is_empty() {
            break;
        }
        for (i, j) in doomed {
            adj[i].remove(&j);
        }
    }
    adj.iter()
        .enumerate()
        .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
        .collect()
}

/// Edges that lie in at least one triangle.
pub fn triangle_edges<T: Copy>(g: &CsrMatrix<T>) -> HashSet<(usize, usize)> {
    let adj = adjacency(g);
    let mut out = HashSet::new();
    for i in 0..adj.len() {
        for &j in &adj[i] {
            if i != j && adj[i].iter().any(|&w| w != i && w != j && adj[j].contains(&w)) {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Textbook single-source Brandes on the directed edges of `g`, summed over
/// `sources`. No halving.
pub fn brandes<T: Copy>(g: &CsrMatrix<T>, sources: &[usize]) -> Vec<f64> {
    let n = g.nrows();
    let mut bc = vec![0.0f64; n];
    for &s in sources {
        let mut stack = Vec::new();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            stack.push(v);
            for &w in g.row(v).0 {
                if w == v {
                    continue;
                }
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc
}

pub fn edge_set<T: Copy>(g: &CsrMatrix<T>) -> HashSet<(usize, usize)> {
    g.triples().map(|(i, j, _)| (i, j)).collect()
}

/// Random permutation as `new_of_old`.
pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
