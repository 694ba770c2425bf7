//! Synthetic Erdős–Rényi and R-MAT matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    ErdosRenyi,
    Rmat,
}

/// Quadrant probabilities for recursive R-MAT sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmatParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RmatParams {
    /// The Graph500 reference parameters.
    pub const GRAPH500: RmatParams = RmatParams {
        a: 0.57,
        b: 0.19,
        c: 0.19,
        d: 0.05,
    };

    pub const UNIFORM: RmatParams = RmatParams {
        a: 0.25,
        b: 0.25,
        c: 0.25,
        d: 0.25,
    };
}

impl Default for RmatParams {
    fn default() -> Self {
        RmatParams::GRAPH500
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    /// log2 of the number of rows (and columns).
    pub scale: u32,
    pub avg_degree: f64,
    pub rmat: RmatParams,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn erdos_renyi(scale: u32, avg_degree: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind: GraphKind::ErdosRenyi,
            scale,
            avg_degree,
            rmat: RmatParams::default(),
            seed,
        }
    }

    pub fn rmat(scale: u32, avg_degree: f64, seed: u64) -> Self {
        GeneratorSpec {
            kind: GraphKind::Rmat,
            scale,
            avg_degree,
            rmat: RmatParams::GRAPH500,
            seed,
        }
    }

    pub fn with_rmat_params(self, rmat: RmatParams) -> Self {
        GeneratorSpec { rmat, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let RmatParams { a, b, c, d } = self.rmat;
        if [a, b, c, d].iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidGenerator("R-MAT probabilities must lie in [0, 1]".into()));
        }
        if (a + b + c + d - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidGenerator(format!(
                "R-MAT probabilities sum to {}, expected 1",
                a + b + c + d
            )));
        }
        if self.scale < 1 || self.scale > 40 {
            return Err(Error::InvalidGenerator(format!("scale {} outside 1..=40", self.scale)));
        }
        if !(self.avg_degree > 0.0) || !self.avg_degree.is_finite() {
            return Err(Error::InvalidGenerator("average degree must be positive".into()));
        }
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        1usize << self.scale
    }

    /// Number of sampled edges before duplicate merging.
    pub fn edge_count(&self) -> usize {
        (self.avg_degree * self.nrows() as f64).round() as usize
    }
}

/// Draws single R-MAT edges by descending `scale` quadrant levels.
#[derive(Debug, Clone, Copy)]
pub struct RmatSampler {
    scale: u32,
    // cumulative thresholds for quadrants a, b, c
    ab: f64,
    abc: f64,
    a: f64,
}

impl RmatSampler {
    pub fn new(scale: u32, p: RmatParams) -> Self {
        RmatSampler {
            scale,
            a: p.a,
            ab: p.a + p.b,
            abc: p.a + p.b + p.c,
        }
    }

    /// Quadrant index: 0 = top-left (a), 1 = top-right (b), 2 = bottom-left
    /// (c), 3 = bottom-right (d).
    #[inline]
    pub fn quadrant<R: Rng>(&self, rng: &mut R) -> u8 {
        let r: f64 = rng.gen();
        if r < self.a {
            0
        } else if r < self.ab {
            1
        } else if r < self.abc {
            2
        } else {
            3
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> (usize, usize) {
        let (mut row, mut col) = (0usize, 0usize);
        for level in (0..self.scale).rev() {
            let q = self.quadrant(rng);
            row |= ((q >> 1) as usize & 1) << level;
            col |= (q as usize & 1) << level;
        }
        (row, col)
    }
}

/// Generates a square matrix with every stored value equal to `one`.
/// Duplicate samples are merged; self-loops are kept (see
/// [`simple_graph`](crate::sparse::simple_graph) for graph use).
pub fn generate<T: Copy>(spec: &GeneratorSpec, one: T) -> Result<CsrMatrix<T>> {
    spec.validate()?;
    let n = spec.nrows();
    let m = spec.edge_count();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::with_capacity(m);
    match spec.kind {
        GraphKind::ErdosRenyi => {
            for _ in 0..m {
                edges.push((rng.gen_range(0..n), rng.gen_range(0..n), one));
            }
        }
        GraphKind::Rmat => {
            let sampler = RmatSampler::new(spec.scale, spec.rmat);
            for _ in 0..m {
                let (i, j) = sampler.sample(&mut rng);
                edges.push((i, j, one));
            }
        }
    }
    CsrMatrix::from_triples(n, n, edges, |x, _| x)
}
