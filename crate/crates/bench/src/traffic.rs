//! Memory-traffic cost model, in words moved.
//!
//! The pull (dot-product) scheme streams `A` once and, for every mask
//! entry, reads the mask entry plus a column of `B` of expected length
//! `nnz(B)/n`. The push (row-wise) schemes stream `A`, fetch one cache
//! line per scaled row of `B`, and read every product. Accumulator
//! traffic is not modeled.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficKind {
    Pull,
    Push,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrafficInputs {
    pub nnz_a: u64,
    pub nnz_b: u64,
    pub nnz_m: u64,
    /// Columns of `B` (and of the output).
    pub n: u64,
    /// Words per cache line.
    pub line_words: u64,
    /// `flops(A·B)`.
    pub flops: u64,
}

/// Estimated words moved. Pull traffic is evaluated as one exact rational
/// `(nnzA·n + nnzM·(n + nnzB)) / n` and rounded once; push traffic is an
/// integer.
pub fn traffic_estimate(kind: TrafficKind, t: &TrafficInputs) -> f64 {
    match kind {
        TrafficKind::Pull => {
            assert!(t.n > 0, "pull traffic needs n > 0");
            let n = u128::from(t.n);
            let num = u128::from(t.nnz_a) * n + u128::from(t.nnz_m) * (n + u128::from(t.nnz_b));
            if num % n == 0 {
                (num / n) as f64
            } else {
                num as f64 / n as f64
            }
        }
        TrafficKind::Push => {
            let words = u128::from(t.nnz_a) * (1 + u128::from(t.line_words)) + u128::from(t.flops);
            words as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pull_example() {
        let t = TrafficInputs { nnz_a: 100, nnz_m: 50, nnz_b: 200, n: 20, ..Default::default() };
        assert_eq!(traffic_estimate(TrafficKind::Pull, &t), 650.0);
    }

    #[test]
    fn pull_without_mask_reads_only_a() {
        let t = TrafficInputs { nnz_a: 123, nnz_m: 0, nnz_b: 999, n: 7, ..Default::default() };
        assert_eq!(traffic_estimate(TrafficKind::Pull, &t), 123.0);
    }

    #[test]
    fn push_example() {
        let t = TrafficInputs { nnz_a: 100, line_words: 8, flops: 1000, ..Default::default() };
        assert_eq!(traffic_estimate(TrafficKind::Push, &t), 1900.0);
    }

    #[test]
    fn pull_fractional_column_length() {
        let t = TrafficInputs { nnz_a: 0, nnz_m: 3, nnz_b: 5, n: 2, ..Default::default() };
        assert_eq!(traffic_estimate(TrafficKind::Pull, &t), 10.5);
    }
}
