//! Partitioned orthonormal frames: the search space over which the extremal
//! operators take their supremum or infimum. A frame is an ordered list of k
//! orthonormal vectors in R^N grouped into mutually orthogonal blocks.

use crate::error::{Error, Result};
use crate::linalg;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Tolerance for the frame orthonormality invariants.
pub const FRAME_TOL: f64 = 1e-12;

/// Block dimensions (k_1 <= ... <= k_l) inside an ambient dimension N.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    ks: Vec<usize>,
    ambient_dim: usize,
}

impl Partition {
    /// Validates and builds a partition. Rejects unsorted block sizes rather
    /// than sorting them.
    pub fn new(ks: &[usize], ambient_dim: usize) -> Result<Self> {
        if ks.is_empty() {
            return Err(Error::InvalidPartition("block list is empty".into()));
        }
        if ks.iter().any(|&k| k == 0) {
            return Err(Error::InvalidPartition("block sizes must be >= 1".into()));
        }
        if ks.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidPartition(format!(
                "block sizes must be non-decreasing, got {ks:?}"
            )));
        }
        let k: usize = ks.iter().sum();
        if k > ambient_dim {
            return Err(Error::InvalidPartition(format!(
                "total dimension {k} exceeds ambient dimension {ambient_dim}"
            )));
        }
        if ks.iter().any(|&ki| ki > ambient_dim) {
            return Err(Error::InvalidPartition("a block exceeds the ambient dimension".into()));
        }
        Ok(Self { ks: ks.to_vec(), ambient_dim })
    }

    pub fn ks(&self) -> &[usize] {
        &self.ks
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Total frame dimension k = sum of the block sizes.
    pub fn total_dim(&self) -> usize {
        self.ks.iter().sum()
    }

    /// Number of blocks l.
    pub fn num_blocks(&self) -> usize {
        self.ks.len()
    }

    /// True when the frame spans the whole space (k = N).
    pub fn is_full(&self) -> bool {
        self.total_dim() == self.ambient_dim
    }

    /// Global index range of block `i` (0-based).
    pub fn block_range(&self, i: usize) -> Range<usize> {
        let start: usize = self.ks[..i].iter().sum();
        start..start + self.ks[i]
    }

    /// Global frame index of vector `j` within block `i` (both 0-based).
    pub fn block_index(&self, i: usize, j: usize) -> Result<usize> {
        if i >= self.num_blocks() || j >= self.ks[i] {
            return Err(Error::InvalidPartition(format!(
                "block index ({i},{j}) out of range for {:?}",
                self.ks
            )));
        }
        Ok(self.block_range(i).start + j)
    }
}

/// An ordered orthonormal k-frame grouped by a partition.
#[derive(Clone, Debug)]
pub struct BlockFrame {
    vectors: Vec<Vec<f64>>,
    partition: Partition,
}

impl BlockFrame {
    /// Builds a frame from explicit vectors, checking the orthonormality
    /// invariants at [`FRAME_TOL`].
    pub fn from_vectors(vectors: Vec<Vec<f64>>, partition: Partition) -> Result<Self> {
        let frame = Self { vectors, partition };
        frame.check()?;
        Ok(frame)
    }

    pub(crate) fn from_vectors_unchecked(vectors: Vec<Vec<f64>>, partition: Partition) -> Self {
        Self { vectors, partition }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// Vectors of block `i`.
    pub fn block(&self, i: usize) -> &[Vec<f64>] {
        &self.vectors[self.partition.block_range(i)]
    }

    /// Max-norm distance of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        linalg::gram_defect(&self.vectors)
    }

    pub fn check(&self) -> Result<()> {
        let k = self.partition.total_dim();
        if self.vectors.len() != k {
            return Err(Error::FrameInvariant(format!(
                "expected {k} vectors, got {}",
                self.vectors.len()
            )));
        }
        let n = self.partition.ambient_dim();
        if self.vectors.iter().any(|v| v.len() != n) {
            return Err(Error::FrameInvariant("vector dimension mismatch".into()));
        }
        let defect = self.gram_defect();
        if defect > 100.0 * FRAME_TOL {
            return Err(Error::FrameInvariant(format!(
                "orthonormality defect {defect:.3e} exceeds tolerance"
            )));
        }
        Ok(())
    }
}

/// Canonical frame e_1, ..., e_k grouped by the partition.
pub fn coordinate_frame(partition: &Partition) -> BlockFrame {
    let n = partition.ambient_dim();
    let vectors = (0..partition.total_dim()).map(|i| linalg::unit(n, i)).collect();
    BlockFrame::from_vectors_unchecked(vectors, partition.clone())
}

/// Draws a rotation-invariant random frame; deterministic for a fixed seed.
pub fn sample_frame(partition: &Partition, seed: u64) -> BlockFrame {
    let n = partition.ambient_dim();
    let k = partition.total_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut rows: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..n).map(|_| standard_normal(&mut rng)).collect())
            .collect();
        // Gram-Schmidt of a Gaussian matrix is uniform on the frame manifold
        if linalg::orthonormalize(&mut rows).is_ok() {
            return BlockFrame::from_vectors_unchecked(rows, partition.clone());
        }
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; half the draws are discarded for simplicity
    loop {
        let u: f64 = rng.gen::<f64>();
        let v: f64 = rng.gen::<f64>();
        if u > f64::MIN_POSITIVE {
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Moves a frame along `perturbation` by `step` and re-orthonormalizes.
///
/// `step = 0` returns the input unchanged. A rank-deficient perturbed set
/// falls back to a deterministic completion of the independent subset.
pub fn retract(frame: &BlockFrame, perturbation: &[Vec<f64>], step: f64) -> Result<BlockFrame> {
    if step < 0.0 {
        return Err(Error::InvalidParameter("retraction step must be >= 0".into()));
    }
    if perturbation.len() != frame.vectors.len() {
        return Err(Error::InvalidParameter("perturbation row count mismatch".into()));
    }
    if step == 0.0 {
        return Ok(frame.clone());
    }
    let n = frame.partition.ambient_dim();
    if perturbation.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidParameter("perturbation dimension mismatch".into()));
    }
    let mut rows: Vec<Vec<f64>> = frame
        .vectors
        .iter()
        .zip(perturbation)
        .map(|(v, p)| linalg::add_scaled(v, p, step))
        .collect();
    let mut fallback_seed = 0x9e37_79b9_7f4a_7c15u64;
    while let Err(bad) = linalg::orthonormalize(&mut rows) {
        // replace the degenerate row and restart the sweep
        let mut rng = ChaCha8Rng::seed_from_u64(fallback_seed ^ bad as u64);
        rows[bad] = (0..n).map(|_| standard_normal(&mut rng)).collect();
        fallback_seed = fallback_seed.wrapping_add(0x1000_0001);
    }
    Ok(BlockFrame::from_vectors_unchecked(rows, frame.partition.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn partition_examples() {
        let p = Partition::new(&[1, 1], 3).unwrap();
        assert_eq!(p.total_dim(), 2);
        assert_eq!(p.num_blocks(), 2);
        assert_eq!(p.block_range(0), 0..1);
        assert_eq!(p.block_range(1), 1..2);

        let p = Partition::new(&[1, 2], 3).unwrap();
        assert_eq!(p.total_dim(), 3);
        assert_eq!(p.num_blocks(), 2);

        assert!(Partition::new(&[2, 1], 5).is_err()); // not non-decreasing
        assert!(Partition::new(&[2, 2], 3).is_err()); // sum exceeds N
        assert!(Partition::new(&[], 3).is_err());
        assert!(Partition::new(&[0, 1], 3).is_err());
    }

    #[test]
    fn block_index_offsets() {
        // spec counts 1-based: ([1,2], i=2, j=1) -> 2 and (i=2, j=2) -> 3
        let p = Partition::new(&[1, 2], 3).unwrap();
        assert_eq!(p.block_index(1, 0).unwrap(), 1);
        assert_eq!(p.block_index(1, 1).unwrap(), 2);
        let single = Partition::new(&[3], 4).unwrap();
        assert_eq!(single.block_index(0, 2).unwrap(), 2);
        assert!(p.block_index(2, 0).is_err());
        assert!(p.block_index(1, 2).is_err());
    }

    #[test]
    fn block_index_is_bijection() {
        let p = Partition::new(&[1, 2, 3], 7).unwrap();
        let mut seen = vec![false; p.total_dim()];
        for i in 0..p.num_blocks() {
            for j in 0..p.ks()[i] {
                let g = p.block_index(i, j).unwrap();
                assert!(!seen[g]);
                seen[g] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn sampled_frames_are_orthonormal() {
        for seed in 0..20 {
            let p = Partition::new(&[1, 2], 4).unwrap();
            let f = sample_frame(&p, seed);
            assert!(f.gram_defect() <= 1e-10, "defect {}", f.gram_defect());
            f.check().unwrap();
        }
        let p1 = Partition::new(&[1], 2).unwrap();
        let f1 = sample_frame(&p1, 7);
        assert_relative_eq!(linalg::norm(&f1.vectors()[0]), 1.0, epsilon = 1e-12);
        let p2 = Partition::new(&[1, 1], 3).unwrap();
        let f2 = sample_frame(&p2, 9);
        assert!(linalg::dot(&f2.vectors()[0], &f2.vectors()[1]).abs() <= 1e-12);
    }

    #[test]
    fn sample_frame_deterministic_in_seed() {
        let p = Partition::new(&[1, 1], 3).unwrap();
        let a = sample_frame(&p, 42);
        let b = sample_frame(&p, 42);
        assert_eq!(a.vectors(), b.vectors());
        let c = sample_frame(&p, 43);
        assert_ne!(a.vectors(), c.vectors());
    }

    #[test]
    fn rotation_invariance_first_moment() {
        // E <xi_1, e_1>^2 = 1/N for a rotation-invariant law
        let p = Partition::new(&[1], 3).unwrap();
        let m = 10_000;
        let mean: f64 = (0..m)
            .map(|seed| {
                let f = sample_frame(&p, seed as u64);
                f.vectors()[0][0].powi(2)
            })
            .sum::<f64>()
            / m as f64;
        assert!((mean - 1.0 / 3.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn retract_zero_step_is_identity() {
        let p = Partition::new(&[1, 1], 3).unwrap();
        let f = sample_frame(&p, 1);
        let pert = vec![vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 0.0]];
        let g = retract(&f, &pert, 0.0).unwrap();
        assert_eq!(f.vectors(), g.vectors());
    }

    #[test]
    fn retract_stays_close_for_small_steps() {
        let p = Partition::new(&[1, 2], 4).unwrap();
        let f = sample_frame(&p, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let pert: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                (0..4)
                    .map(|_| {
                        let v: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                        v
                    })
                    .collect()
            })
            .collect();
        let step = 1e-3;
        let g = retract(&f, &pert, step).unwrap();
        assert!(g.gram_defect() <= 1e-12);
        let worst = f
            .vectors()
            .iter()
            .zip(g.vectors())
            .map(|(a, b)| linalg::dist_max(a, b))
            .fold(0.0, f64::max);
        assert!(worst <= 2.0 * step, "moved {worst} for step {step}");
    }

    #[test]
    fn retract_handles_degenerate_perturbation() {
        let p = Partition::new(&[1, 1], 2).unwrap();
        let f = coordinate_frame(&p);
        // drive both rows onto the same line
        let pert = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
        let g = retract(&f, &pert, 1.0).unwrap();
        assert!(g.gram_defect() <= 1e-10);
    }
}
