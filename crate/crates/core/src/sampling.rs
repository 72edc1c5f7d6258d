//! Seeded random inputs for tests and the verification suite.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{spectral_norm, ComplexMatrix};
use crate::seqkit::DecreasingSeq;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn complex_gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn complex_gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::new(rows, cols, complex_gaussian_vector(rng, rows * cols))
        .expect("gaussian samples are finite")
}

/// A random matrix scaled to spectral norm one.
pub fn normalized_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let a = complex_gaussian_matrix(rng, rows, cols);
    let norm = spectral_norm(&a).expect("svd of a gaussian matrix");
    a.scaled(Complex64::new(1.0 / norm, 0.0))
}

/// A finitely supported decreasing sequence of length `len` with entries in
/// `(0, 1]`.
pub fn random_decreasing<R: Rng>(rng: &mut R, len: usize) -> DecreasingSeq {
    let mut v: Vec<f64> = (0..len).map(|_| 1.0 - rng.random::<f64>()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    DecreasingSeq::finite(v).expect("sorted positive values")
}

/// A block-diagonal matrix with gaussian blocks of the given sizes.
pub fn block_diagonal<R: Rng>(rng: &mut R, blocks: &[usize]) -> ComplexMatrix {
    let k: usize = blocks.iter().sum();
    let mut entries = vec![Complex64::new(0.0, 0.0); k * k];
    let mut offset = 0;
    for &b in blocks {
        for i in 0..b {
            for j in 0..b {
                entries[(offset + i) * k + offset + j] = complex_gaussian(rng);
            }
        }
        offset += b;
    }
    ComplexMatrix::new(k, k, entries).expect("finite entries")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = complex_gaussian_matrix(&mut seeded_rng(1), 3, 2);
        let b = complex_gaussian_matrix(&mut seeded_rng(1), 3, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn normalized_has_unit_norm() {
        let a = normalized_matrix(&mut seeded_rng(2), 4, 3);
        assert!((spectral_norm(&a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn blocks_are_zero_outside() {
        let m = block_diagonal(&mut seeded_rng(4), &[1, 2]);
        assert_eq!(m.get(0, 1), Complex64::new(0.0, 0.0));
        assert_eq!(m.get(2, 0), Complex64::new(0.0, 0.0));
        assert_ne!(m.get(1, 2), Complex64::new(0.0, 0.0));
    }
}
