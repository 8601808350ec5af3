use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::{gram_schmidt, ComplexMatrix};
use crate::{Error, Result};

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-distributed `d x d` unitary, deterministic in `seed`.
///
/// Gram-Schmidt on a complex Ginibre matrix: this is QR with a positive
/// diagonal in R, which removes the phase bias of a plain QR.
pub fn haar_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    if d < 1 {
        return Err(Error::InvalidDimension(d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let cols: Vec<Vec<C64>> = (0..d)
            .map(|_| (0..d).map(|_| gaussian(&mut rng)).collect())
            .collect();
        let q = gram_schmidt(&cols, 1e-8);
        // a rank-deficient Gaussian draw has probability zero; redraw anyway
        if q.len() == d {
            return ComplexMatrix::from_columns(&q);
        }
    }
}

/// Uniformly random pure state in `C^d`.
pub fn random_state(d: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_57a7e);
    let v: Vec<C64> = (0..d).map(|_| gaussian(&mut rng)).collect();
    super::matrix::normalized(&v)
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scale).
pub fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4e21_0001);
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let x: f64 = StandardNormal.sample(&mut rng);
        m[(i, i)] = C64::new(x, 0.0);
        for j in (i + 1)..d {
            let z = gaussian(&mut rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}
