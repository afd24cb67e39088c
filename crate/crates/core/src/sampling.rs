//! Seeded random matrices for sweeps, tests and the `sample` subcommand.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{validate_correlation, CorrelationMatrix, DensityMatrix};
use crate::numerics::{inner, unitary_completion, vector_norm, ComplexMatrix};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`.
pub fn rng_for_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let v = gaussian_vector(dim, rng);
    let n = vector_norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Gram matrix `ξ_kl = ⟨g_k|g_l⟩` of `dim` random unit vectors in C^rank.
pub fn random_correlation_of_rank<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> CorrelationMatrix {
    let vectors: Vec<_> = (0..dim).map(|_| random_unit_vector(rank, rng)).collect();
    let gram = ComplexMatrix::from_fn(dim, dim, |k, l| inner(&vectors[k], &vectors[l]));
    validate_correlation(&gram).expect("Gram matrix of unit vectors is a correlation matrix")
}

/// Generic full-rank correlation matrix; off-diagonal entries have modulus < 1
/// almost surely, so the channel is complete.
pub fn random_correlation<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CorrelationMatrix {
    random_correlation_of_rank(dim, dim, rng)
}

/// Mixed state `G G† / Tr[G G†]` from a square Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    let mut m = m.scale_real(1.0 / t).hermitian_part();
    for k in 0..dim {
        m[(k, k)].im = 0.0;
    }
    DensityMatrix::new(m).expect("Ginibre state is valid")
}

pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::pure(&random_unit_vector(dim, rng)).expect("nonzero vector")
}

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let mut h = g.hermitian_part();
    for k in 0..dim {
        h[(k, k)].im = 0.0;
    }
    h
}

/// Unitary from Gram–Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v = gaussian_vector(dim, rng);
        for _ in 0..2 {
            for b in &cols {
                let p = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= y * p;
                }
            }
        }
        let n = vector_norm(&v);
        if n > 1e-6 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    unitary_completion(&cols, dim).expect("orthonormal columns")
}
