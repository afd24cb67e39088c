//! Unitary system–environment realizations of Schur channels.
//!
//! A dilation couples the system to an environment prepared in `|0⟩_e` through
//! `U|k⟩⊗|0⟩_e = |k⟩⊗|e_k⟩`. The environment vectors are a Gram factor of the
//! correlation matrix, `⟨e_k|e_l⟩ = ξ_kl`, which makes the reduced system
//! dynamics exactly `ξᵀ ∘ ρ`.

use num_complex::Complex64;

use crate::channels::{CorrelationMatrix, DensityMatrix, SchurChannel};
use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eig, inner, numerical_rank, partial_trace_env, partial_trace_sys, unitary_completion, vector_norm,
    ComplexMatrix, ZERO,
};

/// Relative eigenvalue threshold used for ranks of correlation matrices.
pub const RANK_THRESHOLD: f64 = 1e-9;

/// Environment states must agree between the closed form and the partial trace.
const ENV_STATE_AGREEMENT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    dim_sys: usize,
    dim_env: usize,
    env_vectors: Vec<Vec<Complex64>>,
    unitary: ComplexMatrix,
}

impl Dilation {
    /// Builds `U` from environment vectors (each of length `dim_env`).
    ///
    /// The physical columns `|k⟩⊗|0⟩_e ↦ |k⟩⊗|e_k⟩` are completed with
    /// [`unitary_completion`]; the completion columns fill the remaining joint
    /// indices in increasing order.
    pub fn from_env_vectors(env_vectors: Vec<Vec<Complex64>>, dim_env: usize) -> Result<Self> {
        let dim_sys = env_vectors.len();
        if dim_sys == 0 || dim_env == 0 {
            return Err(Error::BadDimension(0));
        }
        if let Some(bad) = env_vectors.iter().find(|e| e.len() != dim_env) {
            return Err(Error::DimensionMismatch {
                expected: dim_env,
                found: bad.len(),
            });
        }
        let total = dim_sys * dim_env;
        let columns: Vec<Vec<Complex64>> = env_vectors
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let mut col = vec![ZERO; total];
                col[k * dim_env..(k + 1) * dim_env].copy_from_slice(e);
                col
            })
            .collect();
        let completed = unitary_completion(&columns, total)?;

        let mut unitary = ComplexMatrix::zeros(total, total);
        let mut spare = dim_sys;
        for j in 0..total {
            let src = if j % dim_env == 0 {
                j / dim_env
            } else {
                spare += 1;
                spare - 1
            };
            unitary.set_column(j, &completed.column(src));
        }
        Ok(Self {
            dim_sys,
            dim_env,
            env_vectors,
            unitary,
        })
    }

    pub fn dim_sys(&self) -> usize {
        self.dim_sys
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    /// Index of the initial environment state `|0⟩_e`.
    pub fn env_initial_index(&self) -> usize {
        0
    }

    pub fn env_vectors(&self) -> &[Vec<Complex64>] {
        &self.env_vectors
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() == self.dim_sys {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim_sys,
                found: rho.dim(),
            })
        }
    }

    /// `U (ρ ⊗ |0⟩⟨0|_e) U†` on the joint space.
    pub fn joint_state(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        // Only the physical columns of U see the input, so U(ρ⊗|0⟩⟨0|)U† = C ρ C†.
        let total = self.dim_sys * self.dim_env;
        let isometry = ComplexMatrix::from_fn(total, self.dim_sys, |i, k| self.unitary[(i, k * self.dim_env)]);
        Ok(isometry.conjugate(rho.matrix()))
    }

    /// `Tr_e[U (ρ ⊗ |0⟩⟨0|_e) U†]`
    pub fn reduced_system(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let joint = self.joint_state(rho)?;
        DensityMatrix::new(partial_trace_env(&joint, self.dim_sys, self.dim_env)?)
    }

    /// `σ_e = Σ_k ρ_kk |e_k⟩⟨e_k|`, cross-checked against the partial trace
    /// over the system of the evolved joint state.
    pub fn environment_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_state(rho)?;
        let mut closed = ComplexMatrix::zeros(self.dim_env, self.dim_env);
        for (weight, e) in rho.populations().into_iter().zip(&self.env_vectors) {
            closed = &closed + &ComplexMatrix::outer(e, e).scale_real(weight);
        }
        let joint = self.joint_state(rho)?;
        let traced = partial_trace_sys(&joint, self.dim_sys, self.dim_env)?;
        let gap = closed.max_abs_diff(&traced);
        if gap > ENV_STATE_AGREEMENT {
            return Err(Error::VerificationFailure(format!(
                "environment state routes disagree by {gap:e}"
            )));
        }
        DensityMatrix::new(closed)
    }

    /// Max deviation of `U|k,0⟩` from `|k⟩⊗|e_k⟩`.
    pub fn column_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (k, e) in self.env_vectors.iter().enumerate() {
            let col = self.unitary.column(k * self.dim_env);
            for (i, z) in col.iter().enumerate() {
                let expected = if i / self.dim_env == k { e[i % self.dim_env] } else { ZERO };
                dev = dev.max((z - expected).norm());
            }
        }
        dev
    }

    /// ‖U†U − I‖_F
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.unitary.rows();
        (&self.unitary.adjoint() * &self.unitary).frobenius_distance(&ComplexMatrix::identity(n))
    }

    /// max |⟨e_k|e_l⟩ − ξ_kl|
    pub fn gram_deviation(&self, xi: &CorrelationMatrix) -> f64 {
        gram_matrix(&self.env_vectors).max_abs_diff(xi.matrix())
    }
}

/// `G_kl = ⟨v_k|v_l⟩`
pub fn gram_matrix(vectors: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = vectors.len();
    ComplexMatrix::from_fn(n, n, |k, l| inner(&vectors[k], &vectors[l]))
}

/// Gram factor of ξ from its spectral decomposition.
///
/// With `ξ = V Λ V†`, entry j of `e_k` is `conj(V_kj) √λ_j`, keeping only
/// eigenvalues above the rank threshold; then `⟨e_k|e_l⟩ = ξ_kl`. Each
/// eigenvector is phase-fixed so its first non-negligible entry is real
/// positive, which keeps the construction deterministic.
pub fn kolmogorov_vectors(xi: &CorrelationMatrix) -> Vec<Vec<Complex64>> {
    let eig = hermitian_eig(xi.matrix()).expect("correlation matrices are Hermitian");
    let rank = numerical_rank(&eig.eigenvalues, RANK_THRESHOLD).max(1);
    let d = xi.dim();
    let v = &eig.eigenvectors;
    let gauges: Vec<Complex64> = (0..rank)
        .map(|j| {
            (0..d)
                .map(|k| v[(k, j)])
                .find(|z| z.norm() > 1e-12)
                .map_or(Complex64::new(1.0, 0.0), |z| (z / z.norm()).conj())
        })
        .collect();
    (0..d)
        .map(|k| {
            let e: Vec<Complex64> = (0..rank)
                .map(|j| (v[(k, j)] * gauges[j]).conj() * eig.eigenvalues[j].max(0.0).sqrt())
                .collect();
            let n = vector_norm(&e);
            e.into_iter().map(|z| z / n).collect()
        })
        .collect()
}

/// Spectral dilation with `dim_env = max(rank ξ, 2)`; padded environment
/// dimensions never receive amplitude.
pub fn build_dilation(ch: &SchurChannel) -> Result<Dilation> {
    let vectors = kolmogorov_vectors(ch.xi());
    let rank = vectors.first().map_or(1, Vec::len);
    let dim_env = rank.max(2);
    let padded = vectors
        .into_iter()
        .map(|mut e| {
            e.resize(dim_env, ZERO);
            e
        })
        .collect();
    Dilation::from_env_vectors(padded, dim_env)
}
