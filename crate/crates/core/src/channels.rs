//! Maps that preserve the diagonal algebra, represented by their correlation matrix.
//!
//! The decoherence basis is the standard basis. A channel stores the
//! Heisenberg-picture matrix ξ, so observables evolve as `ξ ∘ O` and states as
//! `ξᵀ ∘ ρ`. The transposition is never dropped, even for real ξ.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig_with, schur_product, ComplexMatrix, ToleranceProfile, ONE, ZERO};

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with(matrix, &ToleranceProfile::default())
    }

    pub fn new_with(matrix: ComplexMatrix, tol: &ToleranceProfile) -> Result<Self> {
        crate::numerics::state_spectrum(&matrix, tol)?;
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized copy of `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = crate::numerics::vector_norm(psi);
        if psi.is_empty() || norm == 0.0 {
            return Err(Error::NotState {
                reason: "zero vector".into(),
            });
        }
        let v: Vec<_> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            matrix: ComplexMatrix::outer(&v, &v),
        })
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(k, k)] = ONE;
        Self { matrix: m }
    }

    /// I/d
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        }
    }

    /// The uniform superposition `(1/√d) Σ_k |k⟩`, i.e. `|+⟩` for d = 2.
    pub fn flat_superposition(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::ones(dim).scale_real(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Diagonal populations ρ_kk.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn entropy(&self) -> Result<f64> {
        crate::numerics::von_neumann_entropy(&self.matrix)
    }
}

/// The completely decohered state ρ∞: the diagonal of ρ.
pub fn asymptotic_state(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        matrix: ComplexMatrix::from_diagonal(&rho.matrix.diagonal()),
    }
}

/// Positive semidefinite matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    matrix: ComplexMatrix,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    /// The all-ones matrix (the identity channel).
    pub fn ones(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::ones(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn get(&self, k: usize, l: usize) -> Complex64 {
        self.matrix[(k, l)]
    }
}

pub fn validate_correlation(m: &ComplexMatrix) -> Result<CorrelationMatrix> {
    validate_correlation_with(m, &ToleranceProfile::default())
}

/// Checks Hermiticity, unit diagonal and positivity, in that order. Diagonal
/// entries within `tol.trace` of 1 are snapped to exactly 1.
pub fn validate_correlation_with(m: &ComplexMatrix, tol: &ToleranceProfile) -> Result<CorrelationMatrix> {
    let n = m.ensure_square()?;
    let deviation = m.hermitian_deviation();
    if deviation > tol.herm {
        return Err(Error::NotHermitian { deviation });
    }
    for k in 0..n {
        let z = m[(k, k)];
        if (z - ONE).norm() > tol.trace {
            return Err(Error::BadDiagonal {
                index: k,
                value: format!("{}{:+}i", z.re, z.im),
            });
        }
    }
    let mut matrix = m.clone();
    for k in 0..n {
        matrix[(k, k)] = ONE;
    }
    let eig = hermitian_eig_with(&matrix, tol)?;
    let min_eigenvalue = eig.min_eigenvalue();
    if min_eigenvalue < -tol.psd {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(CorrelationMatrix { matrix })
}

/// `E(O) = ξ ∘ O`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchurChannel {
    xi: CorrelationMatrix,
}

impl SchurChannel {
    pub fn new(xi: CorrelationMatrix) -> Self {
        Self { xi }
    }

    pub fn xi(&self) -> &CorrelationMatrix {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.xi.dim()
    }

    /// True iff every off-diagonal |ξ_kl| < 1, i.e. every state decays to ρ∞.
    pub fn complete(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (0..n).all(|l| k == l || self.xi.get(k, l).norm() < 1.0))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim() {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: format!("{0}x{0}", self.dim()),
                found: format!("{0}x{0}", found),
            })
        }
    }

    pub fn apply_heisenberg(&self, obs: &ComplexMatrix) -> Result<ComplexMatrix> {
        schur_product(self.xi.matrix(), obs)
    }

    /// `ξᵀ ∘ ρ`
    pub fn apply_schrodinger(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        let out = schur_product(&self.xi.matrix().transpose(), rho.matrix())?;
        DensityMatrix::new(out)
    }

    /// n-fold Schrödinger evolution via the elementwise n-th power of ξᵀ.
    pub fn iterate(&self, rho: &DensityMatrix, n: u32) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        let power = self.xi.matrix().transpose().map(|z| z.powu(n));
        let out = schur_product(&power, rho.matrix())?;
        DensityMatrix::new(out)
    }

    /// ⟨k,k|R_C|l,l⟩ = ξ_kl
    pub fn choi_operator(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut r = ComplexMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for l in 0..d {
                r[(k * d + k, l * d + l)] = self.xi.get(k, l);
            }
        }
        r
    }

    /// ⟨l,k|R_J|k,l⟩ = ξ_kl
    pub fn jamiolkowski_operator(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut r = ComplexMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for l in 0..d {
                r[(l * d + k, k * d + l)] = self.xi.get(k, l);
            }
        }
        r
    }

    /// The channel with correlation matrix `λ ξ₁ + (1 − λ) ξ₂`.
    pub fn mixture(a: &Self, b: &Self, lambda: f64) -> Result<Self> {
        a.check_dim(b.dim())?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::NotDistribution(format!("mixing weight {lambda}")));
        }
        let m = &a.xi.matrix().scale_real(lambda) + &b.xi.matrix().scale_real(1.0 - lambda);
        Ok(Self::new(validate_correlation(&m)?))
    }
}

/// `Σ_k |k⟩⟨k| O |k⟩⟨k|` for an arbitrary square operator.
pub fn diagonal_part(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { m[(i, i)] } else { ZERO })
}
