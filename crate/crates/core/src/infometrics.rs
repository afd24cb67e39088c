//! Entropy exchange and the information-flow bounds of a decoherence channel.
//!
//! All entropies are in bits.

use serde::{Deserialize, Serialize};

use crate::channels::{asymptotic_state, DensityMatrix, SchurChannel};
use crate::decomposition::{verify_decomposition, FlatDecomposition};
use crate::dilation::RANK_THRESHOLD;
use crate::error::{Error, Result};
use crate::numerics::{entropy_of_spectrum, hermitian_eig, numerical_rank, state_spectrum, ComplexMatrix, ToleranceProfile};

/// Slack allowed on the inequality checks.
pub const BOUND_SLACK: f64 = 1e-9;
/// Tolerance for accepting a supplied decomposition in [`bounds_report`].
pub const DECOMPOSITION_TOL: f64 = 1e-8;
const MAJORIZATION_TOL: f64 = 1e-10;

/// −Σ p log₂ p with 0·log 0 = 0.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::NotDistribution("empty".into()));
    }
    if let Some(bad) = p.iter().find(|&&x| x.is_nan() || x < 0.0 || !x.is_finite()) {
        return Err(Error::NotDistribution(format!("entry {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > ToleranceProfile::default().trace {
        return Err(Error::NotDistribution(format!("sums to {sum}")));
    }
    Ok(entropy_of_spectrum(p))
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `S(√ρ∞ ξ √ρ∞)`; the square root is taken entrywise on the diagonal ρ∞.
pub fn entropy_exchange(ch: &SchurChannel, rho: &DensityMatrix) -> Result<f64> {
    check_dims(ch.dim(), rho.dim())?;
    let roots: Vec<f64> = asymptotic_state(rho)
        .populations()
        .iter()
        .map(|p| p.max(0.0).sqrt())
        .collect();
    let xi = ch.xi().matrix();
    let m = ComplexMatrix::from_fn(ch.dim(), ch.dim(), |k, l| xi[(k, l)] * (roots[k] * roots[l]));
    Ok(entropy_of_spectrum(&state_spectrum(&m, &ToleranceProfile::default())?))
}

/// `S(W)` with `W_ij = √(p_i p_j) Tr[U_i ρ U_j†]`, the environment state in the
/// frame where the environment records the term index.
pub fn entropy_exchange_from_decomposition(dec: &FlatDecomposition, rho: &DensityMatrix) -> Result<f64> {
    check_dims(dec.dim(), rho.dim())?;
    let m = dec.num_terms();
    let unitaries: Vec<_> = (0..m).map(|i| dec.unitary(i)).collect();
    let p = dec.weights();
    let w = ComplexMatrix::from_fn(m, m, |i, j| {
        let t = (&(&unitaries[i] * rho.matrix()) * &unitaries[j].adjoint()).trace();
        t * (p[i] * p[j]).sqrt()
    });
    Ok(entropy_of_spectrum(&state_spectrum(&w, &ToleranceProfile::default())?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub dim: usize,
    pub rank: usize,
    /// Eigenvalues above `rank_threshold · λ_max` count toward the rank.
    pub rank_threshold: f64,
    /// S(ξ/d)
    pub s_xi_over_d: f64,
    /// S_ex(I/d), computed through the entropy-exchange formula.
    pub s_ex_maximal: f64,
    /// 2 log₂ rank ξ
    pub two_log_rank: f64,
    /// H(p) of the supplied decomposition.
    pub h_p: Option<f64>,
    /// S(ξ/d) ≤ H(p)
    pub lower_bound_satisfied: Option<bool>,
    /// H(p) ≤ 2 log₂ rank ξ. Informational: the bound is about the minimal
    /// decomposition, not every decomposition.
    pub upper_bound_satisfied: Option<bool>,
    /// Whether H(p) = S(ξ/d) is expected (orthogonal unitary family).
    pub orthogonal_family: Option<bool>,
    pub log_base: u32,
}

pub fn bounds_report(ch: &SchurChannel, dec: Option<&FlatDecomposition>) -> Result<BoundsReport> {
    let d = ch.dim();
    let eig = hermitian_eig(ch.xi().matrix())?;
    let rank = numerical_rank(&eig.eigenvalues, RANK_THRESHOLD);
    let spectrum: Vec<f64> = eig.eigenvalues.iter().map(|&x| (x / d as f64).max(0.0)).collect();
    let s_xi_over_d = entropy_of_spectrum(&spectrum);
    let s_ex_maximal = entropy_exchange(ch, &DensityMatrix::maximally_mixed(d))?;
    let two_log_rank = 2.0 * (rank.max(1) as f64).log2();

    let (h_p, lower, upper, orth) = match dec {
        Some(dec) => {
            let report = verify_decomposition(ch.xi(), dec, DECOMPOSITION_TOL)?;
            if !report.passed {
                return Err(Error::VerificationFailure(format!(
                    "reconstruction residual {:e}",
                    report.residual
                )));
            }
            let h = report.entropy_bits;
            (
                Some(h),
                Some(s_xi_over_d <= h + BOUND_SLACK),
                Some(h <= two_log_rank + BOUND_SLACK),
                Some(report.orthogonal_family),
            )
        }
        None => (None, None, None, None),
    };
    Ok(BoundsReport {
        dim: d,
        rank,
        rank_threshold: RANK_THRESHOLD,
        s_xi_over_d,
        s_ex_maximal,
        two_log_rank,
        h_p,
        lower_bound_satisfied: lower,
        upper_bound_satisfied: upper,
        orthogonal_family: orth,
        log_base: 2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProductionReport {
    pub s_input: f64,
    pub s_output: f64,
    pub s_exchange: f64,
    /// |S(E(ρ)) − S(ρ)|
    pub production: f64,
    pub satisfied: bool,
}

/// |S(E(ρ)) − S(ρ)| ≤ S_ex(ρ)
pub fn entropy_production_check(ch: &SchurChannel, rho: &DensityMatrix) -> Result<EntropyProductionReport> {
    check_dims(ch.dim(), rho.dim())?;
    let s_input = rho.entropy()?;
    let s_output = ch.apply_schrodinger(rho)?.entropy()?;
    let s_exchange = entropy_exchange(ch, rho)?;
    let production = (s_output - s_input).abs();
    Ok(EntropyProductionReport {
        s_input,
        s_output,
        s_exchange,
        production,
        satisfied: production <= s_exchange + BOUND_SLACK,
    })
}

/// True iff the diagonal of ρ is majorized by its spectrum.
pub fn majorization_check(rho: &DensityMatrix) -> bool {
    let Ok(eig) = hermitian_eig(rho.matrix()) else {
        return false;
    };
    let mut diag = rho.populations();
    diag.sort_by(|a, b| b.total_cmp(a));
    let mut partial_diag = 0.0;
    let mut partial_eig = 0.0;
    for (x, y) in diag.iter().zip(&eig.eigenvalues) {
        partial_diag += x;
        partial_eig += y;
        if partial_diag > partial_eig + MAJORIZATION_TOL {
            return false;
        }
    }
    (partial_diag - partial_eig).abs() <= MAJORIZATION_TOL
}
