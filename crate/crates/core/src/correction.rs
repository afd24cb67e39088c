//! Environment-assisted correction: measure the environment, undo the heralded unitary.
//!
//! For a random-unitary decomposition the dilation stores the term index in
//! the environment. Reading it with a rank-one POVM heralds the Kraus operator
//! `√p_i U_i`, and conjugating by `U_i†` restores the input exactly. The
//! d-slit quantum eraser is the special case `ξ = I` read in the Fourier basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{validate_correlation, CorrelationMatrix, DensityMatrix, SchurChannel};
use crate::decomposition::{verify_decomposition, FlatDecomposition};
use crate::dilation::{build_dilation, Dilation};
use crate::error::{Error, Result};
use crate::infometrics::shannon_entropy;
use crate::numerics::{basis_vector, ComplexMatrix, ZERO};

/// Outcomes rarer than this are dropped from the records.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;
/// Largest accepted ‖recovered − ρ‖_F.
pub const RECOVERY_TOL: f64 = 1e-8;
/// Decomposition tolerance used before running a correction.
pub const VERIFY_TOL: f64 = 1e-8;
const POVM_TOL: f64 = 1e-9;

/// Rank-one POVM `{|v_i⟩⟨v_i|}` on the environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvPovm {
    dim_env: usize,
    effects: Vec<Vec<Complex64>>,
}

impl EnvPovm {
    /// Checks `Σ_i |v_i⟩⟨v_i| = I` within 1e-9.
    pub fn new(effects: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim_env = effects.first().map_or(0, Vec::len);
        if dim_env == 0 || effects.iter().any(|v| v.len() != dim_env) {
            return Err(Error::InvalidArgument("POVM effects must share a nonzero dimension".into()));
        }
        let mut sum = ComplexMatrix::zeros(dim_env, dim_env);
        for v in &effects {
            sum = &sum + &ComplexMatrix::outer(v, v);
        }
        let deviation = sum.max_abs_diff(&ComplexMatrix::identity(dim_env));
        if deviation > POVM_TOL {
            return Err(Error::IncompletePovm { deviation });
        }
        Ok(Self { dim_env, effects })
    }

    pub fn standard_basis(dim_env: usize) -> Self {
        Self {
            dim_env,
            effects: (0..dim_env).map(|i| basis_vector(dim_env, i)).collect(),
        }
    }

    /// `|ẽ_j⟩ = (1/√d) Σ_k e^{2πi jk/d} |k⟩`
    pub fn fourier(d: usize) -> Self {
        let norm = 1.0 / (d as f64).sqrt();
        Self {
            dim_env: d,
            effects: (0..d)
                .map(|j| {
                    (0..d)
                        .map(|k| Complex64::from_polar(norm, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn dim_env(&self) -> usize {
        self.dim_env
    }

    pub fn effects(&self) -> &[Vec<Complex64>] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionOutcomeRecord {
    pub outcome_index: usize,
    pub probability: f64,
    /// Renormalized system state after the environment reading.
    pub conditional_state: DensityMatrix,
    pub corrected_state: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionRun {
    pub records: Vec<CorrectionOutcomeRecord>,
    /// `Σ_i C_i(E_i ρ E_i†)`
    pub recovered: DensityMatrix,
    /// `Σ_i E_i ρ E_i†`, the channel output when the readings are discarded.
    pub uncorrected: DensityMatrix,
    /// ‖recovered − ρ‖_F
    pub residual: f64,
}

impl CorrectionRun {
    pub fn probabilities(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.probability).collect()
    }
}

/// Unnormalized conditional system states `(I ⊗ ⟨v_i|) ρ_joint (I ⊗ |v_i⟩)`.
pub fn measure_environment(dil: &Dilation, povm: &EnvPovm, rho: &DensityMatrix) -> Result<Vec<ComplexMatrix>> {
    if povm.dim_env() != dil.dim_env() {
        return Err(Error::DimensionMismatch {
            expected: dil.dim_env(),
            found: povm.dim_env(),
        });
    }
    let joint = dil.joint_state(rho)?;
    let (ds, de) = (dil.dim_sys(), dil.dim_env());
    Ok(povm
        .effects()
        .iter()
        .map(|v| {
            ComplexMatrix::from_fn(ds, ds, |k, l| {
                let mut s = ZERO;
                for e in 0..de {
                    for f in 0..de {
                        s += v[e].conj() * joint[(k * de + e, l * de + f)] * v[f];
                    }
                }
                s
            })
        })
        .collect())
}

/// Measure the environment and conjugate outcome i's state by `corrections[i]`.
pub fn measure_and_correct(
    dil: &Dilation,
    povm: &EnvPovm,
    corrections: &[ComplexMatrix],
    rho: &DensityMatrix,
) -> Result<CorrectionRun> {
    if corrections.len() != povm.len() {
        return Err(Error::DimensionMismatch {
            expected: povm.len(),
            found: corrections.len(),
        });
    }
    let branches = measure_environment(dil, povm, rho)?;
    let d = rho.dim();
    let mut recovered = ComplexMatrix::zeros(d, d);
    let mut uncorrected = ComplexMatrix::zeros(d, d);
    let mut records = Vec::new();
    for (i, (sigma, fix)) in branches.iter().zip(corrections).enumerate() {
        uncorrected = &uncorrected + sigma;
        let probability = sigma.trace().re;
        if probability < MIN_OUTCOME_PROBABILITY {
            continue;
        }
        let fixed = fix.conjugate(sigma);
        recovered = &recovered + &fixed;
        records.push(CorrectionOutcomeRecord {
            outcome_index: i,
            probability,
            conditional_state: DensityMatrix::new(sigma.scale_real(1.0 / probability))?,
            corrected_state: DensityMatrix::new(fixed.scale_real(1.0 / probability))?,
        });
    }
    let residual = recovered.frobenius_distance(rho.matrix());
    Ok(CorrectionRun {
        records,
        recovered: DensityMatrix::new(recovered)?,
        uncorrected: DensityMatrix::new(uncorrected)?,
        residual,
    })
}

fn check_self_consistent(dec: &FlatDecomposition) -> Result<CorrelationMatrix> {
    let xi = validate_correlation(&dec.reconstruct())?;
    let report = verify_decomposition(&xi, dec, VERIFY_TOL)?;
    if !report.passed {
        return Err(Error::VerificationFailure(format!(
            "flatness {:e}, weight sum {:e}",
            report.flatness_deviation, report.weight_sum_deviation
        )));
    }
    Ok(xi)
}

/// Dilation whose environment records the term index:
/// `|e_k⟩ = Σ_i √p_i conj(u_k⁽ⁱ⁾) |i⟩`, so `⟨e_k|e_l⟩ = ξ_kl` and reading
/// `|i⟩` heralds `√p_i U_i`.
pub fn dilation_from_decomposition(dec: &FlatDecomposition) -> Result<Dilation> {
    check_self_consistent(dec)?;
    let m = dec.num_terms();
    let vectors: Vec<_> = (0..m).map(|i| dec.phase_vector(i)).collect();
    let roots: Vec<f64> = dec.weights().iter().map(|p| p.sqrt()).collect();
    let env = (0..dec.dim())
        .map(|k| (0..m).map(|i| vectors[i][k].conj() * roots[i]).collect())
        .collect();
    Dilation::from_env_vectors(env, m)
}

/// The computational basis of the decomposition-frame environment.
pub fn correcting_povm(dec: &FlatDecomposition) -> EnvPovm {
    EnvPovm::standard_basis(dec.num_terms())
}

/// Simulates measurement of the environment followed by `σ ↦ U_i† σ U_i`.
pub fn run_correction(ch: &SchurChannel, dec: &FlatDecomposition, rho: &DensityMatrix) -> Result<CorrectionRun> {
    let report = verify_decomposition(ch.xi(), dec, VERIFY_TOL)?;
    if !report.passed {
        return Err(Error::VerificationFailure(format!(
            "reconstruction residual {:e}",
            report.residual
        )));
    }
    if rho.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        });
    }
    let dil = dilation_from_decomposition(dec)?;
    let povm = correcting_povm(dec);
    let corrections: Vec<_> = (0..dec.num_terms()).map(|i| dec.unitary(i).adjoint()).collect();
    let run = measure_and_correct(&dil, &povm, &corrections, rho)?;
    if run.residual > RECOVERY_TOL {
        return Err(Error::RecoveryFailure { residual: run.residual });
    }
    Ok(run)
}

/// `Z_j = Σ_k e^{2πi kj/d} |k⟩⟨k|`
pub fn clock_unitary(d: usize, j: usize) -> ComplexMatrix {
    let diag: Vec<_> = (0..d)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * ((k * j) % d) as f64 / d as f64))
        .collect();
    ComplexMatrix::from_diagonal(&diag)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationLedger {
    /// Which-way information written into the probe, maximized over inputs.
    pub stored_bits: f64,
    /// Shannon entropy of the Fourier readings on the maximally mixed input.
    pub extracted_bits: f64,
}

/// The d-slit quantum eraser: instantaneous dephasing `I ∘ ρ`, the probe
/// copying `|k⟩ ↦ |k⟩|k⟩_p`, and the probe read in the Fourier basis.
#[derive(Debug, Clone)]
pub struct EraserScenario {
    pub dim: usize,
    pub channel: SchurChannel,
    pub dilation: Dilation,
    pub povm: EnvPovm,
    /// Unitary heralded by Fourier outcome j, namely `Z_j†`.
    pub heralded: Vec<ComplexMatrix>,
    /// Correction applied on outcome j, namely `Z_j`.
    pub corrections: Vec<ComplexMatrix>,
    pub ledger: InformationLedger,
}

pub fn eraser_scenario(d: usize) -> Result<EraserScenario> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let channel = SchurChannel::new(CorrelationMatrix::identity(d));
    let dilation = build_dilation(&channel)?;
    let povm = EnvPovm::fourier(d);
    let corrections: Vec<_> = (0..d).map(|j| clock_unitary(d, j)).collect();
    let heralded = corrections.iter().map(ComplexMatrix::adjoint).collect();

    let stored_bits = dilation
        .environment_state(&DensityMatrix::maximally_mixed(d))?
        .entropy()?;
    let mixed = measure_environment(&dilation, &povm, &DensityMatrix::maximally_mixed(d))?;
    let probs: Vec<f64> = mixed.iter().map(|s| s.trace().re).collect();
    let extracted_bits = shannon_entropy(&probs)?;

    Ok(EraserScenario {
        dim: d,
        channel,
        dilation,
        povm,
        heralded,
        corrections,
        ledger: InformationLedger {
            stored_bits,
            extracted_bits,
        },
    })
}

impl EraserScenario {
    /// Read the probe in the Fourier basis and undo `Z_j†`.
    pub fn run(&self, rho: &DensityMatrix) -> Result<CorrectionRun> {
        let run = measure_and_correct(&self.dilation, &self.povm, &self.corrections, rho)?;
        if run.residual > RECOVERY_TOL {
            return Err(Error::RecoveryFailure { residual: run.residual });
        }
        Ok(run)
    }

    /// Read the probe in the which-way basis. Outcome k leaves `|k⟩⟨k|`, and
    /// no conditional unitary can bring the coherence back.
    pub fn which_way(&self, rho: &DensityMatrix) -> Result<Vec<CorrectionOutcomeRecord>> {
        let povm = EnvPovm::standard_basis(self.dim);
        let none = vec![ComplexMatrix::identity(self.dim); self.dim];
        let run = measure_and_correct(&self.dilation, &povm, &none, rho)?;
        Ok(run.records)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenPattern {
    /// (θ in radians, intensity)
    pub points: Vec<(f64, f64)>,
    /// (I_max − I_min)/(I_max + I_min)
    pub visibility: f64,
}

/// Phase-ray screen model: `I(θ) = ⟨θ|ρ|θ⟩` with `|θ⟩ = (1/√d) Σ_k e^{ikθ}|k⟩`,
/// sampled at `θ = 2π s / samples`. This is the smallest model that shows
/// fringes, flattens under dephasing and shifts under `Z_j`; it is not a
/// propagation model of a physical screen.
pub fn screen_pattern(rho: &DensityMatrix, samples: usize) -> Result<ScreenPattern> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {samples}")));
    }
    let d = rho.dim();
    let m = rho.matrix();
    let points: Vec<(f64, f64)> = (0..samples)
        .map(|s| {
            let theta = 2.0 * PI * s as f64 / samples as f64;
            let ray: Vec<Complex64> = (0..d).map(|k| Complex64::from_polar(1.0, k as f64 * theta)).collect();
            let mut acc = ZERO;
            for k in 0..d {
                for l in 0..d {
                    acc += ray[k].conj() * m[(k, l)] * ray[l];
                }
            }
            (theta, acc.re / d as f64)
        })
        .collect();
    let max = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let min = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let visibility = if max + min > 0.0 { (max - min) / (max + min) } else { 0.0 };
    Ok(ScreenPattern { points, visibility })
}
