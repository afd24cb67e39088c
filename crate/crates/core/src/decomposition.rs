//! Random-unitary decompositions of Schur channels.
//!
//! A decomposition is a probability vector together with flat (unimodular)
//! vectors `u⁽ⁱ⁾` such that `ξ = Σ_i p_i u⁽ⁱ⁾u⁽ⁱ⁾†`. Each term induces the
//! diagonal unitary `U_i = diag(conj u⁽ⁱ⁾)`, for which
//!
//! * Heisenberg picture: `Σ_i p_i U_i† O U_i = ξ ∘ O`
//! * Schrödinger picture: `Σ_i p_i U_i ρ U_i† = ξᵀ ∘ ρ`
//!
//! so the decomposition reproduces [`SchurChannel`] in both pictures.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{CorrelationMatrix, DensityMatrix, SchurChannel};
use crate::dilation::RANK_THRESHOLD;
use crate::error::{Error, Result};
use crate::infometrics::shannon_entropy;
use crate::numerics::{hermitian_eig, numerical_rank, ComplexMatrix, ZERO};
use crate::sampling::rng_for_stream;

/// Weights below this are dropped from closed-form decompositions.
pub const ZERO_WEIGHT: f64 = 1e-12;
/// Weights below this are pruned after a numerical search.
pub const PRUNE_WEIGHT: f64 = 1e-6;
/// Restarts run in fixed batches; the search stops after the first batch
/// that contains a success.
pub const RESTART_BATCH: usize = 8;
const POLISH_ITERS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct FlatDecomposition {
    dim: usize,
    weights: Vec<f64>,
    /// Phases θ_k of each flat vector, in radians, with θ_0 = 0.
    phases: Vec<Vec<f64>>,
}

impl FlatDecomposition {
    /// Validates shapes and weights. Phases are shifted so each vector starts at 0.
    pub fn new(dim: usize, weights: Vec<f64>, phases: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadDimension(dim));
        }
        if weights.is_empty() || weights.len() != phases.len() {
            return Err(Error::VerificationFailure(format!(
                "{} weights for {} phase vectors",
                weights.len(),
                phases.len()
            )));
        }
        if let Some(bad) = phases.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0 || !w.is_finite()) {
            return Err(Error::NotDistribution("weights must be positive".into()));
        }
        if phases.iter().flatten().any(|t| !t.is_finite()) {
            return Err(Error::Parse("non-finite phase".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotDistribution(format!("weights sum to {sum}")));
        }
        let phases = phases
            .into_iter()
            .map(|p| {
                if p[0] == 0.0 {
                    p
                } else {
                    let t0 = p[0];
                    p.iter().map(|t| wrap_phase(t - t0)).collect()
                }
            })
            .collect();
        Ok(Self { dim, weights, phases })
    }

    /// From flat vectors; the phase of each entry is read relative to entry 0.
    pub fn from_flat_vectors(dim: usize, weights: Vec<f64>, vectors: &[Vec<Complex64>]) -> Result<Self> {
        let phases = vectors
            .iter()
            .map(|u| u.iter().map(|z| (z * u[0].conj()).arg()).collect())
            .collect();
        Self::new(dim, weights, phases)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phases(&self) -> &[Vec<f64>] {
        &self.phases
    }

    /// Flat vector `u⁽ⁱ⁾` with entries `e^{iθ_k}`.
    pub fn phase_vector(&self, i: usize) -> Vec<Complex64> {
        self.phases[i].iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
    }

    /// `U_i = diag(conj u⁽ⁱ⁾)`
    pub fn unitary(&self, i: usize) -> ComplexMatrix {
        let diag: Vec<_> = self.phase_vector(i).iter().map(|z| z.conj()).collect();
        ComplexMatrix::from_diagonal(&diag)
    }

    /// Kraus operator `√p_i U_i`.
    pub fn kraus(&self, i: usize) -> ComplexMatrix {
        self.unitary(i).scale_real(self.weights[i].sqrt())
    }

    /// `Σ_i p_i u⁽ⁱ⁾u⁽ⁱ⁾†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.num_terms() {
            let u = self.phase_vector(i);
            m = &m + &ComplexMatrix::outer(&u, &u).scale_real(self.weights[i]);
        }
        m
    }

    /// Shannon entropy of the weights, in bits.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.weights).expect("weights are a distribution")
    }

    /// `Σ_i p_i U_i ρ U_i†`
    pub fn apply_schrodinger(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_dim(rho.dim())?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.num_terms() {
            out = &out + &self.unitary(i).conjugate(rho.matrix()).scale_real(self.weights[i]);
        }
        DensityMatrix::new(out)
    }

    /// `Σ_i p_i U_i† O U_i`
    pub fn apply_heisenberg(&self, obs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_dim(obs.rows())?;
        obs.ensure_square()?;
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for i in 0..self.num_terms() {
            out = &out + &self.unitary(i).adjoint().conjugate(obs).scale_real(self.weights[i]);
        }
        Ok(out)
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            })
        }
    }
}

/// Map an angle into (−π, π].
pub fn wrap_phase(t: f64) -> f64 {
    let mut x = t.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Spectral decomposition of a qubit correlation matrix.
///
/// For `ξ_01 = |c| e^{iφ}` the eigenvalues are `1 ± |c|` with flat
/// eigenvectors `(1, ±e^{-iφ})/√2`, giving weights `(1 ± |c|)/2`. A weight
/// below [`ZERO_WEIGHT`] is dropped (the channel is then unitary).
pub fn decompose_qubit(xi: &CorrelationMatrix) -> Result<FlatDecomposition> {
    if xi.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: xi.dim(),
        });
    }
    let c = xi.get(0, 1);
    let mag = c.norm().min(1.0);
    let phi = if mag > 0.0 { c.arg() } else { 0.0 };
    let plus = (1.0 + mag) / 2.0;
    let minus = (1.0 - mag) / 2.0;
    let mut weights = vec![plus];
    let mut phases = vec![vec![0.0, wrap_phase(-phi)]];
    if minus >= ZERO_WEIGHT {
        weights.push(minus);
        phases.push(vec![0.0, wrap_phase(PI - phi)]);
    } else {
        weights[0] = 1.0;
    }
    FlatDecomposition::new(2, weights, phases)
}

/// `ξ = I` as the uniform mixture of the d flat vectors `u⁽ʲ⁾_k = e^{2πi kj/d}`.
///
/// The induced unitaries are `Z_j† = Σ_k e^{−2πi kj/d}|k⟩⟨k|`, which run over
/// the same family `{Z_j}` as j varies.
pub fn decompose_identity_xi(d: usize) -> Result<FlatDecomposition> {
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let phases = (0..d)
        .map(|j| (0..d).map(|k| wrap_phase(2.0 * PI * ((k * j) % d) as f64 / d as f64)).collect())
        .collect();
    FlatDecomposition::new(d, vec![1.0 / d as f64; d], phases)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Number of terms; `None` means the Carathéodory bound d² − d + 1.
    pub terms: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    /// Frobenius reconstruction tolerance.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            terms: None,
            restarts: 32,
            max_iters: 5000,
            tol: 1e-8,
            seed: 0,
        }
    }
}

/// Numerical search for a flat decomposition.
///
/// Each term is parametrized by phases `θ_ki` (with `θ_0i = 0`) and a softmax
/// score. The off-diagonal residual of `ξ − Σ p_i u u†` is driven to zero
/// with Levenberg–Marquardt steps built from the analytic Jacobian. Restarts
/// are seeded from `(seed, restart index)` and run in batches of
/// [`RESTART_BATCH`]; among finished restarts the lowest residual wins, ties
/// going to the lower index, so the result does not depend on thread count.
pub fn flat_search(xi: &CorrelationMatrix, config: &SearchConfig) -> Result<FlatDecomposition> {
    let d = xi.dim();
    if d < 2 {
        return Err(Error::BadDimension(d));
    }
    let terms = config.terms.unwrap_or(d * d - d + 1).max(1);
    let problem = FlatProblem::new(xi);

    let mut best: Option<(f64, usize, FlatDecomposition)> = None;
    let mut done = 0;
    while done < config.restarts {
        let batch: Vec<usize> = (done..(done + RESTART_BATCH).min(config.restarts)).collect();
        let results: Vec<(f64, usize, FlatDecomposition)> = batch
            .par_iter()
            .map(|&r| {
                let dec = problem.solve(terms, config, r);
                let residual = reconstruction_residual(xi, &dec);
                (residual, r, dec)
            })
            .collect();
        done += batch.len();
        for cand in results {
            let better = match &best {
                None => true,
                Some((res, idx, _)) => cand.0 < *res || (cand.0 == *res && cand.1 < *idx),
            };
            if better {
                best = Some(cand);
            }
        }
        if best.as_ref().is_some_and(|b| b.0 <= config.tol) {
            break;
        }
    }
    match best {
        Some((residual, _, dec)) if residual <= config.tol => {
            let polished = problem.entropy_polish(&dec, config);
            if reconstruction_residual(xi, &polished) <= config.tol && polished.entropy() <= dec.entropy() {
                Ok(polished)
            } else {
                Ok(dec)
            }
        }
        Some((residual, _, _)) => Err(Error::NoDecompositionFound {
            residual,
            restarts: done,
        }),
        None => Err(Error::NoDecompositionFound {
            residual: f64::INFINITY,
            restarts: 0,
        }),
    }
}

/// Closed form where one is known (d = 2, ξ = I), numerical search otherwise.
pub fn decompose(xi: &CorrelationMatrix, config: &SearchConfig) -> Result<FlatDecomposition> {
    let d = xi.dim();
    if d == 2 {
        decompose_qubit(xi)
    } else if d > 2 && xi.matrix().max_abs_diff(&ComplexMatrix::identity(d)) <= config.tol {
        decompose_identity_xi(d)
    } else {
        flat_search(xi, config)
    }
}

/// ‖ξ − Σ p_i u u†‖_F
pub fn reconstruction_residual(xi: &CorrelationMatrix, dec: &FlatDecomposition) -> f64 {
    xi.matrix().frobenius_distance(&dec.reconstruct())
}

/// Off-diagonal least-squares problem behind [`flat_search`].
struct FlatProblem {
    dim: usize,
    pairs: Vec<(usize, usize)>,
    target: Vec<Complex64>,
}

impl FlatProblem {
    fn new(xi: &CorrelationMatrix) -> Self {
        let dim = xi.dim();
        let pairs: Vec<_> = (0..dim).flat_map(|k| ((k + 1)..dim).map(move |l| (k, l))).collect();
        let target = pairs.iter().map(|&(k, l)| xi.get(k, l)).collect();
        Self { dim, pairs, target }
    }

    fn theta(&self, x: &[f64], terms: usize, k: usize, i: usize) -> f64 {
        let _ = terms;
        if k == 0 {
            0.0
        } else {
            x[i * (self.dim - 1) + (k - 1)]
        }
    }

    fn weights(&self, x: &[f64], terms: usize) -> Vec<f64> {
        let scores = &x[terms * (self.dim - 1)..];
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / total).collect()
    }

    /// Real residual vector (re, im per upper-triangular pair).
    fn residual(&self, x: &[f64], terms: usize) -> Vec<f64> {
        let p = self.weights(x, terms);
        let mut r = Vec::with_capacity(2 * self.pairs.len());
        for (q, &(k, l)) in self.pairs.iter().enumerate() {
            let mut s = ZERO;
            for (i, &pi) in p.iter().enumerate() {
                s += Complex64::from_polar(pi, self.theta(x, terms, k, i) - self.theta(x, terms, l, i));
            }
            let diff = self.target[q] - s;
            r.push(diff.re);
            r.push(diff.im);
        }
        r
    }

    /// Row-major Jacobian of [`Self::residual`].
    fn jacobian(&self, x: &[f64], terms: usize) -> Vec<Vec<f64>> {
        let p = self.weights(x, terms);
        let n = x.len();
        let n_theta = terms * (self.dim - 1);
        let mut jac = Vec::with_capacity(2 * self.pairs.len());
        for &(k, l) in &self.pairs {
            let z: Vec<Complex64> = (0..terms)
                .map(|i| Complex64::from_polar(1.0, self.theta(x, terms, k, i) - self.theta(x, terms, l, i)))
                .collect();
            let mean: Complex64 = z.iter().zip(&p).map(|(zi, pi)| zi * pi).sum();
            let mut row_re = vec![0.0; n];
            let mut row_im = vec![0.0; n];
            for i in 0..terms {
                let a = z[i] * p[i];
                // d/dθ_ki of −p_i z_i is −i a; d/dθ_li is +i a
                if k > 0 {
                    let idx = i * (self.dim - 1) + (k - 1);
                    row_re[idx] += a.im;
                    row_im[idx] -= a.re;
                }
                if l > 0 {
                    let idx = i * (self.dim - 1) + (l - 1);
                    row_re[idx] -= a.im;
                    row_im[idx] += a.re;
                }
                let ds = -(z[i] - mean) * p[i];
                row_re[n_theta + i] = ds.re;
                row_im[n_theta + i] = ds.im;
            }
            jac.push(row_re);
            jac.push(row_im);
        }
        jac
    }

    fn decomposition(&self, x: &[f64], terms: usize) -> FlatDecomposition {
        let weights = self.weights(x, terms);
        let phases = (0..terms)
            .map(|i| (0..self.dim).map(|k| wrap_phase(self.theta(x, terms, k, i))).collect())
            .collect();
        FlatDecomposition::new(self.dim, weights, phases).expect("softmax weights are positive")
    }

    fn solve(&self, terms: usize, config: &SearchConfig, restart: usize) -> FlatDecomposition {
        let mut rng = rng_for_stream(config.seed, restart as u64);
        let n_theta = terms * (self.dim - 1);
        let mut x: Vec<f64> = (0..n_theta).map(|_| rng.random_range(-PI..PI)).collect();
        x.extend((0..terms).map(|_| rng.random_range(-1.0..1.0)));

        let target = config.tol * 1e-3;
        let x = self.levenberg_marquardt(x, terms, config.max_iters, target);
        let full = self.decomposition(&x, terms);

        // prune negligible terms and polish what is left
        let weights = self.weights(&x, terms);
        let keep: Vec<usize> = (0..terms).filter(|&i| weights[i] >= PRUNE_WEIGHT).collect();
        if keep.len() == terms || keep.is_empty() {
            return full;
        }
        let mut y: Vec<f64> = keep
            .iter()
            .flat_map(|&i| x[i * (self.dim - 1)..(i + 1) * (self.dim - 1)].to_vec())
            .collect();
        y.extend(keep.iter().map(|&i| x[n_theta + i]));
        let y = self.levenberg_marquardt(y, keep.len(), config.max_iters, target);
        let pruned = self.decomposition(&y, keep.len());
        let xi = self.xi_matrix();
        let pruned_res = xi.frobenius_distance(&pruned.reconstruct());
        if pruned_res <= config.tol || pruned_res <= xi.frobenius_distance(&full.reconstruct()) {
            pruned
        } else {
            full
        }
    }

    fn params_of(&self, dec: &FlatDecomposition) -> Vec<f64> {
        let mut x: Vec<f64> = dec.phases().iter().flat_map(|ph| ph[1..].to_vec()).collect();
        x.extend(dec.weights().iter().map(|p| p.ln()));
        x
    }

    fn entropy_of(&self, x: &[f64], terms: usize) -> f64 {
        crate::numerics::entropy_of_spectrum(&self.weights(x, terms))
    }

    fn feasible(&self, x: &[f64], terms: usize, tol: f64) -> bool {
        let r = self.residual(x, terms);
        (2.0 * r.iter().map(|v| v * v).sum::<f64>()).sqrt() <= tol
    }

    /// Lowers H(p) while staying on the feasible set: projected entropy
    /// gradient steps, each followed by a Gauss–Newton return to feasibility,
    /// plus removal of the lightest term whenever the rest can absorb it.
    fn entropy_polish(&self, dec: &FlatDecomposition, config: &SearchConfig) -> FlatDecomposition {
        let target = config.tol * 1e-3;
        let mut terms = dec.num_terms();
        let mut x = self.params_of(dec);
        let mut prune_below = 0.05;
        let n_theta = |t: usize| t * (self.dim - 1);

        for _ in 0..POLISH_ITERS {
            let p = self.weights(&x, terms);
            let h = crate::numerics::entropy_of_spectrum(&p);

            if terms > 1 {
                let (lightest, &p_min) = p
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.total_cmp(b.1))
                    .expect("at least one term");
                if p_min < prune_below {
                    let keep: Vec<usize> = (0..terms).filter(|&i| i != lightest).collect();
                    let mut y: Vec<f64> = keep
                        .iter()
                        .flat_map(|&i| x[i * (self.dim - 1)..(i + 1) * (self.dim - 1)].to_vec())
                        .collect();
                    y.extend(keep.iter().map(|&i| x[n_theta(terms) + i]));
                    let y = self.levenberg_marquardt(y, terms - 1, 200, target);
                    if self.feasible(&y, terms - 1, target * 10.0) && self.entropy_of(&y, terms - 1) < h {
                        x = y;
                        terms -= 1;
                        prune_below = 0.05;
                        continue;
                    }
                    prune_below = p_min / 2.0;
                }
            }

            // dH/ds_j = -p_j (log2 p_j + H); phases do not enter H
            let mut grad = vec![0.0; x.len()];
            for (j, &pj) in p.iter().enumerate() {
                grad[n_theta(terms) + j] = -pj * (pj.log2() + h);
            }
            let jac = self.jacobian(&x, terms);
            let m = jac.len();
            let mut jjt = vec![vec![0.0; m]; m];
            for a in 0..m {
                for b in 0..m {
                    jjt[a][b] = jac[a].iter().zip(&jac[b]).map(|(u, w)| u * w).sum();
                }
                jjt[a][a] += 1e-12;
            }
            let jg: Vec<f64> = jac.iter().map(|row| row.iter().zip(&grad).map(|(u, g)| u * g).sum()).collect();
            let Some(z) = solve_linear(jjt, jg) else {
                break;
            };
            let tangent: Vec<f64> = grad
                .iter()
                .enumerate()
                .map(|(k, g)| g - (0..m).map(|a| jac[a][k] * z[a]).sum::<f64>())
                .collect();
            let norm_sq: f64 = tangent.iter().map(|t| t * t).sum();
            if norm_sq < 1e-24 {
                break;
            }

            let mut step = 1.0;
            let mut moved = false;
            while step > 1e-10 {
                let cand: Vec<f64> = x.iter().zip(&tangent).map(|(xi, t)| xi - step * t).collect();
                let cand = self.levenberg_marquardt(cand, terms, 50, target);
                if self.feasible(&cand, terms, target * 10.0) {
                    let hc = self.entropy_of(&cand, terms);
                    if hc < h - 1e-4 * step * norm_sq {
                        x = cand;
                        moved = true;
                        break;
                    }
                }
                step /= 2.0;
            }
            if !moved {
                break;
            }
        }
        let x = self.levenberg_marquardt(x, terms, 100, target);
        self.decomposition(&x, terms)
    }

    fn xi_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.dim);
        for (q, &(k, l)) in self.pairs.iter().enumerate() {
            m[(k, l)] = self.target[q];
            m[(l, k)] = self.target[q].conj();
        }
        m
    }

    fn levenberg_marquardt(&self, mut x: Vec<f64>, terms: usize, max_iters: usize, target: f64) -> Vec<f64> {
        let sq = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
        // Frobenius residual counts both triangles
        let frob = |f: f64| (2.0 * f).sqrt();
        let mut r = self.residual(&x, terms);
        let mut f = sq(&r);
        let mut mu = 1e-3;
        let mut checkpoint = f;
        for iter in 0..max_iters {
            if frob(f) <= target {
                break;
            }
            let jac = self.jacobian(&x, terms);
            let m = jac.len();
            // (J Jᵀ + μ I) y = r, step = −Jᵀ y
            let mut jjt = vec![vec![0.0; m]; m];
            for a in 0..m {
                for b in a..m {
                    let v: f64 = jac[a].iter().zip(&jac[b]).map(|(u, w)| u * w).sum();
                    jjt[a][b] = v;
                    jjt[b][a] = v;
                }
            }
            let mut accepted = false;
            while mu < 1e12 {
                let mut sys = jjt.clone();
                for (a, row) in sys.iter_mut().enumerate() {
                    row[a] += mu;
                }
                let Some(y) = solve_linear(sys, r.clone()) else {
                    mu *= 4.0;
                    continue;
                };
                let cand: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .map(|(j, xj)| xj - (0..m).map(|a| jac[a][j] * y[a]).sum::<f64>())
                    .collect();
                let rc = self.residual(&cand, terms);
                let fc = sq(&rc);
                if fc < f {
                    x = cand;
                    r = rc;
                    f = fc;
                    mu = (mu / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                mu *= 4.0;
            }
            if !accepted {
                break;
            }
            if iter % 200 == 199 {
                if f > checkpoint * (1.0 - 1e-6) {
                    break;
                }
                checkpoint = f;
            }
        }
        x
    }
}

/// Gaussian elimination with partial pivoting; `None` if singular.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= factor * p;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub dim: usize,
    pub terms: usize,
    /// ‖ξ − Σ p_i u u†‖_F
    pub residual: f64,
    /// max | |u_k| − 1 |
    pub flatness_deviation: f64,
    /// |Σ p_i − 1|
    pub weight_sum_deviation: f64,
    pub entropy_bits: f64,
    /// `O_ij = Tr[U_i U_j†]/d` as [re, im] pairs, row-major.
    pub orthogonality: Vec<Vec<[f64; 2]>>,
    /// ‖O − I‖_max ≤ tol
    pub orthogonal_family: bool,
    pub tol: f64,
    pub passed: bool,
}

pub fn verify_decomposition(xi: &CorrelationMatrix, dec: &FlatDecomposition, tol: f64) -> Result<VerificationReport> {
    dec.check_dim(xi.dim())?;
    let d = dec.dim();
    let m = dec.num_terms();
    let vectors: Vec<_> = (0..m).map(|i| dec.phase_vector(i)).collect();
    let residual = reconstruction_residual(xi, dec);
    let flatness_deviation = vectors
        .iter()
        .flatten()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max);
    let weight_sum_deviation = (dec.weights().iter().sum::<f64>() - 1.0).abs();

    // Tr[U_i U_j†] = Σ_k conj(u_k⁽ⁱ⁾) u_k⁽ʲ⁾
    let mut orth_dev: f64 = 0.0;
    let orthogonality = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let o: Complex64 = vectors[i]
                        .iter()
                        .zip(&vectors[j])
                        .map(|(a, b)| a.conj() * b)
                        .sum::<Complex64>()
                        / d as f64;
                    let target = if i == j { 1.0 } else { 0.0 };
                    orth_dev = orth_dev.max((o - target).norm());
                    [o.re, o.im]
                })
                .collect()
        })
        .collect();

    let passed = residual <= tol && flatness_deviation <= tol && weight_sum_deviation <= tol;
    Ok(VerificationReport {
        dim: d,
        terms: m,
        residual,
        flatness_deviation,
        weight_sum_deviation,
        entropy_bits: dec.entropy(),
        orthogonality,
        orthogonal_family: orth_dev <= tol,
        tol,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extremality {
    /// d ≤ 3 and rank one.
    Extremal,
    /// d ≤ 3 and rank above one.
    NotExtremal,
    /// d ≥ 4 and rank one.
    RankOneExtremal,
    /// d ≥ 4 with rank above one: the rank test does not decide.
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalityVerdict {
    pub verdict: Extremality,
    pub rank: usize,
}

/// Extreme points of the correlation matrices in d ≤ 3 are exactly the rank-one ones.
pub fn extremality_test(xi: &CorrelationMatrix) -> ExtremalityVerdict {
    let eig = hermitian_eig(xi.matrix()).expect("correlation matrices are Hermitian");
    let rank = numerical_rank(&eig.eigenvalues, RANK_THRESHOLD);
    let verdict = match (xi.dim() <= 3, rank == 1) {
        (true, true) => Extremality::Extremal,
        (true, false) => Extremality::NotExtremal,
        (false, true) => Extremality::RankOneExtremal,
        (false, false) => Extremality::Undecided,
    };
    ExtremalityVerdict { verdict, rank }
}

/// Build the channel whose correlation matrix the decomposition reconstructs.
pub fn channel_of(dec: &FlatDecomposition) -> Result<SchurChannel> {
    Ok(SchurChannel::new(crate::channels::validate_correlation(&dec.reconstruct())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::validate_correlation;
    use crate::sampling::{random_correlation, rng_from_seed};

    fn xi_real(c: f64) -> CorrelationMatrix {
        validate_correlation(&ComplexMatrix::from_real(2, &[1.0, c, c, 1.0]).unwrap()).unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn qubit_identity_is_z_pair() {
        let dec = decompose_qubit(&CorrelationMatrix::identity(2)).unwrap();
        assert_eq!(dec.weights(), &[0.5, 0.5]);
        assert!(dec.unitary(0).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let sz = ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!(dec.unitary(1).max_abs_diff(&sz) < 1e-15);
    }

    #[test]
    fn qubit_real_overlap() {
        let dec = decompose_qubit(&xi_real(0.6)).unwrap();
        assert!((dec.weights()[0] - 0.8).abs() < 1e-15);
        assert!((dec.weights()[1] - 0.2).abs() < 1e-15);
        assert!((dec.entropy() - 0.721_928_094_887_362_3).abs() < 1e-12);
        assert!((dec.entropy() - binary_entropy(0.8)).abs() < 1e-15);
        assert!(reconstruction_residual(&xi_real(0.6), &dec) < 1e-15);
    }

    #[test]
    fn qubit_identity_channel_single_term() {
        let dec = decompose_qubit(&CorrelationMatrix::ones(2)).unwrap();
        assert_eq!(dec.num_terms(), 1);
        assert_eq!(dec.weights(), &[1.0]);
        assert!(dec.unitary(0).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn qubit_wrong_dimension() {
        assert!(matches!(
            decompose_qubit(&CorrelationMatrix::identity(3)),
            Err(Error::WrongDimension { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn qubit_complex_entry() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![Complex64::new(1.0, 0.0), Complex64::new(-0.3, 0.5), Complex64::new(-0.3, -0.5), Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        let xi = validate_correlation(&m).unwrap();
        let dec = decompose_qubit(&xi).unwrap();
        assert!(reconstruction_residual(&xi, &dec) < 1e-15);
    }

    #[test]
    fn identity_xi_closed_form() {
        let d2 = decompose_identity_xi(2).unwrap();
        assert!(d2.unitary(1).max_abs_diff(&ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap()) < 1e-15);

        let d3 = decompose_identity_xi(3).unwrap();
        assert_eq!(d3.num_terms(), 3);
        assert!((d3.entropy() - 3f64.log2()).abs() < 1e-15);
        for j in 0..3 {
            for (k, z) in d3.phase_vector(j).iter().enumerate() {
                let w = Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / 3.0);
                assert!((z - w).norm() < 1e-15);
            }
        }
        for d in 2..=8 {
            let dec = decompose_identity_xi(d).unwrap();
            assert!(dec.reconstruct().max_abs_diff(&ComplexMatrix::identity(d)) < 1e-14);
        }
        assert!(matches!(decompose_identity_xi(1), Err(Error::BadDimension(1))));
    }

    #[test]
    fn verification_flags() {
        for d in 2..=6 {
            let rep = verify_decomposition(&CorrelationMatrix::identity(d), &decompose_identity_xi(d).unwrap(), 1e-9).unwrap();
            assert!(rep.passed);
            assert!(rep.orthogonal_family);
        }
        let xi = xi_real(0.35);
        let rep = verify_decomposition(&xi, &decompose_qubit(&xi).unwrap(), 1e-9).unwrap();
        assert!(rep.passed && rep.orthogonal_family);

        // duplicate the first unitary and split its weight
        let dec = decompose_qubit(&xi).unwrap();
        let w = dec.weights();
        let ph = dec.phases();
        let padded = FlatDecomposition::new(
            2,
            vec![w[0] / 2.0, w[0] / 2.0, w[1]],
            vec![ph[0].clone(), ph[0].clone(), ph[1].clone()],
        )
        .unwrap();
        let rep = verify_decomposition(&xi, &padded, 1e-9).unwrap();
        assert!(rep.passed);
        assert!(!rep.orthogonal_family);

        assert!(verify_decomposition(&CorrelationMatrix::identity(3), &dec, 1e-9).is_err());
    }

    #[test]
    fn extremality_examples() {
        for d in 1..=5 {
            let v = extremality_test(&CorrelationMatrix::ones(d));
            assert_eq!(v.rank, 1);
            let expected = if d <= 3 { Extremality::Extremal } else { Extremality::RankOneExtremal };
            assert_eq!(v.verdict, expected);
        }
        assert_eq!(
            extremality_test(&CorrelationMatrix::identity(3)),
            ExtremalityVerdict { verdict: Extremality::NotExtremal, rank: 3 }
        );
        assert_eq!(
            extremality_test(&CorrelationMatrix::identity(4)),
            ExtremalityVerdict { verdict: Extremality::Undecided, rank: 4 }
        );
    }

    #[test]
    fn search_qubit_matches_closed_form() {
        let mut rng = rng_from_seed(11);
        for _ in 0..5 {
            let xi = random_correlation(2, &mut rng);
            let dec = flat_search(&xi, &SearchConfig::default()).unwrap();
            assert!(reconstruction_residual(&xi, &dec) <= 1e-8);
            let exact = decompose_qubit(&xi).unwrap();
            assert!((dec.entropy() - exact.entropy()).abs() < 1e-6, "{} vs {}", dec.entropy(), exact.entropy());
        }
    }

    #[test]
    fn search_identity_xi() {
        for d in 2..=4 {
            let xi = CorrelationMatrix::identity(d);
            let dec = flat_search(&xi, &SearchConfig::default()).unwrap();
            assert!(verify_decomposition(&xi, &dec, 1e-8).unwrap().passed);
        }
    }

    #[test]
    fn search_is_seed_deterministic() {
        let xi = random_correlation(3, &mut rng_from_seed(5));
        let cfg = SearchConfig { seed: 17, ..Default::default() };
        assert_eq!(flat_search(&xi, &cfg).unwrap(), flat_search(&xi, &cfg).unwrap());
    }

    #[test]
    fn phase_normalization() {
        let dec = FlatDecomposition::new(2, vec![1.0], vec![vec![0.5, 1.0]]).unwrap();
        assert_eq!(dec.phases()[0][0], 0.0);
        assert!((dec.phases()[0][1] - 0.5).abs() < 1e-15);
        assert!(FlatDecomposition::new(2, vec![0.5], vec![vec![0.0, 0.0]]).is_err());
        assert!(FlatDecomposition::new(2, vec![1.0, 0.0], vec![vec![0.0, 0.0]; 2]).is_err());
    }
}
