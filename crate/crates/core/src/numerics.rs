//! Dense complex linear algebra for the small matrices used throughout the crate.
//!
//! Everything here works on row-major [`ComplexMatrix`] values. Composite
//! spaces are ordered system ⊗ environment with the environment index varying
//! fastest, so the joint basis state `|k, e⟩` lives at row `k * dim_env + e`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Off-diagonal Frobenius mass (relative to ‖A‖_F) at which Jacobi sweeps stop.
pub const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Candidates whose residual norm falls below this are skipped during completion.
pub const COMPLETION_SKIP: f64 = 1e-8;

/// Numerical tolerances shared by every validator in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceProfile {
    /// Max |a_kl - conj(a_lk)| accepted as Hermitian.
    pub herm: f64,
    /// Orthonormality and reconstruction tolerance.
    pub eig: f64,
    /// Eigenvalues >= -psd are accepted (and clamped to zero).
    pub psd: f64,
    /// Allowed deviation of a trace or a probability sum from 1.
    pub trace: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            herm: 1e-9,
            eig: 1e-9,
            psd: 1e-9,
            trace: 1e-9,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries ({}x{})", rows * cols, rows, cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    /// The all-ones matrix.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, n, |_, _| ONE)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix from row-major real entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Result<Self> {
        Self::new(n, n, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if cols == 0 || rows == 0 || columns.iter().any(|c| c.len() != rows) {
            return Err(Error::ShapeMismatch {
                expected: "non-empty columns of equal length".into(),
                found: format!("{} columns", cols),
            });
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix (the row count otherwise).
    pub fn dim(&self) -> usize {
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    pub fn ensure_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows == other.rows && self.cols == other.cols {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: self.shape_str(),
                found: other.shape_str(),
            })
        }
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        for (i, &v) in col.iter().enumerate() {
            self[(i, j)] = v;
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |a_kl - conj(a_lk)|; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for k in 0..n {
            for l in k..n {
                dev = dev.max((self[(k, l)] - self[(l, k)].conj()).norm());
            }
        }
        dev
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        let adj = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + adj[(i, j)]) * 0.5)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        Self::from_fn(r, c, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `self · m · self†`
    pub fn conjugate(&self, m: &Self) -> Self {
        &(self * m) * &self.adjoint()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// ⟨a|b⟩ = Σ conj(a_i) b_i
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn basis_vector(dim: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// Column j pairs with `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// V Λ V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj())
                .sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    hermitian_eig_with(a, &ToleranceProfile::default())
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of `a_pq` with a diagonal unitary and
/// then applies the classical real Jacobi rotation, so the 2x2 block becomes
/// diagonal exactly. Sweeps visit pairs `(p, q)` with `p < q` in row order.
pub fn hermitian_eig_with(a: &ComplexMatrix, tol: &ToleranceProfile) -> Result<HermitianEigen> {
    let n = a.ensure_square()?;
    let deviation = a.hermitian_deviation();
    if deviation > tol.herm {
        return Err(Error::NotHermitian { deviation });
    }
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase_conj = (apq / mag).conj();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase_conj * (-s);
    let g_qq = phase_conj * c;

    let n = m.rows();
    // A <- A G
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * g_pp + akq * g_qp;
        m[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G† A
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        m[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Number of eigenvalues above `rel_threshold * λ_max`.
pub fn numerical_rank(eigenvalues: &[f64], rel_threshold: f64) -> usize {
    let max = eigenvalues.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0;
    }
    eigenvalues.iter().filter(|&&x| x > rel_threshold * max).count()
}

/// Entrywise (Hadamard) product.
pub fn schur_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.ensure_same_shape(b)?;
    Ok(ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    })
}

fn check_composite(m: &ComplexMatrix, dim_sys: usize, dim_env: usize) -> Result<()> {
    let total = dim_sys * dim_env;
    if m.rows() != total || m.cols() != total || total == 0 {
        return Err(Error::ShapeMismatch {
            expected: format!("{}x{} ({} ⊗ {})", total, total, dim_sys, dim_env),
            found: m.shape_str(),
        });
    }
    Ok(())
}

/// Trace out the environment: `out_kl = Σ_e ⟨k,e|m|l,e⟩`.
pub fn partial_trace_env(m: &ComplexMatrix, dim_sys: usize, dim_env: usize) -> Result<ComplexMatrix> {
    check_composite(m, dim_sys, dim_env)?;
    Ok(ComplexMatrix::from_fn(dim_sys, dim_sys, |k, l| {
        (0..dim_env)
            .map(|e| m[(k * dim_env + e, l * dim_env + e)])
            .sum()
    }))
}

/// Trace out the system: `out_ef = Σ_k ⟨k,e|m|k,f⟩`.
pub fn partial_trace_sys(m: &ComplexMatrix, dim_sys: usize, dim_env: usize) -> Result<ComplexMatrix> {
    check_composite(m, dim_sys, dim_env)?;
    Ok(ComplexMatrix::from_fn(dim_env, dim_env, |e, f| {
        (0..dim_sys)
            .map(|k| m[(k * dim_env + e, k * dim_env + f)])
            .sum()
    }))
}

/// Extend orthonormal `columns` to a `total_dim`-dimensional unitary.
///
/// The given vectors become the leading columns verbatim. The remaining
/// columns come from Gram–Schmidt applied to the standard basis vectors in
/// index order, skipping any candidate whose residual norm is below
/// [`COMPLETION_SKIP`].
pub fn unitary_completion(columns: &[Vec<Complex64>], total_dim: usize) -> Result<ComplexMatrix> {
    unitary_completion_with(columns, total_dim, &ToleranceProfile::default())
}

pub fn unitary_completion_with(
    columns: &[Vec<Complex64>],
    total_dim: usize,
    tol: &ToleranceProfile,
) -> Result<ComplexMatrix> {
    if columns.len() > total_dim {
        return Err(Error::TooManyColumns {
            given: columns.len(),
            dim: total_dim,
        });
    }
    if let Some(bad) = columns.iter().find(|c| c.len() != total_dim) {
        return Err(Error::ShapeMismatch {
            expected: format!("vectors of length {}", total_dim),
            found: format!("length {}", bad.len()),
        });
    }
    let mut deviation: f64 = 0.0;
    for (i, a) in columns.iter().enumerate() {
        for (j, b) in columns.iter().enumerate().skip(i) {
            let target = if i == j { ONE } else { ZERO };
            deviation = deviation.max((inner(a, b) - target).norm());
        }
    }
    if deviation > tol.eig {
        return Err(Error::NotOrthonormal { deviation });
    }

    let mut basis: Vec<Vec<Complex64>> = columns.to_vec();
    for i in 0..total_dim {
        if basis.len() == total_dim {
            break;
        }
        let mut w = basis_vector(total_dim, i);
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let proj = inner(b, &w);
                for (wk, bk) in w.iter_mut().zip(b) {
                    *wk -= bk * proj;
                }
            }
        }
        let norm = vector_norm(&w);
        if norm < COMPLETION_SKIP {
            continue;
        }
        basis.push(w.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_columns(&basis)
}

/// −Σ λ log₂ λ, with 0·log 0 = 0. Inputs must be clamped already.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    von_neumann_entropy_with(rho, &ToleranceProfile::default())
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy_with(rho: &ComplexMatrix, tol: &ToleranceProfile) -> Result<f64> {
    let eig = state_spectrum(rho, tol)?;
    Ok(entropy_of_spectrum(&eig))
}

/// Eigenvalues of a density matrix, validated and clamped to be nonnegative.
pub fn state_spectrum(rho: &ComplexMatrix, tol: &ToleranceProfile) -> Result<Vec<f64>> {
    rho.ensure_square()?;
    let eig = hermitian_eig_with(rho, tol).map_err(|e| match e {
        Error::NotHermitian { deviation } => Error::NotState {
            reason: format!("not Hermitian (deviation {:e})", deviation),
        },
        other => other,
    })?;
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
        return Err(Error::NotState {
            reason: format!("trace is {} + {}i", trace.re, trace.im),
        });
    }
    let min = eig.min_eigenvalue();
    if min < -tol.psd {
        return Err(Error::NotState {
            reason: format!("negative eigenvalue {:e}", min),
        });
    }
    Ok(eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn eig_identity() {
        let r = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn eig_two_by_two_correlation() {
        // 1 ± |c| from the characteristic polynomial
        let a = ComplexMatrix::from_real(2, &[1.0, 0.6, 0.6, 1.0]).unwrap();
        let r = hermitian_eig(&a).unwrap();
        assert_close(r.eigenvalues[0], 1.6, 1e-14);
        assert_close(r.eigenvalues[1], 0.4, 1e-14);
        assert!(r.reconstruct().frobenius_distance(&a) < 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        let a = ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let r = hermitian_eig(&a).unwrap();
        assert_close(r.eigenvalues[0], 1.0, 1e-15);
        assert_close(r.eigenvalues[1], -1.0, 1e-15);
    }

    #[test]
    fn eig_complex_entries() {
        // [[2, i],[-i, 2]] has eigenvalues 3 and 1
        let a = ComplexMatrix::new(2, 2, vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let r = hermitian_eig(&a).unwrap();
        assert_close(r.eigenvalues[0], 3.0, 1e-14);
        assert_close(r.eigenvalues[1], 1.0, 1e-14);
        let v0 = r.eigenvectors.column(0);
        let av = a.mul_vec(&v0);
        for (x, y) in av.iter().zip(&v0) {
            assert!((x - y * 3.0).norm() < 1e-13);
        }
    }

    #[test]
    fn eig_errors() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare { .. })));
        let skew = ComplexMatrix::from_real(2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn schur_examples() {
        let rho = ComplexMatrix::new(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
        assert_eq!(schur_product(&ComplexMatrix::ones(2), &rho).unwrap(), rho);
        let diag = schur_product(&ComplexMatrix::identity(2), &rho).unwrap();
        assert_eq!(diag, ComplexMatrix::from_diagonal(&[c(0.7, 0.0), c(0.3, 0.0)]));

        let a = ComplexMatrix::from_real(2, &[1.0, 0.5, 0.5, 1.0]).unwrap();
        let b = ComplexMatrix::from_real(2, &[0.5; 4]).unwrap();
        let expected = ComplexMatrix::from_real(2, &[0.5, 0.25, 0.25, 0.5]).unwrap();
        assert_eq!(schur_product(&a, &b).unwrap(), expected);

        let bad = ComplexMatrix::zeros(3, 3);
        assert!(matches!(schur_product(&a, &bad), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = ComplexMatrix::new(2, 2, vec![c(0.6, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.4, 0.0)]).unwrap();
        let sigma = ComplexMatrix::from_real(3, &[0.5, 0.0, 0.0, 0.0, 0.25, 0.0, 0.0, 0.0, 0.25]).unwrap();
        let joint = rho.kron(&sigma);
        assert!(partial_trace_env(&joint, 2, 3).unwrap().frobenius_distance(&rho) < 1e-15);
        assert!(partial_trace_sys(&joint, 2, 3).unwrap().frobenius_distance(&sigma) < 1e-15);
        assert!(partial_trace_env(&joint, 3, 3).is_err());
    }

    #[test]
    fn partial_trace_bell() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = vec![c(s, 0.0), ZERO, ZERO, c(s, 0.0)];
        let proj = ComplexMatrix::outer(&phi, &phi);
        let reduced = partial_trace_env(&proj, 2, 2).unwrap();
        assert!(reduced.frobenius_distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_eraser_interaction() {
        // U|k,0> = |k,k>: CNOT with the system as control, built by hand.
        let mut u = ComplexMatrix::zeros(4, 4);
        for (from, to) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            u[(to, from)] = ONE;
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::outer(&[c(s, 0.0), c(s, 0.0)], &[c(s, 0.0), c(s, 0.0)]);
        let env0 = ComplexMatrix::outer(&basis_vector(2, 0), &basis_vector(2, 0));
        let out = u.conjugate(&plus.kron(&env0));
        let reduced = partial_trace_env(&out, 2, 2).unwrap();
        assert!(reduced.frobenius_distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn completion_examples() {
        let full: Vec<_> = (0..3).map(|i| basis_vector(3, i)).collect();
        assert_eq!(unitary_completion(&full, 3).unwrap(), ComplexMatrix::identity(3));
        assert_eq!(
            unitary_completion(&[basis_vector(4, 0)], 4).unwrap(),
            ComplexMatrix::identity(4)
        );

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = unitary_completion(&[vec![c(s, 0.0), c(s, 0.0)]], 2).unwrap();
        assert!((u[(0, 1)] - c(s, 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn completion_errors() {
        let too_many: Vec<_> = (0..3).map(|i| basis_vector(3, i)).collect();
        assert!(matches!(
            unitary_completion(&too_many, 2),
            Err(Error::TooManyColumns { .. }) | Err(Error::ShapeMismatch { .. })
        ));
        let not_ortho = vec![basis_vector(2, 0), vec![c(1.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(
            unitary_completion(&not_ortho, 2),
            Err(Error::NotOrthonormal { .. })
        ));
        let over = vec![basis_vector(2, 0), basis_vector(2, 1), basis_vector(2, 0)];
        assert!(matches!(unitary_completion(&over, 2), Err(Error::TooManyColumns { .. })));
    }

    #[test]
    fn entropy_examples() {
        let pure = ComplexMatrix::from_diagonal(&[ONE, ZERO]);
        assert_eq!(von_neumann_entropy(&pure).unwrap(), 0.0);
        let mixed = ComplexMatrix::identity(2).scale_real(0.5);
        assert_close(von_neumann_entropy(&mixed).unwrap(), 1.0, 1e-15);
        let d = ComplexMatrix::from_real(2, &[0.8, 0.0, 0.0, 0.2]).unwrap();
        // h(0.8) = -0.8 log2 0.8 - 0.2 log2 0.2
        assert_close(von_neumann_entropy(&d).unwrap(), 0.721_928_094_887_362_3, 1e-12);
    }

    #[test]
    fn entropy_rejects_non_states() {
        let twice = ComplexMatrix::identity(2);
        assert!(matches!(von_neumann_entropy(&twice), Err(Error::NotState { .. })));
        let neg = ComplexMatrix::from_real(2, &[1.2, 0.0, 0.0, -0.2]).unwrap();
        assert!(matches!(von_neumann_entropy(&neg), Err(Error::NotState { .. })));
    }

    #[test]
    fn rank() {
        assert_eq!(numerical_rank(&[2.0, 1e-12, 0.0], 1e-9), 1);
        assert_eq!(numerical_rank(&[1.0, 1.0, 1.0], 1e-9), 3);
        assert_eq!(numerical_rank(&[0.0], 1e-9), 0);
    }
}
