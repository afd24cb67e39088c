//! JSON and CSV file formats.
//!
//! Matrices share one envelope: `{"kind", "dim", "entries"}` where `entries`
//! is the row-major list of `[re, im]` pairs. Floats are written with the
//! shortest representation that parses back to the same bits, so every file
//! round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{validate_correlation_with, CorrelationMatrix, DensityMatrix};
use crate::correction::ScreenPattern;
use crate::decomposition::FlatDecomposition;
use crate::dilation::Dilation;
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ToleranceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Correlation,
    State,
    Unitary,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnvelope {
    pub kind: MatrixKind,
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixEnvelope {
    pub fn from_matrix(kind: MatrixKind, m: &ComplexMatrix) -> Self {
        Self {
            kind,
            dim: m.rows(),
            entries: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Parse(format!(
                "dim {} needs {} entries, found {}",
                self.dim,
                self.dim * self.dim,
                self.entries.len()
            )));
        }
        ComplexMatrix::new(
            self.dim,
            self.dim,
            self.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub dim: usize,
    pub weights: Vec<f64>,
    /// Radians, one row per term.
    pub phases: Vec<Vec<f64>>,
}

impl From<&FlatDecomposition> for DecompositionFile {
    fn from(dec: &FlatDecomposition) -> Self {
        Self {
            dim: dec.dim(),
            weights: dec.weights().to_vec(),
            phases: dec.phases().to_vec(),
        }
    }
}

impl DecompositionFile {
    pub fn into_decomposition(self) -> Result<FlatDecomposition> {
        FlatDecomposition::new(self.dim, self.weights, self.phases)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSection {
    pub dim_sys: usize,
    pub dim_env: usize,
    pub initial_index: usize,
    /// `|e_k⟩` as lists of `[re, im]`.
    pub vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationFile {
    #[serde(flatten)]
    pub unitary: MatrixEnvelope,
    pub env: EnvironmentSection,
}

impl From<&Dilation> for DilationFile {
    fn from(dil: &Dilation) -> Self {
        Self {
            unitary: MatrixEnvelope::from_matrix(MatrixKind::Unitary, dil.unitary()),
            env: EnvironmentSection {
                dim_sys: dil.dim_sys(),
                dim_env: dil.dim_env(),
                initial_index: dil.env_initial_index(),
                vectors: dil
                    .env_vectors()
                    .iter()
                    .map(|e| e.iter().map(|z| [z.re, z.im]).collect())
                    .collect(),
            },
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn matrix_json(kind: MatrixKind, m: &ComplexMatrix) -> String {
    to_json(&MatrixEnvelope::from_matrix(kind, m))
}

pub fn parse_matrix(text: &str) -> Result<(MatrixKind, ComplexMatrix)> {
    let env: MatrixEnvelope = from_json(text)?;
    Ok((env.kind, env.to_matrix()?))
}

fn expect_kind(found: MatrixKind, wanted: MatrixKind) -> Result<()> {
    if found == wanted || found == MatrixKind::Generic {
        Ok(())
    } else {
        Err(Error::Parse(format!("expected kind {wanted:?}, found {found:?}")))
    }
}

/// Parse only; validation errors are reported separately from parse errors.
pub fn parse_correlation_matrix(text: &str) -> Result<ComplexMatrix> {
    let (kind, m) = parse_matrix(text)?;
    expect_kind(kind, MatrixKind::Correlation)?;
    Ok(m)
}

pub fn parse_correlation(text: &str, tol: &ToleranceProfile) -> Result<CorrelationMatrix> {
    validate_correlation_with(&parse_correlation_matrix(text)?, tol)
}

pub fn parse_state_matrix(text: &str) -> Result<ComplexMatrix> {
    let (kind, m) = parse_matrix(text)?;
    expect_kind(kind, MatrixKind::State)?;
    Ok(m)
}

pub fn parse_state(text: &str, tol: &ToleranceProfile) -> Result<DensityMatrix> {
    DensityMatrix::new_with(parse_state_matrix(text)?, tol)
}

pub fn parse_decomposition(text: &str) -> Result<FlatDecomposition> {
    from_json::<DecompositionFile>(text)?.into_decomposition()
}

pub fn decomposition_json(dec: &FlatDecomposition) -> String {
    to_json(&DecompositionFile::from(dec))
}

/// 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// `theta,intensity` rows.
pub fn pattern_csv(pattern: &ScreenPattern) -> String {
    let mut s = String::from("theta,intensity\n");
    for (t, i) in &pattern.points {
        let _ = writeln!(s, "{},{}", sig17(*t), sig17(*i));
    }
    s
}

/// Parses `theta,intensity` CSV back into points.
pub fn parse_pattern_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    if lines.next() != Some("theta,intensity") {
        return Err(Error::Parse("missing theta,intensity header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (a, b) = l.split_once(',').ok_or_else(|| Error::Parse(format!("bad row {l}")))?;
            let t = a.parse().map_err(|_| Error::Parse(format!("bad number {a}")))?;
            let i = b.parse().map_err(|_| Error::Parse(format!("bad number {b}")))?;
            Ok((t, i))
        })
        .collect()
}
