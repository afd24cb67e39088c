//! Completely decohering quantum channels as Schur-product maps.
//!
//! A channel that leaves every diagonal observable unchanged acts as
//! `O ↦ ξ ∘ O` for a correlation matrix ξ. This crate builds such channels,
//! their unitary dilations and random-unitary decompositions, simulates
//! environment-assisted correction (including the d-slit quantum eraser), and
//! evaluates the entropy bounds on the information that must be read from
//! the environment.

pub mod channels;
pub mod cli;
pub mod correction;
pub mod decomposition;
pub mod dilation;
pub mod error;
pub mod infometrics;
pub mod io;
pub mod numerics;
pub mod sampling;

pub use channels::{asymptotic_state, validate_correlation, CorrelationMatrix, DensityMatrix, SchurChannel};
pub use decomposition::{FlatDecomposition, SearchConfig};
pub use dilation::Dilation;
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, ToleranceProfile};
