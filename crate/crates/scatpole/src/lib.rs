//! Scattering poles of sound-soft planar obstacles.
//!
//! The poles are located as the complex wavenumbers `κ` (with negative
//! imaginary part) at which a Fourier-Galerkin discretization of the
//! single-layer operator `S(κ)`, or of `I + D(κ)` with the double-layer
//! operator `D(κ)`, becomes singular. The pipeline is:
//!
//! 1. [`geometry`] - parametric boundary curves with analytic derivatives;
//! 2. [`specfun`] - complex-argument Bessel and Hankel functions;
//! 3. [`kernels`] - log-split kernel factors with exact diagonal limits;
//! 4. [`galerkin`] - trigonometric interpolation and matrix assembly;
//! 5. [`nepsolve`] - spectral-indicator scan and contour-moment refinement;
//! 6. [`diskoracle`] - independent ground truth for the unit disk.
//!
//! The [`run`] module drives the CLI subcommands and file outputs.

pub mod diskoracle;
pub mod galerkin;
pub mod geometry;
pub mod kernels;
pub mod nepsolve;
pub mod run;
pub mod specfun;

use thiserror::Error;

/// Errors produced anywhere in the pole-computation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Dimension(_) => 2,
            _ => 3,
        }
    }
}
