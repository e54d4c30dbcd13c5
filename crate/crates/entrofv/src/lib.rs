//! Finite-volume solvers for linear anisotropic Fokker–Planck equations
//! `∂t u = div(Λ(∇u + u∇V))` on polygonal 2D domains, preserving the
//! entropy-dissipation structure of the continuous problem.
//!
//! Two nonlinear schemes are provided:
//! * a two-point flux approximation (TPFA) on admissible meshes ([`tpfa`]),
//! * a discrete duality finite-volume scheme (DDFV) on general meshes,
//!   including anisotropic tensors ([`ddfv`]).
//!
//! Both discretize the flux as `−τ r(u) Δ(log u + V)` with a configurable
//! two-point mean `r`, solve each backward-Euler step by projected Newton
//! iterations ([`newton`]), and expose entropy / dissipation functionals,
//! decay-rate fitting and discrete functional-inequality verifiers
//! ([`diagnostics`]).

pub mod cases;
pub mod ddfv;
pub mod ddfv_mesh;
pub mod diagnostics;
pub mod experiments;
pub mod geom;
pub mod kernels;
pub mod mesh;
pub mod newton;
pub mod par;
pub mod sparse;
pub mod tpfa;
mod tri_base;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },
    #[error("non-positive state value {value:.3e} at unknown {index}")]
    NonPositiveState { index: usize, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Newton did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("singular linear system (zero pivot at row {0})")]
    SingularMatrix(usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
