//! Solvers for Riesz-space fractional diffusion equations.
//!
//! The crate provides:
//! - shifted Grunwald-Letnikov discretizations in one and two dimensions
//!   with matrix-free Toeplitz / Kronecker products ([`toeplitz`]),
//! - symbol-level analysis of the operators and of the Galerkin multigrid
//!   coarse hierarchy ([`frac`], [`symbols`]),
//! - geometric and Galerkin multigrid with weighted Jacobi smoothing
//!   ([`multigrid`]),
//! - banded, circulant and tau-algebra preconditioners ([`prec`]) with
//!   CG/GMRES drivers ([`krylov`]),
//! - Tikhonov-regularized image deblurring with fractional-diffusion
//!   regularization ([`deblur`]),
//! - reference problems and benchmark tables ([`problems`], [`bench`]).

pub mod bench;
pub mod deblur;
pub mod error;
pub mod fft;
pub mod frac;
pub mod krylov;
pub mod multigrid;
pub mod prec;
pub mod problems;
pub mod report;
pub mod symbols;
pub mod toeplitz;

pub use error::{Result, RieszError};
pub use frac::FracOrder;
