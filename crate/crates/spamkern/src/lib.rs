//! Doubly-penalized kernel estimation for sparse additive models, the
//! theory-driven choice of its regularization parameters, and desk-scale
//! verification of the predicted convergence rates, packing bounds and
//! complexity sandwiches.
//!
//! Modules:
//! - [`kernels`]: univariate Mercer kernels with explicit eigen-expansions
//!   and per-coordinate Gram factorizations.
//! - [`rates`]: critical univariate rate, regularization parameters and
//!   closed-form rate comparators.
//! - [`estimator`]: block-coordinate solver for the penalized least-squares
//!   program in the Gram eigenbasis.
//! - [`simulate`]: synthetic data generation and exact error norms against
//!   known truths.
//! - [`bounds`]: packing constructions, hypothesis-testing error bounds and
//!   Monte Carlo Gaussian complexities.
//! - [`cli`]: experiment driver with CSV emission.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod kernels;
pub mod rates;
pub mod simulate;

pub use error::{Error, Result};
