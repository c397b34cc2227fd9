//! Numerical harmonic analysis for the Bessel operator
//! `Δ_λ = -d²/dx² - (2λ/x) d/dx` on the half-line with measure `dμ_λ = x^{2λ} dx`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod kernels;
pub mod operators;
pub mod quad;
pub mod sampled;
pub mod specfun;
pub mod theory;

pub use error::{Error, Result};
