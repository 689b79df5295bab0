//! Hyperinterpolation on the unit ball `B^d` with Gegenbauer weights
//! `w_μ(x) = (1 - |x|²)^(μ - 1/2)` for half-integer `μ = m/2`.
//!
//! The crate is organised bottom-up:
//!
//! - [`orthopoly`]: Gegenbauer and Jacobi polynomials, Gauss–Jacobi rules.
//! - [`cubature`]: positive-weight rules on spheres and weighted balls, and the
//!   constructions that move rules between `(B^d, w_{m/2})` and `S^{d+m}`.
//! - [`kernels`]: zonal reproducing kernels on spheres and the ball kernel obtained
//!   by integrating a sphere kernel over an auxiliary sphere `S^m`.
//! - [`hyperinterp`]: the hyperinterpolation operator, its Lebesgue function,
//!   grid estimates of the Lebesgue constant, and log–log growth fits.
//! - [`oracle`]: exact monomial integrals and Gram–Schmidt orthonormal bases used
//!   as independent ground truth.

pub mod cubature;
mod error;
pub mod hyperinterp;
pub mod kernels;
pub mod oracle;
pub mod orthopoly;
pub mod special;

pub use error::{Error, Result};
