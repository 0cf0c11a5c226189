//! Simulation and verification laboratory for the semilinear stochastic
//! fractional heat equation driven by noise that is white in time and
//! Riesz-colored in space.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//! kernel  ->  noise  ->  solver  ->  estimator
//!    \__________________________________/
//!                 verifier
//! ```
//!
//! * [`kernel`] evaluates the fractional heat kernel `p_t` (Fourier symbol
//!   `exp(-t (2π|ξ|)^α)`) together with every kernel-level quantity the
//!   scaling theory rests on: two-sided bound ratios, L¹ space/time moduli,
//!   Hölder smoothing gaps, and the Riesz-weighted spectral integrals.
//! * [`noise`] samples Gaussian increments with spatial covariance
//!   `dt · c_{1-β} |x|^{-β}` on a periodic grid and validates their
//!   statistics.
//! * [`solver`] integrates the mild solution with a spectral
//!   exponential-Euler scheme.
//! * [`estimator`] measures structure functions `E|Δu|^k`, fits scaling
//!   exponents, and compares them against the theorem-level bounds.
//! * [`verifier`] turns each inequality and closed-form identity into a
//!   deterministic numerical check with a [`report::CheckReport`].

pub mod error;
pub mod estimator;
pub mod fft;
pub mod grid;
pub mod kernel;
pub mod noise;
pub mod quad;
pub mod report;
pub mod rng;
pub mod solver;
pub mod special;
pub mod util;
pub mod verifier;

pub use error::{Error, Result};
