//! Calkin-space sequence algebra and s-number bounds for elementary operators
//! on matrix algebras.
//!
//! The crate is organised bottom-up:
//!
//! - [`seqkit`]: decreasing rearrangements, sequence tensor products,
//!   finite-horizon domination and Lorentz norms.
//! - [`calkin`]: counting profiles, principal-space membership and
//!   stability deciders for singly generated Calkin spaces.
//! - [`linalg`]: dense complex matrices, SVD, Kronecker products and
//!   singular-value inequalities.
//! - [`elemop`]: elementary operators `X -> sum A_i X B_i`, their
//!   Hilbert-Schmidt singular numbers, and certified upper/lower bounds on
//!   approximation and Hilbert numbers.
//! - [`blockalg`]: finite block algebras, pinchings and restricted
//!   elementary operators.

pub mod blockalg;
pub mod calkin;
pub mod elemop;
mod error;
pub mod linalg;
pub mod sampling;
pub mod seqkit;

pub use error::{Error, Result};

/// Tolerance for inequality checks.
pub const INEQ_TOL: f64 = 1e-9;
/// Tolerance for identities.
pub const IDENTITY_TOL: f64 = 1e-12;
