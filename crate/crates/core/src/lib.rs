//! Two-time correlation functions of a single damped, noise-driven bosonic
//! mode.
//!
//! The mode obeys the c-number Langevin equation
//!
//! ```text
//! dα/dt = −(μ/2)·α + β·α* + η(t),   ⟨η(t')η(t)⟩ = −B·δ(t−t'),   ⟨η*(t')η(t)⟩ = C·δ(t−t')
//! ```
//!
//! and its normally ordered moments are computed through several routes that
//! are checked against each other:
//!
//! * [`regression`]: closed-form moment equations, regression of two-time
//!   correlations through the transfer coefficients a±(τ), Isserlis closure of
//!   the fourth moment.
//! * [`sde`]: Monte Carlo integration of the Langevin equation with the raw
//!   fourth moment estimated from trajectories.
//! * [`qfunction`]: Gaussian Husimi Q-functions, anti-normal moments and
//!   their conversion to normal order.
//! * [`propagator`]: Gaussian coherent-state propagators chained together with
//!   coherent-state completeness relations.
//!
//! [`gaussint`] is the complex Gaussian integral engine behind the last two.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curve;
pub mod error;
pub mod gaussint;
mod linalg;
pub mod model;
pub mod propagator;
pub mod qfunction;
pub mod regression;
pub mod sde;

pub use curve::{Classification, CorrelationCurve, CorrelationShape, PhotonStatistics, TauGrid};
pub use error::{DomainError, Error, Result};
pub use model::{transfer_coeffs, validate_params, MomentState, SystemParams, TransferCoeffs};

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;
