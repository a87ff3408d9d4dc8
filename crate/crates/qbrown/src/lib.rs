//! Non-Markovian classical and quantum Brownian motion.
//!
//! The crate is organised around the correlational function `I(t)` of a
//! [`CorrelationKernel`], which multiplies every diffusion coefficient:
//!
//! - [`kernel`]: `I(t)`, its integral `J(t)` and the dimensionless `I(α)`.
//! - [`environment`]: diffusion energies of classical and quantum baths and
//!   the closure rule fixing `a`, `γ` and `t_c` from `ℰ_ℏ`.
//! - [`analytic`]: closed-form second moments and derived observables.
//! - [`sde`]: Euler-Maruyama Monte Carlo of the Langevin equations.
//! - [`fpe`]: finite-volume solver for the Rayleigh and Smoluchowski equations.
//! - [`rates`]: Kramers escape rates.
//! - [`cli`]: config-driven experiment runner behind the `qbrown` binary.
//!
//! Damping convention: a single `γ` is stored. Inertial dynamics damp the
//! momentum with `2γ`, non-inertial (overdamped) dynamics use `γ`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analytic;
pub mod cli;
pub mod environment;
mod error;
pub mod fpe;
pub mod kernel;
mod numeric;
pub mod rates;
pub mod sde;

pub use analytic::{GaussianState, InitialCondition, Observables, ParticleSpec, Potential};
pub use environment::{Environment, PhysicalConstants, HBAR, K_B};
pub use error::{Error, Result};
pub use kernel::CorrelationKernel;
