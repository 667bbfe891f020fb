//! Semiclassical cavity-QED toolkit for cavity-assisted laser cooling of
//! molecules.
//!
//! The crate is organised bottom-up:
//!
//! - [`units`]: physical constants, transitions, cavity geometry and the
//!   derived cavity parameters (κ, waist, mode volume, g₀, cooperativities).
//! - [`steadystate`]: factorized semiclassical steady state of a single
//!   driven particle in a driven cavity.
//! - [`rates`]: cavity / free-space scattering rates, Doppler-shifted cavity
//!   scattering, cooling rates, temperature scales and the strong-coupling
//!   damping-ratio map.
//! - [`molecule`]: three-level Raman-loss bookkeeping and the embedded OH
//!   transition dataset.
//! - [`multimode`]: confocal multimode enhancement and cavity design sweeps.
//! - [`selforg`]: stochastic N-particle dynamics, self-organization
//!   potentials and superradiance thresholds.
//! - [`oracle`]: exact truncated-Fock master equation solver used to check the
//!   semiclassical results.
//! - [`scenario`]: transit-time kinematics and decelerator zone presets.
//!
//! All rates and detunings are angular frequencies (rad/s). Values quoted in
//! Hz are divided by 2π at the edges (see [`units::to_hz`]).

pub mod error;
pub mod molecule;
pub mod multimode;
pub mod oracle;
pub mod rates;
pub mod scenario;
pub mod selforg;
pub mod steadystate;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
