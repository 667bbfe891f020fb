//! Physical constants, unit conventions, and cavity/particle parameter
//! conversions.
//!
//! Internally every rate and detuning is an angular frequency in rad/s.
//! Two cooperativity conventions appear side by side:
//!
//! - the rate convention `C = g²/(2κγ⊥)`, equal to the ratio of cavity to
//!   free-space scattering rates ([`DerivedCavity::c_single`]);
//! - the Purcell convention `η = 3Qλ³/(4π²V) = g²/(κγ⊥)`
//!   ([`DerivedCavity::purcell`]), which is twice the rate convention and is
//!   the one used when quoting single-mode and confocal cavity cooperativities.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multimode;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of ¹⁶O¹H (kg).
pub const OH_MASS: f64 = 17.002_739_65 * ATOMIC_MASS_UNIT;

/// rad/s → Hz.
#[inline]
pub fn to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// Hz → rad/s.
#[inline]
pub fn from_hz(f: f64) -> f64 {
    f * TAU
}

/// Recoil frequency ħk²/2m for wavelength `lambda` and mass `mass`.
pub fn recoil_frequency(lambda: f64, mass: f64) -> f64 {
    let k = TAU / lambda;
    HBAR * k * k / (2.0 * mass)
}

/// An optical transition of the particle being cooled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub name: String,
    /// Wavelength (m).
    pub lambda: f64,
    /// Total excited-state energy decay rate γ = 2γ⊥ (rad/s).
    pub gamma: f64,
    /// Rayleigh-to-Raman branching ratio Υ.
    pub upsilon: f64,
    /// Particle mass (kg).
    pub mass: f64,
    /// Recoil frequency ħk²/2m (rad/s), derived on construction.
    pub omega_rec: f64,
    pub repumper_count: u32,
    pub notes: String,
}

impl Transition {
    pub fn new(
        name: impl Into<String>,
        lambda: f64,
        gamma: f64,
        upsilon: f64,
        mass: f64,
    ) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::domain(format!(
                "wavelength must be positive, got {lambda}"
            )));
        }
        if !(gamma > 0.0) {
            return Err(Error::domain(format!(
                "decay rate must be positive, got {gamma}"
            )));
        }
        if !(mass > 0.0) {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        if !(upsilon >= 0.0) {
            return Err(Error::domain(format!(
                "branching ratio must be non-negative, got {upsilon}"
            )));
        }
        Ok(Transition {
            name: name.into(),
            lambda,
            gamma,
            upsilon,
            mass,
            omega_rec: recoil_frequency(lambda, mass),
            repumper_count: 0,
            notes: String::new(),
        })
    }

    pub fn with_repumpers(mut self, count: u32) -> Self {
        self.repumper_count = count;
        self
    }

    pub fn with_notes(mut self, notes: impl Into<String>) -> Self {
        self.notes = notes.into();
        self
    }

    /// Optical wavenumber k = 2π/λ (1/m).
    pub fn wavenumber(&self) -> f64 {
        TAU / self.lambda
    }

    /// Dipole decay rate γ⊥ = γ/2 (rad/s).
    pub fn gamma_perp(&self) -> f64 {
        0.5 * self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeKind {
    SingleModeTEM00,
    ConfocalMultimode,
}

/// Mirror geometry and finesse of a two-mirror resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityGeometry {
    /// Mirror separation (m).
    pub length: f64,
    /// Mirror radius of curvature (m).
    pub radius: f64,
    pub finesse: f64,
    pub mode_kind: ModeKind,
    /// Fraction of the ideal multimode enhancement n_eff that is realized.
    pub degradation: f64,
}

impl CavityGeometry {
    pub fn single_mode(length: f64, radius: f64, finesse: f64) -> Result<Self> {
        CavityGeometry {
            length,
            radius,
            finesse,
            mode_kind: ModeKind::SingleModeTEM00,
            degradation: 1.0,
        }
        .validated()
    }

    /// Confocal resonator, R = L.
    pub fn confocal(length: f64, finesse: f64) -> Result<Self> {
        CavityGeometry {
            length,
            radius: length,
            finesse,
            mode_kind: ModeKind::ConfocalMultimode,
            degradation: 1.0,
        }
        .validated()
    }

    pub fn with_degradation(mut self, degradation: f64) -> Result<Self> {
        self.degradation = degradation;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.length > 0.0) {
            return Err(Error::domain(format!(
                "cavity length must be positive, got {}",
                self.length
            )));
        }
        if !(self.finesse > 1.0) {
            return Err(Error::domain(format!(
                "finesse must exceed 1, got {}",
                self.finesse
            )));
        }
        if !(self.radius > 0.0) {
            return Err(Error::domain(format!(
                "radius of curvature must be positive, got {}",
                self.radius
            )));
        }
        // stable symmetric resonator: 0 < L < 2R
        if self.length >= 2.0 * self.radius {
            return Err(Error::domain(format!(
                "unstable resonator: L = {} m must be below 2R = {} m",
                self.length,
                2.0 * self.radius
            )));
        }
        if !(self.degradation > 0.0 && self.degradation <= 1.0) {
            return Err(Error::domain(format!(
                "degradation must lie in (0, 1], got {}",
                self.degradation
            )));
        }
        if self.mode_kind == ModeKind::ConfocalMultimode
            && ((self.radius - self.length) / self.length).abs() > 1e-9
        {
            return Err(Error::domain(format!(
                "confocal cavity requires R = L, got R = {} m, L = {} m",
                self.radius, self.length
            )));
        }
        Ok(self)
    }
}

/// Cavity field decay rate κ = πc/(2LF) (rad/s).
pub fn kappa_from_finesse(length: f64, finesse: f64) -> Result<f64> {
    if !(length > 0.0) || !(finesse > 1.0) {
        return Err(Error::domain(format!(
            "need L > 0 and F > 1, got L = {length}, F = {finesse}"
        )));
    }
    Ok(PI * SPEED_OF_LIGHT / (2.0 * length * finesse))
}

/// Quality factor from κ: κ = πc/(λQ).
pub fn quality_factor(lambda: f64, kappa: f64) -> f64 {
    PI * SPEED_OF_LIGHT / (lambda * kappa)
}

/// Finesse from the quality factor: F = λQ/(2L).
pub fn finesse_from_quality(lambda: f64, q: f64, length: f64) -> f64 {
    lambda * q / (2.0 * length)
}

/// TEM₀₀ waist of a symmetric two-mirror resonator,
/// w₀² = (λ/2π)·√(L(2R − L)). Reduces to √(R/k) for L = R.
pub fn tem00_waist(geometry: &CavityGeometry, lambda: f64) -> f64 {
    let l = geometry.length;
    let r = geometry.radius;
    (lambda / TAU * (l * (2.0 * r - l)).sqrt()).sqrt()
}

/// Mode volume V_m = π w₀² L / 4.
pub fn mode_volume(w0: f64, length: f64) -> f64 {
    PI * w0 * w0 * length / 4.0
}

/// Single-particle coupling g = √(3cλ²γ⊥/(4πV_m)) at a field antinode.
pub fn coupling_from_volume(lambda: f64, gamma_perp: f64, volume: f64) -> f64 {
    (3.0 * SPEED_OF_LIGHT * lambda * lambda * gamma_perp / (4.0 * PI * volume)).sqrt()
}

/// Maximum single-particle coupling g₀ of the TEM₀₀ mode (rad/s).
pub fn coupling_g0(t: &Transition, c: &CavityGeometry) -> Result<f64> {
    let c = c.validated()?;
    let w0 = tem00_waist(&c, t.lambda);
    Ok(coupling_from_volume(
        t.lambda,
        t.gamma_perp(),
        mode_volume(w0, c.length),
    ))
}

/// Purcell factor η = 3Qλ³/(4π²V_m) of the TEM₀₀ mode.
///
/// Equal to g₀²/(κγ⊥), i.e. twice the rate-convention cooperativity.
pub fn purcell_factor(t: &Transition, c: &CavityGeometry) -> Result<f64> {
    let c = c.validated()?;
    let kappa = kappa_from_finesse(c.length, c.finesse)?;
    let q = quality_factor(t.lambda, kappa);
    let w0 = tem00_waist(&c, t.lambda);
    let v = mode_volume(w0, c.length);
    Ok(3.0 * q * t.lambda.powi(3) / (4.0 * PI * PI * v))
}

/// Scattering-language cooperativity 6F/(πk²w₀²).
///
/// With V_m = πw₀²L/4 this is exactly half of g₀²/(2κγ⊥); the factor is kept
/// explicit rather than folded into the mode volume.
pub fn cooperativity_scattering_form(finesse: f64, k: f64, w0: f64) -> f64 {
    6.0 * finesse / (PI * k * k * w0 * w0)
}

/// Cavity parameters derived from a transition and a geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedCavity {
    /// Field decay rate κ (rad/s).
    pub kappa: f64,
    /// TEM₀₀ waist (m).
    pub w0: f64,
    /// TEM₀₀ mode volume (m³).
    pub mode_volume: f64,
    /// Maximum single-mode coupling (rad/s).
    pub g0: f64,
    /// Realized multimode enhancement of g (1 for a single-mode cavity).
    pub n_eff: f64,
    /// Aberration-limited waist of the confocal mode family (m); w₀ for single mode.
    pub w_sa: f64,
    /// g₀²/(2κγ⊥).
    pub c_single: f64,
    /// g₀²/(κγ⊥) = 3Qλ³/(4π²V_m).
    pub purcell: f64,
    /// Multimode cooperativity n_eff²·η (η for a single-mode cavity).
    pub c_sa: f64,
    pub q: f64,
    /// Saturation photon number γ⊥²/(2g₀²).
    pub m0: f64,
    /// Critical particle number 2γ⊥κ/g₀².
    pub n0_crit: f64,
}

impl DerivedCavity {
    pub fn derive(t: &Transition, geometry: &CavityGeometry) -> Result<Self> {
        let c = geometry.validated()?;
        let kappa = kappa_from_finesse(c.length, c.finesse)?;
        let w0 = tem00_waist(&c, t.lambda);
        let v = mode_volume(w0, c.length);
        let gp = t.gamma_perp();
        let g0 = coupling_from_volume(t.lambda, gp, v);
        let g2 = g0 * g0;
        let c_single = g2 / (2.0 * kappa * gp);
        let purcell = g2 / (kappa * gp);
        let (n_eff, w_sa) = match c.mode_kind {
            ModeKind::SingleModeTEM00 => (1.0, w0),
            ModeKind::ConfocalMultimode => (
                c.degradation * multimode::n_eff_aberration(c.finesse, c.radius, t.lambda),
                multimode::aberration_waist(c.finesse, c.radius, t.lambda),
            ),
        };
        Ok(DerivedCavity {
            kappa,
            w0,
            mode_volume: v,
            g0,
            n_eff,
            w_sa,
            c_single,
            purcell,
            c_sa: purcell * n_eff * n_eff,
            q: quality_factor(t.lambda, kappa),
            m0: gp * gp / (2.0 * g2),
            n0_crit: 2.0 * gp * kappa / g2,
        })
    }

    /// Effective super-mode coupling n_eff·g₀.
    pub fn g_eff(&self) -> f64 {
        self.n_eff * self.g0
    }
}
