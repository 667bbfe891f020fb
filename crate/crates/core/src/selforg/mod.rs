//! Stochastic semiclassical dynamics of N pumped particles in one cavity
//! mode, self-organization potentials and superradiance thresholds.
//!
//! Particles move in the plane spanned by the cavity axis z and the pump
//! axis x. The cavity field α obeys
//!
//! ```text
//! α̇ = i[Δ_pc − U₀ S₁]α − [κ + Γ₀ Σcos²(kz)]α − η Σcos(kz)cos(kx) − iΩ_d/2 + ξ_α
//! ```
//!
//! where S₁ is Σcos(kz) or Σcos²(kz) depending on [`DispersiveSum`].

mod analysis;
mod dynamics;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{recoil_frequency, BOLTZMANN, HBAR, OH_MASS};
use crate::Complex64;

pub use analysis::{
    binomial_two_sided_p, detect_localization, loglog_slope, order_parameter, potential_depths,
    threshold_midpoint, thresholds, Localization, Parity, PotentialDepths, ThresholdInputs,
    ThresholdReport,
};
pub use dynamics::{
    field_derivative, field_fixed_point, forces, run, run_ensemble, scan_omega_p, step,
    EnsembleState, RunSummary, ScanRow, Trajectory, TrajectorySample,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    Off,
    /// Momentum diffusion from free-space scattering and vacuum-scale field
    /// noise.
    RecoilDiffusion,
}

/// Form of the position sum in the dispersive shift of the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersiveSum {
    /// Σcos(kz).
    Cos,
    /// Σcos²(kz).
    Cos2,
}

/// Dispersive shift U₀, field loss Γ₀ and effective pump η of one particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub u0: f64,
    pub gamma0: f64,
    pub eta: Complex64,
}

/// U₀ = g²Δ_pa/(Δ_pa² + γ⊥²), Γ₀ = g²γ⊥/(Δ_pa² + γ⊥²),
/// η = gΩ_p/(−iΔ_pa + γ⊥).
pub fn u0_gamma0_eta(g: f64, delta_pa: f64, gamma_perp: f64, omega_p: f64) -> Couplings {
    let den = delta_pa * delta_pa + gamma_perp * gamma_perp;
    Couplings {
        u0: g * g * delta_pa / den,
        gamma0: g * g * gamma_perp / den,
        eta: Complex64::new(g * omega_p, 0.0) / Complex64::new(gamma_perp, -delta_pa),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_particles: usize,
    /// Initial temperature (K).
    pub temperature: f64,
    pub mass: f64,
    /// Optical wavenumber (1/m).
    pub k: f64,
    pub kappa: f64,
    pub delta_pc: f64,
    pub delta_pa: f64,
    pub g: f64,
    pub gamma_perp: f64,
    pub omega_p: f64,
    /// Constant cavity seed drive.
    pub omega_d: f64,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
    pub noise_model: NoiseModel,
    /// Multiplier on the momentum diffusion of [`NoiseModel::RecoilDiffusion`].
    pub momentum_noise_scale: f64,
    /// Multiplier on the field noise of [`NoiseModel::RecoilDiffusion`].
    pub field_noise_scale: f64,
    pub dispersive_sum: DispersiveSum,
    /// Enables Raman shelving with this Rayleigh-to-Raman ratio.
    pub raman_upsilon: Option<f64>,
    /// Time between recorded samples (s).
    pub sample_interval: f64,
    /// Initial positions along z are uniform over this many wavelengths.
    pub extent_wavelengths: f64,
}

impl EnsembleConfig {
    /// A reduced-scale OH-like parameter set that self-organizes within a
    /// few hundred cavity lifetimes.
    ///
    /// κ = 100·ω_rec, γ⊥ = κ, g = 10κ and U₀ = −5·10⁻⁵κ, so the collective
    /// shift NU₀ stays below 0.04κ up to N = 800. Δ_pc = NU₀ − κ and the
    /// initial temperature is 5ħκ/k_B.
    pub fn desk_scale(n_particles: usize, omega_p_over_kappa: f64) -> Self {
        let lambda = 308.256e-9;
        let omega_rec = recoil_frequency(lambda, OH_MASS);
        let kappa = 100.0 * omega_rec;
        let g = 10.0 * kappa;
        let gamma_perp = kappa;
        EnsembleConfig {
            n_particles,
            temperature: 5.0 * HBAR * kappa / BOLTZMANN,
            mass: OH_MASS,
            k: TAU / lambda,
            kappa,
            delta_pc: 0.0,
            delta_pa: 0.0,
            g,
            gamma_perp,
            omega_p: omega_p_over_kappa * kappa,
            omega_d: 0.0,
            dt: 0.0025 / kappa,
            duration: 400.0 / kappa,
            seed: 1,
            noise_model: NoiseModel::RecoilDiffusion,
            momentum_noise_scale: 1.0,
            field_noise_scale: 1.0,
            dispersive_sum: DispersiveSum::Cos,
            raman_upsilon: None,
            sample_interval: 0.5 / kappa,
            extent_wavelengths: 10.0,
        }
        .with_u0(-5e-5 * kappa)
    }

    /// Sets Δ_pa to the far-detuned root giving dispersive shift `u0` and
    /// retunes Δ_pc = NU₀ − κ.
    pub fn with_u0(mut self, u0: f64) -> Self {
        let r = self.g * self.g / u0;
        self.delta_pa = 0.5 * (r + r.signum() * (r * r - 4.0 * self.gamma_perp * self.gamma_perp).sqrt());
        self.delta_pc = self.n_particles as f64 * u0 - self.kappa;
        self
    }

    pub fn validated(&self) -> Result<&Self> {
        if self.n_particles == 0 {
            return Err(Error::domain("need at least one particle"));
        }
        let positive = [
            ("temperature", self.temperature),
            ("mass", self.mass),
            ("k", self.k),
            ("kappa", self.kappa),
            ("gamma_perp", self.gamma_perp),
            ("dt", self.dt),
            ("duration", self.duration),
            ("sample_interval", self.sample_interval),
            ("extent_wavelengths", self.extent_wavelengths),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("delta_pc", self.delta_pc),
            ("delta_pa", self.delta_pa),
            ("g", self.g),
            ("omega_p", self.omega_p),
            ("omega_d", self.omega_d),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite")));
            }
        }
        if self.dt * self.kappa > 0.05 {
            return Err(Error::domain(format!(
                "dt·κ = {} exceeds the stability limit 0.05",
                self.dt * self.kappa
            )));
        }
        if self.momentum_noise_scale < 0.0 || self.field_noise_scale < 0.0 {
            return Err(Error::domain("noise multipliers must be non-negative"));
        }
        if let Some(u) = self.raman_upsilon {
            if !(u >= 0.0) {
                return Err(Error::domain(format!(
                    "raman_upsilon must be non-negative, got {u}"
                )));
            }
        }
        Ok(self)
    }

    pub fn couplings(&self) -> Couplings {
        u0_gamma0_eta(self.g, self.delta_pa, self.gamma_perp, self.omega_p)
    }

    pub fn wavelength(&self) -> f64 {
        TAU / self.k
    }

    /// Depth parameter of the pump lattice, U₀(Ω_p/g)² (rad/s).
    pub fn pump_shift(&self) -> f64 {
        self.omega_p * self.omega_p * self.delta_pa
            / (self.delta_pa * self.delta_pa + self.gamma_perp * self.gamma_perp)
    }

    /// Free-space scattering rate 2γ⊥Ω_p²/(4Δ_pa²) of one particle.
    pub fn free_space_rate(&self) -> f64 {
        2.0 * self.gamma_perp * self.omega_p * self.omega_p / (4.0 * self.delta_pa * self.delta_pa)
    }

    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn threshold_inputs(&self) -> ThresholdInputs {
        ThresholdInputs {
            kappa: self.kappa,
            delta_pa: self.delta_pa,
            g: self.g,
            temperature: self.temperature,
        }
    }
}
