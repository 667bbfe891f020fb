//! Factorized semiclassical steady state of one two-level particle in a
//! pumped, driven cavity mode.
//!
//! With ⟨aσ⟩ ≈ ⟨a⟩⟨σ⟩ the steady state obeys
//!
//! ```text
//! α = (gζ + Ω_d/2)/(Δ_pc + iκ)
//! ζ = (Ω'/2)(Δ_pa − iγ⊥)/(|Ω'|²/2 + γ⊥² + Δ_pa²),   Ω' = 2gα + Ω_p
//! ```
//!
//! [`solve_self_consistent`] iterates this map; [`closed_form_unsaturated`]
//! is its linearization for s ≪ 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex64;

/// Pump, drive and detunings for one operating point (all rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Pump Rabi frequency Ω_p.
    pub omega_p: f64,
    /// Cavity drive strength Ω_d.
    pub omega_d: f64,
    /// Δ_pa = ω_p − ω_a.
    pub delta_pa: f64,
    /// Δ_pc = ω_p − ω_c.
    pub delta_pc: f64,
    /// Coupling at the particle position.
    pub g: f64,
    pub gamma_perp: f64,
    pub kappa: f64,
}

impl DriveConfig {
    pub fn validated(self) -> Result<Self> {
        if !(self.gamma_perp > 0.0) || !(self.kappa > 0.0) {
            return Err(Error::domain(format!(
                "need gamma_perp > 0 and kappa > 0, got {} and {}",
                self.gamma_perp, self.kappa
            )));
        }
        let all = [
            self.omega_p,
            self.omega_d,
            self.delta_pa,
            self.delta_pc,
            self.g,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(
                "drive configuration contains a non-finite value",
            ));
        }
        Ok(self)
    }

    /// Δ_ca = Δ_pc − Δ_pa = ω_a − ω_c.
    pub fn delta_ca(&self) -> f64 {
        self.delta_pc - self.delta_pa
    }

    /// Total decay rate γ = 2γ⊥.
    pub fn gamma(&self) -> f64 {
        2.0 * self.gamma_perp
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub alpha: Complex64,
    pub zeta: Complex64,
    pub sigma_ee: f64,
    /// Photon number of the empty driven cavity.
    pub n_c_bare: f64,
    pub s: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Iterations seeded from the empty and the saturated-atom field landed
    /// on different fixed points.
    pub multivalued: bool,
}

impl SteadyState {
    pub fn photon_number(&self) -> f64 {
        self.alpha.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Initial under-relaxation factor; halved whenever the residual grows.
    pub damping: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            damping: 0.5,
            max_iterations: 10_000,
            tolerance: 1e-12,
        }
    }
}

/// Photon number of the driven cavity without the particle,
/// (Ω_d²/4)/(κ² + Δ_pc²).
pub fn bare_photon_number(cfg: &DriveConfig) -> f64 {
    0.25 * cfg.omega_d * cfg.omega_d / (cfg.kappa * cfg.kappa + cfg.delta_pc * cfg.delta_pc)
}

/// Saturation parameter (Ω_p²/2)/(Δ_pa² + γ²/4).
pub fn saturation(cfg: &DriveConfig) -> f64 {
    let g = cfg.gamma();
    0.5 * cfg.omega_p * cfg.omega_p / (cfg.delta_pa * cfg.delta_pa + 0.25 * g * g)
}

/// Field sustained by a given atomic coherence, (gζ + Ω_d/2)/(Δ_pc + iκ).
pub fn field_from_coherence(cfg: &DriveConfig, zeta: Complex64) -> Complex64 {
    (cfg.g * zeta + 0.5 * cfg.omega_d) / Complex64::new(cfg.delta_pc, cfg.kappa)
}

/// Coherence and excited population driven by a given field, including
/// saturation through |Ω'|².
pub fn coherence_from_field(cfg: &DriveConfig, alpha: Complex64) -> (Complex64, f64) {
    let omega_eff = 2.0 * cfg.g * alpha + cfg.omega_p;
    let den =
        0.5 * omega_eff.norm_sqr() + cfg.gamma_perp * cfg.gamma_perp + cfg.delta_pa * cfg.delta_pa;
    let zeta = 0.5 * omega_eff * Complex64::new(cfg.delta_pa, -cfg.gamma_perp) / den;
    let sigma_ee = 0.25 * omega_eff.norm_sqr() / den;
    (zeta, sigma_ee)
}

fn iterate(cfg: &DriveConfig, seed: Complex64, opts: &SolverOptions) -> Result<(Complex64, usize)> {
    // Relaxation is preconditioned by the unsaturated slope dα'/dα so that
    // strong coupling (|slope| > 1) does not make the plain map unstable.
    let slope = cfg.g * cfg.g
        / (Complex64::new(cfg.delta_pa, cfg.gamma_perp) * Complex64::new(cfg.delta_pc, cfg.kappa));
    let precondition = 1.0 / (1.0 - slope);
    let mut alpha = seed;
    let mut damping = opts.damping;
    let mut last = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let (zeta, _) = coherence_from_field(cfg, alpha);
        let target = field_from_coherence(cfg, zeta);
        let step = target - alpha;
        residual = step.norm() / (1.0 + alpha.norm());
        if !residual.is_finite() {
            break;
        }
        if residual < opts.tolerance {
            return Ok((target, it));
        }
        if residual > last && damping > 1e-6 {
            damping *= 0.5;
        }
        last = residual;
        alpha += damping * precondition * step;
    }
    Err(Error::Convergence {
        iterations: opts.max_iterations,
        residual,
    })
}

pub fn solve_self_consistent(cfg: &DriveConfig) -> Result<SteadyState> {
    solve_with(cfg, &SolverOptions::default())
}

pub fn solve_with(cfg: &DriveConfig, opts: &SolverOptions) -> Result<SteadyState> {
    let cfg = cfg.validated()?;
    let (alpha, iterations) = iterate(&cfg, Complex64::new(0.0, 0.0), opts)?;
    let empty = field_from_coherence(&cfg, Complex64::new(0.0, 0.0));
    let multivalued = match iterate(&cfg, empty, opts) {
        Ok((other, _)) => {
            (other - alpha).norm() > 1e-6 * alpha.norm().max(other.norm()).max(f64::MIN_POSITIVE)
        }
        Err(_) => false,
    };
    if multivalued {
        log::warn!("multivalued steady state: the iteration from the empty-cavity field reaches another branch");
    }
    let (zeta, sigma_ee) = coherence_from_field(&cfg, alpha);
    Ok(SteadyState {
        alpha,
        zeta,
        sigma_ee,
        n_c_bare: bare_photon_number(&cfg),
        s: saturation(&cfg),
        converged: true,
        iterations,
        multivalued,
    })
}

/// Linearized (s ≪ 1) steady state.
pub fn closed_form_unsaturated(cfg: &DriveConfig) -> Result<SteadyState> {
    let cfg = cfg.validated()?;
    let s = saturation(&cfg);
    if s > 1.0 {
        return Err(Error::domain(format!(
            "closed form requires s <= 1, got {s}"
        )));
    }
    if s > 0.1 {
        log::warn!("closed-form steady state used at s = {s}");
    }
    let za = Complex64::new(cfg.delta_pa, cfg.gamma_perp);
    let zc = Complex64::new(cfg.delta_pc, cfg.kappa);
    let den = za * zc - cfg.g * cfg.g;
    let scale =
        (cfg.delta_pa.abs() + cfg.gamma_perp) * (cfg.delta_pc.abs() + cfg.kappa) + cfg.g * cfg.g;
    if den.norm() < 1e-30 * scale {
        return Err(Error::Singular(
            "dressed-state resonance in the closed-form field".into(),
        ));
    }
    let alpha = (0.5 * cfg.g * cfg.omega_p + 0.5 * cfg.omega_d * za) / den;
    let zeta = 0.5 * (2.0 * cfg.g * alpha + cfg.omega_p) / za;
    Ok(SteadyState {
        alpha,
        zeta,
        sigma_ee: zeta.norm_sqr(),
        n_c_bare: bare_photon_number(&cfg),
        s,
        converged: true,
        iterations: 0,
        multivalued: false,
    })
}
