//! Versioned TOML configuration shared by all subcommands.
//!
//! Frequencies are plain Hz (angular rates divided by 2π) and carry a
//! `_hz` suffix. Unknown keys are rejected.

use std::path::Path;

use cavcool::molecule::{oh_transition, vibrational_candidates};
use cavcool::rates::DampingMapSpec;
use cavcool::selforg::{thresholds, DispersiveSum, EnsembleConfig, NoiseModel};
use cavcool::steadystate::DriveConfig;
use cavcool::units::{from_hz, CavityGeometry, DerivedCavity, Transition};
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TRANSITION: &str = "P1(1)";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub transition: Option<String>,
    pub cavity: Option<CavitySection>,
    pub drive: Option<DriveSection>,
    pub coolmap: Option<CoolmapSection>,
    pub threshold: Option<ThresholdSection>,
    pub dynamics: Option<DynamicsSection>,
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CavityKind {
    SingleMode,
    Confocal,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub kind: CavityKind,
    pub length_m: f64,
    /// Single-mode only; a confocal cavity has R = L.
    pub radius_m: Option<f64>,
    pub finesse: f64,
    pub degradation: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub omega_p_hz: f64,
    pub delta_pa_hz: f64,
    pub omega_d_hz: Option<f64>,
    /// Defaults to −κ.
    pub delta_pc_hz: Option<f64>,
    /// Defaults to the realized coupling of [cavity].
    pub g_hz: Option<f64>,
    /// Defaults to half the transition decay rate.
    pub gamma_perp_hz: Option<f64>,
    /// Defaults to the decay rate of [cavity].
    pub kappa_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoolmapSection {
    pub kappa_hz: Option<f64>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub n_c: Option<usize>,
    pub delta_min_hz: Option<f64>,
    pub delta_max_hz: Option<f64>,
    pub n_delta: Option<usize>,
    pub red: Option<bool>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingChoice {
    /// Bare TEM₀₀ coupling g₀.
    #[default]
    G0,
    /// Multimode-enhanced coupling n_eff·g₀.
    GEff,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub temperature_k: f64,
    pub n_particles: f64,
    pub s_max: f64,
    pub delta_pa_hz: f64,
    #[serde(default)]
    pub coupling: CouplingChoice,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    DeskScale,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    #[serde(default)]
    pub preset: Preset,
    pub n_particles: Option<usize>,
    /// Pump in units of the mean-field threshold; exclusive with `omega_p_hz`.
    pub omega_p_over_threshold: Option<f64>,
    pub omega_p_hz: Option<f64>,
    pub u0_hz: Option<f64>,
    pub temperature_k: Option<f64>,
    pub omega_d_hz: Option<f64>,
    pub dt_s: Option<f64>,
    pub duration_s: Option<f64>,
    pub sample_interval_s: Option<f64>,
    pub seed: Option<u64>,
    pub noise_model: Option<NoiseModel>,
    pub momentum_noise_scale: Option<f64>,
    pub field_noise_scale: Option<f64>,
    pub dispersive_sum: Option<DispersiveSum>,
    pub raman_upsilon: Option<f64>,
    pub extent_wavelengths: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub fock_cutoff: Option<usize>,
    /// Enables the three-level shelving comparison.
    pub upsilon: Option<f64>,
}

pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<ConfigFile, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "schema_version: expected {SCHEMA_VERSION}, got {}",
            file.schema_version
        )));
    }
    Ok(file)
}

/// Looks up an electronic OH line or a vibrational band by name.
pub fn resolve_transition(name: &str) -> Result<Transition, CliError> {
    if let Ok(t) = oh_transition(name) {
        return Ok(t);
    }
    vibrational_candidates()
        .into_iter()
        .find(|t| t.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| CliError::Config(format!("transition: unknown line {name:?}")))
}

impl ConfigFile {
    pub fn transition(&self) -> Result<Transition, CliError> {
        resolve_transition(self.transition.as_deref().unwrap_or(DEFAULT_TRANSITION))
    }

    pub fn section<'a, T>(&'a self, name: &str, s: &'a Option<T>) -> Result<&'a T, CliError> {
        s.as_ref().ok_or_else(|| CliError::Config(format!("missing section [{name}]")))
    }

    pub fn derived_cavity(&self, t: &Transition) -> Result<Option<DerivedCavity>, CliError> {
        self.cavity.as_ref().map(|c| Ok(DerivedCavity::derive(t, &c.geometry()?)?)).transpose()
    }

    /// Operating point from [drive], filling gaps from the transition and
    /// [cavity].
    pub fn drive_config(&self, t: &Transition) -> Result<DriveConfig, CliError> {
        let d = self.section("drive", &self.drive)?;
        let cav = self.derived_cavity(t)?;
        let kappa = match (d.kappa_hz, &cav) {
            (Some(k), _) => from_hz(k),
            (None, Some(c)) => c.kappa,
            (None, None) => return Err(CliError::Config("drive.kappa_hz: required without [cavity]".into())),
        };
        let g = match (d.g_hz, &cav) {
            (Some(g), _) => from_hz(g),
            (None, Some(c)) => c.g_eff(),
            (None, None) => return Err(CliError::Config("drive.g_hz: required without [cavity]".into())),
        };
        Ok(DriveConfig {
            omega_p: from_hz(d.omega_p_hz),
            omega_d: from_hz(d.omega_d_hz.unwrap_or(0.0)),
            delta_pa: from_hz(d.delta_pa_hz),
            delta_pc: d.delta_pc_hz.map_or(-kappa, from_hz),
            g,
            gamma_perp: d.gamma_perp_hz.map_or_else(|| t.gamma_perp(), from_hz),
            kappa,
        }
        .validated()?)
    }

    pub fn coolmap_spec(&self, t: &Transition) -> Result<DampingMapSpec, CliError> {
        let c = self.coolmap.clone().unwrap_or_default();
        let base = DampingMapSpec::oh_default();
        let kappa = match (c.kappa_hz, self.derived_cavity(t)?) {
            (Some(k), _) => from_hz(k),
            (None, Some(d)) => d.kappa,
            (None, None) => base.kappa,
        };
        Ok(DampingMapSpec {
            kappa,
            gamma_perp: t.gamma_perp(),
            omega_rec: t.omega_rec,
            c_min: c.c_min.unwrap_or(base.c_min),
            c_max: c.c_max.unwrap_or(base.c_max),
            n_c: c.n_c.unwrap_or(base.n_c),
            delta_min_hz: c.delta_min_hz.unwrap_or(base.delta_min_hz),
            delta_max_hz: c.delta_max_hz.unwrap_or(base.delta_max_hz),
            n_delta: c.n_delta.unwrap_or(base.n_delta),
            red: c.red.unwrap_or(base.red),
        })
    }

    pub fn ensemble(&self) -> Result<EnsembleConfig, CliError> {
        let d = self.dynamics.clone().unwrap_or_default();
        let n = d.n_particles.unwrap_or(100);
        let Preset::DeskScale = d.preset;
        let mut cfg = EnsembleConfig::desk_scale(n, 1.0);
        if let Some(t) = d.temperature_k {
            cfg.temperature = t;
        }
        if let Some(u) = d.u0_hz {
            cfg = cfg.with_u0(from_hz(u));
        }
        cfg.omega_p = match (d.omega_p_hz, d.omega_p_over_threshold) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "dynamics.omega_p_hz: give either omega_p_hz or omega_p_over_threshold".into(),
                ))
            }
            (Some(op), None) => from_hz(op),
            (None, f) => {
                let th = thresholds(cfg.threshold_inputs(), n as f64, 0.5)?;
                f.unwrap_or(2.0) * th.omega_th_meanfield
            }
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.omega_d, d.omega_d_hz.map(from_hz));
        set(&mut cfg.dt, d.dt_s);
        set(&mut cfg.duration, d.duration_s);
        set(&mut cfg.sample_interval, d.sample_interval_s);
        set(&mut cfg.momentum_noise_scale, d.momentum_noise_scale);
        set(&mut cfg.field_noise_scale, d.field_noise_scale);
        set(&mut cfg.extent_wavelengths, d.extent_wavelengths);
        if let Some(s) = d.seed {
            cfg.seed = s;
        }
        if let Some(m) = d.noise_model {
            cfg.noise_model = m;
        }
        if let Some(s) = d.dispersive_sum {
            cfg.dispersive_sum = s;
        }
        cfg.raman_upsilon = d.raman_upsilon;
        cfg.validated()?;
        Ok(cfg)
    }
}

impl CavitySection {
    pub fn geometry(&self) -> Result<CavityGeometry, CliError> {
        let g = match self.kind {
            CavityKind::SingleMode => {
                let r = self
                    .radius_m
                    .ok_or_else(|| CliError::Config("cavity.radius_m: required for kind = \"single_mode\"".into()))?;
                CavityGeometry::single_mode(self.length_m, r, self.finesse)?
            }
            CavityKind::Confocal => {
                if self.radius_m.is_some_and(|r| r != self.length_m) {
                    return Err(CliError::Config("cavity.radius_m: a confocal cavity needs radius_m = length_m".into()));
                }
                CavityGeometry::confocal(self.length_m, self.finesse)?
            }
        };
        Ok(g.with_degradation(self.degradation.unwrap_or(1.0))?)
    }
}
