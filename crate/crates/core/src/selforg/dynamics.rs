use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analysis::{detect_localization, order_parameter, Localization};
use super::{DispersiveSum, EnsembleConfig, NoiseModel};
use crate::error::{Error, Result};
use crate::units::{BOLTZMANN, HBAR};
use crate::Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleState {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub pz: Vec<f64>,
    pub px: Vec<f64>,
    pub alpha: Complex64,
    pub t: f64,
    /// False once a particle has been Raman-shelved into a dark state.
    pub bright: Vec<bool>,
}

impl EnsembleState {
    /// z uniform over the configured extent, momenta thermal and α = 0.
    /// Along x the particles start thermalized in the harmonic
    /// approximation of the central pump well when the pump lattice is
    /// attractive, otherwise uniform over one wavelength.
    pub fn initial<R: Rng + ?Sized>(cfg: &EnsembleConfig, rng: &mut R) -> Self {
        let n = cfg.n_particles;
        let lambda = cfg.wavelength();
        let p_sigma = (cfg.mass * BOLTZMANN * cfg.temperature).sqrt();
        let ps = cfg.pump_shift();
        let x_sigma = if ps < 0.0 {
            let omega_x2 = 2.0 * HBAR * ps.abs() * cfg.k * cfg.k / cfg.mass;
            Some((BOLTZMANN * cfg.temperature / (cfg.mass * omega_x2)).sqrt())
        } else {
            None
        };
        let mut normal = |s: f64| s * rng.sample::<f64, _>(StandardNormal);
        let pz: Vec<f64> = (0..n).map(|_| normal(p_sigma)).collect();
        let px: Vec<f64> = (0..n).map(|_| normal(p_sigma)).collect();
        let x: Vec<f64> = match x_sigma {
            Some(s) => (0..n).map(|_| normal(s)).collect(),
            None => (0..n).map(|_| rng.random::<f64>() * lambda).collect(),
        };
        let z = (0..n)
            .map(|_| rng.random::<f64>() * cfg.extent_wavelengths * lambda)
            .collect();
        EnsembleState {
            z,
            x,
            pz,
            px,
            alpha: Complex64::new(0.0, 0.0),
            t: 0.0,
            bright: vec![true; n],
        }
    }

    pub fn n_bright(&self) -> usize {
        self.bright.iter().filter(|&&b| b).count()
    }

    /// Mean kinetic energy per particle, total and along z (J).
    pub fn kinetic_energy(&self, mass: f64) -> (f64, f64) {
        let n = self.z.len().max(1) as f64;
        let kz: f64 = self.pz.iter().map(|p| p * p).sum::<f64>() / (2.0 * mass * n);
        let kx: f64 = self.px.iter().map(|p| p * p).sum::<f64>() / (2.0 * mass * n);
        (kz + kx, kz)
    }

    /// ⟨cos(kz)cos(kx)⟩ over all particles.
    pub fn checkerboard(&self, k: f64) -> f64 {
        if self.z.is_empty() {
            return 0.0;
        }
        self.z
            .iter()
            .zip(&self.x)
            .map(|(z, x)| (k * z).cos() * (k * x).cos())
            .sum::<f64>()
            / self.z.len() as f64
    }
}

/// Sines and cosines of kz and kx for every particle.
struct Phases {
    sz: Vec<f64>,
    cz: Vec<f64>,
    sx: Vec<f64>,
    cx: Vec<f64>,
}

impl Phases {
    fn of(state: &EnsembleState, k: f64) -> Self {
        let (sz, cz) = state.z.iter().map(|z| (k * z).sin_cos()).unzip();
        let (sx, cx) = state.x.iter().map(|x| (k * x).sin_cos()).unzip();
        Phases { sz, cz, sx, cx }
    }
}

/// Linear rate λ and inhomogeneous drive b with α̇ = λα + b.
fn field_terms(ph: &Phases, bright: &[bool], cfg: &EnsembleConfig) -> (Complex64, Complex64) {
    let (mut dispersive, mut cos2, mut pump) = (0.0, 0.0, 0.0);
    for j in 0..ph.cz.len() {
        if !bright[j] {
            continue;
        }
        let cz = ph.cz[j];
        cos2 += cz * cz;
        pump += cz * ph.cx[j];
        dispersive += match cfg.dispersive_sum {
            DispersiveSum::Cos => cz,
            DispersiveSum::Cos2 => cz * cz,
        };
    }
    let c = cfg.couplings();
    let lambda = Complex64::new(
        -(cfg.kappa + c.gamma0 * cos2),
        cfg.delta_pc - c.u0 * dispersive,
    );
    let drive = -c.eta * pump - Complex64::new(0.0, cfg.omega_d / 2.0);
    (lambda, drive)
}

fn forces_from(
    ph: &Phases,
    bright: &[bool],
    alpha: Complex64,
    cfg: &EnsembleConfig,
) -> (Vec<f64>, Vec<f64>) {
    let c = cfg.couplings();
    let a2 = alpha.norm_sqr();
    let interference = -2.0 * (c.eta.conj() * alpha).im;
    let ps = cfg.pump_shift();
    let hk = HBAR * cfg.k;
    let n = ph.cz.len();
    let (mut fz, mut fx) = (vec![0.0; n], vec![0.0; n]);
    for j in 0..n {
        if !bright[j] {
            continue;
        }
        let (sz, cz, sx, cx) = (ph.sz[j], ph.cz[j], ph.sx[j], ph.cx[j]);
        fz[j] = hk * (2.0 * c.u0 * a2 * cz * sz + interference * cx * sz);
        fx[j] = hk * (2.0 * ps * cx * sx + interference * sx * cz);
    }
    (fz, fx)
}

/// Deterministic part of α̇.
pub fn field_derivative(state: &EnsembleState, cfg: &EnsembleConfig) -> Complex64 {
    let (lambda, drive) = field_terms(&Phases::of(state, cfg.k), &state.bright, cfg);
    lambda * state.alpha + drive
}

/// Stationary field for frozen particle positions.
pub fn field_fixed_point(state: &EnsembleState, cfg: &EnsembleConfig) -> Complex64 {
    let (lambda, drive) = field_terms(&Phases::of(state, cfg.k), &state.bright, cfg);
    -drive / lambda
}

/// Deterministic forces (ṗ_z, ṗ_x) on every particle. Shelved particles
/// feel none.
pub fn forces(state: &EnsembleState, cfg: &EnsembleConfig) -> (Vec<f64>, Vec<f64>) {
    forces_from(&Phases::of(state, cfg.k), &state.bright, state.alpha, cfg)
}

fn divergence_bound(cfg: &EnsembleConfig) -> f64 {
    10.0 * cfg.n_particles as f64 * cfg.couplings().eta.norm() / cfg.kappa
        + cfg.omega_d.abs() / cfg.kappa
        + 10.0
}

/// Advances the state by one step of `cfg.dt`.
///
/// The field is propagated exactly over the step for the current positions,
/// momenta receive Euler–Maruyama kicks and positions are then updated with
/// the new momenta.
pub fn step<R: Rng + ?Sized>(
    state: &mut EnsembleState,
    cfg: &EnsembleConfig,
    rng: &mut R,
) -> Result<()> {
    let dt = cfg.dt;
    let ph = Phases::of(state, cfg.k);
    let (lambda, drive) = field_terms(&ph, &state.bright, cfg);
    let (fz, fx) = forces_from(&ph, &state.bright, state.alpha, cfg);
    let decay = (lambda * dt).exp();
    let mut alpha = state.alpha * decay + drive * (decay - 1.0) / lambda;

    let noisy = cfg.noise_model == NoiseModel::RecoilDiffusion;
    let gamma_a = cfg.free_space_rate();
    if noisy && cfg.field_noise_scale > 0.0 {
        let s = (0.5 * cfg.kappa * dt * cfg.field_noise_scale).sqrt();
        alpha += Complex64::new(
            s * rng.sample::<f64, _>(StandardNormal),
            s * rng.sample::<f64, _>(StandardNormal),
        );
    }
    let p_sigma = if noisy {
        HBAR * cfg.k * (gamma_a * dt * cfg.momentum_noise_scale).sqrt()
    } else {
        0.0
    };
    let shelve = cfg.raman_upsilon.map(|u| gamma_a / (1.0 + u) * dt);

    for j in 0..state.z.len() {
        state.pz[j] += fz[j] * dt;
        state.px[j] += fx[j] * dt;
        if state.bright[j] {
            if p_sigma > 0.0 {
                state.pz[j] += p_sigma * rng.sample::<f64, _>(StandardNormal);
                state.px[j] += p_sigma * rng.sample::<f64, _>(StandardNormal);
            }
            if let Some(p) = shelve {
                if rng.random::<f64>() < p {
                    state.bright[j] = false;
                }
            }
        }
        state.z[j] += state.pz[j] / cfg.mass * dt;
        state.x[j] += state.px[j] / cfg.mass * dt;
    }
    state.alpha = alpha;
    state.t += dt;

    let bound = divergence_bound(cfg);
    if !alpha.norm().is_finite() || alpha.norm() > bound {
        return Err(Error::Integration {
            t: state.t,
            reason: format!("|α| = {} exceeds bound {bound}", alpha.norm()),
        });
    }
    if state
        .pz
        .iter()
        .chain(&state.px)
        .chain(&state.z)
        .chain(&state.x)
        .any(|v| !v.is_finite())
    {
        return Err(Error::Integration {
            t: state.t,
            reason: "non-finite particle coordinate".into(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    /// ⟨cos kz⟩.
    pub order_param: f64,
    /// ⟨cos kz · cos kx⟩.
    pub checkerboard: f64,
    pub alpha_sq: f64,
    /// Cavity output 2κ|α|² (photons/s).
    pub output: f64,
    /// Mean kinetic energy per particle (J).
    pub mean_ke: f64,
    /// Mean kinetic energy along z per particle (J).
    pub ke_z: f64,
    pub shelved_fraction: f64,
}

impl TrajectorySample {
    pub const HEADER: [&'static str; 8] = [
        "t_s",
        "order_param",
        "checkerboard",
        "alpha_sq",
        "output_per_s",
        "mean_ke_j",
        "ke_z_j",
        "shelved_fraction",
    ];

    fn record(state: &EnsembleState, cfg: &EnsembleConfig) -> Self {
        let (mean_ke, ke_z) = state.kinetic_energy(cfg.mass);
        let n = state.z.len() as f64;
        TrajectorySample {
            t: state.t,
            order_param: order_parameter(&state.z, cfg.k),
            checkerboard: state.checkerboard(cfg.k),
            alpha_sq: state.alpha.norm_sqr(),
            output: 2.0 * cfg.kappa * state.alpha.norm_sqr(),
            mean_ke,
            ke_z,
            shelved_fraction: (n - state.n_bright() as f64) / n,
        }
    }

    pub fn to_record(&self) -> Vec<String> {
        [
            self.t,
            self.order_param,
            self.checkerboard,
            self.alpha_sq,
            self.output,
            self.mean_ke,
            self.ke_z,
            self.shelved_fraction,
        ]
        .iter()
        .map(|v| format!("{v:e}"))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub seed: u64,
    pub samples: Vec<TrajectorySample>,
    pub final_state: EnsembleState,
}

/// Condensed outcome of one trajectory. Averages run over the final 20%
/// of the samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub n_particles: usize,
    pub omega_p: f64,
    pub final_order: f64,
    pub final_checkerboard: f64,
    pub mean_output: f64,
    pub ke_initial: f64,
    pub ke_final: f64,
    pub localization: Localization,
}

impl Trajectory {
    fn tail(&self) -> &[TrajectorySample] {
        let t_end = self.samples.last().map_or(0.0, |s| s.t);
        let t_cut = 0.8 * t_end + 0.2 * self.samples.first().map_or(0.0, |s| s.t);
        let i = self.samples.partition_point(|s| s.t < t_cut);
        &self.samples[i..]
    }

    pub fn summary(&self, cfg: &EnsembleConfig) -> Result<RunSummary> {
        let trace: Vec<(f64, f64)> = self.samples.iter().map(|s| (s.t, s.order_param)).collect();
        let localization = detect_localization(&trace, cfg.kappa)?;
        let tail = self.tail();
        let mean =
            |f: fn(&TrajectorySample) -> f64| tail.iter().map(f).sum::<f64>() / tail.len() as f64;
        Ok(RunSummary {
            seed: self.seed,
            n_particles: cfg.n_particles,
            omega_p: cfg.omega_p,
            final_order: mean(|s| s.order_param),
            final_checkerboard: mean(|s| s.checkerboard),
            mean_output: mean(|s| s.output),
            ke_initial: self.samples[0].mean_ke,
            ke_final: mean(|s| s.mean_ke),
            localization,
        })
    }
}

/// Integrates one trajectory from `cfg.seed`.
pub fn run(cfg: &EnsembleConfig) -> Result<Trajectory> {
    cfg.validated()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = EnsembleState::initial(cfg, &mut rng);
    let every = ((cfg.sample_interval / cfg.dt).round() as usize).max(1);
    let n_steps = cfg.n_steps();
    let mut samples = Vec::with_capacity(n_steps / every + 2);
    samples.push(TrajectorySample::record(&state, cfg));
    for i in 1..=n_steps {
        step(&mut state, cfg, &mut rng)?;
        if i % every == 0 || i == n_steps {
            samples.push(TrajectorySample::record(&state, cfg));
        }
    }
    Ok(Trajectory {
        seed: cfg.seed,
        samples,
        final_state: state,
    })
}

/// Runs one trajectory per seed in parallel; results follow the seed order.
pub fn run_ensemble(cfg: &EnsembleConfig, seeds: &[u64]) -> Result<Vec<RunSummary>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.seed = seed;
            run(&c)?.summary(&c)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub omega_p: f64,
    /// Fraction of seeds that localized.
    pub p_localize: f64,
    /// Seed-averaged late-time cavity output (photons/s).
    pub mean_output: f64,
    pub n_seeds: usize,
}

impl ScanRow {
    pub const HEADER: [&'static str; 4] =
        ["omega_p_hz", "p_localize", "mean_output_per_s", "n_seeds"];
}

/// Localization probability over seeds `cfg.seed .. cfg.seed + n_seeds`
/// at each pump strength.
pub fn scan_omega_p(cfg: &EnsembleConfig, omega_p: &[f64], n_seeds: usize) -> Result<Vec<ScanRow>> {
    if n_seeds == 0 {
        return Err(Error::domain("need at least one seed per scan point"));
    }
    let seeds: Vec<u64> = (0..n_seeds as u64).map(|i| cfg.seed + i).collect();
    omega_p
        .iter()
        .map(|&op| {
            let mut c = cfg.clone();
            c.omega_p = op;
            let runs = run_ensemble(&c, &seeds)?;
            let n = runs.len() as f64;
            Ok(ScanRow {
                omega_p: op,
                p_localize: runs
                    .iter()
                    .filter(|r| r.localization.is_localized())
                    .count() as f64
                    / n,
                mean_output: runs.iter().map(|r| r.mean_output).sum::<f64>() / n,
                n_seeds,
            })
        })
        .collect()
}
