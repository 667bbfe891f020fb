//! Cavity and free-space scattering rates, Doppler-shifted cavity scattering,
//! cooling rates and temperature scales, and the strong-coupling damping
//! ratio.
//!
//! Scaling relations that fix only proportionality (cooling rate, cavity
//! temperature limit) are evaluated with a unit prefactor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::steadystate::DriveConfig;
use crate::units::{self, Transition, BOLTZMANN, HBAR};
use crate::Complex64;

fn check_dispersive(cfg: &DriveConfig) {
    let d = cfg.delta_pa.abs();
    let worst = cfg.omega_p.abs().max(cfg.gamma_perp).max(cfg.g.abs());
    if d < 10.0 * worst {
        log::warn!("weak dispersive condition: |Δ_pa| = {d:e} is less than 10× max(Ω_p, γ⊥, g) = {worst:e}");
    }
}

/// Rate-convention cooperativity g²/(2κγ⊥).
pub fn cooperativity(g: f64, kappa: f64, gamma_perp: f64) -> f64 {
    g * g / (2.0 * kappa * gamma_perp)
}

/// Coupling that gives cooperativity `c`, √(2κγ⊥C).
pub fn coupling_for_cooperativity(c: f64, kappa: f64, gamma_perp: f64) -> f64 {
    (2.0 * kappa * gamma_perp * c).sqrt()
}

/// Photon scattering rate into the cavity, 2κ(Ω_p²/4Δ_pa²)·g²/(Δ_pc² + κ²).
pub fn gamma_c(cfg: &DriveConfig) -> f64 {
    check_dispersive(cfg);
    gamma_c_at(cfg, cfg.delta_pc)
}

fn gamma_c_at(cfg: &DriveConfig, delta_pc: f64) -> f64 {
    let pump = cfg.omega_p * cfg.omega_p / (4.0 * cfg.delta_pa * cfg.delta_pa);
    2.0 * cfg.kappa * pump * cfg.g * cfg.g / (delta_pc * delta_pc + cfg.kappa * cfg.kappa)
}

/// Free-space scattering rate 2γ⊥(Ω_p²/4Δ_pa²).
pub fn gamma_a(cfg: &DriveConfig) -> f64 {
    check_dispersive(cfg);
    2.0 * cfg.gamma_perp * cfg.omega_p * cfg.omega_p / (4.0 * cfg.delta_pa * cfg.delta_pa)
}

/// Cavity scattering rate for a particle with Doppler shift `kv`, obtained
/// by replacing Δ_pc with |Δ_pc| + kv. Peaks at kv = −|Δ_pc|.
pub fn gamma_c_doppler(cfg: &DriveConfig, kv: f64) -> f64 {
    if kv.abs() * 10.0 > cfg.delta_pa.abs() {
        log::warn!(
            "Doppler shift {kv:e} is not small against Δ_pa = {:e}",
            cfg.delta_pa
        );
    }
    gamma_c_at(cfg, cfg.delta_pc.abs() + kv)
}

/// Optimal pump-cavity detuning magnitude κ + kv for counter-propagating
/// pump beams.
pub fn optimal_delta_pc(kappa: f64, kv: f64) -> f64 {
    kappa + kv.abs()
}

/// Energy cooling rate ħkvΓ_c(v)/(mv²/2), with Γ_c evaluated for the
/// counter-propagating Doppler shift −k|v|.
pub fn cooling_rate(cfg: &DriveConfig, v: f64, k: f64, mass: f64) -> Result<f64> {
    let v_rec = HBAR * k / mass;
    if !(v.abs() >= 10.0 * v_rec) {
        return Err(Error::domain(format!(
            "speed {v} m/s is below ten recoil velocities ({:e} m/s)",
            10.0 * v_rec
        )));
    }
    let v = v.abs();
    Ok(HBAR * k * v * gamma_c_doppler(cfg, -k * v) / (0.5 * mass * v * v))
}

/// Power removed by the cavity force from a particle moving in the
/// pump/cavity plane, −ħΓ_c·k(|v_x| + |v_z|). Non-positive.
///
/// `v0` is (v_x, v_z); Γ_c uses the pump-axis Doppler shift −k|v_x|.
pub fn max_force(cfg: &DriveConfig, v0: [f64; 2], k: f64) -> f64 {
    let [vx, vz] = v0;
    let projection = k * (vx.abs() + vz.abs());
    if projection == 0.0 {
        return 0.0;
    }
    -HBAR * gamma_c_doppler(cfg, -k * vx.abs()) * projection
}

/// Ratio of the velocity damping rate to the free-space scattering rate for
/// a pumped particle strongly coupled to the cavity:
///
/// (ω_rec/γ⊥)·Im{(D*)²(z_c² − g²)}/(|D|²|z_c|²), z_c = −κ + iΔ_pc,
/// z_a = −γ + iΔ_pa, D = z_c z_a + g².
///
/// Negative values mean cooling.
pub fn damping_ratio(cfg: &DriveConfig, omega_rec: f64) -> Result<f64> {
    let zc = Complex64::new(-cfg.kappa, cfg.delta_pc);
    let za = Complex64::new(-cfg.gamma(), cfg.delta_pa);
    let g2 = cfg.g * cfg.g;
    let d = zc * za + g2;
    if d.norm() == 0.0 || zc.norm() == 0.0 {
        return Err(Error::Singular("damping ratio denominator vanishes".into()));
    }
    let num = (d.conj() * d.conj() * (zc * zc - g2)).im;
    Ok(omega_rec / cfg.gamma_perp * num / (d.norm_sqr() * zc.norm_sqr()))
}

/// Grid specification for the damping-ratio map. Axes are log-spaced and
/// cell-centred so that a grid with twice the resolution subdivides every
/// cell exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampingMapSpec {
    pub kappa: f64,
    pub gamma_perp: f64,
    pub omega_rec: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub n_c: usize,
    /// |Δ_pa| range in Hz.
    pub delta_min_hz: f64,
    pub delta_max_hz: f64,
    pub n_delta: usize,
    /// Red (Δ_pa < 0) or blue pump detuning.
    pub red: bool,
}

impl DampingMapSpec {
    /// OH P1(1) in a 2 cm, F = 5000 cavity.
    pub fn oh_default() -> Self {
        DampingMapSpec {
            kappa: units::kappa_from_finesse(0.02, 5000.0).expect("valid cavity"),
            gamma_perp: units::from_hz(2.32e5) / 2.0,
            omega_rec: units::recoil_frequency(308.256e-9, units::OH_MASS),
            c_min: 1e-2,
            c_max: 1e3,
            n_c: 200,
            delta_min_hz: 1e5,
            delta_max_hz: 1e9,
            n_delta: 200,
            red: true,
        }
    }

    pub fn refined(&self) -> Self {
        DampingMapSpec {
            n_c: 2 * self.n_c,
            n_delta: 2 * self.n_delta,
            ..*self
        }
    }

    fn validated(&self) -> Result<()> {
        if self.n_c == 0 || self.n_delta == 0 {
            return Err(Error::domain(
                "damping map needs at least one cell per axis",
            ));
        }
        if !(self.c_min > 0.0 && self.c_max > self.c_min) {
            return Err(Error::domain(
                "cooperativity axis must satisfy 0 < c_min < c_max",
            ));
        }
        if !(self.delta_min_hz > 0.0 && self.delta_max_hz > self.delta_min_hz) {
            return Err(Error::domain("detuning axis must satisfy 0 < min < max"));
        }
        if !(self.kappa > 0.0 && self.gamma_perp > 0.0) {
            return Err(Error::domain("kappa and gamma_perp must be positive"));
        }
        Ok(())
    }
}

fn log_centres(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * (i as f64 + 0.5) / n as f64).exp())
        .collect()
}

/// Damping-ratio map over cooperativity × pump detuning. The pump-cavity
/// detuning tracks the lower dressed state, Δ_pc = U₀ − κ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DampingMap {
    /// Signed Δ_pa in Hz, one per column.
    pub delta_pa_hz: Vec<f64>,
    /// Cooperativity, one per row.
    pub cooperativity: Vec<f64>,
    /// Row-major `[row * n_delta + col]`; NaN where the ratio is singular.
    pub ratio: Vec<f64>,
}

impl DampingMap {
    pub const HEADER: [&'static str; 3] = ["delta_pa_hz", "cooperativity", "ratio"];

    pub fn n_delta(&self) -> usize {
        self.delta_pa_hz.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.ratio[row * self.n_delta() + col]
    }

    /// (Δ_pa Hz, C, ratio) rows in grid order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.cooperativity
            .iter()
            .enumerate()
            .flat_map(move |(i, &c)| {
                self.delta_pa_hz
                    .iter()
                    .enumerate()
                    .map(move |(j, &d)| (d, c, self.get(i, j)))
            })
    }

    /// Cells with a negative ratio in the largest 4-connected component, and
    /// the total number of negative cells.
    pub fn cooling_components(&self) -> (usize, usize) {
        let (nr, nc) = (self.cooperativity.len(), self.n_delta());
        let neg: Vec<bool> = self.ratio.iter().map(|&r| r < 0.0).collect();
        let total = neg.iter().filter(|&&b| b).count();
        let mut seen = vec![false; neg.len()];
        let mut best = 0;
        for start in 0..neg.len() {
            if !neg[start] || seen[start] {
                continue;
            }
            let mut stack = vec![start];
            seen[start] = true;
            let mut size = 0;
            while let Some(p) = stack.pop() {
                size += 1;
                let (r, c) = (p / nc, p % nc);
                let mut push = |q: usize| {
                    if neg[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                };
                if r > 0 {
                    push(p - nc);
                }
                if r + 1 < nr {
                    push(p + nc);
                }
                if c > 0 {
                    push(p - 1);
                }
                if c + 1 < nc {
                    push(p + 1);
                }
            }
            best = best.max(size);
        }
        (best, total)
    }
}

/// Pump-cavity detuning that drives the lower dressed state just below the
/// cavity resonance, U₀ − κ.
pub fn dressed_pump_cavity_detuning(g: f64, delta_pa: f64, gamma_perp: f64, kappa: f64) -> f64 {
    g * g * delta_pa / (delta_pa * delta_pa + gamma_perp * gamma_perp) - kappa
}

pub fn damping_map(spec: &DampingMapSpec) -> Result<DampingMap> {
    spec.validated()?;
    let sign = if spec.red { -1.0 } else { 1.0 };
    let deltas: Vec<f64> = log_centres(spec.delta_min_hz, spec.delta_max_hz, spec.n_delta)
        .into_iter()
        .map(|d| sign * d)
        .collect();
    let coops = log_centres(spec.c_min, spec.c_max, spec.n_c);
    let ratio = (0..spec.n_c * spec.n_delta)
        .into_par_iter()
        .map(|idx| {
            let c = coops[idx / spec.n_delta];
            let delta_pa = units::from_hz(deltas[idx % spec.n_delta]);
            let g = coupling_for_cooperativity(c, spec.kappa, spec.gamma_perp);
            let cfg = DriveConfig {
                omega_p: 0.0,
                omega_d: 0.0,
                delta_pa,
                delta_pc: dressed_pump_cavity_detuning(g, delta_pa, spec.gamma_perp, spec.kappa),
                g,
                gamma_perp: spec.gamma_perp,
                kappa: spec.kappa,
            };
            damping_ratio(&cfg, spec.omega_rec).unwrap_or(f64::NAN)
        })
        .collect();
    Ok(DampingMap {
        delta_pa_hz: deltas,
        cooperativity: coops,
        ratio,
    })
}

/// Fraction of fine cells whose sign matches the coarse cell containing
/// them. `fine` must have exactly twice the resolution of `coarse`.
pub fn refinement_sign_agreement(coarse: &DampingMap, fine: &DampingMap) -> Result<f64> {
    let (nr, nc) = (coarse.cooperativity.len(), coarse.n_delta());
    if fine.cooperativity.len() != 2 * nr || fine.n_delta() != 2 * nc {
        return Err(Error::domain(
            "fine map must have twice the resolution of the coarse map",
        ));
    }
    let mut agree = 0usize;
    for i in 0..2 * nr {
        for j in 0..2 * nc {
            if (fine.get(i, j) < 0.0) == (coarse.get(i / 2, j / 2) < 0.0) {
                agree += 1;
            }
        }
    }
    Ok(agree as f64 / (4 * nr * nc) as f64)
}

/// Composition of the lower dressed state in the dispersive regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedState {
    /// Cavity-photon weight |c_e|².
    pub ce2: f64,
    /// Atomic weight |c_a|² = g²/Δ_pa².
    pub ca2: f64,
    /// N-particle shift NU₀ of the cavity-like state (rad/s).
    pub energy_shift: f64,
}

pub fn dressed_composition(cfg: &DriveConfig, n_particles: f64) -> Result<DressedState> {
    if cfg.delta_pa == 0.0 || (cfg.g / cfg.delta_pa).abs() >= 1.0 {
        return Err(Error::domain(format!(
            "dressed-state composition needs |g/Δ_pa| < 1, got g = {:e}, Δ_pa = {:e}",
            cfg.g, cfg.delta_pa
        )));
    }
    let ca2 = (cfg.g / cfg.delta_pa).powi(2);
    let u0 = cfg.g * cfg.g * cfg.delta_pa
        / (cfg.delta_pa * cfg.delta_pa + cfg.gamma_perp * cfg.gamma_perp);
    Ok(DressedState {
        ce2: 1.0 - ca2,
        ca2,
        energy_shift: n_particles * u0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureLimits {
    /// ħκ(1 + 1/C)/k_B (K); infinite for C = 0.
    pub t_f: f64,
    /// ħω_rec/k_B (K).
    pub t_rec: f64,
    /// (ħk)²/(m k_B) = 2ħω_rec/k_B (K), the kinetic temperature of one photon recoil.
    pub t_recoil_kinetic: f64,
    /// ħκ/k_B (K).
    pub t_kappa: f64,
}

pub fn temperature_limits(cfg: &DriveConfig, t: &Transition) -> TemperatureLimits {
    let c = cooperativity(cfg.g, cfg.kappa, cfg.gamma_perp);
    let t_kappa = HBAR * cfg.kappa / BOLTZMANN;
    let t_f = if c > 0.0 {
        t_kappa * (1.0 + 1.0 / c)
    } else {
        f64::INFINITY
    };
    TemperatureLimits {
        t_f,
        t_rec: HBAR * t.omega_rec / BOLTZMANN,
        t_recoil_kinetic: 2.0 * HBAR * t.omega_rec / BOLTZMANN,
        t_kappa,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub gamma_c: f64,
    pub gamma_a: f64,
    /// Γ_c/Γ_a; zero when Γ_a vanishes.
    pub ratio_c: f64,
    pub t_f: f64,
    pub t_rec: f64,
    /// Optimal Δ_pc for a particle at rest (rad/s).
    pub optimal_delta_pc: f64,
    /// Doppler capture range, κ (rad/s).
    pub capture_range: f64,
}

pub fn rate_report(cfg: &DriveConfig, t: &Transition) -> RateReport {
    let gc = gamma_c(cfg);
    let ga = gamma_a(cfg);
    let temps = temperature_limits(cfg, t);
    RateReport {
        gamma_c: gc,
        gamma_a: ga,
        ratio_c: if ga > 0.0 { gc / ga } else { 0.0 },
        t_f: temps.t_f,
        t_rec: temps.t_rec,
        optimal_delta_pc: -optimal_delta_pc(cfg.kappa, 0.0),
        capture_range: cfg.kappa,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steadystate::solve_self_consistent;
    use crate::units::{from_hz, OH_MASS};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn cfg() -> DriveConfig {
        let kappa = from_hz(7.5e5);
        DriveConfig {
            omega_p: from_hz(1e8),
            omega_d: 0.0,
            delta_pa: -from_hz(1e10),
            delta_pc: -kappa,
            g: from_hz(9.0e4),
            gamma_perp: from_hz(1.16e5),
            kappa,
        }
    }

    #[test]
    fn gamma_c_at_minus_kappa() {
        let c = cfg();
        let expect = 2.0 * c.kappa * (c.omega_p.powi(2) / (8.0 * c.delta_pa.powi(2))) * c.g.powi(2)
            / c.kappa.powi(2);
        assert!(rel(gamma_c(&c), expect) < 1e-14);
        assert_eq!(gamma_c(&DriveConfig { g: 0.0, ..c }), 0.0);
        assert!(
            rel(
                gamma_c(&c) / gamma_a(&c),
                cooperativity(c.g, c.kappa, c.gamma_perp)
            ) < 1e-14
        );
    }

    #[test]
    fn gamma_a_scaling() {
        let c = cfg();
        assert_eq!(gamma_a(&DriveConfig { omega_p: 0.0, ..c }), 0.0);
        let c2 = DriveConfig {
            delta_pa: 2.0 * c.delta_pa,
            ..c
        };
        assert!(rel(gamma_a(&c2), gamma_a(&c) / 4.0) < 1e-14);
    }

    #[test]
    fn gamma_a_matches_steady_state_population() {
        let mut c = cfg();
        let s = 1e-4;
        c.omega_p = (2.0 * s * (c.delta_pa.powi(2) + c.gamma_perp.powi(2))).sqrt();
        c.g = 0.0;
        let ss = solve_self_consistent(&c).unwrap();
        assert!(rel(gamma_a(&c), c.gamma() * ss.sigma_ee) < 1e-2);
    }

    #[test]
    fn ratio_is_detuning_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let kappa = rng.random_range(1e3..1e7);
            let gp = rng.random_range(1e3..1e7);
            let c = DriveConfig {
                omega_p: rng.random_range(1e2..1e9),
                omega_d: 0.0,
                delta_pa: rng.random_range(1e8..1e12)
                    * if rng.random::<bool>() { 1.0 } else { -1.0 },
                delta_pc: -kappa,
                g: rng.random_range(1e2..1e7),
                gamma_perp: gp,
                kappa,
            };
            let r = gamma_c_at(&c, c.delta_pc)
                / (2.0 * gp * c.omega_p.powi(2) / (4.0 * c.delta_pa.powi(2)));
            assert!(rel(r, c.g * c.g / (2.0 * kappa * gp)) < 1e-9);
        }
    }

    #[test]
    fn doppler_profile() {
        let c = cfg();
        let peak = 2.0 * c.kappa * c.omega_p.powi(2) / (4.0 * c.delta_pa.powi(2)) * c.g.powi(2)
            / c.kappa.powi(2);
        assert!(rel(gamma_c_doppler(&c, -c.delta_pc.abs()), peak) < 1e-14);
        assert!(rel(gamma_c_doppler(&c, 0.0), gamma_c(&c)) < 1e-14);
        for x in [0.1, 0.5, 2.0] {
            assert!(gamma_c_doppler(&c, -c.kappa * (1.0 + x)) < peak);
            assert!(gamma_c_doppler(&c, -c.kappa * (1.0 - x)) < peak);
        }
        // half maximum at one κ from the centre
        assert!(rel(gamma_c_doppler(&c, -2.0 * c.kappa), 0.5 * peak) < 1e-14);
        assert!(rel(optimal_delta_pc(c.kappa, 3.0 * c.kappa), 4.0 * c.kappa) < 1e-15);
    }

    #[test]
    fn doppler_area_independent_of_kappa() {
        let area = |kappa: f64| {
            let c = DriveConfig {
                kappa,
                delta_pc: -kappa,
                ..cfg()
            };
            let h = kappa / 20.0;
            let n = 40_000;
            let mut sum = 0.0;
            for i in 0..=n {
                let kv = -kappa + (i as f64 - n as f64 / 2.0) * h;
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                sum += w * gamma_c_at(&c, c.delta_pc.abs() + kv);
            }
            sum * h
        };
        let c = cfg();
        let exact = 2.0 * std::f64::consts::PI * c.omega_p.powi(2) / (4.0 * c.delta_pa.powi(2))
            * c.g.powi(2);
        for kappa in [from_hz(1e5), from_hz(7.5e5), from_hz(3e6)] {
            assert!(rel(area(kappa), exact) < 1e-3);
        }
    }

    #[test]
    fn cooling_rate_properties() {
        let c = cfg();
        let k = 2.0 * std::f64::consts::PI / 308.256e-9;
        let far = |v: f64| {
            cooling_rate(&c, v, k, OH_MASS).unwrap() * gamma_c_doppler(&c, 0.0)
                / gamma_c_doppler(&c, -k * v)
        };
        assert!(rel(far(200.0) / far(100.0), 0.5) < 1e-12);
        assert!(cooling_rate(&c, 1e-4, k, OH_MASS).is_err());
        assert!(cooling_rate(&c, 10.0, k, OH_MASS).unwrap() > 0.0);
        let wrec = units::recoil_frequency(308.256e-9, OH_MASS);
        assert!(wrec / (k * 10.0) < 0.01);
    }

    #[test]
    fn cooling_rate_golden() {
        let c = cfg();
        let k = 2.0 * std::f64::consts::PI / 308.256e-9;
        let v = 10.0;
        let kv = k * v;
        let pump = c.omega_p.powi(2) / (4.0 * c.delta_pa.powi(2));
        let dpc = c.kappa - kv;
        let gc = 2.0 * c.kappa * pump * c.g.powi(2) / (dpc * dpc + c.kappa.powi(2));
        let expect = HBAR * kv * gc / (0.5 * OH_MASS * v * v);
        assert!(rel(cooling_rate(&c, v, k, OH_MASS).unwrap(), expect) < 1e-12);
    }

    #[test]
    fn max_force_cases() {
        let c = cfg();
        let k = 2.0e7;
        assert_eq!(max_force(&c, [0.0, 0.0], k), 0.0);
        let f = max_force(&c, [3.0, 0.0], k);
        assert!(rel(f, -HBAR * gamma_c_doppler(&c, -k * 3.0) * k * 3.0) < 1e-14);
        assert_eq!(max_force(&c, [3.0, -2.0], k), max_force(&c, [-3.0, 2.0], k));
        assert!(max_force(&c, [1.0, 5.0], k) <= 0.0);
    }

    #[test]
    fn damping_ratio_decoupled_limit() {
        let c = DriveConfig { g: 0.0, ..cfg() };
        let wrec = 1e5;
        let zc = Complex64::new(-c.kappa, c.delta_pc);
        let za = Complex64::new(-c.gamma(), c.delta_pa);
        let p = zc.conj() * za.conj();
        let expect =
            wrec / c.gamma_perp * (p * p * zc * zc).im / ((zc * za).norm_sqr() * zc.norm_sqr());
        assert!(rel(damping_ratio(&c, wrec).unwrap(), expect) < 1e-10);
    }

    #[test]
    fn damping_map_has_contiguous_cooling_region() {
        let spec = DampingMapSpec {
            n_c: 60,
            n_delta: 60,
            ..DampingMapSpec::oh_default()
        };
        let map = damping_map(&spec).unwrap();
        let (largest, total) = map.cooling_components();
        assert!(total > 0);
        assert!(largest as f64 >= 0.9 * total as f64);
        assert!(map.ratio.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn map_refinement_subdivides_cells() {
        let spec = DampingMapSpec {
            n_c: 3,
            n_delta: 4,
            ..DampingMapSpec::oh_default()
        };
        let a = damping_map(&spec).unwrap();
        let b = damping_map(&spec.refined()).unwrap();
        for i in 0..3 {
            let (lo, hi) = (b.cooperativity[2 * i], b.cooperativity[2 * i + 1]);
            assert!(rel((lo * hi).sqrt(), a.cooperativity[i]) < 1e-12);
        }
        assert!(refinement_sign_agreement(&a, &a).is_err());
    }

    #[test]
    fn dressed_composition_values() {
        let c = cfg();
        let d = dressed_composition(&DriveConfig { g: 0.0, ..c }, 1.0).unwrap();
        assert_eq!((d.ce2, d.ca2), (1.0, 0.0));
        let d = dressed_composition(
            &DriveConfig {
                g: 0.1 * c.delta_pa.abs(),
                ..c
            },
            1.0,
        )
        .unwrap();
        assert!(rel(d.ca2, 0.01) < 1e-12);
        assert!((d.ce2 + d.ca2 - 1.0).abs() < 1e-9);
        assert!(dressed_composition(
            &DriveConfig {
                g: 2.0 * c.delta_pa.abs(),
                ..c
            },
            1.0
        )
        .is_err());
        let n = 1e4;
        let d = dressed_composition(&c, n).unwrap();
        let u0 = c.g * c.g * c.delta_pa / (c.delta_pa.powi(2) + c.gamma_perp.powi(2));
        assert!(rel(d.energy_shift, n * u0) < 1e-12);
        assert!(d.energy_shift < 0.0);
        let dpc = d.energy_shift - c.kappa;
        assert!(dpc < -c.kappa);
    }

    #[test]
    fn temperature_scales() {
        let t = Transition::new("P1(1)", 308.256e-9, from_hz(2.32e5), 1.43, OH_MASS).unwrap();
        let mut c = cfg();
        c.kappa = units::kappa_from_finesse(0.10, 5000.0).unwrap();
        let lim = temperature_limits(&c, &t);
        assert!(rel(lim.t_kappa, 7e-6) < 0.15, "{}", lim.t_kappa);
        assert!(rel(lim.t_recoil_kinetic, 12e-6) < 0.15);
        assert!(rel(lim.t_rec, HBAR * t.omega_rec / BOLTZMANN) < 1e-15);
        let big = temperature_limits(&DriveConfig { g: 1e12, ..c }, &t);
        assert!(rel(big.t_f, big.t_kappa) < 1e-6);
        assert!(temperature_limits(&DriveConfig { g: 0.0, ..c }, &t)
            .t_f
            .is_infinite());
    }

    #[test]
    fn rate_report_consistency() {
        let t = Transition::new("P1(1)", 308.256e-9, from_hz(2.32e5), 1.43, OH_MASS).unwrap();
        let c = cfg();
        let r = rate_report(&c, &t);
        assert!(r.gamma_c >= 0.0 && r.gamma_a >= 0.0);
        assert!(rel(r.ratio_c, r.gamma_c / r.gamma_a) < 1e-15);
        assert_eq!(r.capture_range, c.kappa);
        assert_eq!(
            rate_report(&DriveConfig { omega_p: 0.0, ..c }, &t).ratio_c,
            0.0
        );
    }

    proptest! {
        #[test]
        fn damping_ratio_flips_under_detuning_reversal(
            dpa in 1e5f64..1e10, dpc in -1e7f64..1e7, g in 0.0f64..1e7, kappa in 1e4f64..1e7, gp in 1e4f64..1e7,
        ) {
            let c = DriveConfig { omega_p: 0.0, omega_d: 0.0, delta_pa: -dpa, delta_pc: dpc, g, gamma_perp: gp, kappa };
            let m = DriveConfig { delta_pa: dpa, delta_pc: -dpc, ..c };
            let a = damping_ratio(&c, 1e5).unwrap();
            let b = damping_ratio(&m, 1e5).unwrap();
            prop_assert!((a + b).abs() <= 1e-9 * a.abs().max(1e-300));
        }

        #[test]
        fn rates_are_non_negative(
            op in 0.0f64..1e9, dpa in 1e8f64..1e12, dpc in -1e7f64..1e7, g in 0.0f64..1e6, kv in -1e7f64..1e7,
        ) {
            let c = DriveConfig { omega_p: op, omega_d: 0.0, delta_pa: -dpa, delta_pc: dpc, g, gamma_perp: 1e5, kappa: 1e6 };
            prop_assert!(gamma_c(&c) >= 0.0);
            prop_assert!(gamma_a(&c) >= 0.0);
            prop_assert!(gamma_c_doppler(&c, kv) >= 0.0);
        }
    }
}
