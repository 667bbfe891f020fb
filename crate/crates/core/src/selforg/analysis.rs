use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use super::dynamics::ScanRow;
use super::EnsembleConfig;
use crate::error::{Error, Result};
use crate::units::{BOLTZMANN, HBAR};

/// ⟨cos(kz)⟩ over the given positions; zero for an empty slice.
pub fn order_parameter(z: &[f64], k: f64) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    z.iter().map(|&zj| (k * zj).cos()).sum::<f64>() / z.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// ⟨cos kz⟩ → +1.
    Even,
    /// ⟨cos kz⟩ → −1.
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Localization {
    Localized(Parity),
    NotLocalized,
}

impl Localization {
    pub fn is_localized(&self) -> bool {
        matches!(self, Localization::Localized(_))
    }
}

/// Classifies an order-parameter trace given as `(t, ⟨cos kz⟩)` pairs.
///
/// Over the final 20% of the time span the mean must exceed 0.5 in
/// magnitude and at least 95% of samples must share its sign.
pub fn detect_localization(samples: &[(f64, f64)], kappa: f64) -> Result<Localization> {
    let (Some(first), Some(last)) = (samples.first(), samples.last()) else {
        return Err(Error::InsufficientData("empty trajectory".into()));
    };
    let span = last.0 - first.0;
    if span * kappa < 10.0 {
        return Err(Error::InsufficientData(format!(
            "trajectory spans {:.3}/κ, need at least 10/κ",
            span * kappa
        )));
    }
    let t_cut = last.0 - 0.2 * span;
    let tail: Vec<f64> = samples
        .iter()
        .filter(|s| s.0 >= t_cut)
        .map(|s| s.1)
        .collect();
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    if mean.abs() <= 0.5 {
        return Ok(Localization::NotLocalized);
    }
    let agreeing = tail
        .iter()
        .filter(|&&v| v.signum() == mean.signum())
        .count();
    if (agreeing as f64) < 0.95 * tail.len() as f64 {
        return Ok(Localization::NotLocalized);
    }
    Ok(Localization::Localized(if mean > 0.0 {
        Parity::Even
    } else {
        Parity::Odd
    }))
}

/// Depths of V(z) = U₂cos²(kz) + U₁cos(kz) along a pump antinode line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialDepths {
    /// Interference term (J).
    pub u1: f64,
    /// Cavity lattice term (J).
    pub u2: f64,
    /// Per-particle scattering rate into the cavity (rad/s).
    pub i0: f64,
}

/// U₁, U₂ and I₀ for N particles with ⟨cos kz⟩ = `mean_cos` and
/// ⟨cos² kz⟩ = `mean_cos2`.
pub fn potential_depths(cfg: &EnsembleConfig, mean_cos: f64, mean_cos2: f64) -> PotentialDepths {
    let c = cfg.couplings();
    let n = cfg.n_particles as f64;
    let detuning = cfg.delta_pc - n * c.u0 * mean_cos2;
    let loss = cfg.kappa + n * c.gamma0 * mean_cos2;
    let i0 = c.eta.norm_sqr() / (loss * loss + detuning * detuning);
    PotentialDepths {
        u1: 2.0 * HBAR * i0 * n * mean_cos * detuning,
        u2: HBAR * i0 * c.u0 * n * n * mean_cos * mean_cos,
        i0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInputs {
    pub kappa: f64,
    pub delta_pa: f64,
    pub g: f64,
    /// K.
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// Mean-field pump threshold, N^(−1/2) scaling (rad/s).
    pub omega_th_meanfield: f64,
    /// Hysteresis-limited pump threshold, N^(−1/4) scaling (rad/s).
    pub omega_th_numerical: f64,
    /// Minimum particle number at saturation `s_max` for x = 2.
    pub n0_x2: f64,
    /// Minimum particle number at saturation `s_max` for x = 4.
    pub n0_x4: f64,
    /// Saturation Ω²/(4Δ_pa²) at the mean-field threshold.
    pub s_at_pump: f64,
}

pub fn thresholds(inputs: ThresholdInputs, n: f64, s_max: f64) -> Result<ThresholdReport> {
    let ThresholdInputs {
        kappa,
        delta_pa,
        g,
        temperature,
    } = inputs;
    if !(temperature > 0.0) || !(n >= 1.0) || !(s_max > 0.0 && s_max < 1.0) {
        return Err(Error::domain(format!(
            "need T > 0, N >= 1 and 0 < s < 1, got {temperature}, {n}, {s_max}"
        )));
    }
    if !(kappa > 0.0) || !(g > 0.0) {
        return Err(Error::domain("need kappa > 0 and g > 0"));
    }
    let thermal = (BOLTZMANN * temperature / (HBAR * kappa)).sqrt();
    let base = thermal * kappa * delta_pa.abs() / g;
    let omega_mf = base / n.sqrt() * std::f64::consts::SQRT_2;
    let omega_num = base / n.powf(0.25) * std::f64::consts::PI.sqrt() / 2.0;
    let n0_base = thermal * kappa / (2.0 * g * s_max.sqrt());
    Ok(ThresholdReport {
        omega_th_meanfield: omega_mf,
        omega_th_numerical: omega_num,
        n0_x2: n0_base.powi(2),
        n0_x4: n0_base.powi(4),
        s_at_pump: omega_mf * omega_mf / (4.0 * delta_pa * delta_pa),
    })
}

/// Two-sided exact binomial test of `k` successes in `n` fair trials.
pub fn binomial_two_sided_p(k: u64, n: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    let b = Binomial::new(0.5, n).map_err(|e| Error::domain(e.to_string()))?;
    let lower = b.cdf(k);
    let upper = if k == 0 { 1.0 } else { b.sf(k - 1) };
    Ok((2.0 * lower.min(upper)).min(1.0))
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InsufficientData(
            "need at least two paired points".into(),
        ));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::domain("log-log fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("all x values coincide"));
    }
    Ok(sxy / sxx)
}

/// Pump strength at which the localization probability first crosses 1/2,
/// interpolated linearly in ln Ω_p between bracketing scan rows.
pub fn threshold_midpoint(rows: &[ScanRow]) -> Option<f64> {
    let mut sorted: Vec<&ScanRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.omega_p.total_cmp(&b.omega_p));
    sorted.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if a.p_localize < 0.5 && b.p_localize >= 0.5 {
            let f = (0.5 - a.p_localize) / (b.p_localize - a.p_localize);
            Some((a.omega_p.ln() + f * (b.omega_p.ln() - a.omega_p.ln())).exp())
        } else {
            None
        }
    })
}
