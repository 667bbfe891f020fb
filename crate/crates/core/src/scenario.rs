//! Transit-time kinematics and illustrative Stark-decelerator operating zones.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multimode::ConfocalReport;

/// Fraction of the cavity length used for axial crossings.
pub const AXIAL_FRACTION: f64 = 0.66;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitTimes {
    pub velocity: f64,
    /// Time to cross the confocal mode family, 2·w_sa/v (s).
    pub t_waist_confocal: f64,
    /// Time to cross the TEM₀₀ mode, 2·w₀/v (s).
    pub t_waist_tem00: f64,
    /// Time to travel 0.66·L along the axis (s).
    pub t_axial: f64,
}

impl TransitTimes {
    pub const HEADER: [&'static str; 4] = [
        "velocity_m_s",
        "t_waist_confocal_s",
        "t_waist_tem00_s",
        "t_axial_s",
    ];

    pub fn to_record(&self) -> Vec<String> {
        [
            self.velocity,
            self.t_waist_confocal,
            self.t_waist_tem00,
            self.t_axial,
        ]
        .iter()
        .map(|v| format!("{v:e}"))
        .collect()
    }
}

/// Crossing times for a particle at speed `v`. Waist crossings use the
/// full diameter 2w.
pub fn transit_times(v: f64, cavity: &ConfocalReport) -> Result<TransitTimes> {
    if !(v > 0.0) {
        return Err(Error::domain(format!("velocity must be positive, got {v}")));
    }
    Ok(TransitTimes {
        velocity: v,
        t_waist_confocal: 2.0 * cavity.w_sa / v,
        t_waist_tem00: 2.0 * cavity.w0 / v,
        t_axial: AXIAL_FRACTION * cavity.radius / v,
    })
}

/// Log-spaced velocity sweep from `v_min` to `v_max` inclusive.
pub fn transit_curve(
    cavity: &ConfocalReport,
    v_min: f64,
    v_max: f64,
    n: usize,
) -> Result<Vec<TransitTimes>> {
    if !(v_min > 0.0 && v_max >= v_min) || n < 2 {
        return Err(Error::domain(
            "need 0 < v_min <= v_max and at least two points",
        ));
    }
    let (a, b) = (v_min.ln(), v_max.ln());
    (0..n)
        .map(|i| {
            let v = match i {
                0 => v_min,
                _ if i == n - 1 => v_max,
                _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
            };
            transit_times(v, cavity)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Zone {
    I,
    II,
    III,
    IV,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub zone: Zone,
    /// Packet density (1/cm³).
    pub density: f64,
    /// Typical packet speed (m/s).
    pub velocity: f64,
    pub description: String,
}

pub const ZONE_WARNING: &str =
    "illustrative values read off an approximate decelerator efficiency curve; not measured data";

/// Approximate operating points along a Stark decelerator efficiency curve.
pub fn zone_presets() -> Vec<Scenario> {
    let z = |zone, density, velocity, description: &str| Scenario {
        zone,
        density,
        velocity,
        description: description.into(),
    };
    vec![
        z(
            Zone::I,
            1e9,
            400.0,
            "post-skimmer packet before deceleration; short transit, many molecules",
        ),
        z(
            Zone::II,
            1e7,
            100.0,
            "partly decelerated; axial guiding could lengthen the interaction",
        ),
        z(
            Zone::III,
            1e6,
            20.0,
            "slow packet that can be reflected by an electrostatic or magnetic mirror",
        ),
        z(
            Zone::IV,
            1e5,
            5.0,
            "trapped at the decelerator terminus; lifetime limited by blackbody pumping",
        ),
    ]
}
