//! Raman loss bookkeeping for particles without a closed cycling transition,
//! and the embedded OH transition dataset.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{from_hz, Transition, OH_MASS};

const OH_DATA: &str = include_str!("../data/oh_transitions.toml");

/// One electronic OH cooling line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhTransitionRecord {
    pub line: String,
    pub lambda_nm: f64,
    pub j_prime: String,
    pub n_prime: u32,
    pub gamma_over_2pi_hz: f64,
    pub upsilon: f64,
    pub repumpers: u32,
    /// Fraction left open to v'' ≠ 0 with all repumpers on.
    pub vib_leak: f64,
    /// A ΔF = +1 cycling hyperfine transition exists.
    pub cycling_hyperfine: bool,
    pub microwave_pulses: u32,
    pub repump_lines: Vec<String>,
}

impl OhTransitionRecord {
    pub fn transition(&self) -> Transition {
        Transition::new(
            self.line.clone(),
            self.lambda_nm * 1e-9,
            from_hz(self.gamma_over_2pi_hz),
            self.upsilon,
            OH_MASS,
        )
        .expect("embedded record is valid")
        .with_repumpers(self.repumpers)
        .with_notes(format!("repump: {}", self.repump_lines.join(", ")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VibrationalRecord {
    pub name: String,
    pub lambda_nm: f64,
    pub gamma_over_2pi_hz: f64,
    pub upsilon: f64,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhDataset {
    pub electronic: Vec<OhTransitionRecord>,
    pub vibrational: Vec<VibrationalRecord>,
}

/// The embedded OH dataset, parsed once.
pub fn oh_dataset() -> &'static OhDataset {
    static DATA: OnceLock<OhDataset> = OnceLock::new();
    DATA.get_or_init(|| toml::from_str(OH_DATA).expect("embedded OH dataset parses"))
}

pub fn oh_records() -> &'static [OhTransitionRecord] {
    &oh_dataset().electronic
}

/// Looks up an electronic OH line by label, e.g. `"P1(1)"`.
pub fn oh_transition(line: &str) -> Result<Transition> {
    oh_records()
        .iter()
        .find(|r| r.line.eq_ignore_ascii_case(line))
        .map(OhTransitionRecord::transition)
        .ok_or_else(|| {
            let known: Vec<_> = oh_records().iter().map(|r| r.line.as_str()).collect();
            Error::domain(format!(
                "unknown OH line {line:?}; known lines: {}",
                known.join(", ")
            ))
        })
}

/// The fundamental and first-overtone vibrational lines of OH.
pub fn vibrational_candidates() -> Vec<Transition> {
    oh_dataset()
        .vibrational
        .iter()
        .map(|v| {
            Transition::new(
                v.name.clone(),
                v.lambda_nm * 1e-9,
                from_hz(v.gamma_over_2pi_hz),
                v.upsilon,
                OH_MASS,
            )
            .expect("embedded record is valid")
            .with_notes(v.notes.clone())
        })
        .collect()
}

/// Rayleigh and Raman parts (γ_Ry, γ_Rn) of the total decay rate γ, with
/// Υ = γ_Ry/γ_Rn.
pub fn three_level_decay_rates(gamma: f64, upsilon: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0) || !(upsilon >= 0.0) {
        return Err(Error::domain(format!(
            "need gamma > 0 and upsilon >= 0, got {gamma}, {upsilon}"
        )));
    }
    let rn = gamma / (1.0 + upsilon);
    Ok((gamma - rn, rn))
}

/// Branching bookkeeping for cavity emission versus Raman shelving.
///
/// Each decay of the excitation goes into the cavity, back to the original
/// ground state by Rayleigh scattering, or into a dark state by Raman
/// scattering, with relative weights (1+Υ)C : Υ : 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonBudget {
    pub upsilon: f64,
    pub cooperativity: f64,
    /// 1/(1+Υ).
    pub p_shelve_per_scatter: f64,
    /// 1+Υ.
    pub mean_free_scatters_to_shelve: f64,
    /// (1+Υ)C; also the mean number of cavity photons per shelving event.
    pub cavity_to_raman_ratio: f64,
}

impl PhotonBudget {
    /// Probability of remaining bright after `n` emissions into any channel
    /// other than Rayleigh scattering, (1 − 1/((1+Υ)C + 1 + Υ))^n.
    pub fn survival_after_n_emissions(&self, n: f64) -> f64 {
        let total = self.cavity_to_raman_ratio + 1.0 + self.upsilon;
        (1.0 - 1.0 / total).powf(n)
    }

    /// Probability of remaining bright after `n` cavity photons,
    /// (r/(1+r))^n with r = (1+Υ)C.
    pub fn survival_after_n_cavity_photons(&self, n: f64) -> f64 {
        let r = self.cavity_to_raman_ratio;
        if n == 0.0 {
            return 1.0;
        }
        (r / (1.0 + r)).powf(n)
    }

    /// Probability of shelving before the next cavity photon, 1/(1+r).
    pub fn p_shelve_per_cavity_photon(&self) -> f64 {
        1.0 / (1.0 + self.cavity_to_raman_ratio)
    }
}

pub fn photon_budget(upsilon: f64, cooperativity: f64) -> Result<PhotonBudget> {
    if !(upsilon >= 0.0) || !(cooperativity >= 0.0) {
        return Err(Error::domain(format!(
            "need upsilon >= 0 and cooperativity >= 0, got {upsilon}, {cooperativity}"
        )));
    }
    Ok(PhotonBudget {
        upsilon,
        cooperativity,
        p_shelve_per_scatter: 1.0 / (1.0 + upsilon),
        mean_free_scatters_to_shelve: 1.0 + upsilon,
        cavity_to_raman_ratio: (1.0 + upsilon) * cooperativity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{to_hz, CavityGeometry, DerivedCavity};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn table_values_verbatim() {
        let r = oh_records();
        assert_eq!(r.len(), 3);
        let rows: Vec<_> = r
            .iter()
            .map(|x| {
                (
                    x.line.as_str(),
                    x.lambda_nm,
                    x.j_prime.as_str(),
                    x.n_prime,
                    x.gamma_over_2pi_hz,
                    x.upsilon,
                    x.repumpers,
                    x.vib_leak,
                    x.cycling_hyperfine,
                    x.microwave_pulses,
                )
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                ("P1(1)", 308.256, "1/2", 0, 2.32e5, 1.43, 2, 0.004, false, 1),
                ("Q1(1)", 307.933, "3/2", 1, 2.32e5, 0.28, 4, 0.04, true, 2),
                ("Q21(1)", 307.937, "1/2", 1, 2.32e5, 0.65, 2, 0.01, false, 0),
            ]
        );
        for x in r {
            assert_eq!(x.repump_lines.len() as u32, x.repumpers);
        }
    }

    #[test]
    fn dataset_round_trips_exactly() {
        let d = oh_dataset();
        let text = toml::to_string(d).unwrap();
        let back: OhDataset = toml::from_str(&text).unwrap();
        assert_eq!(&back, d);
        let json = serde_json::to_string(d).unwrap();
        let back: OhDataset = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, d);
        for (a, b) in back.electronic.iter().zip(&d.electronic) {
            assert_eq!(a.lambda_nm.to_bits(), b.lambda_nm.to_bits());
            assert_eq!(a.upsilon.to_bits(), b.upsilon.to_bits());
        }
    }

    #[test]
    fn transition_lookup() {
        let t = oh_transition("p1(1)").unwrap();
        assert_eq!(t.name, "P1(1)");
        assert!(rel(to_hz(t.omega_rec), 1.23e5) < 0.01);
        assert_eq!(t.repumper_count, 2);
        assert!(oh_transition("R1(1)").is_err());
    }

    #[test]
    fn decay_split() {
        let (ry, rn) = three_level_decay_rates(2.0, 1.0).unwrap();
        assert_eq!((ry, rn), (1.0, 1.0));
        let (ry, rn) = three_level_decay_rates(2.0, 0.0).unwrap();
        assert_eq!((ry, rn), (0.0, 2.0));
        let g = from_hz(2.32e5);
        let (ry, rn) = three_level_decay_rates(g, 1.43).unwrap();
        assert!(rel(ry + rn, g) < 1e-15);
        assert!(rel(ry / rn, 1.43) < 1e-14);
        assert!(rel(rn, g / 2.43) < 1e-14);
        assert!(three_level_decay_rates(0.0, 1.0).is_err());
    }

    #[test]
    fn budget_limits() {
        let b = photon_budget(1.0, 1e12).unwrap();
        assert!(b.p_shelve_per_cavity_photon() < 1e-11);
        let b = photon_budget(1.0, 1e-6).unwrap();
        assert!((b.p_shelve_per_scatter - 0.5).abs() < 1e-15);
        assert_eq!(b.mean_free_scatters_to_shelve, 2.0);
        let b = photon_budget(1.43, 0.094).unwrap();
        assert!(rel(b.cavity_to_raman_ratio, 0.228) < 0.01);
        assert!(photon_budget(-1.0, 1.0).is_err());
    }

    #[test]
    fn vibrational_cavity() {
        let v = vibrational_candidates();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].upsilon, 1.6);
        let geometry = CavityGeometry::single_mode(0.01, 0.01, 1e5).unwrap();
        let expect = [(34.0, 100.0), (17.0, 23.0)];
        for (t, (c, rate)) in v.iter().zip(expect) {
            let d = DerivedCavity::derive(t, &geometry).unwrap();
            assert!(rel(d.purcell, c) < 0.15, "{}", d.purcell);
            assert!(
                rel(to_hz(d.purcell * t.gamma), rate) < 0.15,
                "{}",
                to_hz(d.purcell * t.gamma)
            );
        }
        let d = DerivedCavity::derive(&v[0], &geometry).unwrap();
        assert!(rel(d.w0, 60e-6) < 0.15);
    }

    proptest! {
        #[test]
        fn survival_probabilities(u in 0.0f64..5.0, c in 0.0f64..100.0, n in 0.0f64..1000.0) {
            let b = photon_budget(u, c).unwrap();
            let s1 = b.survival_after_n_emissions(n);
            let s2 = b.survival_after_n_cavity_photons(n);
            prop_assert!((0.0..=1.0).contains(&s1));
            prop_assert!((0.0..=1.0).contains(&s2));
            prop_assert!(b.cavity_to_raman_ratio >= 0.0);
            prop_assert!(b.survival_after_n_emissions(n + 1.0) <= s1);
        }
    }
}
