//! Subcommand bodies. Each returns the full text written to the output.

use std::path::Path;

use cavcool::molecule::{oh_dataset, photon_budget};
use cavcool::multimode::{confocal_report, design_sweep, SweepRow};
use cavcool::oracle::{self, LiouvillianModel, DEFAULT_FOCK_CUTOFF};
use cavcool::rates::{cooperativity, damping_map, gamma_a, gamma_c, rate_report, temperature_limits, DampingMap};
use cavcool::scenario::{transit_curve, zone_presets, TransitTimes, ZONE_WARNING};
use cavcool::selforg::{run, scan_omega_p, thresholds, ScanRow, ThresholdInputs, TrajectorySample};
use cavcool::steadystate::{solve_self_consistent, DriveConfig};
use cavcool::units::{from_hz, to_hz};
use serde_json::{json, Value};

use crate::config::{self, CavityKind, CouplingChoice};
use crate::output::{csv, envelope, num, text};
use crate::{CliError, Grid};

pub fn report(transition: Option<&str>, path: &Path, as_json: bool) -> Result<String, CliError> {
    let cfg = config::load(path)?;
    let t = match transition {
        Some(name) => config::resolve_transition(name)?,
        None => cfg.transition()?,
    };
    let sec = cfg.section("cavity", &cfg.cavity)?;
    let d = cavcool::units::DerivedCavity::derive(&t, &sec.geometry()?)?;
    let gp = t.gamma_perp();
    let c_eff = cooperativity(d.g_eff(), d.kappa, gp);
    let budget = photon_budget(t.upsilon, c_eff)?;
    let at_rest = DriveConfig {
        omega_p: 0.0,
        omega_d: 0.0,
        delta_pa: 0.0,
        delta_pc: -d.kappa,
        g: d.g_eff(),
        gamma_perp: gp,
        kappa: d.kappa,
    };
    let temps = temperature_limits(&at_rest, &t);
    let mut data = json!({
        "transition": {
            "name": t.name,
            "lambda_m": t.lambda,
            "gamma_hz": to_hz(t.gamma),
            "gamma_perp_hz": to_hz(gp),
            "upsilon": t.upsilon,
            "omega_rec_hz": to_hz(t.omega_rec),
            "mass_kg": t.mass,
        },
        "cavity": {
            "kind": match sec.kind { CavityKind::SingleMode => "single_mode", CavityKind::Confocal => "confocal" },
            "length_m": sec.length_m,
            "finesse": sec.finesse,
            "kappa_hz": to_hz(d.kappa),
            "w0_m": d.w0,
            "mode_volume_m3": d.mode_volume,
            "g0_hz": to_hz(d.g0),
            "g_eff_hz": to_hz(d.g_eff()),
            "n_eff": d.n_eff,
            "w_sa_m": d.w_sa,
            "c_single": d.c_single,
            "purcell": d.purcell,
            "c_sa": d.c_sa,
            "q": d.q,
            "m0": d.m0,
            "n0_crit": d.n0_crit,
        },
        "photon_budget": {
            "cooperativity": budget.cooperativity,
            "upsilon": budget.upsilon,
            "p_shelve_per_scatter": budget.p_shelve_per_scatter,
            "mean_free_scatters_to_shelve": budget.mean_free_scatters_to_shelve,
            "cavity_to_raman_ratio": budget.cavity_to_raman_ratio,
            "p_shelve_per_cavity_photon": budget.p_shelve_per_cavity_photon(),
        },
        "temperatures": {
            "t_kappa_k": temps.t_kappa,
            "t_rec_k": temps.t_rec,
            "t_recoil_kinetic_k": temps.t_recoil_kinetic,
            "t_f_k": temps.t_f,
        },
    });
    if sec.kind == CavityKind::Confocal {
        let r = confocal_report(&t, sec.finesse, sec.length_m, sec.degradation.unwrap_or(1.0))?;
        data["confocal"] = json!({
            "degradation": r.degradation,
            "n_eff_aberration": r.n_eff_aberration,
            "n_eff_modecount": r.n_eff_modecount,
            "mode_count_m": r.mode_count_m,
            "figure_of_merit_m2": r.figure_of_merit,
            "delta_omega_sa_over_delta_omega": r.delta_omega_sa_over_delta_omega,
        });
    } else {
        data["cavity"]["radius_m"] = json!(sec.radius_m);
    }
    if cfg.drive.is_some() {
        let dc = cfg.drive_config(&t)?;
        let r = rate_report(&dc, &t);
        let ss = solve_self_consistent(&dc)?;
        data["rates"] = json!({
            "gamma_c_per_s": r.gamma_c,
            "gamma_a_per_s": r.gamma_a,
            "ratio_c": r.ratio_c,
            "t_f_k": r.t_f,
            "t_rec_k": r.t_rec,
            "optimal_delta_pc_hz": to_hz(r.optimal_delta_pc),
            "capture_range_hz": to_hz(r.capture_range),
        });
        data["steady_state"] = json!({
            "re_alpha": ss.alpha.re,
            "im_alpha": ss.alpha.im,
            "photon_number": ss.photon_number(),
            "sigma_ee": ss.sigma_ee,
            "s": ss.s,
            "converged": ss.converged,
            "multivalued": ss.multivalued,
        });
    }
    Ok(if as_json { envelope("report", data) } else { text(&data) })
}

pub fn sweep(transition: &str, f: &Grid, r: &Grid, degradation: f64) -> Result<String, CliError> {
    let t = config::resolve_transition(transition)?;
    let rows = design_sweep(&t, &f.values(), &r.values(), degradation)?;
    csv(&SweepRow::HEADER, rows.iter().map(SweepRow::to_record))
}

pub fn coolmap(path: &Path) -> Result<String, CliError> {
    let cfg = config::load(path)?;
    let spec = cfg.coolmap_spec(&cfg.transition()?)?;
    let map = damping_map(&spec)?;
    let (largest, total) = map.cooling_components();
    eprintln!("cooling cells: {total}, largest connected region: {largest}");
    csv(&DampingMap::HEADER, map.rows().map(|(d, c, r)| vec![num(d), num(c), num(r)]))
}

pub fn threshold(path: &Path) -> Result<String, CliError> {
    let cfg = config::load(path)?;
    let t = cfg.transition()?;
    let s = cfg.section("threshold", &cfg.threshold)?;
    let d = cfg
        .derived_cavity(&t)?
        .ok_or_else(|| CliError::Config("missing section [cavity]".into()))?;
    let g = match s.coupling {
        CouplingChoice::G0 => d.g0,
        CouplingChoice::GEff => d.g_eff(),
    };
    let inputs = ThresholdInputs {
        kappa: d.kappa,
        delta_pa: from_hz(s.delta_pa_hz),
        g,
        temperature: s.temperature_k,
    };
    let r = thresholds(inputs, s.n_particles, s.s_max)?;
    let data = json!({
        "inputs": {
            "transition": t.name,
            "kappa_hz": to_hz(d.kappa),
            "g_hz": to_hz(g),
            "delta_pa_hz": s.delta_pa_hz,
            "temperature_k": s.temperature_k,
            "n_particles": s.n_particles,
            "s_max": s.s_max,
        },
        "omega_th_meanfield_hz": to_hz(r.omega_th_meanfield),
        "omega_th_numerical_hz": to_hz(r.omega_th_numerical),
        "n0_x2": r.n0_x2,
        "n0_x4": r.n0_x4,
        "s_at_pump": r.s_at_pump,
    });
    Ok(envelope("threshold", data))
}

pub fn dynamics(path: &Path, scan: Option<&(String, Grid)>, seeds: usize) -> Result<String, CliError> {
    let cfg = config::load(path)?;
    let ens = cfg.ensemble()?;
    let Some((key, grid)) = scan else {
        let traj = run(&ens)?;
        let s = traj.summary(&ens)?;
        eprintln!(
            "final order {:.3}, localization {:?}, KE ratio {:.3}",
            s.final_order,
            s.localization,
            s.ke_final / s.ke_initial
        );
        return csv(&TrajectorySample::HEADER, traj.samples.iter().map(TrajectorySample::to_record));
    };
    let omega_p: Vec<f64> = match key.as_str() {
        "omega_p" => grid.values().into_iter().map(from_hz).collect(),
        "omega_p_over_threshold" => {
            let th = thresholds(ens.threshold_inputs(), ens.n_particles as f64, 0.5)?;
            grid.values().into_iter().map(|f| f * th.omega_th_meanfield).collect()
        }
        other => {
            return Err(CliError::Config(format!(
                "--scan: unknown parameter {other:?} (expected omega_p or omega_p_over_threshold)"
            )))
        }
    };
    let rows = scan_omega_p(&ens, &omega_p, seeds)?;
    csv(
        &ScanRow::HEADER,
        rows.iter()
            .map(|r| vec![num(to_hz(r.omega_p)), num(r.p_localize), num(r.mean_output), r.n_seeds.to_string()]),
    )
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn oracle(path: &Path) -> Result<String, CliError> {
    let cfg = config::load(path)?;
    let t = cfg.transition()?;
    let dc = cfg.drive_config(&t)?;
    let o = cfg.oracle.clone().unwrap_or_default();
    let cutoff = o.fock_cutoff.unwrap_or(DEFAULT_FOCK_CUTOFF);
    let sc = solve_self_consistent(&dc)?;
    let q = oracle::steady_state(&LiouvillianModel::two_level(dc, cutoff)?)?;
    let mut rows = vec![
        ("re_alpha", sc.alpha.re, q.alpha_q.re),
        ("im_alpha", sc.alpha.im, q.alpha_q.im),
        ("abs_alpha", sc.alpha.norm(), q.alpha_q.norm()),
        ("photon_number", sc.photon_number(), q.n_photon),
        ("sigma_ee", sc.sigma_ee, q.sigma_ee_q),
    ];
    if let Some(u) = o.upsilon {
        let tot = oracle::shelving_totals(&LiouvillianModel::three_level(dc, cutoff, u)?)?;
        let ratio = gamma_c(&dc) / gamma_a(&dc);
        rows.push((
            "cavity_photons_per_shelving",
            (1.0 + u) * ratio,
            tot.cavity_photons / tot.raman_events,
        ));
        rows.push((
            "free_space_scatters_per_shelving",
            1.0 + u,
            tot.free_space_scatters / tot.raman_events,
        ));
    }
    csv(
        &["quantity", "semiclassical", "oracle", "relative_difference"],
        rows.into_iter()
            .map(|(name, a, b)| vec![name.to_string(), num(a), num(b), num(rel_diff(a, b))]),
    )
}

pub fn oh(as_json: bool) -> Result<String, CliError> {
    let data = oh_dataset();
    if as_json {
        let v = serde_json::to_value(data).map_err(|e| CliError::Io(e.to_string()))?;
        return Ok(envelope("oh_dataset", v));
    }
    csv(
        &[
            "line",
            "lambda_nm",
            "j_prime",
            "n_prime",
            "gamma_over_2pi_hz",
            "upsilon",
            "repumpers",
            "vib_leak",
            "cycling_hyperfine",
            "microwave_pulses",
            "repump_lines",
        ],
        data.electronic.iter().map(|r| {
            vec![
                r.line.clone(),
                r.lambda_nm.to_string(),
                r.j_prime.clone(),
                r.n_prime.to_string(),
                r.gamma_over_2pi_hz.to_string(),
                r.upsilon.to_string(),
                r.repumpers.to_string(),
                r.vib_leak.to_string(),
                r.cycling_hyperfine.to_string(),
                r.microwave_pulses.to_string(),
                r.repump_lines.join(" "),
            ]
        }),
    )
}

pub fn transit(transition: &str, length_m: f64, finesse: f64, degradation: f64, v: &Grid) -> Result<String, CliError> {
    let t = config::resolve_transition(transition)?;
    let c = confocal_report(&t, finesse, length_m, degradation)?;
    let rows = transit_curve(&c, v.start, v.stop, v.n)?;
    csv(&TransitTimes::HEADER, rows.iter().map(TransitTimes::to_record))
}

pub fn zones() -> String {
    let zones: Vec<Value> = zone_presets()
        .into_iter()
        .map(|s| {
            json!({
                "zone": s.zone,
                "density_per_cm3": s.density,
                "velocity_m_s": s.velocity,
                "description": s.description,
            })
        })
        .collect();
    envelope("zones", json!({ "warning": ZONE_WARNING, "zones": zones }))
}
