//! Exact master-equation solutions on a truncated Fock space.
//!
//! The particle is a two-level system {g, e} coupled to one cavity mode with
//! photon numbers 0..=cutoff. In three-level mode the Raman channel removes
//! population from e into a dark state that no longer interacts with the
//! light; the dark population is 1 − Tr ρ.
//!
//! Superoperators use column stacking, vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::molecule::three_level_decay_rates;
use crate::steadystate::DriveConfig;
use crate::Complex64;

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Levels {
    Two,
    /// Two bright levels plus a dark Raman sink.
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvillianModel {
    pub levels: Levels,
    pub fock_cutoff: usize,
    pub cfg: DriveConfig,
    /// Rayleigh decay rate back to the bright ground state (three-level mode).
    pub gamma_ry: f64,
    /// Raman decay rate into the dark state (three-level mode).
    pub gamma_rn: f64,
}

pub const DEFAULT_FOCK_CUTOFF: usize = 8;

impl LiouvillianModel {
    pub fn two_level(cfg: DriveConfig, fock_cutoff: usize) -> Result<Self> {
        let cfg = cfg.validated()?;
        let m = LiouvillianModel {
            levels: Levels::Two,
            fock_cutoff,
            cfg,
            gamma_ry: cfg.gamma(),
            gamma_rn: 0.0,
        };
        m.validated()
    }

    /// Three-level model with the total decay γ = 2γ⊥ split by Υ.
    pub fn three_level(cfg: DriveConfig, fock_cutoff: usize, upsilon: f64) -> Result<Self> {
        let cfg = cfg.validated()?;
        let (gamma_ry, gamma_rn) = three_level_decay_rates(cfg.gamma(), upsilon)?;
        LiouvillianModel {
            levels: Levels::Three,
            fock_cutoff,
            cfg,
            gamma_ry,
            gamma_rn,
        }
        .validated()
    }

    fn validated(self) -> Result<Self> {
        if self.fock_cutoff < 2 {
            return Err(Error::domain(format!(
                "Fock cutoff must be at least 2, got {}",
                self.fock_cutoff
            )));
        }
        if !(self.gamma_ry >= 0.0 && self.gamma_rn >= 0.0) {
            return Err(Error::domain("decay rates must be non-negative"));
        }
        Ok(self)
    }

    /// Hilbert-space dimension 2·(cutoff + 1).
    pub fn dim(&self) -> usize {
        2 * (self.fock_cutoff + 1)
    }

    fn ops(&self) -> Ops {
        Ops::new(self.fock_cutoff)
    }

    pub fn hamiltonian(&self) -> CMat {
        let o = self.ops();
        let c = &self.cfg;
        let sp = o.sm.adjoint();
        let ad = o.a.adjoint();
        let r = |x: f64| Complex64::new(x, 0.0);
        &o.pe * r(-c.delta_pa)
            + &o.n * r(-c.delta_pc)
            + (&ad * &o.sm + &sp * &o.a) * r(c.g)
            + (&o.sm + &sp) * r(0.5 * c.omega_p)
            + (&o.a + &ad) * r(0.5 * c.omega_d)
    }

    /// Liouvillian superoperator acting on column-stacked ρ.
    pub fn liouvillian(&self) -> CMat {
        let o = self.ops();
        let d = self.dim();
        let id = CMat::identity(d, d);
        let h = self.hamiltonian();
        let i = Complex64::new(0.0, 1.0);
        let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * (-i);
        l += dissipator(&o.a, &id) * Complex64::new(2.0 * self.cfg.kappa, 0.0);
        match self.levels {
            Levels::Two => l += dissipator(&o.sm, &id) * Complex64::new(self.cfg.gamma(), 0.0),
            Levels::Three => {
                l += dissipator(&o.sm, &id) * Complex64::new(self.gamma_ry, 0.0);
                let anti = id.kronecker(&o.pe) + o.pe.transpose().kronecker(&id);
                l -= anti * Complex64::new(0.5 * self.gamma_rn, 0.0);
            }
        }
        l
    }

    /// |g, 0⟩⟨g, 0|.
    pub fn ground_state(&self) -> CMat {
        let mut rho = CMat::zeros(self.dim(), self.dim());
        rho[(0, 0)] = ONE;
        rho
    }
}

/// D[c] = c·c† − ½{c†c, ·} as a superoperator.
fn dissipator(c: &CMat, id: &CMat) -> CMat {
    let cdc = c.adjoint() * c;
    c.conjugate().kronecker(c)
        - (id.kronecker(&cdc) + cdc.transpose().kronecker(id)) * Complex64::new(0.5, 0.0)
}

struct Ops {
    a: CMat,
    n: CMat,
    sm: CMat,
    pe: CMat,
}

impl Ops {
    fn new(cutoff: usize) -> Self {
        let nf = cutoff + 1;
        let mut a = CMat::zeros(nf, nf);
        for k in 1..nf {
            a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        let ida = CMat::identity(2, 2);
        let idf = CMat::identity(nf, nf);
        let mut sm = CMat::zeros(2, 2);
        sm[(0, 1)] = ONE;
        let mut pe = CMat::zeros(2, 2);
        pe[(1, 1)] = ONE;
        let a_full = ida.kronecker(&a);
        let n = a_full.adjoint() * &a_full;
        Ops {
            a: a_full,
            n,
            sm: sm.kronecker(&idf),
            pe: pe.kronecker(&idf),
        }
    }
}

fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

fn unvec(v: &CVec, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Row vector r with r·vec(ρ) = Tr(Aρ).
fn expectation_row(a: &CMat) -> CVec {
    vec_of(&a.transpose())
}

fn expect(a: &CMat, rho: &CMat) -> Complex64 {
    (a * rho).trace()
}

fn top_fock_population(rho: &CMat, cutoff: usize) -> f64 {
    let nf = cutoff + 1;
    (0..2)
        .map(|atom| rho[(atom * nf + cutoff, atom * nf + cutoff)].re)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSteadyState {
    /// ⟨a⟩.
    pub alpha_q: Complex64,
    /// ⟨σ₋⟩.
    pub zeta_q: Complex64,
    /// ⟨a†a⟩.
    pub n_photon: f64,
    pub sigma_ee_q: f64,
    /// 2κ⟨a†a⟩ (1/s).
    pub cavity_flux: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_error: f64,
    pub top_fock_population: f64,
}

fn check_density_matrix(rho: &CMat, model: &LiouvillianModel) -> Result<(f64, f64, f64)> {
    let herm = (rho - rho.adjoint())
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()));
    if herm > 1e-10 {
        return Err(Error::Singular(format!(
            "density matrix is not Hermitian (deviation {herm:e})"
        )));
    }
    let sym = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eig = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_eig < -1e-10 {
        return Err(Error::Singular(format!(
            "density matrix has negative eigenvalue {min_eig:e}"
        )));
    }
    let top = top_fock_population(rho, model.fock_cutoff);
    if top > 1e-4 {
        return Err(Error::CutoffExceeded {
            cutoff: model.fock_cutoff,
            leakage: top,
        });
    }
    Ok((herm, min_eig, top))
}

/// Exact steady state of the two-level model by a direct linear solve with
/// one equation replaced by the trace condition.
pub fn steady_state(model: &LiouvillianModel) -> Result<OracleSteadyState> {
    if model.levels == Levels::Three {
        return Err(Error::domain(
            "the three-level model decays into the dark state; use shelving_dynamics or shelving_totals",
        ));
    }
    let d = model.dim();
    let mut l = model.liouvillian();
    let trace_row = expectation_row(&CMat::identity(d, d));
    l.set_row(0, &trace_row.transpose());
    let mut rhs = CVec::zeros(d * d);
    rhs[0] = ONE;
    let x = l
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Liouvillian has no unique steady state".into()))?;
    let rho = unvec(&x, d);
    let trace = rho.trace();
    if (trace - ONE).norm() > 1e-10 {
        return Err(Error::Singular(format!(
            "steady-state trace {trace} differs from one"
        )));
    }
    let (herm, min_eig, top) = check_density_matrix(&rho, model)?;
    let o = model.ops();
    let n_photon = expect(&o.n, &rho).re;
    if n_photon >= 0.1 * model.fock_cutoff as f64 {
        return Err(Error::CutoffExceeded {
            cutoff: model.fock_cutoff,
            leakage: top,
        });
    }
    Ok(OracleSteadyState {
        alpha_q: expect(&o.a, &rho),
        zeta_q: expect(&o.sm, &rho),
        n_photon,
        sigma_ee_q: expect(&o.pe, &rho).re,
        cavity_flux: 2.0 * model.cfg.kappa * n_photon,
        trace: trace.re,
        min_eigenvalue: min_eig,
        hermiticity_error: herm,
        top_fock_population: top,
    })
}

/// ρ(t) = exp(Lt) ρ₀.
pub fn propagate(model: &LiouvillianModel, rho0: &CMat, t: f64) -> CMat {
    let prop = (model.liouvillian() * Complex64::new(t, 0.0)).exp();
    unvec(&(prop * vec_of(rho0)), model.dim())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelvingSample {
    pub t: f64,
    /// Bright ground-state population, summed over photon number.
    pub ground: f64,
    pub excited: f64,
    /// Dark-state population 1 − Tr ρ.
    pub shelved: f64,
    /// ∫γ_Rn⟨P_e⟩dt, equal to `shelved` by population conservation.
    pub raman_integrated: f64,
    pub photon_number: f64,
    /// Cumulative photons emitted through the mirrors, ∫2κ⟨a†a⟩dt.
    pub cavity_photons: f64,
    /// Cumulative free-space scatters, ∫γ⟨P_e⟩dt.
    pub free_space_scatters: f64,
}

/// Time series of the three-level model from |g, 0⟩, sampled `n_samples`
/// times up to `t_max`. Integrated quantities are exact: the propagator of
/// the generator augmented by the rate functionals is exponentiated once.
pub fn shelving_dynamics(
    model: &LiouvillianModel,
    t_max: f64,
    n_samples: usize,
) -> Result<Vec<ShelvingSample>> {
    if model.levels != Levels::Three {
        return Err(Error::domain(
            "shelving dynamics needs the three-level model",
        ));
    }
    if !(t_max > 0.0) || n_samples == 0 {
        return Err(Error::domain("need t_max > 0 and at least one sample"));
    }
    let d = model.dim();
    let dd = d * d;
    let o = model.ops();
    let rows = [
        expectation_row(&o.n) * Complex64::new(2.0 * model.cfg.kappa, 0.0),
        expectation_row(&o.pe) * Complex64::new(model.gamma_ry + model.gamma_rn, 0.0),
        expectation_row(&o.pe) * Complex64::new(model.gamma_rn, 0.0),
    ];
    let mut gen = CMat::zeros(dd + 3, dd + 3);
    gen.view_mut((0, 0), (dd, dd))
        .copy_from(&model.liouvillian());
    for (k, r) in rows.iter().enumerate() {
        gen.view_mut((dd + k, 0), (1, dd)).copy_from(&r.transpose());
    }
    let dt = t_max / n_samples as f64;
    let step = (gen * Complex64::new(dt, 0.0)).exp();
    let mut y = CVec::zeros(dd + 3);
    y.rows_mut(0, dd).copy_from(&vec_of(&model.ground_state()));
    let mut out = Vec::with_capacity(n_samples + 1);
    let mut worst_top = 0.0f64;
    for i in 0..=n_samples {
        if i > 0 {
            y = &step * &y;
        }
        let rho = unvec(&y.rows(0, dd).into_owned(), d);
        let tr = rho.trace().re;
        worst_top = worst_top.max(top_fock_population(&rho, model.fock_cutoff));
        let excited = expect(&o.pe, &rho).re;
        out.push(ShelvingSample {
            t: i as f64 * dt,
            ground: tr - excited,
            excited,
            shelved: 1.0 - tr,
            raman_integrated: y[dd + 2].re,
            photon_number: expect(&o.n, &rho).re,
            cavity_photons: y[dd].re,
            free_space_scatters: y[dd + 1].re,
        });
        if !out.last().is_some_and(|s| s.shelved.is_finite()) {
            return Err(Error::Integration {
                t: i as f64 * dt,
                reason: "non-finite population".into(),
            });
        }
    }
    if worst_top > 1e-4 {
        return Err(Error::CutoffExceeded {
            cutoff: model.fock_cutoff,
            leakage: worst_top,
        });
    }
    Ok(out)
}

/// Expected totals over the whole bright lifetime, from ∫ρ dt = −L⁻¹ρ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelvingTotals {
    pub cavity_photons: f64,
    pub free_space_scatters: f64,
    /// Total probability of ending up dark; one when every bright state decays.
    pub raman_events: f64,
    /// ∫Tr ρ dt, the mean bright lifetime (s).
    pub mean_lifetime: f64,
}

pub fn shelving_totals(model: &LiouvillianModel) -> Result<ShelvingTotals> {
    if model.levels != Levels::Three || model.gamma_rn == 0.0 {
        return Err(Error::domain(
            "shelving totals need the three-level model with a Raman channel",
        ));
    }
    let d = model.dim();
    let l = -model.liouvillian();
    let x = l
        .lu()
        .solve(&vec_of(&model.ground_state()))
        .ok_or_else(|| Error::Singular("Liouvillian is not invertible".into()))?;
    let integral = unvec(&x, d);
    let o = model.ops();
    let pe = expect(&o.pe, &integral).re;
    Ok(ShelvingTotals {
        cavity_photons: 2.0 * model.cfg.kappa * expect(&o.n, &integral).re,
        free_space_scatters: (model.gamma_ry + model.gamma_rn) * pe,
        raman_events: model.gamma_rn * pe,
        mean_lifetime: integral.trace().re,
    })
}
