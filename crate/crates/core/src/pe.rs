//! Stratified primitive equations in the reformulated prognostic form
//!
//! ```text
//! ∂_t v − Δv + (v·∇_h)v + w ∂_z v + ∇_h p_γ − ∫_0^z ∇_h ρ dξ = 0
//! ∂_t ρ − Δρ + v·∇_h ρ + w ∂_z ρ + ∫_0^z ∇_h·v dξ = 0
//! w = −∫_0^z ∇_h·v dξ,   p = p_γ − ∫_0^z ρ dξ
//! ```
//!
//! The surface pressure is whatever keeps `∫_{-1}^{1} ∇_h·v dz = 0`; the stepper
//! obtains it by projecting the vertical mean of the tendency.

use log::{debug, warn};

use crate::error::{Error, Result};
use crate::fields::state::{PEState, DENSITY_PARITY, PRESSURE_PARITY, VELOCITY_PARITY, VERTICAL_VELOCITY_PARITY};
use crate::fields::vertical::{diagnose_pressure, diagnose_w, vertical_integral_from_zero};
use crate::integrator::{
    advection, advective_limit, full_stage, half_stage, plan_steps, IntegratingFactor, Record,
    RecordSchedule, Trajectory,
};
use crate::spectral::{
    divergence_h, inverse_many, forward_many, solve_horizontal_poisson_zero_mean, Axis, Field,
    SpectralField, SurfaceSpectrum,
};

/// Even-part size of ingested density above which a warning is logged.
pub const DENSITY_PARITY_WARN: f64 = 1e-8;

const INITIAL_DATA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PeConfig {
    pub dt: f64,
    pub t_end: f64,
    pub schedule: RecordSchedule,
    pub cfl_safety: f64,
    pub keep_states: bool,
}

impl PeConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            schedule: RecordSchedule::EverySteps(1),
            cfl_safety: 0.5,
            keep_states: false,
        }
    }

    pub fn record_every(mut self, steps: usize) -> Self {
        self.schedule = RecordSchedule::EverySteps(steps);
        self
    }

    pub fn record_interval(mut self, interval: f64) -> Self {
        self.schedule = RecordSchedule::Interval(interval);
        self
    }

    pub fn keep_states(mut self, keep: bool) -> Self {
        self.keep_states = keep;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl_safety = {} must lie in (0, 1]",
                self.cfl_safety
            )));
        }
        Ok(())
    }
}

/// Explicit tendencies `(F_v, F_ρ)`.
#[derive(Clone, Debug)]
pub struct PeTendency {
    pub v: [SpectralField; 2],
    pub rho: SpectralField,
}

struct Rhs {
    tendency: PeTendency,
    w: SpectralField,
    p_gamma: SurfaceSpectrum,
    speeds: [f64; 3],
}

fn gradient_h(q: &SurfaceSpectrum) -> Result<[SpectralField; 2]> {
    Ok([
        q.derivative(Axis::X)?.extend_z().with_parity(VELOCITY_PARITY),
        q.derivative(Axis::Y)?.extend_z().with_parity(VELOCITY_PARITY),
    ])
}

/// `q` with `Δ_h q = ∇_h·(vertical mean of v)` and zero horizontal mean.
fn barotropic_potential(v: &[SpectralField; 2]) -> Result<SurfaceSpectrum> {
    let div = divergence_h(&v[0], &v[1])?.vertical_mean();
    solve_horizontal_poisson_zero_mean(&div.scaled(-1.0))
}

fn subtract_gradient(v: &mut [SpectralField; 2], q: &SurfaceSpectrum) -> Result<()> {
    let grad = gradient_h(q)?;
    for (f, gq) in v.iter_mut().zip(&grad) {
        f.axpy(-1.0, gq)?;
        *f = f.clone().with_parity(VELOCITY_PARITY);
    }
    Ok(())
}

/// Removes the horizontal gradient that carries the barotropic divergence of `v`.
pub fn barotropic_project(v: &[SpectralField; 2]) -> Result<[SpectralField; 2]> {
    let q = barotropic_potential(v)?;
    let mut out = v.clone();
    subtract_gradient(&mut out, &q)?;
    Ok(out)
}

/// `(G_v, F_ρ)` without the surface-pressure gradient, plus the diagnosed w.
fn forcing(v: &[SpectralField; 2], rho: &SpectralField) -> Result<(PeTendency, SpectralField, [f64; 3])> {
    let w = diagnose_w(v)?.with_parity(VERTICAL_VELOCITY_PARITY);
    let adv = advection([&v[0], &v[1], &w], &[&v[0], &v[1], rho])?;
    let speeds = adv.max_speeds();
    let mut t = adv.terms.into_iter();
    let mut next = || t.next().expect("three advection terms");
    let (a0, a1, ar) = (next(), next(), next());
    let integral = vertical_integral_from_zero(rho)?;
    let mut g0 = a0.scaled(-1.0);
    g0.axpy(1.0, &integral.derivative(Axis::X, 1)?)?;
    let mut g1 = a1.scaled(-1.0);
    g1.axpy(1.0, &integral.derivative(Axis::Y, 1)?)?;
    let mut fr = ar.scaled(-1.0);
    fr.axpy(1.0, &w)?;
    Ok((
        PeTendency {
            v: [g0.with_parity(VELOCITY_PARITY), g1.with_parity(VELOCITY_PARITY)],
            rho: fr.with_parity(DENSITY_PARITY),
        },
        w,
        speeds,
    ))
}

fn rhs(v: &[SpectralField; 2], rho: &SpectralField) -> Result<Rhs> {
    let (mut tendency, w, speeds) = forcing(v, rho)?;
    let p_gamma = barotropic_potential(&tendency.v)?;
    subtract_gradient(&mut tendency.v, &p_gamma)?;
    Ok(Rhs {
        tendency,
        w,
        p_gamma,
        speeds,
    })
}

/// Tendencies of the state using its stored surface pressure; w is rediagnosed from v.
pub fn compute_rhs_pe(state: &PEState) -> Result<PeTendency> {
    let (mut tendency, _, _) = forcing(&state.v, &state.rho)?;
    subtract_gradient(&mut tendency.v, &state.p_gamma)?;
    Ok(tendency)
}

/// Surface pressure from the elliptic problem
/// `−Δ_h p_γ = ½∫_{-1}^{1} ∇_h·[∇_h·(v⊗v) − ∫_0^z ∇_h ρ] dz` with zero mean.
///
/// This is an independent route to the `p_γ` the stepper gets by projection.
pub fn solve_surface_pressure(state: &PEState) -> Result<SurfaceSpectrum> {
    let phys = inverse_many(&[&state.v[0], &state.v[1]])?;
    let (a, b) = (phys[0].values(), phys[1].values());
    let g = state.grid();
    let product = |f: &dyn Fn(usize) -> f64| Field::new(g, (0..a.len()).map(f).collect(), VELOCITY_PARITY);
    let uu = product(&|i| a[i] * a[i])?;
    let uv = product(&|i| a[i] * b[i])?;
    let vv = product(&|i| b[i] * b[i])?;
    let m: Vec<SurfaceSpectrum> = forward_many(&[&uu, &uv, &vv])?
        .into_iter()
        .map(|s| s.dealias().vertical_mean())
        .collect();
    let dxx = m[0].derivative(Axis::X)?.derivative(Axis::X)?;
    let dxy = m[1].derivative(Axis::X)?.derivative(Axis::Y)?;
    let dyy = m[2].derivative(Axis::Y)?.derivative(Axis::Y)?;
    let ibar = vertical_integral_from_zero(&state.rho)?.vertical_mean();
    let lap_i = ibar
        .derivative(Axis::X)?
        .derivative(Axis::X)?
        .sub(&ibar.derivative(Axis::Y)?.derivative(Axis::Y)?.scaled(-1.0))?;
    let rhs = dxx
        .sub(&dxy.scaled(-2.0))?
        .sub(&dyy.scaled(-1.0))?
        .sub(&lap_i)?;
    solve_horizontal_poisson_zero_mean(&rhs)
}

/// Diagnostic fields `(w, p_γ, p)` of a prognostic pair, bundled into a state.
pub fn diagnose_state(v: [SpectralField; 2], rho: SpectralField, time: f64) -> Result<PEState> {
    let r = rhs(&v, &rho)?;
    state_from(v, rho, &r, time)
}

fn state_from(v: [SpectralField; 2], rho: SpectralField, r: &Rhs, time: f64) -> Result<PEState> {
    let p = diagnose_pressure(&rho, &r.p_gamma)?.with_parity(PRESSURE_PARITY);
    Ok(PEState {
        v,
        rho,
        w: r.w.clone(),
        p,
        p_gamma: r.p_gamma.clone(),
        time,
    })
}

fn check_cfl(state: &PEState, dt: f64, speeds: [f64; 3], safety: f64) -> Result<()> {
    let limit = safety * advective_limit(state.grid(), speeds);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl {
            time: state.time,
            dt,
            suggested: limit,
        });
    }
    Ok(())
}

fn finish_stage(v: &mut [SpectralField; 2], rho: &mut SpectralField) -> Result<()> {
    *v = barotropic_project(v)?;
    for f in v.iter_mut() {
        f.parity_project_in_place(VELOCITY_PARITY);
    }
    rho.parity_project_in_place(DENSITY_PARITY);
    Ok(())
}

/// Prognostic `(v, ρ)` after one step; the diagnostics are refreshed by the caller.
fn advance(
    state: &PEState,
    dt: f64,
    rhs0: &Rhs,
    factor: &IntegratingFactor,
) -> Result<([SpectralField; 2], SpectralField)> {
    let n0 = &rhs0.tendency;
    let mut vh = [
        half_stage(&state.v[0], &n0.v[0], dt, factor)?,
        half_stage(&state.v[1], &n0.v[1], dt, factor)?,
    ];
    let mut rh = half_stage(&state.rho, &n0.rho, dt, factor)?;
    finish_stage(&mut vh, &mut rh)?;

    let n1 = rhs(&vh, &rh)?.tendency;
    let mut v = [
        full_stage(&state.v[0], &n1.v[0], dt, factor)?,
        full_stage(&state.v[1], &n1.v[1], dt, factor)?,
    ];
    let mut rho = full_stage(&state.rho, &n1.rho, dt, factor)?;
    finish_stage(&mut v, &mut rho)?;
    if !(v[0].is_finite() && v[1].is_finite() && rho.is_finite()) {
        return Err(Error::NonFinite {
            time: state.time + dt,
        });
    }
    Ok((v, rho))
}

/// Advances one step of size `dt` and rediagnoses `w`, `p_γ` and `p`.
pub fn step_pe(state: &PEState, dt: f64, cfl_safety: f64) -> Result<PEState> {
    let rhs0 = rhs(&state.v, &state.rho)?;
    check_cfl(state, dt, rhs0.speeds, cfl_safety)?;
    let factor = IntegratingFactor::new(state.grid(), dt);
    let (v, rho) = advance(state, dt, &rhs0, &factor)?;
    diagnose_state(v, rho, state.time + dt)
}

/// All per-record diagnostics of a PE state.
pub fn record_of(state: &PEState) -> Result<Record> {
    Ok(Record {
        time: state.time,
        energy: state.energy(),
        dissipation: state.dissipation(),
        div_max: state.divergence_max()?,
        parity_defect: state.parity_defect()?,
        mean_defect: state.mean_defect(),
        hydrostatic_residual: state.p.derivative(Axis::Z, 1)?.add(&state.rho)?.norm_l2(),
        barotropic_defect: state.barotropic_defect()?,
    })
}

/// Initial state: velocity parity and mean checked, density even part projected away.
pub fn initial_state(v0: &[SpectralField; 2], rho0: &SpectralField) -> Result<PEState> {
    for (f, what) in [(&v0[0], "parity of v1"), (&v0[1], "parity of v2")] {
        if f.grid() != rho0.grid() {
            return Err(Error::GridMismatch);
        }
        let scale = f.max_abs_coeff().max(1.0);
        let defect = f.sub(&f.parity_project(VELOCITY_PARITY))?.max_abs_coeff();
        if defect > INITIAL_DATA_TOL * scale {
            return Err(Error::Constraint {
                what,
                value: defect,
                tolerance: INITIAL_DATA_TOL * scale,
            });
        }
        if f.mean().abs() > INITIAL_DATA_TOL * scale {
            return Err(Error::Constraint {
                what: "mean of v",
                value: f.mean().abs(),
                tolerance: INITIAL_DATA_TOL * scale,
            });
        }
    }
    let even = rho0.parity_project(DENSITY_PARITY.flip()).max_abs_coeff();
    if even > DENSITY_PARITY_WARN {
        warn!("initial density has an even part of size {even:.3e}; projecting it away");
    }
    let v = [
        v0[0].parity_project(VELOCITY_PARITY),
        v0[1].parity_project(VELOCITY_PARITY),
    ];
    diagnose_state(v, rho0.parity_project(DENSITY_PARITY), 0.0)
}

/// Runs to `t_end`, handing each recorded state and its diagnostics to `observer`.
pub fn run_pe_with<F>(
    config: &PeConfig,
    v0: &[SpectralField; 2],
    rho0: &SpectralField,
    mut observer: F,
) -> Result<(Vec<Record>, PEState)>
where
    F: FnMut(&PEState, &Record) -> Result<()>,
{
    config.validate()?;
    let steps = plan_steps(config.dt, config.t_end, config.schedule)?;
    let mut state = initial_state(v0, rho0)?;
    let first = record_of(&state)?;
    observer(&state, &first)?;
    let mut records = vec![first];

    let mut factor = None;
    let mut cached = None;
    for step in &steps {
        let rhs0 = match cached.take() {
            Some(r) => r,
            None => rhs(&state.v, &state.rho)?,
        };
        check_cfl(&state, step.dt, rhs0.speeds, config.cfl_safety)?;
        let f = IntegratingFactor::for_step(&mut factor, state.grid(), step.dt);
        let (v, rho) = advance(&state, step.dt, &rhs0, f)?;
        let next = rhs(&v, &rho)?;
        if step.record {
            state = state_from(v, rho, &next, step.time_after)?;
            let record = record_of(&state)?;
            debug!(
                "pe t={:.4} E={:.6e} barotropic={:.2e}",
                record.time, record.energy, record.barotropic_defect
            );
            observer(&state, &record)?;
            records.push(record);
        } else {
            // w, p and p_γ are only refreshed at records
            state.v = v;
            state.rho = rho;
            state.time = step.time_after;
        }
        cached = Some(next);
    }
    Ok((records, state))
}

pub fn run_pe(config: &PeConfig, v0: &[SpectralField; 2], rho0: &SpectralField) -> Result<Trajectory<PEState>> {
    let mut states = Vec::new();
    let (records, final_state) = run_pe_with(config, v0, rho0, |s, _| {
        if config.keep_states {
            states.push(s.clone());
        }
        Ok(())
    })?;
    Ok(Trajectory {
        records,
        states,
        final_state,
    })
}
