//! Scaled Boussinesq system on the fixed domain.
//!
//! ```text
//! ∂_t v − Δv + (v·∇_h)v + w ∂_z v + ∇_h p = 0
//! τ²(∂_t w − Δw + (v·∇_h)w + w ∂_z w) + ∂_z p + ρ = 0
//! ∂_t ρ − Δρ + v·∇_h ρ + w ∂_z ρ − w = 0
//! ∇_h·v + ∂_z w = 0
//! ```
//!
//! Diffusion is integrated exactly with `e^{−|k|² dt}`; advection and buoyancy
//! use explicit midpoint RK2 on the projected tendencies.

use log::debug;

use crate::error::{Error, Result};
use crate::fields::state::{
    BoussinesqState, DENSITY_PARITY, PRESSURE_PARITY, VELOCITY_PARITY, VERTICAL_VELOCITY_PARITY,
};
use crate::fields::vertical::diagnose_w;
use crate::integrator::{
    advection, advective_limit, full_stage, half_stage, plan_steps, IntegratingFactor, Record,
    RecordSchedule, Trajectory,
};
use crate::spectral::{divergence_h, solve_anisotropic_poisson, Axis, SpectralField};

/// Fraction of τ allowed as a step, from the `ρ/τ²` buoyancy oscillation.
pub const BUOYANCY_DT_FACTOR: f64 = 0.5;

/// Tolerance on parity and mean violations of initial data, relative to the field size.
const INITIAL_DATA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct BoussinesqConfig {
    pub tau: f64,
    pub dt: f64,
    pub t_end: f64,
    pub schedule: RecordSchedule,
    pub cfl_safety: f64,
    /// Keep every recorded state in the trajectory.
    pub keep_states: bool,
}

impl BoussinesqConfig {
    pub fn new(tau: f64, dt: f64, t_end: f64) -> Self {
        Self {
            tau,
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
        check_tau(self.tau)?;
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl_safety = {} must lie in (0, 1]",
                self.cfl_safety
            )));
        }
        Ok(())
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("tau = {tau} must be positive")))
    }
}

/// Explicit tendencies `(F_v, F_w, F_ρ)`.
#[derive(Clone, Debug)]
pub struct BoussinesqTendency {
    pub v: [SpectralField; 2],
    pub w: SpectralField,
    pub rho: SpectralField,
}

struct Rhs {
    tendency: BoussinesqTendency,
    pressure: SpectralField,
    speeds: [f64; 3],
}

fn raw_rhs(
    v: &[SpectralField; 2],
    w: &SpectralField,
    rho: &SpectralField,
    tau: f64,
) -> Result<(BoussinesqTendency, [f64; 3])> {
    check_tau(tau)?;
    let adv = advection([&v[0], &v[1], w], &[&v[0], &v[1], w, rho])?;
    let speeds = adv.max_speeds();
    let mut t = adv.terms.into_iter();
    let mut next = || t.next().expect("four advection terms");
    let (a0, a1, aw, ar) = (next(), next(), next(), next());
    let mut fw = aw.scaled(-1.0);
    fw.axpy(-1.0 / (tau * tau), rho)?;
    let mut fr = ar.scaled(-1.0);
    fr.axpy(1.0, w)?;
    Ok((
        BoussinesqTendency {
            v: [
                a0.scaled(-1.0).with_parity(VELOCITY_PARITY),
                a1.scaled(-1.0).with_parity(VELOCITY_PARITY),
            ],
            w: fw.with_parity(VERTICAL_VELOCITY_PARITY),
            rho: fr.with_parity(DENSITY_PARITY),
        },
        speeds,
    ))
}

/// Unprojected tendencies of the state; diffusion is left to the integrating factor.
pub fn compute_rhs_boussinesq(state: &BoussinesqState) -> Result<BoussinesqTendency> {
    Ok(raw_rhs(&state.v, &state.w, &state.rho, state.tau)?.0)
}

/// Removes `(∇_h φ, τ⁻² ∂_z φ)` from `(a, b)` where `(Δ_h + τ⁻²∂_zz)φ = ∇_h·a + ∂_z b`; returns φ.
fn project_in_place(a: &mut [SpectralField; 2], b: &mut SpectralField, tau: f64) -> Result<SpectralField> {
    let mut div = divergence_h(&a[0], &a[1])?;
    div.axpy(1.0, &b.derivative(Axis::Z, 1)?)?;
    let phi = solve_anisotropic_poisson(&div, tau)?.with_parity(PRESSURE_PARITY);
    a[0].axpy(-1.0, &phi.derivative(Axis::X, 1)?)?;
    a[1].axpy(-1.0, &phi.derivative(Axis::Y, 1)?)?;
    b.axpy(-1.0 / (tau * tau), &phi.derivative(Axis::Z, 1)?)?;
    a[0] = a[0].clone().with_parity(VELOCITY_PARITY);
    a[1] = a[1].clone().with_parity(VELOCITY_PARITY);
    *b = b.clone().with_parity(VERTICAL_VELOCITY_PARITY);
    Ok(phi)
}

/// Projected velocity and pressure.
#[derive(Clone, Debug)]
pub struct Projection {
    pub v: [SpectralField; 2],
    pub w: SpectralField,
    pub pressure: SpectralField,
}

/// Anisotropic Leray projection of a tentative velocity reached after a step `dt`.
///
/// Returns `v = v* − dt ∇_h p`, `w = w* − (dt/τ²) ∂_z p` with zero-mean `p`
/// chosen so that `∇_h·v + ∂_z w = 0`.
pub fn project_incompressible(
    v: &[SpectralField; 2],
    w: &SpectralField,
    tau: f64,
    dt: f64,
) -> Result<Projection> {
    check_tau(tau)?;
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let mut v = v.clone();
    let mut w = w.clone();
    let phi = project_in_place(&mut v, &mut w, tau)?;
    Ok(Projection {
        v,
        w,
        pressure: phi.scaled(1.0 / dt),
    })
}

fn rhs(v: &[SpectralField; 2], w: &SpectralField, rho: &SpectralField, tau: f64) -> Result<Rhs> {
    let (mut tendency, speeds) = raw_rhs(v, w, rho, tau)?;
    let pressure = project_in_place(&mut tendency.v, &mut tendency.w, tau)?;
    Ok(Rhs {
        tendency,
        pressure,
        speeds,
    })
}

fn check_cfl(state: &BoussinesqState, dt: f64, speeds: [f64; 3], safety: f64) -> Result<()> {
    let limit = safety * advective_limit(state.grid(), speeds).min(BUOYANCY_DT_FACTOR * state.tau);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl {
            time: state.time,
            dt,
            suggested: limit,
        });
    }
    Ok(())
}

fn advance(state: &BoussinesqState, dt: f64, rhs0: &Rhs, factor: &IntegratingFactor) -> Result<BoussinesqState> {
    let tau = state.tau;
    let n0 = &rhs0.tendency;
    let mut vh = [
        half_stage(&state.v[0], &n0.v[0], dt, factor)?,
        half_stage(&state.v[1], &n0.v[1], dt, factor)?,
    ];
    let mut wh = half_stage(&state.w, &n0.w, dt, factor)?;
    let rh = half_stage(&state.rho, &n0.rho, dt, factor)?;
    project_in_place(&mut vh, &mut wh, tau)?;

    let n1 = rhs(&vh, &wh, &rh, tau)?.tendency;
    let mut v = [
        full_stage(&state.v[0], &n1.v[0], dt, factor)?,
        full_stage(&state.v[1], &n1.v[1], dt, factor)?,
    ];
    let mut w = full_stage(&state.w, &n1.w, dt, factor)?;
    let mut rho = full_stage(&state.rho, &n1.rho, dt, factor)?;
    project_in_place(&mut v, &mut w, tau)?;
    for f in v.iter_mut() {
        f.parity_project_in_place(VELOCITY_PARITY);
    }
    w.parity_project_in_place(VERTICAL_VELOCITY_PARITY);
    rho.parity_project_in_place(DENSITY_PARITY);
    let next = BoussinesqState {
        v,
        w,
        rho,
        pressure: state.pressure.clone(),
        tau,
        time: state.time + dt,
    };
    if !next.is_finite() {
        return Err(Error::NonFinite { time: next.time });
    }
    Ok(next)
}

/// Advances one step of size `dt`. The returned pressure is the one at the new time.
pub fn step_boussinesq(state: &BoussinesqState, dt: f64, cfl_safety: f64) -> Result<BoussinesqState> {
    let rhs0 = rhs(&state.v, &state.w, &state.rho, state.tau)?;
    check_cfl(state, dt, rhs0.speeds, cfl_safety)?;
    let factor = IntegratingFactor::new(state.grid(), dt);
    let mut next = advance(state, dt, &rhs0, &factor)?;
    next.pressure = rhs(&next.v, &next.w, &next.rho, next.tau)?.pressure;
    Ok(next)
}

/// `‖∂_z p + ρ‖₂`.
pub fn hydrostatic_residual_of(state: &BoussinesqState) -> Result<f64> {
    Ok(state
        .pressure
        .derivative(Axis::Z, 1)?
        .add(&state.rho)?
        .norm_l2())
}

/// All per-record diagnostics of a Boussinesq state.
pub fn record_of(state: &BoussinesqState) -> Result<Record> {
    Ok(Record {
        time: state.time,
        energy: state.energy(),
        dissipation: state.dissipation(),
        div_max: state.divergence_max()?,
        parity_defect: state.parity_defect()?,
        mean_defect: state.mean_defect(),
        hydrostatic_residual: hydrostatic_residual_of(state)?,
        barotropic_defect: 0.0,
    })
}

fn check_initial(v0: &[SpectralField; 2], rho0: &SpectralField) -> Result<()> {
    let checks = [
        (&v0[0], VELOCITY_PARITY, "parity of v1"),
        (&v0[1], VELOCITY_PARITY, "parity of v2"),
        (rho0, DENSITY_PARITY, "parity of rho"),
    ];
    for (f, parity, what) in checks {
        if f.grid() != rho0.grid() {
            return Err(Error::GridMismatch);
        }
        let defect = f.sub(&f.parity_project(parity))?.max_abs_coeff();
        let tolerance = INITIAL_DATA_TOL * f.max_abs_coeff().max(1.0);
        if defect > tolerance {
            return Err(Error::Constraint {
                what,
                value: defect,
                tolerance,
            });
        }
    }
    for f in v0 {
        let tolerance = INITIAL_DATA_TOL * f.max_abs_coeff().max(1.0);
        if f.mean().abs() > tolerance {
            return Err(Error::Constraint {
                what: "mean of v",
                value: f.mean().abs(),
                tolerance,
            });
        }
    }
    Ok(())
}

/// Initial state: parities checked and enforced, `w₀` diagnosed from `v₀`, pressure from the tendencies.
pub fn initial_state(v0: &[SpectralField; 2], rho0: &SpectralField, tau: f64) -> Result<BoussinesqState> {
    check_tau(tau)?;
    check_initial(v0, rho0)?;
    let v = [
        v0[0].parity_project(VELOCITY_PARITY),
        v0[1].parity_project(VELOCITY_PARITY),
    ];
    let rho = rho0.parity_project(DENSITY_PARITY);
    let w = diagnose_w(&v)?.with_parity(VERTICAL_VELOCITY_PARITY);
    let pressure = rhs(&v, &w, &rho, tau)?.pressure;
    Ok(BoussinesqState {
        v,
        w,
        rho,
        pressure,
        tau,
        time: 0.0,
    })
}

/// Runs to `t_end`, handing each recorded state and its diagnostics to `observer`.
pub fn run_boussinesq_with<F>(
    config: &BoussinesqConfig,
    v0: &[SpectralField; 2],
    rho0: &SpectralField,
    mut observer: F,
) -> Result<(Vec<Record>, BoussinesqState)>
where
    F: FnMut(&BoussinesqState, &Record) -> Result<()>,
{
    config.validate()?;
    let steps = plan_steps(config.dt, config.t_end, config.schedule)?;
    let mut state = initial_state(v0, rho0, config.tau)?;
    let first = record_of(&state)?;
    observer(&state, &first)?;
    let mut records = vec![first];

    let mut factor = None;
    let mut cached = None;
    for step in &steps {
        let rhs0 = match cached.take() {
            Some(r) => r,
            None => rhs(&state.v, &state.w, &state.rho, config.tau)?,
        };
        check_cfl(&state, step.dt, rhs0.speeds, config.cfl_safety)?;
        let f = IntegratingFactor::for_step(&mut factor, state.grid(), step.dt);
        state = advance(&state, step.dt, &rhs0, f)?;
        state.time = step.time_after;
        if step.record {
            let next = rhs(&state.v, &state.w, &state.rho, config.tau)?;
            state.pressure = next.pressure.clone();
            cached = Some(next);
            let record = record_of(&state)?;
            debug!(
                "boussinesq tau={} t={:.4} E={:.6e} div={:.2e}",
                config.tau, record.time, record.energy, record.div_max
            );
            observer(&state, &record)?;
            records.push(record);
        }
    }
    Ok((records, state))
}

/// Runs to `t_end` and collects the records (and the recorded states if requested).
pub fn run_boussinesq(
    config: &BoussinesqConfig,
    v0: &[SpectralField; 2],
    rho0: &SpectralField,
) -> Result<Trajectory<BoussinesqState>> {
    let mut states = Vec::new();
    let (records, final_state) = run_boussinesq_with(config, v0, rho0, |s, _| {
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
