//! Energy budgets, the hydrostatic residual and the discrete cancellation identities.

use crate::error::{Error, Result};
use crate::fields::state::{BoussinesqState, PEState};
use crate::integrator::{advection, Record};
use crate::spectral::{Axis, Field, SpectralField};

/// `‖∂_z p + ρ‖₂` for a pressure sampled at `pressure_time`.
pub fn hydrostatic_residual(state: &BoussinesqState, pressure: &Field, pressure_time: f64) -> Result<f64> {
    if (pressure_time - state.time).abs() > 1e-12 * state.time.abs().max(1.0) {
        return Err(Error::TimeMismatch {
            left: state.time,
            right: pressure_time,
        });
    }
    if pressure.grid() != state.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(pressure
        .forward()
        .derivative(Axis::Z, 1)?
        .add(&state.rho)?
        .norm_l2())
}

/// Energy, dissipation, trapezoidal cumulative dissipation and the balance residual over records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub cum_dissipation: Vec<f64>,
    /// `E(t) − E(0) + ∫₀ᵗ D`
    pub residual: Vec<f64>,
}

impl EnergyLedger {
    pub fn final_residual(&self) -> f64 {
        *self.residual.last().unwrap_or(&0.0)
    }

    /// `|E(T) − E(0) + ∫₀ᵀ D| / E(0)`.
    pub fn relative_residual(&self) -> f64 {
        match self.energy.first() {
            Some(&e0) if e0 > 0.0 => self.final_residual().abs() / e0,
            _ => 0.0,
        }
    }

    /// Writes `time,E,D,cumD,residual`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["time", "E", "D", "cumD", "residual"])?;
        for i in 0..self.times.len() {
            w.write_record(
                [
                    self.times[i],
                    self.energy[i],
                    self.dissipation[i],
                    self.cum_dissipation[i],
                    self.residual[i],
                ]
                .iter()
                .map(|v| format!("{v:e}")),
            )?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds the ledger from recorded `E` and `D`; a single record gives a zero residual.
pub fn energy_balance(records: &[Record]) -> Result<EnergyLedger> {
    let first = records.first().ok_or(Error::EmptyTrajectory)?;
    let mut ledger = EnergyLedger::default();
    let mut cum = 0.0;
    let mut prev = first;
    for r in records {
        cum += 0.5 * (r.time - prev.time) * (r.dissipation + prev.dissipation);
        prev = r;
        ledger.times.push(r.time);
        ledger.energy.push(r.energy);
        ledger.dissipation.push(r.dissipation);
        ledger.cum_dissipation.push(cum);
        ledger.residual.push(r.energy - first.energy + cum);
    }
    Ok(ledger)
}

/// Normalized values of the integrals that vanish in the energy estimates.
///
/// `U` is the whole state, `(v, ρ)` for PE and `(v, τw, ρ)` for Boussinesq. Scaling by the
/// state rather than by the individual factors keeps roundoff-sized components from
/// producing meaningless ratios.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CancellationReport {
    /// `∫[(u·∇)v]·v` (plus `τ²∫[(u·∇)w]w` for Boussinesq) over `max|U|·‖∇U‖₂·‖U‖₂`.
    pub advection_velocity: f64,
    /// `∫(u·∇ρ)ρ` over `max|U|·‖∇U‖₂·‖U‖₂`.
    pub advection_density: f64,
    /// `∫∇_h p_γ·v` (PE) or `∫(∇_h p·v + ∂_z p w)` (Boussinesq) over `‖∇p‖₂·‖U‖₂`.
    pub pressure_work: f64,
    /// Sum of the buoyancy work in the w-equation and the stratification work in the ρ-equation.
    pub coupling: f64,
}

impl CancellationReport {
    pub fn max(&self) -> f64 {
        [
            self.advection_velocity,
            self.advection_density,
            self.pressure_work,
            self.coupling,
        ]
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num.abs() / den
    } else {
        0.0
    }
}

/// Largest pointwise magnitude over the velocity samples and `ρ`.
fn amplitude(velocity: &[Field], rho: &SpectralField) -> f64 {
    velocity
        .iter()
        .map(Field::max_abs)
        .fold(rho.inverse().max_abs(), f64::max)
}

fn grad_norm(fields: &[(&SpectralField, f64)]) -> f64 {
    fields.iter().map(|(f, w)| w * f.grad_norm_sq()).sum::<f64>().sqrt()
}

fn l2(fields: &[(&SpectralField, f64)]) -> f64 {
    fields.iter().map(|(f, w)| w * f.norm_l2_sq()).sum::<f64>().sqrt()
}

/// `∫ρw` evaluated once and entered with opposite signs in the two equations.
fn coupling_work(rho: &SpectralField, w: &SpectralField) -> Result<f64> {
    let c = rho.inner(w)?;
    let momentum = -c;
    let density = c;
    let total = momentum + density;
    assert_eq!(total, 0.0, "single-evaluation coupling identity");
    Ok(total)
}

pub fn cancellation_checks_pe(state: &PEState) -> Result<CancellationReport> {
    let v = &state.v;
    let adv = advection([&v[0], &v[1], &state.w], &[&v[0], &v[1], &state.rho])?;
    let amp = amplitude(&adv.velocity[..2], &state.rho);
    let a_v = adv.terms[0].inner(&v[0])? + adv.terms[1].inner(&v[1])?;
    let a_r = adv.terms[2].inner(&state.rho)?;
    let gx = state.p_gamma.derivative(Axis::X)?.extend_z();
    let gy = state.p_gamma.derivative(Axis::Y)?.extend_z();
    let work = gx.inner(&v[0])? + gy.inner(&v[1])?;
    let u = [(&v[0], 1.0), (&v[1], 1.0), (&state.rho, 1.0)];
    let cubic = amp * grad_norm(&u) * l2(&u);
    let grad_p = (gx.norm_l2_sq() + gy.norm_l2_sq()).sqrt();
    Ok(CancellationReport {
        advection_velocity: ratio(a_v, cubic),
        advection_density: ratio(a_r, cubic),
        pressure_work: ratio(work, grad_p * l2(&u)),
        coupling: coupling_work(&state.rho, &state.w)?,
    })
}

pub fn cancellation_checks_boussinesq(state: &BoussinesqState) -> Result<CancellationReport> {
    let (v, w, t2) = (&state.v, &state.w, state.tau * state.tau);
    let adv = advection([&v[0], &v[1], w], &[&v[0], &v[1], w, &state.rho])?;
    let tau_w = adv.velocity[2].scaled(state.tau);
    let amp = amplitude(&[adv.velocity[0].clone(), adv.velocity[1].clone(), tau_w], &state.rho);
    let a_v = adv.terms[0].inner(&v[0])? + adv.terms[1].inner(&v[1])? + t2 * adv.terms[2].inner(w)?;
    let a_r = adv.terms[3].inner(&state.rho)?;
    let p = &state.pressure;
    let (px, py, pz) = (
        p.derivative(Axis::X, 1)?,
        p.derivative(Axis::Y, 1)?,
        p.derivative(Axis::Z, 1)?,
    );
    let work = px.inner(&v[0])? + py.inner(&v[1])? + pz.inner(w)?;
    let u = [(&v[0], 1.0), (&v[1], 1.0), (w, t2), (&state.rho, 1.0)];
    let cubic = amp * grad_norm(&u) * l2(&u);
    let grad_p = (px.norm_l2_sq() + py.norm_l2_sq() + pz.norm_l2_sq() / t2).sqrt();
    Ok(CancellationReport {
        advection_velocity: ratio(a_v, cubic),
        advection_density: ratio(a_r, cubic),
        pressure_work: ratio(work, grad_p * l2(&u)),
        coupling: coupling_work(&state.rho, w)?,
    })
}
