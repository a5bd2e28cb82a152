//! Pieces shared by both steppers: step schedules, integrating factors,
//! pseudo-spectral advection, per-record diagnostics and trajectories.

use crate::error::{Error, Result};
use crate::spectral::{forward_many, inverse_many, Axis, Field, Grid, SpectralField};

/// When to record diagnostics during a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RecordSchedule {
    /// Every `n` steps of size `dt` (and at the final time); the last step is clipped to land on `t_end`.
    EverySteps(usize),
    /// At exact multiples of an interval; each interval is split into equal substeps no larger than `dt`.
    Interval(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct PlannedStep {
    pub dt: f64,
    pub time_after: f64,
    pub record: bool,
}

pub(crate) fn plan_steps(dt: f64, t_end: f64, schedule: RecordSchedule) -> Result<Vec<PlannedStep>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("t_end = {t_end} must be nonnegative")));
    }
    let mut steps = Vec::new();
    match schedule {
        RecordSchedule::EverySteps(every) => {
            if every == 0 {
                return Err(Error::InvalidParameter("record_every must be at least 1".into()));
            }
            let n = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
            for i in 1..=n {
                let time_after = if i == n { t_end } else { i as f64 * dt };
                let start = (i - 1) as f64 * dt;
                steps.push(PlannedStep {
                    dt: time_after - start,
                    time_after,
                    record: i % every == 0 || i == n,
                });
            }
        }
        RecordSchedule::Interval(interval) => {
            if !(interval > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "record interval {interval} must be positive"
                )));
            }
            let records = (t_end / interval).round() as usize;
            if ((records as f64) * interval - t_end).abs() > 1e-9 * t_end.max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "t_end = {t_end} is not a multiple of the record interval {interval}"
                )));
            }
            let sub = (interval / dt - 1e-9).ceil().max(1.0) as usize;
            let h = interval / sub as f64;
            for k in 0..records {
                let t0 = k as f64 * interval;
                for j in 1..=sub {
                    let time_after = if j == sub {
                        (k + 1) as f64 * interval
                    } else {
                        t0 + j as f64 * h
                    };
                    steps.push(PlannedStep {
                        dt: h,
                        time_after,
                        record: j == sub,
                    });
                }
            }
        }
    }
    Ok(steps)
}

/// `e^{-|k|² h}` and `e^{-|k|² h/2}` for the current step size.
pub(crate) struct IntegratingFactor {
    dt: f64,
    pub full: Vec<f64>,
    pub half: Vec<f64>,
}

impl IntegratingFactor {
    pub fn new(grid: &Grid, dt: f64) -> Self {
        let k2 = grid.k2();
        Self {
            dt,
            full: k2.iter().map(|k| (-k * dt).exp()).collect(),
            half: k2.iter().map(|k| (-0.5 * k * dt).exp()).collect(),
        }
    }

    pub fn for_step<'a>(slot: &'a mut Option<IntegratingFactor>, grid: &Grid, dt: f64) -> &'a Self {
        if slot.as_ref().map(|f| f.dt) != Some(dt) {
            *slot = Some(IntegratingFactor::new(grid, dt));
        }
        slot.as_ref().expect("just filled")
    }
}

/// `E_half ⊙ (u + h/2 · n)`
pub(crate) fn half_stage(
    u: &SpectralField,
    n: &SpectralField,
    dt: f64,
    factor: &IntegratingFactor,
) -> Result<SpectralField> {
    let mut out = u.clone();
    out.axpy(0.5 * dt, n)?;
    out.apply_multiplier(&factor.half);
    Ok(out.with_parity(u.parity()))
}

/// `E_full ⊙ u + h · E_half ⊙ n`
pub(crate) fn full_stage(
    u: &SpectralField,
    n: &SpectralField,
    dt: f64,
    factor: &IntegratingFactor,
) -> Result<SpectralField> {
    let mut out = u.clone();
    out.apply_multiplier(&factor.full);
    let mut inc = n.clone();
    inc.apply_multiplier(&factor.half);
    out.axpy(dt, &inc)?;
    Ok(out.with_parity(u.parity()))
}

/// Physical velocity and the dealiased advection `u·∇f` of each target.
pub(crate) struct Advection {
    pub velocity: Vec<Field>,
    pub terms: Vec<SpectralField>,
}

impl Advection {
    pub fn max_speeds(&self) -> [f64; 3] {
        [
            self.velocity[0].max_abs(),
            self.velocity[1].max_abs(),
            self.velocity[2].max_abs(),
        ]
    }
}

/// Pseudo-spectral `(u·∇) f` for each target, with 2/3-rule truncation of the products.
pub(crate) fn advection(velocity: [&SpectralField; 3], targets: &[&SpectralField]) -> Result<Advection> {
    let mut derivs = Vec::with_capacity(3 * targets.len());
    for t in targets {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            derivs.push(t.derivative(axis, 1)?);
        }
    }
    let mut batch: Vec<&SpectralField> = velocity.to_vec();
    batch.extend(derivs.iter());
    let mut phys = inverse_many(&batch)?;
    let grads = phys.split_off(3);
    let velocity = phys;
    let (u, v, w) = (velocity[0].values(), velocity[1].values(), velocity[2].values());
    let mut products = Vec::with_capacity(targets.len());
    for (t, g) in targets.iter().zip(grads.chunks_exact(3)) {
        let (fx, fy, fz) = (g[0].values(), g[1].values(), g[2].values());
        let values = (0..u.len())
            .map(|i| u[i] * fx[i] + v[i] * fy[i] + w[i] * fz[i])
            .collect();
        products.push(Field::new(t.grid(), values, t.parity())?);
    }
    let refs: Vec<&Field> = products.iter().collect();
    let mut terms = forward_many(&refs)?;
    for (term, t) in terms.iter_mut().zip(targets) {
        term.dealias_in_place();
        // the paired transform mixes round-off across the pair; restore the declared symmetry
        term.parity_project_in_place(t.parity());
    }
    Ok(Advection { velocity, terms })
}

/// Largest stable step for the given peak speeds: `min(dx/|u|, dy/|v|, dz/|w|)`.
pub(crate) fn advective_limit(grid: &Grid, speeds: [f64; 3]) -> f64 {
    let spacing = [grid.dx(), grid.dy(), grid.dz()];
    spacing
        .iter()
        .zip(speeds)
        .map(|(h, s)| if s > 0.0 { h / s } else { f64::INFINITY })
        .fold(f64::INFINITY, f64::min)
}

/// Diagnostics captured at one recorded time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Record {
    pub time: f64,
    pub energy: f64,
    pub dissipation: f64,
    /// Boussinesq: `max |∇_h·v + ∂_z w|`; PE: the same with the diagnosed w.
    pub div_max: f64,
    pub parity_defect: f64,
    /// Largest `|∫_Ω v|/|Ω|` or `|∫_Ω ρ|/|Ω|`.
    pub mean_defect: f64,
    /// `‖∂_z p + ρ‖₂`; identically zero for the primitive equations.
    pub hydrostatic_residual: f64,
    /// `max |∫ ∇_h·v dz|` (PE only; zero for Boussinesq runs).
    pub barotropic_defect: f64,
}

/// Recorded diagnostics, optionally the recorded states, and the final state.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub records: Vec<Record>,
    pub states: Vec<S>,
    pub final_state: S,
}

impl<S> Trajectory<S> {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.time).collect()
    }
}

/// Columns of the per-record CSV written by both solvers.
pub const RECORD_CSV_HEADER: [&str; 6] = [
    "time",
    "E",
    "D",
    "div_max",
    "parity_defect",
    "hydrostatic_residual",
];

/// Writes `time,E,D,div_max,parity_defect,hydrostatic_residual`.
pub fn write_records_csv<W: std::io::Write>(out: W, records: &[Record]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_CSV_HEADER)?;
    for r in records {
        w.write_record(
            [
                r.time,
                r.energy,
                r.dissipation,
                r.div_max,
                r.parity_defect,
                r.hydrostatic_residual,
            ]
            .iter()
            .map(|v| format!("{v:e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_steps_clips_last_step() {
        let steps = plan_steps(0.1, 0.25, RecordSchedule::EverySteps(2)).unwrap();
        assert_eq!(steps.len(), 3);
        assert!((steps[2].dt - 0.05).abs() < 1e-15);
        assert_eq!(steps[2].time_after, 0.25);
        assert_eq!(
            steps.iter().map(|s| s.record).collect::<Vec<_>>(),
            vec![false, true, true]
        );
    }

    #[test]
    fn interval_records_land_on_multiples() {
        let steps = plan_steps(0.003, 0.02, RecordSchedule::Interval(0.005)).unwrap();
        let recs: Vec<f64> = steps.iter().filter(|s| s.record).map(|s| s.time_after).collect();
        assert_eq!(recs, vec![0.005, 0.01, 0.015, 0.02]);
        assert!(steps.iter().all(|s| (s.dt - 0.0025).abs() < 1e-15));
        assert!(plan_steps(0.001, 0.021, RecordSchedule::Interval(0.005)).is_err());
    }

    #[test]
    fn zero_duration_has_no_steps() {
        assert!(plan_steps(0.1, 0.0, RecordSchedule::EverySteps(1)).unwrap().is_empty());
        assert!(plan_steps(0.0, 1.0, RecordSchedule::EverySteps(1)).is_err());
    }
}
