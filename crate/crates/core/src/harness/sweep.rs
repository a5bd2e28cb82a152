//! The aspect-ratio sweep: one PE reference run, one Boussinesq run per τ, and rate fits.

use std::fs;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;

use crate::boussinesq::{run_boussinesq_with, BoussinesqConfig, BUOYANCY_DT_FACTOR};
use crate::diagnostics::{energy_balance, EnergyLedger};
use crate::error::{Error, Result};
use crate::fields::norms::{difference_norms, DifferenceNorms};
use crate::fields::state::PEState;
use crate::harness::fit::{fit_rate, RateFit};
use crate::harness::initial::{generate_initial_data, Spectrum};
use crate::harness::plot::{Chart, Series};
use crate::integrator::{write_records_csv, Record};
use crate::pe::{run_pe, PeConfig};
use crate::spectral::{Grid, SpectralField};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    /// Strictly decreasing aspect ratios.
    pub taus: Vec<f64>,
    /// Grid points per axis.
    pub n: usize,
    pub t_end: f64,
    /// Largest step for both solvers; Boussinesq runs also respect the buoyancy cap.
    pub dt: f64,
    /// Spacing of the shared record times (`t_end / 50` when unset).
    pub record_interval: Option<f64>,
    pub cfl_safety: f64,
    pub seed: u64,
    pub spectrum: Spectrum,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            taus: vec![0.2, 0.1, 0.05, 0.025],
            n: 32,
            t_end: 0.25,
            dt: 1e-3,
            record_interval: None,
            cfl_safety: 0.5,
            seed: 7,
            spectrum: Spectrum::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() {
            return Err(Error::InvalidParameter("empty tau list".into()));
        }
        if self.taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidParameter("every tau must be positive".into()));
        }
        if self.taus.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("tau list must be strictly decreasing".into()));
        }
        if !(self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!("T = {} must be positive", self.t_end)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        Ok(())
    }

    pub fn interval(&self) -> f64 {
        self.record_interval.unwrap_or(self.t_end / 50.0)
    }

    /// Step actually taken for a given τ: the largest `interval / k` below both caps.
    pub fn step_for(&self, tau: Option<f64>) -> f64 {
        let cap = match tau {
            Some(t) => self.dt.min(self.cfl_safety * BUOYANCY_DT_FACTOR * t),
            None => self.dt,
        };
        let interval = self.interval();
        interval / (interval / cap - 1e-9).ceil().max(1.0)
    }
}

/// Outcome of the Boussinesq run at one τ.
#[derive(Clone, Debug)]
pub struct TauEntry {
    pub tau: f64,
    pub dt: f64,
    pub completed: bool,
    pub failure: Option<String>,
    pub norms: DifferenceNorms,
    pub records: Vec<Record>,
    pub ledger: EnergyLedger,
}

impl TauEntry {
    pub fn l2_sup(&self) -> f64 {
        self.norms.l2_sup()
    }

    /// `(∫₀ᵀ ‖∇(V, τW, Γ)‖₂² dt)^{1/2}`.
    pub fn l2_dissipation(&self) -> f64 {
        self.norms.grad_l2_integral().sqrt()
    }

    pub fn h1_sup(&self) -> f64 {
        self.norms.h1_sup()
    }

    pub fn h1_dissipation(&self) -> f64 {
        self.norms.grad_h1_integral().sqrt()
    }

    /// Time average of `‖∂_z p_τ + ρ_τ‖₂` over the records (trapezoidal).
    pub fn hydrostatic_mean(&self) -> f64 {
        let r = &self.records;
        if r.len() < 2 {
            return r.first().map_or(0.0, |x| x.hydrostatic_residual);
        }
        let span = r[r.len() - 1].time - r[0].time;
        let area: f64 = r
            .windows(2)
            .map(|w| 0.5 * (w[1].time - w[0].time) * (w[0].hydrostatic_residual + w[1].hydrostatic_residual))
            .sum();
        area / span
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slopes {
    pub l2_sup: RateFit,
    pub l2_dissipation: RateFit,
    pub h1_sup: RateFit,
    pub h1_dissipation: RateFit,
    pub hydrostatic: RateFit,
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub config: SweepConfig,
    pub pe_dt: f64,
    pub pe_records: Vec<Record>,
    pub pe_ledger: EnergyLedger,
    pub entries: Vec<TauEntry>,
    /// Present when at least three τ values completed.
    pub slopes: Option<Slopes>,
}

impl ConvergenceReport {
    pub fn completed(&self) -> impl Iterator<Item = &TauEntry> {
        self.entries.iter().filter(|e| e.completed)
    }

    /// Largest τ whose run reached `T`.
    pub fn largest_completed_tau(&self) -> Option<f64> {
        self.completed().map(|e| e.tau).fold(None, |m, t| Some(m.map_or(t, |m: f64| m.max(t))))
    }

    /// Writes `tau,l2_sup,l2_dissip_int,h1_sup,h1_dissip_int,completed`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["tau", "l2_sup", "l2_dissip_int", "h1_sup", "h1_dissip_int", "completed"])?;
        for e in &self.entries {
            w.write_record([
                format!("{}", e.tau),
                format!("{:e}", e.l2_sup()),
                format!("{:e}", e.l2_dissipation()),
                format!("{:e}", e.h1_sup()),
                format!("{:e}", e.h1_dissipation()),
                e.completed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Log-log plot of the four aggregates against τ with their fitted lines.
    pub fn chart(&self) -> Chart {
        let pick = |f: fn(&TauEntry) -> f64| -> Vec<(f64, f64)> {
            self.completed().map(|e| (e.tau, f(e))).collect()
        };
        let slopes = self.slopes;
        let series = vec![
            Series::new("L2 sup", pick(TauEntry::l2_sup)).with_fit(slopes.map(|s| s.l2_sup)),
            Series::new("L2 dissipation", pick(TauEntry::l2_dissipation)).with_fit(slopes.map(|s| s.l2_dissipation)),
            Series::new("H1 sup", pick(TauEntry::h1_sup)).with_fit(slopes.map(|s| s.h1_sup)),
            Series::new("H1 dissipation", pick(TauEntry::h1_dissipation)).with_fit(slopes.map(|s| s.h1_dissipation)),
            Series::new("hydrostatic residual", pick(TauEntry::hydrostatic_mean)).with_fit(slopes.map(|s| s.hydrostatic)),
        ];
        Chart {
            title: format!("Boussinesq vs primitive equations, N = {}, T = {}", self.config.n, self.config.t_end),
            x_label: "tau".into(),
            y_label: "difference".into(),
            log_x: true,
            log_y: true,
            series,
        }
    }

    /// `report.csv`, `report.svg`, `hydrostatic.csv`, and per-run ledgers and records.
    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.write_csv(fs::File::create(dir.join("report.csv"))?)?;
        fs::write(dir.join("report.svg"), self.chart().to_svg())?;
        let mut w = csv::Writer::from_path(dir.join("hydrostatic.csv"))?;
        w.write_record(["tau", "hydrostatic_mean", "completed"])?;
        for e in &self.entries {
            w.write_record([e.tau.to_string(), format!("{:e}", e.hydrostatic_mean()), e.completed.to_string()])?;
        }
        w.flush()?;
        self.pe_ledger.write_csv(fs::File::create(dir.join("ledger_pe.csv"))?)?;
        write_records_csv(fs::File::create(dir.join("records_pe.csv"))?, &self.pe_records)?;
        for e in &self.entries {
            e.ledger.write_csv(fs::File::create(dir.join(format!("ledger_tau_{}.csv", e.tau)))?)?;
            write_records_csv(fs::File::create(dir.join(format!("records_tau_{}.csv", e.tau)))?, &e.records)?;
        }
        Ok(())
    }
}

fn run_entry(
    config: &SweepConfig,
    tau: f64,
    v0: &[SpectralField; 2],
    rho0: &SpectralField,
    pe_states: &[PEState],
) -> Result<TauEntry> {
    let dt = config.step_for(Some(tau));
    let bconfig = BoussinesqConfig {
        cfl_safety: config.cfl_safety,
        ..BoussinesqConfig::new(tau, dt, config.t_end).record_interval(config.interval())
    };
    let mut norms = DifferenceNorms::default();
    let mut records = Vec::new();
    let outcome = run_boussinesq_with(&bconfig, v0, rho0, |state, record| {
        let reference = pe_states.get(records.len()).ok_or(Error::EmptyTrajectory)?;
        norms.push(difference_norms(state, reference)?);
        records.push(*record);
        Ok(())
    });
    let failure = match outcome {
        Ok(_) => None,
        Err(e) if e.is_numerical() => {
            warn!("tau = {tau}: run stopped early: {e}");
            Some(e.to_string())
        }
        Err(e) => return Err(e),
    };
    info!("tau = {tau} done, L2 sup = {:.4e}", norms.l2_sup());
    let ledger = if records.is_empty() { EnergyLedger::default() } else { energy_balance(&records)? };
    Ok(TauEntry {
        tau,
        dt,
        completed: failure.is_none(),
        failure,
        norms,
        records,
        ledger,
    })
}

fn fit_slopes(entries: &[TauEntry]) -> Result<Option<Slopes>> {
    let done: Vec<&TauEntry> = entries.iter().filter(|e| e.completed).collect();
    if done.len() < 3 {
        return Ok(None);
    }
    let fit = |f: fn(&TauEntry) -> f64| fit_rate(&done.iter().map(|e| (e.tau, f(e))).collect::<Vec<_>>());
    Ok(Some(Slopes {
        l2_sup: fit(TauEntry::l2_sup)?,
        l2_dissipation: fit(TauEntry::l2_dissipation)?,
        h1_sup: fit(TauEntry::h1_sup)?,
        h1_dissipation: fit(TauEntry::h1_dissipation)?,
        hydrostatic: fit(TauEntry::hydrostatic_mean)?,
    }))
}

/// Runs the PE reference and every Boussinesq run from identical initial data.
///
/// Boussinesq runs that stop on a CFL or non-finite failure are kept as incomplete
/// entries; slopes are fitted only when at least three τ values complete.
pub fn run_tau_sweep(config: &SweepConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let grid = Grid::cubic(config.n)?;
    let (v0, rho0) = generate_initial_data(config.seed, &config.spectrum, &grid)?;
    let pe_dt = config.step_for(None);
    let pe_config = PeConfig {
        cfl_safety: config.cfl_safety,
        ..PeConfig::new(pe_dt, config.t_end)
            .record_interval(config.interval())
            .keep_states(true)
    };
    let pe = run_pe(&pe_config, &v0, &rho0)?;
    info!("PE reference done: {} records", pe.records.len());
    let entries = config
        .taus
        .par_iter()
        .map(|&tau| run_entry(config, tau, &v0, &rho0, &pe.states))
        .collect::<Result<Vec<_>>>()?;
    let slopes = fit_slopes(&entries)?;
    Ok(ConvergenceReport {
        config: config.clone(),
        pe_dt,
        pe_ledger: energy_balance(&pe.records)?,
        pe_records: pe.records,
        entries,
        slopes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::norms::DifferenceSample;

    fn small() -> SweepConfig {
        SweepConfig {
            taus: vec![0.4, 0.2, 0.1],
            n: 8,
            t_end: 0.05,
            dt: 0.005,
            spectrum: Spectrum {
                cutoff: 2,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn validation() {
        assert!(small().validate().is_ok());
        let mut c = small();
        c.taus = vec![0.1, 0.2];
        assert!(c.validate().is_err());
        c.taus = vec![0.1, -0.2];
        assert!(c.validate().is_err());
        let mut c = small();
        c.t_end = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn step_policy() {
        let c = small();
        assert!((c.interval() - 0.001).abs() < 1e-15);
        assert!((c.step_for(None) - 0.001).abs() < 1e-15);
        let c = SweepConfig::default();
        // cap 0.5 · 0.5 · 0.025 = 0.00625 > dt; the 0.005 interval splits into 5 steps
        assert!((c.step_for(Some(0.025)) - 0.001).abs() < 1e-15);
        let c = SweepConfig { taus: vec![0.002], ..Default::default() };
        assert!((c.step_for(Some(0.002)) - 0.0005).abs() < 1e-15);
    }

    #[test]
    fn small_sweep_matches_at_t0_and_fits() {
        let report = run_tau_sweep(&small()).unwrap();
        assert_eq!(report.entries.len(), 3);
        for e in &report.entries {
            assert!(e.completed);
            assert_eq!(e.norms.series.len(), 51);
            // both systems start from the same (v₀, w₀, ρ₀)
            assert_eq!(e.norms.series[0].l2, 0.0);
        }
        assert!(report.slopes.is_some());
        assert_eq!(report.largest_completed_tau(), Some(0.4));
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("tau,l2_sup,l2_dissip_int,h1_sup,h1_dissip_int,completed\n"));
    }

    #[test]
    fn one_tau_has_norms_but_no_slope() {
        let c = SweepConfig { taus: vec![0.2], ..small() };
        let report = run_tau_sweep(&c).unwrap();
        assert!(report.slopes.is_none());
        assert!(report.entries[0].l2_sup() > 0.0);
    }

    #[test]
    fn synthetic_entries_fit_exactly() {
        let entries: Vec<TauEntry> = [0.2, 0.1, 0.05, 0.025]
            .iter()
            .map(|&tau| {
                let e = 0.3 * tau;
                let mut norms = DifferenceNorms::default();
                for (time, v) in [(0.0, 0.0), (1.0, e)] {
                    norms.push(DifferenceSample { time, l2: v, grad_l2: v, h1: v, grad_h1: v });
                }
                let records = vec![
                    Record { time: 0.0, hydrostatic_residual: tau * tau, ..Default::default() },
                    Record { time: 1.0, hydrostatic_residual: tau * tau, ..Default::default() },
                ];
                TauEntry { tau, dt: 0.1, completed: true, failure: None, norms, records, ledger: EnergyLedger::default() }
            })
            .collect();
        let s = fit_slopes(&entries).unwrap().unwrap();
        assert!((s.l2_sup.slope - 1.0).abs() < 1e-12);
        assert!((s.hydrostatic.slope - 2.0).abs() < 1e-12);
        // trapezoid of (0, e²) over unit time is e²/2
        assert!((s.l2_dissipation.slope - 1.0).abs() < 1e-12);
    }
}
