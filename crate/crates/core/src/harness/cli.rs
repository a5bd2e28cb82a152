//! Command-line front end. Exit codes: 0 success, 1 invalid input, 2 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::boussinesq::{run_boussinesq, BoussinesqConfig};
use crate::diagnostics::{energy_balance, EnergyLedger};
use crate::error::{Error, Result};
use crate::fields::snapshot;
use crate::harness::config::Settings;
use crate::harness::fit::fit_rate;
use crate::harness::initial::generate_initial_data;
use crate::harness::plot::{Chart, Series};
use crate::harness::sweep::{run_tau_sweep, SweepConfig};
use crate::integrator::{write_records_csv, Record, RecordSchedule};
use crate::pe::{run_pe, PeConfig};
use crate::spectral::{Field, Grid, SpectralField};

/// Largest relative energy residual accepted by `energy-check` at the base step.
pub const ENERGY_RESIDUAL_TOL: f64 = 1e-4;
/// Smallest residual reduction accepted by `energy-check` when the step is halved.
pub const ENERGY_HALVING_RATIO: f64 = 3.0;

#[derive(Parser, Debug)]
#[command(name = "strata", version, about = "Boussinesq / primitive-equation solvers and the aspect-ratio sweep")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate admissible initial data and write v1/v2/rho snapshots.
    GenIc(IcArgs),
    /// Run the scaled Boussinesq solver.
    RunBoussinesq(RunArgs),
    /// Run the primitive-equation solver.
    RunPe(RunArgs),
    /// Run the aspect-ratio sweep and write report.csv, report.svg and ledgers.
    Sweep(SweepArgs),
    /// Check the energy balance at dt and dt/2.
    EnergyCheck(EnergyArgs),
    /// Render a report, ledger or record CSV to SVG.
    Plot(PlotArgs),
    /// Fit a log-log rate to two CSV columns.
    Fit(FitArgs),
}

#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Args, Debug)]
struct IcArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    ic: IcArgs,
    /// Directory with v1.snap, v2.snap and rho.snap (generated from the seed otherwise).
    #[arg(long)]
    ic_dir: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Spacing of record times; every step when unset.
    #[arg(long)]
    record_every: Option<f64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum System {
    Boussinesq,
    Pe,
}

#[derive(Args, Debug)]
struct EnergyArgs {
    #[arg(long, value_enum, default_value = "boussinesq")]
    system: System,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// Abscissa column (default: first).
    #[arg(long)]
    x: Option<String>,
    /// Ordinate column (default: second).
    #[arg(long)]
    y: Option<String>,
}

fn settings(cfg: &ConfigArgs) -> Result<Settings> {
    let mut s = match &cfg.config {
        Some(path) => Settings::parse(&fs::read_to_string(path)?)?,
        None => Settings::default(),
    };
    for o in &cfg.overrides {
        s.set(o)?;
    }
    Ok(s)
}

fn apply<T: ToString>(s: &mut Settings, key: &str, v: &Option<T>) -> Result<()> {
    if let Some(v) = v {
        s.set(&format!("{key}={}", v.to_string()))?;
    }
    Ok(())
}

fn ic_settings(a: &IcArgs) -> Result<Settings> {
    let mut s = settings(&a.cfg)?;
    apply(&mut s, "ic.seed", &a.seed)?;
    apply(&mut s, "grid.n", &a.n)?;
    apply(&mut s, "ic.decay", &a.decay)?;
    apply(&mut s, "ic.cutoff", &a.cutoff)?;
    apply(&mut s, "ic.amplitude", &a.amplitude)?;
    apply(&mut s, "out.dir", &a.out.as_ref().map(|p| p.display().to_string()))?;
    Ok(s)
}

fn run_settings(a: &RunArgs) -> Result<Settings> {
    let mut s = ic_settings(&a.ic)?;
    apply(&mut s, "solver.tau", &a.tau)?;
    apply(&mut s, "time.dt", &a.dt)?;
    apply(&mut s, "time.T", &a.t_end)?;
    apply(&mut s, "time.record_every", &a.record_every)?;
    Ok(s)
}

fn initial_data(s: &Settings, ic_dir: Option<&Path>) -> Result<([SpectralField; 2], SpectralField)> {
    if let Some(dir) = ic_dir {
        let load = |name: &str| -> Result<Field> { Ok(snapshot::load(dir.join(name))?.field) };
        let (v1, v2, rho) = (load("v1.snap")?, load("v2.snap")?, load("rho.snap")?);
        if v1.grid() != v2.grid() || v1.grid() != rho.grid() {
            return Err(Error::GridMismatch);
        }
        return Ok(([v1.forward(), v2.forward()], rho.forward()));
    }
    let c = s.sweep_config()?;
    let grid = Grid::cubic(c.n)?;
    generate_initial_data(c.seed, &c.spectrum, &grid)
}

fn out_dir(s: &Settings) -> Result<PathBuf> {
    let dir = s.out_dir()?.ok_or_else(|| Error::InvalidParameter("no output directory (--out or out.dir)".into()))?;
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn gen_ic(a: &IcArgs) -> Result<()> {
    let s = ic_settings(a)?;
    let (v, rho) = initial_data(&s, None)?;
    let dir = out_dir(&s)?;
    let tau = s.get("solver.tau")?.unwrap_or(1.0);
    for (name, f) in [("v1.snap", &v[0]), ("v2.snap", &v[1]), ("rho.snap", &rho)] {
        snapshot::save(dir.join(name), &f.inverse(), 0.0, tau)?;
    }
    println!("wrote initial data to {}", dir.display());
    Ok(())
}

#[derive(Clone, Copy)]
struct RunParams {
    dt: f64,
    t_end: f64,
    schedule: RecordSchedule,
    cfl: f64,
}

fn run_params(s: &Settings) -> Result<RunParams> {
    let d = SweepConfig::default();
    Ok(RunParams {
        dt: s.get("time.dt")?.unwrap_or(d.dt),
        t_end: s.get("time.T")?.unwrap_or(d.t_end),
        schedule: match s.get::<f64>("time.record_every")? {
            Some(i) => RecordSchedule::Interval(i),
            None => RecordSchedule::EverySteps(1),
        },
        cfl: s.get("time.cfl")?.unwrap_or(d.cfl_safety),
    })
}

fn write_run(dir: &Path, records: &[Record], fields: Vec<Field>, time: f64, tau: f64) -> Result<EnergyLedger> {
    write_records_csv(fs::File::create(dir.join("records.csv"))?, records)?;
    let ledger = energy_balance(records)?;
    ledger.write_csv(fs::File::create(dir.join("energy_ledger.csv"))?)?;
    for (name, f) in ["v1", "v2", "w", "rho", "p"].iter().zip(&fields) {
        snapshot::save(dir.join(format!("{name}.snap")), f, time, tau)?;
    }
    Ok(ledger)
}

fn boussinesq_config(s: &Settings, p: &RunParams) -> Result<BoussinesqConfig> {
    let tau = s.get("solver.tau")?.unwrap_or(0.1);
    Ok(BoussinesqConfig {
        schedule: p.schedule,
        cfl_safety: p.cfl,
        ..BoussinesqConfig::new(tau, p.dt, p.t_end)
    })
}

fn pe_config(p: &RunParams) -> PeConfig {
    PeConfig {
        schedule: p.schedule,
        cfl_safety: p.cfl,
        ..PeConfig::new(p.dt, p.t_end)
    }
}

fn run_single(a: &RunArgs, system: System) -> Result<()> {
    let s = run_settings(a)?;
    let (v, rho) = initial_data(&s, a.ic_dir.as_deref())?;
    let p = run_params(&s)?;
    let dir = out_dir(&s)?;
    let ledger = match system {
        System::Boussinesq => {
            let c = boussinesq_config(&s, &p)?;
            let t = run_boussinesq(&c, &v, &rho)?;
            write_run(&dir, &t.records, t.final_state.to_fields()?, t.final_state.time, c.tau)?
        }
        System::Pe => {
            let t = run_pe(&pe_config(&p), &v, &rho)?;
            write_run(&dir, &t.records, t.final_state.to_fields()?, t.final_state.time, 0.0)?
        }
    };
    println!(
        "t = {}: E = {:.6e}, relative energy residual {:.3e}; output in {}",
        ledger.times.last().copied().unwrap_or(0.0),
        ledger.energy.last().copied().unwrap_or(0.0),
        ledger.relative_residual(),
        dir.display()
    );
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<()> {
    let mut s = settings(&a.cfg)?;
    apply(&mut s, "out.dir", &a.out.as_ref().map(|p| p.display().to_string()))?;
    let config = s.sweep_config()?;
    let dir = out_dir(&s)?;
    let report = run_tau_sweep(&config)?;
    report.write_outputs(&dir)?;
    for e in &report.entries {
        println!(
            "tau {:<8} l2_sup {:.4e}  l2_dissip {:.4e}  h1_sup {:.4e}  h1_dissip {:.4e}  hydrostatic {:.4e}  {}",
            e.tau,
            e.l2_sup(),
            e.l2_dissipation(),
            e.h1_sup(),
            e.h1_dissipation(),
            e.hydrostatic_mean(),
            if e.completed { "completed" } else { "incomplete" }
        );
    }
    match report.slopes {
        Some(sl) => println!(
            "slopes: l2_sup {:.3}  l2_dissip {:.3}  h1_sup {:.3}  h1_dissip {:.3}  hydrostatic {:.3}",
            sl.l2_sup.slope, sl.l2_dissipation.slope, sl.h1_sup.slope, sl.h1_dissipation.slope, sl.hydrostatic.slope
        ),
        None => println!("fewer than 3 completed tau values; no slopes fitted"),
    }
    if let Some(t) = report.largest_completed_tau() {
        println!("largest completed tau: {t}");
    }
    Ok(())
}

fn energy_check(a: &EnergyArgs) -> Result<()> {
    let s = run_settings(&a.run)?;
    let (v, rho) = initial_data(&s, a.run.ic_dir.as_deref())?;
    let p = run_params(&s)?;
    let mut residuals = Vec::new();
    for (k, dt) in [p.dt, 0.5 * p.dt].into_iter().enumerate() {
        let params = RunParams { dt, ..p };
        let records = match a.system {
            System::Boussinesq => run_boussinesq(&boussinesq_config(&s, &params)?, &v, &rho)?.records,
            System::Pe => run_pe(&pe_config(&params), &v, &rho)?.records,
        };
        let ledger = energy_balance(&records)?;
        if let Some(dir) = s.out_dir()? {
            fs::create_dir_all(&dir)?;
            ledger.write_csv(fs::File::create(dir.join(format!("energy_ledger_{k}.csv")))?)?;
        }
        println!("dt = {dt:e}: relative residual {:.3e}", ledger.relative_residual());
        residuals.push(ledger.relative_residual());
    }
    let ratio = residuals[0] / residuals[1];
    println!("reduction on halving dt: {ratio:.2}");
    if residuals[0] > ENERGY_RESIDUAL_TOL {
        return Err(Error::Constraint {
            what: "relative energy residual",
            value: residuals[0],
            tolerance: ENERGY_RESIDUAL_TOL,
        });
    }
    if !(ratio >= ENERGY_HALVING_RATIO) {
        return Err(Error::Constraint {
            what: "energy residual reduction on halving dt",
            value: ratio,
            tolerance: ENERGY_HALVING_RATIO,
        });
    }
    Ok(())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|x| x.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok(Table { header, rows })
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no column `{name}`")))
    }

    fn numbers(&self, col: usize, keep: impl Fn(&[String]) -> bool) -> Result<Vec<f64>> {
        self.rows
            .iter()
            .filter(|r| keep(r))
            .map(|r| {
                r[col]
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("non-numeric value `{}`", r[col])))
            })
            .collect()
    }
}

/// Chart for a report CSV (log-log against τ, with fits) or any time-series CSV.
fn chart_for(path: &Path) -> Result<Chart> {
    let t = read_table(path)?;
    if t.header.len() < 2 {
        return Err(Error::InvalidParameter("need at least two columns".into()));
    }
    let by_tau = t.header[0] == "tau";
    let completed = t.header.iter().position(|h| h == "completed");
    let keep = |r: &[String]| completed.is_none_or(|c| r[c] == "true");
    let xs = t.numbers(0, keep)?;
    let mut series = Vec::new();
    for (col, name) in t.header.iter().enumerate().skip(1) {
        if Some(col) == completed {
            continue;
        }
        let ys = t.numbers(col, keep)?;
        let points: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().map(|y| y.abs())).collect();
        let fit = if by_tau { fit_rate(&points).ok() } else { None };
        series.push(Series::new(name.clone(), points).with_fit(fit));
    }
    Ok(Chart {
        title: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        x_label: t.header[0].clone(),
        y_label: if by_tau { "difference".into() } else { "|value|".into() },
        log_x: by_tau,
        log_y: true,
        series,
    })
}

fn plot(a: &PlotArgs) -> Result<()> {
    fs::write(&a.output, chart_for(&a.input)?.to_svg())?;
    println!("wrote {}", a.output.display());
    Ok(())
}

fn fit(a: &FitArgs) -> Result<()> {
    let t = read_table(&a.input)?;
    let xc = match &a.x {
        Some(n) => t.column(n)?,
        None => 0,
    };
    let yc = match &a.y {
        Some(n) => t.column(n)?,
        None => 1,
    };
    if t.header.len() <= xc.max(yc) {
        return Err(Error::InvalidParameter("need at least two columns".into()));
    }
    let points: Vec<(f64, f64)> = t.numbers(xc, |_| true)?.into_iter().zip(t.numbers(yc, |_| true)?).collect();
    let f = fit_rate(&points)?;
    println!(
        "slope {:.3} intercept {:.6} max_residual {:.3e}",
        f.slope, f.intercept, f.max_residual
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenIc(a) => gen_ic(&a),
        Command::RunBoussinesq(a) => run_single(&a, System::Boussinesq),
        Command::RunPe(a) => run_single(&a, System::Pe),
        Command::Sweep(a) => sweep(&a),
        Command::EnergyCheck(a) => energy_check(&a),
        Command::Plot(a) => plot(&a),
        Command::Fit(a) => fit(&a),
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::initial::Spectrum;

    #[test]
    fn parse_errors_and_help() {
        assert_eq!(run(["strata", "--help"]), 0);
        assert_eq!(run(["strata", "sweep", "--bogus"]), 1);
        assert_eq!(run(["strata"]), 1);
    }

    #[test]
    fn spectrum_flags_reach_settings() {
        let cli = Cli::try_parse_from(["strata", "gen-ic", "--seed", "9", "--n", "8", "--cutoff", "2", "--out", "x"]).unwrap();
        let Command::GenIc(a) = cli.command else { panic!() };
        let s = ic_settings(&a).unwrap();
        let c = s.sweep_config().unwrap();
        assert_eq!((c.seed, c.n, c.spectrum.cutoff), (9, 8, 2));
        assert_eq!(c.spectrum, Spectrum { cutoff: 2, ..Default::default() });
    }
}
