use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn strata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .output()
        .expect("spawn strata")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_ic_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = strata(&["gen-ic", "--seed", "5", "--n", "8", "--cutoff", "2", "--out", arg(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["v1.snap", "v2.snap", "rho.snap"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let c = dir.path().join("c");
    strata(&["gen-ic", "--seed", "6", "--n", "8", "--cutoff", "2", "--out", arg(&c)]);
    assert_ne!(fs::read(a.join("rho.snap")).unwrap(), fs::read(c.join("rho.snap")).unwrap());
}

#[test]
fn fit_recovers_linear_rate() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rate.csv");
    fs::write(&csv, "tau,err\n0.2,0.6\n0.1,0.3\n0.05,0.15\n0.025,0.075\n").unwrap();
    let o = strata(&["fit", "--input", arg(&csv)]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("slope 1.000 "), "{out}");
}

#[test]
fn run_commands_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let ic = dir.path().join("ic");
    strata(&["gen-ic", "--n", "8", "--cutoff", "2", "--out", arg(&ic)]);
    for cmd in ["run-boussinesq", "run-pe"] {
        let out = dir.path().join(cmd);
        let o = strata(&[
            cmd, "--ic-dir", arg(&ic), "--n", "8", "--tau", "0.2", "--T", "0.01", "--dt", "1e-3", "--out", arg(&out),
        ]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        for f in ["records.csv", "energy_ledger.csv", "v1.snap", "v2.snap", "w.snap", "rho.snap", "p.snap"] {
            assert!(out.join(f).exists(), "{cmd} missing {f}");
        }
        let records = fs::read_to_string(out.join("records.csv")).unwrap();
        assert!(records.starts_with("time,E,D,div_max,parity_defect,hydrostatic_residual"));
        assert_eq!(records.lines().count(), 12);
    }
}

#[test]
fn energy_check_reports_halving() {
    let o = strata(&["energy-check", "--system", "pe", "--n", "8", "--cutoff", "2", "--T", "0.02"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().contains("reduction on halving dt"));
}

#[test]
fn small_sweep_writes_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let cfg = dir.path().join("sweep.cfg");
    fs::write(
        &cfg,
        format!(
            "# tiny sweep\ngrid.n = 8\nsweep.taus = 0.2, 0.1, 0.05\ntime.T = 0.02\nic.cutoff = 2\nout.dir = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = strata(&["sweep", "--config", arg(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 4);
    assert!(report.lines().next().unwrap().starts_with("tau,"));
    assert!(fs::read_to_string(out.join("report.svg")).unwrap().starts_with("<svg"));

    let svg = dir.path().join("ledger.svg");
    let o = strata(&["plot", "--input", arg(&out.join("ledger_pe.csv")), "--output", arg(&svg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(svg.exists());
}

#[test]
fn malformed_config_exits_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "grid.n = 8\ntime.T 0.1\n").unwrap();
    let o = strata(&["sweep", "--config", arg(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 2"));

    fs::write(&cfg, "grid.n = 8\nwhat = 1\n").unwrap();
    assert_eq!(strata(&["sweep", "--config", arg(&cfg)]).status.code(), Some(1));
    assert_eq!(strata(&["gen-ic", "--set", "grid.n"]).status.code(), Some(1));
}

#[test]
fn bad_parameters_exit_nonzero() {
    assert_eq!(strata(&["run-boussinesq", "--n", "8", "--cutoff", "2", "--tau", "-1"]).status.code(), Some(1));
    assert_eq!(strata(&["fit", "--input", "/nonexistent.csv"]).status.code(), Some(1));
}
