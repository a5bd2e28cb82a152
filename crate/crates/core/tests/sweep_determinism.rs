use strata::harness::{run_tau_sweep, Spectrum, SweepConfig};

fn tiny() -> SweepConfig {
    SweepConfig {
        taus: vec![0.2, 0.1, 0.05],
        n: 8,
        t_end: 0.02,
        spectrum: Spectrum {
            cutoff: 2,
            ..Spectrum::default()
        },
        ..SweepConfig::default()
    }
}

#[test]
fn sweep_is_reproducible() {
    let a = run_tau_sweep(&tiny()).unwrap();
    let b = run_tau_sweep(&tiny()).unwrap();
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    assert!(a.entries.iter().all(|e| e.completed));
}

#[test]
fn differences_shrink_with_tau() {
    let r = run_tau_sweep(&tiny()).unwrap();
    let l2: Vec<f64> = r.entries.iter().map(|e| e.l2_sup()).collect();
    assert!(l2.windows(2).all(|w| w[1] < w[0]), "{l2:?}");
    let slopes = r.slopes.expect("three completed tau values");
    assert!(slopes.l2_sup.slope > 0.85);
    assert!(r.pe_ledger.relative_residual() < 1e-3);
}
