//! Runs the aspect-ratio sweep and prints the fitted convergence rates.
//!
//! ```text
//! cargo run --release --example tau_sweep -- [decay] [out_dir]
//! ```

use std::path::PathBuf;
use std::time::Instant;

use strata::harness::{run_tau_sweep, SweepConfig};

fn main() -> strata::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut config = SweepConfig::default();
    if let Some(decay) = args.next() {
        config.spectrum.decay = decay.parse().expect("decay must be a number");
    }
    let out = args.next().map(PathBuf::from);

    let start = Instant::now();
    let report = run_tau_sweep(&config)?;
    println!("sweep finished in {:.1}s", start.elapsed().as_secs_f64());

    println!("{:>8} {:>10} {:>12} {:>12} {:>12} {:>12}", "tau", "dt", "L2 sup", "L2 diss", "H1 sup", "hydro");
    for e in &report.entries {
        if !e.completed {
            println!("{:>8} failed: {}", e.tau, e.failure.as_deref().unwrap_or("?"));
            continue;
        }
        println!(
            "{:>8} {:>10.3e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            e.tau,
            e.dt,
            e.l2_sup(),
            e.l2_dissipation(),
            e.h1_sup(),
            e.hydrostatic_mean()
        );
    }
    if let Some(s) = report.slopes {
        println!("slope L2 sup        {:.3}", s.l2_sup.slope);
        println!("slope L2 dissipation {:.3}", s.l2_dissipation.slope);
        println!("slope H1 sup        {:.3}", s.h1_sup.slope);
        println!("slope hydrostatic   {:.3}", s.hydrostatic.slope);
    }
    if let Some(dir) = out {
        report.write_outputs(&dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
