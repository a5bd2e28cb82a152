//! Primitive-equation run from random admissible data, with the invariant monitor.

use strata::diagnostics::cancellation_checks_pe;
use strata::harness::{generate_initial_data, Spectrum};
use strata::pe::{run_pe_with, PeConfig};
use strata::spectral::Grid;

fn main() -> strata::Result<()> {
    let grid = Grid::cubic(16)?;
    let spectrum = Spectrum {
        cutoff: 4,
        ..Spectrum::default()
    };
    let (v0, rho0) = generate_initial_data(3, &spectrum, &grid)?;
    let config = PeConfig::new(2e-3, 0.1).record_interval(0.02);

    println!("{:>6} {:>12} {:>10} {:>10} {:>10} {:>10}", "t", "E", "div", "baro", "parity", "cancel");
    let (_, state) = run_pe_with(&config, &v0, &rho0, |s, r| {
        let c = cancellation_checks_pe(s)?;
        println!(
            "{:>6.3} {:>12.6e} {:>10.2e} {:>10.2e} {:>10.2e} {:>10.2e}",
            r.time,
            r.energy,
            r.div_max,
            r.barotropic_defect,
            r.parity_defect,
            c.max()
        );
        Ok(())
    })?;
    println!("surface w {:.3e}, hydrostatic defect {:.3e}", state.surface_w(), state.hydrostatic_defect()?);
    Ok(())
}
