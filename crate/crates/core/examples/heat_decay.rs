//! Boussinesq run from the heat-decay state, compared with its closed form.

use std::f64::consts::PI;

use strata::boussinesq::{run_boussinesq, BoussinesqConfig};
use strata::spectral::{Field, Grid, Parity, SpectralField};

fn main() -> strata::Result<()> {
    let grid = Grid::cubic(16)?;
    let tau = 0.1;
    let zero = SpectralField::zeros(&grid, Parity::Even);
    let rho0 = Field::from_fn(&grid, Parity::Odd, |_, _, z| (PI * z).sin()).forward();
    let config = BoussinesqConfig::new(tau, 0.01, 0.25).record_every(5);
    let traj = run_boussinesq(&config, &[zero.clone(), zero], &rho0)?;

    println!("{:>6} {:>14} {:>14} {:>12}", "t", "E", "E exact", "hydrostatic");
    for r in &traj.records {
        let exact = 0.5 * 4.0 * PI * PI * (-2.0 * PI * PI * r.time).exp();
        println!("{:>6.2} {:>14.8e} {:>14.8e} {:>12.2e}", r.time, r.energy, exact, r.hydrostatic_residual);
    }
    let s = &traj.final_state;
    let exact = Field::from_fn(&grid, Parity::Odd, |_, _, z| (-PI * PI * s.time).exp() * (PI * z).sin());
    println!("max error in rho at T: {:.3e}", s.rho.inverse().sub(&exact)?.max_abs());
    Ok(())
}
