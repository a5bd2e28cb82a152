//! Rescaling a thin stratified layer onto the unit-height domain and back.

use std::f64::consts::PI;

use strata::fields::{scale_map, unscale_map, PhysicalConstants, PhysicalState};
use strata::spectral::{Field, Grid, Parity};

fn main() -> strata::Result<()> {
    let grid = Grid::new(8, 8, 16)?;
    let tau = 0.05;
    let layer = PhysicalState {
        v: [
            Field::from_fn(&grid, Parity::Even, |_, y, z| y.cos() * (PI * z).cos()),
            Field::zeros(&grid, Parity::Even),
        ],
        // sin(π Z / τ) sampled at Z = τ z
        w: Field::from_fn(&grid, Parity::Odd, |_, _, z| (PI * z).sin()),
        p: Field::from_fn(&grid, Parity::Even, |x, _, _| x.cos()),
        rho: Field::from_fn(&grid, Parity::Odd, |_, _, z| 0.1 * (PI * z).sin()),
        half_height: tau,
        constants: PhysicalConstants::for_aspect_ratio(tau),
        time: 0.0,
    };
    println!("layer thickness {}, N = {}", 2.0 * tau, layer.constants.buoyancy_frequency);
    println!("background density at the top {:.3}", layer.background_density(tau));

    let scaled = scale_map(&layer, tau)?;
    println!("scaled w max {:.3} (1/tau = {})", scaled.w.inverse().max_abs(), 1.0 / tau);
    println!("scaled rho max {:.3e} (g tau times physical)", scaled.rho.inverse().max_abs());
    println!("scaled energy {:.6}", scaled.energy());

    let back = unscale_map(&scaled, layer.constants.g)?;
    let err = back.rho.sub(&layer.rho)?.max_abs().max(back.v[0].sub(&layer.v[0])?.max_abs());
    println!("round trip error {err:.3e}");
    Ok(())
}
