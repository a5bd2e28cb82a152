//! Diagnosing w from v and the hydrostatic pressure from ρ and the surface pressure.

use std::f64::consts::PI;

use strata::fields::{diagnose_pressure, diagnose_w};
use strata::spectral::{Axis, Field, Grid, Parity, SurfaceField};

fn main() -> strata::Result<()> {
    let grid = Grid::new(16, 16, 24)?;
    let v = [
        Field::from_fn(&grid, Parity::Even, |x, _, z| x.sin() * (PI * z).cos()).forward(),
        Field::from_fn(&grid, Parity::Even, |_, y, z| y.sin() * (PI * z).cos()).forward(),
    ];
    let w = diagnose_w(&v)?;
    let exact = Field::from_fn(&grid, Parity::Odd, |x, y, z| -(x.cos() + y.cos()) * (PI * z).sin() / PI);
    println!("w error {:.3e}", w.inverse().sub(&exact)?.max_abs());

    let div = v[0]
        .derivative(Axis::X, 1)?
        .add(&v[1].derivative(Axis::Y, 1)?)?
        .add(&w.derivative(Axis::Z, 1)?)?;
    println!("divergence {:.3e}", div.inverse().max_abs());

    let rho = Field::from_fn(&grid, Parity::Odd, |x, _, z| (PI * z).sin() * (1.0 + 0.5 * x.cos())).forward();
    let p_gamma = SurfaceField::from_fn(&grid, |x, y| (x + y).cos()).forward();
    let p = diagnose_pressure(&rho, &p_gamma)?;
    let residual = p.derivative(Axis::Z, 1)?.add(&rho)?;
    println!("|dp/dz + rho| {:.3e}", residual.inverse().max_abs());
    Ok(())
}
