//! Transforms, derivatives, dealiasing and the anisotropic Poisson solve on a small grid.

use std::f64::consts::PI;

use strata::spectral::{solve_anisotropic_poisson, Axis, Field, Grid, Parity};

fn main() -> strata::Result<()> {
    let grid = Grid::cubic(16)?;
    let f = Field::from_fn(&grid, Parity::Even, |x, y, z| x.cos() * (2.0 * y).sin() + (PI * z).cos());
    let s = f.forward();
    println!("mean {:.3e}, band limited {}", s.mean(), s.is_band_limited());

    // ∂_x of cos x sin 2y is -sin x sin 2y
    let dx = s.derivative(Axis::X, 1)?.inverse();
    let exact = Field::from_fn(&grid, Parity::Even, |x, y, _| -x.sin() * (2.0 * y).sin());
    println!("d/dx error {:.3e}", dx.sub(&exact)?.max_abs());

    // ∂_z flips the vertical parity
    let dz = s.derivative(Axis::Z, 1)?;
    println!("d/dz parity {:?}, defect {:.3e}", dz.parity(), dz.parity_defect());

    let rough = Field::from_fn(&grid, Parity::Even, |x, _, _| (7.0 * x).cos()).forward();
    println!("|cos 7x| after dealias: {:.3e}", rough.dealias().max_abs_coeff());

    for tau in [1.0, 0.1, 0.01] {
        let rhs = Field::from_fn(&grid, Parity::Even, |x, _, z| x.cos() + (PI * z).cos()).forward();
        let p = solve_anisotropic_poisson(&rhs, tau)?.inverse();
        let exact = Field::from_fn(&grid, Parity::Even, |x, _, z| {
            -x.cos() - tau * tau / (PI * PI) * (PI * z).cos()
        });
        println!("tau {tau:<5} poisson error {:.3e}", p.sub(&exact)?.max_abs());
    }
    Ok(())
}
