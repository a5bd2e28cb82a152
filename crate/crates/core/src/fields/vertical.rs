//! Vertical integration `∫_0^z · dξ` and the hydrostatic reconstructions built on it.

use crate::error::{Error, Result};
use crate::spectral::{divergence_h, Complex64, Parity, SpectralField, SurfaceSpectrum};

/// A column whose vertical mean exceeds this (relative) has no periodic antiderivative.
pub const VERTICAL_MEAN_TOL: f64 = 1e-8;

/// Largest `|½∫_{-1}^{1} f dz|` over the horizontal grid.
pub fn max_vertical_mean(f: &SpectralField) -> f64 {
    f.vertical_mean().inverse().max_abs()
}

fn spectral_scale(f: &SpectralField) -> f64 {
    f.coeffs().iter().map(|c| c.norm()).sum::<f64>().max(1.0)
}

/// `F(x,y,z) = ∫_0^z f(x,y,ξ) dξ`, computed column by column in Fourier space.
///
/// Each nonzero vertical mode `m` is divided by `iπm`; the constant that pins
/// `F(z = 0) = 0` lands in the `m = 0` plane. The vertical Nyquist mode has no
/// periodic antiderivative on the grid and is dropped. Columns with a nonzero
/// vertical mean would produce a non-periodic ramp and are rejected.
pub fn vertical_integral_from_zero(f: &SpectralField) -> Result<SpectralField> {
    let mean = max_vertical_mean(f);
    let tolerance = VERTICAL_MEAN_TOL * spectral_scale(f);
    if mean > tolerance {
        return Err(Error::Constraint {
            what: "vertical mean of integrand",
            value: mean,
            tolerance,
        });
    }
    let g = f.grid();
    let nz = g.nz();
    let inv_kz: Vec<f64> = (0..nz)
        .map(|iz| {
            if iz == 0 || g.is_nyquist(crate::spectral::Axis::Z, iz) {
                0.0
            } else {
                1.0 / g.wavenumber(crate::spectral::Axis::Z, iz)
            }
        })
        .collect();
    let mut out = f.clone().with_parity(f.parity().flip());
    for col in out.coeffs_mut().chunks_exact_mut(nz) {
        let mut offset = Complex64::default();
        for iz in 1..nz {
            // c / (i k) = -i c / k
            let c = col[iz];
            let q = Complex64::new(c.im * inv_kz[iz], -c.re * inv_kz[iz]);
            col[iz] = q;
            // samples start at z = -1, so the basis is e^{iπm(z+1)} and z = 0 picks up (-1)^m
            if iz % 2 == 0 {
                offset += q;
            } else {
                offset -= q;
            }
        }
        col[0] = -offset;
    }
    Ok(out)
}

/// Vertical velocity `w = -∫_0^z ∇_h·v dξ` of a hydrostatic flow.
///
/// Fails when the barotropic constraint `∫_{-1}^{1} ∇_h·v dz = 0` is violated.
pub fn diagnose_w(v: &[SpectralField; 2]) -> Result<SpectralField> {
    let div = divergence_h(&v[0], &v[1])?;
    let mean = max_vertical_mean(&div);
    let tolerance = VERTICAL_MEAN_TOL * spectral_scale(&div);
    if mean > tolerance {
        return Err(Error::Constraint {
            what: "barotropic divergence",
            value: mean,
            tolerance,
        });
    }
    let mut w = vertical_integral_from_zero(&div)?;
    w.scale_in_place(-1.0);
    Ok(w)
}

/// Hydrostatic pressure `p = p_γ - ∫_0^z ρ dξ`, which satisfies `∂_z p + ρ = 0`.
pub fn diagnose_pressure(rho: &SpectralField, p_gamma: &SurfaceSpectrum) -> Result<SpectralField> {
    let defect = rho.parity_project(Parity::Even).max_abs_coeff();
    let tolerance = 1e-10 * rho.max_abs_coeff().max(1.0);
    if defect > tolerance {
        return Err(Error::Constraint {
            what: "even part of density",
            value: defect,
            tolerance,
        });
    }
    let mut p = p_gamma.extend_z();
    p.axpy(-1.0, &vertical_integral_from_zero(rho)?)?;
    Ok(p.with_parity(Parity::Even))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Axis, Field, Grid, SurfaceField};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(8, 8, 16).unwrap()
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    #[test]
    fn integral_of_cosine() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |_, _, z| (PI * z).cos()).forward();
        let big_f = vertical_integral_from_zero(&f).unwrap().inverse();
        let exact = Field::from_fn(&g, Parity::Odd, |_, _, z| (PI * z).sin() / PI);
        assert!(max_diff(&big_f, &exact) < 1e-14);
    }

    #[test]
    fn integral_of_zero_and_parity() {
        let g = grid();
        let zero = vertical_integral_from_zero(&SpectralField::zeros(&g, Parity::Odd)).unwrap();
        assert_eq!(zero.max_abs_coeff(), 0.0);
        let odd = Field::from_fn(&g, Parity::Odd, |x, _, z| x.cos() * (2.0 * PI * z).sin()).forward();
        let out = vertical_integral_from_zero(&odd).unwrap();
        assert_eq!(out.parity(), Parity::Even);
        assert!(out.inverse().parity_defect() < 1e-14);
        // vanishes at z = 0, which is sample nz/2
        let phys = out.inverse();
        for ix in 0..g.nx() {
            assert!(phys.at(ix, 0, g.nz() / 2).abs() < 1e-14);
        }
    }

    #[test]
    fn nonzero_vertical_mean_is_a_violation() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |x, _, _| x.cos()).forward();
        assert!(matches!(
            vertical_integral_from_zero(&f),
            Err(Error::Constraint { .. })
        ));
    }

    #[test]
    fn w_from_single_mode() {
        let g = grid();
        let v = [
            Field::from_fn(&g, Parity::Even, |x, _, z| x.sin() * (PI * z).cos()).forward(),
            SpectralField::zeros(&g, Parity::Even),
        ];
        let w = diagnose_w(&v).unwrap().inverse();
        let exact = Field::from_fn(&g, Parity::Odd, |x, _, z| -x.cos() * (PI * z).sin() / PI);
        assert!(max_diff(&w, &exact) < 1e-14);
    }

    #[test]
    fn w_from_two_components_and_constant() {
        let g = grid();
        let v = [
            Field::from_fn(&g, Parity::Even, |x, _, z| x.sin() * (PI * z).cos()).forward(),
            Field::from_fn(&g, Parity::Even, |_, y, z| y.sin() * (PI * z).cos()).forward(),
        ];
        let w = diagnose_w(&v).unwrap().inverse();
        let exact = Field::from_fn(&g, Parity::Odd, |x, y, z| {
            -(x.cos() + y.cos()) * (PI * z).sin() / PI
        });
        assert!(max_diff(&w, &exact) < 1e-14);

        let c = [
            Field::from_fn(&g, Parity::Even, |_, _, _| 0.7).forward(),
            Field::from_fn(&g, Parity::Even, |_, _, _| -1.2).forward(),
        ];
        assert!(diagnose_w(&c).unwrap().max_abs_coeff() < 1e-15);
    }

    #[test]
    fn w_rejects_barotropic_divergence() {
        let g = grid();
        let v = [
            Field::from_fn(&g, Parity::Even, |x, _, _| x.sin()).forward(),
            SpectralField::zeros(&g, Parity::Even),
        ];
        assert!(diagnose_w(&v).is_err());
    }

    #[test]
    fn w_closes_the_divergence() {
        let g = grid();
        let v = [
            Field::from_fn(&g, Parity::Even, |x, y, z| (x + y).sin() * (2.0 * PI * z).cos()).forward(),
            Field::from_fn(&g, Parity::Even, |x, _, z| (2.0 * x).cos() * (PI * z).cos()).forward(),
        ];
        let w = diagnose_w(&v).unwrap();
        let div = divergence_h(&v[0], &v[1])
            .unwrap()
            .add(&w.derivative(Axis::Z, 1).unwrap())
            .unwrap();
        assert!(div.inverse().max_abs() < 1e-13);
    }

    #[test]
    fn hydrostatic_pressure_examples() {
        let g = grid();
        let rho = Field::from_fn(&g, Parity::Odd, |_, _, z| (PI * z).sin()).forward();
        let p = diagnose_pressure(&rho, &SurfaceSpectrum::zeros(&g)).unwrap().inverse();
        let exact = Field::from_fn(&g, Parity::Even, |_, _, z| ((PI * z).cos() - 1.0) / PI);
        assert!(max_diff(&p, &exact) < 1e-13);

        let pg = SurfaceField::from_fn(&g, |x, _| x.cos()).forward();
        let p = diagnose_pressure(&rho, &pg).unwrap().inverse();
        let exact = Field::from_fn(&g, Parity::Even, |x, _, z| {
            x.cos() + ((PI * z).cos() - 1.0) / PI
        });
        assert!(max_diff(&p, &exact) < 1e-13);

        let p = diagnose_pressure(&SpectralField::zeros(&g, Parity::Odd), &pg)
            .unwrap()
            .inverse();
        let exact = Field::from_fn(&g, Parity::Even, |x, _, _| x.cos());
        assert!(max_diff(&p, &exact) < 1e-13);
    }

    #[test]
    fn pressure_rejects_even_density() {
        let g = grid();
        let rho = Field::from_fn(&g, Parity::None, |_, _, z| (PI * z).cos()).forward();
        assert!(diagnose_pressure(&rho, &SurfaceSpectrum::zeros(&g)).is_err());
    }
}
