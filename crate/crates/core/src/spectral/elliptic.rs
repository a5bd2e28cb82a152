//! Diagonal Fourier solves for the two elliptic problems of the solvers.

use super::{Axis, Complex64, SpectralField, SurfaceSpectrum};
use crate::error::{Error, Result};

/// Relative size of a zero-mode right-hand side still treated as zero.
const SOLVABILITY_TOL: f64 = 1e-12;

fn check_zero_mean(mean: Complex64, scale: f64) -> Result<()> {
    if mean.norm() > SOLVABILITY_TOL * scale.max(1.0) {
        Err(Error::Solvability { mean: mean.norm() })
    } else {
        Ok(())
    }
}

/// Solves `(Δ_h + τ⁻² ∂_zz) p = rhs` with zero-mean `p`.
pub fn solve_anisotropic_poisson(rhs: &SpectralField, tau: f64) -> Result<SpectralField> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be positive")));
    }
    check_zero_mean(rhs.coeffs()[0], rhs.max_abs_coeff())?;
    let g = rhs.grid();
    let kx = g.wavenumbers(Axis::X);
    let ky = g.wavenumbers(Axis::Y);
    let kz = g.wavenumbers(Axis::Z);
    let inv_tau2 = 1.0 / (tau * tau);
    let mut out = rhs.clone();
    let coeffs = out.coeffs_mut();
    for ix in 0..g.nx() {
        for iy in 0..g.ny() {
            let kh2 = kx[ix] * kx[ix] + ky[iy] * ky[iy];
            let base = g.index(ix, iy, 0);
            for (iz, c) in coeffs[base..base + g.nz()].iter_mut().enumerate() {
                let symbol = -kh2 - kz[iz] * kz[iz] * inv_tau2;
                *c = if symbol == 0.0 { Complex64::default() } else { *c / symbol };
            }
        }
    }
    Ok(out)
}

/// Applies `Δ_h + τ⁻² ∂_zz`.
pub fn anisotropic_laplacian(p: &SpectralField, tau: f64) -> SpectralField {
    let g = p.grid();
    let kx = g.wavenumbers(Axis::X);
    let ky = g.wavenumbers(Axis::Y);
    let kz = g.wavenumbers(Axis::Z);
    let inv_tau2 = 1.0 / (tau * tau);
    let mut out = p.clone();
    let coeffs = out.coeffs_mut();
    for ix in 0..g.nx() {
        for iy in 0..g.ny() {
            let kh2 = kx[ix] * kx[ix] + ky[iy] * ky[iy];
            let base = g.index(ix, iy, 0);
            for (iz, c) in coeffs[base..base + g.nz()].iter_mut().enumerate() {
                *c *= -kh2 - kz[iz] * kz[iz] * inv_tau2;
            }
        }
    }
    out
}

/// Solves `-Δ_h q = rhs` on the horizontal torus with `∫_M q = 0`.
pub fn solve_horizontal_poisson_zero_mean(rhs: &SurfaceSpectrum) -> Result<SurfaceSpectrum> {
    check_zero_mean(rhs.coeffs()[0], rhs.max_abs_coeff())?;
    let g = rhs.grid();
    let kx = g.wavenumbers(Axis::X);
    let ky = g.wavenumbers(Axis::Y);
    let mut out = rhs.clone();
    let coeffs = out.coeffs_mut();
    for ix in 0..g.nx() {
        for iy in 0..g.ny() {
            let kh2 = kx[ix] * kx[ix] + ky[iy] * ky[iy];
            let c = &mut coeffs[ix * g.ny() + iy];
            *c = if kh2 == 0.0 { Complex64::default() } else { *c / kh2 };
        }
    }
    Ok(out)
}
