//! State containers for the scaled Boussinesq system and the primitive equations.

use crate::error::Result;
use crate::spectral::{
    divergence_h, inverse_many, Axis, Field, Grid, Parity, SpectralField, SurfaceSpectrum,
};

/// Largest physical-space parity violation over a set of spectra.
pub(crate) fn parity_defect_of(fields: &[&SpectralField]) -> Result<f64> {
    Ok(inverse_many(fields)?
        .iter()
        .fold(0.0_f64, |m, f| m.max(f.parity_defect())))
}

/// Scaled Boussinesq unknowns `(v_τ, w_τ, ρ_τ)` with the diagnostic pressure `p_τ`.
#[derive(Clone, Debug)]
pub struct BoussinesqState {
    /// Horizontal velocity, even in z.
    pub v: [SpectralField; 2],
    /// Vertical velocity, odd in z.
    pub w: SpectralField,
    /// Density perturbation, odd in z.
    pub rho: SpectralField,
    /// Pressure returned by the last projection, zero mean, even in z.
    pub pressure: SpectralField,
    pub tau: f64,
    pub time: f64,
}

impl BoussinesqState {
    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// `max |∇_h·v + ∂_z w|`.
    pub fn divergence_max(&self) -> Result<f64> {
        let div = divergence_h(&self.v[0], &self.v[1])?.add(&self.w.derivative(Axis::Z, 1)?)?;
        Ok(div.inverse().max_abs())
    }

    pub fn parity_defect(&self) -> Result<f64> {
        parity_defect_of(&[&self.v[0], &self.v[1], &self.w, &self.rho])
    }

    /// Largest of the domain means of `v` and `ρ`.
    pub fn mean_defect(&self) -> f64 {
        [&self.v[0], &self.v[1], &self.rho]
            .iter()
            .fold(0.0_f64, |m, f| m.max(f.mean().abs()))
    }

    /// `E = ½(‖v‖² + τ²‖w‖² + ‖ρ‖²)`.
    pub fn energy(&self) -> f64 {
        let t2 = self.tau * self.tau;
        0.5 * (self.v[0].norm_l2_sq()
            + self.v[1].norm_l2_sq()
            + t2 * self.w.norm_l2_sq()
            + self.rho.norm_l2_sq())
    }

    /// `D = ‖∇v‖² + τ²‖∇w‖² + ‖∇ρ‖²`.
    pub fn dissipation(&self) -> f64 {
        let t2 = self.tau * self.tau;
        self.v[0].grad_norm_sq()
            + self.v[1].grad_norm_sq()
            + t2 * self.w.grad_norm_sq()
            + self.rho.grad_norm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.v[0].is_finite() && self.v[1].is_finite() && self.w.is_finite() && self.rho.is_finite()
    }

    /// Physical samples `(v1, v2, w, ρ, p_τ)`.
    pub fn to_fields(&self) -> Result<Vec<Field>> {
        inverse_many(&[&self.v[0], &self.v[1], &self.w, &self.rho, &self.pressure])
    }
}

/// Primitive-equation state: prognostic `(v, ρ)` and diagnostic `(w, p, p_γ)`.
#[derive(Clone, Debug)]
pub struct PEState {
    pub v: [SpectralField; 2],
    pub rho: SpectralField,
    pub w: SpectralField,
    pub p: SpectralField,
    /// Surface pressure at z = 0 with zero horizontal mean.
    pub p_gamma: SurfaceSpectrum,
    pub time: f64,
}

impl PEState {
    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// `max_{x,y} |∫_{-1}^{1} ∇_h·v dz|`.
    pub fn barotropic_defect(&self) -> Result<f64> {
        let div = divergence_h(&self.v[0], &self.v[1])?;
        Ok(2.0 * div.vertical_mean().inverse().max_abs())
    }

    /// `max |∇_h·v + ∂_z w|`, the defect of the diagnosed w.
    pub fn divergence_max(&self) -> Result<f64> {
        let div = divergence_h(&self.v[0], &self.v[1])?.add(&self.w.derivative(Axis::Z, 1)?)?;
        Ok(div.inverse().max_abs())
    }

    /// `max |∂_z p + ρ|`.
    pub fn hydrostatic_defect(&self) -> Result<f64> {
        Ok(self.p.derivative(Axis::Z, 1)?.add(&self.rho)?.inverse().max_abs())
    }

    /// `max |w(·,·,0)|`.
    pub fn surface_w(&self) -> f64 {
        let phys = self.w.inverse();
        let g = self.grid();
        let mid = g.nz() / 2;
        let mut m: f64 = 0.0;
        for ix in 0..g.nx() {
            for iy in 0..g.ny() {
                m = m.max(phys.at(ix, iy, mid).abs());
            }
        }
        m
    }

    pub fn parity_defect(&self) -> Result<f64> {
        parity_defect_of(&[&self.v[0], &self.v[1], &self.rho, &self.w, &self.p])
    }

    pub fn mean_defect(&self) -> f64 {
        [&self.v[0], &self.v[1], &self.rho]
            .iter()
            .fold(0.0_f64, |m, f| m.max(f.mean().abs()))
    }

    /// `E = ½(‖v‖² + ‖ρ‖²)`.
    pub fn energy(&self) -> f64 {
        0.5 * (self.v[0].norm_l2_sq() + self.v[1].norm_l2_sq() + self.rho.norm_l2_sq())
    }

    /// `D = ‖∇v‖² + ‖∇ρ‖²`.
    pub fn dissipation(&self) -> f64 {
        self.v[0].grad_norm_sq() + self.v[1].grad_norm_sq() + self.rho.grad_norm_sq()
    }

    pub fn is_finite(&self) -> bool {
        self.v[0].is_finite() && self.v[1].is_finite() && self.rho.is_finite()
    }

    /// Physical samples `(v1, v2, w, ρ, p)`.
    pub fn to_fields(&self) -> Result<Vec<Field>> {
        inverse_many(&[&self.v[0], &self.v[1], &self.w, &self.rho, &self.p])
    }
}

/// Parities of `(v, w, ρ, p)` required by the symmetry condition.
pub const VELOCITY_PARITY: Parity = Parity::Even;
pub const VERTICAL_VELOCITY_PARITY: Parity = Parity::Odd;
pub const DENSITY_PARITY: Parity = Parity::Odd;
pub const PRESSURE_PARITY: Parity = Parity::Even;
