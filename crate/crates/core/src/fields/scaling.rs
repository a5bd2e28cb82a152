//! Map between the thin physical layer `M × (-τ, τ)` and the fixed scaled domain.
//!
//! Physical fields are sampled on the same index grid as the scaled ones, with
//! the physical height of sample `iz` equal to `Z = τ z(iz)`. No interpolation
//! is involved, so the map is exactly invertible.

use crate::error::{Error, Result};
use crate::fields::state::BoussinesqState;
use crate::spectral::{forward_many, Axis, Field, Grid, Parity};

/// Constants of the stratified layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// Gravitational acceleration.
    pub g: f64,
    /// Reference density.
    pub rho_b: f64,
    /// Buoyancy (Brunt-Väisälä) frequency.
    pub buoyancy_frequency: f64,
}

impl PhysicalConstants {
    /// `g = ρ_b = 1` with the strong stratification `τ²N² = 1`.
    pub fn for_aspect_ratio(tau: f64) -> Self {
        Self {
            g: 1.0,
            rho_b: 1.0,
            buoyancy_frequency: 1.0 / tau,
        }
    }
}

/// Unscaled state on the thin layer, split into background and perturbation.
#[derive(Clone, Debug)]
pub struct PhysicalState {
    pub v: [Field; 2],
    pub w: Field,
    /// Pressure perturbation `p = π - p̄(Z)`.
    pub p: Field,
    /// Density perturbation `ρ = ϱ - ϱ̄(Z)`.
    pub rho: Field,
    /// Half-thickness of the layer (the aspect ratio τ).
    pub half_height: f64,
    pub constants: PhysicalConstants,
    pub time: f64,
}

impl PhysicalState {
    /// Physical height of vertical sample `iz`.
    pub fn height(&self, iz: usize) -> f64 {
        self.half_height * self.grid().z(iz)
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// Affine background density `ϱ̄(Z) = 1 - N² Z / g`.
    pub fn background_density(&self, z: f64) -> f64 {
        let c = &self.constants;
        1.0 - c.buoyancy_frequency.powi(2) * z / c.g
    }

    /// Hydrostatic background pressure with `dp̄/dZ = -g ϱ̄` and `p̄(0) = 0`.
    pub fn background_pressure(&self, z: f64) -> f64 {
        let c = &self.constants;
        -c.g * z + 0.5 * c.buoyancy_frequency.powi(2) * z * z
    }

    /// Total density `ϱ = ϱ̄ + ρ` at every sample.
    pub fn total_density(&self) -> Field {
        let mut out = self.rho.clone().with_parity(Parity::None);
        let nz = self.grid().nz();
        let heights: Vec<f64> = (0..nz).map(|iz| self.height(iz)).collect();
        for col in out.values_mut().chunks_exact_mut(nz) {
            for (v, z) in col.iter_mut().zip(&heights) {
                *v += self.background_density(*z);
            }
        }
        out
    }

    /// `max |∂_x v1 + ∂_y v2 + ∂_Z w|` with `∂_Z = τ⁻¹ ∂_z` on the index grid.
    pub fn divergence_max(&self) -> Result<f64> {
        let s = forward_many(&[&self.v[0], &self.v[1], &self.w])?;
        let mut div = s[0].derivative(Axis::X, 1)?;
        div.axpy(1.0, &s[1].derivative(Axis::Y, 1)?)?;
        div.axpy(1.0 / self.half_height, &s[2].derivative(Axis::Z, 1)?)?;
        Ok(div.inverse().max_abs())
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "aspect ratio tau = {tau} must be positive"
        )))
    }
}

/// `v_τ = v`, `w_τ = w / τ`, `p_τ = p`, `ρ_τ = g τ ρ`.
pub fn scale_map(physical: &PhysicalState, tau: f64) -> Result<BoussinesqState> {
    check_tau(tau)?;
    if (physical.half_height - tau).abs() > 1e-12 * tau {
        return Err(Error::InvalidParameter(format!(
            "layer half-height {} does not match tau = {tau}",
            physical.half_height
        )));
    }
    let g = physical.constants.g;
    let w = physical.w.scaled(1.0 / tau);
    let rho = physical.rho.scaled(g * tau);
    let s = forward_many(&[&physical.v[0], &physical.v[1], &w, &rho, &physical.p])?;
    let mut it = s.into_iter();
    let mut next = || it.next().expect("five spectra");
    Ok(BoussinesqState {
        v: [next(), next()],
        w: next(),
        rho: next(),
        pressure: next(),
        tau,
        time: physical.time,
    })
}

/// Inverse of [`scale_map`]; the layer gets `N = 1/τ` and the given `g`.
pub fn unscale_map(scaled: &BoussinesqState, g: f64) -> Result<PhysicalState> {
    let tau = scaled.tau;
    check_tau(tau)?;
    let mut fields = scaled.to_fields()?.into_iter();
    let mut next = || fields.next().expect("five fields");
    let v = [next(), next()];
    let w = next().scaled(tau);
    let rho = next().scaled(1.0 / (g * tau));
    let p = next();
    Ok(PhysicalState {
        v,
        w,
        p,
        rho,
        half_height: tau,
        constants: PhysicalConstants {
            g,
            rho_b: 1.0,
            buoyancy_frequency: 1.0 / tau,
        },
        time: scaled.time,
    })
}
