//! Seeded, band-limited admissible initial data.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fields::state::{DENSITY_PARITY, VELOCITY_PARITY};
use crate::pe::barotropic_project;
use crate::spectral::{Axis, Complex64, Grid, Parity, SpectralField, VOLUME};

/// Random spectrum: mode amplitude `(1 + |k|²)^{−decay/2}` for `|mode| ≤ cutoff` on every axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    pub decay: f64,
    pub cutoff: usize,
    /// Root-mean-square value of each of `v` and `ρ` after normalization.
    pub amplitude: f64,
}

impl Default for Spectrum {
    fn default() -> Self {
        Self {
            decay: 4.0,
            cutoff: 8,
            amplitude: 1.0,
        }
    }
}

fn random_field(grid: &Grid, rng: &mut ChaCha8Rng, spectrum: &Spectrum, parity: Parity) -> SpectralField {
    let k2 = grid.k2();
    let neg = grid.neg();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for ix in 0..grid.nx() {
        for iy in 0..grid.ny() {
            for iz in 0..grid.nz() {
                let i = grid.index(ix, iy, iz);
                // draw for every mode so the stream does not depend on the cutoff
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let inside = [(Axis::X, ix), (Axis::Y, iy), (Axis::Z, iz)]
                    .iter()
                    .all(|&(a, j)| grid.mode(a, j).unsigned_abs() as usize <= spectrum.cutoff && !grid.is_nyquist(a, j));
                if inside {
                    let amp = (1.0 + k2[i]).powf(-0.5 * spectrum.decay);
                    coeffs[i] = Complex64::new(re, im) * amp;
                }
            }
        }
    }
    let sym: Vec<Complex64> = (0..coeffs.len())
        .map(|i| 0.5 * (coeffs[i] + coeffs[neg[i]].conj()))
        .collect();
    SpectralField::new(grid, sym, Parity::None)
        .expect("sized to the grid")
        .parity_project(parity)
}

fn rms(fields: &[&SpectralField]) -> f64 {
    let sq: f64 = fields.iter().map(|f| f.norm_l2_sq()).sum();
    (sq / (fields.len() as f64 * VOLUME)).sqrt()
}

/// `(v₀, ρ₀)`: `v₀` even with zero mean and zero barotropic divergence, `ρ₀` odd.
///
/// Deterministic per seed. Each of `v₀` and `ρ₀` is rescaled to the requested rms.
pub fn generate_initial_data(seed: u64, spectrum: &Spectrum, grid: &Grid) -> Result<([SpectralField; 2], SpectralField)> {
    let limit = [Axis::X, Axis::Y, Axis::Z]
        .iter()
        .map(|&a| grid.dealias_cutoff(a))
        .min()
        .unwrap_or(0);
    if spectrum.cutoff > limit {
        return Err(Error::InvalidParameter(format!(
            "spectrum cutoff {} exceeds the dealiasing cutoff {limit}",
            spectrum.cutoff
        )));
    }
    if !(spectrum.amplitude >= 0.0 && spectrum.decay.is_finite()) {
        return Err(Error::InvalidParameter("amplitude must be nonnegative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = [
        random_field(grid, &mut rng, spectrum, VELOCITY_PARITY),
        random_field(grid, &mut rng, spectrum, VELOCITY_PARITY),
    ];
    let mut rho = random_field(grid, &mut rng, spectrum, DENSITY_PARITY);
    for f in v.iter_mut() {
        f.coeffs_mut()[0] = Complex64::default();
    }
    let mut v = barotropic_project(&v)?;
    let scale = |current: f64| if current > 0.0 { spectrum.amplitude / current } else { 0.0 };
    let sv = scale(rms(&[&v[0], &v[1]]));
    v.iter_mut().for_each(|f| f.scale_in_place(sv));
    rho.scale_in_place(scale(rms(&[&rho])));
    Ok((v, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::state::parity_defect_of;
    use crate::spectral::divergence_h;

    #[test]
    fn constraints_hold() {
        let g = Grid::cubic(16).unwrap();
        for seed in [1, 2, 99] {
            let spec = Spectrum { cutoff: 4, ..Default::default() };
            let (v, rho) = generate_initial_data(seed, &spec, &g).unwrap();
            assert!(parity_defect_of(&[&v[0], &v[1], &rho]).unwrap() < 1e-10);
            assert!(v[0].mean().abs() < 1e-10 && v[1].mean().abs() < 1e-10 && rho.mean().abs() < 1e-10);
            let baro = divergence_h(&v[0], &v[1]).unwrap().vertical_mean().inverse().max_abs();
            assert!(baro < 1e-10);
            assert!((rms(&[&rho]) - 1.0).abs() < 1e-12);
            assert!(v[0].is_band_limited() && rho.is_band_limited());
            assert!(v[0].hermitian_defect() < 1e-14);
        }
    }

    #[test]
    fn deterministic_and_zero_amplitude() {
        let g = Grid::cubic(8).unwrap();
        let spec = Spectrum { cutoff: 2, ..Default::default() };
        let a = generate_initial_data(7, &spec, &g).unwrap();
        let b = generate_initial_data(7, &spec, &g).unwrap();
        assert_eq!(a.0[0].coeffs(), b.0[0].coeffs());
        assert_eq!(a.1.coeffs(), b.1.coeffs());
        let c = generate_initial_data(8, &spec, &g).unwrap();
        assert_ne!(a.1.coeffs(), c.1.coeffs());

        let zero = Spectrum { amplitude: 0.0, ..spec };
        let (v, rho) = generate_initial_data(7, &zero, &g).unwrap();
        assert_eq!(v[0].max_abs_coeff() + v[1].max_abs_coeff() + rho.max_abs_coeff(), 0.0);

        let wide = Spectrum { cutoff: 3, ..spec };
        assert!(generate_initial_data(7, &wide, &g).is_err());
    }
}
