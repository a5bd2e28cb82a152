//! Fourier machinery on the periodic box `[0,2π)² × [-1,1)`.
//!
//! Samples are stored row-major as `[x][y][z]` with `z` fastest:
//! `index = (ix * ny + iy) * nz + iz`. The forward transform divides by the
//! sample count, so the zero coefficient is the mean of the field. Because the
//! z samples start at `-1`, vertical mode `m` is `e^{iπm(z+1)}`.

mod elliptic;
mod fft;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use rustfft::num_complex::Complex64;

pub use elliptic::{
    anisotropic_laplacian, solve_anisotropic_poisson, solve_horizontal_poisson_zero_mean,
};

use crate::error::{Error, Result};
use fft::{Direction, Plans};

/// Horizontal period in x and y.
pub const LX: f64 = 2.0 * PI;
pub const LY: f64 = 2.0 * PI;
/// Vertical period (z ∈ [-1, 1)).
pub const LZ: f64 = 2.0;
/// |Ω| = LX · LY · LZ = 8π².
pub const VOLUME: f64 = LX * LY * LZ;
/// |M| = LX · LY.
pub const AREA: f64 = LX * LY;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Symmetry with respect to `z ↦ -z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity after an odd number of z-derivatives.
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    /// Parity of a pointwise product.
    pub fn product(self, other: Parity) -> Self {
        match (self, other) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            "none" => Ok(Parity::None),
            other => Err(Error::InvalidParameter(format!("unknown parity `{other}`"))),
        }
    }
}

/// Signed FFT mode number for index `i` of an `n`-point transform; the
/// Nyquist index maps to `-n/2`.
fn mode(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

struct GridCache {
    plans: Plans,
    /// |k|² per coefficient.
    k2: Vec<f64>,
    /// Coefficient index of the mirrored mode `-k`.
    neg: Vec<usize>,
    /// Retained by the 2/3 rule.
    keep: Vec<bool>,
}

/// Periodic tensor grid on `[0,2π)² × [-1,1)`.
#[derive(Clone)]
pub struct Grid {
    nx: usize,
    ny: usize,
    nz: usize,
    cache: Arc<GridCache>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}x{}x{})", self.nx, self.ny, self.nz)
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }
}

impl Grid {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny), ("nz", nz)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n} must be even and at least 4"
                )));
            }
        }
        let len = nx * ny * nz;
        let mut k2 = Vec::with_capacity(len);
        let mut neg = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let retained = |m: i64, n: usize| 3 * m.unsigned_abs() < n as u64;
        for i in 0..nx {
            let mx = mode(i, nx);
            for j in 0..ny {
                let my = mode(j, ny);
                for k in 0..nz {
                    let mz = mode(k, nz);
                    let kz = PI * mz as f64;
                    k2.push((mx * mx + my * my) as f64 + kz * kz);
                    neg.push((((nx - i) % nx) * ny + (ny - j) % ny) * nz + (nz - k) % nz);
                    keep.push(retained(mx, nx) && retained(my, ny) && retained(mz, nz));
                }
            }
        }
        Ok(Self {
            nx,
            ny,
            nz,
            cache: Arc::new(GridCache {
                plans: Plans::new(nx, ny, nz),
                k2,
                neg,
                keep,
            }),
        })
    }

    /// Cubic grid with `n` samples per axis.
    pub fn cubic(n: usize) -> Result<Self> {
        Self::new(n, n, n)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn nz(&self) -> usize {
        self.nz
    }
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.nx, self.ny, self.nz)
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Number of horizontal samples (one z-level).
    pub fn surface_len(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.ny + iy) * self.nz + iz
    }

    pub fn x(&self, ix: usize) -> f64 {
        LX * ix as f64 / self.nx as f64
    }
    pub fn y(&self, iy: usize) -> f64 {
        LY * iy as f64 / self.ny as f64
    }
    pub fn z(&self, iz: usize) -> f64 {
        -1.0 + LZ * iz as f64 / self.nz as f64
    }

    /// Index of the sample at `-z`; the z-grid is symmetric modulo the period.
    pub fn mirror_z(&self, iz: usize) -> usize {
        (self.nz - iz) % self.nz
    }

    pub fn dx(&self) -> f64 {
        LX / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        LY / self.ny as f64
    }
    pub fn dz(&self) -> f64 {
        LZ / self.nz as f64
    }

    pub fn n_along(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => self.nx,
            Axis::Y => self.ny,
            Axis::Z => self.nz,
        }
    }

    /// Signed integer mode number of index `i` along `axis`.
    pub fn mode(&self, axis: Axis, i: usize) -> i64 {
        mode(i, self.n_along(axis))
    }

    /// Physical wavenumber: integers in x and y, multiples of π in z.
    pub fn wavenumber(&self, axis: Axis, i: usize) -> f64 {
        let m = self.mode(axis, i) as f64;
        match axis {
            Axis::X | Axis::Y => m,
            Axis::Z => PI * m,
        }
    }

    pub fn is_nyquist(&self, axis: Axis, i: usize) -> bool {
        i == self.n_along(axis) / 2
    }

    /// Largest mode number kept by the 2/3 rule along `axis`.
    pub fn dealias_cutoff(&self, axis: Axis) -> usize {
        (self.n_along(axis) - 1) / 3
    }

    pub(crate) fn k2(&self) -> &[f64] {
        &self.cache.k2
    }
    pub(crate) fn neg(&self) -> &[usize] {
        &self.cache.neg
    }
    pub(crate) fn keep(&self) -> &[bool] {
        &self.cache.keep
    }
    fn plans(&self) -> &Plans {
        &self.cache.plans
    }

    /// Wavenumbers per axis as flat lookup tables.
    pub(crate) fn wavenumbers(&self, axis: Axis) -> Vec<f64> {
        (0..self.n_along(axis))
            .map(|i| self.wavenumber(axis, i))
            .collect()
    }

    fn check(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Real samples on the grid with a declared z-parity.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    parity: Parity,
}

impl Field {
    pub fn new(grid: &Grid, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
            parity,
        })
    }

    pub fn zeros(grid: &Grid, parity: Parity) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
            parity,
        }
    }

    /// Samples `f(x, y, z)` at every grid point. The parity tag is taken on trust.
    pub fn from_fn(grid: &Grid, parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            for iy in 0..grid.ny {
                let y = grid.y(iy);
                for iz in 0..grid.nz {
                    values.push(f(x, y, grid.z(iz)));
                }
            }
        }
        Self {
            grid: grid.clone(),
            values,
            parity,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn at(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.values[self.grid.index(ix, iy, iz)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest violation of the declared parity, `max |f(z) ∓ f(-z)|`.
    pub fn parity_defect(&self) -> f64 {
        let sign = match self.parity {
            Parity::Even => -1.0,
            Parity::Odd => 1.0,
            Parity::None => return 0.0,
        };
        let g = &self.grid;
        let mut defect: f64 = 0.0;
        for col in self.values.chunks_exact(g.nz) {
            for iz in 0..g.nz {
                defect = defect.max((col[iz] + sign * col[g.mirror_z(iz)]).abs());
            }
        }
        defect
    }

    /// `½(f(z) ± f(-z))`; the output carries the requested parity.
    pub fn parity_project(&self, parity: Parity) -> Field {
        let sign = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => {
                return self.clone().with_parity(Parity::None);
            }
        };
        let g = &self.grid;
        let mut values = vec![0.0; self.values.len()];
        for (out, col) in values
            .chunks_exact_mut(g.nz)
            .zip(self.values.chunks_exact(g.nz))
        {
            for iz in 0..g.nz {
                out[iz] = 0.5 * (col[iz] + sign * col[g.mirror_z(iz)]);
            }
        }
        Field {
            grid: g.clone(),
            values,
            parity,
        }
    }

    /// Forward transform (divides by the sample count).
    pub fn forward(&self) -> SpectralField {
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.grid.plans().process3(&mut data, Direction::Forward);
        let scale = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        SpectralField {
            grid: self.grid.clone(),
            coeffs: data,
            parity: self.parity,
        }
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.check(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        let parity = if self.parity == other.parity {
            self.parity
        } else {
            Parity::None
        };
        Ok(Field {
            grid: self.grid.clone(),
            values,
            parity,
        })
    }

    pub fn scaled(&self, factor: f64) -> Field {
        Field {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
            parity: self.parity,
        }
    }
}

/// Forward transforms of two real fields sharing one complex FFT.
pub fn forward_pair(a: &Field, b: &Field) -> Result<(SpectralField, SpectralField)> {
    a.grid.check(&b.grid)?;
    let grid = &a.grid;
    let mut data: Vec<Complex64> = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect();
    grid.plans().process3(&mut data, Direction::Forward);
    let scale = 0.5 / grid.len() as f64;
    let neg = grid.neg();
    let mut ca = Vec::with_capacity(data.len());
    let mut cb = Vec::with_capacity(data.len());
    for (i, z) in data.iter().enumerate() {
        let zm = data[neg[i]].conj();
        ca.push((z + zm) * scale);
        // (z - zm) / (2i)
        let d = (z - zm) * scale;
        cb.push(Complex64::new(d.im, -d.re));
    }
    Ok((
        SpectralField {
            grid: grid.clone(),
            coeffs: ca,
            parity: a.parity,
        },
        SpectralField {
            grid: grid.clone(),
            coeffs: cb,
            parity: b.parity,
        },
    ))
}

/// Inverse transforms of two Hermitian spectra sharing one complex FFT.
pub fn inverse_pair(a: &SpectralField, b: &SpectralField) -> Result<(Field, Field)> {
    a.grid.check(&b.grid)?;
    let grid = &a.grid;
    let mut data: Vec<Complex64> = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(ca, cb)| ca + Complex64::new(-cb.im, cb.re))
        .collect();
    grid.plans().process3(&mut data, Direction::Inverse);
    let va = data.iter().map(|c| c.re).collect();
    let vb = data.iter().map(|c| c.im).collect();
    Ok((
        Field {
            grid: grid.clone(),
            values: va,
            parity: a.parity,
        },
        Field {
            grid: grid.clone(),
            values: vb,
            parity: b.parity,
        },
    ))
}

/// Inverse-transforms a batch of spectra, two per FFT.
pub fn inverse_many(spectra: &[&SpectralField]) -> Result<Vec<Field>> {
    let mut out = Vec::with_capacity(spectra.len());
    for chunk in spectra.chunks(2) {
        match chunk {
            [a, b] => {
                let (fa, fb) = inverse_pair(a, b)?;
                out.push(fa);
                out.push(fb);
            }
            [a] => out.push(a.inverse()),
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// Forward-transforms a batch of fields, two per FFT.
pub fn forward_many(fields: &[&Field]) -> Result<Vec<SpectralField>> {
    let mut out = Vec::with_capacity(fields.len());
    for chunk in fields.chunks(2) {
        match chunk {
            [a, b] => {
                let (sa, sb) = forward_pair(a, b)?;
                out.push(sa);
                out.push(sb);
            }
            [a] => out.push(a.forward()),
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// Fourier coefficients of a real field.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl SpectralField {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
            parity,
        })
    }

    pub fn zeros(grid: &Grid, parity: Parity) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
            parity,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
    pub fn parity(&self) -> Parity {
        self.parity
    }
    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    pub fn coeff(&self, ix: usize, iy: usize, iz: usize) -> Complex64 {
        self.coeffs[self.grid.index(ix, iy, iz)]
    }

    /// Mean over Ω (the zero mode).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Inverse transform; the imaginary residue of a Hermitian spectrum is dropped.
    pub fn inverse(&self) -> Field {
        let mut data = self.coeffs.clone();
        self.grid.plans().process3(&mut data, Direction::Inverse);
        Field {
            grid: self.grid.clone(),
            values: data.iter().map(|c| c.re).collect(),
            parity: self.parity,
        }
    }

    /// Largest deviation from `c(-k) = conj(c(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let neg = self.grid.neg();
        self.coeffs
            .iter()
            .enumerate()
            .fold(0.0, |m, (i, c)| m.max((c - self.coeffs[neg[i]].conj()).norm()))
    }

    /// Multiplies every mode by `(i k)^order` along `axis`. Odd orders zero the
    /// Nyquist mode of that axis.
    pub fn derivative(&self, axis: Axis, order: u32) -> Result<SpectralField> {
        if !(1..=2).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "derivative order {order} (expected 1 or 2)"
            )));
        }
        let g = &self.grid;
        let k = g.wavenumbers(axis);
        let n = g.n_along(axis);
        let mut coeffs = self.coeffs.clone();
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                let base = g.index(ix, iy, 0);
                for iz in 0..g.nz {
                    let i = match axis {
                        Axis::X => ix,
                        Axis::Y => iy,
                        Axis::Z => iz,
                    };
                    let c = &mut coeffs[base + iz];
                    if order == 1 {
                        *c = if i == n / 2 {
                            Complex64::default()
                        } else {
                            Complex64::new(-k[i] * c.im, k[i] * c.re)
                        };
                    } else {
                        *c *= -k[i] * k[i];
                    }
                }
            }
        }
        let parity = if axis == Axis::Z && order == 1 {
            self.parity.flip()
        } else {
            self.parity
        };
        Ok(SpectralField {
            grid: g.clone(),
            coeffs,
            parity,
        })
    }

    /// Horizontal Laplacian `∂xx + ∂yy`.
    pub fn laplacian_h(&self) -> SpectralField {
        let g = &self.grid;
        let kx = g.wavenumbers(Axis::X);
        let ky = g.wavenumbers(Axis::Y);
        let mut out = self.clone();
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                let f = -(kx[ix] * kx[ix] + ky[iy] * ky[iy]);
                let base = g.index(ix, iy, 0);
                out.coeffs[base..base + g.nz]
                    .iter_mut()
                    .for_each(|c| *c *= f);
            }
        }
        out
    }

    /// Full Laplacian.
    pub fn laplacian(&self) -> SpectralField {
        let mut out = self.clone();
        for (c, k2) in out.coeffs.iter_mut().zip(self.grid.k2()) {
            *c *= -k2;
        }
        out
    }

    /// 2/3-rule truncation: modes with `3|m| >= n` on any axis are zeroed.
    pub fn dealias(&self) -> SpectralField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        for (c, &keep) in self.coeffs.iter_mut().zip(self.grid.keep()) {
            if !keep {
                *c = Complex64::default();
            }
        }
    }

    /// True when every coefficient outside the 2/3 band is exactly zero.
    pub fn is_band_limited(&self) -> bool {
        self.coeffs
            .iter()
            .zip(self.grid.keep())
            .all(|(c, &keep)| keep || (c.re == 0.0 && c.im == 0.0))
    }

    /// Spectral counterpart of [`Field::parity_project`]: mirrors `m ↦ -m` in z.
    pub fn parity_project(&self, parity: Parity) -> SpectralField {
        let mut out = self.clone();
        out.parity_project_in_place(parity);
        out
    }

    pub fn parity_project_in_place(&mut self, parity: Parity) {
        let sign = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => {
                self.parity = Parity::None;
                return;
            }
        };
        let nz = self.grid.nz;
        for col in self.coeffs.chunks_exact_mut(nz) {
            // m = 0 and m = nz/2 are their own mirrors
            for iz in [0, nz / 2] {
                col[iz] = 0.5 * (col[iz] + sign * col[iz]);
            }
            for iz in 1..nz / 2 {
                let jz = nz - iz;
                let a = col[iz];
                let b = col[jz];
                col[iz] = 0.5 * (a + sign * b);
                col[jz] = 0.5 * (b + sign * a);
            }
        }
        self.parity = parity;
    }

    /// Largest coefficient-space parity violation `max |c(m) ∓ c(-m)|`.
    pub fn parity_defect(&self) -> f64 {
        let sign = match self.parity {
            Parity::Even => -1.0,
            Parity::Odd => 1.0,
            Parity::None => return 0.0,
        };
        let nz = self.grid.nz;
        let mut defect: f64 = 0.0;
        for col in self.coeffs.chunks_exact(nz) {
            for iz in 0..nz {
                defect = defect.max((col[iz] + sign * col[(nz - iz) % nz]).norm());
            }
        }
        defect
    }

    /// `∫_Ω f g` via Parseval.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.grid.check(&other.grid)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum();
        Ok(VOLUME * s)
    }

    /// `‖f‖₂²` via Parseval.
    pub fn norm_l2_sq(&self) -> f64 {
        VOLUME * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        self.norm_l2_sq().sqrt()
    }

    /// `‖∇f‖₂²` via Parseval.
    pub fn grad_norm_sq(&self) -> f64 {
        VOLUME
            * self
                .coeffs
                .iter()
                .zip(self.grid.k2())
                .map(|(c, k2)| k2 * c.norm_sqr())
                .sum::<f64>()
    }

    /// `Σ_ij ‖∂i∂j f‖₂² = Σ |k|⁴ |c|²` scaled by |Ω|.
    pub fn hessian_norm_sq(&self) -> f64 {
        VOLUME
            * self
                .coeffs
                .iter()
                .zip(self.grid.k2())
                .map(|(c, k2)| k2 * k2 * c.norm_sqr())
                .sum::<f64>()
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// `self += a · x`.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) -> Result<()> {
        self.grid.check(&x.grid)?;
        for (c, d) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += d * a;
        }
        if self.parity != x.parity {
            self.parity = Parity::None;
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let mut out = self.clone();
        out.scale_in_place(factor);
        out
    }

    pub fn scale_in_place(&mut self, factor: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= factor);
    }

    /// Multiplies each coefficient by a real per-mode factor.
    pub(crate) fn apply_multiplier(&mut self, factors: &[f64]) {
        for (c, f) in self.coeffs.iter_mut().zip(factors) {
            *c *= *f;
        }
    }

    /// Vertical mean `½∫_{-1}^{1} f dz` as a horizontal spectrum (the m = 0 plane).
    pub fn vertical_mean(&self) -> SurfaceSpectrum {
        let nz = self.grid.nz;
        SurfaceSpectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().step_by(nz).copied().collect(),
        }
    }
}

/// Real samples of a z-independent field on the horizontal torus, `[x][y]` order.
#[derive(Clone, Debug)]
pub struct SurfaceField {
    grid: Grid,
    values: Vec<f64>,
}

impl SurfaceField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.surface_len() {
            return Err(Error::DimensionMismatch {
                expected: grid.surface_len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.surface_len()],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.surface_len());
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                values.push(f(grid.x(ix), grid.y(iy)));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn forward(&self) -> SurfaceSpectrum {
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.grid.plans().process2(&mut data, Direction::Forward);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        SurfaceSpectrum {
            grid: self.grid.clone(),
            coeffs: data,
        }
    }

    /// z-uniform extension onto the full grid.
    pub fn extend_z(&self) -> Field {
        let nz = self.grid.nz;
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, nz))
            .collect();
        Field {
            grid: self.grid.clone(),
            values,
            parity: Parity::Even,
        }
    }
}

/// Fourier coefficients of a z-independent field, `[kx][ky]` order.
#[derive(Clone, Debug)]
pub struct SurfaceSpectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SurfaceSpectrum {
    pub fn new(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.surface_len() {
            return Err(Error::DimensionMismatch {
                expected: grid.surface_len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.surface_len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn inverse(&self) -> SurfaceField {
        let mut data = self.coeffs.clone();
        self.grid.plans().process2(&mut data, Direction::Inverse);
        SurfaceField {
            grid: self.grid.clone(),
            values: data.iter().map(|c| c.re).collect(),
        }
    }

    /// Horizontal derivative `∂x` or `∂y` (Nyquist zeroed).
    pub fn derivative(&self, axis: Axis) -> Result<SurfaceSpectrum> {
        if axis == Axis::Z {
            return Err(Error::InvalidParameter(
                "surface fields have no z-derivative".into(),
            ));
        }
        let g = &self.grid;
        let k = g.wavenumbers(axis);
        let n = g.n_along(axis);
        let mut out = self.clone();
        for ix in 0..g.nx {
            for iy in 0..g.ny {
                let i = if axis == Axis::X { ix } else { iy };
                let c = &mut out.coeffs[ix * g.ny + iy];
                *c = if i == n / 2 {
                    Complex64::default()
                } else {
                    Complex64::new(-k[i] * c.im, k[i] * c.re)
                };
            }
        }
        Ok(out)
    }

    /// Places the spectrum in the m = 0 plane of a 3D spectrum (z-uniform field).
    pub fn extend_z(&self) -> SpectralField {
        let nz = self.grid.nz;
        let mut out = SpectralField::zeros(&self.grid, Parity::Even);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[i * nz] = *c;
        }
        out
    }

    pub fn sub(&self, other: &SurfaceSpectrum) -> Result<SurfaceSpectrum> {
        self.grid.check(&other.grid)?;
        Ok(SurfaceSpectrum {
            grid: self.grid.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scaled(&self, factor: f64) -> SurfaceSpectrum {
        SurfaceSpectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `‖g‖²_{L²(M)}` via Parseval.
    pub fn norm_l2_sq(&self) -> f64 {
        AREA * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

/// Spectral `∇_h · (a, b)`.
pub fn divergence_h(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.derivative(Axis::X, 1)?.add(&b.derivative(Axis::Y, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(8, 6, 10).unwrap()
    }

    #[test]
    fn grid_rejects_odd_and_small() {
        assert!(Grid::new(7, 8, 8).is_err());
        assert!(Grid::new(2, 8, 8).is_err());
        assert!(Grid::new(8, 8, 8).is_ok());
    }

    #[test]
    fn wavenumbers_follow_fft_ordering() {
        let g = Grid::new(8, 8, 8).unwrap();
        let kx: Vec<i64> = (0..8).map(|i| g.mode(Axis::X, i)).collect();
        assert_eq!(kx, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!((g.wavenumber(Axis::Z, 1) - PI).abs() < 1e-15);
        assert_eq!(g.len(), 512);
    }

    #[test]
    fn mirror_maps_z_to_minus_z() {
        let g = grid();
        for iz in 0..g.nz() {
            let zm = g.z(g.mirror_z(iz));
            let z = g.z(iz);
            // equal modulo the period 2
            let d = (zm + z).rem_euclid(2.0);
            assert!(d < 1e-12 || (2.0 - d) < 1e-12, "iz={iz}");
        }
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |_, _, _| 2.5);
        let s = f.forward();
        assert!((s.coeffs()[0].re - 2.5).abs() < 1e-14);
        assert!(s.coeffs()[1..].iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn cos_x_has_two_modes() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |x, _, _| x.cos());
        let s = f.forward();
        let nonzero: Vec<usize> = (0..g.len()).filter(|&i| s.coeffs()[i].norm() > 1e-12).collect();
        assert_eq!(nonzero, vec![g.index(1, 0, 0), g.index(7, 0, 0)]);
        assert!((s.coeff(1, 0, 0).re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_cos_x() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |x, _, _| x.cos()).forward();
        let d = f.derivative(Axis::X, 1).unwrap().inverse();
        let exact = Field::from_fn(&g, Parity::Even, |x, _, _| -x.sin());
        assert!(d.sub(&exact).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn derivative_rejects_order_three() {
        let g = grid();
        assert!(SpectralField::zeros(&g, Parity::Even).derivative(Axis::X, 3).is_err());
    }

    #[test]
    fn z_derivative_flips_parity() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |_, _, z| (PI * z).cos()).forward();
        let d = f.derivative(Axis::Z, 1).unwrap();
        assert_eq!(d.parity(), Parity::Odd);
        assert!(d.inverse().parity_defect() < 1e-12);
    }

    #[test]
    fn nyquist_only_field_dealiases_to_zero() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::Even, |x, _, _| (4.0 * x).cos()).forward();
        assert!(f.max_abs_coeff() > 0.5);
        assert_eq!(f.dealias().max_abs_coeff(), 0.0);
    }

    #[test]
    fn parity_projection_splits_cos_and_sin() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::None, |_, _, z| (PI * z).cos() + (PI * z).sin());
        let even = f.parity_project(Parity::Even);
        let exact = Field::from_fn(&g, Parity::Even, |_, _, z| (PI * z).cos());
        assert!(even.sub(&exact).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn spectral_and_physical_parity_projection_agree() {
        let g = grid();
        let f = Field::from_fn(&g, Parity::None, |x, y, z| {
            (x + 2.0 * z).sin() + (y - 0.3 * z).cos() * z.exp()
        });
        for p in [Parity::Even, Parity::Odd] {
            let phys = f.parity_project(p);
            let spec = f.forward().parity_project(p).inverse();
            assert!(phys.sub(&spec).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn paired_transforms_match_single() {
        let g = grid();
        let a = Field::from_fn(&g, Parity::None, |x, y, z| (x + y).sin() * (PI * z).cos());
        let b = Field::from_fn(&g, Parity::None, |x, y, z| (2.0 * x).cos() + y.sin() * z);
        let (sa, sb) = forward_pair(&a, &b).unwrap();
        let (ra, rb) = (a.forward(), b.forward());
        for (x, y) in sa.coeffs().iter().zip(ra.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
        for (x, y) in sb.coeffs().iter().zip(rb.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
        let (ia, ib) = inverse_pair(&sa, &sb).unwrap();
        assert!(ia.sub(&a).unwrap().max_abs() < 1e-13);
        assert!(ib.sub(&b).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn field_length_is_checked() {
        let g = grid();
        assert!(matches!(
            Field::new(&g, vec![0.0; 3], Parity::None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn surface_roundtrip_and_extension() {
        let g = grid();
        let s = SurfaceField::from_fn(&g, |x, y| x.cos() + (2.0 * y).sin());
        let back = s.forward().inverse();
        for (a, b) in s.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        let ext = s.forward().extend_z().inverse();
        assert!(ext.sub(&s.extend_z()).unwrap().max_abs() < 1e-13);
    }
}
