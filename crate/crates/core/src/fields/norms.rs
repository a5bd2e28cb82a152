//! Lebesgue and Sobolev norms, and the Boussinesq-minus-PE difference norms.

use crate::error::{Error, Result};
use crate::fields::state::{BoussinesqState, PEState};
use crate::spectral::{Field, SpectralField, VOLUME};

/// `‖f‖_p` for `p ∈ {2, 4}` by uniform-grid quadrature.
pub fn lebesgue_norm(f: &Field, p: u32) -> Result<f64> {
    let cell = VOLUME / f.values().len() as f64;
    match p {
        2 => Ok((cell * f.values().iter().map(|v| v * v).sum::<f64>()).sqrt()),
        4 => Ok((cell * f.values().iter().map(|v| (v * v) * (v * v)).sum::<f64>()).powf(0.25)),
        other => Err(Error::InvalidParameter(format!("L^{other} norm is not supported"))),
    }
}

/// `‖∇f‖₂` via spectral derivatives and Parseval.
pub fn h1_seminorm(f: &SpectralField) -> f64 {
    f.grad_norm_sq().sqrt()
}

/// `(‖f‖₂² + ‖∇f‖₂²)^{1/2}`.
pub fn h1_norm(f: &SpectralField) -> f64 {
    (f.norm_l2_sq() + f.grad_norm_sq()).sqrt()
}

/// Norms of `(V_τ, τW_τ, Γ_τ)` at one time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DifferenceSample {
    pub time: f64,
    /// `‖(V, τW, Γ)‖₂`
    pub l2: f64,
    /// `‖∇(V, τW, Γ)‖₂`
    pub grad_l2: f64,
    /// `‖(V, τW, Γ)‖_{H¹}`
    pub h1: f64,
    /// `‖∇(V, τW, Γ)‖_{H¹}`
    pub grad_h1: f64,
}

/// Difference norms between a Boussinesq state and a PE state at the same time.
pub fn difference_norms(b: &BoussinesqState, p: &PEState) -> Result<DifferenceSample> {
    if b.grid() != p.grid() {
        return Err(Error::GridMismatch);
    }
    if (b.time - p.time).abs() > 1e-12 * b.time.abs().max(1.0) {
        return Err(Error::TimeMismatch {
            left: b.time,
            right: p.time,
        });
    }
    let t2 = b.tau * b.tau;
    let diffs = [
        (b.v[0].sub(&p.v[0])?, 1.0),
        (b.v[1].sub(&p.v[1])?, 1.0),
        (b.w.sub(&p.w)?, t2),
        (b.rho.sub(&p.rho)?, 1.0),
    ];
    let (mut l2, mut grad, mut hess) = (0.0, 0.0, 0.0);
    for (d, weight) in &diffs {
        l2 += weight * d.norm_l2_sq();
        grad += weight * d.grad_norm_sq();
        hess += weight * d.hessian_norm_sq();
    }
    Ok(DifferenceSample {
        time: b.time,
        l2: l2.sqrt(),
        grad_l2: grad.sqrt(),
        h1: (l2 + grad).sqrt(),
        grad_h1: (grad + hess).sqrt(),
    })
}

/// Time series of difference norms and their sup / time-integral aggregates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DifferenceNorms {
    pub series: Vec<DifferenceSample>,
}

fn trapezoid(series: &[DifferenceSample], f: impl Fn(&DifferenceSample) -> f64) -> f64 {
    series
        .windows(2)
        .map(|w| 0.5 * (w[1].time - w[0].time) * (f(&w[0]) + f(&w[1])))
        .sum()
}

impl DifferenceNorms {
    pub fn push(&mut self, sample: DifferenceSample) {
        self.series.push(sample);
    }

    /// `sup_t ‖(V, τW, Γ)‖₂` over recorded times.
    pub fn l2_sup(&self) -> f64 {
        self.series.iter().fold(0.0, |m, s| m.max(s.l2))
    }

    /// `∫₀ᵀ ‖∇(V, τW, Γ)‖₂² dt` (trapezoidal over records).
    pub fn grad_l2_integral(&self) -> f64 {
        trapezoid(&self.series, |s| s.grad_l2 * s.grad_l2)
    }

    pub fn h1_sup(&self) -> f64 {
        self.series.iter().fold(0.0, |m, s| m.max(s.h1))
    }

    /// `∫₀ᵀ ‖∇(V, τW, Γ)‖²_{H¹} dt`.
    pub fn grad_h1_integral(&self) -> f64 {
        trapezoid(&self.series, |s| s.grad_h1 * s.grad_h1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, Parity};
    use std::f64::consts::PI;

    #[test]
    fn l2_of_single_mode() {
        let g = Grid::new(8, 8, 8).unwrap();
        let f = Field::from_fn(&g, Parity::Even, |x, _, z| x.sin() * (PI * z).cos());
        let n = lebesgue_norm(&f, 2).unwrap();
        assert!((n - PI * 2f64.sqrt()).abs() < 1e-12);
        assert!((n - 4.442883).abs() < 1e-6);
        assert!((f.forward().norm_l2() - n).abs() < 1e-12);
    }

    #[test]
    fn l2_of_constant() {
        let g = Grid::new(8, 8, 8).unwrap();
        let f = Field::from_fn(&g, Parity::Even, |_, _, _| -3.0);
        let n = lebesgue_norm(&f, 2).unwrap();
        assert!((n - 3.0 * (8.0 * PI * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn l4_of_sine() {
        let g = Grid::new(8, 8, 8).unwrap();
        let f = Field::from_fn(&g, Parity::Even, |x, _, _| x.sin());
        let n = lebesgue_norm(&f, 4).unwrap();
        assert!((n - (8.0 * PI * PI * 3.0 / 8.0).powf(0.25)).abs() < 1e-12);
        assert!(lebesgue_norm(&f, 3).is_err());
    }

    #[test]
    fn h1_of_single_mode() {
        let g = Grid::new(8, 8, 8).unwrap();
        let f = Field::from_fn(&g, Parity::Even, |x, _, z| x.sin() * (PI * z).cos()).forward();
        // |k|² = 1 + π²
        let l2 = PI * 2f64.sqrt();
        assert!((h1_seminorm(&f) - l2 * (1.0 + PI * PI).sqrt()).abs() < 1e-12);
        assert!((h1_norm(&f) - l2 * (2.0 + PI * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn aggregates() {
        let mut d = DifferenceNorms::default();
        for (i, v) in [0.0, 2.0, 1.0].iter().enumerate() {
            d.push(DifferenceSample {
                time: i as f64 * 0.5,
                l2: *v,
                grad_l2: *v,
                h1: 2.0 * v,
                grad_h1: *v,
            });
        }
        assert_eq!(d.l2_sup(), 2.0);
        assert_eq!(d.h1_sup(), 4.0);
        // 0.25 * (0 + 4) + 0.25 * (4 + 1)
        assert!((d.grad_l2_integral() - 2.25).abs() < 1e-15);
    }
}
