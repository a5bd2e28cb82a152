//! Log-log least-squares rate fits.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    /// `log(C)` in `error ≈ C τ^slope`.
    pub intercept: f64,
    /// Largest `|log e_i − (intercept + slope · log τ_i)|`.
    pub max_residual: f64,
}

impl RateFit {
    pub fn predict(&self, tau: f64) -> f64 {
        (self.intercept + self.slope * tau.ln()).exp()
    }
}

/// Fits `log e = intercept + slope · log τ` through at least three positive points.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    if let Some(&(t, e)) = points.iter().find(|(t, e)| !(*t > 0.0 && *e > 0.0 && t.is_finite() && e.is_finite())) {
        return Err(Error::Fit(format!("nonpositive point ({t}, {e})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 1e-24 {
        return Err(Error::Fit("all abscissae are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        slope,
        intercept,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAUS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

    #[test]
    fn exact_power_laws() {
        let lin: Vec<_> = TAUS.iter().map(|&t| (t, 0.3 * t)).collect();
        let f = fit_rate(&lin).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12);
        assert!((f.intercept - 0.3f64.ln()).abs() < 1e-12);
        assert!(f.max_residual < 1e-12);
        assert!((f.predict(0.5) - 0.15).abs() < 1e-12);
        let quad: Vec<_> = TAUS.iter().map(|&t| (t, 2.0 * t * t)).collect();
        assert!((fit_rate(&quad).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_line() {
        let noise = [1.01, 0.99, 1.008, 0.993, 1.0];
        let pts: Vec<_> = [0.4, 0.2, 0.1, 0.05, 0.025]
            .iter()
            .zip(noise)
            .map(|(&t, n)| (t, 0.7 * t * n))
            .collect();
        let s = fit_rate(&pts).unwrap().slope;
        assert!((0.97..=1.03).contains(&s), "{s}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[(0.1, 1.0), (0.2, 2.0)]).is_err());
        assert!(fit_rate(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_err());
        assert!(fit_rate(&[(-0.1, 1.0), (0.2, 1.0), (0.3, 1.0)]).is_err());
        assert!(fit_rate(&[(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]).is_err());
    }
}
