//! Log-log least squares for finite-size scaling and leakage exponents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("abscissa and ordinate lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("point {index} is not positive ({x}, {y})")]
    NonPositive { index: usize, x: f64, y: f64 },
    #[error("abscissae are all equal")]
    Degenerate,
}

/// `C(L) = (a / L)^x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub exponent_std_error: f64,
    pub prefactor: f64,
    /// `ln C_i - fitted ln C_i`.
    pub residuals: Vec<f64>,
}

/// `sigma(gamma) = u gamma^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageFit {
    pub alpha: f64,
    pub alpha_std_error: f64,
    pub prefactor: f64,
    pub residuals: Vec<f64>,
}

struct Line {
    intercept: f64,
    slope: f64,
    slope_se: f64,
    residuals: Vec<f64>,
}

fn log_line(xs: &[f64], ys: &[f64]) -> Result<Line, FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 3 {
        return Err(FitError::TooFewPoints(xs.len()));
    }
    for (index, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(FitError::NonPositive { index, x, y });
        }
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(FitError::Degenerate);
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = lx.iter().zip(&ly).map(|(x, y)| y - (intercept + slope * x)).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let slope_se = (rss / (n - 2.0) / sxx).sqrt();
    Ok(Line { intercept, slope, slope_se, residuals })
}

/// Ordinary least squares of `ln C` on `ln L`, each size weighted equally.
pub fn fit_power_law(sizes: &[f64], means: &[f64]) -> Result<PowerLawFit, FitError> {
    let line = log_line(sizes, means)?;
    let exponent = -line.slope;
    Ok(PowerLawFit {
        exponent,
        exponent_std_error: line.slope_se,
        prefactor: (line.intercept / exponent).exp(),
        residuals: line.residuals,
    })
}

pub fn fit_leakage_exponent(gammas: &[f64], means: &[f64]) -> Result<LeakageFit, FitError> {
    let line = log_line(gammas, means)?;
    Ok(LeakageFit {
        alpha: line.slope,
        alpha_std_error: line.slope_se,
        prefactor: line.intercept.exp(),
        residuals: line.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_power_laws() {
        let ls = [8.0, 16.0, 32.0, 64.0];
        let fit = fit_power_law(&ls, &ls.map(|l| 2.0 / l)).unwrap();
        assert_relative_eq!(fit.exponent, 1.0, epsilon = 1e-12);
        assert_relative_eq!(fit.prefactor, 2.0, epsilon = 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
        let fit = fit_power_law(&ls, &ls.map(|l| (1.0 / l).powf(0.97))).unwrap();
        assert_relative_eq!(fit.exponent, 0.97, epsilon = 1e-12);
        assert_relative_eq!(fit.prefactor, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn leakage_fixture() {
        let gs = [0.01, 0.03, 0.1, 0.3, 1.0];
        let fit = fit_leakage_exponent(&gs, &gs.map(|g: f64| 3.0 * g.sqrt())).unwrap();
        assert_relative_eq!(fit.alpha, 0.5, epsilon = 1e-12);
        assert_relative_eq!(fit.prefactor, 3.0, epsilon = 1e-12);
        assert!(fit.alpha_std_error < 1e-10);
    }

    #[test]
    fn leakage_with_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let gs: Vec<f64> = (0..8).map(|i| 0.01 * 2f64.powi(i)).collect();
        let ys: Vec<f64> = gs.iter().map(|g| 3.0 * g.sqrt() * (1.0 + 0.01 * rng.random_range(-1.0..1.0))).collect();
        let fit = fit_leakage_exponent(&gs, &ys).unwrap();
        assert!((fit.alpha - 0.5).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]), Err(FitError::TooFewPoints(2)));
        assert!(matches!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 3.0]), Err(FitError::NonPositive { index: 1, .. })));
        assert_eq!(fit_leakage_exponent(&[2.0; 3], &[1.0, 2.0, 3.0]), Err(FitError::Degenerate));
    }
}
