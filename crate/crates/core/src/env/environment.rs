use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{EnvError, EnvironmentLaw};
use crate::rng::{self, bernoulli_threshold};

/// Inclusive integer interval of sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteWindow {
    pub min: i64,
    pub max: i64,
}

impl SiteWindow {
    pub fn new(min: i64, max: i64) -> Result<Self, EnvError> {
        if min > max {
            return Err(EnvError::EmptyWindow { min, max });
        }
        Ok(SiteWindow { min, max })
    }

    /// `[-radius, radius]`.
    pub fn symmetric(radius: u64) -> Self {
        SiteWindow { min: -(radius as i64), max: radius as i64 }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.min <= x && x <= self.max
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }

    pub(crate) fn check(&self, x: i64) -> Result<(), EnvError> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(EnvError::OutsideWindow { site: x, min: self.min, max: self.max })
        }
    }
}

/// One realized environment: `p_x` for every site of a window containing 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment1D {
    window: SiteWindow,
    p: Vec<f64>,
    thresholds: Vec<u64>,
    seed: Option<u64>,
    law: Option<EnvironmentLaw>,
}

impl Environment1D {
    /// Environment from explicit values, `p[i]` belonging to site `window.min + i`.
    pub fn from_values(window: SiteWindow, p: Vec<f64>) -> Result<Self, EnvError> {
        if !window.contains(0) {
            return Err(EnvError::WindowMissesOrigin { min: window.min, max: window.max });
        }
        assert_eq!(p.len(), window.len(), "one probability per window site");
        for (x, &px) in window.sites().zip(&p) {
            if !(px > 0.0 && px < 1.0) {
                return Err(EnvError::InvalidProbability { site: x, p: px });
            }
        }
        let thresholds = p.iter().map(|&px| bernoulli_threshold(px)).collect();
        Ok(Environment1D { window, p, thresholds, seed: None, law: None })
    }

    pub fn from_fn(window: SiteWindow, f: impl Fn(i64) -> f64) -> Result<Self, EnvError> {
        Self::from_values(window, window.sites().map(f).collect())
    }

    pub fn window(&self) -> SiteWindow {
        self.window
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn law(&self) -> Option<&EnvironmentLaw> {
        self.law.as_ref()
    }

    #[inline]
    pub(crate) fn index(&self, x: i64) -> usize {
        (x - self.window.min) as usize
    }

    /// Rightward jump probability at `x`. Panics outside the window.
    pub fn p(&self, x: i64) -> f64 {
        assert!(self.window.contains(x), "site {x} outside {:?}", self.window);
        self.p[self.index(x)]
    }

    pub fn q(&self, x: i64) -> f64 {
        1.0 - self.p(x)
    }

    /// `rho_x = q_x / p_x`.
    pub fn rho(&self, x: i64) -> f64 {
        self.q(x) / self.p(x)
    }

    pub fn ln_rho(&self, x: i64) -> f64 {
        self.rho(x).ln()
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub(crate) fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }
}

/// Position of site `x` in the per-seed variate sequence: 0, -1, 1, -2, 2, ...
#[inline]
fn zigzag(x: i64) -> u64 {
    if x >= 0 {
        2 * x as u64
    } else {
        2 * (-x) as u64 - 1
    }
}

/// Samples `p_x` independently from `law` for every site of `window`.
///
/// Site `x` always consumes the `zigzag(x)`-th variate of the seed's stream, so
/// widening the window keeps the values already drawn on the narrower one.
pub fn sample_environment(
    law: &EnvironmentLaw,
    window: SiteWindow,
    seed: u64,
) -> Result<Environment1D, EnvError> {
    law.validate()?;
    if !window.contains(0) {
        return Err(EnvError::WindowMissesOrigin { min: window.min, max: window.max });
    }
    let reach = zigzag(window.min).max(zigzag(window.max)) as usize + 1;
    let mut stream = rng::rng_from_seed(seed);
    let variates: Vec<u64> = (0..reach).map(|_| stream.next_u64()).collect();
    let p: Vec<f64> = window
        .sites()
        .map(|x| law.quantile(rng::unit_f64(variates[zigzag(x) as usize])))
        .collect();
    let mut env = Environment1D::from_values(window, p)?;
    env.seed = Some(seed);
    env.law = Some(law.clone());
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_law_fills_window() {
        let law = EnvironmentLaw::deterministic(0.7).unwrap();
        let env = sample_environment(&law, SiteWindow::new(-2, 2).unwrap(), 99).unwrap();
        assert_eq!(env.values(), &[0.7; 5]);
    }

    #[test]
    fn window_errors() {
        let law = EnvironmentLaw::deterministic(0.5).unwrap();
        assert!(matches!(SiteWindow::new(3, 1), Err(EnvError::EmptyWindow { .. })));
        let w = SiteWindow::new(1, 5).unwrap();
        assert!(matches!(sample_environment(&law, w, 0), Err(EnvError::WindowMissesOrigin { .. })));
    }

    #[test]
    fn two_point_law_of_large_numbers() {
        let law = EnvironmentLaw::finite(vec![(0.8, 0.5), (0.3, 0.5)]).unwrap();
        let env = sample_environment(&law, SiteWindow::new(0, 100_000).unwrap(), 2024).unwrap();
        let mean = env.values().iter().sum::<f64>() / env.values().len() as f64;
        assert!((mean - 0.55).abs() < 0.01, "mean {mean}");
        assert!(env.values().iter().all(|&p| p == 0.8 || p == 0.3));
    }

    #[test]
    fn uniform_law_of_large_numbers() {
        let law = EnvironmentLaw::uniform(0.2, 0.8).unwrap();
        let env = sample_environment(&law, SiteWindow::new(0, 100_000).unwrap(), 5).unwrap();
        let mean = env.values().iter().sum::<f64>() / env.values().len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
        assert!(env.values().iter().all(|&p| (0.2..=0.8).contains(&p)));
    }

    #[test]
    fn regeneration_and_window_nesting() {
        let law = EnvironmentLaw::uniform(0.1, 0.9).unwrap();
        let small = sample_environment(&law, SiteWindow::new(-50, 50).unwrap(), 11).unwrap();
        let again = sample_environment(&law, SiteWindow::new(-50, 50).unwrap(), 11).unwrap();
        let wide = sample_environment(&law, SiteWindow::new(-400, 300).unwrap(), 11).unwrap();
        assert_eq!(small, again);
        for x in -50..=50 {
            assert_eq!(small.p(x), wide.p(x));
        }
        let other = sample_environment(&law, SiteWindow::new(-50, 50).unwrap(), 12).unwrap();
        assert_ne!(small.values(), other.values());
    }
}
