use serde::{Deserialize, Serialize};

use super::{EnvError, Environment1D, SiteWindow};

/// Random potential `V` on an environment's window, anchored at `V_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialPath {
    window: SiteWindow,
    values: Vec<f64>,
}

impl PotentialPath {
    pub fn window(&self) -> SiteWindow {
        self.window
    }

    pub fn at(&self, x: i64) -> f64 {
        assert!(self.window.contains(x));
        self.values[(x - self.window.min) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Site of the lowest potential in `[a, b]`; ties resolve to the leftmost.
    pub fn argmin(&self, a: i64, b: i64) -> i64 {
        let mut best = a;
        for x in a..=b {
            if self.at(x) < self.at(best) {
                best = x;
            }
        }
        best
    }

    fn slice(&self, a: i64, b: i64) -> Result<&[f64], EnvError> {
        self.window.check(a)?;
        self.window.check(b)?;
        if a > b {
            return Err(EnvError::EmptyWindow { min: a, max: b });
        }
        let o = self.window.min;
        Ok(&self.values[(a - o) as usize..=(b - o) as usize])
    }
}

/// `V_0 = 0`, `V_n - V_{n-1} = ln rho_n`; sites left of 0 invert the recurrence.
pub fn random_potential(env: &Environment1D) -> PotentialPath {
    let w = env.window();
    let mut values = vec![0.0; w.len()];
    let zero = (0 - w.min) as usize;
    for x in 1..=w.max {
        let i = (x - w.min) as usize;
        values[i] = values[i - 1] + env.ln_rho(x);
    }
    for x in (w.min + 1..=0).rev() {
        let i = (x - w.min) as usize;
        values[i - 1] = values[i] - env.ln_rho(x);
    }
    debug_assert_eq!(values[zero], 0.0);
    PotentialPath { window: w, values }
}

/// `max_{a <= i <= j <= b} (V_i - V_j)`: the deepest drop from a left peak to a
/// right valley.
pub fn barrier_height(pot: &PotentialPath, a: i64, b: i64) -> Result<f64, EnvError> {
    let v = pot.slice(a, b)?;
    let mut peak = f64::NEG_INFINITY;
    let mut best = 0.0f64;
    for &vj in v {
        peak = peak.max(vj);
        best = best.max(peak - vj);
    }
    Ok(best)
}

/// `max_{a <= i <= j <= b} (V_j - V_i)`: the highest climb from a left valley to a
/// right peak (the transposed orientation of [`barrier_height`]).
pub fn climb_height(pot: &PotentialPath, a: i64, b: i64) -> Result<f64, EnvError> {
    let v = pot.slice(a, b)?;
    let mut valley = f64::INFINITY;
    let mut best = 0.0f64;
    for &vj in v {
        valley = valley.min(vj);
        best = best.max(vj - valley);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sample_environment, EnvironmentLaw};

    fn path(values: &[f64]) -> PotentialPath {
        PotentialPath {
            window: SiteWindow::new(0, values.len() as i64 - 1).unwrap(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn flat_potential_for_symmetric_walk() {
        let law = EnvironmentLaw::deterministic(0.5).unwrap();
        let env = sample_environment(&law, SiteWindow::new(-3, 3).unwrap(), 0).unwrap();
        assert!(random_potential(&env).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_slope() {
        let law = EnvironmentLaw::deterministic(0.3).unwrap();
        let env = sample_environment(&law, SiteWindow::new(0, 3).unwrap(), 0).unwrap();
        let v = random_potential(&env);
        let l = (7.0f64 / 3.0).ln();
        for (n, &vn) in v.values().iter().enumerate() {
            assert!((vn - n as f64 * l).abs() < 1e-12);
        }
        assert!((v.at(3) - 2.5419).abs() < 1e-4);
    }

    #[test]
    fn negative_sites_invert_recurrence() {
        let law = EnvironmentLaw::finite(vec![(0.8, 0.5), (0.3, 0.5)]).unwrap();
        let env = sample_environment(&law, SiteWindow::new(-20, 20).unwrap(), 3).unwrap();
        let v = random_potential(&env);
        assert_eq!(v.at(0), 0.0);
        for n in -19..=20 {
            assert!((v.at(n) - v.at(n - 1) - env.ln_rho(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn barrier_examples() {
        assert_eq!(barrier_height(&path(&[0.0; 5]), 0, 4).unwrap(), 0.0);
        assert_eq!(barrier_height(&path(&[0.0, 0.8473, 1.6946]), 0, 2).unwrap(), 0.0);
        assert_eq!(barrier_height(&path(&[0.0, 1.0, -1.0, 2.0]), 0, 3).unwrap(), 2.0);
        assert_eq!(climb_height(&path(&[0.0, 1.0, -1.0, 2.0]), 0, 3).unwrap(), 3.0);
        assert!(barrier_height(&path(&[0.0, 1.0]), 0, 5).is_err());
    }
}
