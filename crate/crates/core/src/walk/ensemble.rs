use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::Walker;
use super::{window_for_law, WalkError};
use crate::env::{
    classify_solomon, critical_exponent, random_potential, sample_environment, sigma_squared_logrho,
    Environment1D, EnvironmentLaw, Regime,
};
use crate::rng::{derive_seed, rng_from_seed, Stream};
use crate::stats::{median, Estimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EnvMode {
    /// A fresh environment for every walk.
    Annealed,
    /// One environment shared by all walks.
    Quenched { env_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointEnsemble {
    pub n_steps: u64,
    pub mode: EnvMode,
    pub endpoints: Vec<i64>,
}

impl EndpointEnsemble {
    /// `X_n / n` across walks.
    pub fn velocity(&self) -> Estimate {
        let n = self.n_steps.max(1) as f64;
        let v: Vec<f64> = self.endpoints.iter().map(|&x| x as f64 / n).collect();
        Estimate::from_samples(&v)
    }

    pub fn fraction_positive(&self) -> Estimate {
        let pos = self.endpoints.iter().filter(|&&x| x > 0).count() as u64;
        Estimate::from_bernoulli(pos, self.endpoints.len() as u64)
    }

    pub fn median_abs(&self) -> f64 {
        median(&self.endpoints.iter().map(|&x| x.abs() as f64).collect::<Vec<_>>())
    }

    pub fn median(&self) -> f64 {
        median(&self.endpoints.iter().map(|&x| x as f64).collect::<Vec<_>>())
    }
}

fn endpoint(env: &Environment1D, n: u64, walk_seed: u64) -> Result<i64, WalkError> {
    let mut walker = Walker::new(env, 0, rng_from_seed(walk_seed))?;
    walker.run(n).map_err(|step| WalkError::WindowExit { window: env.window(), step })?;
    Ok(walker.position())
}

/// Endpoints `X_n` of `n_walks` walks from 0. Walk `i` uses the walk seed
/// `derive_seed(seed, Walk, i)` and, when annealed, the environment seed
/// `derive_seed(seed, Environment, i)`.
pub fn endpoint_ensemble(
    law: &EnvironmentLaw,
    n_steps: u64,
    n_walks: u64,
    seed: u64,
    mode: EnvMode,
) -> Result<EndpointEnsemble, WalkError> {
    if n_walks == 0 {
        return Err(WalkError::ZeroCount("n_walks"));
    }
    let window = window_for_law(law, n_steps);
    let shared = match mode {
        EnvMode::Quenched { env_seed } => Some(sample_environment(law, window, env_seed)?),
        EnvMode::Annealed => None,
    };
    let endpoints = (0..n_walks)
        .into_par_iter()
        .map(|i| {
            let walk_seed = derive_seed(seed, Stream::Walk, i);
            match &shared {
                Some(env) => endpoint(env, n_steps, walk_seed),
                None => {
                    let env = sample_environment(law, window, derive_seed(seed, Stream::Environment, i))?;
                    endpoint(&env, n_steps, walk_seed)
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EndpointEnsemble { n_steps, mode, endpoints })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KestenPoint {
    pub n: u64,
    pub k: f64,
    /// `median(X_n) / n^k`.
    pub scaled_median: f64,
    pub fraction_positive: f64,
}

/// `median(X_n) / n^k` at each horizon for a zero-speed transient law,
/// annealed, with the same master seed at every horizon.
pub fn kesten_scaling(
    law: &EnvironmentLaw,
    horizons: &[u64],
    n_walks: u64,
    seed: u64,
) -> Result<Vec<KestenPoint>, WalkError> {
    let k = critical_exponent(law)?;
    horizons
        .iter()
        .map(|&n| {
            let ens = endpoint_ensemble(law, n, n_walks, seed, EnvMode::Annealed)?;
            Ok(KestenPoint {
                n,
                k,
                scaled_median: ens.median() / (n as f64).powf(k),
                fraction_positive: ens.fraction_positive().mean,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinaiSample {
    pub env: u64,
    pub walk: u64,
    pub position: i64,
    /// `sigma^2 X_n / ln^2 n`.
    pub rescaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinaiEnsemble {
    pub horizon: u64,
    /// `E ln^2 rho_0`.
    pub sigma_squared: f64,
    pub samples: Vec<SinaiSample>,
    /// Median of `rescaled` over the walks of each environment.
    pub env_medians: Vec<f64>,
    pub env_seeds: Vec<u64>,
}

impl SinaiEnsemble {
    pub fn median_abs_position(&self) -> f64 {
        median(&self.samples.iter().map(|s| s.position.abs() as f64).collect::<Vec<_>>())
    }

    pub fn median_abs_rescaled(&self) -> f64 {
        median(&self.samples.iter().map(|s| s.rescaled.abs()).collect::<Vec<_>>())
    }
}

/// `n_env` environments with `n_walks_per_env` walks each. Environment `e` has
/// seed `derive_seed(seed, Environment, e)`; its walk `w` has seed
/// `derive_seed(seed, Walk, e * n_walks_per_env + w)`.
pub fn sinai_rescaled_ensemble(
    law: &EnvironmentLaw,
    n: u64,
    n_env: u64,
    n_walks_per_env: u64,
    seed: u64,
) -> Result<SinaiEnsemble, WalkError> {
    let class = classify_solomon(law);
    if class.regime != Regime::Recurrent {
        return Err(WalkError::NotRecurrent { eta: class.eta });
    }
    let sigma_squared = sigma_squared_logrho(law);
    if sigma_squared <= 0.0 {
        return Err(WalkError::DegenerateLaw);
    }
    if n_env == 0 || n_walks_per_env == 0 {
        return Err(WalkError::ZeroCount("environments and walks"));
    }
    let window = window_for_law(law, n);
    let scale = sigma_squared / (n.max(2) as f64).ln().powi(2);
    let per_env = (0..n_env)
        .into_par_iter()
        .map(|e| {
            let env_seed = derive_seed(seed, Stream::Environment, e);
            let env = sample_environment(law, window, env_seed)?;
            let samples = (0..n_walks_per_env)
                .map(|w| {
                    let position = endpoint(&env, n, derive_seed(seed, Stream::Walk, e * n_walks_per_env + w))?;
                    Ok(SinaiSample { env: e, walk: w, position, rescaled: scale * position as f64 })
                })
                .collect::<Result<Vec<_>, WalkError>>()?;
            Ok((env_seed, samples))
        })
        .collect::<Result<Vec<_>, WalkError>>()?;
    let mut ens = SinaiEnsemble { horizon: n, sigma_squared, samples: Vec::new(), env_medians: Vec::new(), env_seeds: Vec::new() };
    for (env_seed, samples) in per_env {
        ens.env_medians.push(median(&samples.iter().map(|s| s.rescaled).collect::<Vec<_>>()));
        ens.env_seeds.push(env_seed);
        ens.samples.extend(samples);
    }
    Ok(ens)
}

/// Fraction of `n_walks` walks from 0 ending within `ln^2(n) / 4` of the
/// potential's minimiser over the range each walk visited.
pub fn localization_diagnostic(env: &Environment1D, n: u64, n_walks: u64, seed: u64) -> Result<f64, WalkError> {
    if n_walks == 0 {
        return Err(WalkError::ZeroCount("n_walks"));
    }
    let pot = random_potential(env);
    let radius = (n.max(1) as f64).ln().powi(2) / 4.0;
    let hits = (0..n_walks)
        .into_par_iter()
        .map(|i| {
            let mut walker = Walker::new(env, 0, rng_from_seed(derive_seed(seed, Stream::Walk, i)))?;
            let (mut lo, mut hi) = (0i64, 0i64);
            for t in 0..n {
                if !walker.step() {
                    return Err(WalkError::WindowExit { window: env.window(), step: t + 1 });
                }
                let x = walker.position();
                lo = lo.min(x);
                hi = hi.max(x);
            }
            let bottom = pot.argmin(lo, hi);
            Ok(((walker.position() - bottom).abs() as f64 <= radius) as u64)
        })
        .collect::<Result<Vec<_>, WalkError>>()?
        .into_iter()
        .sum::<u64>();
    Ok(hits as f64 / n_walks as f64)
}

/// Lower and upper local-time envelopes
/// `exp(ln n / (ln ln n)^(1 +- eps))` for a walk of `n` steps.
pub fn revesz_bounds(n: u64, eps: f64) -> (f64, f64) {
    let l = (n as f64).ln();
    let ll = l.ln();
    ((l / ll.powf(1.0 + eps)).exp(), (l / ll.powf(1.0 - eps)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{solomon_velocity, SiteWindow};

    #[test]
    fn ballistic_velocity() {
        let law = EnvironmentLaw::deterministic(0.7).unwrap();
        let ens = endpoint_ensemble(&law, 20_000, 100, 3, EnvMode::Annealed).unwrap();
        assert!(ens.velocity().within(solomon_velocity(&law), 4.0));
    }

    #[test]
    fn ensembles_are_reproducible() {
        let law = EnvironmentLaw::finite(vec![(0.3, 0.5), (0.7, 0.5)]).unwrap();
        let a = endpoint_ensemble(&law, 5000, 16, 11, EnvMode::Quenched { env_seed: 2 }).unwrap();
        let b = endpoint_ensemble(&law, 5000, 16, 11, EnvMode::Quenched { env_seed: 2 }).unwrap();
        assert_eq!(a, b);
        let s1 = sinai_rescaled_ensemble(&law, 2000, 4, 3, 5).unwrap();
        let s2 = sinai_rescaled_ensemble(&law, 2000, 4, 3, 5).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.samples.len(), 12);
        assert_eq!(s1.env_medians.len(), 4);
    }

    #[test]
    fn sinai_preconditions() {
        let half = EnvironmentLaw::deterministic(0.5).unwrap();
        assert_eq!(sinai_rescaled_ensemble(&half, 100, 1, 1, 0), Err(WalkError::DegenerateLaw));
        let right = EnvironmentLaw::deterministic(0.7).unwrap();
        assert!(matches!(sinai_rescaled_ensemble(&right, 100, 1, 1, 0), Err(WalkError::NotRecurrent { .. })));
    }

    #[test]
    fn localization_in_a_single_well() {
        let well = Environment1D::from_fn(SiteWindow::symmetric(2000), |x| if x < 0 { 0.8 } else { 0.2 }).unwrap();
        assert!(localization_diagnostic(&well, 100_000, 50, 1).unwrap() >= 0.9);
        let flat = Environment1D::from_fn(SiteWindow::symmetric(3000), |_| 0.5).unwrap();
        assert!(localization_diagnostic(&flat, 100_000, 200, 1).unwrap() < 0.5);
    }

    #[test]
    fn localization_at_time_zero() {
        let flat = Environment1D::from_fn(SiteWindow::symmetric(10), |_| 0.5).unwrap();
        assert_eq!(localization_diagnostic(&flat, 0, 5, 0).unwrap(), 1.0);
    }

    #[test]
    fn revesz_envelope_order() {
        let (lo, hi) = revesz_bounds(1_000_000, 0.5);
        assert!(lo < hi);
        assert!((hi - 5042.0).abs() < 5.0, "{hi}");
    }
}
