use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::Walker;
use super::WalkError;
use crate::env::{random_potential, sample_environment, Environment1D, EnvironmentLaw, SiteWindow};
use crate::network::{chain_network_from_env, solve_dirichlet, DirichletProblem, DEFAULT_TOLERANCE};
use crate::rng::{derive_seed, substream, Stream};
use crate::stats::Estimate;

const BATCH: u64 = 4096;

fn check_target(env: &Environment1D, k: i64) -> Result<(), WalkError> {
    if k < 1 {
        return Err(WalkError::BadTarget { k, reason: "k must be at least 1" });
    }
    if !env.window().contains(k) {
        return Err(WalkError::BadTarget { k, reason: "window must contain k" });
    }
    Ok(())
}

/// Monte Carlo estimate of the probability that the walk from 0 visits `k`
/// before returning to 0. A first jump to the left is a failure outright:
/// reaching `k > 0` from there means passing through 0 first.
pub fn hit_before_return_mc(env: &Environment1D, k: i64, n_trials: u64, seed: u64) -> Result<Estimate, WalkError> {
    check_target(env, k)?;
    if n_trials == 0 {
        return Err(WalkError::ZeroCount("n_trials"));
    }
    let batches = n_trials.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH.min(n_trials - b * BATCH);
            let mut walker = Walker::new(env, 0, substream(seed, Stream::Walk, b))?;
            let mut hits = 0;
            for _ in 0..count {
                walker.place(0);
                walker.step();
                loop {
                    let x = walker.position();
                    if x <= 0 {
                        break;
                    }
                    if x == k {
                        hits += 1;
                        break;
                    }
                    walker.step();
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>, WalkError>>()?
        .into_iter()
        .sum();
    Ok(Estimate::from_bernoulli(hits, n_trials))
}

/// Same probability from a Dirichlet solve on the chain `-1..=k`:
/// `p_0` times the voltage at 1 with `v_0 = 0`, `v_k = 1`.
pub fn hit_before_return_exact(env: &Environment1D, k: i64) -> Result<f64, WalkError> {
    check_target(env, k)?;
    if k == 1 {
        return Ok(env.p(0));
    }
    let chain = chain_network_from_env(env, -1, k)?;
    let prob = DirichletProblem::new(&chain.network, vec![(chain.node(0), 0.0), (chain.node(k), 1.0)])?;
    let sol = solve_dirichlet(&prob, DEFAULT_TOLERANCE)?;
    Ok(env.p(0) * sol.voltages[chain.node(1)])
}

/// `p_0 / W_k` with `W_k = 1 + exp(V_2) + ... + exp(V_{k-1})`.
pub fn deheuvels_revesz_formula(env: &Environment1D, k: i64) -> Result<f64, WalkError> {
    if k < 3 {
        return Err(WalkError::BadTarget { k, reason: "the formula needs k >= 3" });
    }
    check_target(env, k)?;
    let pot = random_potential(env);
    let w: f64 = 1.0 + (2..k).map(|j| pot.at(j).exp()).sum::<f64>();
    Ok(env.p(0) / w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eq23Row {
    pub env_index: u64,
    pub env_seed: u64,
    pub k: i64,
    pub exact: f64,
    pub mc: Estimate,
    /// `|mc - exact|` in units of the binomial standard error at `exact`.
    pub mc_z: f64,
    pub formula: f64,
    /// `(formula - exact) / exact`.
    pub formula_rel_dev: f64,
}

/// Three-way comparison (exact solve, Monte Carlo, closed formula) over
/// `n_envs` sampled environments and each target in `ks`.
pub fn eq23_harness(
    law: &EnvironmentLaw,
    ks: &[i64],
    n_envs: u64,
    n_trials: u64,
    seed: u64,
) -> Result<Vec<Eq23Row>, WalkError> {
    let k_max = ks.iter().copied().max().ok_or(WalkError::ZeroCount("targets"))?;
    let window = SiteWindow::new(-64, k_max.max(1) + 64)?;
    let nk = ks.len() as u64;
    let rows = (0..n_envs)
        .into_par_iter()
        .map(|e| {
            let env_seed = derive_seed(seed, Stream::Environment, e);
            let env = sample_environment(law, window, env_seed)?;
            ks.iter()
                .enumerate()
                .map(|(i, &k)| {
                    let exact = hit_before_return_exact(&env, k)?;
                    let mc = hit_before_return_mc(&env, k, n_trials, derive_seed(seed, Stream::Walk, e * nk + i as u64))?;
                    let se = (exact * (1.0 - exact) / n_trials as f64).sqrt();
                    let formula = deheuvels_revesz_formula(&env, k).unwrap_or(f64::NAN);
                    Ok(Eq23Row {
                        env_index: e,
                        env_seed,
                        k,
                        exact,
                        mc_z: if se > 0.0 { (mc.mean - exact).abs() / se } else { 0.0 },
                        mc,
                        formula,
                        formula_rel_dev: (formula - exact) / exact,
                    })
                })
                .collect::<Result<Vec<_>, WalkError>>()
        })
        .collect::<Result<Vec<_>, WalkError>>()?;
    Ok(rows.into_iter().flatten().collect())
}
