use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::Walker;
use super::WalkError;
use crate::env::{classify_solomon, Environment1D, Regime};
use crate::rng::{substream, Stream};
use crate::stats::Estimate;

pub const DEFAULT_EXCURSION_CAP: u64 = 100_000_000;

/// Largest admissible truncation error for [`quenched_expected_return`].
pub const RETURN_TOLERANCE: f64 = 1e-9;

const BATCH: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSample {
    /// Completed durations `T_1` for the walk started at 1 and forced to 0.
    pub durations: Vec<u64>,
    /// Excursions still running after `cap` steps; not included above.
    pub timeouts: u64,
    pub cap: u64,
}

impl ExcursionSample {
    pub fn estimate(&self) -> Estimate {
        let xs: Vec<f64> = self.durations.iter().map(|&d| d as f64).collect();
        Estimate::from_samples(&xs)
    }
}

/// Durations of `n` left excursions from 1 in a fixed environment.
pub fn left_excursion_durations(
    env: &Environment1D,
    n: u64,
    walk_seed: u64,
) -> Result<ExcursionSample, WalkError> {
    left_excursion_durations_capped(env, n, walk_seed, DEFAULT_EXCURSION_CAP)
}

pub fn left_excursion_durations_capped(
    env: &Environment1D,
    n: u64,
    walk_seed: u64,
    cap: u64,
) -> Result<ExcursionSample, WalkError> {
    if let Some(law) = env.law() {
        if classify_solomon(law).regime == Regime::TransientLeft {
            return Err(WalkError::TransientLeft);
        }
    }
    let w = env.window();
    if !w.contains(1) {
        return Err(WalkError::BadTarget { k: 1, reason: "window must contain site 1" });
    }
    let batches = n.div_ceil(BATCH);
    let parts: Vec<Result<(Vec<u64>, u64), WalkError>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH.min(n - b * BATCH);
            let mut walker = Walker::new(env, 1, substream(walk_seed, Stream::Excursion, b))?;
            let mut done = Vec::with_capacity(count as usize);
            let mut timeouts = 0;
            'excursion: for _ in 0..count {
                walker.place(0);
                let mut t = 1u64;
                while walker.position() != 1 {
                    if t >= cap {
                        timeouts += 1;
                        continue 'excursion;
                    }
                    if !walker.step() {
                        return Err(WalkError::WindowExit { window: w, step: t + 1 });
                    }
                    t += 1;
                }
                done.push(t);
            }
            Ok((done, timeouts))
        })
        .collect();
    let mut durations = Vec::with_capacity(n as usize);
    let mut timeouts = 0;
    for part in parts {
        let (d, t) = part?;
        durations.extend(d);
        timeouts += t;
    }
    Ok(ExcursionSample { durations, timeouts, cap })
}

/// Truncated `omega_x = E_omega[T_x | X_0 = x, X_1 = x - 1]` for `x` in
/// `min + 1 ..= s`, reflecting at the window's left edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnProfile {
    pub first_site: i64,
    pub omega: Vec<f64>,
    /// Expected size of the dropped tail, `P rho_min 2 / (1 - E rho)`.
    pub truncation_bound: f64,
}

impl ReturnProfile {
    pub fn at(&self, x: i64) -> f64 {
        self.omega[(x - self.first_site) as usize]
    }
}

/// `omega_{x+1} = 2 + rho_x omega_x`, started from `omega = 2` one site right of
/// the window's left edge.
pub fn quenched_return_profile(env: &Environment1D, s: i64) -> Result<ReturnProfile, WalkError> {
    let w = env.window();
    if s <= w.min || s > w.max {
        return Err(WalkError::BadTarget { k: s, reason: "need window.min < s <= window.max" });
    }
    let mean_rho = match env.law() {
        Some(law) => law.mean_rho(),
        None => env.values().iter().map(|p| (1.0 - p) / p).sum::<f64>() / w.len() as f64,
    };
    let mut omega = Vec::with_capacity((s - w.min) as usize);
    let mut cur = 2.0;
    omega.push(cur);
    let mut log_prod = 0.0;
    for x in w.min + 1..s {
        cur = 2.0 + env.rho(x) * cur;
        omega.push(cur);
        log_prod += env.ln_rho(x);
    }
    let truncation_bound = if mean_rho < 1.0 {
        (log_prod + env.ln_rho(w.min)).exp() * 2.0 / (1.0 - mean_rho)
    } else {
        f64::INFINITY
    };
    Ok(ReturnProfile { first_site: w.min + 1, omega, truncation_bound })
}

/// `E_omega[T_s | X_0 = s, X_1 = s - 1]`; fails unless the window is wide
/// enough for the truncation error to fall below [`RETURN_TOLERANCE`].
pub fn quenched_expected_return(env: &Environment1D, s: i64) -> Result<f64, WalkError> {
    let prof = quenched_return_profile(env, s)?;
    if !(prof.truncation_bound <= RETURN_TOLERANCE) {
        return Err(WalkError::NotConvergent { bound: prof.truncation_bound });
    }
    Ok(prof.at(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{sample_environment, EnvironmentLaw, SiteWindow};
    use approx::assert_relative_eq;

    #[test]
    fn deterministic_return_time() {
        let law = EnvironmentLaw::deterministic(0.7).unwrap();
        let env = sample_environment(&law, SiteWindow::symmetric(200), 0).unwrap();
        let rho = 3.0 / 7.0;
        assert_relative_eq!(quenched_expected_return(&env, 1).unwrap(), 2.0 / (1.0 - rho), epsilon = 1e-9);
        let prof = quenched_return_profile(&env, 1).unwrap();
        for x in prof.first_site + 1..=1 {
            assert_relative_eq!(prof.at(x), 2.0 + rho * prof.at(x - 1), epsilon = 1e-12);
        }
    }

    #[test]
    fn narrow_window_is_not_convergent() {
        let law = EnvironmentLaw::deterministic(0.55).unwrap();
        let env = sample_environment(&law, SiteWindow::symmetric(5), 0).unwrap();
        assert!(matches!(quenched_expected_return(&env, 1), Err(WalkError::NotConvergent { .. })));
    }

    #[test]
    fn simulated_excursions_match_recurrence() {
        let law = EnvironmentLaw::deterministic(0.7).unwrap();
        let env = sample_environment(&law, SiteWindow::symmetric(400), 0).unwrap();
        let sample = left_excursion_durations(&env, 50_000, 5).unwrap();
        assert_eq!(sample.timeouts, 0);
        assert_eq!(sample.durations.len(), 50_000);
        assert!(sample.durations.iter().all(|&d| d >= 2 && d % 2 == 0));
        let est = sample.estimate();
        assert!(est.within(quenched_expected_return(&env, 1).unwrap(), 4.0));
    }

    #[test]
    fn cap_counts_timeouts() {
        let law = EnvironmentLaw::deterministic(0.5).unwrap();
        let env = sample_environment(&law, SiteWindow::symmetric(10_000), 0).unwrap();
        let sample = left_excursion_durations_capped(&env, 2000, 1, 50).unwrap();
        assert!(sample.timeouts > 0);
        assert_eq!(sample.durations.len() as u64 + sample.timeouts, 2000);
        assert!(sample.durations.iter().all(|&d| d <= 50));
    }

    #[test]
    fn left_transient_law_rejected() {
        let law = EnvironmentLaw::deterministic(0.3).unwrap();
        let env = sample_environment(&law, SiteWindow::symmetric(10), 0).unwrap();
        assert_eq!(left_excursion_durations(&env, 1, 0), Err(WalkError::TransientLeft));
    }
}
