//! Quenched walks in a fixed environment and the experiments built on them.

mod annealed;
mod ensemble;
mod eq23;
mod excursion;
mod trajectory;

pub use annealed::{
    annealed_markov_violation, annealed_path_probability, annealed_path_probability_factorized,
    MAX_ENUMERATION_TERMS,
};
pub use ensemble::{
    endpoint_ensemble, kesten_scaling, localization_diagnostic, revesz_bounds, sinai_rescaled_ensemble,
    EndpointEnsemble, EnvMode, KestenPoint, SinaiEnsemble, SinaiSample,
};
pub use eq23::{
    deheuvels_revesz_formula, eq23_harness, hit_before_return_exact, hit_before_return_mc, Eq23Row,
};
pub use excursion::{
    left_excursion_durations, left_excursion_durations_capped, quenched_expected_return,
    quenched_return_profile, ExcursionSample, ReturnProfile, DEFAULT_EXCURSION_CAP, RETURN_TOLERANCE,
};
pub use trajectory::{
    first_passage, local_time, simulate_local_time, simulate_quenched, LocalTimeTable, Passage,
    PassageRecord, Trajectory,
};

use thiserror::Error;

use crate::env::{
    classify_solomon, critical_exponent, sigma_squared_logrho, solomon_velocity, EnvError, EnvironmentLaw,
    Regime, SiteWindow,
};
use crate::network::NetworkError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("walk left the window {window:?} at step {step}; widen the window")]
    WindowExit { window: SiteWindow, step: u64 },
    #[error("{count} excursions exceeded the cap of {cap} steps")]
    ExcursionTimeout { count: u64, cap: u64 },
    #[error("truncated return time not convergent (tail bound {bound:e})")]
    NotConvergent { bound: f64 },
    #[error("path must be non-empty with +-1 increments")]
    InvalidPath,
    #[error("prefixes must be non-empty, end at the same site and `next` must be adjacent")]
    InvalidPrefixes,
    #[error("enumeration needs {terms} terms, more than {limit}")]
    SupportTooLarge { terms: f64, limit: u64 },
    #[error("exact enumeration requires a finite-support law")]
    UnsupportedLaw,
    #[error("prefix has zero annealed probability")]
    ZeroProbability,
    #[error("law is not recurrent (eta = {eta})")]
    NotRecurrent { eta: f64 },
    #[error("law is transient to the left; left excursions from 1 need not return")]
    TransientLeft,
    #[error("E ln^2 rho vanishes; the environment is not random")]
    DegenerateLaw,
    #[error("target {k} out of range: {reason}")]
    BadTarget { k: i64, reason: &'static str },
    #[error("count {0} must be positive")]
    ZeroCount(&'static str),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// `6 sqrt(n) + 64`: covers diffusive fluctuations with room to spare.
pub fn diffusive_radius(n: u64) -> u64 {
    (6.0 * (n as f64).sqrt()).ceil() as u64 + 64
}

/// `8 ln^2(n) / sigma + 64`, the window half-width for Sinai-regime runs.
pub fn sinai_radius(n: u64, sigma: f64) -> u64 {
    let l = (n.max(2) as f64).ln();
    (8.0 * l * l / sigma).ceil() as u64 + 64
}

/// Window large enough for an `n`-step walk under `law`: drift-shifted for
/// ballistic laws, stretched to `8 n^k` for zero-speed transient laws,
/// `min(diffusive, Sinai)` for recurrent random laws.
pub fn window_for_law(law: &EnvironmentLaw, n: u64) -> SiteWindow {
    let r = diffusive_radius(n) as i64;
    let v = solomon_velocity(law);
    let class = classify_solomon(law);
    let reach = |extra: f64| (extra.ceil() as i64 + r).min(n as i64 + 1);
    match class.regime {
        Regime::Recurrent => {
            let sigma = sigma_squared_logrho(law);
            let s = if sigma > 0.0 { (sinai_radius(n, sigma) as i64).min(r) } else { r };
            SiteWindow { min: -s, max: s }
        }
        Regime::TransientRight | Regime::TransientLeft => {
            let extra = if v != 0.0 {
                v.abs() * n as f64
            } else {
                let mirrored;
                let k = match class.regime {
                    Regime::TransientRight => critical_exponent(law),
                    _ => {
                        mirrored = mirror_law(law);
                        critical_exponent(&mirrored)
                    }
                };
                k.map(|k| 8.0 * (n as f64).powf(k.min(1.0))).unwrap_or(n as f64)
            };
            if class.regime == Regime::TransientRight {
                SiteWindow { min: -r, max: reach(extra) }
            } else {
                SiteWindow { min: -reach(extra), max: r }
            }
        }
    }
}

/// The law of `1 - p`, i.e. the environment seen in a mirror.
fn mirror_law(law: &EnvironmentLaw) -> EnvironmentLaw {
    match law {
        EnvironmentLaw::Deterministic { p } => EnvironmentLaw::Deterministic { p: 1.0 - p },
        EnvironmentLaw::FiniteSupport { atoms } => {
            EnvironmentLaw::FiniteSupport { atoms: atoms.iter().map(|&(p, w)| (1.0 - p, w)).collect() }
        }
        EnvironmentLaw::UniformInterval { lo, hi, delta } => {
            EnvironmentLaw::UniformInterval { lo: 1.0 - hi, hi: 1.0 - lo, delta: *delta }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_policies() {
        let n = 1_000_000;
        let srw = window_for_law(&EnvironmentLaw::deterministic(0.5).unwrap(), n);
        assert_eq!(srw, SiteWindow { min: -6064, max: 6064 });
        let sinai = window_for_law(&EnvironmentLaw::finite(vec![(0.3, 0.5), (0.7, 0.5)]).unwrap(), n);
        assert_eq!(sinai.max, sinai_radius(n, (7.0f64 / 3.0).ln().powi(2)) as i64);
        assert!(sinai.max < 2300);
        let fast = window_for_law(&EnvironmentLaw::deterministic(0.7).unwrap(), 100_000);
        assert!(fast.max >= 40_000 + 1960 && fast.min == -(diffusive_radius(100_000) as i64));
        let slow = window_for_law(&EnvironmentLaw::finite(vec![(0.2, 0.5), (0.7, 0.5)]).unwrap(), n);
        assert!(slow.min < -6000 && slow.max == 6064);
    }
}
