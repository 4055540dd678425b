//! Environment laws, realized environments and their closed-form quantities.

mod environment;
mod law;
mod potential;
mod solomon;

pub use environment::{sample_environment, Environment1D, SiteWindow};
pub use law::{EnvironmentLaw, DEFAULT_ELLIPTICITY};
pub use potential::{barrier_height, climb_height, random_potential, PotentialPath};
pub use solomon::{
    annealed_mean_excursion, classify_solomon, critical_exponent, eta, sigma_squared_logrho,
    solomon_velocity, Regime, SolomonClass, EXACT_RECURRENCE_TOL, QUADRATURE_RECURRENCE_TOL,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid environment law: {0}")]
    InvalidLaw(String),
    #[error("window [{min}, {max}] is empty")]
    EmptyWindow { min: i64, max: i64 },
    #[error("window [{min}, {max}] does not contain the origin")]
    WindowMissesOrigin { min: i64, max: i64 },
    #[error("site {site} is outside the window [{min}, {max}]")]
    OutsideWindow { site: i64, min: i64, max: i64 },
    #[error("probability {p} at site {site} is not in (0, 1)")]
    InvalidProbability { site: i64, p: f64 },
    #[error("no positive root of E(rho^k) = 1: {0}")]
    NoRoot(String),
}
