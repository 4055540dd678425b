//! Random walks in random environments (RWRE) on the integers and their
//! electrical-network counterparts.
//!
//! The crate is split by subsystem:
//!
//! * [`env`]: environment laws, realized environments, the Solomon
//!   classification, asymptotic velocity, critical exponent and the random
//!   potential.
//! * [`walk`]: quenched trajectories, local times, first passages,
//!   excursions, exact annealed path probabilities and the Sinai-regime
//!   ensembles.
//! * [`network`]: conductance networks, harmonic (Dirichlet) solves,
//!   effective resistance, escape probabilities and lattice-ball recurrence
//!   experiments.
//! * [`graphene`]: the puddle random-resistor network and its finite-size
//!   scaling and leakage/doping sweeps.
//!
//! Every stochastic routine takes an explicit `u64` seed. Ensembles derive
//! per-task substreams from a master seed (see [`rng`]), so results do not
//! depend on the number of worker threads.

pub mod env;
pub mod fit;
pub mod graphene;
pub mod io;
pub mod network;
pub mod quadrature;
pub mod rng;
pub mod stats;
pub mod walk;

pub use env::{
    annealed_mean_excursion, barrier_height, classify_solomon, climb_height, critical_exponent,
    eta, random_potential, sample_environment, sigma_squared_logrho, solomon_velocity,
    EnvError, Environment1D, EnvironmentLaw, PotentialPath, SiteWindow, SolomonClass, Regime,
};
pub use fit::{fit_leakage_exponent, fit_power_law, FitError, LeakageFit, PowerLawFit};
pub use graphene::{GrapheneError, GrapheneLattice, GrapheneParams};
pub use network::{
    ConductanceNetwork, DirichletProblem, HarmonicSolution, NetworkError, DEFAULT_TOLERANCE,
};
pub use stats::Estimate;
pub use walk::{LocalTimeTable, Passage, PassageRecord, Trajectory, WalkError};
