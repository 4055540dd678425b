//! Puddle random-resistor network for charge-neutral graphene.

mod lattice;
mod sweep;

pub use lattice::{
    build_network, sample_lattice, two_terminal_conductance, GrapheneLattice, GrapheneNetwork, GrapheneParams,
};
pub use sweep::{
    conductance_scaling, default_doping_grid, doping_sweep, lattice_seed, sigma_min_curve, ConductivityCurve,
    CurvePoint, ScalingResult, DOPING_STEP,
};

use thiserror::Error;

use crate::fit::FitError;
use crate::network::NetworkError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrapheneError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("lattice size must be at least 2, got {0}")]
    BadSize(usize),
    #[error("field has {got} plaquettes, expected {expected}")]
    FieldSize { expected: usize, got: usize },
    #[error("plaquette values must be +1 or -1, got {0}")]
    BadSpin(i8),
    #[error("lattice text, line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("mean conductance vanishes at L = {l} over {n} realizations; log-log fit undefined")]
    ZeroMean { l: usize, n: u64 },
    #[error("need at least 3 distinct sizes, got {0}")]
    TooFewSizes(usize),
    #[error("realization count must be positive")]
    NoRealizations,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Fit(#[from] FitError),
}
