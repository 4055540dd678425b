//! Conductance networks and harmonic analysis.
//!
//! A [`ConductanceNetwork`] is an undirected weighted graph. Its random walk
//! jumps along edge `xy` with probability `C_xy / C_x`; voltages solving a
//! Dirichlet problem are hitting probabilities of that walk, and the current
//! out of a source measures how often the walk escapes to the sink.

mod chain;
mod graph;
mod lattice;
mod mc;
mod solve;

pub use chain::{chain_network_from_env, ChainNetwork, LOG_DOMAIN_THRESHOLD};
pub use graph::{ConductanceNetwork, Edge};
pub use lattice::{lattice_ball, lattice_ball_with_cap, polya_escape_series, BallNorm, LatticeBall, PolyaPoint, DEFAULT_BALL_NODE_CAP};
pub use mc::{edge_crossings_mc, escape_probability_mc, hitting_probability_mc};
pub use solve::{
    effective_resistance, escape_probability, solve_dirichlet, terminal_conductance,
    DirichletProblem, Floating, HarmonicSolution, DEFAULT_TOLERANCE,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("edge ({u}, {v}) references a node outside 0..{n}")]
    NodeOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("edge ({u}, {v}) has non-positive or non-finite conductance")]
    BadConductance { u: usize, v: usize },
    #[error("network is disconnected")]
    Disconnected,
    #[error("component containing node {0} has no boundary node")]
    FloatingComponent(usize),
    #[error("boundary is empty")]
    EmptyBoundary,
    #[error("node {0} appears twice in the boundary")]
    DuplicateBoundary(usize),
    #[error("terminals must differ")]
    SameTerminal,
    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("conductance ratios span {0:.1} nats and overflow f64")]
    Overflow(f64),
    #[error("unsupported lattice dimension {0} (expected 1, 2 or 3)")]
    BadDimension(usize),
    #[error("lattice radius must be at least 1")]
    BadRadius,
    #[error("ball would hold more than {cap} nodes")]
    BallTooLarge { cap: usize },
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("chain [{left}, {right}] must satisfy left < 0 < right inside the window")]
    BadChain { left: i64, right: i64 },
}
