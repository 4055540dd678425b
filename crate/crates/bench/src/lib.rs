//! Fixed inputs shared by the benchmarks.

use rwre_core::env::{sample_environment, Environment1D, EnvironmentLaw, SiteWindow};
use rwre_core::graphene::{sample_lattice, GrapheneLattice, GrapheneParams};

/// Sinai two-point environment on `[-radius, radius]`.
pub fn sinai_environment(radius: u64, seed: u64) -> Environment1D {
    let law = EnvironmentLaw::finite(vec![(0.3, 0.5), (0.7, 0.5)]).expect("valid law");
    sample_environment(&law, SiteWindow::symmetric(radius), seed).expect("window contains 0")
}

/// Critical puddle lattice (`p = 0`) with leakage `gamma`.
pub fn critical_lattice(l: usize, gamma: f64, seed: u64) -> GrapheneLattice {
    let params = GrapheneParams::new(1.0, gamma, 0.0).expect("valid parameters");
    sample_lattice(l, params, seed).expect("size at least 2")
}
