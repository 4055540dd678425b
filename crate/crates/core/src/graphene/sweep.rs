use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lattice::{sample_lattice, two_terminal_conductance, GrapheneParams};
use super::GrapheneError;
use crate::fit::{fit_power_law, PowerLawFit};
use crate::rng::{derive_seed, Stream};
use crate::stats::Estimate;

pub const DOPING_STEP: f64 = 0.0125;

/// Seed of realization `r` at size `l`. Only `l` and `r` enter, so every
/// parameter point of a sweep sees the same uniforms.
pub fn lattice_seed(seed: u64, l: usize, r: u64) -> u64 {
    derive_seed(seed, Stream::Lattice, ((l as u64) << 32) | r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub parameter: f64,
    pub conductance: Estimate,
}

/// Disorder-averaged conductance against `gamma` or `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductivityCurve {
    pub size: usize,
    pub points: Vec<CurvePoint>,
}

impl ConductivityCurve {
    /// Grid point with the smallest mean (first one on ties).
    pub fn argmin(&self) -> Option<usize> {
        (0..self.points.len()).min_by(|&a, &b| {
            self.points[a].conductance.mean.total_cmp(&self.points[b].conductance.mean)
        })
    }
}

fn realizations(l: usize, params: GrapheneParams, n: u64, seed: u64) -> Result<Vec<f64>, GrapheneError> {
    if n == 0 {
        return Err(GrapheneError::NoRealizations);
    }
    (0..n)
        .into_par_iter()
        .map(|r| two_terminal_conductance(&sample_lattice(l, params, lattice_seed(seed, l, r))?))
        .collect()
}

fn curve(
    l: usize,
    n: u64,
    seed: u64,
    grid: &[f64],
    params_at: impl Fn(f64) -> Result<GrapheneParams, GrapheneError>,
) -> Result<ConductivityCurve, GrapheneError> {
    let points = grid
        .iter()
        .map(|&x| {
            let cs = realizations(l, params_at(x)?, n, seed)?;
            Ok(CurvePoint { parameter: x, conductance: Estimate::from_samples(&cs) })
        })
        .collect::<Result<_, GrapheneError>>()?;
    Ok(ConductivityCurve { size: l, points })
}

/// `sigma_min(gamma) = <C>` at `p = 0`.
pub fn sigma_min_curve(gammas: &[f64], l: usize, n: u64, c: f64, seed: u64) -> Result<ConductivityCurve, GrapheneError> {
    curve(l, n, seed, gammas, |g| GrapheneParams::new(c, g, 0.0))
}

pub fn doping_sweep(
    p_grid: &[f64],
    l: usize,
    gamma: f64,
    n: u64,
    c: f64,
    seed: u64,
) -> Result<ConductivityCurve, GrapheneError> {
    curve(l, n, seed, p_grid, |p| GrapheneParams::new(c, gamma, p))
}

/// `-1, -1 + 0.0125, ..., 1` (161 points).
pub fn default_doping_grid() -> Vec<f64> {
    (0..=160).map(|i| -1.0 + i as f64 * DOPING_STEP).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub sizes: Vec<usize>,
    pub means: Vec<Estimate>,
    /// Realizations per size with no spanning cluster.
    pub zero_counts: Vec<u64>,
    pub fit: PowerLawFit,
}

/// `<C(L)>` for each size and its power-law fit `(a / L)^x`.
pub fn conductance_scaling(
    sizes: &[usize],
    n: u64,
    params: GrapheneParams,
    seed: u64,
) -> Result<ScalingResult, GrapheneError> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || distinct.len() != sizes.len() {
        return Err(GrapheneError::TooFewSizes(distinct.len()));
    }
    let mut means = Vec::with_capacity(sizes.len());
    let mut zero_counts = Vec::with_capacity(sizes.len());
    for &l in sizes {
        let cs = realizations(l, params, n, seed)?;
        let est = Estimate::from_samples(&cs);
        if est.mean <= 0.0 {
            return Err(GrapheneError::ZeroMean { l, n });
        }
        zero_counts.push(cs.iter().filter(|&&c| c == 0.0).count() as u64);
        means.push(est);
    }
    let ls: Vec<f64> = sizes.iter().map(|&l| l as f64).collect();
    let ms: Vec<f64> = means.iter().map(|m| m.mean).collect();
    let fit = fit_power_law(&ls, &ms)?;
    Ok(ScalingResult { sizes: sizes.to_vec(), means, zero_counts, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphene::GrapheneLattice;

    #[test]
    fn default_grid() {
        let g = default_doping_grid();
        assert_eq!(g.len(), 161);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[80], 0.0);
        assert!((g[160] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeatable_single_realization() {
        let a = sigma_min_curve(&[0.1], 2, 1, 1.0, 9).unwrap();
        let b = sigma_min_curve(&[0.1], 2, 1, 1.0, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points[0].conductance.n, 1);
    }

    #[test]
    fn leakage_raises_conductance_on_every_lattice() {
        for r in 0..20 {
            let base = sample_lattice(10, GrapheneParams::new(1.0, 0.0, 0.0).unwrap(), lattice_seed(1, 10, r)).unwrap();
            let mut last = -1.0;
            for g in [0.0, 0.01, 0.1, 0.5] {
                let lat: GrapheneLattice = base.with_params(GrapheneParams::new(1.0, g, 0.0).unwrap()).unwrap();
                let c = two_terminal_conductance(&lat).unwrap();
                assert!(c >= last, "gamma {g}: {c} < {last}");
                last = c;
            }
        }
    }

    #[test]
    fn scaling_rejects_few_sizes() {
        let params = GrapheneParams::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(conductance_scaling(&[4, 8], 2, params, 0), Err(GrapheneError::TooFewSizes(2)));
        assert_eq!(conductance_scaling(&[4, 8, 8], 2, params, 0), Err(GrapheneError::TooFewSizes(2)));
    }
}
