//! Monte Carlo walkers on conductance networks, used as oracles for the
//! voltage/current interpretation.

use rand::RngCore;
use rayon::prelude::*;

use super::graph::{Adjacency, ConductanceNetwork};
use crate::rng::{substream, unit_f64, Stream};
use crate::stats::Estimate;

const BATCH: u64 = 4096;

fn batches(n_trials: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let n_batches = n_trials.div_ceil(BATCH);
    (0..n_batches)
        .into_par_iter()
        .map(move |b| (b, BATCH.min(n_trials - b * BATCH)))
}

/// Walks from `x` until reaching `a` or `b`; true if `a` came first.
fn reaches_first(adj: &Adjacency, mut x: usize, a: usize, b: usize, rng: &mut impl RngCore) -> bool {
    loop {
        if x == a {
            return true;
        }
        if x == b {
            return false;
        }
        x = adj.neighbor[adj.pick(x, unit_f64(rng.next_u64()))];
    }
}

/// Frequency with which the walk from `start` hits `absorb_a` before `absorb_b`.
pub fn hitting_probability_mc(
    net: &ConductanceNetwork,
    start: usize,
    absorb_a: usize,
    absorb_b: usize,
    n_trials: u64,
    seed: u64,
) -> Estimate {
    assert_ne!(absorb_a, absorb_b, "absorbing states must differ");
    let adj = Adjacency::new(net);
    let hits: u64 = batches(n_trials)
        .map(|(b, len)| {
            let mut rng = substream(seed, Stream::Network, b);
            (0..len).filter(|_| reaches_first(&adj, start, absorb_a, absorb_b, &mut rng)).count() as u64
        })
        .sum();
    Estimate::from_bernoulli(hits, n_trials)
}

/// Frequency with which the walk from `a` reaches `b` before returning to `a`.
pub fn escape_probability_mc(net: &ConductanceNetwork, a: usize, b: usize, n_trials: u64, seed: u64) -> Estimate {
    assert_ne!(a, b);
    let adj = Adjacency::new(net);
    let escapes: u64 = batches(n_trials)
        .map(|(k, len)| {
            let mut rng = substream(seed, Stream::Network, k);
            (0..len)
                .filter(|_| {
                    let first = adj.neighbor[adj.pick(a, unit_f64(rng.next_u64()))];
                    !reaches_first(&adj, first, a, b, &mut rng)
                })
                .count() as u64
        })
        .sum();
    Estimate::from_bernoulli(escapes, n_trials)
}

/// Mean net number of `u -> v` traversals of each edge by a walk started at `a`
/// and stopped at `b`. With unit source current these equal the edge currents.
pub fn edge_crossings_mc(net: &ConductanceNetwork, a: usize, b: usize, n_trials: u64, seed: u64) -> Vec<Estimate> {
    assert_ne!(a, b);
    let adj = Adjacency::new(net);
    let m = net.edges().len();
    let per_batch: Vec<(Vec<f64>, Vec<f64>)> = batches(n_trials)
        .map(|(k, len)| {
            let mut rng = substream(seed, Stream::Network, k);
            let mut sum = vec![0.0; m];
            let mut sum_sq = vec![0.0; m];
            let mut counts = vec![0i64; m];
            for _ in 0..len {
                counts.iter_mut().for_each(|c| *c = 0);
                let mut x = a;
                while x != b {
                    let s = adj.pick(x, unit_f64(rng.next_u64()));
                    let e = adj.edge[s];
                    counts[e] += if net.edges()[e].u == x { 1 } else { -1 };
                    x = adj.neighbor[s];
                }
                for e in 0..m {
                    let c = counts[e] as f64;
                    sum[e] += c;
                    sum_sq[e] += c * c;
                }
            }
            (sum, sum_sq)
        })
        .collect();
    let n = n_trials as f64;
    (0..m)
        .map(|e| {
            let s: f64 = per_batch.iter().map(|b| b.0[e]).sum();
            let s2: f64 = per_batch.iter().map(|b| b.1[e]).sum();
            let mean = s / n;
            let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
            Estimate { mean, std_error: (var / n).sqrt(), n: n_trials }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_on_absorber() {
        let net = ConductanceNetwork::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(hitting_probability_mc(&net, 0, 0, 2, 100, 1).mean, 1.0);
        assert_eq!(hitting_probability_mc(&net, 2, 0, 2, 100, 1).mean, 0.0);
    }

    #[test]
    fn symmetric_midpoint() {
        let net = ConductanceNetwork::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let e = hitting_probability_mc(&net, 1, 0, 2, 20_000, 9);
        assert!(e.within(0.5, 3.0), "{e:?}");
    }

    #[test]
    fn chain_linear_profile() {
        // Chain of k unit resistors: P_j(hit k before 0) = j / k.
        let k = 6;
        let net = ConductanceNetwork::new(k + 1, (0..k).map(|i| (i, i + 1, 1.0)).collect()).unwrap();
        for j in 1..k {
            let e = hitting_probability_mc(&net, j, k, 0, 20_000, j as u64);
            assert!(e.within(j as f64 / k as f64, 4.0), "j = {j}: {e:?}");
        }
    }

    #[test]
    fn escape_on_path() {
        let net = ConductanceNetwork::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let e = escape_probability_mc(&net, 0, 2, 20_000, 3);
        assert!(e.within(0.5, 4.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let net = ConductanceNetwork::new(4, vec![(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 2, 1.0)]).unwrap();
        let a = hitting_probability_mc(&net, 1, 0, 3, 10_000, 77);
        let b = hitting_probability_mc(&net, 1, 0, 3, 10_000, 77);
        assert_eq!(a, b);
    }
}
