use std::ops::{Add, Div};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::NetworkError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge<C> {
    pub u: usize,
    pub v: usize,
    pub conductance: C,
}

/// Undirected network on nodes `0..n_nodes`. Parallel edges are allowed and act
/// as resistors in parallel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConductanceNetwork<C = f64> {
    n_nodes: usize,
    edges: Vec<Edge<C>>,
}

impl<C> ConductanceNetwork<C>
where
    C: Clone + PartialOrd + Zero,
{
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize, C)>) -> Result<Self, NetworkError> {
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, c) in edges {
            if u >= n_nodes || v >= n_nodes {
                return Err(NetworkError::NodeOutOfRange { u, v, n: n_nodes });
            }
            if u == v {
                return Err(NetworkError::SelfLoop(u));
            }
            // `!(c > 0)` also rejects NaN.
            if !(c > C::zero()) {
                return Err(NetworkError::BadConductance { u, v });
            }
            out.push(Edge { u, v, conductance: c });
        }
        Ok(ConductanceNetwork { n_nodes, edges: out })
    }
}

impl<C> ConductanceNetwork<C> {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[Edge<C>] {
        &self.edges
    }

    /// Component label per node (labels are the smallest node index in the component).
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_nodes).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
        (0..self.n_nodes).map(|x| find(&mut parent, x)).collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n_nodes <= 1 || self.components().iter().all(|&c| c == 0)
    }
}

impl<C> ConductanceNetwork<C>
where
    C: Clone + Zero + Add<Output = C> + Div<Output = C>,
{
    /// `C_x = sum_z C_xz` for every node.
    pub fn node_conductances(&self) -> Vec<C> {
        let mut total = vec![C::zero(); self.n_nodes];
        for e in &self.edges {
            total[e.u] = total[e.u].clone() + e.conductance.clone();
            total[e.v] = total[e.v].clone() + e.conductance.clone();
        }
        total
    }

    /// Dense row-stochastic matrix `P_xy = C_xy / C_x`.
    pub fn transition_matrix(&self) -> Result<Vec<Vec<C>>, NetworkError> {
        if !self.is_connected() {
            return Err(NetworkError::Disconnected);
        }
        let mut summed = vec![vec![C::zero(); self.n_nodes]; self.n_nodes];
        for e in &self.edges {
            summed[e.u][e.v] = summed[e.u][e.v].clone() + e.conductance.clone();
            summed[e.v][e.u] = summed[e.v][e.u].clone() + e.conductance.clone();
        }
        let totals = self.node_conductances();
        Ok(summed
            .into_iter()
            .zip(totals)
            .map(|(row, cx)| row.into_iter().map(|c| c / cx.clone()).collect())
            .collect())
    }
}

/// Compressed adjacency used by the solver and the Monte Carlo walkers.
#[derive(Debug, Clone)]
pub(crate) struct Adjacency {
    pub offsets: Vec<usize>,
    pub neighbor: Vec<usize>,
    pub edge: Vec<usize>,
    pub conductance: Vec<f64>,
    /// Per-node cumulative jump probabilities, last entry 1.
    pub cumulative: Vec<f64>,
}

impl Adjacency {
    pub fn new(net: &ConductanceNetwork<f64>) -> Self {
        let n = net.n_nodes();
        let mut degree = vec![0usize; n];
        for e in net.edges() {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for x in 0..n {
            offsets[x + 1] = offsets[x] + degree[x];
        }
        let m = offsets[n];
        let mut fill = offsets.clone();
        let mut neighbor = vec![0; m];
        let mut edge = vec![0; m];
        let mut conductance = vec![0.0; m];
        for (k, e) in net.edges().iter().enumerate() {
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                let slot = fill[a];
                neighbor[slot] = b;
                edge[slot] = k;
                conductance[slot] = e.conductance;
                fill[a] += 1;
            }
        }
        let mut cumulative = vec![0.0; m];
        for x in 0..n {
            let span = offsets[x]..offsets[x + 1];
            let total: f64 = conductance[span.clone()].iter().sum();
            let mut acc = 0.0;
            for s in span.clone() {
                acc += conductance[s];
                cumulative[s] = acc / total;
            }
            if let Some(last) = span.last() {
                cumulative[last] = 1.0;
            }
        }
        Adjacency { offsets, neighbor, edge, conductance, cumulative }
    }

    pub fn range(&self, x: usize) -> std::ops::Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    /// Slot of the jump taken from `x` for a uniform variate `u`.
    #[inline]
    pub fn pick(&self, x: usize, u: f64) -> usize {
        let r = self.range(x);
        let lo = r.start;
        let k = self.cumulative[r].partition_point(|&c| c <= u);
        lo + k.min(self.offsets[x + 1] - lo - 1)
    }
}
