//! Dirichlet solves by Jacobi-preconditioned conjugate gradients.
//!
//! The interior voltages minimize the dissipated energy
//! `1/2 sum_uv C_uv (v_u - v_v)^2` for fixed boundary values, which is the
//! symmetric positive-definite system `L_II v_I = -L_IB v_B` on the interior
//! block of the weighted Laplacian.

use super::graph::{Adjacency, ConductanceNetwork};
use super::NetworkError;

/// Default relative residual for iterative solves.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// What to do with components that contain no boundary node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Floating {
    /// Reject the problem.
    #[default]
    Error,
    /// Leave their voltages undetermined (NaN); they carry no current.
    Ignore,
}

#[derive(Debug, Clone)]
pub struct DirichletProblem<'a> {
    network: &'a ConductanceNetwork,
    boundary: Vec<(usize, f64)>,
    floating: Floating,
}

impl<'a> DirichletProblem<'a> {
    pub fn new(network: &'a ConductanceNetwork, boundary: Vec<(usize, f64)>) -> Result<Self, NetworkError> {
        if boundary.is_empty() {
            return Err(NetworkError::EmptyBoundary);
        }
        let mut seen = vec![false; network.n_nodes()];
        for &(x, _) in &boundary {
            if x >= network.n_nodes() {
                return Err(NetworkError::NodeOutOfRange { u: x, v: x, n: network.n_nodes() });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(NetworkError::DuplicateBoundary(x));
            }
        }
        Ok(DirichletProblem { network, boundary, floating: Floating::Error })
    }

    pub fn with_floating(mut self, floating: Floating) -> Self {
        self.floating = floating;
        self
    }

    pub fn network(&self) -> &ConductanceNetwork {
        self.network
    }

    pub fn boundary(&self) -> &[(usize, f64)] {
        &self.boundary
    }
}

/// Voltages and currents of a solved problem. Edge currents follow the
/// orientation `u -> v` of the network's edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSolution {
    pub voltages: Vec<f64>,
    pub edge_currents: Vec<f64>,
    /// Net current injected at each boundary node, in boundary order.
    pub boundary_currents: Vec<(usize, f64)>,
    pub iterations: usize,
}

impl HarmonicSolution {
    /// Net current from `x` to `y` summed over all parallel edges.
    pub fn current(&self, net: &ConductanceNetwork, x: usize, y: usize) -> f64 {
        net.edges()
            .iter()
            .zip(&self.edge_currents)
            .map(|(e, &i)| {
                if e.u == x && e.v == y {
                    i
                } else if e.u == y && e.v == x {
                    -i
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Current injected at boundary node `x` (`i_a = sum_x i_ax`).
    pub fn source_current(&self, x: usize) -> Option<f64> {
        self.boundary_currents.iter().find(|b| b.0 == x).map(|b| b.1)
    }

    /// Largest net current imbalance over non-boundary nodes with finite voltage.
    pub fn kirchhoff_residual(&self, net: &ConductanceNetwork, boundary: &[(usize, f64)]) -> f64 {
        let mut net_out = vec![0.0; net.n_nodes()];
        for (e, &i) in net.edges().iter().zip(&self.edge_currents) {
            net_out[e.u] += i;
            net_out[e.v] -= i;
        }
        for &(b, _) in boundary {
            net_out[b] = 0.0;
        }
        net_out
            .iter()
            .zip(&self.voltages)
            .filter(|(_, v)| v.is_finite())
            .map(|(r, _)| r.abs())
            .fold(0.0, f64::max)
    }

    /// `1/2 sum_uv C_uv (v_u - v_v)^2` over edges, counting each undirected edge once.
    pub fn dissipated_energy(&self, net: &ConductanceNetwork) -> f64 {
        net.edges()
            .iter()
            .zip(&self.edge_currents)
            .map(|(e, &i)| if e.conductance > 0.0 { i * i / e.conductance } else { 0.0 })
            .sum()
    }
}

pub fn solve_dirichlet(prob: &DirichletProblem<'_>, tol: f64) -> Result<HarmonicSolution, NetworkError> {
    let net = prob.network;
    let n = net.n_nodes();
    let adj = Adjacency::new(net);

    let mut voltages = vec![f64::NAN; n];
    let mut is_boundary = vec![false; n];
    for &(x, v) in &prob.boundary {
        voltages[x] = v;
        is_boundary[x] = true;
    }

    // Components: floating ones are rejected or skipped, single-valued ones are
    // constant and need no solve.
    let comp = net.components();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for &(x, v) in &prob.boundary {
        lo[comp[x]] = lo[comp[x]].min(v);
        hi[comp[x]] = hi[comp[x]].max(v);
    }
    let mut unknown = Vec::new();
    for x in 0..n {
        if is_boundary[x] {
            continue;
        }
        let c = comp[x];
        if lo[c] > hi[c] {
            if prob.floating == Floating::Error {
                return Err(NetworkError::FloatingComponent(x));
            }
        } else if lo[c] == hi[c] {
            voltages[x] = lo[c];
        } else {
            unknown.push(x);
        }
    }

    let iterations = if unknown.is_empty() {
        0
    } else {
        conjugate_gradient(&adj, &unknown, &mut voltages, tol)?
    };

    let edge_currents: Vec<f64> = net
        .edges()
        .iter()
        .map(|e| {
            let d = voltages[e.u] - voltages[e.v];
            if d.is_finite() {
                e.conductance * d
            } else {
                0.0
            }
        })
        .collect();
    let boundary_currents = prob
        .boundary
        .iter()
        .map(|&(x, _)| {
            let out: f64 = adj
                .range(x)
                .map(|s| {
                    let k = adj.edge[s];
                    if net.edges()[k].u == x {
                        edge_currents[k]
                    } else {
                        -edge_currents[k]
                    }
                })
                .sum();
            (x, out)
        })
        .collect();
    Ok(HarmonicSolution { voltages, edge_currents, boundary_currents, iterations })
}

fn conjugate_gradient(
    adj: &Adjacency,
    unknown: &[usize],
    voltages: &mut [f64],
    tol: f64,
) -> Result<usize, NetworkError> {
    let m = unknown.len();
    let mut slot = vec![usize::MAX; voltages.len()];
    for (i, &x) in unknown.iter().enumerate() {
        slot[x] = i;
    }

    // Interior block in CSR form plus the right-hand side from fixed voltages.
    let mut row_ptr = Vec::with_capacity(m + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut diag = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    row_ptr.push(0);
    for (i, &x) in unknown.iter().enumerate() {
        for s in adj.range(x) {
            let y = adj.neighbor[s];
            let c = adj.conductance[s];
            diag[i] += c;
            if slot[y] != usize::MAX {
                cols.push(slot[y]);
                vals.push(c);
            } else {
                rhs[i] += c * voltages[y];
            }
        }
        row_ptr.push(cols.len());
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..m {
            let mut acc = diag[i] * x[i];
            for k in row_ptr[i]..row_ptr[i + 1] {
                acc -= vals[k] * x[cols[k]];
            }
            out[i] = acc;
        }
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    // Flat start at the mean of the fixed voltages seen by the interior.
    let weight: f64 = diag.iter().sum();
    let flat = rhs.iter().sum::<f64>() / weight;
    let mut x = vec![flat; m];
    let mut r = vec![0.0; m];
    apply(&x, &mut r);
    for i in 0..m {
        r[i] = rhs[i] - r[i];
    }
    let b_norm = dot(&rhs, &rhs).sqrt().max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; m];
    let max_iter = 20 * m + 1000;
    let mut iterations = 0;
    let mut res = dot(&r, &r).sqrt();
    while res > tol * b_norm {
        if iterations >= max_iter {
            return Err(NetworkError::NotConverged { iterations, residual: res / b_norm });
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..m {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
        res = dot(&r, &r).sqrt();
        iterations += 1;
    }
    for (i, &node) in unknown.iter().enumerate() {
        voltages[node] = x[i];
    }
    Ok(iterations)
}

/// `R_eff = v_a / i_a` with `v_a = 1`, `v_b = 0`.
pub fn effective_resistance(net: &ConductanceNetwork, a: usize, b: usize) -> Result<f64, NetworkError> {
    Ok(1.0 / unit_source_current(net, a, b)?)
}

/// `p_esc = C_eff / C_a`: probability that the walk from `a` reaches `b` before
/// returning to `a`.
pub fn escape_probability(net: &ConductanceNetwork, a: usize, b: usize) -> Result<f64, NetworkError> {
    let c_eff = unit_source_current(net, a, b)?;
    Ok(c_eff / net.node_conductances()[a])
}

fn unit_source_current(net: &ConductanceNetwork, a: usize, b: usize) -> Result<f64, NetworkError> {
    if a == b {
        return Err(NetworkError::SameTerminal);
    }
    if !net.is_connected() {
        return Err(NetworkError::Disconnected);
    }
    let prob = DirichletProblem::new(net, vec![(a, 1.0), (b, 0.0)])?;
    let sol = solve_dirichlet(&prob, DEFAULT_TOLERANCE)?;
    Ok(sol.boundary_currents[0].1)
}

/// Total current from `sources` (held at 1) to `drains` (held at 0). Components
/// touching neither terminal are ignored; zero when no path joins them.
pub fn terminal_conductance(
    net: &ConductanceNetwork,
    sources: &[usize],
    drains: &[usize],
    tol: f64,
) -> Result<f64, NetworkError> {
    let boundary: Vec<(usize, f64)> =
        sources.iter().map(|&s| (s, 1.0)).chain(drains.iter().map(|&d| (d, 0.0))).collect();
    let prob = DirichletProblem::new(net, boundary)?.with_floating(Floating::Ignore);
    let sol = solve_dirichlet(&prob, tol)?;
    Ok(sol.boundary_currents[..sources.len()].iter().map(|b| b.1).sum())
}
