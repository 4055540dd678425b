use std::fmt::Write as _;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::GrapheneError;
use crate::network::{terminal_conductance, ConductanceNetwork, DEFAULT_TOLERANCE};
use crate::rng::{rng_from_seed, unit_f64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapheneParams {
    /// Base conductance of an open diagonal bond.
    #[serde(default = "unit")]
    pub c: f64,
    /// Leakage parameter; axis bonds carry `gamma * c`.
    pub gamma: f64,
    /// Doping, `<X> = p`.
    pub p: f64,
}

fn unit() -> f64 {
    1.0
}

impl GrapheneParams {
    pub fn new(c: f64, gamma: f64, p: f64) -> Result<Self, GrapheneError> {
        let params = GrapheneParams { c, gamma, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GrapheneError> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(GrapheneError::InvalidParameter(format!("c = {} must be positive", self.c)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(GrapheneError::InvalidParameter(format!("gamma = {} must be >= 0", self.gamma)));
        }
        if !(-1.0..=1.0).contains(&self.p) {
            return Err(GrapheneError::InvalidParameter(format!("p = {} outside [-1, 1]", self.p)));
        }
        Ok(())
    }
}

/// `L x L` plaquettes with puddle signs `X_{i,j}`; `i` is the column (the
/// direction of current flow), `j` the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrapheneLattice {
    l: usize,
    params: GrapheneParams,
    field: Vec<i8>,
    seed: Option<u64>,
}

/// `X = +1` exactly when the plaquette's uniform variate is below `(1 + p) / 2`,
/// so lattices drawn with one seed and different `p` are coupled.
pub fn sample_lattice(l: usize, params: GrapheneParams, seed: u64) -> Result<GrapheneLattice, GrapheneError> {
    if l < 2 {
        return Err(GrapheneError::BadSize(l));
    }
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let cut = (1.0 + params.p) / 2.0;
    let field = (0..l * l).map(|_| if unit_f64(rng.next_u64()) < cut { 1 } else { -1 }).collect();
    Ok(GrapheneLattice { l, params, field, seed: Some(seed) })
}

impl GrapheneLattice {
    /// `field[i * l + j] = X_{i,j}`.
    pub fn from_field(l: usize, params: GrapheneParams, field: Vec<i8>) -> Result<Self, GrapheneError> {
        if l < 2 {
            return Err(GrapheneError::BadSize(l));
        }
        params.validate()?;
        if field.len() != l * l {
            return Err(GrapheneError::FieldSize { expected: l * l, got: field.len() });
        }
        if let Some(&bad) = field.iter().find(|&&x| x != 1 && x != -1) {
            return Err(GrapheneError::BadSpin(bad));
        }
        Ok(GrapheneLattice { l, params, field, seed: None })
    }

    pub fn size(&self) -> usize {
        self.l
    }

    pub fn params(&self) -> GrapheneParams {
        self.params
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn field(&self) -> &[i8] {
        &self.field
    }

    /// Same puddles under other bond parameters.
    pub fn with_params(&self, params: GrapheneParams) -> Result<Self, GrapheneError> {
        params.validate()?;
        Ok(GrapheneLattice { params, ..self.clone() })
    }

    pub fn x(&self, i: usize, j: usize) -> i8 {
        self.field[i * self.l + j]
    }

    pub fn mean_x(&self) -> f64 {
        self.field.iter().map(|&x| x as f64).sum::<f64>() / self.field.len() as f64
    }

    fn parity_sign(&self, i: usize, j: usize) -> f64 {
        let s = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        s * self.x(i, j) as f64
    }

    /// Bond `(i, j) - (i+1, j+1)`: `c (1 + (-1)^{i+j} X) / 2`.
    pub fn diagonal(&self, i: usize, j: usize) -> f64 {
        self.params.c * (1.0 + self.parity_sign(i, j)) / 2.0
    }

    /// Bond `(i, j+1) - (i+1, j)`: `c (1 - (-1)^{i+j} X) / 2`.
    pub fn anti_diagonal(&self, i: usize, j: usize) -> f64 {
        self.params.c * (1.0 - self.parity_sign(i, j)) / 2.0
    }

    /// One row per `j` from the top, columns `i` left to right, as `+`/`-`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for j in (0..self.l).rev() {
            for i in 0..self.l {
                s.push(if self.x(i, j) > 0 { '+' } else { '-' });
            }
            s.push('\n');
        }
        s
    }

    /// Inverse of [`to_text`](Self::to_text); also accepts `1`/`-1` tokens
    /// separated by whitespace. Lines starting with `#` are skipped.
    pub fn from_text(text: &str, params: GrapheneParams) -> Result<Self, GrapheneError> {
        let mut rows: Vec<Vec<i8>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |reason: String| GrapheneError::Parse { line: n + 1, reason };
            let row: Vec<i8> = if line.contains(char::is_whitespace) || line.contains('1') {
                line.split_whitespace()
                    .map(|t| match t {
                        "1" | "+1" => Ok(1),
                        "-1" => Ok(-1),
                        other => Err(parse_err(format!("bad token {other:?}"))),
                    })
                    .collect::<Result<_, _>>()?
            } else {
                line.chars()
                    .map(|ch| match ch {
                        '+' => Ok(1),
                        '-' => Ok(-1),
                        other => Err(parse_err(format!("bad character {other:?}"))),
                    })
                    .collect::<Result<_, _>>()?
            };
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(parse_err(format!("row has {} entries, expected {}", row.len(), first.len())));
                }
            }
            rows.push(row);
        }
        let l = rows.len();
        if rows.first().is_some_and(|r| r.len() != l) {
            return Err(GrapheneError::Parse { line: 0, reason: format!("{} rows of {} entries is not square", l, rows[0].len()) });
        }
        let mut field = vec![0i8; l * l];
        for (r, row) in rows.iter().enumerate() {
            let j = l - 1 - r;
            for (i, &x) in row.iter().enumerate() {
                field[i * l + j] = x;
            }
        }
        Self::from_field(l, params, field)
    }

    /// Summary line for exported fixtures.
    pub fn header(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "# L={} c={} gamma={} p={}", self.l, self.params.c, self.params.gamma, self.params.p);
        if let Some(seed) = self.seed {
            let _ = write!(s, " seed={seed}");
        }
        s
    }
}

/// Network with the left column merged into `source` and the right column
/// into `drain`.
#[derive(Debug, Clone)]
pub struct GrapheneNetwork {
    pub network: ConductanceNetwork,
    pub source: usize,
    pub drain: usize,
}

impl GrapheneNetwork {
    /// Node index of lattice site `(i, j)`, `0 <= i, j <= L`.
    pub fn node(l: usize, i: usize, j: usize) -> usize {
        match i {
            0 => 0,
            _ if i == l => 1,
            _ => 2 + (i - 1) * (l + 1) + j,
        }
    }
}

pub fn build_network(lat: &GrapheneLattice) -> GrapheneNetwork {
    let l = lat.l;
    let n_nodes = 2 + (l - 1) * (l + 1);
    let node = |i, j| GrapheneNetwork::node(l, i, j);
    let mut edges = Vec::with_capacity(3 * l * l);
    let mut push = |a: usize, b: usize, c: f64| {
        if c > 0.0 && a != b {
            edges.push((a, b, c));
        }
    };
    for i in 0..l {
        for j in 0..l {
            push(node(i, j), node(i + 1, j + 1), lat.diagonal(i, j));
            push(node(i, j + 1), node(i + 1, j), lat.anti_diagonal(i, j));
        }
    }
    let axis = lat.params.gamma * lat.params.c;
    for i in 0..=l {
        for j in 0..=l {
            if i < l {
                push(node(i, j), node(i + 1, j), axis);
            }
            if j < l {
                push(node(i, j), node(i, j + 1), axis);
            }
        }
    }
    let network = ConductanceNetwork::new(n_nodes, edges).expect("lattice bonds are valid");
    GrapheneNetwork { network, source: 0, drain: 1 }
}

/// Current between the bus bars at unit voltage; zero when no cluster spans.
pub fn two_terminal_conductance(lat: &GrapheneLattice) -> Result<f64, GrapheneError> {
    let net = build_network(lat);
    Ok(terminal_conductance(&net.network, &[net.source], &[net.drain], DEFAULT_TOLERANCE)?)
}
