use super::{ConductanceNetwork, NetworkError};
use crate::env::Environment1D;

/// Beyond this many nats of accumulated `ln rho` the conductances are rescaled
/// so the largest equals 1.
pub const LOG_DOMAIN_THRESHOLD: f64 = 200.0;

// exp() underflows to subnormals past about -708.
const MAX_LOG_SPAN: f64 = 700.0;

/// Birth–death chain on `left..=right` whose network walk is the quenched walk
/// of an environment. Node `i` is site `left + i`.
#[derive(Debug, Clone)]
pub struct ChainNetwork {
    pub network: ConductanceNetwork,
    pub left: i64,
    pub right: i64,
    /// `ln C_{x,x+1}` before any rescaling, indexed like the edges.
    pub log_conductances: Vec<f64>,
    pub rescaled: bool,
}

impl ChainNetwork {
    pub fn node(&self, site: i64) -> usize {
        assert!(self.left <= site && site <= self.right);
        (site - self.left) as usize
    }
}

/// `C_{left,left+1} = 1` and `C_{x,x+1} = C_{x-1,x} / rho_x`, so that
/// `C_{x,x+1} / (C_{x-1,x} + C_{x,x+1}) = p_x` at every interior site.
pub fn chain_network_from_env(env: &Environment1D, left: i64, right: i64) -> Result<ChainNetwork, NetworkError> {
    let w = env.window();
    if !(left < 0 && 0 < right && w.contains(left) && w.contains(right)) {
        return Err(NetworkError::BadChain { left, right });
    }
    let mut logs = Vec::with_capacity((right - left) as usize);
    let mut acc = 0.0;
    logs.push(acc);
    for x in left + 1..right {
        acc -= env.ln_rho(x);
        logs.push(acc);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = logs.iter().copied().fold(f64::INFINITY, f64::min);
    if max - min > MAX_LOG_SPAN {
        return Err(NetworkError::Overflow(max - min));
    }
    let rescaled = max.abs().max(min.abs()) > LOG_DOMAIN_THRESHOLD;
    let shift = if rescaled { max } else { 0.0 };
    let edges = logs
        .iter()
        .enumerate()
        .map(|(i, &l)| (i, i + 1, (l - shift).exp()))
        .collect();
    let network = ConductanceNetwork::new((right - left + 1) as usize, edges)?;
    Ok(ChainNetwork { network, left, right, log_conductances: logs, rescaled })
}
