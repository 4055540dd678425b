use serde::{Deserialize, Serialize};

use super::EnvError;
use crate::quadrature;

/// Default lower bound on jump probabilities for interval laws, `delta <= p <= 1 - delta`.
pub const DEFAULT_ELLIPTICITY: f64 = 0.01;

const QUAD_TOL: f64 = 1e-12;

/// Distribution of the i.i.d. rightward jump probabilities `p_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", try_from = "RawLaw", into = "RawLaw")]
pub enum EnvironmentLaw {
    /// Every site has the same `p`: the ordinary biased walk.
    Deterministic { p: f64 },
    /// `p = atoms[i].0` with probability `atoms[i].1`.
    FiniteSupport { atoms: Vec<(f64, f64)> },
    /// `p` uniform on `[lo, hi]`, with `delta <= lo < hi <= 1 - delta`.
    UniformInterval { lo: f64, hi: f64, delta: f64 },
}

impl EnvironmentLaw {
    pub fn deterministic(p: f64) -> Result<Self, EnvError> {
        let law = EnvironmentLaw::Deterministic { p };
        law.validate()?;
        Ok(law)
    }

    pub fn finite(atoms: Vec<(f64, f64)>) -> Result<Self, EnvError> {
        let law = EnvironmentLaw::FiniteSupport { atoms };
        law.validate()?;
        Ok(law)
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, EnvError> {
        Self::uniform_with_ellipticity(lo, hi, DEFAULT_ELLIPTICITY)
    }

    pub fn uniform_with_ellipticity(lo: f64, hi: f64, delta: f64) -> Result<Self, EnvError> {
        let law = EnvironmentLaw::UniformInterval { lo, hi, delta };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let open = |p: f64| p > 0.0 && p < 1.0;
        match self {
            EnvironmentLaw::Deterministic { p } => {
                if !open(*p) {
                    return Err(EnvError::InvalidLaw(format!("p = {p} not in (0, 1)")));
                }
            }
            EnvironmentLaw::FiniteSupport { atoms } => {
                if atoms.is_empty() {
                    return Err(EnvError::InvalidLaw("empty support".into()));
                }
                for &(p, w) in atoms {
                    if !open(p) {
                        return Err(EnvError::InvalidLaw(format!("atom p = {p} not in (0, 1)")));
                    }
                    if !(w > 0.0 && w.is_finite()) {
                        return Err(EnvError::InvalidLaw(format!("atom weight {w} not positive")));
                    }
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(EnvError::InvalidLaw(format!("weights sum to {total}, not 1")));
                }
            }
            EnvironmentLaw::UniformInterval { lo, hi, delta } => {
                if !(*delta > 0.0 && *delta < 0.5) {
                    return Err(EnvError::InvalidLaw(format!("ellipticity {delta} not in (0, 1/2)")));
                }
                if !(lo < hi) {
                    return Err(EnvError::InvalidLaw(format!("need lo < hi, got [{lo}, {hi}]")));
                }
                if *lo < *delta || *hi > 1.0 - delta {
                    return Err(EnvError::InvalidLaw(format!(
                        "[{lo}, {hi}] violates ellipticity [{delta}, {}]",
                        1.0 - delta
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when expectations are finite sums rather than quadratures.
    pub fn is_exact(&self) -> bool {
        !matches!(self, EnvironmentLaw::UniformInterval { .. })
    }

    /// `E f(p_0)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        match self {
            EnvironmentLaw::Deterministic { p } => f(*p),
            EnvironmentLaw::FiniteSupport { atoms } => atoms.iter().map(|&(p, w)| w * f(p)).sum(),
            EnvironmentLaw::UniformInterval { lo, hi, .. } => {
                let (v, _) = quadrature::integrate_mixed(&f, *lo, *hi, QUAD_TOL * (hi - lo), QUAD_TOL);
                v / (hi - lo)
            }
        }
    }

    pub fn mean_p(&self) -> f64 {
        self.expect(|p| p)
    }

    /// `E rho_0` with `rho = q / p`.
    pub fn mean_rho(&self) -> f64 {
        self.expect(|p| (1.0 - p) / p)
    }

    /// `E rho_0^{-1}`.
    pub fn mean_inv_rho(&self) -> f64 {
        self.expect(|p| p / (1.0 - p))
    }

    /// `E rho_0^k`.
    pub fn moment_rho(&self, k: f64) -> f64 {
        self.expect(|p| (k * ((1.0 - p) / p).ln()).exp())
    }

    /// Largest attainable `rho`, used to decide whether `E rho^k` can reach 1.
    pub fn max_rho(&self) -> f64 {
        let rho = |p: f64| (1.0 - p) / p;
        match self {
            EnvironmentLaw::Deterministic { p } => rho(*p),
            EnvironmentLaw::FiniteSupport { atoms } => {
                atoms.iter().map(|a| rho(a.0)).fold(f64::NEG_INFINITY, f64::max)
            }
            EnvironmentLaw::UniformInterval { lo, .. } => rho(*lo),
        }
    }

    /// Draws one `p` from a uniform variate `u` in [0, 1).
    pub(crate) fn quantile(&self, u: f64) -> f64 {
        match self {
            EnvironmentLaw::Deterministic { p } => *p,
            EnvironmentLaw::FiniteSupport { atoms } => {
                let mut acc = 0.0;
                for &(p, w) in atoms {
                    acc += w;
                    if u < acc {
                        return p;
                    }
                }
                atoms[atoms.len() - 1].0
            }
            EnvironmentLaw::UniformInterval { lo, hi, .. } => lo + (hi - lo) * u,
        }
    }
}

/// Wire form: `{ kind = "finite", atoms = [[0.8, 0.5], [0.3, 0.5]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum RawLaw {
    Deterministic {
        p: f64,
    },
    Finite {
        atoms: Vec<(f64, f64)>,
    },
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default = "default_delta")]
        delta: f64,
    },
}

fn default_delta() -> f64 {
    DEFAULT_ELLIPTICITY
}

impl TryFrom<RawLaw> for EnvironmentLaw {
    type Error = EnvError;

    fn try_from(raw: RawLaw) -> Result<Self, EnvError> {
        let law = match raw {
            RawLaw::Deterministic { p } => EnvironmentLaw::Deterministic { p },
            RawLaw::Finite { atoms } => EnvironmentLaw::FiniteSupport { atoms },
            RawLaw::Uniform { lo, hi, delta } => EnvironmentLaw::UniformInterval { lo, hi, delta },
        };
        law.validate()?;
        Ok(law)
    }
}

impl From<EnvironmentLaw> for RawLaw {
    fn from(law: EnvironmentLaw) -> Self {
        match law {
            EnvironmentLaw::Deterministic { p } => RawLaw::Deterministic { p },
            EnvironmentLaw::FiniteSupport { atoms } => RawLaw::Finite { atoms },
            EnvironmentLaw::UniformInterval { lo, hi, delta } => RawLaw::Uniform { lo, hi, delta },
        }
    }
}
