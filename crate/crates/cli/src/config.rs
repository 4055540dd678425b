//! Experiment configuration, read from TOML or JSON.

use std::path::Path;

use rwre_core::env::EnvironmentLaw;
use rwre_core::network::BallNorm;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParameter {
    #[default]
    Gamma,
    P,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Recurrence class, speed and critical exponent of a law.
    Classify { law: EnvironmentLaw },
    /// Endpoints of `n_walks` walks; a fixed environment when `env_seed` is set.
    Simulate {
        law: EnvironmentLaw,
        n_steps: u64,
        #[serde(default = "one")]
        n_walks: u64,
        #[serde(default)]
        env_seed: Option<u64>,
        /// Record the path and local time of walk 0.
        #[serde(default)]
        trajectory: bool,
    },
    /// Left excursions from 1 in one sampled environment.
    Excursion {
        law: EnvironmentLaw,
        n_excursions: u64,
        #[serde(default)]
        radius: Option<u64>,
        #[serde(default)]
        cap: Option<u64>,
    },
    Sinai { law: EnvironmentLaw, n: u64, n_env: u64, n_walks_per_env: u64 },
    /// Dirichlet solve with `v_source = 1`, `v_sink = 0`, optionally checked
    /// against hitting frequencies.
    Network {
        n_nodes: usize,
        edges: Vec<(usize, usize, f64)>,
        source: usize,
        sink: usize,
        #[serde(default)]
        mc_trials: u64,
    },
    Polya {
        dimension: usize,
        radii: Vec<u32>,
        #[serde(default)]
        norm: BallNorm,
    },
    GrapheneScaling {
        sizes: Vec<usize>,
        n_realizations: u64,
        #[serde(default = "unit")]
        c: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default)]
        p: f64,
    },
    /// Mean conductance over a grid of `gamma` (at `p = 0`) or `p` (at the
    /// given `gamma`). The `p` grid defaults to 161 points on `[-1, 1]`.
    GrapheneSweep {
        #[serde(default)]
        parameter: SweepParameter,
        #[serde(default)]
        grid: Option<Vec<f64>>,
        size: usize,
        n_realizations: u64,
        #[serde(default = "unit")]
        c: f64,
        #[serde(default)]
        gamma: f64,
    },
    Eq23Harness {
        law: EnvironmentLaw,
        #[serde(default = "default_targets")]
        ks: Vec<i64>,
        n_envs: u64,
        n_trials: u64,
    },
    /// Exact annealed step probabilities after two prefixes.
    MarkovViolation { law: EnvironmentLaw, prefix_a: Vec<i64>, prefix_b: Vec<i64>, next: i64 },
}

fn one() -> u64 {
    1
}

fn unit() -> f64 {
    1.0
}

fn default_targets() -> Vec<i64> {
    vec![3, 5, 8]
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Classify { .. } => "classify",
            Experiment::Simulate { .. } => "simulate",
            Experiment::Excursion { .. } => "excursion",
            Experiment::Sinai { .. } => "sinai",
            Experiment::Network { .. } => "network",
            Experiment::Polya { .. } => "polya",
            Experiment::GrapheneScaling { .. } => "graphene-scaling",
            Experiment::GrapheneSweep { .. } => "graphene-sweep",
            Experiment::Eq23Harness { .. } => "eq23-harness",
            Experiment::MarkovViolation { .. } => "markov-violation",
        }
    }
}

impl RunConfig {
    /// TOML unless the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// `det:P`, `finite:P@W,P@W,...`, `uniform:LO,HI[,DELTA]`, or a JSON object.
pub fn parse_law(s: &str) -> Result<EnvironmentLaw, CliError> {
    let bad = |msg: &str| CliError::Config(format!("law {s:?}: {msg}"));
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| bad(&e.to_string()));
    }
    let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected KIND:VALUES"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let law = match kind {
        "det" | "deterministic" => EnvironmentLaw::deterministic(num(rest)?),
        "finite" => {
            let atoms = rest
                .split(',')
                .map(|a| {
                    let (p, w) = a.split_once('@').ok_or_else(|| bad("atoms are P@W"))?;
                    Ok((num(p)?, num(w)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            EnvironmentLaw::finite(atoms)
        }
        "uniform" => {
            let v = rest.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
            match v[..] {
                [lo, hi] => EnvironmentLaw::uniform(lo, hi),
                [lo, hi, d] => EnvironmentLaw::uniform_with_ellipticity(lo, hi, d),
                _ => return Err(bad("uniform takes LO,HI[,DELTA]")),
            }
        }
        _ => return Err(bad("unknown kind")),
    };
    law.map_err(|e| bad(&e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let toml = r#"
            seed = 7
            [experiment]
            kind = "simulate"
            law = { kind = "finite", atoms = [[0.8, 0.5], [0.3, 0.5]] }
            n_steps = 1000
            n_walks = 4
        "#;
        let json = r#"{"seed":7,"experiment":{"kind":"simulate",
            "law":{"kind":"finite","atoms":[[0.8,0.5],[0.3,0.5]]},"n_steps":1000,"n_walks":4}}"#;
        assert_eq!(RunConfig::parse(toml).unwrap(), RunConfig::parse(json).unwrap());
    }

    #[test]
    fn unknown_fields_and_missing_seed_rejected() {
        assert!(RunConfig::parse(r#"{"seed":1,"experiment":{"kind":"classify","law":{"kind":"deterministic","p":0.5}},"x":1}"#).is_err());
        assert!(RunConfig::parse(r#"{"seed":1,"experiment":{"kind":"classify","law":{"kind":"deterministic","p":0.5},"x":1}}"#).is_err());
        assert!(RunConfig::parse(r#"{"experiment":{"kind":"classify","law":{"kind":"deterministic","p":0.5}}}"#).is_err());
        assert!(RunConfig::parse(r#"{"seed":1,"experiment":{"kind":"classify","law":{"kind":"deterministic","p":1.5}}}"#).is_err());
    }

    #[test]
    fn law_shorthand() {
        assert_eq!(parse_law("det:0.7").unwrap(), EnvironmentLaw::deterministic(0.7).unwrap());
        assert_eq!(
            parse_law("finite:0.8@0.5,0.3@0.5").unwrap(),
            EnvironmentLaw::finite(vec![(0.8, 0.5), (0.3, 0.5)]).unwrap()
        );
        assert_eq!(parse_law("uniform:0.2,0.8").unwrap(), EnvironmentLaw::uniform(0.2, 0.8).unwrap());
        assert!(parse_law("det:2").is_err());
        assert!(parse_law("gauss:0").is_err());
    }
}
