//! JSON schema of the `synth` configuration file.

use std::collections::BTreeMap;

use serde::Deserialize;
use stlkit::synthesis::{CostWeights, LtiSystem, Norm, Saturation};

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub logic: String,
    pub formula: String,
    pub horizon: usize,
    /// Signal name to `[lower, upper]`.
    #[serde(default)]
    pub signals: BTreeMap<String, [f64; 2]>,
    /// Initial values, used when no system is given.
    #[serde(default)]
    pub initial: BTreeMap<String, f64>,
    pub weights: Option<BTreeMap<String, Vec<f64>>>,
    pub system: Option<SystemSection>,
    pub costs: Option<CostSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C", default)]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D", default)]
    pub d: Option<Vec<f64>>,
    pub state_names: Vec<String>,
    pub input_names: Vec<String>,
    pub state_bounds: Vec<[f64; 2]>,
    pub input_bounds: Vec<[f64; 2]>,
    pub x0: Vec<f64>,
    pub saturation: Option<SaturationSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaturationSection {
    pub norm: String,
    pub limit: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSection {
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub beta: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

impl SystemSection {
    pub fn to_system(&self, horizon: usize) -> Result<LtiSystem, CliError> {
        let saturation = match &self.saturation {
            None => None,
            Some(s) => Some(Saturation {
                norm: match s.norm.as_str() {
                    "l1" | "L1" | "1" => Norm::L1,
                    "linf" | "Linf" | "inf" => Norm::Linf,
                    other => return Err(CliError::Semantic(format!("unknown saturation norm `{other}`"))),
                },
                limit: s.limit,
            }),
        };
        let pairs = |v: &[[f64; 2]]| v.iter().map(|[lo, hi]| (*lo, *hi)).collect();
        let sys = LtiSystem {
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone().unwrap_or_else(|| vec![0.0; self.state_names.len()]),
            state_names: self.state_names.clone(),
            input_names: self.input_names.clone(),
            state_bounds: pairs(&self.state_bounds),
            input_bounds: pairs(&self.input_bounds),
            x0: self.x0.clone(),
            horizon,
            saturation,
        };
        sys.validate()?;
        Ok(sys)
    }
}

impl CostSection {
    pub fn to_costs(&self, n: usize, m: usize) -> CostWeights {
        CostWeights {
            lambda: self.lambda,
            alpha: self.alpha.clone().unwrap_or_else(|| vec![0.0; n]),
            beta: self.beta.clone().unwrap_or_else(|| vec![0.0; m]),
        }
    }
}
