//! Every tunable constant of the pipeline in one TOML-serializable record.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::charge::ChargeRegistry;
use crate::contraction::MsgcConfig;
use crate::error::{Error, Result};
use crate::sim::SimConfig;
use crate::treecut::TreeCutConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    /// Graphs smaller than this always take the direct path.
    pub min_n_for_contraction: usize,
    /// Upper clamp on the degree-derived `eps` handed to the contraction.
    pub eps_cap: f64,
    /// Charge the small-lambda exact formula when the degree is below `n^(2 eps*)`.
    pub small_lambda_branch: bool,
    /// Run BFS and the tree stages as message passing when `n` is at most this; 0 disables.
    pub simulate_up_to: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { min_n_for_contraction: 96, eps_cap: 0.45, small_lambda_branch: true, simulate_up_to: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Input weights must lie in `1..=n^weight_exponent`.
    pub weight_exponent: u32,
    pub selection: SelectionConfig,
    pub sim: SimConfig,
    pub msgc: MsgcConfig,
    pub treecut: TreeCutConfig,
    pub charges: ChargeRegistry,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            weight_exponent: 4,
            selection: SelectionConfig::default(),
            sim: SimConfig::default(),
            msgc: MsgcConfig::default(),
            treecut: TreeCutConfig::default(),
            charges: ChargeRegistry::default(),
        }
    }
}

impl Config {
    /// Parses a possibly partial file. Formulas missing from `[charges.formulas]`
    /// keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        for (label, f) in ChargeRegistry::default().formulas {
            cfg.charges.formulas.entry(label).or_insert(f);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}
