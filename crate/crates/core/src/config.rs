//! Engine configuration file.
//!
//! ```json
//! {
//!   "global_seed": 42,
//!   "combine_table": {"by_max": [[0.7,0.24,0.05,0.01], ...]},
//!   "pack_spec": {"cards_per_pack": 5, "rarity_weights": [...], "catalog": [...]},
//!   "prices": {"pack_currency": 100, "pack_xp": 100, "upgrade_xp_per_level": 100},
//!   "fee_bp": 200,
//!   "question_file": "questions.json",
//!   "admin_secret": "change-me",
//!   "state_dir": "state"
//! }
//! ```
//!
//! Every field is optional. Relative paths resolve against the directory
//! holding the config file. Without `question_file` the bundled starter set
//! is used; without `admin_secret` nobody can log in as admin.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::contracts::ParamsVersion;
use crate::ledger::Genesis;
use crate::rarity::{CombineTable, PackSpec};
use crate::trivia::{QuestionBank, TriviaError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Questions(#[from] TriviaError),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Prices {
    pub pack_currency: u64,
    pub pack_xp: u64,
    pub upgrade_xp_per_level: u64,
}

impl Default for Prices {
    fn default() -> Self {
        let p = ParamsVersion::default();
        Prices {
            pack_currency: p.pack_price_currency,
            pack_xp: p.pack_price_xp,
            upgrade_xp_per_level: p.upgrade_xp_cost_per_level,
        }
    }
}

fn default_fee() -> u16 {
    ParamsVersion::default().market_fee_basis_points
}

fn default_state_dir() -> PathBuf {
    PathBuf::from("state")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    #[serde(default)]
    pub global_seed: u64,
    #[serde(default)]
    pub combine_table: CombineTable,
    #[serde(default)]
    pub pack_spec: PackSpec,
    #[serde(default)]
    pub prices: Prices,
    #[serde(default = "default_fee")]
    pub fee_bp: u16,
    #[serde(default)]
    pub question_file: Option<PathBuf>,
    #[serde(default)]
    pub admin_secret: Option<String>,
    #[serde(default = "default_state_dir")]
    pub state_dir: PathBuf,
}

impl Default for EngineConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

impl EngineConfig {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut config = Self::from_json(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.state_dir = base.join(&config.state_dir);
        config.question_file = config.question_file.map(|q| base.join(q));
        config.genesis()?;
        Ok(config)
    }

    /// Params version 1, built from the config's tables and prices.
    pub fn initial_params(&self) -> ParamsVersion {
        ParamsVersion {
            version: 1,
            combine_table: self.combine_table.clone(),
            pack_spec: self.pack_spec.clone(),
            pack_price_currency: self.prices.pack_currency,
            pack_price_xp: self.prices.pack_xp,
            upgrade_xp_cost_per_level: self.prices.upgrade_xp_per_level,
            market_fee_basis_points: self.fee_bp,
        }
    }

    pub fn genesis(&self) -> Result<Genesis, ConfigError> {
        let params = self.initial_params();
        params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(Genesis {
            global_seed: self.global_seed,
            params,
        })
    }

    pub fn question_bank(&self) -> Result<QuestionBank, ConfigError> {
        match &self.question_file {
            Some(path) => Ok(QuestionBank::load_file(path)?),
            None => Ok(QuestionBank::starter()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let c = EngineConfig::default();
        assert_eq!(c.initial_params(), ParamsVersion::default());
        assert_eq!(c.global_seed, 0);
        assert_eq!(c.question_bank().unwrap().len(), 20);
    }

    #[test]
    fn rejects_bad_tables_and_unknown_fields() {
        let bad_row = r#"{"combine_table":{"by_max":[[0.5,0.5,0.5,0],[1,0,0,0],[1,0,0,0],[1,0,0,0]]}}"#;
        assert!(EngineConfig::from_json(bad_row).is_err());
        assert!(EngineConfig::from_json(r#"{"seed": 1}"#).is_err());
        let fee = EngineConfig::from_json(r#"{"fee_bp": 2000}"#).unwrap();
        assert!(fee.genesis().is_err());
    }

    #[test]
    fn sixteen_row_override() {
        let row = "[0.25,0.25,0.25,0.25]";
        let rows = vec![format!("[{}]", vec![row; 4].join(",")); 4].join(",");
        let c = EngineConfig::from_json(&format!(r#"{{"combine_table":{{"by_pair":[{rows}]}}}}"#)).unwrap();
        assert!(matches!(c.combine_table, CombineTable::ByPair(_)));
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("questions.json"),
            r#"[{"qid":"a","prompt":"?","choices":["x","y"],"answer_index":1,"difficulty":"easy"}]"#,
        )
        .unwrap();
        let cfg = dir.path().join("engine.json");
        std::fs::write(&cfg, r#"{"global_seed": 7, "question_file": "questions.json", "state_dir": "st"}"#).unwrap();
        let c = EngineConfig::load(&cfg).unwrap();
        assert_eq!(c.state_dir, dir.path().join("st"));
        assert_eq!(c.question_bank().unwrap().len(), 1);
        assert_eq!(c.genesis().unwrap().global_seed, 7);
    }
}
