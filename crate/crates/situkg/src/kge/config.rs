//! Training configuration for translational graph embeddings.

use crate::error::{Error, Result};
use crate::kg::default_forbidden;
use serde::{Deserialize, Serialize};

/// Distance norm used by the score function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KgeConfig {
    pub dim: usize,
    pub margin: f64,
    pub norm: Norm,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub negatives_per_positive: usize,
    pub seed: u64,
    /// Project entity rows back into the unit ball after every epoch.
    pub entity_norm_constraint: bool,
    /// Labels the leakage guard refuses to see among entity names.
    /// Empty disables the guard (toy graphs, tests).
    pub forbidden_labels: Vec<String>,
}

impl Default for KgeConfig {
    fn default() -> Self {
        KgeConfig {
            dim: 128,
            margin: 1.0,
            norm: Norm::L2,
            learning_rate: 0.01,
            epochs: 100,
            batch_size: 256,
            negatives_per_positive: 1,
            seed: 42,
            entity_norm_constraint: true,
            forbidden_labels: default_forbidden(),
        }
    }
}

impl KgeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("dim must be at least 1".into()));
        }
        if !(self.margin > 0.0) {
            return Err(Error::Config(format!("margin must be > 0, got {}", self.margin)));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if self.negatives_per_positive == 0 {
            return Err(Error::Config("negatives_per_positive must be at least 1".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::Config(format!(
                "learning_rate must be finite and non-negative, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: KgeConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("bad KGE config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
