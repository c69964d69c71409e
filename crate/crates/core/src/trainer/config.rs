use crate::error::{Error, Result};
use std::path::Path;

/// Training hyperparameters. Defaults follow the reference setting.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// N: anchors retrieved per sample.
    pub anchors_n: usize,
    /// n: epochs of fixed (indicator-ranked) matching before dynamic matching.
    pub warmup_epochs: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 20,
            batch: 32,
            lr: 8e-5,
            mu1: 0.1,
            mu2: 1.0,
            anchors_n: 3,
            warmup_epochs: 5,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.warmup_epochs > self.epochs {
            return Err(Error::InvalidInput(format!(
                "warm-up n ({}) must not exceed epochs ({})",
                self.warmup_epochs, self.epochs
            )));
        }
        if self.mu1 < 0.0 || self.mu2 < 0.0 {
            return Err(Error::InvalidInput("mu1 and mu2 must be >= 0".into()));
        }
        if self.batch == 0 || self.epochs == 0 {
            return Err(Error::InvalidInput("batch and epochs must be >= 1".into()));
        }
        Ok(())
    }

    /// Parse a flat `key=value` config file. Unknown keys are rejected.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: missing '='", lineno + 1)))?;
            let value = value.trim();
            let bad = |what: &str| Error::Parse(format!("config line {}: bad {what}", lineno + 1));
            match key.trim() {
                "epochs" => cfg.epochs = value.parse().map_err(|_| bad("epochs"))?,
                "batch" => cfg.batch = value.parse().map_err(|_| bad("batch"))?,
                "lr" => cfg.lr = value.parse().map_err(|_| bad("lr"))?,
                "mu1" => cfg.mu1 = value.parse().map_err(|_| bad("mu1"))?,
                "mu2" => cfg.mu2 = value.parse().map_err(|_| bad("mu2"))?,
                "n_anchors" => cfg.anchors_n = value.parse().map_err(|_| bad("n_anchors"))?,
                "n_warmup" => cfg.warmup_epochs = value.parse().map_err(|_| bad("n_warmup"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                other => {
                    return Err(Error::Parse(format!(
                        "config line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_key_values(&std::fs::read_to_string(path)?)
    }

    /// Canonical `key=value` echo, the config-hash input.
    pub fn to_key_values(&self) -> String {
        format!(
            "epochs={}\nbatch={}\nlr={}\nmu1={}\nmu2={}\nn_anchors={}\nn_warmup={}\nseed={}\n",
            self.epochs,
            self.batch,
            self.lr,
            self.mu1,
            self.mu2,
            self.anchors_n,
            self.warmup_epochs,
            self.seed
        )
    }
}
