//! Estimator settings merged from a key=value config file and command-line flags.

use std::path::Path;

use modalcores::{BetaConfig, Error, McoresConfig, Result};
use serde::{Deserialize, Serialize};

use crate::args::{BetaModeArg, EstimatorArgs};

/// Effective estimator configuration, echoed into every run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSettings {
    /// `None` until resolved against the sample size.
    pub k: Option<usize>,
    pub beta_mode: String,
    pub beta: Option<f64>,
    pub delta: f64,
    pub eps0: f64,
    pub eps_prune: f64,
    pub jitter: Option<f64>,
    pub seed: u64,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self {
            k: None,
            beta_mode: "practical".into(),
            beta: None,
            delta: BetaConfig::DEFAULT_DELTA,
            eps0: 0.0,
            eps_prune: 0.0,
            jitter: None,
            seed: 0,
        }
    }
}

impl FitSettings {
    pub fn beta_config(&self) -> Result<BetaConfig> {
        let mode = self.beta_mode.parse()?;
        let cfg = BetaConfig {
            mode,
            delta: self.delta,
            custom_value: self.beta,
        };
        if self.beta.is_some() && mode != modalcores::BetaMode::Custom {
            return Err(Error::InvalidConfig(format!(
                "--beta only applies to --beta-mode custom, not {mode}"
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Estimator configuration for a dataset of `n` points.
    pub fn mcores_config(&self, n: usize) -> Result<McoresConfig> {
        let k = match self.k {
            Some(k) => k,
            None => modalcores::default_k(n)?,
        };
        let cfg = McoresConfig::new(k)
            .with_beta(self.beta_config()?)
            .with_eps0(self.eps0)
            .with_eps_prune(self.eps_prune);
        cfg.validate()?;
        if let Some(j) = self.jitter {
            if !(j.is_finite() && j > 0.0) {
                return Err(Error::InvalidConfig(format!("jitter must be > 0, got {j}")));
            }
        }
        Ok(cfg)
    }

    /// Copy with `k` fixed.
    pub fn with_k(&self, k: usize) -> Self {
        Self {
            k: Some(k),
            ..self.clone()
        }
    }
}

fn mode_name(mode: BetaModeArg) -> &'static str {
    match mode {
        BetaModeArg::Practical => "practical",
        BetaModeArg::Theoretical => "theoretical",
        BetaModeArg::Custom => "custom",
    }
}

fn parse_value<V: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<V> {
    value.parse().map_err(|_| {
        Error::InvalidConfig(format!("config line {line}: bad value {value:?} for {key}"))
    })
}

/// Reads `key = value` lines; `#` starts a comment. Keys are the long flag
/// names, with either `-` or `_`.
pub fn parse_config(text: &str) -> Result<EstimatorArgs> {
    let mut out = EstimatorArgs::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("config line {line}: expected key=value"))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "k" => out.k = Some(parse_value(&key, value, line)?),
            "beta-mode" => {
                out.beta_mode = Some(match value {
                    "practical" => BetaModeArg::Practical,
                    "theoretical" => BetaModeArg::Theoretical,
                    "custom" => BetaModeArg::Custom,
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "config line {line}: unknown beta mode {value:?}"
                        )))
                    }
                })
            }
            "beta" => out.beta = Some(parse_value(&key, value, line)?),
            "delta" => out.delta = Some(parse_value(&key, value, line)?),
            "eps0" => out.eps0 = Some(parse_value(&key, value, line)?),
            "eps-prune" => out.eps_prune = Some(parse_value(&key, value, line)?),
            "jitter" => out.jitter = Some(parse_value(&key, value, line)?),
            "seed" => out.seed = Some(parse_value(&key, value, line)?),
            other => {
                return Err(Error::InvalidConfig(format!("config line {line}: unknown key {other:?}")))
            }
        }
    }
    Ok(out)
}

/// Flags win over the config file, which wins over the defaults.
pub fn resolve(flags: &EstimatorArgs) -> Result<FitSettings> {
    let file = match &flags.config {
        Some(path) => load_config(path)?,
        None => EstimatorArgs::default(),
    };
    let mut s = FitSettings::default();
    let beta = flags.beta.or(file.beta);
    s.k = flags.k.or(file.k);
    s.beta_mode = match flags.beta_mode.or(file.beta_mode) {
        Some(m) => mode_name(m).into(),
        None if beta.is_some() => "custom".into(),
        None => s.beta_mode,
    };
    s.beta = beta;
    s.delta = flags.delta.or(file.delta).unwrap_or(s.delta);
    s.eps0 = flags.eps0.or(file.eps0).unwrap_or(s.eps0);
    s.eps_prune = flags.eps_prune.or(file.eps_prune).unwrap_or(s.eps_prune);
    s.jitter = flags.jitter.or(file.jitter);
    s.seed = flags.seed.or(file.seed).unwrap_or(s.seed);
    s.beta_config()?;
    Ok(s)
}

fn load_config(path: &Path) -> Result<EstimatorArgs> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
