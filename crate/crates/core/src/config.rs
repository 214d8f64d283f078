//! Run configuration shared by the CLI and the acceptance suite.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Budgets, seeds and defaults. With a fixed seed and configuration, JSON
/// outputs are byte-stable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Default rank cutoff for blended constructions.
    pub rank: usize,
    /// Per-(node, rank) cap on the estimated number of domain candidates.
    pub element_budget: u64,
    /// Cap on universe carrier sizes (`|V_5|` exceeds it by default).
    pub universe_budget: u64,
    /// Cap on the number of valuations a validity sweep may enumerate.
    pub sweep_budget: u64,
    /// Sample count for randomized property checks.
    pub samples: usize,
    /// Seed for every randomized sweep.
    pub seed: u64,
    /// Parallelism hint for sweeps that can be partitioned.
    pub jobs: usize,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rank: 3,
            element_budget: 1_000_000,
            universe_budget: 10_000,
            sweep_budget: 1_000_000,
            samples: 200,
            seed: 0xD15C0,
            jobs: 0,
            format: OutputFormat::Text,
        }
    }
}

impl RunConfig {
    /// Apply the `KRIPKE_BLEND_BUDGET` environment override for the element
    /// budget.
    pub fn from_env() -> Self {
        let mut config = RunConfig::default();
        if let Ok(raw) = std::env::var("KRIPKE_BLEND_BUDGET") {
            if let Ok(v) = raw.parse::<u64>() {
                config.element_budget = v;
            }
        }
        config
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rank == 0 {
            return Err(ConfigError("rank must be positive".into()));
        }
        for (name, v) in [
            ("element budget", self.element_budget),
            ("universe budget", self.universe_budget),
            ("sweep budget", self.sweep_budget),
        ] {
            if v == 0 {
                return Err(ConfigError(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn zero_budgets_are_rejected() {
        let mut c = RunConfig::default();
        c.sweep_budget = 0;
        assert!(c.validate().is_err());
    }
}
