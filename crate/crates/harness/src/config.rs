use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// Seed used when neither `--seed` nor `CALKIN_SEED` is given.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Slack for inequalities.
    pub ineq: f64,
    /// Slack for identities.
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ineq: calkin_core::INEQ_TOL, identity: calkin_core::IDENTITY_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerances: Tolerances,
    pub horizon: usize,
    pub depth: usize,
    pub r_max: usize,
    /// Largest matrix dimension drawn by the suite.
    pub max_dim: usize,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(seed: u64) -> Self {
        RunConfig {
            seed,
            tolerances: Tolerances::default(),
            horizon: 1000,
            depth: 40,
            r_max: 8,
            max_dim: 6,
            out_dir: None,
            format: Format::Json,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let t = &self.tolerances;
        if !(t.ineq >= 0.0 && t.identity >= 0.0) {
            return Err(HarnessError::Usage("tolerances must be non-negative".into()));
        }
        if self.horizon == 0 || self.depth == 0 || self.r_max == 0 {
            return Err(HarnessError::Usage("horizon, depth and r_max must be positive".into()));
        }
        if !(2..=64).contains(&self.max_dim) {
            return Err(HarnessError::Usage(format!("matrix size cap {} outside 2..=64", self.max_dim)));
        }
        Ok(())
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig::new(DEFAULT_SEED)
    }
}
