//! JSON configuration files. Command-line flags override file values, which
//! override the built-in defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Every key is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub h: Option<f64>,
    #[serde(alias = "K")]
    pub kick: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    #[serde(alias = "N")]
    pub n_spins: Option<usize>,
    pub dt_mf: Option<f64>,
    pub dt_q: Option<f64>,
    pub n_periods: Option<usize>,
    pub n_traj: Option<usize>,
    pub n_init: Option<usize>,
    pub seed: Option<u64>,
    pub k0: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        assert_eq!(pick(Some(1), Some(2), 3), 1);
        assert_eq!(pick(None, Some(2), 3), 2);
        assert_eq!(pick(None::<i32>, None, 3), 3);
    }

    #[test]
    fn accepts_symbol_aliases_and_rejects_unknown_keys() {
        let c: FileConfig = serde_json::from_str(r#"{"K": 5.0, "N": 32, "gamma": 0.1}"#).unwrap();
        assert_eq!(
            (c.kick, c.n_spins, c.gamma),
            (Some(5.0), Some(32), Some(0.1))
        );
        assert!(serde_json::from_str::<FileConfig>(r#"{"kappa": 1}"#).is_err());
    }
}
