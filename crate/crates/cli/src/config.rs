//! Config-file parsing and layering: built-in defaults, then a flat
//! `key = value` file, then command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use equimetric::{Error, Result, SweepConfig};

/// Resolved parameters for the flow command, including the initial
/// state (defaults are the standard flow state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub gamma: f64,
    pub omega: f64,
    pub steps: usize,
    pub break_mean_rate: Option<String>,
    pub break_var_rate: Option<String>,
    pub mu1: f64,
    pub mu2: f64,
    pub tau_sd1: f64,
    pub tau_sd2: f64,
    pub err_sd1: f64,
    pub err_sd2: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        let standard = equimetric::InitialState::standard();
        Self {
            gamma: 1.125,
            omega: 0.0,
            steps: 1000,
            break_mean_rate: None,
            break_var_rate: None,
            mu1: standard.mu1,
            mu2: standard.mu2,
            tau_sd1: standard.tau_sd1,
            tau_sd2: standard.tau_sd2,
            err_sd1: standard.err_sd1,
            err_sd2: standard.err_sd2,
        }
    }
}

/// Parses flat `key = value` text. Blank lines and `#` comments are
/// skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Parse(format!("line {}: expected 'key = value'", lineno + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Applies config-file pairs onto a sweep config. Unknown keys and
/// unparsable values are collected into one usage error listing every
/// offending field.
pub fn apply_sweep_pairs(config: &mut SweepConfig, pairs: &[(String, String)]) -> Result<()> {
    let mut problems = Vec::new();
    for (key, value) in pairs {
        let outcome = match key.as_str() {
            "n" => value.parse().map(|v| config.n = v).is_ok(),
            "mu1" => value.parse().map(|v| config.mu1 = v).is_ok(),
            "sd1" => value.parse().map(|v| config.sd1 = v).is_ok(),
            "mu2" => value.parse().map(|v| config.mu2 = v).is_ok(),
            "sd2" => value.parse().map(|v| config.sd2 = v).is_ok(),
            "gamma" => value.parse().map(|v| config.gamma = v).is_ok(),
            "k_start" => value.parse().map(|v| config.k_start = v).is_ok(),
            "k_end" => value.parse().map(|v| config.k_end = v).is_ok(),
            "k_step" => value.parse().map(|v| config.k_step = v).is_ok(),
            "seed" => value.parse().map(|v| config.seed = v).is_ok(),
            _ => {
                problems.push(format!("unknown key '{key}'"));
                true
            }
        };
        if !outcome {
            problems.push(format!("bad value for '{key}': '{value}'"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(problems.join("; ")))
    }
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_layers_pairs() {
        let text = "# sweep at small scale\nn = 1000\ngamma = 2.0\n\nseed = 9\n";
        let pairs = parse_key_values(text).unwrap();
        let mut config = SweepConfig::default();
        apply_sweep_pairs(&mut config, &pairs).unwrap();
        assert_eq!(config.n, 1000);
        assert_eq!(config.gamma, 2.0);
        assert_eq!(config.seed, 9);
        assert_eq!(config.mu1, 63.05);
    }

    #[test]
    fn lists_every_offending_field() {
        let pairs = parse_key_values("n = x\nbogus = 1\nk_step = ?\n").unwrap();
        let mut config = SweepConfig::default();
        let err = apply_sweep_pairs(&mut config, &pairs).unwrap_err().to_string();
        assert!(err.contains("'n'"), "{err}");
        assert!(err.contains("'bogus'"), "{err}");
        assert!(err.contains("'k_step'"), "{err}");
    }

    #[test]
    fn rejects_lines_without_separator() {
        assert!(parse_key_values("n 1000").is_err());
    }
}
