//! Run configuration: a flat TOML file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scouting_core::analytic::optimal_decoy_mix;
use scouting_core::{BeliefMode, GameParams, Variant};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// Every key is optional so that a file and a set of flags can be layered.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_tilde_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs1: Option<BeliefMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beliefs2: Option<BeliefMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Horizons T for the no-engagement probability.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variants: Option<Vec<Variant>>,
    /// Sweep `q = p` instead of the full `p x q` product.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<bool>,
}

pub const DEFAULT_HORIZONS: [u32; 4] = [1, 5, 10, 20];

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Values set in `other` take precedence.
    pub fn overlay(self, other: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            variant, p, q, p_tilde_b, delta, xi1, xi2, beliefs1, beliefs2, episodes,
            max_iterations, seed, format, out, horizons, p_values, q_values, delta_values,
            variants, diagonal
        )
    }

    pub fn variant(&self) -> Variant {
        self.variant.unwrap_or(Variant::PitchedBattle)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn horizons(&self) -> Vec<u32> {
        self.horizons.clone().unwrap_or_else(|| DEFAULT_HORIZONS.to_vec())
    }

    pub fn max_iterations(&self) -> Result<u64, CliError> {
        match self.max_iterations {
            Some(0) => Err(CliError::field("max_iterations", "must be at least 1")),
            Some(n) => Ok(n),
            None => Ok(scouting_core::engine::DEFAULT_MAX_ITERATIONS),
        }
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::field("seed", "required for simulation (pass --seed)"))
    }

    pub fn episodes(&self) -> Result<u64, CliError> {
        match self.episodes {
            None => Err(CliError::field("episodes", "required for simulation (pass --episodes)")),
            Some(0) => Err(CliError::field("episodes", "must be at least 1")),
            Some(n) => Ok(n),
        }
    }

    /// Game at precisions `(p, q)` and decoy chance `delta`, with the
    /// configured everything-else. Unset decoy mixes default to the
    /// analytic optimum.
    pub fn params_at(&self, variant: Variant, p: f64, q: f64, delta: f64) -> Result<GameParams, CliError> {
        let default_mix = |r: f64| {
            if delta > 0.0 {
                optimal_decoy_mix(r, delta).map_err(CliError::from)
            } else {
                Ok(0.0)
            }
        };
        let xi1 = match self.xi1 {
            Some(x) => x,
            None => default_mix(q)?,
        };
        let xi2 = match self.xi2 {
            Some(x) => x,
            None => default_mix(p)?,
        };
        let mut params = GameParams::new(p, q)
            .with_variant(variant)
            .with_decoys(delta, xi1, xi2)
            .with_beliefs(
                self.beliefs1.unwrap_or_default(),
                self.beliefs2.unwrap_or_default(),
            );
        params.p_tilde_b = self.p_tilde_b;
        params.validate()?;
        Ok(params)
    }

    pub fn params(&self) -> Result<GameParams, CliError> {
        let p = self.p.ok_or_else(|| CliError::field("p", "missing (pass --p)"))?;
        let q = self.q.ok_or_else(|| CliError::field("q", "missing (pass --q)"))?;
        self.params_at(self.variant(), p, q, self.delta.unwrap_or(0.0))
    }
}

/// Parses `a,b,c` or an inclusive `start:stop:step` range.
pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{s}` is not a number"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("bad range `{text}`"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(format!("bad value list `{text}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_prefers_flags() {
        let file = RunConfig {
            p: Some(0.6),
            q: Some(0.7),
            seed: Some(1),
            ..Default::default()
        };
        let flags = RunConfig {
            p: Some(0.9),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.p, Some(0.9));
        assert_eq!(merged.q, Some(0.7));
        assert_eq!(merged.seed, Some(1));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_toml("p = 0.6\ngamma = 0.2\n").unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        let ok = RunConfig::from_toml("p = 0.6\nvariant = \"initiative\"\np_values = [0.5, 0.6]\n").unwrap();
        assert_eq!(ok.variant, Some(Variant::Initiative));
    }

    #[test]
    fn defaults_to_optimal_decoy_mix() {
        let cfg = RunConfig {
            p: Some(0.75),
            q: Some(0.6),
            delta: Some(1.0),
            ..Default::default()
        };
        let params = cfg.params().unwrap();
        assert!((params.xi2 - 0.5).abs() < 1e-12);
        assert!((params.xi1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn validation_names_field() {
        let cfg = RunConfig {
            p: Some(1.5),
            q: Some(0.6),
            ..Default::default()
        };
        match cfg.params().unwrap_err() {
            CliError::Validation(msg) => assert!(msg.contains('p'), "{msg}"),
            other => panic!("{other:?}"),
        }
        let cfg = RunConfig {
            episodes: Some(0),
            ..Default::default()
        };
        assert!(cfg.episodes().unwrap_err().to_string().contains("episodes"));
        assert!(RunConfig::default().seed().is_err());
    }

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("0.5,0.6").unwrap(), vec![0.5, 0.6]);
        let r = parse_values("0.5:1.0:0.1").unwrap();
        assert_eq!(r.len(), 6);
        assert!((r[5] - 1.0).abs() < 1e-12);
        assert!(parse_values("0.5:0.4:0.1").is_err());
        assert!(parse_values("a,b").is_err());
    }
}
