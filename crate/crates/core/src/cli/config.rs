//! TOML run configuration. Every key is optional; command-line flags take
//! precedence over the file, and the file over the built-in defaults.
//!
//! ```toml
//! command = "diagnose"
//! family = "exp-seq@0,1"
//! tests = ["deriv-ratio", "integral"]
//! n = "1..64"
//! points = ["pq=0,1"]
//! format = "json"
//!
//! [thresholds]
//! div_threshold = 1e3
//!
//! [quadrature]
//! method = "adaptive-simpson"
//!
//! [construct]
//! kind = "prop51"
//! target = "midpoint"
//! eps = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::TrendConfig;
use crate::error::{invalid, Result};
use crate::quadrature::{QuadMethod, QuadratureConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConstructKind {
    Prop51,
    Prop53,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSettings {
    pub window: Option<usize>,
    pub div_threshold: Option<f64>,
    pub zero_tol: Option<f64>,
    pub stability_tol: Option<f64>,
}

impl ThresholdSettings {
    /// `self` over `base`.
    pub fn or(&self, base: &ThresholdSettings) -> ThresholdSettings {
        ThresholdSettings {
            window: self.window.or(base.window),
            div_threshold: self.div_threshold.or(base.div_threshold),
            zero_tol: self.zero_tol.or(base.zero_tol),
            stability_tol: self.stability_tol.or(base.stability_tol),
        }
    }

    pub fn resolve(&self) -> Result<TrendConfig> {
        let d = TrendConfig::default();
        let cfg = TrendConfig {
            window: self.window.or(d.window),
            div_threshold: self.div_threshold.unwrap_or(d.div_threshold),
            zero_tol: self.zero_tol.unwrap_or(d.zero_tol),
            stability_tol: self.stability_tol.unwrap_or(d.stability_tol),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSettings {
    pub method: Option<String>,
    pub max_step: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl QuadratureSettings {
    pub fn or(&self, base: &QuadratureSettings) -> QuadratureSettings {
        QuadratureSettings {
            method: self.method.clone().or_else(|| base.method.clone()),
            max_step: self.max_step.or(base.max_step),
            abs_tol: self.abs_tol.or(base.abs_tol),
        }
    }

    pub fn resolve(&self) -> Result<QuadratureConfig> {
        let d = QuadratureConfig::default();
        let method: QuadMethod = match &self.method {
            Some(m) => m.parse()?,
            None => d.method,
        };
        QuadratureConfig::new(
            method,
            self.max_step.unwrap_or(d.max_step),
            self.abs_tol.unwrap_or(d.abs_tol),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructSettings {
    pub kind: Option<ConstructKind>,
    pub target: Option<String>,
    pub eps: Option<f64>,
    pub n_max: Option<u32>,
    pub interval: Option<String>,
    pub k_max: Option<u32>,
    pub rationals: Option<usize>,
    pub queries: Option<Vec<String>>,
    pub emit_family: Option<PathBuf>,
    pub certify: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub family: Option<String>,
    pub tests: Option<Vec<String>>,
    pub n: Option<String>,
    pub n_list: Option<Vec<u32>>,
    pub points: Option<Vec<String>>,
    #[serde(default)]
    pub thresholds: ThresholdSettings,
    #[serde(default)]
    pub quadrature: QuadratureSettings,
    pub format: Option<OutputFormat>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub construct: ConstructSettings,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("bad config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Rejects a config written for another subcommand.
    pub fn expect_command(&self, name: &str) -> Result<()> {
        match &self.command {
            Some(c) if c != name => Err(invalid(format!("config is for `{c}`, not `{name}`"))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::parse(
            r#"
            command = "diagnose"
            family = "exp-seq@0,1"
            tests = ["deriv-ratio"]
            n = "1..8"
            format = "json"
            [thresholds]
            window = 4
            [quadrature]
            method = "composite"
            max_step = 0.01
            "#,
        )
        .unwrap();
        assert_eq!(cfg.family.as_deref(), Some("exp-seq@0,1"));
        assert_eq!(cfg.format, Some(OutputFormat::Json));
        assert_eq!(cfg.thresholds.resolve().unwrap().window, Some(4));
        let q = cfg.quadrature.resolve().unwrap();
        assert_eq!(q.method, QuadMethod::CompositeSimpson);
        assert_eq!(q.abs_tol, QuadratureConfig::default().abs_tol);
        assert!(cfg.expect_command("diagnose").is_ok());
        assert!(cfg.expect_command("construct").is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(RunConfig::parse("famly = \"x\"").is_err());
        assert!(RunConfig::parse("[thresholds]\nzero = 1").is_err());
        assert!(RunConfig::parse("[construct]\nkind = \"prop52\"").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = ThresholdSettings {
            zero_tol: Some(0.1),
            div_threshold: Some(5.0),
            ..Default::default()
        };
        let flags = ThresholdSettings {
            zero_tol: Some(0.2),
            ..Default::default()
        };
        let t = flags.or(&file).resolve().unwrap();
        assert_eq!((t.zero_tol, t.div_threshold), (0.2, 5.0));
        let bad = ThresholdSettings {
            zero_tol: Some(-1.0),
            ..Default::default()
        };
        assert!(bad.resolve().is_err());
    }
}
