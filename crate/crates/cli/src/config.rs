//! Resolved run configuration and the `key = value` config-file format.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use ucp_core::analysis::Method;
use ucp_core::PotentialSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

/// Everything one invocation needs. Unset fields fall back to per-command
/// defaults at run time; spec fields have no defaults except `nu` and `V`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nu: Option<f64>,
    #[serde(rename = "S", skip_serializing_if = "Option::is_none", default)]
    pub stages: Option<usize>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none", default)]
    pub length: Option<f64>,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none", default)]
    pub height: Option<f64>,

    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rho_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_rho: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_k: Option<usize>,
    /// Stage list for `saturate`.
    #[serde(rename = "stages", skip_serializing_if = "Option::is_none", default)]
    pub stage_list: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<f64>,
    #[serde(rename = "V0", skip_serializing_if = "Option::is_none", default)]
    pub v0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coarse: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,

    #[serde(default)]
    pub format: Format,
    /// Not serialized, like `workers`: output bytes must not depend on where
    /// they are written or how many threads ran.
    #[serde(skip)]
    pub out: Option<String>,
    /// Worker threads; 0 picks the machine default.
    #[serde(skip)]
    pub workers: usize,
}

/// A malformed or missing input: exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, UsageError>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| UsageError(format!("bad value for {key}: {value:?} ({e})")))
}

pub fn parse_stage_list(value: &str) -> Result<Vec<usize>, String> {
    value.split(',').map(|s| s.trim().parse::<usize>().map_err(|e| format!("bad stage {s:?}: {e}"))).collect()
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), UsageError> {
        let key = key.replace('-', "_");
        match key.as_str() {
            "N" => self.n = Some(parse(&key, value)?),
            "rho" => self.rho = Some(parse(&key, value)?),
            "mu" => self.mu = Some(parse(&key, value)?),
            "nu" => self.nu = Some(parse(&key, value)?),
            "S" => self.stages = Some(parse(&key, value)?),
            "L" => self.length = Some(parse(&key, value)?),
            "V" => self.height = Some(parse(&key, value)?),
            "k" => self.k = Some(parse(&key, value)?),
            "k_min" => self.k_min = Some(parse(&key, value)?),
            "k_max" => self.k_max = Some(parse(&key, value)?),
            "points" => self.points = Some(parse(&key, value)?),
            "method" => self.method = Some(parse(&key, value)?),
            "rho_min" => self.rho_min = Some(parse(&key, value)?),
            "rho_max" => self.rho_max = Some(parse(&key, value)?),
            "n_rho" => self.n_rho = Some(parse(&key, value)?),
            "n_k" => self.n_k = Some(parse(&key, value)?),
            "stages" => self.stage_list = Some(parse_stage_list(value).map_err(UsageError)?),
            "delta" => self.delta = Some(parse(&key, value)?),
            "V0" => self.v0 = Some(parse(&key, value)?),
            "k_lo" => self.k_lo = Some(parse(&key, value)?),
            "k_hi" => self.k_hi = Some(parse(&key, value)?),
            "coarse" => self.coarse = Some(parse(&key, value)?),
            "threshold" => self.threshold = Some(parse(&key, value)?),
            "out" => self.out = Some(value.to_string()),
            "format" => self.format = parse(&key, value)?,
            "workers" => self.workers = parse(&key, value)?,
            _ => return Err(UsageError(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Reads a config file: flat `key = value` text, or the JSON output of a
    /// previous run, whose `meta.config` is taken verbatim.
    pub fn from_file_text(command: &str, text: &str) -> Result<Self, UsageError> {
        if text.trim_start().starts_with('{') {
            let value: serde_json::Value =
                serde_json::from_str(text).map_err(|e| UsageError(format!("bad JSON config: {e}")))?;
            let config = value.get("meta").and_then(|m| m.get("config")).cloned().unwrap_or(value);
            let mut parsed: RunConfig =
                serde_json::from_value(config).map_err(|e| UsageError(format!("bad JSON config: {e}")))?;
            parsed.command = command.to_string();
            return Ok(parsed);
        }
        let mut config = RunConfig { command: command.to_string(), ..Default::default() };
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("config line {}: expected key = value", number + 1)))?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    /// Overlays every field that is set in `other`.
    pub fn overlay(&mut self, other: &RunConfig) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field.clone(); })*
            };
        }
        take!(
            n, rho, mu, nu, stages, length, height, k, k_min, k_max, points, method, rho_min, rho_max, n_rho, n_k,
            stage_list, delta, v0, k_lo, k_hi, coarse, threshold, out
        );
    }

    fn need<T: Copy>(value: Option<T>, name: &str) -> Result<T, UsageError> {
        value.ok_or_else(|| UsageError(format!("missing --{name}")))
    }

    /// The potential spec; `nu` and `V` default to 0.
    pub fn spec(&self) -> Result<PotentialSpec, UsageError> {
        Ok(PotentialSpec::new(
            Self::need(self.n, "N")?,
            Self::need(self.rho, "rho")?,
            Self::need(self.mu, "mu")?,
            self.nu.unwrap_or(0.0),
            Self::need(self.stages, "S")?,
            Self::need(self.length, "L")?,
            self.height.unwrap_or(0.0),
        ))
    }

    pub fn require<T: Copy>(&self, value: Option<T>, name: &str) -> Result<T, UsageError> {
        Self::need(value, name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing_and_comments() {
        let text = "# cantor\nN = 2\nrho=3 # triadic\nmu = 1\nS = 2\nL = 1\nk-min = 0.5\nstages = 6, 12\n";
        let c = RunConfig::from_file_text("sweep", text).unwrap();
        assert_eq!(c.n, Some(2));
        assert_eq!(c.rho, Some(3.0));
        assert_eq!(c.k_min, Some(0.5));
        assert_eq!(c.stage_list, Some(vec![6, 12]));
        assert_eq!(c.spec().unwrap().height, 0.0);
    }

    #[test]
    fn file_errors_are_usage_errors() {
        assert!(RunConfig::from_file_text("x", "N = two").is_err());
        assert!(RunConfig::from_file_text("x", "bogus = 1").is_err());
        assert!(RunConfig::from_file_text("x", "N 2").is_err());
    }

    #[test]
    fn overlay_prefers_set_fields() {
        let mut base = RunConfig::from_file_text("x", "N = 2\nrho = 3").unwrap();
        let flags = RunConfig { rho: Some(4.0), ..Default::default() };
        base.overlay(&flags);
        assert_eq!((base.n, base.rho), (Some(2), Some(4.0)));
    }

    #[test]
    fn missing_spec_field_is_named() {
        let c = RunConfig::from_file_text("x", "N = 2").unwrap();
        assert_eq!(c.spec().unwrap_err().0, "missing --rho");
    }
}
