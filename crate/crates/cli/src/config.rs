use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tailsum_core::radial::make_radial;
use tailsum_core::{Estimator, McOptions, ModelParams, ModelSpec, RadialKind, RadialLaw, Variant};

use crate::error::CliError;

const BUNDLED: [(&str, &str); 4] = [
    ("table1", include_str!("../configs/table1.toml")),
    ("table2", include_str!("../configs/table2.toml")),
    ("table3", include_str!("../configs/table3.toml")),
    ("table4", include_str!("../configs/table4.toml")),
];

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialConfig {
    pub kind: RadialKind,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default = "McConfig::default_n")]
    pub n: u64,
    #[serde(default = "McConfig::default_seed")]
    pub seed: u64,
    /// False skips the Monte Carlo column of `table`.
    #[serde(default = "McConfig::default_enabled")]
    pub enabled: bool,
}

impl McConfig {
    fn default_n() -> u64 {
        McOptions::default().n
    }
    fn default_seed() -> u64 {
        McOptions::default().seed
    }
    fn default_enabled() -> bool {
        true
    }

    pub fn options(&self, workers: Option<usize>) -> McOptions {
        McOptions {
            n: self.n,
            seed: self.seed,
            estimator: self.estimator,
            workers,
        }
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            estimator: Estimator::default(),
            n: Self::default_n(),
            seed: Self::default_seed(),
            enabled: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

/// A model plus everything a run needs, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub gamma: f64,
    /// Common off-diagonal correlation; exclusive with `sigma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub u_list: Vec<f64>,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default = "one")]
    pub epsilon_c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialConfig>,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads `arg` as a file path, falling back to the bundled configs
    /// `table1` … `table4`.
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let path = Path::new(arg);
        if path.is_file() {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            return Self::from_toml(&text).map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
                other => other,
            });
        }
        match bundled(arg) {
            Some(text) => Self::from_toml(text),
            None => Err(CliError::Config(format!(
                "no config file '{arg}' and no bundled config of that name (bundled: {})",
                BUNDLED.map(|(n, _)| n).join(", ")
            ))),
        }
    }

    fn sigma_entries(&self) -> Result<Vec<f64>, CliError> {
        let d = self.d;
        match (&self.rho, &self.sigma) {
            (Some(_), Some(_)) => Err(CliError::Config("give either rho or sigma, not both".into())),
            (Some(rho), None) => Ok((0..d * d).map(|k| if k / d == k % d { 1.0 } else { *rho }).collect()),
            (None, Some(rows)) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(CliError::Config(format!("sigma must be a {d} x {d} matrix")));
                }
                Ok(rows.concat())
            }
            (None, None) => Ok((0..d * d).map(|k| if k / d == k % d { 1.0 } else { 0.0 }).collect()),
        }
    }

    pub fn radial_law(&self) -> Result<RadialLaw, CliError> {
        match &self.radial {
            // d = 0 is left for model validation to report
            None => Ok(RadialLaw::chi(self.d.max(1) as u32)),
            Some(r) => make_radial(r.kind, &r.params).map_err(CliError::from),
        }
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams {
            dim: self.d,
            lambda: self.lambda.clone().unwrap_or_else(|| vec![1.0; self.d]),
            beta: self.beta.clone().unwrap_or_else(|| vec![1.0; self.d]),
            gamma: self.gamma,
            sigma: self.sigma_entries()?,
            radial: self.radial_law()?,
        })
    }

    pub fn spec(&self) -> Result<ModelSpec, CliError> {
        ModelSpec::new(self.params()?).map_err(CliError::from)
    }
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = RunConfig::from_toml("d = 3\nu_list = [10.0]\n").unwrap();
        assert_eq!(c.gamma, 1.0);
        assert_eq!(c.variant, Variant::DensityForm);
        assert_eq!(c.epsilon_c, 1.0);
        assert_eq!(c.radial_law().unwrap(), RadialLaw::chi(3));
        let p = c.params().unwrap();
        assert_eq!(p.lambda, vec![1.0; 3]);
        assert_eq!(p.beta, vec![1.0; 3]);
        assert_eq!(p.sigma[1], 0.0);
    }

    #[test]
    fn round_trip() {
        for name in bundled_names() {
            let c = RunConfig::load(name).unwrap();
            assert_eq!(RunConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
        }
        let full = RunConfig::from_toml(
            r#"
            d = 2
            lambda = [1.5, 0.25]
            beta = [1.0, 0.7]
            gamma = 0.9
            sigma = [[1.0, 0.3], [0.3, 1.0]]
            u_list = [3.0, 1e5]
            variant = "limit"
            epsilon_c = 0.15
            [radial]
            kind = "weibull"
            params = [2.0, 1.5]
            [mc]
            estimator = "conditional-max"
            n = 1000
            seed = 5
            [output]
            format = "markdown"
            path = "out.md"
            "#,
        )
        .unwrap();
        assert_eq!(RunConfig::from_toml(&full.to_toml().unwrap()).unwrap(), full);
    }

    #[test]
    fn rejects_ambiguous_correlation_and_unknown_keys() {
        let c = RunConfig::from_toml("d = 2\nrho = 0.1\nsigma = [[1.0, 0.1], [0.1, 1.0]]\n").unwrap();
        assert!(matches!(c.params(), Err(CliError::Config(_))));
        assert!(RunConfig::from_toml("d = 2\nrhoo = 0.1\n").is_err());
        assert!(RunConfig::load("no-such-table").is_err());
    }
}
