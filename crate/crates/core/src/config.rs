//! Problem configuration files.
//!
//! A config is a JSON object with keys `model`, `K`, `r`, `lambda`, `option`
//! and optional `x_ref`, `mc`, `output`, `grids`. Unknown keys are rejected.
//! A result file written by the CLI (an object with a `config` key) is also
//! accepted, which makes every result re-runnable.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::model::{Jump, LevyModel, Side};
use crate::put::{OptionKind, PricingProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub side: Side,
    pub c: f64,
    pub eta: f64,
    #[serde(default)]
    pub jumps: Vec<Jump>,
}

impl ModelSpec {
    pub fn build(&self) -> Result<LevyModel> {
        LevyModel::new(self.side, self.c, self.eta, self.jumps.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Unset: CSV for curves, JSON for structured results.
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Price grid for value curves; defaults to (0.02 K, 2 K).
    #[serde(default)]
    pub s_min: Option<f64>,
    #[serde(default)]
    pub s_max: Option<f64>,
    #[serde(default = "default_s_count")]
    pub s_count: usize,
    #[serde(default = "default_true")]
    pub log_spaced: bool,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    /// Price at which sweeps and MC estimates report V; defaults to K.
    #[serde(default)]
    pub reference_price: Option<f64>,
    /// Extra prices for `mc-estimate` and `verify`.
    #[serde(default)]
    pub mc_prices: Vec<f64>,
}

fn default_s_count() -> usize {
    200
}

fn default_true() -> bool {
    true
}

fn default_lambdas() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 20.0, 50.0]
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            s_min: None,
            s_max: None,
            s_count: default_s_count(),
            log_spaced: true,
            lambdas: default_lambdas(),
            reference_price: None,
            mc_prices: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub model: ModelSpec,
    #[serde(rename = "K")]
    pub strike: f64,
    pub r: f64,
    pub lambda: f64,
    pub option: OptionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_ref: Option<f64>,
    #[serde(default)]
    pub mc: McConfig,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub grids: GridSpec,
}

impl ProblemConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(inner) = v.get_mut("config") {
            v = inner.take();
        }
        let cfg: ProblemConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grids;
        let mut nums = vec![self.model.c, self.model.eta, self.strike, self.r, self.lambda];
        nums.extend(self.model.jumps.iter().flat_map(|j| [j.alpha, j.beta]));
        nums.extend(self.x_ref);
        nums.extend(g.s_min);
        nums.extend(g.s_max);
        nums.extend(g.reference_price);
        nums.extend(&g.lambdas);
        nums.extend(&g.mc_prices);
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("all numeric fields must be finite".into()));
        }
        if !(self.strike > 0.0) {
            return Err(Error::Config(format!("K must be positive, got {}", self.strike)));
        }
        let (lo, hi) = self.price_bounds();
        if !(0.0 < lo && lo < hi) || g.s_count < 2 {
            return Err(Error::Config(format!(
                "price grid needs 0 < s_min < s_max and s_count >= 2, got {lo}, {hi}, {}",
                g.s_count
            )));
        }
        if g.mc_prices.iter().chain(g.reference_price.iter()).any(|s| !(*s > 0.0)) {
            return Err(Error::Config("prices must be positive".into()));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<PricingProblem> {
        Ok(PricingProblem::new(self.model.build()?, self.strike, self.r, self.lambda, self.option))
    }

    pub fn price_bounds(&self) -> (f64, f64) {
        (self.grids.s_min.unwrap_or(0.02 * self.strike), self.grids.s_max.unwrap_or(2.0 * self.strike))
    }

    pub fn price_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.price_bounds();
        let n = self.grids.s_count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.grids.log_spaced {
                    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
                } else {
                    lo + t * (hi - lo)
                }
            })
            .collect()
    }

    pub fn reference_price(&self) -> f64 {
        self.grids.reference_price.unwrap_or(self.strike)
    }

    /// Prices for MC estimates: `mc_prices`, or the reference price.
    pub fn mc_prices(&self) -> Vec<f64> {
        if self.grids.mc_prices.is_empty() {
            vec![self.reference_price()]
        } else {
            self.grids.mc_prices.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"model": {"side": "SN", "c": 1, "eta": 0.2, "jumps": [{"alpha": 1, "beta": 2}]},
        "K": 50, "r": -0.05, "lambda": 1, "option": "put"}"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ProblemConfig::from_json_str(MINIMAL).unwrap();
        assert_eq!(c.mc.max_observations, 5000);
        assert_eq!(c.output.format, None);
        assert_eq!(c.price_bounds(), (1.0, 100.0));
        let g = c.price_grid();
        assert_eq!(g.len(), 200);
        assert!((g[0] - 1.0).abs() < 1e-12 && (g[199] - 100.0).abs() < 1e-12);
        assert_eq!(c.mc_prices(), vec![50.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = MINIMAL.replace("\"option\"", "\"extra\": 1, \"option\"");
        assert!(matches!(ProblemConfig::from_json_str(&bad), Err(Error::Config(_))));
        let bad = MINIMAL.replace("\"eta\"", "\"sigma\"");
        assert!(ProblemConfig::from_json_str(&bad).is_err());
    }

    #[test]
    fn result_envelope_round_trips() {
        let c = ProblemConfig::from_json_str(MINIMAL).unwrap();
        let wrapped = serde_json::json!({"config": c, "l_star": 1.0}).to_string();
        assert_eq!(ProblemConfig::from_json_str(&wrapped).unwrap(), c);
    }

    #[test]
    fn invalid_numbers() {
        let bad = MINIMAL.replace("\"K\": 50", "\"K\": -1");
        assert!(ProblemConfig::from_json_str(&bad).is_err());
        let bad = MINIMAL.replace("\"K\": 50", "\"K\": 50, \"grids\": {\"s_min\": 10, \"s_max\": 5}");
        assert!(ProblemConfig::from_json_str(&bad).is_err());
    }
}
