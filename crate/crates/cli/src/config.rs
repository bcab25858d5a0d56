//! Experiment configuration. See `docs/config-schema.json`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smooth_moments::expsum::MAX_GRID;
use smooth_moments::{BoundId, SplitRule};

use crate::error::{HarnessError, Result};
use crate::number::RationalValue;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub x_values: Vec<u64>,
    pub smoothness: Smoothness,
    pub rho_values: Vec<RationalValue>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub grid_policy: GridPolicy,
    #[serde(default = "default_bounds", with = "bound_list")]
    pub bounds: Vec<BoundId>,
    #[serde(default)]
    pub arc_splits: Vec<ArcSplitSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Random `θ` per `(x, y)` for the pointwise skeleton table.
    #[serde(default)]
    pub theta_samples: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    /// Constant in the hypothesis of the Harper mean-value bound.
    #[serde(default = "one")]
    pub harper_k: f64,
    /// Constant `C` of the S-unit bound.
    #[serde(default = "one")]
    pub sunit_c: f64,
    /// Fill `timing_ms`. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Smoothness {
    YValues(Vec<u64>),
    /// `y = ⌊(ln x)^K⌋`.
    #[serde(alias = "K_values")]
    KValues(Vec<RationalValue>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPolicy {
    /// Exact counts for even `ρ`; refined quadrature at `rel_tol = 1e-6`
    /// otherwise.
    #[default]
    Auto,
    /// Exact counts; every `ρ` must be even.
    Exact,
    Fixed(usize),
    Refined(f64),
}

pub const AUTO_REL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSplitSpec {
    #[serde(with = "split_name")]
    pub split: SplitRule,
    #[serde(default)]
    pub q: QRule,
    /// Grid size; defaults to the alias-free size for `⌈ρ/2⌉`.
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QRule {
    /// `x^{1/2+ε}` or `x^ξ`, depending on the split.
    #[default]
    Optimal,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Format {
    #[serde(rename = "CSV", alias = "csv")]
    Csv,
    #[serde(rename = "JSONL", alias = "jsonl")]
    Jsonl,
    #[serde(rename = "SVG", alias = "svg")]
    Svg,
}

fn default_epsilon() -> f64 {
    0.05
}
fn default_bounds() -> Vec<BoundId> {
    vec![BoundId::Trivial]
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}
fn one() -> f64 {
    1.0
}

mod bound_list {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BoundId], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|b| b.as_str()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BoundId>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

mod split_name {
    use super::*;
    use serde::{de::Error, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &SplitRule, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(v.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SplitRule, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.x_values.is_empty() {
            return bad("x_values is empty".into());
        }
        if self.x_values[0] == 0 {
            return bad("x values must be positive".into());
        }
        if self.x_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("x_values must be strictly ascending".into());
        }
        match &self.smoothness {
            Smoothness::YValues(ys) if ys.is_empty() => return bad("y_values is empty".into()),
            Smoothness::YValues(ys) if ys.contains(&0) => return bad("y values must be positive".into()),
            Smoothness::KValues(ks) if ks.is_empty() => return bad("k_values is empty".into()),
            Smoothness::KValues(ks) if ks.iter().any(|k| k.approx() <= 0.0) => {
                return bad("K values must be positive".into())
            }
            _ => {}
        }
        if self.rho_values.is_empty() {
            return bad("rho_values is empty".into());
        }
        if let Some(r) = self.rho_values.iter().find(|r| r.approx() <= 0.0) {
            return bad(format!("rho values must be positive, got {r}"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return bad(format!("epsilon must lie in (0, 1/2), got {}", self.epsilon));
        }
        match self.grid_policy {
            GridPolicy::Fixed(n) if n == 0 || n > MAX_GRID => {
                return bad(format!("fixed grid must lie in [1, {MAX_GRID}], got {n}"))
            }
            GridPolicy::Refined(tol) if !(tol > 0.0 && tol < 1.0) => {
                return bad(format!("refined rel_tol must lie in (0, 1), got {tol}"))
            }
            GridPolicy::Exact => {
                if let Some(r) = self.rho_values.iter().find(|r| r.even_half().is_none()) {
                    return bad(format!("exact grid policy needs even rho, got {r}"));
                }
            }
            _ => {}
        }
        if self.bounds.is_empty() {
            return bad("bounds is empty".into());
        }
        for spec in &self.arc_splits {
            if let QRule::Fixed(q) = spec.q {
                if !(q >= 1.0 && q.is_finite()) {
                    return bad(format!("fixed Q must be at least 1, got {q}"));
                }
            }
            if spec.grid.is_some_and(|n| n == 0 || n > MAX_GRID) {
                return bad(format!("arc grid must lie in [1, {MAX_GRID}]"));
            }
        }
        if self.formats.is_empty() {
            return bad("formats is empty".into());
        }
        if self.formats.contains(&Format::Svg)
            && !self.formats.iter().any(|f| matches!(f, Format::Csv | Format::Jsonl))
        {
            return bad("SVG is drawn from persisted rows and needs CSV or JSONL".into());
        }
        for (name, v) in [("harper_k", self.harper_k), ("sunit_c", self.sunit_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        Ok(())
    }
}
