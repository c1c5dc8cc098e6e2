//! Pipeline configuration, read from a TOML file.
//!
//! Every section is optional and every key has a default, so an empty file
//! is a valid config. Unknown keys are rejected to catch typos.

use std::path::Path;

use serde::{Deserialize, Serialize};

use combclust::agglomerative::Linkage;
use combclust::assignment::{ApScoring, SearchMode, Sense};
use combclust::compare::ConsensusMode;
use combclust::multiset::MedianDomain;
use combclust::proximity::{Link, Metric};
use combclust::quality::{ModularityForm, TotalMode};
use combclust::restructuring::DEFAULT_RESOLUTION;
use combclust::Exec;

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub data: DataConfig,
    pub cluster: ClusterConfig,
    pub consensus: ConsensusConfig,
    pub compare: CompareConfig,
    pub restructure: RestructureConfig,
    pub assign: AssignConfig,
    pub schedule: ScheduleConfig,
    pub quality: QualityConfig,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub metric: Metric,
    pub exec: Exec,
    /// Columns read as ordinal estimates; the rest are numeric.
    pub ordinal_columns: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Full dendrogram cut at `clusters`.
    Basic,
    #[default]
    Balanced,
    Ordinal,
    Mst,
    AdaptiveMst,
    Clique,
    Correlation,
    Modularity,
    GirvanNewman,
    Multiset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterConfig {
    pub method: Method,
    pub linkage: Linkage,
    pub max_size: usize,
    pub min_size: Option<usize>,
    /// Number of clusters kept when cutting a full dendrogram.
    pub clusters: usize,
    /// Ordinal levels for the adaptive tree and multiset methods.
    pub levels: u32,
    pub disagreement_budget: f64,
    pub modularity_form: ModularityForm,
    pub target_components: usize,
    pub median_domain: MedianDomain,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            method: Method::Balanced,
            linkage: Linkage::Single,
            max_size: 3,
            min_size: None,
            clusters: 2,
            levels: 3,
            disagreement_budget: 10.0,
            modularity_form: ModularityForm::Standard,
            target_components: 2,
            median_domain: MedianDomain::Generalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConsensusConfig {
    pub min_clusters: usize,
    pub max_clusters: usize,
    pub mode: ConsensusMode,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        ConsensusConfig { min_clusters: 1, max_clusters: usize::MAX, mode: ConsensusMode::Exhaustive }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareKind {
    #[default]
    Partition,
    Ranking,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    pub kind: CompareKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RestructureConfig {
    /// Cost budget; unlimited when unset.
    pub budget: Option<f64>,
    pub resolution: f64,
    /// Per-item relocation cost, keyed by item id; missing items cost `default_cost`.
    pub costs: std::collections::BTreeMap<String, f64>,
    pub default_cost: f64,
    /// Per-item profit, keyed by item id; missing items profit 1.
    pub profits: std::collections::BTreeMap<String, f64>,
}

impl Default for RestructureConfig {
    fn default() -> Self {
        RestructureConfig {
            budget: None,
            resolution: DEFAULT_RESOLUTION,
            costs: Default::default(),
            default_cost: 1.0,
            profits: Default::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssignKind {
    /// Square cost matrix, one-to-one.
    Exact,
    #[default]
    Gap,
    GapExhaustive,
    AccessPoint,
    Multiset,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssignConfig {
    pub kind: AssignKind,
    pub sense: Sense,
    pub search: SearchMode,
    pub scoring: ApScoring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub beams: usize,
    /// Column holding the angle; the first column when unset.
    pub angle_column: Option<String>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig { beams: 3, angle_column: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Intra,
    Inter,
    Balance,
    Modularity,
    Correlation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QualityConfig {
    /// Measures attached to `cluster` reports and computed by `quality`.
    pub measures: Vec<Measure>,
    pub link: Link,
    pub total: TotalMode,
    pub balance_lower: usize,
    pub balance_upper: usize,
    pub modularity_form: ModularityForm,
}

impl Default for QualityConfig {
    fn default() -> Self {
        QualityConfig {
            measures: Vec::new(),
            link: Link::Avg,
            total: TotalMode::Mean,
            balance_lower: 1,
            balance_upper: usize::MAX,
            modularity_form: ModularityForm::Counted,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c: Config = toml::from_str("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.cluster.max_size, 3);
    }

    #[test]
    fn nested_values_parse() {
        let c: Config = toml::from_str(
            r#"
            [data]
            metric = { kind = "minkowski", r = 3.0 }
            exec = "sequential"
            [cluster]
            method = "girvan_newman"
            target_components = 4
            [quality]
            measures = ["modularity", "balance"]
            "#,
        )
        .unwrap();
        assert_eq!(c.data.metric, Metric::Minkowski { r: 3.0 });
        assert_eq!(c.cluster.method, Method::GirvanNewman);
        assert_eq!(c.quality.measures, vec![Measure::Modularity, Measure::Balance]);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(toml::from_str::<Config>("[cluster]\nmax_sise = 3").is_err());
    }
}
