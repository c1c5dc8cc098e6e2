//! Versioned run report: json (lossless, round-trips) or a text summary.
//!
//! Index-valued fields inside `result` refer to positions in `items`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use combclust::agglomerative::{BalancedResult, MergeTrace, MultisetAgglomeration, OrdinalResult};
use combclust::assignment::{ApAssignment, BeamSchedule, GapSolution, Matching, MultisetAssignment};
use combclust::compare::{Consensus, EditTrace};
use combclust::graph::{AdaptiveTreeClustering, CorrelationClustering, GirvanNewman, ModularityClustering, TreeClustering};
use combclust::quality::{BalanceVector, CorrelationScore, ModularityReport};
use combclust::restructuring::RestructurePlan;

use crate::io::NamedPartition;

/// Bumped whenever a field changes meaning or disappears.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Cluster,
    Consensus,
    Compare,
    Restructure,
    Assign,
    Schedule,
    Quality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub version: u32,
    pub verb: Verb,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub items: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<NamedPartition>,
    pub result: Outcome,
    #[serde(default, skip_serializing_if = "Quality::is_empty")]
    pub quality: Quality,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(verb: Verb, items: Vec<String>, result: Outcome) -> Self {
        Report {
            version: REPORT_VERSION,
            verb,
            generated_at: None,
            items,
            partition: None,
            result,
            quality: Quality::default(),
            warnings: Vec::new(),
        }
    }

    pub fn stamped(mut self) -> Self {
        self.generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only finite numbers and string keys")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Outcome {
    Dendrogram(MergeTrace),
    Balanced(BalancedResult),
    Ordinal(OrdinalResult),
    Tree(TreeClustering),
    AdaptiveTree(AdaptiveTreeClustering),
    Cliques,
    Correlation(CorrelationClustering),
    Modularity(ModularityClustering),
    GirvanNewman(GirvanNewman),
    Multiset(MultisetAgglomeration),
    Consensus(Consensus),
    EditCost(EditTrace),
    RankingDistance { scalar: usize, vector: Vec<usize> },
    Restructure(RestructurePlan),
    Matching(Matching),
    Gap(GapSolution),
    AccessPoint(ApAssignment),
    MultisetAssignment(MultisetAssignment),
    Schedule(BeamSchedule),
    Quality,
    Empty,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Quality {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intra: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balance: Option<BalanceVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modularity: Option<ModularityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationScore>,
}

impl Quality {
    pub fn is_empty(&self) -> bool {
        *self == Quality::default()
    }
}

fn names(items: &[String], idx: &[usize]) -> String {
    if idx.is_empty() {
        return "none".into();
    }
    idx.iter().map(|&i| items[i].as_str()).collect::<Vec<_>>().join(" ")
}

/// Human-readable summary.
pub fn render_text(r: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:?} report (v{}), {} items", r.verb, r.version, r.items.len());
    if let Some(p) = &r.partition {
        let _ = writeln!(s, "partition: {} clusters", p.0.len());
        for (name, ids) in &p.0 {
            let _ = writeln!(s, "  {name}: {}", ids.join(" "));
        }
    }
    let it = &r.items;
    match &r.result {
        Outcome::Dendrogram(t) => {
            let _ = writeln!(s, "merges: {}", t.events.len());
        }
        Outcome::Balanced(b) => {
            let _ = writeln!(s, "merges: {}, frozen clusters: {}", b.trace.events.len(), b.frozen.len());
        }
        Outcome::Tree(t) => {
            let _ = writeln!(s, "spanning tree: {} edges, weight {}", t.tree.edge_count(), t.tree.total_weight());
        }
        Outcome::AdaptiveTree(t) => {
            let _ = writeln!(s, "connected at level {}, tree weight {}", t.threshold, t.tree.total_weight());
        }
        Outcome::Correlation(c) => {
            for p in &c.trace {
                let _ = writeln!(
                    s,
                    "  iteration {}: ({}, {}) after joining [{}] + [{}]",
                    p.iteration,
                    p.objective.disagreement,
                    p.objective.agreement,
                    names(it, &p.merged.0),
                    names(it, &p.merged.1)
                );
            }
        }
        Outcome::Modularity(m) => {
            let _ = writeln!(s, "modularity: {:.4} after {} merges", m.q, m.steps.len());
        }
        Outcome::GirvanNewman(g) => {
            let _ = writeln!(s, "edges removed: {}", g.removed.len());
        }
        Outcome::Multiset(m) => {
            let _ = writeln!(s, "iterations: {}", m.iterations.len());
        }
        Outcome::Consensus(c) => {
            let _ = writeln!(s, "per-input costs: {:?}, total {}", c.costs, c.total);
            let _ = writeln!(s, "candidates evaluated: {}", c.candidates_evaluated);
        }
        Outcome::EditCost(t) => {
            let moved: Vec<&str> = t.moves.iter().map(|m| it[m.item].as_str()).collect();
            let _ = writeln!(s, "edit cost: {} (relocated: {})", t.cost, moved.join(" "));
        }
        Outcome::RankingDistance { scalar, vector } => {
            let _ = writeln!(s, "ranking distance: {scalar}, vector {vector:?}");
        }
        Outcome::Restructure(p) => {
            let _ = writeln!(
                s,
                "operations: {} of {}, cost {}, residual distance {}",
                p.selected.len(),
                p.operations.len(),
                p.total_cost,
                p.residual
            );
        }
        Outcome::Matching(m) => {
            let _ = writeln!(s, "matching value: {}", m.value);
        }
        Outcome::Gap(g) => {
            let _ = writeln!(s, "profit: {}, unassigned: {}", g.profit, names(it, &g.unassigned));
        }
        Outcome::AccessPoint(a) => {
            let _ = writeln!(s, "value: {}, unassigned: {}", a.value, names(it, &a.unassigned));
        }
        Outcome::MultisetAssignment(m) => {
            let _ = writeln!(s, "median estimate: {:?}", m.median.counts());
        }
        Outcome::Schedule(b) => {
            for (k, slot) in b.slots.iter().enumerate() {
                let _ = writeln!(s, "  slot {}: {}", k + 1, names(it, slot));
            }
        }
        Outcome::Ordinal(_) | Outcome::Cliques | Outcome::Quality | Outcome::Empty => {}
    }
    let q = &r.quality;
    if let Some(v) = q.intra {
        let _ = writeln!(s, "intra: {v}");
    }
    if let Some(v) = q.inter {
        let _ = writeln!(s, "inter: {v}");
    }
    if let Some(b) = &q.balance {
        let _ = writeln!(s, "balance: min deviation {}, counts {:?}", b.min_deviation, b.counts);
    }
    if let Some(m) = &q.modularity {
        let _ = writeln!(s, "modularity: {:.4}", m.q);
        for (k, c) in m.clusters.iter().enumerate() {
            let _ = writeln!(s, "  cluster {}: internal {}, external {}, e {:.4}, a {:.4}", k + 1, c.internal, c.external, c.e, c.a);
        }
    }
    if let Some(c) = &q.correlation {
        let _ = writeln!(s, "correlation: ({}, {})", c.disagreement, c.agreement);
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use combclust::compare::partition_edit_cost;
    use combclust::Partition;

    #[test]
    fn json_round_trip() {
        let a = Partition::from_assignment(&[0, 0, 1, 1, 2]);
        let b = Partition::from_assignment(&[0, 1, 1, 2, 2]);
        let items: Vec<String> = (1..=5).map(|i| i.to_string()).collect();
        let mut r = Report::new(Verb::Compare, items.clone(), Outcome::EditCost(partition_edit_cost(&a, &b).unwrap()));
        r.partition = Some(NamedPartition::from_partition(&b, &items));
        r.quality.intra = Some(0.1 + 0.2);
        r.warnings.push("note".into());
        let r = r.stamped();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn text_mentions_clusters() {
        let items = vec!["a".to_string(), "b".into()];
        let mut r = Report::new(Verb::Cluster, items.clone(), Outcome::Cliques);
        r.partition = Some(NamedPartition::from_partition(&Partition::whole(2), &items));
        let t = render_text(&r);
        assert!(t.contains("X1: a b"), "{t}");
    }
}
