//! Quality measures of a clustering solution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Partition, ProximityMatrix, SignedWeightedGraph, WeightedGraph};
use crate::multiset::{integrate_sum, median, MedianDomain, MultisetEstimate};
use crate::proximity::Link;

/// How per-cluster (or per-pair) values are folded into one number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TotalMode {
    Mean,
    Sum,
    Max,
    Min,
}

fn fold(values: &[f64], mode: TotalMode) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    match mode {
        TotalMode::Mean => values.iter().sum::<f64>() / values.len() as f64,
        TotalMode::Sum => values.iter().sum(),
        TotalMode::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        TotalMode::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

fn present(z: &ProximityMatrix, i: usize, j: usize) -> Result<f64> {
    z.get(i, j).ok_or(Error::AbsentProximity(i, j))
}

fn same_universe(p: &Partition, n: usize) -> Result<()> {
    if p.n() != n {
        return Err(Error::UniverseMismatch { left: p.n(), right: n });
    }
    Ok(())
}

fn link_over(values: &[f64], link: Link) -> f64 {
    match link {
        Link::Min => fold(values, TotalMode::Min),
        Link::Max => fold(values, TotalMode::Max),
        Link::Avg => fold(values, TotalMode::Mean),
    }
}

fn cluster_intra(z: &ProximityMatrix, c: &[usize], link: Link) -> Result<f64> {
    let mut vals = Vec::new();
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            vals.push(present(z, c[a], c[b])?);
        }
    }
    Ok(link_over(&vals, link))
}

fn cluster_inter(z: &ProximityMatrix, x: &[usize], y: &[usize], link: Link) -> Result<f64> {
    let mut vals = Vec::with_capacity(x.len() * y.len());
    for &a in x {
        for &b in y {
            vals.push(present(z, a, b)?);
        }
    }
    Ok(link_over(&vals, link))
}

/// Total intra-cluster proximity.
///
/// Singletons have no internal pairs: they add 0 to `Sum` and are left out of
/// `Mean`, `Max` and `Min`. A partition of singletons scores 0.
pub fn intra_quality(p: &Partition, z: &ProximityMatrix, link: Link, total: TotalMode) -> Result<f64> {
    same_universe(p, z.n())?;
    let vals = p
        .clusters()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| cluster_intra(z, c, link))
        .collect::<Result<Vec<_>>>()?;
    Ok(fold(&vals, total))
}

/// Total inter-cluster proximity over ordered cluster pairs.
pub fn inter_quality(p: &Partition, z: &ProximityMatrix, link: Link, total: TotalMode) -> Result<f64> {
    same_universe(p, z.n())?;
    let cs = p.clusters();
    if cs.len() < 2 {
        return Err(Error::InvalidParameter("inter-cluster quality needs at least two clusters".into()));
    }
    let mut vals = Vec::with_capacity(cs.len() * (cs.len() - 1));
    for a in 0..cs.len() {
        for b in 0..cs.len() {
            if a != b {
                vals.push(cluster_inter(z, &cs[a], &cs[b], link)?);
            }
        }
    }
    Ok(fold(&vals, total))
}

/// Integration of per-cluster multiset estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultisetTotal {
    Sum,
    Median(MedianDomain),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultisetQuality {
    /// One estimate per cluster (intra) or per unordered cluster pair (inter).
    pub parts: Vec<MultisetEstimate>,
    pub total: MultisetEstimate,
}

fn level_of(labels: &ProximityMatrix, levels: usize, i: usize, j: usize) -> Result<usize> {
    let v = present(labels, i, j)?;
    if v.fract() != 0.0 || v < 1.0 || v > levels as f64 {
        return Err(Error::InvalidParameter(format!(
            "label {v} on ({i},{j}) is not a level in 1..={levels}"
        )));
    }
    Ok(v as usize - 1)
}

fn count_pairs(
    labels: &ProximityMatrix,
    levels: usize,
    pairs: impl Iterator<Item = (usize, usize)>,
) -> Result<MultisetEstimate> {
    let mut counts = vec![0u32; levels];
    for (i, j) in pairs {
        counts[level_of(labels, levels, i, j)?] += 1;
    }
    MultisetEstimate::new(counts)
}

fn integrate(parts: &[MultisetEstimate], total: MultisetTotal) -> Result<MultisetEstimate> {
    match total {
        MultisetTotal::Sum => integrate_sum(parts),
        MultisetTotal::Median(domain) => Ok(median(parts, domain)?.median),
    }
}

/// Level counts of the intra-cluster pairs of each non-singleton cluster,
/// then integrated. `labels` carries levels `1..=levels` (1 best).
pub fn intra_quality_multiset(
    p: &Partition,
    labels: &ProximityMatrix,
    levels: usize,
    total: MultisetTotal,
) -> Result<MultisetQuality> {
    same_universe(p, labels.n())?;
    let parts = p
        .clusters()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let pairs = (0..c.len()).flat_map(|a| (a + 1..c.len()).map(move |b| (c[a], c[b])));
            count_pairs(labels, levels, pairs)
        })
        .collect::<Result<Vec<_>>>()?;
    if parts.is_empty() {
        return Err(Error::Empty("non-singleton clusters"));
    }
    let total = integrate(&parts, total)?;
    Ok(MultisetQuality { parts, total })
}

/// Level counts of the cross pairs of each unordered cluster pair, then
/// integrated.
pub fn inter_quality_multiset(
    p: &Partition,
    labels: &ProximityMatrix,
    levels: usize,
    total: MultisetTotal,
) -> Result<MultisetQuality> {
    same_universe(p, labels.n())?;
    let cs = p.clusters();
    if cs.len() < 2 {
        return Err(Error::InvalidParameter("inter-cluster quality needs at least two clusters".into()));
    }
    let mut parts = Vec::new();
    for a in 0..cs.len() {
        for b in a + 1..cs.len() {
            let pairs = cs[a].iter().flat_map(|&i| cs[b].iter().map(move |&j| (i, j)));
            parts.push(count_pairs(labels, levels, pairs)?);
        }
    }
    let total = integrate(&parts, total)?;
    Ok(MultisetQuality { parts, total })
}

/// Counts of clusters by deviation of their size from `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceVector {
    /// Deviation represented by `counts[0]` (zero or negative).
    pub min_deviation: i64,
    pub counts: Vec<usize>,
}

impl BalanceVector {
    pub fn count_at(&self, deviation: i64) -> usize {
        let k = deviation - self.min_deviation;
        if k < 0 {
            return 0;
        }
        self.counts.get(k as usize).copied().unwrap_or(0)
    }

    pub fn conforming(&self) -> usize {
        self.count_at(0)
    }

    pub fn cluster_count(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Whether the number of clusters lies in `[lo, hi]`.
    pub fn cluster_count_within(&self, lo: usize, hi: usize) -> bool {
        (lo..=hi).contains(&self.cluster_count())
    }
}

pub fn balance_vector(p: &Partition, lower: usize, upper: usize) -> Result<BalanceVector> {
    if lower > upper {
        return Err(Error::InvalidParameter(format!("size bounds [{lower}, {upper}] are reversed")));
    }
    let devs: Vec<i64> = p
        .sizes()
        .into_iter()
        .map(|s| {
            if s < lower {
                s as i64 - lower as i64
            } else if s > upper {
                s as i64 - upper as i64
            } else {
                0
            }
        })
        .collect();
    let lo = devs.iter().copied().min().unwrap_or(0).min(0);
    let hi = devs.iter().copied().max().unwrap_or(0).max(0);
    let mut counts = vec![0; (hi - lo + 1) as usize];
    for d in devs {
        counts[(d - lo) as usize] += 1;
    }
    Ok(BalanceVector { min_deviation: lo, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionCheck {
    pub pass: bool,
    /// Coordinate spread (max minus min) per parameter.
    pub spread: Vec<f64>,
}

/// Per cluster: does every parameter's spread stay within its limit?
pub fn region_size_check(p: &Partition, d: &Dataset, limits: &[f64]) -> Result<Vec<RegionCheck>> {
    same_universe(p, d.len())?;
    if limits.len() != d.dim() {
        return Err(Error::DimensionMismatch { left: limits.len(), right: d.dim() });
    }
    if let Some(l) = limits.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::InvalidParameter(format!("region limit must be finite and positive, got {l}")));
    }
    Ok(p.clusters()
        .iter()
        .map(|c| {
            let spread: Vec<f64> = (0..d.dim())
                .map(|k| {
                    let (lo, hi) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                        (lo.min(d.row(i)[k]), hi.max(d.row(i)[k]))
                    });
                    hi - lo
                })
                .collect();
            let pass = spread.iter().zip(limits).all(|(s, l)| s <= l);
            RegionCheck { pass, spread }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterModularity {
    /// Edges with both ends inside the cluster.
    pub internal: usize,
    /// Edges with exactly one end inside the cluster.
    pub external: usize,
    pub e: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityReport {
    pub q: f64,
    pub clusters: Vec<ClusterModularity>,
}

/// Which share of edge ends a cluster is charged with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModularityForm {
    /// `a = (external + internal) / |E|`: share of edges touching the cluster.
    #[default]
    Counted,
    /// `a = (external + 2·internal) / 2|E|`: share of edge ends (degree sum).
    Standard,
}

impl ModularityForm {
    /// `(e, a)` of one cluster.
    pub fn terms(self, internal: usize, external: usize, total_edges: usize) -> (f64, f64) {
        let m = total_edges as f64;
        let e = internal as f64 / m;
        let a = match self {
            ModularityForm::Counted => (internal + external) as f64 / m,
            ModularityForm::Standard => (2 * internal + external) as f64 / (2.0 * m),
        };
        (e, a)
    }
}

/// Modularity from per-cluster `(internal, external)` edge counts:
/// `Q = Σ (e − a²)` with `e = internal/|E|` and `a` per `form`.
pub fn modularity_from_counts(
    counts: &[(usize, usize)],
    total_edges: usize,
    form: ModularityForm,
) -> Result<ModularityReport> {
    if total_edges == 0 {
        return Err(Error::Empty("edge set"));
    }
    let clusters: Vec<ClusterModularity> = counts
        .iter()
        .map(|&(internal, external)| {
            let (e, a) = form.terms(internal, external, total_edges);
            ClusterModularity { internal, external, e, a }
        })
        .collect();
    let q = clusters.iter().map(|c| c.e - c.a * c.a).sum();
    Ok(ModularityReport { q, clusters })
}

/// Modularity of `p` on `g`, counting edges (weights are ignored).
pub fn modularity(g: &WeightedGraph, p: &Partition, form: ModularityForm) -> Result<ModularityReport> {
    same_universe(p, g.n())?;
    let label = p.assignment();
    let mut counts = vec![(0usize, 0usize); p.len()];
    for e in g.edges() {
        let (cu, cv) = (label[e.u], label[e.v]);
        if cu == cv {
            counts[cu].0 += 1;
        } else {
            counts[cu].1 += 1;
            counts[cv].1 += 1;
        }
    }
    modularity_from_counts(&counts, g.edge_count(), form)
}

/// Sums of negative and positive weights over intra-cluster edges.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorrelationScore {
    pub disagreement: f64,
    pub agreement: f64,
}

pub fn correlation_objective(g: &SignedWeightedGraph, p: &Partition) -> Result<CorrelationScore> {
    same_universe(p, g.n())?;
    let label = p.assignment();
    let mut s = CorrelationScore::default();
    for e in g.edges().iter().filter(|e| label[e.u] == label[e.v]) {
        if e.w < 0.0 {
            s.disagreement += e.w;
        } else {
            s.agreement += e.w;
        }
    }
    Ok(s)
}
