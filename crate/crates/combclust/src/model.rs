//! Shared domain types: datasets, proximity matrices, partitions, rankings,
//! hierarchies and (signed) weighted graphs.
//!
//! Items are dense indices `0..n`. Human-readable labels live with the data
//! that carries them ([`Dataset`], [`Hierarchy`]) or in the I/O layer.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------- dataset

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Numeric,
    Ordinal,
}

/// Items described by one estimate per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    items: Vec<String>,
    parameters: Vec<String>,
    kinds: Vec<ParamKind>,
    values: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(
        items: Vec<String>,
        parameters: Vec<String>,
        kinds: Vec<ParamKind>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if parameters.is_empty() {
            return Err(Error::Empty("dataset parameters"));
        }
        if kinds.len() != parameters.len() {
            return Err(Error::DimensionMismatch { left: kinds.len(), right: parameters.len() });
        }
        if values.len() != items.len() {
            return Err(Error::DimensionMismatch { left: values.len(), right: items.len() });
        }
        let mut seen = HashSet::new();
        for (id, row) in items.iter().zip(&values) {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate item id {id:?}")));
            }
            if row.len() != parameters.len() {
                return Err(Error::DimensionMismatch { left: row.len(), right: parameters.len() });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite estimate {v} for item {id:?}")));
            }
        }
        Ok(Dataset { items, parameters, kinds, values })
    }

    /// Numeric dataset with items named `1..=n` and parameters `C1..Cm`.
    pub fn numeric(values: Vec<Vec<f64>>) -> Result<Self> {
        let m = values.first().map_or(0, Vec::len);
        let items = (1..=values.len()).map(|i| i.to_string()).collect();
        let parameters = (1..=m).map(|j| format!("C{j}")).collect();
        Dataset::new(items, parameters, vec![ParamKind::Numeric; m], values)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.parameters.len()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn kinds(&self) -> &[ParamKind] {
        &self.kinds
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Keep only the listed items, in the given order.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        Dataset::new(
            idx.iter().map(|&i| self.items[i].clone()).collect(),
            self.parameters.clone(),
            self.kinds.clone(),
            idx.iter().map(|&i| self.values[i].clone()).collect(),
        )
    }
}

// ------------------------------------------------------- proximity matrix

/// Symmetric pairwise proximities with an explicit "absent" marker for the
/// very-large entries some tables leave out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityMatrix {
    n: usize,
    data: Vec<Option<f64>>,
}

impl ProximityMatrix {
    /// Every off-diagonal entry absent.
    pub fn absent(n: usize) -> Self {
        let mut data = vec![None; n * n];
        for i in 0..n {
            data[i * n + i] = Some(0.0);
        }
        ProximityMatrix { n, data }
    }

    /// Build from `f(i, j)` evaluated on the strict upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Result<Self> {
        let mut z = ProximityMatrix::absent(n);
        for i in 0..n {
            for j in i + 1..n {
                if let Some(v) = f(i, j) {
                    z.set(i, j, v)?;
                }
            }
        }
        Ok(z)
    }

    /// Build from complete upper-triangle rows (`rows[i]` holds `z[i][i+1..]`).
    pub fn from_upper_rows(rows: &[Vec<Option<f64>>]) -> Result<Self> {
        let n = rows.len() + 1;
        let mut z = ProximityMatrix::absent(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n - i - 1 {
                return Err(Error::DimensionMismatch { left: row.len(), right: n - i - 1 });
            }
            for (k, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    z.set(i, i + 1 + k, *v)?;
                }
            }
        }
        Ok(z)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.data[i * self.n + j]
    }

    /// Set a symmetric off-diagonal entry.
    pub fn set(&mut self, i: usize, j: usize, v: f64) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidParameter(format!("index ({i},{j}) outside order {}", self.n)));
        }
        if i == j {
            return Err(Error::InvalidParameter("diagonal entries are fixed at zero".into()));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite proximity {v}")));
        }
        self.data[i * self.n + j] = Some(v);
        self.data[j * self.n + i] = Some(v);
        Ok(())
    }

    pub fn clear(&mut self, i: usize, j: usize) {
        if i != j {
            self.data[i * self.n + j] = None;
            self.data[j * self.n + i] = None;
        }
    }

    /// Present off-diagonal entries as `(i, j, z)` with `i < j`, row-major.
    pub fn present_pairs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if let Some(v) = self.get(i, j) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Smallest and largest present off-diagonal entry.
    pub fn range(&self) -> Option<(f64, f64)> {
        self.present_pairs().iter().fold(None, |acc, &(_, _, v)| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            self.get(i, i) == Some(0.0) && (0..self.n).all(|j| self.get(i, j) == self.get(j, i))
        })
    }
}

// -------------------------------------------------------------- partition

/// Outcome of [`validate_partition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum PartitionCheck {
    Pass,
    EmptyCluster { cluster: usize },
    OutOfRange { item: usize },
    Overlap { item: usize },
    Missing { item: usize },
}

/// Report the first broken partition invariant of `clusters` over `0..n`.
pub fn validate_partition(n: usize, clusters: &[Vec<usize>]) -> PartitionCheck {
    let mut seen = vec![false; n];
    for (c, cluster) in clusters.iter().enumerate() {
        if cluster.is_empty() {
            return PartitionCheck::EmptyCluster { cluster: c };
        }
        for &item in cluster {
            if item >= n {
                return PartitionCheck::OutOfRange { item };
            }
            if std::mem::replace(&mut seen[item], true) {
                return PartitionCheck::Overlap { item };
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(item) => PartitionCheck::Missing { item },
        None => PartitionCheck::Pass,
    }
}

/// A clustering solution: disjoint non-empty clusters covering `0..n`.
///
/// Stored canonically (members ascending, clusters by smallest member), so
/// derived equality ignores cluster order and member order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawPartition", into = "RawPartition")]
pub struct Partition {
    n: usize,
    clusters: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawPartition {
    n: usize,
    clusters: Vec<Vec<usize>>,
}

impl TryFrom<RawPartition> for Partition {
    type Error = Error;
    fn try_from(r: RawPartition) -> Result<Self> {
        Partition::new(r.n, r.clusters)
    }
}

impl From<Partition> for RawPartition {
    fn from(p: Partition) -> Self {
        RawPartition { n: p.n, clusters: p.clusters }
    }
}

impl Partition {
    pub fn new(n: usize, mut clusters: Vec<Vec<usize>>) -> Result<Self> {
        match validate_partition(n, &clusters) {
            PartitionCheck::Pass => {}
            bad => return Err(Error::InvalidPartition(format!("{bad:?}"))),
        }
        for c in &mut clusters {
            c.sort_unstable();
        }
        clusters.sort_unstable();
        Ok(Partition { n, clusters })
    }

    /// Convenience for tables written with 1-based item numbers.
    pub fn from_one_based(n: usize, clusters: &[&[usize]]) -> Result<Self> {
        let mut out = Vec::with_capacity(clusters.len());
        for c in clusters {
            let mut v = Vec::with_capacity(c.len());
            for &i in *c {
                if i == 0 {
                    return Err(Error::InvalidPartition("item 0 in a 1-based listing".into()));
                }
                v.push(i - 1);
            }
            out.push(v);
        }
        Partition::new(n, out)
    }

    pub fn singletons(n: usize) -> Self {
        Partition { n, clusters: (0..n).map(|i| vec![i]).collect() }
    }

    pub fn whole(n: usize) -> Self {
        if n == 0 {
            return Partition { n, clusters: Vec::new() };
        }
        Partition { n, clusters: vec![(0..n).collect()] }
    }

    /// Build from a cluster label per item; labels need not be contiguous.
    pub fn from_assignment(labels: &[usize]) -> Self {
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for (i, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(i);
        }
        let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
        clusters.sort_unstable();
        Partition { n: labels.len(), clusters }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of clusters (λ).
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Cluster index (in canonical order) of every item.
    pub fn assignment(&self) -> Vec<usize> {
        let mut a = vec![0; self.n];
        for (c, cluster) in self.clusters.iter().enumerate() {
            for &i in cluster {
                a[i] = c;
            }
        }
        a
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    pub fn to_one_based(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.iter().map(|i| i + 1).collect()).collect()
    }
}

// ---------------------------------------------------------------- ranking

/// Ordered layers of items, layer 0 the best.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    n: usize,
    layers: Vec<Vec<usize>>,
}

impl Ranking {
    pub fn new(n: usize, layers: Vec<Vec<usize>>) -> Result<Self> {
        match validate_partition(n, &layers) {
            PartitionCheck::Pass => Ok(Ranking { n, layers }),
            bad => Err(Error::InvalidPartition(format!("ranking layers: {bad:?}"))),
        }
    }

    pub fn from_one_based(n: usize, layers: &[&[usize]]) -> Result<Self> {
        Ranking::new(n, layers.iter().map(|l| l.iter().map(|i| i - 1).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    /// Layer index of every item.
    pub fn positions(&self) -> Vec<usize> {
        let mut p = vec![0; self.n];
        for (k, layer) in self.layers.iter().enumerate() {
            for &i in layer {
                p[i] = k;
            }
        }
        p
    }
}

// -------------------------------------------------------------- hierarchy

/// Directed acyclic structure over labelled nodes, edges parent to child.
///
/// A node may have several parents: concurrent ordinal agglomeration and
/// some reference structures need that.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hierarchy {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Hierarchy {
    pub fn new(labels: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = labels.len();
        let mut uniq = HashSet::new();
        for l in &labels {
            if !uniq.insert(l.as_str()) {
                return Err(Error::InvalidHierarchy(format!("duplicate node {l:?}")));
            }
        }
        let mut set = BTreeSet::new();
        for &(p, c) in &edges {
            if p >= n || c >= n {
                return Err(Error::InvalidHierarchy(format!("edge ({p},{c}) references a missing node")));
            }
            if p == c {
                return Err(Error::InvalidHierarchy(format!("self-loop at {:?}", labels[p])));
            }
            set.insert((p, c));
        }
        let h = Hierarchy { labels, edges: set.into_iter().collect() };
        if h.has_cycle() {
            return Err(Error::InvalidHierarchy("cycle detected".into()));
        }
        Ok(h)
    }

    /// Build from label pairs, creating nodes in first-seen order.
    pub fn from_label_edges(nodes: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let labels: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        let find = |s: &str| {
            labels
                .iter()
                .position(|l| l == s)
                .ok_or_else(|| Error::InvalidHierarchy(format!("unknown node {s:?}")))
        };
        let mut idx = Vec::with_capacity(edges.len());
        for (p, c) in edges {
            idx.push((find(p)?, find(c)?));
        }
        Hierarchy::new(labels, idx)
    }

    fn has_cycle(&self) -> bool {
        let n = self.labels.len();
        let mut indeg = vec![0usize; n];
        for &(_, c) in &self.edges {
            indeg[c] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut visited = 0;
        while let Some(v) = stack.pop() {
            visited += 1;
            for &(p, c) in &self.edges {
                if p == v {
                    indeg[c] -= 1;
                    if indeg[c] == 0 {
                        stack.push(c);
                    }
                }
            }
        }
        visited != n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Nodes without parents.
    pub fn roots(&self) -> Vec<usize> {
        let mut has_parent = vec![false; self.labels.len()];
        for &(_, c) in &self.edges {
            has_parent[c] = true;
        }
        (0..self.labels.len()).filter(|&v| !has_parent[v]).collect()
    }

    /// Edge set expressed in labels, for comparison across hierarchies.
    pub fn labelled_edges(&self) -> BTreeSet<(String, String)> {
        self.edges
            .iter()
            .map(|&(p, c)| (self.labels[p].clone(), self.labels[c].clone()))
            .collect()
    }
}

// ----------------------------------------------------------------- graphs

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

fn canonical_edges(n: usize, edges: Vec<Edge>, signed: bool) -> Result<Vec<Edge>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(edges.len());
    for e in edges {
        if e.u >= n || e.v >= n {
            return Err(Error::InvalidGraph(format!("edge ({},{}) outside {n} vertices", e.u, e.v)));
        }
        if e.u == e.v {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.u)));
        }
        if !e.w.is_finite() {
            return Err(Error::InvalidGraph(format!("non-finite weight on ({},{})", e.u, e.v)));
        }
        if signed && e.w == 0.0 {
            return Err(Error::InvalidGraph(format!("zero weight on signed edge ({},{})", e.u, e.v)));
        }
        let (u, v) = if e.u < e.v { (e.u, e.v) } else { (e.v, e.u) };
        if !seen.insert((u, v)) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
        }
        out.push(Edge { u, v, w: e.w });
    }
    out.sort_by_key(|e| (e.u, e.v));
    Ok(out)
}

/// Undirected simple graph with one finite weight per edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Ok(WeightedGraph { n, edges: canonical_edges(n, edges, false)? })
    }

    /// Unit-weight graph from index pairs.
    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        WeightedGraph::new(n, pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    /// Connected components as a partition of the vertices.
    pub fn components(&self) -> Partition {
        let mut uf = UnionFind::new(self.n);
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        Partition::from_assignment(&(0..self.n).map(|v| uf.find(v)).collect::<Vec<_>>())
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.u, e.v)).collect()
    }
}

/// Undirected graph whose edges carry nonzero signed weights
/// (positive = similar, negative = dissimilar).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedWeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl SignedWeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        Ok(SignedWeightedGraph { n, edges: canonical_edges(n, edges, true)? })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Dense weight lookup, 0.0 where no edge exists.
    pub fn weight_matrix(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for e in &self.edges {
            m[e.u][e.v] = e.w;
            m[e.v][e.u] = e.w;
        }
        m
    }
}

// ------------------------------------------------------------- union-find

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
