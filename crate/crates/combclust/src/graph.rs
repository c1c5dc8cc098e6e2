//! Graph-structured clustering: spanning-tree clustering (fixed and adaptive
//! threshold), clique series, signed correlation greedy, modularity greedy
//! and Girvan-Newman edge removal.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::agglomerative::{agglomerative_balanced, BalancedResult, Linkage};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{Dataset, Edge, Partition, ProximityMatrix, SignedWeightedGraph, UnionFind, WeightedGraph};
use crate::proximity::{proximity_matrix, Metric, OrdinalMappingRule};
use crate::quality::{correlation_objective, CorrelationScore, ModularityForm};

/// Exact clique search refuses graphs above this many vertices.
pub const CLIQUE_GUARD: usize = 64;

/// Kruskal over edges sorted by (weight, u, v).
pub fn minimum_spanning_tree(g: &WeightedGraph) -> Result<WeightedGraph> {
    let comps = g.components().len();
    if comps > 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let mut edges = g.edges().to_vec();
    edges.sort_by(|a, b| a.w.total_cmp(&b.w).then((a.u, a.v).cmp(&(b.u, b.v))));
    let mut uf = UnionFind::new(g.n());
    let tree = edges.into_iter().filter(|e| uf.union(e.u, e.v)).collect();
    WeightedGraph::new(g.n(), tree)
}

fn matrix_graph(z: &ProximityMatrix) -> Result<WeightedGraph> {
    WeightedGraph::new(z.n(), z.present_pairs().into_iter().map(|(u, v, w)| Edge { u, v, w }).collect())
}

fn tree_matrix(tree: &WeightedGraph) -> Result<ProximityMatrix> {
    let mut t = ProximityMatrix::absent(tree.n());
    for e in tree.edges() {
        t.set(e.u, e.v, e.w)?;
    }
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeClustering {
    pub tree: WeightedGraph,
    pub clusters: BalancedResult,
}

/// Spanning tree of the present entries, then size-capped agglomeration
/// that only sees tree edges.
pub fn mst_clustering(z: &ProximityMatrix, max_size: usize, linkage: Linkage) -> Result<TreeClustering> {
    let tree = minimum_spanning_tree(&matrix_graph(z)?)?;
    let clusters = agglomerative_balanced(&tree_matrix(&tree)?, linkage, max_size, None)?;
    Ok(TreeClustering { tree, clusters })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveTreeClustering {
    /// Level bound at which the level graph first became connected.
    pub threshold: u32,
    pub ordinal: ProximityMatrix,
    pub tree: WeightedGraph,
    pub clusters: BalancedResult,
}

/// Bucket distances into `levels` equal-width ordinal levels (1 = closest),
/// admit pairs up to a growing level bound until the graph connects, then
/// cluster its spanning tree (weighted by the raw distances).
pub fn adaptive_mst_clustering(
    d: &Dataset,
    metric: Metric,
    levels: u32,
    min_size: usize,
    max_size: usize,
    exec: Exec,
) -> Result<AdaptiveTreeClustering> {
    if levels < 2 {
        return Err(Error::InvalidParameter("at least two ordinal levels are needed".into()));
    }
    if min_size > max_size {
        return Err(Error::InvalidParameter(format!("size bounds [{min_size}, {max_size}] are reversed")));
    }
    let z = proximity_matrix(d, metric, exec)?;
    let mut ordinal = ProximityMatrix::absent(z.n());
    if let Some((lo, hi)) = z.range() {
        let rule = (hi > lo).then(|| OrdinalMappingRule::equal_width(lo, hi, levels)).transpose()?;
        for (i, j, v) in z.present_pairs() {
            let level = match &rule {
                Some(r) => r.map(v)? + 1,
                None => 1,
            };
            ordinal.set(i, j, level as f64)?;
        }
    }
    for threshold in 1..=levels {
        let edges: Vec<Edge> = z
            .present_pairs()
            .into_iter()
            .filter(|&(i, j, _)| ordinal.get(i, j).is_some_and(|l| l <= threshold as f64))
            .map(|(u, v, w)| Edge { u, v, w })
            .collect();
        let g = WeightedGraph::new(z.n(), edges)?;
        if g.components().len() <= 1 {
            let tree = minimum_spanning_tree(&g)?;
            let clusters =
                agglomerative_balanced(&tree_matrix(&tree)?, Linkage::Single, max_size, Some(min_size))?;
            return Ok(AdaptiveTreeClustering { threshold, ordinal, tree, clusters });
        }
    }
    unreachable!("the top level admits every pair of a complete matrix")
}

/// Largest clique; among equals, the lexicographically smallest vertex list.
pub fn maximum_clique(g: &WeightedGraph) -> Result<Vec<usize>> {
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n().min(63)) - 1 };
    clique_within(g, all)
}

fn clique_within(g: &WeightedGraph, allowed: u64) -> Result<Vec<usize>> {
    let n = g.n();
    if n > CLIQUE_GUARD {
        return Err(Error::GuardExceeded { needed: n as u128, limit: CLIQUE_GUARD as u128 });
    }
    let mut nb = vec![0u64; n];
    for e in g.edges() {
        nb[e.u] |= 1 << e.v;
        nb[e.v] |= 1 << e.u;
    }
    let mut best = 0u64;
    extend(0, allowed, &nb, &mut best);
    Ok((0..n).filter(|&v| best >> v & 1 == 1).collect())
}

/// Depth-first in ascending vertex order; only a strictly larger clique
/// replaces the incumbent, so the first maximum found is lexicographically
/// smallest.
fn extend(r: u64, mut p: u64, nb: &[u64], best: &mut u64) {
    if r.count_ones() > best.count_ones() || (*best == 0 && r != 0) {
        *best = r;
    }
    while p != 0 {
        if r.count_ones() + p.count_ones() <= best.count_ones() {
            return;
        }
        let v = p.trailing_zeros() as usize;
        extend(r | 1 << v, p & nb[v] & !((1u64 << v) | ((1u64 << v) - 1)), nb, best);
        p &= !(1u64 << v);
    }
}

/// Peel maximum cliques off the graph until no vertex is left.
pub fn clique_clustering(g: &WeightedGraph) -> Result<Partition> {
    let n = g.n();
    if n > CLIQUE_GUARD {
        return Err(Error::GuardExceeded { needed: n as u128, limit: CLIQUE_GUARD as u128 });
    }
    let mut left: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut clusters = Vec::new();
    while left != 0 {
        let c = clique_within(g, left)?;
        for &v in &c {
            left &= !(1u64 << v);
        }
        clusters.push(c);
    }
    Partition::new(n, clusters)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoTracePoint {
    pub iteration: usize,
    pub objective: CorrelationScore,
    /// The two clusters joined at this iteration.
    pub merged: (Vec<usize>, Vec<usize>),
    /// `(disagreement gain, agreement gain)` of the chosen merge.
    pub gain: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationClustering {
    pub partition: Partition,
    pub trace: Vec<ParetoTracePoint>,
}

/// Greedy agglomeration on a signed graph with a bound `q` on the total
/// absolute disagreement.
///
/// A merge qualifies when it adds positive agreement and keeps
/// `|disagreement| ≤ q`. Among qualifying merges: a merge adding no
/// disagreement wins by largest agreement; otherwise the best agreement per
/// unit of added disagreement wins, ties to larger agreement, then to the
/// lowest cluster pair.
pub fn correlation_greedy(g: &SignedWeightedGraph, q: f64) -> Result<CorrelationClustering> {
    if !(q >= 0.0) {
        return Err(Error::InvalidParameter(format!("disagreement budget must be nonnegative, got {q}")));
    }
    let w = g.weight_matrix();
    let mut clusters: Vec<Vec<usize>> = (0..g.n()).map(|i| vec![i]).collect();
    let mut f = CorrelationScore::default();
    let mut trace = Vec::new();
    loop {
        let mut best: Option<(usize, usize, f64, f64)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let (mut dis, mut agr) = (0.0, 0.0);
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        let x = w[i][j];
                        if x < 0.0 {
                            dis += x;
                        } else {
                            agr += x;
                        }
                    }
                }
                if !(agr > 0.0) || (f.disagreement + dis).abs() > q + 1e-12 {
                    continue;
                }
                if best.is_none_or(|(_, _, bd, ba)| prefer((dis, agr), (bd, ba))) {
                    best = Some((a, b, dis, agr));
                }
            }
        }
        let Some((a, b, dis, agr)) = best else { break };
        let merged = (clusters[a].clone(), clusters[b].clone());
        let right = clusters.remove(b);
        clusters[a].extend(right);
        clusters[a].sort_unstable();
        clusters.sort();
        let p = Partition::new(g.n(), clusters.clone())?;
        f = correlation_objective(g, &p)?;
        trace.push(ParetoTracePoint { iteration: trace.len() + 1, objective: f, merged, gain: (dis, agr) });
    }
    Ok(CorrelationClustering { partition: Partition::new(g.n(), clusters)?, trace })
}

/// Strict preference of candidate gain `x` over incumbent `y`.
fn prefer(x: (f64, f64), y: (f64, f64)) -> bool {
    match (x.0 == 0.0, y.0 == 0.0) {
        (true, true) => x.1 > y.1,
        (true, false) => true,
        (false, true) => false,
        (false, false) => {
            let (rx, ry) = (x.1 / x.0.abs(), y.1 / y.0.abs());
            rx > ry || (rx == ry && x.1 > y.1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityStep {
    pub merged: (Vec<usize>, Vec<usize>),
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModularityClustering {
    pub partition: Partition,
    pub q: f64,
    pub steps: Vec<ModularityStep>,
}

/// Greedy merging from singletons while some merge strictly raises
/// modularity (edge counts, weights ignored). Gains are compared exactly in
/// integer units of `1/(4|E|²)`.
pub fn modularity_greedy(g: &WeightedGraph, form: ModularityForm) -> Result<ModularityClustering> {
    let m = g.edge_count() as i64;
    if m == 0 {
        return Err(Error::Empty("edge set"));
    }
    let n = g.n();
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut internal = vec![0i64; n];
    let mut external = vec![0i64; n];
    let mut between = vec![vec![0i64; n]; n];
    for e in g.edges() {
        external[e.u] += 1;
        external[e.v] += 1;
        between[e.u][e.v] += 1;
        between[e.v][e.u] += 1;
    }
    // Per-cluster e − a², scaled by 4|E|² to stay integral.
    let term = |i: i64, x: i64| match form {
        ModularityForm::Counted => 4 * (i * m - (i + x) * (i + x)),
        ModularityForm::Standard => 4 * i * m - (2 * i + x) * (2 * i + x),
    };
    let mut scaled: i64 = (0..n).map(|c| term(internal[c], external[c])).sum();
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(i64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let i = internal[a] + internal[b] + between[a][b];
                let x = external[a] + external[b] - 2 * between[a][b];
                let gain = term(i, x) - term(internal[a], external[a]) - term(internal[b], external[b]);
                if gain > 0 && best.is_none_or(|(bg, _, _)| gain > bg) {
                    best = Some((gain, a, b));
                }
            }
        }
        let Some((gain, a, b)) = best else { break };
        let merged = (clusters[a].clone(), clusters[b].clone());
        internal[a] += internal[b] + between[a][b];
        external[a] += external[b] - 2 * between[a][b];
        let row_b = between[b].clone();
        for (k, add) in row_b.into_iter().enumerate() {
            between[a][k] += add;
            between[k][a] = between[a][k];
        }
        between[a][a] = 0;
        let right = clusters.remove(b);
        clusters[a].extend(right);
        internal.remove(b);
        external.remove(b);
        between.remove(b);
        for r in &mut between {
            r.remove(b);
        }
        scaled += gain;
        steps.push(ModularityStep { merged, q: scaled as f64 / (4 * m * m) as f64 });
    }
    Ok(ModularityClustering { partition: Partition::new(n, clusters)?, q: scaled as f64 / (4 * m * m) as f64, steps })
}

/// Shortest-path edge betweenness (hop counts), one value per edge of `g`
/// in edge order. Each unordered vertex pair contributes a total of 1,
/// split evenly over its shortest paths.
pub fn edge_betweenness(g: &WeightedGraph, exec: Exec) -> Vec<f64> {
    let n = g.n();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, e) in g.edges().iter().enumerate() {
        adj[e.u].push((e.v, k));
        adj[e.v].push((e.u, k));
    }
    let per_source = exec.map_range(n, |s| brandes_pass(&adj, s, g.edge_count()));
    let mut total = vec![0.0; g.edge_count()];
    for part in per_source {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    total.iter().map(|t| t / 2.0).collect()
}

fn brandes_pass(adj: &[Vec<(usize, usize)>], s: usize, m: usize) -> Vec<f64> {
    let n = adj.len();
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, _) in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    let mut score = vec![0.0f64; m];
    for &w in order.iter().rev() {
        for &(v, k) in &adj[w] {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                score[k] += c;
                delta[v] += c;
            }
        }
    }
    score
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GirvanNewman {
    pub partition: Partition,
    /// Removed edges in removal order, with the score they had.
    pub removed: Vec<(usize, usize, f64)>,
    /// Component count after each removal.
    pub components: Vec<usize>,
}

/// Remove the highest-betweenness edge (ties to the smallest endpoints)
/// until the graph has `target` components.
pub fn girvan_newman(g: &WeightedGraph, target: usize, exec: Exec) -> Result<GirvanNewman> {
    let current = g.components().len();
    if target > g.n() || target < current {
        return Err(Error::InvalidParameter(format!(
            "target of {target} components outside [{current}, {}]",
            g.n()
        )));
    }
    let mut h = g.clone();
    let mut removed = Vec::new();
    let mut components = Vec::new();
    let mut count = current;
    while count < target {
        let scores = edge_betweenness(&h, exec);
        let mut k = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[k] + 1e-9 {
                k = i;
            }
        }
        let e = h.edges()[k];
        removed.push((e.u, e.v, scores[k]));
        let rest = h.edges().iter().enumerate().filter(|&(i, _)| i != k).map(|(_, e)| *e).collect();
        h = WeightedGraph::new(h.n(), rest)?;
        count = h.components().len();
        components.push(count);
    }
    Ok(GirvanNewman { partition: h.components(), removed, components })
}
