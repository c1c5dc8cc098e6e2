//! Bottom-up merging of clusters over a proximity matrix.
//!
//! Cluster ids: items are `0..n`, the k-th merge creates id `n + k`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Hierarchy, Partition, ProximityMatrix};
use crate::multiset::{median, EstimateMatrix, MedianDomain, MultisetEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    /// Minimum over present member pairs; absent pairs are ignored.
    Single,
    /// Maximum over member pairs; absent if any pair is absent.
    Complete,
    /// Mean over member pairs; all pairs must be present.
    Average,
    /// Mean of the two merged clusters' values; both must be present.
    Centroid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    pub left: usize,
    pub right: usize,
    pub value: f64,
    pub merged: usize,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeTrace {
    pub n: usize,
    pub events: Vec<MergeEvent>,
    pub partition: Partition,
}

impl MergeTrace {
    /// Re-run the recorded merges from singletons.
    pub fn replay(&self) -> Result<Partition> {
        let mut members: Vec<Vec<usize>> = (0..self.n).map(|i| vec![i]).collect();
        let mut alive: Vec<bool> = vec![true; self.n];
        for e in &self.events {
            for id in [e.left, e.right] {
                if !alive.get(id).copied().unwrap_or(false) {
                    return Err(Error::InvalidParameter(format!("merge uses inactive cluster {id}")));
                }
                alive[id] = false;
            }
            let mut m = members[e.left].clone();
            m.extend(&members[e.right]);
            members.push(m);
            alive.push(true);
        }
        let clusters = (0..members.len()).filter(|&c| alive[c]).map(|c| members[c].clone()).collect();
        Partition::new(self.n, clusters)
    }
}

/// Active-cluster state with a cluster-level proximity table.
struct State {
    linkage: Linkage,
    n: usize,
    ids: Vec<usize>,
    members: Vec<Vec<usize>>,
    /// `d[a][b]` between active slots.
    d: Vec<Vec<Option<f64>>>,
    events: Vec<MergeEvent>,
}

impl State {
    fn new(z: &ProximityMatrix, linkage: Linkage) -> Self {
        let n = z.n();
        State {
            linkage,
            n,
            ids: (0..n).collect(),
            members: (0..n).map(|i| vec![i]).collect(),
            d: (0..n).map(|i| (0..n).map(|j| z.get(i, j)).collect()).collect(),
            events: Vec::new(),
        }
    }

    /// Slot pair with the smallest present value, ties by smallest members.
    fn closest(&self, allowed: impl Fn(usize, usize) -> bool) -> Option<(usize, usize, f64)> {
        let mut best: Option<(f64, (usize, usize), usize, usize)> = None;
        for a in 0..self.ids.len() {
            for b in a + 1..self.ids.len() {
                let Some(v) = self.d[a][b] else { continue };
                if !allowed(a, b) {
                    continue;
                }
                let key = {
                    let (x, y) = (self.members[a][0], self.members[b][0]);
                    (x.min(y), x.max(y))
                };
                let wins = match best {
                    None => true,
                    Some((bv, bk, _, _)) => v < bv || (v == bv && key < bk),
                };
                if wins {
                    best = Some((v, key, a, b));
                }
            }
        }
        best.map(|(v, _, a, b)| (a, b, v))
    }

    fn merge(&mut self, a: usize, b: usize, value: f64) -> Result<usize> {
        let (na, nb) = (self.members[a].len() as f64, self.members[b].len() as f64);
        let mut row = Vec::with_capacity(self.ids.len());
        for k in 0..self.ids.len() {
            let (da, db) = (self.d[a][k], self.d[b][k]);
            let v = match (self.linkage, da, db) {
                _ if k == a || k == b => None,
                (_, None, None) => None,
                (Linkage::Single, x, y) => Some(x.unwrap_or(f64::INFINITY).min(y.unwrap_or(f64::INFINITY))),
                (Linkage::Complete, Some(x), Some(y)) => Some(x.max(y)),
                (Linkage::Complete, _, _) => None,
                (Linkage::Average, Some(x), Some(y)) => Some((na * x + nb * y) / (na + nb)),
                (Linkage::Centroid, Some(x), Some(y)) => Some((x + y) / 2.0),
                (_, x, _) => {
                    let side = if x.is_none() { a } else { b };
                    return Err(Error::AbsentProximity(self.members[side][0], self.members[k][0]));
                }
            };
            row.push(v);
        }
        let mut merged = std::mem::take(&mut self.members[a]);
        merged.extend(std::mem::take(&mut self.members[b]));
        merged.sort_unstable();
        let id = self.n + self.events.len();
        self.events.push(MergeEvent {
            left: self.ids[a],
            right: self.ids[b],
            value,
            merged: id,
            size: merged.len(),
        });
        // Slot a takes the merged cluster, slot b is dropped.
        self.ids[a] = id;
        self.members[a] = merged;
        for (k, &v) in row.iter().enumerate().take(self.ids.len()) {
            self.d[a][k] = v;
            self.d[k][a] = v;
        }
        self.d[a][a] = Some(0.0);
        self.ids.remove(b);
        self.members.remove(b);
        self.d.remove(b);
        for r in &mut self.d {
            r.remove(b);
        }
        Ok(if b < a { a - 1 } else { a })
    }

    fn partition(&self, frozen: &[Vec<usize>]) -> Result<Partition> {
        let mut cs: Vec<Vec<usize>> = frozen.to_vec();
        cs.extend(self.members.iter().cloned());
        Partition::new(self.n, cs)
    }
}

/// Full bottom-up run: `n − 1` merges at the globally closest pair.
pub fn agglomerative_basic(z: &ProximityMatrix, linkage: Linkage) -> Result<MergeTrace> {
    let mut st = State::new(z, linkage);
    while st.ids.len() > 1 {
        let Some((a, b, v)) = st.closest(|_, _| true) else {
            return Err(Error::AbsentProximity(st.members[0][0], st.members[1][0]));
        };
        st.merge(a, b, v)?;
    }
    let partition = st.partition(&[])?;
    Ok(MergeTrace { n: st.n, events: st.events, partition })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedResult {
    pub partition: Partition,
    pub trace: MergeTrace,
    /// Clusters frozen on reaching the size cap, in freezing order.
    pub frozen: Vec<Vec<usize>>,
    /// Final clusters smaller than the requested minimum size.
    pub undersized: Vec<Vec<usize>>,
}

/// Size-capped run: a cluster reaching `max_size` is frozen and leaves the
/// process; merges that would exceed `max_size` are skipped. Whatever is
/// still active when no admissible pair is left stays as it is.
pub fn agglomerative_balanced(
    z: &ProximityMatrix,
    linkage: Linkage,
    max_size: usize,
    min_size: Option<usize>,
) -> Result<BalancedResult> {
    if max_size == 0 {
        return Err(Error::InvalidParameter("maximum cluster size must be at least 1".into()));
    }
    let mut st = State::new(z, linkage);
    let mut frozen: Vec<Vec<usize>> = Vec::new();
    if max_size == 1 {
        frozen = std::mem::take(&mut st.members);
        st.ids.clear();
    }
    loop {
        let sizes: Vec<usize> = st.members.iter().map(Vec::len).collect();
        let Some((a, b, v)) = st.closest(|a, b| sizes[a] + sizes[b] <= max_size) else { break };
        let slot = st.merge(a, b, v)?;
        if st.members[slot].len() == max_size {
            frozen.push(st.members.remove(slot));
            st.ids.remove(slot);
            st.d.remove(slot);
            for r in &mut st.d {
                r.remove(slot);
            }
        }
    }
    let partition = st.partition(&frozen)?;
    let min = min_size.unwrap_or(0);
    let undersized = partition.clusters().iter().filter(|c| c.len() < min).cloned().collect();
    let trace = MergeTrace { n: st.n, events: st.events, partition: partition.clone() };
    Ok(BalancedResult { partition, trace, frozen, undersized })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalResult {
    pub hierarchy: Hierarchy,
    /// Item groups formed at each step.
    pub steps: Vec<Vec<Vec<usize>>>,
}

/// Concurrent merging over ordinal levels.
///
/// Each step takes every pair of active nodes at the current minimal level
/// (at most `cap` pairs, in index order) and turns each maximal clique of
/// those pairs into a new node. A node in several cliques gets several
/// parents, so the result is a DAG. Node proximity is the minimum level over
/// distinct member items.
pub fn agglomerative_ordinal(z: &ProximityMatrix, cap: usize) -> Result<OrdinalResult> {
    if cap == 0 {
        return Err(Error::InvalidParameter("pair cap must be at least 1".into()));
    }
    let n = z.n();
    for (i, j, v) in z.present_pairs() {
        if v.fract() != 0.0 || v < 0.0 {
            return Err(Error::InvalidParameter(format!("entry ({i},{j}) = {v} is not an ordinal level")));
        }
    }
    let mut labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut items: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut edges = Vec::new();
    let mut steps = Vec::new();
    let level = |a: &BTreeSet<usize>, b: &BTreeSet<usize>| {
        let mut best: Option<f64> = None;
        for &i in a {
            for &j in b {
                if i != j {
                    if let Some(v) = z.get(i, j) {
                        best = Some(best.map_or(v, |b: f64| b.min(v)));
                    }
                }
            }
        }
        best
    };
    let limit = n * n + 1;
    while active.len() > 1 {
        if steps.len() >= limit {
            return Err(Error::Infeasible("ordinal agglomeration did not settle".into()));
        }
        let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
        for x in 0..active.len() {
            for y in x + 1..active.len() {
                if let Some(v) = level(&items[active[x]], &items[active[y]]) {
                    pairs.push((x, y, v));
                }
            }
        }
        let Some(min) = pairs.iter().map(|p| p.2).reduce(f64::min) else { break };
        let chosen: Vec<(usize, usize)> =
            pairs.iter().filter(|p| p.2 == min).take(cap).map(|p| (p.0, p.1)).collect();
        let mut adj = vec![BTreeSet::new(); active.len()];
        for &(x, y) in &chosen {
            adj[x].insert(y);
            adj[y].insert(x);
        }
        let mut groups = maximal_cliques(&adj);
        groups.retain(|g| g.len() > 1);
        groups.sort();
        let consumed: BTreeSet<usize> = groups.iter().flatten().copied().collect();
        let mut survivors: Vec<usize> =
            (0..active.len()).filter(|x| !consumed.contains(x)).map(|x| active[x]).collect();
        let kept = survivors.len();
        let mut step_groups = Vec::new();
        for g in &groups {
            let set: BTreeSet<usize> = g.iter().flat_map(|&x| items[active[x]].iter().copied()).collect();
            // A group covering exactly the items of a live node hangs under it.
            let node = match survivors.iter().find(|&&v| items[v] == set) {
                Some(&v) => v,
                None => {
                    let v = labels.len();
                    labels.push(format!("s{}.{}", steps.len() + 1, survivors.len() - kept + 1));
                    items.push(set.clone());
                    survivors.push(v);
                    v
                }
            };
            edges.extend(g.iter().map(|&x| (node, active[x])));
            step_groups.push(set.into_iter().collect());
        }
        steps.push(step_groups);
        active = survivors;
    }
    Ok(OrdinalResult { hierarchy: Hierarchy::new(labels, edges)?, steps })
}

/// Bron-Kerbosch with pivoting; cliques listed with ascending members.
pub(crate) fn maximal_cliques(adj: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    fn bk(
        r: &mut Vec<usize>,
        mut p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        adj: &[BTreeSet<usize>],
        out: &mut Vec<Vec<usize>>,
    ) {
        if p.is_empty() && x.is_empty() {
            let mut c = r.clone();
            c.sort_unstable();
            out.push(c);
            return;
        }
        let pivot = p.iter().chain(&x).copied().max_by_key(|&u| adj[u].intersection(&p).count());
        let pivot_nb = pivot.map(|u| adj[u].clone()).unwrap_or_default();
        let cand: Vec<usize> = p.difference(&pivot_nb).copied().collect();
        for v in cand {
            r.push(v);
            bk(r, p.intersection(&adj[v]).copied().collect(), x.intersection(&adj[v]).copied().collect(), adj, out);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    bk(&mut Vec::new(), (0..adj.len()).collect(), BTreeSet::new(), adj, &mut out);
    out.sort();
    out
}

/// One concurrent merge of a multiset run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultisetMerge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Integrated estimate of the pair at merge time.
    pub estimate: MultisetEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultisetAgglomeration {
    pub partition: Partition,
    /// Merges of each iteration, in pair order.
    pub iterations: Vec<Vec<MultisetMerge>>,
    pub frozen: Vec<Vec<usize>>,
}

/// Size-capped agglomeration on multiset pair estimates.
///
/// The estimate of two clusters is the median (over `domain`) of their
/// present member-pair estimates. Each iteration finds the best such
/// estimate among pairs whose union fits `max_size` and merges, at once,
/// every pair at that estimate, skipping pairs that reuse a cluster already
/// merged in the iteration. Clusters reaching `max_size` are frozen.
pub fn agglomerative_multiset(
    e: &EstimateMatrix,
    max_size: usize,
    domain: MedianDomain,
) -> Result<MultisetAgglomeration> {
    if max_size == 0 {
        return Err(Error::InvalidParameter("maximum cluster size must be at least 1".into()));
    }
    let n = e.n();
    let mut active: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut frozen: Vec<Vec<usize>> = Vec::new();
    let mut iterations = Vec::new();
    if max_size == 1 {
        frozen = std::mem::take(&mut active);
    }
    loop {
        let mut scored: Vec<(usize, usize, MultisetEstimate)> = Vec::new();
        for a in 0..active.len() {
            for b in a + 1..active.len() {
                if active[a].len() + active[b].len() > max_size {
                    continue;
                }
                let pairs: Vec<MultisetEstimate> = active[a]
                    .iter()
                    .flat_map(|&i| active[b].iter().filter_map(move |&j| e.get(i, j).cloned()))
                    .collect();
                if pairs.is_empty() {
                    continue;
                }
                scored.push((a, b, median(&pairs, domain)?.median));
            }
        }
        let Some(best) = scored.iter().map(|s| &s.2).max().cloned() else { break };
        let mut used = vec![false; active.len()];
        let mut merges = Vec::new();
        for (a, b, est) in scored {
            if est != best || used[a] || used[b] {
                continue;
            }
            used[a] = true;
            used[b] = true;
            merges.push(MultisetMerge { left: active[a].clone(), right: active[b].clone(), estimate: est });
        }
        let mut next: Vec<Vec<usize>> =
            active.iter().enumerate().filter(|(k, _)| !used[*k]).map(|(_, c)| c.clone()).collect();
        for m in &merges {
            let mut c = [m.left.as_slice(), m.right.as_slice()].concat();
            c.sort_unstable();
            if c.len() == max_size {
                frozen.push(c);
            } else {
                next.push(c);
            }
        }
        next.sort();
        active = next;
        iterations.push(merges);
    }
    let partition = Partition::new(n, frozen.iter().chain(&active).cloned().collect())?;
    Ok(MultisetAgglomeration { partition, iterations, frozen })
}
