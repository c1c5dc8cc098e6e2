//! Distances between clustering solutions, rankings and hierarchies, and
//! consensus (median) partitions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{Hierarchy, Partition, Ranking};

/// Largest number of candidate partitions exhaustive consensus will score.
pub const CONSENSUS_GUARD: u128 = 2_000_000;

/// One relocation: `item` leaves working cluster `from` for cluster `to`.
///
/// Working clusters are the source partition's clusters in canonical order,
/// followed by empty padding clusters when the target has more clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub item: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditTrace {
    pub cost: usize,
    pub moves: Vec<Move>,
    /// `(working source cluster, target cluster)` in match order.
    pub matching: Vec<(usize, usize)>,
}

impl EditTrace {
    /// Replay the moves on `source`.
    pub fn apply(&self, source: &Partition) -> Result<Partition> {
        let width = self
            .moves
            .iter()
            .map(|m| m.from.max(m.to) + 1)
            .max()
            .unwrap_or(0)
            .max(source.len());
        let mut work: Vec<Vec<usize>> = source.clusters().to_vec();
        work.resize(width, Vec::new());
        for m in &self.moves {
            let pos = work[m.from].iter().position(|&i| i == m.item).ok_or_else(|| {
                Error::InvalidPartition(format!("item {} is not in cluster {}", m.item, m.from))
            })?;
            work[m.from].swap_remove(pos);
            work[m.to].push(m.item);
        }
        work.retain(|c| !c.is_empty());
        Partition::new(source.n(), work)
    }
}

fn check_universe(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::UniverseMismatch { left: a, right: b });
    }
    Ok(())
}

/// Greedy max-intersection relocation count from `x1` to `x2`.
///
/// Repeatedly match the unmatched (source, target) cluster pair with the
/// largest overlap, ties to the lowest source then lowest target index, and
/// pull every target member not yet in the source cluster into it.
pub fn partition_edit_cost(x1: &Partition, x2: &Partition) -> Result<EditTrace> {
    check_universe(x1.n(), x2.n())?;
    let target = x2.clusters();
    let mut work: Vec<Vec<usize>> = x1.clusters().to_vec();
    if work.len() < target.len() {
        work.resize(target.len(), Vec::new());
    }
    let mut loc = vec![0usize; x1.n()];
    for (c, cl) in work.iter().enumerate() {
        for &i in cl {
            loc[i] = c;
        }
    }
    let mut row_open = vec![true; work.len()];
    let mut col_open = vec![true; target.len()];
    let mut moves = Vec::new();
    let mut matching = Vec::with_capacity(target.len());
    for _ in 0..target.len() {
        let mut best: Option<(usize, usize, usize)> = None;
        for s in (0..work.len()).filter(|&s| row_open[s]) {
            for t in (0..target.len()).filter(|&t| col_open[t]) {
                let overlap = target[t].iter().filter(|&&i| loc[i] == s).count();
                if best.is_none_or(|(b, _, _)| overlap > b) {
                    best = Some((overlap, s, t));
                }
            }
        }
        let (_, s, t) = best.expect("a free row exists for every free column");
        for &item in &target[t] {
            let from = loc[item];
            if from != s {
                work[from].retain(|&i| i != item);
                work[s].push(item);
                loc[item] = s;
                moves.push(Move { item, from, to: s });
            }
        }
        row_open[s] = false;
        col_open[t] = false;
        matching.push((s, t));
    }
    Ok(EditTrace { cost: moves.len(), moves, matching })
}

fn check_rankings(r1: &Ranking, r2: &Ranking) -> Result<(Vec<usize>, Vec<usize>)> {
    check_universe(r1.n(), r2.n())?;
    Ok((r1.positions(), r2.positions()))
}

/// Sum over items of the absolute layer shift.
pub fn ranking_distance(r1: &Ranking, r2: &Ranking) -> Result<usize> {
    let (a, b) = check_rankings(r1, r2)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum())
}

/// Histogram of the shift `κ = layer in r1 − layer in r2` over
/// `κ ∈ [−(n−1), n−1]`; index `k` holds `κ = k − (n−1)`.
pub fn ranking_vector_proximity(r1: &Ranking, r2: &Ranking) -> Result<Vec<usize>> {
    let (a, b) = check_rankings(r1, r2)?;
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = vec![0; 2 * (n - 1) + 1];
    for (x, y) in a.iter().zip(&b) {
        h[(*x as i64 - *y as i64 + n as i64 - 1) as usize] += 1;
    }
    Ok(h)
}

/// Edge insertions plus deletions turning `h1` into `h2`, by node label.
pub fn hierarchy_edit_distance(h1: &Hierarchy, h2: &Hierarchy) -> usize {
    h1.labelled_edges().symmetric_difference(&h2.labelled_edges()).count()
}

/// A hierarchy whose nodes hold item clusters; the non-empty node contents
/// partition the items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteredHierarchy {
    n: usize,
    hierarchy: Hierarchy,
    contents: BTreeMap<String, Vec<usize>>,
}

impl ClusteredHierarchy {
    pub fn new(n: usize, hierarchy: Hierarchy, contents: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        for label in contents.keys() {
            if !hierarchy.labels().contains(label) {
                return Err(Error::InvalidHierarchy(format!("contents for unknown node {label:?}")));
            }
        }
        let clusters: Vec<Vec<usize>> = contents.values().filter(|c| !c.is_empty()).cloned().collect();
        Partition::new(n, clusters)?;
        Ok(ClusteredHierarchy { n, hierarchy, contents })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hierarchy(&self) -> &Hierarchy {
        &self.hierarchy
    }

    pub fn contents(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.contents
    }

    pub fn partition(&self) -> Partition {
        let clusters = self.contents.values().filter(|c| !c.is_empty()).cloned().collect();
        Partition::new(self.n, clusters).expect("validated at construction")
    }
}

/// `(item relocations between same-labelled nodes, edge edit distance)`.
///
/// Clusters are matched by node label, not by overlap: swapping the
/// contents of two nodes costs relocations even when the bare partitions
/// coincide.
pub fn hierarchical_clustering_distance(a: &ClusteredHierarchy, b: &ClusteredHierarchy) -> Result<(usize, usize)> {
    check_universe(a.n, b.n)?;
    let kept: usize = a
        .contents
        .iter()
        .map(|(label, xs)| {
            let ys = b.contents.get(label).map(Vec::as_slice).unwrap_or(&[]);
            xs.iter().filter(|i| ys.contains(i)).count()
        })
        .sum();
    Ok((a.n - kept, hierarchy_edit_distance(&a.hierarchy, &b.hierarchy)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConsensusMode {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consensus {
    pub partition: Partition,
    /// Edit cost from each input to the consensus.
    pub costs: Vec<usize>,
    pub total: usize,
    pub candidates_evaluated: u64,
}

/// Stirling numbers of the second kind `S(n, k)` for `k ≤ kmax`.
fn stirling2(n: usize, kmax: usize) -> Result<Vec<u128>> {
    let mut row = vec![0u128; kmax + 1];
    row[0] = 1;
    for _ in 0..n {
        let mut next = vec![0u128; kmax + 1];
        for k in 1..=kmax {
            next[k] = (k as u128)
                .checked_mul(row[k])
                .and_then(|v| v.checked_add(row[k - 1]))
                .ok_or(Error::Overflow("partition count"))?;
        }
        row = next;
    }
    Ok(row)
}

/// Number of set partitions of `n` items into `lo..=hi` clusters.
pub fn count_partitions(n: usize, lo: usize, hi: usize) -> Result<u128> {
    let s = stirling2(n, hi)?;
    s[lo.min(hi + 1)..=hi].iter().try_fold(0u128, |a, &b| a.checked_add(b).ok_or(Error::Overflow("partition count")))
}

/// All partitions of `n` items with `lo..=hi` clusters, as
/// restricted-growth label strings.
pub fn enumerate_partitions(n: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut a = vec![0usize; n];
    grow(&mut a, 1, 1, lo, hi, &mut out);
    out
}

fn grow(a: &mut Vec<usize>, pos: usize, used: usize, lo: usize, hi: usize, out: &mut Vec<Vec<usize>>) {
    let n = a.len();
    if used + (n - pos) < lo {
        return;
    }
    if pos == n {
        if (lo..=hi).contains(&used) {
            out.push(a.clone());
        }
        return;
    }
    for label in 0..=used.min(hi.saturating_sub(1)) {
        a[pos] = label;
        grow(a, pos + 1, used.max(label + 1), lo, hi, out);
    }
}

fn total_cost(inputs: &[Partition], candidate: &Partition) -> Result<(usize, Vec<usize>)> {
    let costs = inputs
        .iter()
        .map(|x| partition_edit_cost(x, candidate).map(|t| t.cost))
        .collect::<Result<Vec<_>>>()?;
    Ok((costs.iter().sum(), costs))
}

/// Partition within `[min_clusters, max_clusters]` minimizing the summed
/// edit cost from every input. Ties go to fewer clusters, then canonical order.
pub fn consensus_partition(
    inputs: &[Partition],
    min_clusters: usize,
    max_clusters: usize,
    mode: ConsensusMode,
    exec: Exec,
) -> Result<Consensus> {
    let first = inputs.first().ok_or(Error::Empty("input solutions"))?;
    let n = first.n();
    for x in inputs {
        check_universe(n, x.n())?;
    }
    if min_clusters == 0 || min_clusters > max_clusters || min_clusters > n {
        return Err(Error::InvalidParameter(format!(
            "cluster bounds [{min_clusters}, {max_clusters}] impossible for {n} items"
        )));
    }
    let max_clusters = max_clusters.min(n);
    match mode {
        ConsensusMode::Exhaustive => exhaustive(inputs, n, min_clusters, max_clusters, exec),
        ConsensusMode::Greedy => greedy(inputs, min_clusters, max_clusters, exec),
    }
}

type Scored = (usize, usize, Partition, Vec<usize>);

fn better(a: &Scored, b: &Scored) -> bool {
    (a.0, a.1, &a.2) < (b.0, b.1, &b.2)
}

fn exhaustive(inputs: &[Partition], n: usize, lo: usize, hi: usize, exec: Exec) -> Result<Consensus> {
    let needed = count_partitions(n, lo, hi)?;
    if needed > CONSENSUS_GUARD {
        return Err(Error::GuardExceeded { needed, limit: CONSENSUS_GUARD });
    }
    let labels = enumerate_partitions(n, lo, hi);
    let scored = exec.map_slice(&labels, |l| {
        let p = Partition::from_assignment(l);
        total_cost(inputs, &p).map(|(t, c)| (t, p.len(), p, c))
    });
    let mut best: Option<Scored> = None;
    for s in scored {
        let s = s?;
        if best.as_ref().is_none_or(|b| better(&s, b)) {
            best = Some(s);
        }
    }
    let (total, _, partition, costs) = best.ok_or_else(|| Error::Infeasible("no admissible partition".into()))?;
    Ok(Consensus { partition, costs, total, candidates_evaluated: labels.len() as u64 })
}

/// Start from the set median, then take the best single-item relocation
/// while it strictly lowers (bound violation, total cost).
fn greedy(inputs: &[Partition], lo: usize, hi: usize, exec: Exec) -> Result<Consensus> {
    let violation = |p: &Partition| {
        let l = p.len();
        if l < lo { lo - l } else { l.saturating_sub(hi) }
    };
    let mut evaluated = 0u64;
    let mut cur: Option<(usize, Scored)> = None;
    for x in inputs {
        let (t, c) = total_cost(inputs, x)?;
        evaluated += 1;
        let s = (violation(x), (t, x.len(), x.clone(), c));
        if cur.as_ref().is_none_or(|b| (s.0, s.1 .0) < (b.0, b.1 .0)) {
            cur = Some(s);
        }
    }
    let (mut viol, mut state) = cur.expect("inputs are non-empty");
    loop {
        let assignment = state.2.assignment();
        let k = state.2.len();
        let n = assignment.len();
        let neighbours: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..=k).map(move |c| (i, c))).filter(|&(i, c)| assignment[i] != c).collect();
        let scored = exec.map_slice(&neighbours, |&(i, c)| {
            let mut a = assignment.clone();
            a[i] = c;
            let p = Partition::from_assignment(&a);
            total_cost(inputs, &p).map(|(t, costs)| (violation(&p), (t, p.len(), p, costs)))
        });
        evaluated += neighbours.len() as u64;
        let mut step: Option<(usize, Scored)> = None;
        for s in scored {
            let s = s?;
            let improves = (s.0, s.1 .0) < (viol, state.0);
            let beats = step.as_ref().is_none_or(|b| (s.0, s.1 .0) < (b.0, b.1 .0) || ((s.0, s.1 .0) == (b.0, b.1 .0) && better(&s.1, &b.1)));
            if improves && beats {
                step = Some(s);
            }
        }
        match step {
            Some((v, s)) => {
                viol = v;
                state = s;
            }
            None => break,
        }
    }
    if viol > 0 {
        return Err(Error::Infeasible(format!("no partition with {lo}..={hi} clusters reached")));
    }
    let (total, _, partition, costs) = state;
    Ok(Consensus { partition, costs, total, candidates_evaluated: evaluated })
}
