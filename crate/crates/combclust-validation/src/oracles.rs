//! Slow, obviously-correct reference computations.

use std::collections::{BTreeMap, VecDeque};

use combclust::multiset::{enumerate_scale, MultisetEstimate};
use combclust::model::UnionFind;
use combclust::{Partition, WeightedGraph};

/// Fewest single-level moves of one element between two estimates, by
/// breadth-first search over the whole scale.
pub fn step_distance_bfs(a: &MultisetEstimate, b: &MultisetEstimate) -> Option<u64> {
    let scale = enumerate_scale(a.levels() as u32, a.cardinality(), false).ok()?;
    let index: BTreeMap<&MultisetEstimate, usize> = scale.iter().enumerate().map(|(k, e)| (e, k)).collect();
    let start = *index.get(a)?;
    let goal = *index.get(b)?;
    let mut dist = vec![u64::MAX; scale.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(k) = queue.pop_front() {
        if k == goal {
            return Some(dist[k]);
        }
        let c = scale[k].counts();
        for from in 0..c.len() {
            if c[from] == 0 {
                continue;
            }
            for to in [from.wrapping_sub(1), from + 1] {
                if to >= c.len() {
                    continue;
                }
                let mut next = c.to_vec();
                next[from] -= 1;
                next[to] += 1;
                let e = MultisetEstimate::new(next).ok()?;
                let nk = index[&e];
                if dist[nk] == u64::MAX {
                    dist[nk] = dist[k] + 1;
                    queue.push_back(nk);
                }
            }
        }
    }
    None
}

/// Minimum spanning tree weight by trying every `n − 1` edge subset.
pub fn mst_weight_brute(g: &WeightedGraph) -> Option<f64> {
    let n = g.n();
    if n <= 1 {
        return Some(0.0);
    }
    let edges = g.edges();
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n - 1);
    fn go(edges: &[combclust::Edge], n: usize, start: usize, pick: &mut Vec<usize>, best: &mut Option<f64>) {
        if pick.len() == n - 1 {
            let mut uf = UnionFind::new(n);
            if pick.iter().all(|&k| uf.union(edges[k].u, edges[k].v)) {
                let w: f64 = pick.iter().map(|&k| edges[k].w).sum();
                if best.is_none_or(|b| w < b) {
                    *best = Some(w);
                }
            }
            return;
        }
        for k in start..edges.len() {
            pick.push(k);
            go(edges, n, k + 1, pick, best);
            pick.pop();
        }
    }
    go(edges, n, 0, &mut pick, &mut best);
    best
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

/// Best value over all perfect matchings.
pub fn assignment_brute(cost: &[Vec<f64>], maximize: bool) -> f64 {
    let vals = permutations(cost.len())
        .into_iter()
        .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum::<f64>());
    if maximize {
        vals.fold(f64::NEG_INFINITY, f64::max)
    } else {
        vals.fold(f64::INFINITY, f64::min)
    }
}

/// Best 0/1 knapsack profit over all subsets.
pub fn knapsack_brute(items: &[(f64, f64)], capacity: f64) -> f64 {
    let mut best = 0.0f64;
    for mask in 0u32..(1 << items.len()) {
        let (mut p, mut w) = (0.0, 0.0);
        for (k, it) in items.iter().enumerate() {
            if mask >> k & 1 == 1 {
                p += it.0;
                w += it.1;
            }
        }
        if w <= capacity + 1e-9 {
            best = best.max(p);
        }
    }
    best
}

/// Best multiple-choice profit over the full product of options, `None`
/// when nothing fits.
pub fn multiple_choice_brute(groups: &[Vec<(f64, f64)>], capacity: f64) -> Option<f64> {
    fn go(groups: &[Vec<(f64, f64)>], g: usize, p: f64, w: f64, cap: f64, best: &mut Option<f64>) {
        if w > cap + 1e-9 {
            return;
        }
        if g == groups.len() {
            if best.is_none_or(|b| p > b) {
                *best = Some(p);
            }
            return;
        }
        for &(op, ow) in &groups[g] {
            go(groups, g + 1, p + op, w + ow, cap, best);
        }
    }
    let mut best = None;
    go(groups, 0, 0.0, 0.0, capacity, &mut best);
    best
}

/// Fewest relocations turning `a` into `b`: items outside the best
/// one-to-one pairing of clusters by overlap.
pub fn edit_cost_optimum(a: &Partition, b: &Partition) -> usize {
    let la = a.assignment();
    let lb = b.assignment();
    let k = a.len().max(b.len());
    let mut overlap = vec![vec![0usize; k]; k];
    for i in 0..la.len() {
        overlap[la[i]][lb[i]] += 1;
    }
    let best = permutations(k)
        .into_iter()
        .map(|p| p.iter().enumerate().map(|(s, &t)| overlap[s][t]).sum::<usize>())
        .max()
        .unwrap_or(0);
    la.len() - best
}
