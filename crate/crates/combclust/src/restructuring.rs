//! One-stage restructuring of a clustering solution toward a goal solution
//! under a change budget, with the knapsack and multiple-choice dynamic
//! programs that drive the selection.

use serde::{Deserialize, Serialize};

use crate::compare::partition_edit_cost;
use crate::error::{Error, Result};
use crate::model::Partition;

/// Default step for turning real weights into integers.
pub const DEFAULT_RESOLUTION: f64 = 1e-3;

/// Largest scaled capacity the DP tables may span.
pub const DP_CAPACITY_GUARD: u128 = 50_000_000;

fn scale_capacity(capacity: f64, resolution: f64) -> Result<usize> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::InvalidParameter(format!("resolution {resolution} must be positive")));
    }
    if !(capacity >= 0.0) || !capacity.is_finite() {
        return Err(Error::InvalidParameter(format!("capacity {capacity} must be finite and nonnegative")));
    }
    let c = (capacity / resolution).round();
    if c as u128 > DP_CAPACITY_GUARD {
        return Err(Error::GuardExceeded { needed: c as u128, limit: DP_CAPACITY_GUARD });
    }
    Ok(c as usize)
}

fn scale_weight(w: f64, resolution: f64) -> Result<usize> {
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::InvalidParameter(format!("weight {w} must be finite and nonnegative")));
    }
    Ok((w / resolution).round() as usize)
}

fn check_profit(p: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter(format!("profit {p} is not finite")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnapsackSolution {
    /// Chosen item indices, ascending.
    pub selected: Vec<usize>,
    pub profit: f64,
    pub weight: f64,
}

/// 0/1 knapsack over `(profit, weight)` items. Weights and capacity are
/// rounded to multiples of `resolution`; an item is taken only when it
/// strictly improves the table, so ties favour leaving later items out.
pub fn knapsack_dp(items: &[(f64, f64)], capacity: f64, resolution: f64) -> Result<KnapsackSolution> {
    let cap = scale_capacity(capacity, resolution)?;
    let mut ws = Vec::with_capacity(items.len());
    for &(p, w) in items {
        check_profit(p)?;
        ws.push(scale_weight(w, resolution)?);
    }
    let mut best = vec![0.0f64; cap + 1];
    let mut take = vec![vec![false; cap + 1]; items.len()];
    for (i, &(p, _)) in items.iter().enumerate() {
        let w = ws[i];
        if w > cap {
            continue;
        }
        for c in (w..=cap).rev() {
            let cand = best[c - w] + p;
            if cand > best[c] {
                best[c] = cand;
                take[i][c] = true;
            }
        }
    }
    let mut selected = Vec::new();
    let mut c = cap;
    for i in (0..items.len()).rev() {
        if take[i][c] {
            selected.push(i);
            c -= ws[i];
        }
    }
    selected.reverse();
    let profit = selected.iter().map(|&i| items[i].0).sum();
    let weight = selected.iter().map(|&i| items[i].1).sum();
    Ok(KnapsackSolution { selected, profit, weight })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipleChoiceSolution {
    /// Chosen option index per group.
    pub choice: Vec<usize>,
    pub profit: f64,
    pub weight: f64,
}

/// Multiple-choice knapsack: exactly one option per group. A group that may
/// be skipped must carry an explicit zero-weight option. Ties pick the
/// lowest option index, deciding groups from last to first.
pub fn multiple_choice_dp(groups: &[Vec<(f64, f64)>], capacity: f64, resolution: f64) -> Result<MultipleChoiceSolution> {
    let cap = scale_capacity(capacity, resolution)?;
    let mut ws = Vec::with_capacity(groups.len());
    for (g, opts) in groups.iter().enumerate() {
        if opts.is_empty() {
            return Err(Error::InvalidParameter(format!("group {g} has no options")));
        }
        let mut row = Vec::with_capacity(opts.len());
        for &(p, w) in opts {
            check_profit(p)?;
            row.push(scale_weight(w, resolution)?);
        }
        ws.push(row);
    }
    // best[c]: best profit of the groups so far within weight c.
    let mut best: Vec<Option<f64>> = vec![Some(0.0); cap + 1];
    let mut pick: Vec<Vec<usize>> = Vec::with_capacity(groups.len());
    for (g, opts) in groups.iter().enumerate() {
        let mut next = vec![None; cap + 1];
        let mut arg = vec![usize::MAX; cap + 1];
        for c in 0..=cap {
            for (k, &(p, _)) in opts.iter().enumerate() {
                let w = ws[g][k];
                if w > c {
                    continue;
                }
                if let Some(prev) = best[c - w] {
                    let cand = prev + p;
                    if next[c].is_none_or(|b| cand > b) {
                        next[c] = Some(cand);
                        arg[c] = k;
                    }
                }
            }
        }
        best = next;
        pick.push(arg);
    }
    if best[cap].is_none() {
        return Err(Error::Infeasible("no combination of options fits the capacity".into()));
    }
    let mut choice = vec![0; groups.len()];
    let mut c = cap;
    for g in (0..groups.len()).rev() {
        let k = pick[g][c];
        choice[g] = k;
        c -= ws[g][k];
    }
    let profit = choice.iter().enumerate().map(|(g, &k)| groups[g][k].0).sum();
    let weight = choice.iter().enumerate().map(|(g, &k)| groups[g][k].1).sum();
    Ok(MultipleChoiceSolution { choice, profit, weight })
}

/// Relocation of one item between working clusters.
///
/// Working clusters are the initial solution's clusters in canonical order,
/// followed by fresh empty clusters when the goal has more clusters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeOperation {
    pub item: usize,
    pub source: usize,
    pub target: usize,
    /// Goal cluster matched with `target`.
    pub goal_cluster: usize,
    pub cost: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestructurePlan {
    /// The compressed operation set, in derivation order.
    pub operations: Vec<ChangeOperation>,
    /// Indices into `operations`, ascending.
    pub selected: Vec<usize>,
    pub result: Partition,
    pub total_cost: f64,
    pub total_profit: f64,
    /// Edit distance from `result` to the goal.
    pub residual: usize,
}

/// Apply a subset of operations to the initial solution.
pub fn apply_operations(s1: &Partition, ops: &[ChangeOperation], selected: &[usize]) -> Result<Partition> {
    let width = ops.iter().map(|o| o.source.max(o.target) + 1).max().unwrap_or(0).max(s1.len());
    let mut work = s1.clusters().to_vec();
    work.resize(width, Vec::new());
    for &k in selected {
        let op = ops.get(k).ok_or_else(|| Error::InvalidParameter(format!("no operation {k}")))?;
        let pos = work[op.source].iter().position(|&i| i == op.item).ok_or_else(|| {
            Error::InvalidParameter(format!("item {} is not in cluster {}", op.item, op.source))
        })?;
        work[op.source].remove(pos);
        work[op.target].push(op.item);
    }
    work.retain(|c| !c.is_empty());
    Partition::new(s1.n(), work)
}

/// Move `s1` toward `s2` within `budget`.
///
/// Clusters are paired by the max-intersection matching of
/// [`partition_edit_cost`]; each item sitting in the wrong paired cluster
/// yields one operation with cost `costs[item]` and profit `profits[item]`
/// (default 1). The knapsack picks the operations.
pub fn restructure_one_stage(
    s1: &Partition,
    s2: &Partition,
    costs: &[f64],
    profits: Option<&[f64]>,
    budget: f64,
    resolution: f64,
) -> Result<RestructurePlan> {
    if costs.len() != s1.n() {
        return Err(Error::DimensionMismatch { left: s1.n(), right: costs.len() });
    }
    if let Some(p) = profits {
        if p.len() != s1.n() {
            return Err(Error::DimensionMismatch { left: s1.n(), right: p.len() });
        }
    }
    if !(budget >= 0.0) {
        return Err(Error::InvalidParameter(format!("budget {budget} must be nonnegative")));
    }
    let trace = partition_edit_cost(s1, s2)?;
    let goal_of: Vec<usize> = {
        let mut g = vec![0; trace.matching.iter().map(|m| m.0 + 1).max().unwrap_or(0)];
        for &(s, t) in &trace.matching {
            g[s] = t;
        }
        g
    };
    // Every item moves at most once, so each move starts from the item's
    // original cluster and the operations commute.
    let operations: Vec<ChangeOperation> = trace
        .moves
        .iter()
        .map(|m| ChangeOperation {
            item: m.item,
            source: m.from,
            target: m.to,
            goal_cluster: goal_of[m.to],
            cost: costs[m.item],
            profit: profits.map_or(1.0, |p| p[m.item]),
        })
        .collect();
    let items: Vec<(f64, f64)> = operations.iter().map(|o| (o.profit, o.cost)).collect();
    let ks = knapsack_dp(&items, budget, resolution)?;
    let result = apply_operations(s1, &operations, &ks.selected)?;
    let residual = partition_edit_cost(&result, s2)?.cost;
    Ok(RestructurePlan {
        operations,
        selected: ks.selected,
        result,
        total_cost: ks.weight,
        total_profit: ks.profit,
        residual,
    })
}
