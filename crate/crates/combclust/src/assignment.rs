//! Assignment-based clustering: one-to-one matching, the generalized
//! assignment problem, the access-point connection model, assignment with
//! multiset profits, and the multi-beam slot schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::{median, MedianDomain, MultisetEstimate};
use crate::proximity::OrdinalMappingRule;

/// Largest `μ^n` (or `(μ+1)^n`) the exhaustive solvers will walk.
pub const ASSIGNMENT_GUARD: u128 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    /// `row_to_col[i]` is the column matched with row `i`.
    pub row_to_col: Vec<usize>,
    pub value: f64,
}

fn check_finite(m: &[Vec<f64>], what: &str) -> Result<()> {
    for (i, row) in m.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{what}[{i}][{j}] is not finite")));
        }
    }
    Ok(())
}

/// Optimal perfect matching on a square matrix (shortest augmenting paths
/// with vertex potentials, O(n³)).
pub fn assignment_exact(cost: &[Vec<f64>], sense: Sense) -> Result<Matching> {
    let n = cost.len();
    for row in cost {
        if row.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: row.len() });
        }
    }
    check_finite(cost, "cost")?;
    let sign = if sense == Sense::Max { -1.0 } else { 1.0 };
    let a = |i: usize, j: usize| sign * cost[i - 1][j - 1];

    // 1-based arrays; column 0 is the virtual start of each augmentation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = a(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0; n];
    for j in 1..=n {
        row_to_col[p[j] - 1] = j - 1;
    }
    let value = row_to_col.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok(Matching { row_to_col, value })
}

/// Generalized assignment instance: `n` items, `μ` agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentInstance {
    /// `profit[i][j]`, item `i` at agent `j`.
    pub profit: Vec<Vec<f64>>,
    /// `weight[i][j] ≥ 0`, capacity consumed at agent `j`.
    pub weight: Vec<Vec<f64>>,
    /// `capacity[j] ≥ 0`.
    pub capacity: Vec<f64>,
    /// Per-item assignment cap `λ_i`; solvers accept 0 or 1.
    pub item_cap: Vec<usize>,
}

impl AssignmentInstance {
    /// Instance with every item cap set to 1.
    pub fn new(profit: Vec<Vec<f64>>, weight: Vec<Vec<f64>>, capacity: Vec<f64>) -> Result<Self> {
        let item_cap = vec![1; profit.len()];
        let inst = AssignmentInstance { profit, weight, capacity, item_cap };
        inst.validate()?;
        Ok(inst)
    }

    pub fn items(&self) -> usize {
        self.profit.len()
    }

    pub fn agents(&self) -> usize {
        self.capacity.len()
    }

    pub fn validate(&self) -> Result<()> {
        let (n, mu) = (self.items(), self.agents());
        for m in [&self.weight] {
            if m.len() != n {
                return Err(Error::DimensionMismatch { left: n, right: m.len() });
            }
        }
        if self.item_cap.len() != n {
            return Err(Error::DimensionMismatch { left: n, right: self.item_cap.len() });
        }
        for row in self.profit.iter().chain(&self.weight) {
            if row.len() != mu {
                return Err(Error::DimensionMismatch { left: mu, right: row.len() });
            }
        }
        check_finite(&self.profit, "profit")?;
        check_finite(&self.weight, "weight")?;
        if self.weight.iter().flatten().any(|&w| w < 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        if self.capacity.iter().any(|&b| !(b >= 0.0) || !b.is_finite()) {
            return Err(Error::InvalidParameter("capacities must be finite and nonnegative".into()));
        }
        if self.item_cap.iter().any(|&c| c > 1) {
            return Err(Error::InvalidParameter("multiple assignment (item cap > 1) is not supported".into()));
        }
        Ok(())
    }

    /// Check an assignment against capacities and item caps, returning its profit.
    pub fn evaluate(&self, assignment: &[Option<usize>]) -> Result<f64> {
        if assignment.len() != self.items() {
            return Err(Error::DimensionMismatch { left: self.items(), right: assignment.len() });
        }
        let mut load = vec![0.0; self.agents()];
        let mut profit = 0.0;
        for (i, a) in assignment.iter().enumerate() {
            let Some(j) = *a else { continue };
            if j >= self.agents() || self.item_cap[i] == 0 {
                return Err(Error::Infeasible(format!("item {i} cannot go to agent {j}")));
            }
            load[j] += self.weight[i][j];
            profit += self.profit[i][j];
        }
        for (j, (&l, &b)) in load.iter().zip(&self.capacity).enumerate() {
            if l > b + 1e-9 {
                return Err(Error::Infeasible(format!("agent {j} load {l} exceeds capacity {b}")));
            }
        }
        Ok(profit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSolution {
    pub assignment: Vec<Option<usize>>,
    pub profit: f64,
    /// Items no agent could take.
    pub unassigned: Vec<usize>,
}

/// Regret greedy: repeatedly place the item whose best feasible agent beats
/// its second-best by the most (an item with a single option has infinite
/// regret). Ties go to the higher best profit, then the lower item index;
/// the agent tie goes to the lower index.
pub fn gap_greedy(inst: &AssignmentInstance) -> Result<GapSolution> {
    inst.validate()?;
    let (n, mu) = (inst.items(), inst.agents());
    let mut remaining = inst.capacity.clone();
    let mut assignment = vec![None; n];
    let mut open: Vec<usize> = (0..n).filter(|&i| inst.item_cap[i] > 0).collect();
    let mut unassigned: Vec<usize> = (0..n).filter(|&i| inst.item_cap[i] == 0).collect();
    while !open.is_empty() {
        let mut pick: Option<(f64, f64, usize, usize)> = None;
        let mut stuck = Vec::new();
        for &i in &open {
            let mut best: Option<(f64, usize)> = None;
            let mut second = f64::NEG_INFINITY;
            for (j, &room) in remaining.iter().enumerate().take(mu) {
                if inst.weight[i][j] > room + 1e-12 {
                    continue;
                }
                let c = inst.profit[i][j];
                match best {
                    Some((b, _)) if c <= b => second = second.max(c),
                    Some((b, _)) => {
                        second = b;
                        best = Some((c, j));
                    }
                    None => best = Some((c, j)),
                }
            }
            let Some((b, j)) = best else {
                stuck.push(i);
                continue;
            };
            let regret = b - second;
            let better = match pick {
                None => true,
                Some((r, pb, _, _)) => regret > r || (regret == r && b > pb),
            };
            if better {
                pick = Some((regret, b, i, j));
            }
        }
        unassigned.extend(&stuck);
        open.retain(|i| !stuck.contains(i));
        if let Some((_, _, i, j)) = pick {
            assignment[i] = Some(j);
            remaining[j] -= inst.weight[i][j];
            open.retain(|&k| k != i);
        }
    }
    unassigned.sort_unstable();
    let profit = inst.evaluate(&assignment)?;
    Ok(GapSolution { assignment, profit, unassigned })
}

/// Exact GAP optimum by enumerating every item's agent or no agent.
pub fn gap_exhaustive(inst: &AssignmentInstance) -> Result<GapSolution> {
    inst.validate()?;
    let (n, mu) = (inst.items(), inst.agents());
    let space = (mu as u128 + 1).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space > ASSIGNMENT_GUARD {
        return Err(Error::GuardExceeded { needed: space, limit: ASSIGNMENT_GUARD });
    }
    struct Walk<'a> {
        inst: &'a AssignmentInstance,
        cur: Vec<Option<usize>>,
        load: Vec<f64>,
        best: Option<(f64, Vec<Option<usize>>)>,
    }
    fn go(w: &mut Walk, i: usize, profit: f64) {
        if i == w.cur.len() {
            if w.best.as_ref().is_none_or(|(b, _)| profit > *b) {
                w.best = Some((profit, w.cur.clone()));
            }
            return;
        }
        if w.inst.item_cap[i] > 0 {
            for j in 0..w.load.len() {
                let wt = w.inst.weight[i][j];
                if w.load[j] + wt > w.inst.capacity[j] + 1e-12 {
                    continue;
                }
                w.load[j] += wt;
                w.cur[i] = Some(j);
                go(w, i + 1, profit + w.inst.profit[i][j]);
                w.cur[i] = None;
                w.load[j] -= wt;
            }
        }
        go(w, i + 1, profit);
    }
    let mut w = Walk { inst, cur: vec![None; n], load: vec![0.0; mu], best: None };
    go(&mut w, 0, 0.0);
    let (_, assignment) = w.best.expect("the empty assignment is always feasible");
    let unassigned = (0..n).filter(|&i| assignment[i].is_none()).collect();
    let profit = inst.evaluate(&assignment)?;
    Ok(GapSolution { assignment, profit, unassigned })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub position: [f64; 3],
    /// Required bandwidth `f_i`.
    pub bandwidth: f64,
    /// Required reliability `r_i`.
    pub reliability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccessPoint {
    pub position: [f64; 3],
    /// Total bandwidth `f_j`.
    pub bandwidth: f64,
    /// Maximum number of served users `k_j`.
    pub max_users: usize,
    /// Channel reliability `r_j`.
    pub reliability: f64,
    /// Admissible distance `d_j`, in units of the scoring distance scale.
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccessPointInstance {
    pub users: Vec<User>,
    pub points: Vec<AccessPoint>,
}

impl AccessPointInstance {
    pub fn new(users: Vec<User>, points: Vec<AccessPoint>) -> Result<Self> {
        for (i, u) in users.iter().enumerate() {
            if u.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter(format!("user {i} has a non-finite coordinate")));
            }
            if !(u.bandwidth > 0.0 && u.reliability > 0.0) {
                return Err(Error::InvalidParameter(format!("user {i} needs positive bandwidth and reliability")));
            }
        }
        for (j, p) in points.iter().enumerate() {
            if p.position.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter(format!("access point {j} has a non-finite coordinate")));
            }
            if !(p.bandwidth > 0.0 && p.reliability > 0.0 && p.range > 0.0 && p.max_users > 0) {
                return Err(Error::InvalidParameter(format!("access point {j} needs positive capacities")));
            }
        }
        Ok(AccessPointInstance { users, points })
    }
}

/// How a user/access-point pair becomes an ordinal profit `c_ij ∈ 1..=3`.
///
/// The score is a weighted sum of three headrooms in `[0, 1]`: distance
/// `1 − d_ij / (scale·d_j)`, reliability `(r_j − r_i) / r_j` and bandwidth
/// `1 − f_i / f_j`. The rule maps the score onto levels `0..=2`; the
/// profit is the level plus one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApScoring {
    /// Multiplier turning `d_j` into coordinate units.
    pub distance_scale: f64,
    /// Weights of (distance, reliability, bandwidth).
    pub weights: [f64; 3],
    pub rule: OrdinalMappingRule,
}

impl Default for ApScoring {
    fn default() -> Self {
        ApScoring {
            distance_scale: 10.0,
            weights: [0.5, 0.25, 0.25],
            rule: OrdinalMappingRule::equal_width(0.0, 1.0, 3).expect("static rule"),
        }
    }
}

fn euclid(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl ApScoring {
    /// Profit for each pair, `None` where the pair is forbidden (too far,
    /// reliability short, or bandwidth larger than the whole access point).
    pub fn profits(&self, inst: &AccessPointInstance) -> Result<Vec<Vec<Option<u32>>>> {
        if !(self.distance_scale > 0.0) || self.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter("scale must be positive and weights nonnegative".into()));
        }
        let wsum: f64 = self.weights.iter().sum();
        if !(wsum > 0.0) {
            return Err(Error::InvalidParameter("scoring weights sum to zero".into()));
        }
        inst.users
            .iter()
            .map(|u| {
                inst.points
                    .iter()
                    .map(|p| {
                        let reach = self.distance_scale * p.range;
                        let d = euclid(&u.position, &p.position);
                        if d > reach || u.reliability > p.reliability || u.bandwidth > p.bandwidth {
                            return Ok(None);
                        }
                        let parts = [
                            1.0 - d / reach,
                            (p.reliability - u.reliability) / p.reliability,
                            1.0 - u.bandwidth / p.bandwidth,
                        ];
                        let s: f64 = parts.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() / wsum;
                        let level = self.rule.map(s.clamp(self.rule.low(), self.rule.high()))?;
                        if level > 2 {
                            return Err(Error::InvalidParameter(format!("rule level {level} is outside 0..=2")));
                        }
                        Ok(Some(level + 1))
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApAssignment {
    /// Access point per user.
    pub assignment: Vec<Option<usize>>,
    pub value: u32,
    /// Ordinal profit table the solver used.
    pub profits: Vec<Vec<Option<u32>>>,
    pub unassigned: Vec<usize>,
}

/// Check an access-point assignment against every constraint of the model,
/// returning its value.
pub fn check_ap_assignment(
    inst: &AccessPointInstance,
    profits: &[Vec<Option<u32>>],
    assignment: &[Option<usize>],
) -> Result<u32> {
    let mu = inst.points.len();
    let mut users = vec![0usize; mu];
    let mut band = vec![0.0; mu];
    let mut value = 0;
    for (i, a) in assignment.iter().enumerate() {
        let Some(j) = *a else { continue };
        let c = profits[i].get(j).copied().flatten().ok_or_else(|| {
            Error::Infeasible(format!("user {i} may not connect to access point {j}"))
        })?;
        users[j] += 1;
        band[j] += inst.users[i].bandwidth;
        value += c;
    }
    for (j, p) in inst.points.iter().enumerate() {
        if users[j] > p.max_users || band[j] > p.bandwidth + 1e-9 {
            return Err(Error::Infeasible(format!("access point {j} is overloaded")));
        }
    }
    Ok(value)
}

/// Exact optimum of the access-point model by depth-first branch and bound.
///
/// Users are branched in index order, options by descending profit then
/// access point index, "unassigned" last; the first optimum found wins.
pub fn access_point_assignment(inst: &AccessPointInstance, scoring: &ApScoring) -> Result<ApAssignment> {
    let profits = scoring.profits(inst)?;
    let n = inst.users.len();
    let options: Vec<Vec<(u32, usize)>> = profits
        .iter()
        .map(|row| {
            let mut o: Vec<(u32, usize)> =
                row.iter().enumerate().filter_map(|(j, c)| c.map(|c| (c, j))).collect();
            o.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            o
        })
        .collect();
    // tail[i] bounds what users i.. can still add.
    let mut tail = vec![0u32; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + options[i].first().map_or(0, |o| o.0);
    }

    struct Search<'a> {
        inst: &'a AccessPointInstance,
        options: &'a [Vec<(u32, usize)>],
        tail: &'a [u32],
        cur: Vec<Option<usize>>,
        users: Vec<usize>,
        band: Vec<f64>,
        best: u32,
        best_assignment: Vec<Option<usize>>,
    }
    fn go(s: &mut Search, i: usize, value: u32) {
        if i == s.cur.len() {
            if value > s.best {
                s.best = value;
                s.best_assignment = s.cur.clone();
            }
            return;
        }
        if value + s.tail[i] <= s.best {
            return;
        }
        let f = s.inst.users[i].bandwidth;
        for k in 0..s.options[i].len() {
            let (c, j) = s.options[i][k];
            let p = &s.inst.points[j];
            if s.users[j] >= p.max_users || s.band[j] + f > p.bandwidth + 1e-9 {
                continue;
            }
            s.users[j] += 1;
            s.band[j] += f;
            s.cur[i] = Some(j);
            go(s, i + 1, value + c);
            s.cur[i] = None;
            s.band[j] -= f;
            s.users[j] -= 1;
        }
        go(s, i + 1, value);
    }
    let mut s = Search {
        inst,
        options: &options,
        tail: &tail,
        cur: vec![None; n],
        users: vec![0; inst.points.len()],
        band: vec![0.0; inst.points.len()],
        best: 0,
        best_assignment: vec![None; n],
    };
    go(&mut s, 0, 0);
    let assignment = s.best_assignment;
    let value = check_ap_assignment(inst, &profits, &assignment)?;
    let unassigned = (0..n).filter(|&i| assignment[i].is_none()).collect();
    Ok(ApAssignment { assignment, value, profits, unassigned })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Exhaustive; fails past the guard.
    Exact,
    Greedy,
    /// Exhaustive within the guard, greedy beyond it.
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultisetAssignment {
    /// Agent per item.
    pub assignment: Vec<usize>,
    /// Generalized median of the selected estimates.
    pub median: MultisetEstimate,
    pub exhaustive: bool,
}

/// Assign every item to one agent (at most `caps[j]` items at agent `j`) so
/// that the generalized median of the chosen estimates is as good as
/// possible.
///
/// Candidates are ranked by the canonical best-first order of estimates,
/// which extends the dominance order, so the winner is never dominated by
/// another feasible assignment's median. Ties keep the lexicographically
/// first agent vector.
pub fn assignment_multiset(
    profits: &[Vec<MultisetEstimate>],
    caps: &[usize],
    mode: SearchMode,
) -> Result<MultisetAssignment> {
    let n = profits.len();
    let mu = caps.len();
    if n == 0 {
        return Err(Error::Empty("items"));
    }
    let first = &profits[0][..];
    for row in profits {
        if row.len() != mu {
            return Err(Error::DimensionMismatch { left: mu, right: row.len() });
        }
        for e in row {
            if e.levels() != first[0].levels() || e.cardinality() != first[0].cardinality() {
                return Err(Error::ScaleMismatch(format!("{e} vs {}", first[0])));
            }
        }
    }
    if caps.iter().sum::<usize>() < n {
        return Err(Error::Infeasible(format!("{n} items exceed the total agent capacity")));
    }
    let space = (mu as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let exhaustive = match mode {
        SearchMode::Exact if space > ASSIGNMENT_GUARD => {
            return Err(Error::GuardExceeded { needed: space, limit: ASSIGNMENT_GUARD })
        }
        SearchMode::Exact => true,
        SearchMode::Greedy => false,
        SearchMode::Auto => space <= ASSIGNMENT_GUARD,
    };
    let score = |a: &[usize]| -> Result<MultisetEstimate> {
        let chosen: Vec<MultisetEstimate> = a.iter().enumerate().map(|(i, &j)| profits[i][j].clone()).collect();
        Ok(median(&chosen, MedianDomain::Generalized)?.median)
    };
    if !exhaustive {
        let mut left = caps.to_vec();
        let mut assignment = Vec::with_capacity(n);
        for row in profits {
            let j = (0..mu)
                .filter(|&j| left[j] > 0)
                .max_by(|&a, &b| row[a].cmp(&row[b]).then(b.cmp(&a)))
                .expect("total capacity covers every item");
            left[j] -= 1;
            assignment.push(j);
        }
        let median = score(&assignment)?;
        return Ok(MultisetAssignment { assignment, median, exhaustive });
    }
    let mut best: Option<(MultisetEstimate, Vec<usize>)> = None;
    let mut cur = vec![0usize; n];
    let mut left = caps.to_vec();
    fn walk(
        i: usize,
        cur: &mut Vec<usize>,
        left: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> Result<()>,
    ) -> Result<()> {
        if i == cur.len() {
            return visit(cur);
        }
        for j in 0..left.len() {
            if left[j] == 0 {
                continue;
            }
            left[j] -= 1;
            cur[i] = j;
            walk(i + 1, cur, left, visit)?;
            left[j] += 1;
        }
        Ok(())
    }
    walk(0, &mut cur, &mut left, &mut |a| {
        let m = score(a)?;
        if best.as_ref().is_none_or(|(b, _)| m > *b) {
            best = Some((m, a.to_vec()));
        }
        Ok(())
    })?;
    let (median, assignment) = best.expect("capacity check guarantees a feasible assignment");
    Ok(MultisetAssignment { assignment, median, exhaustive })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamSchedule {
    /// Contiguous groups of the angle-sorted nodes.
    pub groups: Vec<Vec<usize>>,
    /// Slot `j` holds the `j`-th member of every group long enough.
    pub slots: Vec<Vec<usize>>,
}

/// Round-robin multi-beam schedule over nodes sorted by angle (ties by index).
pub fn multibeam_schedule(angles: &[f64], beams: usize) -> Result<BeamSchedule> {
    if beams == 0 {
        return Err(Error::InvalidParameter("beam count must be at least 1".into()));
    }
    if let Some(i) = angles.iter().position(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter(format!("angle of node {i} is not finite")));
    }
    let mut order: Vec<usize> = (0..angles.len()).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)));
    let k = angles.len().div_ceil(beams);
    if k == 0 {
        return Ok(BeamSchedule { groups: Vec::new(), slots: Vec::new() });
    }
    let groups: Vec<Vec<usize>> = order.chunks(k).map(<[usize]>::to_vec).collect();
    let slots = (0..k).map(|j| groups.iter().filter_map(|g| g.get(j).copied()).collect()).collect();
    Ok(BeamSchedule { groups, slots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[u32]) -> MultisetEstimate {
        MultisetEstimate::new(c.to_vec()).unwrap()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
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

    #[test]
    fn hungarian_small_cases() {
        let m = assignment_exact(&[vec![7.0]], Sense::Min).unwrap();
        assert_eq!(m.row_to_col, vec![0]);
        let id: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| f64::from(u8::from(i == j))).collect()).collect();
        let m = assignment_exact(&id, Sense::Max).unwrap();
        assert_eq!(m.row_to_col, vec![0, 1, 2, 3]);
        assert_eq!(m.value, 4.0);
        assert!(assignment_exact(&[], Sense::Min).unwrap().row_to_col.is_empty());
        assert!(assignment_exact(&[vec![1.0, 2.0]], Sense::Min).is_err());
    }

    #[test]
    fn hungarian_matches_permutations() {
        let c = vec![
            vec![4.0, 1.0, 3.0, 9.0],
            vec![2.0, 0.0, 5.0, 1.5],
            vec![3.0, 2.0, 2.0, 7.0],
            vec![8.0, 6.0, 1.0, 4.0],
        ];
        for sense in [Sense::Min, Sense::Max] {
            let got = assignment_exact(&c, sense).unwrap().value;
            let vals = permutations(4).into_iter().map(|p| p.iter().enumerate().map(|(i, &j)| c[i][j]).sum::<f64>());
            let want = match sense {
                Sense::Min => vals.fold(f64::INFINITY, f64::min),
                Sense::Max => vals.fold(f64::NEG_INFINITY, f64::max),
            };
            assert!((got - want).abs() < 1e-9, "{sense:?}: {got} vs {want}");
        }
    }

    #[test]
    fn gap_trivial_cases() {
        let inst = AssignmentInstance::new(vec![vec![1.0]; 4], vec![vec![1.0]; 4], vec![10.0]).unwrap();
        let s = gap_greedy(&inst).unwrap();
        assert_eq!(s.assignment, vec![Some(0); 4]);
        let inst = AssignmentInstance::new(vec![vec![5.0, 3.0]], vec![vec![1.0, 1.0]], vec![1.0, 1.0]).unwrap();
        assert_eq!(gap_greedy(&inst).unwrap().assignment, vec![Some(0)]);
    }

    #[test]
    fn gap_reports_unassignable_items() {
        let inst = AssignmentInstance::new(
            vec![vec![3.0], vec![2.0], vec![1.0]],
            vec![vec![2.0], vec![2.0], vec![5.0]],
            vec![4.0],
        )
        .unwrap();
        let s = gap_greedy(&inst).unwrap();
        assert_eq!(s.unassigned, vec![2]);
        assert_eq!(s.profit, 5.0);
        assert_eq!(gap_exhaustive(&inst).unwrap().profit, 5.0);
    }

    #[test]
    fn gap_regret_prefers_constrained_items() {
        // Item 1 only fits agent 0; plain best-profit-first would give agent 0 to item 0.
        let inst = AssignmentInstance::new(
            vec![vec![5.0, 4.0], vec![4.0, 0.0]],
            vec![vec![1.0, 1.0], vec![1.0, 9.0]],
            vec![1.0, 1.0],
        )
        .unwrap();
        let s = gap_greedy(&inst).unwrap();
        assert_eq!(s.assignment, vec![Some(1), Some(0)]);
        assert_eq!(s.profit, gap_exhaustive(&inst).unwrap().profit);
    }

    fn ap(x: f64, y: f64, f: f64, k: usize, r: f64, d: f64) -> AccessPoint {
        AccessPoint { position: [x, y, 0.0], bandwidth: f, max_users: k, reliability: r, range: d }
    }

    fn user(x: f64, y: f64, f: f64, r: f64) -> User {
        User { position: [x, y, 0.0], bandwidth: f, reliability: r }
    }

    #[test]
    fn access_point_trivial_cases() {
        let scoring = ApScoring::default();
        let inst = AccessPointInstance::new(vec![user(0.0, 0.0, 1.0, 1.0)], vec![ap(3.0, 4.0, 10.0, 1, 5.0, 1.0)]).unwrap();
        let s = access_point_assignment(&inst, &scoring).unwrap();
        assert_eq!(s.assignment, vec![Some(0)]);
        let inst = AccessPointInstance::new(vec![user(100.0, 0.0, 1.0, 1.0)], vec![ap(0.0, 0.0, 10.0, 1, 5.0, 1.0)]).unwrap();
        let s = access_point_assignment(&inst, &scoring).unwrap();
        assert_eq!(s.unassigned, vec![0]);
        assert_eq!(s.value, 0);
    }

    #[test]
    fn access_point_respects_user_cap() {
        let users = vec![user(0.0, 0.0, 1.0, 1.0), user(1.0, 0.0, 1.0, 1.0), user(2.0, 0.0, 1.0, 1.0)];
        let inst = AccessPointInstance::new(users, vec![ap(0.0, 0.0, 10.0, 2, 5.0, 1.0)]).unwrap();
        let s = access_point_assignment(&inst, &ApScoring::default()).unwrap();
        assert_eq!(s.unassigned.len(), 1);
        assert_eq!(check_ap_assignment(&inst, &s.profits, &s.assignment).unwrap(), s.value);
    }

    #[test]
    fn profit_levels_follow_the_rule() {
        let inst = AccessPointInstance::new(
            vec![user(0.0, 0.0, 1.0, 1.0), user(9.0, 0.0, 9.0, 9.0), user(0.0, 0.0, 1.0, 11.0)],
            vec![ap(0.0, 0.0, 10.0, 3, 10.0, 1.0)],
        )
        .unwrap();
        let p = ApScoring::default().profits(&inst).unwrap();
        // Score 0.5 + 0.225 + 0.225 = 0.95 -> top level; the second user
        // scores 0.05 + 0.025 + 0.025 -> bottom; the third needs 11 > 10.
        assert_eq!(p, vec![vec![Some(3)], vec![Some(1)], vec![None]]);
    }

    #[test]
    fn multiset_assignment_cases() {
        let s = assignment_multiset(&[vec![e(&[3, 0, 0]), e(&[2, 1, 0])]], &[1, 1], SearchMode::Exact).unwrap();
        assert_eq!(s.assignment, vec![0]);
        let same = vec![vec![e(&[1, 1, 1]); 2]; 3];
        let s = assignment_multiset(&same, &[2, 2], SearchMode::Exact).unwrap();
        assert_eq!(s.median, e(&[1, 1, 1]));
        assert!(assignment_multiset(&same, &[1, 1], SearchMode::Exact).unwrap_err().is_infeasible());
        let g = assignment_multiset(&same, &[2, 2], SearchMode::Greedy).unwrap();
        assert_eq!(g.assignment, vec![0, 0, 1]);
        assert!(!g.exhaustive);
    }

    #[test]
    fn multibeam_examples() {
        let s = multibeam_schedule(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 2).unwrap();
        assert_eq!(s.slots, vec![vec![0, 3], vec![1, 4], vec![2, 5]]);
        let s = multibeam_schedule(&[0.3, 0.1, 0.2], 1).unwrap();
        assert_eq!(s.slots, vec![vec![1], vec![2], vec![0]]);
        let s = multibeam_schedule(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 3).unwrap();
        assert_eq!(s.slots.len(), 3);
        assert_eq!(s.groups.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 3, 1]);
        assert_eq!(s.slots.iter().map(Vec::len).collect::<Vec<_>>(), vec![3, 2, 2]);
        assert!(multibeam_schedule(&[], 2).unwrap().slots.is_empty());
        assert!(multibeam_schedule(&[1.0], 0).is_err());
    }
}
