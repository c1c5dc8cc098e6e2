//! Interval multiset estimates: counts of elements per ordinal level, level
//! index 0 being the best.
//!
//! Step proximity and dominance work on prefix sums of the counts. Moving
//! one element one level down (worse) lowers exactly one prefix sum by one,
//! so the minimal number of unit moves between two estimates is the
//! L1 distance of their prefix-sum vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest scale `enumerate_scale` will materialize.
pub const ENUMERATION_GUARD: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultisetEstimate {
    counts: Vec<u32>,
}

impl MultisetEstimate {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Empty("multiset levels"));
        }
        Ok(MultisetEstimate { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Number of levels `l`.
    pub fn levels(&self) -> usize {
        self.counts.len()
    }

    /// Cardinality `η`.
    pub fn cardinality(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// True when the nonzero counts occupy one contiguous run of levels.
    pub fn is_interval(&self) -> bool {
        let nz: Vec<usize> = (0..self.counts.len()).filter(|&k| self.counts[k] > 0).collect();
        match (nz.first(), nz.last()) {
            (Some(&a), Some(&b)) => b - a + 1 == nz.len(),
            _ => true,
        }
    }

    fn prefix(&self) -> Vec<i64> {
        self.counts
            .iter()
            .scan(0i64, |acc, &c| {
                *acc += c as i64;
                Some(*acc)
            })
            .collect()
    }

    fn same_scale(&self, other: &Self) -> Result<()> {
        if self.levels() != other.levels() {
            return Err(Error::ScaleMismatch(format!(
                "{} levels vs {} levels",
                self.levels(),
                other.levels()
            )));
        }
        if self.cardinality() != other.cardinality() {
            return Err(Error::ScaleMismatch(format!(
                "cardinality {} vs {}",
                self.cardinality(),
                other.cardinality()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for MultisetEstimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.counts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of multisets of size `eta` over `l` kinds: C(l + η − 1, η).
pub fn multiset_coefficient(l: u32, eta: u32) -> Result<u128> {
    if l == 0 {
        return Err(Error::InvalidParameter("scale needs at least one level".into()));
    }
    // Multiplicative form keeps every intermediate an exact binomial.
    let mut acc: u128 = 1;
    for k in 1..=eta as u128 {
        acc = acc
            .checked_mul(l as u128 + k - 1)
            .ok_or(Error::Overflow("multiset coefficient"))?
            / k;
    }
    Ok(acc)
}

/// All estimates of cardinality `eta` over `l` levels in canonical
/// best-first order (counts lexicographically descending).
pub fn enumerate_scale(l: u32, eta: u32, interval_only: bool) -> Result<Vec<MultisetEstimate>> {
    let total = multiset_coefficient(l, eta)?;
    if total > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded { needed: total, limit: ENUMERATION_GUARD });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut cur = vec![0u32; l as usize];
    fill(&mut cur, 0, eta, &mut out);
    if interval_only {
        out.retain(MultisetEstimate::is_interval);
    }
    Ok(out)
}

fn fill(cur: &mut Vec<u32>, pos: usize, left: u32, out: &mut Vec<MultisetEstimate>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(MultisetEstimate { counts: cur.clone() });
        return;
    }
    for c in (0..=left).rev() {
        cur[pos] = c;
        fill(cur, pos + 1, left - c, out);
    }
    cur[pos] = 0;
}

/// Unit level-shift counts between two estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepProximity {
    /// Shifts toward better levels.
    pub minus: u64,
    /// Shifts toward worse levels.
    pub plus: u64,
}

impl StepProximity {
    pub fn total(&self) -> u64 {
        self.minus + self.plus
    }
}

/// Minimal unit shifts turning `e1` into `e2`.
pub fn delta(e1: &MultisetEstimate, e2: &MultisetEstimate) -> Result<StepProximity> {
    e1.same_scale(e2)?;
    let (p1, p2) = (e1.prefix(), e2.prefix());
    let (mut minus, mut plus) = (0u64, 0u64);
    for (a, b) in p1.iter().zip(&p2) {
        let d = b - a;
        if d > 0 {
            minus += d as u64;
        } else {
            plus += (-d) as u64;
        }
    }
    Ok(StepProximity { minus, plus })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedianDomain {
    /// Every estimate of the scale.
    Generalized,
    /// Interval estimates of the scale only.
    GeneralizedInterval,
    /// The input estimates themselves.
    Set,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianResult {
    pub median: MultisetEstimate,
    /// Total step distance from the median to the inputs.
    pub cost: u64,
    /// Every other estimate reaching the same cost, best-first.
    pub ties: Vec<MultisetEstimate>,
}

/// Estimate minimizing the summed step distance to `es`.
///
/// The winner among co-minimal estimates is the first in canonical
/// best-first order.
pub fn median(es: &[MultisetEstimate], domain: MedianDomain) -> Result<MedianResult> {
    let first = es.first().ok_or(Error::Empty("estimates"))?;
    for e in es {
        first.same_scale(e)?;
    }
    let mut candidates = match domain {
        MedianDomain::Set => {
            let mut c = es.to_vec();
            c.sort_unstable_by(|a, b| b.cmp(a));
            c.dedup();
            c
        }
        MedianDomain::Generalized | MedianDomain::GeneralizedInterval => enumerate_scale(
            first.levels() as u32,
            first.cardinality(),
            domain == MedianDomain::GeneralizedInterval,
        )?,
    };
    let costs: Vec<u64> = candidates
        .iter()
        .map(|c| es.iter().map(|e| delta(c, e).map(|d| d.total())).sum::<Result<u64>>())
        .collect::<Result<_>>()?;
    let best = *costs.iter().min().expect("candidate set is never empty");
    let mut winners = candidates
        .drain(..)
        .zip(costs)
        .filter(|(_, c)| *c == best)
        .map(|(e, _)| e);
    let median = winners.next().expect("minimum is attained");
    Ok(MedianResult { median, cost: best, ties: winners.collect() })
}

/// Componentwise sum; the result's cardinality is the sum of the inputs'.
pub fn integrate_sum(es: &[MultisetEstimate]) -> Result<MultisetEstimate> {
    let first = es.first().ok_or(Error::Empty("estimates"))?;
    let mut counts = vec![0u32; first.levels()];
    for e in es {
        if e.levels() != first.levels() {
            return Err(Error::ScaleMismatch(format!(
                "{} levels vs {} levels",
                first.levels(),
                e.levels()
            )));
        }
        for (acc, c) in counts.iter_mut().zip(&e.counts) {
            *acc = acc.checked_add(*c).ok_or(Error::Overflow("integrated counts"))?;
        }
    }
    MultisetEstimate::new(counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dominance {
    Better,
    Worse,
    Equal,
    Incomparable,
}

/// Compare two estimates in the improvement order of the scale lattice.
pub fn dominates(e1: &MultisetEstimate, e2: &MultisetEstimate) -> Result<Dominance> {
    e1.same_scale(e2)?;
    let (p1, p2) = (e1.prefix(), e2.prefix());
    let ge = p1.iter().zip(&p2).all(|(a, b)| a >= b);
    let le = p1.iter().zip(&p2).all(|(a, b)| a <= b);
    Ok(match (ge, le) {
        (true, true) => Dominance::Equal,
        (true, false) => Dominance::Better,
        (false, true) => Dominance::Worse,
        (false, false) => Dominance::Incomparable,
    })
}

/// Symmetric table of pair estimates on one scale; the diagonal is unused.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimateMatrix {
    n: usize,
    cells: Vec<Option<MultisetEstimate>>,
}

impl EstimateMatrix {
    pub fn absent(n: usize) -> Self {
        EstimateMatrix { n, cells: vec![None; n * n] }
    }

    /// Fill from `f(i, j)` for `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Option<MultisetEstimate>) -> Result<Self> {
        let mut m = EstimateMatrix::absent(n);
        for i in 0..n {
            for j in i + 1..n {
                if let Some(e) = f(i, j) {
                    m.set(i, j, e)?;
                }
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&MultisetEstimate> {
        self.cells.get(i * self.n + j).and_then(Option::as_ref)
    }

    pub fn set(&mut self, i: usize, j: usize, e: MultisetEstimate) -> Result<()> {
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidParameter(format!("pair ({i}, {j}) outside {} items", self.n)));
        }
        if i == j {
            return Err(Error::InvalidParameter("diagonal estimates are undefined".into()));
        }
        if let Some(other) = self.cells.iter().flatten().next() {
            other.same_scale(&e)?;
        }
        self.cells[i * self.n + j] = Some(e.clone());
        self.cells[j * self.n + i] = Some(e);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[u32]) -> MultisetEstimate {
        MultisetEstimate::new(c.to_vec()).unwrap()
    }

    #[test]
    fn coefficients() {
        assert_eq!(multiset_coefficient(3, 4).unwrap(), 15);
        assert_eq!(multiset_coefficient(1, 9).unwrap(), 1);
        assert_eq!(multiset_coefficient(2, 2).unwrap(), 3);
        assert!(matches!(multiset_coefficient(1000, 200), Err(Error::Overflow(_))));
    }

    #[test]
    fn interval_scale_of_three_by_four() {
        let all = enumerate_scale(3, 4, false).unwrap();
        assert_eq!(all.len(), 15);
        assert_eq!(all[0], e(&[4, 0, 0]));
        assert_eq!(all[14], e(&[0, 0, 4]));
        let iv = enumerate_scale(3, 4, true).unwrap();
        assert_eq!(iv.len(), 12);
        for c in [[4, 0, 0], [3, 1, 0], [2, 2, 0], [1, 3, 0], [0, 4, 0], [0, 3, 1]] {
            assert!(iv.contains(&e(&c)));
        }
        for c in [[0, 2, 2], [0, 1, 3], [0, 0, 4], [2, 1, 1], [1, 2, 1], [1, 1, 2]] {
            assert!(iv.contains(&e(&c)));
        }
        assert!(!iv.contains(&e(&[3, 0, 1])));
        assert_eq!(enumerate_scale(1, 5, false).unwrap(), vec![e(&[5])]);
        assert!(matches!(enumerate_scale(40, 40, false), Err(Error::GuardExceeded { .. })));
    }

    #[test]
    fn delta_examples() {
        let d = |a, b| delta(&e(a), &e(b)).unwrap();
        assert_eq!(d(&[2, 1, 0], &[2, 1, 0]), StepProximity { minus: 0, plus: 0 });
        assert_eq!(d(&[3, 0, 0], &[2, 1, 0]), StepProximity { minus: 0, plus: 1 });
        assert_eq!(d(&[2, 1, 0], &[1, 1, 1]), StepProximity { minus: 0, plus: 2 });
        assert_eq!(d(&[1, 1, 1], &[2, 1, 0]), StepProximity { minus: 2, plus: 0 });
        assert!(delta(&e(&[1, 0]), &e(&[1, 0, 0])).is_err());
        assert!(delta(&e(&[1, 0]), &e(&[2, 0])).is_err());
    }

    #[test]
    fn medians() {
        let es = [e(&[1, 2, 0]), e(&[2, 1, 0]), e(&[2, 1, 0])];
        assert_eq!(median(&es, MedianDomain::Generalized).unwrap().median, e(&[2, 1, 0]));
        assert_eq!(median(&es, MedianDomain::Set).unwrap().median, e(&[2, 1, 0]));
        let inter = [e(&[0, 2, 7]), e(&[0, 1, 8]), e(&[0, 2, 7])];
        let m = median(&inter, MedianDomain::Generalized).unwrap();
        assert_eq!(m.median, e(&[0, 2, 7]));
        assert_eq!(m.cost, 1);
        assert_eq!(median(&[e(&[0, 3, 1])], MedianDomain::Generalized).unwrap().median, e(&[0, 3, 1]));
        assert!(median(&[], MedianDomain::Set).is_err());
    }

    #[test]
    fn median_reports_ties() {
        // (3,0,0) and (1,2,0) sit two steps apart; (2,1,0) is between.
        let m = median(&[e(&[3, 0, 0]), e(&[1, 2, 0])], MedianDomain::Generalized).unwrap();
        assert_eq!(m.median, e(&[3, 0, 0]));
        assert_eq!(m.ties, vec![e(&[2, 1, 0]), e(&[1, 2, 0])]);
    }

    #[test]
    fn sums() {
        let s = integrate_sum(&[e(&[1, 2, 0]), e(&[2, 1, 0]), e(&[2, 1, 0])]).unwrap();
        assert_eq!(s, e(&[5, 4, 0]));
        let s = integrate_sum(&[e(&[0, 2, 7]), e(&[0, 1, 8]), e(&[0, 2, 7])]).unwrap();
        assert_eq!(s, e(&[0, 5, 22]));
        assert_eq!(integrate_sum(&[e(&[1, 1])]).unwrap(), e(&[1, 1]));
        assert!(integrate_sum(&[e(&[1, 1]), e(&[1])]).is_err());
    }

    #[test]
    fn lattice_order() {
        assert_eq!(dominates(&e(&[3, 0, 0]), &e(&[2, 1, 0])).unwrap(), Dominance::Better);
        assert_eq!(dominates(&e(&[2, 1, 0]), &e(&[3, 0, 0])).unwrap(), Dominance::Worse);
        assert_eq!(dominates(&e(&[1, 2, 0]), &e(&[2, 0, 1])).unwrap(), Dominance::Incomparable);
        assert_eq!(dominates(&e(&[1, 2, 0]), &e(&[1, 2, 0])).unwrap(), Dominance::Equal);
    }

    #[test]
    fn display() {
        assert_eq!(e(&[0, 5, 22]).to_string(), "(0,5,22)");
    }
}
