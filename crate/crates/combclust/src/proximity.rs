//! Pairwise and set-level proximity, plus the scale transformation rules
//! (interval quantization, vector-to-scalar, vector-to-multiset).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{Dataset, Edge, ProximityMatrix, WeightedGraph};
use crate::multiset::{EstimateMatrix, MultisetEstimate};

/// Distance (or, for `Angular`, similarity) between two real vectors.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Minkowski { r: f64 },
    Manhattan,
    Chebyshev,
    Canberra,
    /// Cosine of the angle between the vectors. A similarity: equal
    /// directions give 1, and larger means closer.
    Angular,
}

impl Metric {
    fn check(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { left: x.len(), right: y.len() });
        }
        match *self {
            Metric::Minkowski { r } if !(r > 0.0 && r.is_finite()) => {
                Err(Error::InvalidParameter(format!("minkowski exponent must be positive, got {r}")))
            }
            Metric::Canberra | Metric::Angular => {
                for (index, &value) in x.iter().chain(y).enumerate() {
                    if !(value > 0.0) {
                        return Err(Error::NonPositiveCoordinate { index: index % x.len(), value });
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Metric value between `x` and `y`.
pub fn pair_distance(x: &[f64], y: &[f64], metric: Metric) -> Result<f64> {
    metric.check(x, y)?;
    let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
    Ok(match metric {
        Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
        Metric::Minkowski { r } => diffs.map(|d| d.powf(r)).sum::<f64>().powf(1.0 / r),
        Metric::Manhattan => diffs.sum(),
        Metric::Chebyshev => diffs.fold(0.0, f64::max),
        Metric::Canberra => x.iter().zip(y).map(|(a, b)| (a - b).abs() / (a + b)).sum(),
        Metric::Angular => {
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let nx: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let ny: f64 = y.iter().map(|b| b * b).sum::<f64>().sqrt();
            dot / (nx * ny)
        }
    })
}

/// Componentwise absolute differences.
pub fn vector_difference(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { left: x.len(), right: y.len() });
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b).abs()).collect())
}

/// Piecewise map from a real range onto ordinal levels.
///
/// Intervals are `(lower, upper]` except the first, which also includes its
/// lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalMappingRule {
    low: f64,
    /// `(upper bound, level)` in increasing order.
    steps: Vec<(f64, u32)>,
}

impl OrdinalMappingRule {
    pub fn new(low: f64, steps: Vec<(f64, u32)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Empty("mapping rule intervals"));
        }
        let mut prev_bound = low;
        let mut prev_level: Option<u32> = None;
        for &(upper, level) in &steps {
            if !(upper > prev_bound) || !upper.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "interval bounds must increase, got {upper} after {prev_bound}"
                )));
            }
            if prev_level.is_some_and(|p| level <= p) {
                return Err(Error::InvalidParameter("levels must strictly increase".into()));
            }
            prev_bound = upper;
            prev_level = Some(level);
        }
        Ok(OrdinalMappingRule { low, steps })
    }

    /// `k` equal-width intervals over `[low, high]`, levels `0..k`.
    pub fn equal_width(low: f64, high: f64, k: u32) -> Result<Self> {
        if k == 0 || !(high > low) {
            return Err(Error::InvalidParameter(format!("cannot split [{low}, {high}] into {k}")));
        }
        let w = (high - low) / k as f64;
        let steps = (1..=k)
            .map(|i| (if i == k { high } else { low + w * i as f64 }, i - 1))
            .collect();
        OrdinalMappingRule::new(low, steps)
    }

    pub fn low(&self) -> f64 {
        self.low
    }

    pub fn high(&self) -> f64 {
        self.steps.last().map_or(self.low, |s| s.0)
    }

    pub fn levels(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.1).collect()
    }

    pub fn map(&self, value: f64) -> Result<u32> {
        if value < self.low || value > self.high() || value.is_nan() {
            return Err(Error::OutOfRange { value, low: self.low, high: self.high() });
        }
        Ok(self.steps.iter().find(|s| value <= s.0).map(|s| s.1).expect("value within range"))
    }
}

pub fn quantize_vector(d: &[f64], rule: &OrdinalMappingRule) -> Result<Vec<u32>> {
    d.iter().map(|&v| rule.map(v)).collect()
}

/// Collapse an ordinal vector (levels 0..=4) to one level by summing and
/// bucketing the sum in steps of the vector length.
pub fn ordinal_vector_to_scalar(v: &[u32]) -> u32 {
    let m = v.len() as u64;
    let s: u64 = v.iter().map(|&b| b as u64).sum();
    match s {
        _ if s <= m => 0,
        _ if s <= 2 * m => 1,
        _ if s <= 3 * m => 2,
        _ if s <= 4 * m => 3,
        _ => 4,
    }
}

/// Count how many components sit at each level `0..levels`.
pub fn ordinal_vector_to_multiset(v: &[u32], levels: usize) -> Result<MultisetEstimate> {
    let mut counts = vec![0u32; levels];
    for &b in v {
        let slot = counts.get_mut(b as usize).ok_or_else(|| Error::OutOfRange {
            value: b as f64,
            low: 0.0,
            high: levels.saturating_sub(1) as f64,
        })?;
        *slot += 1;
    }
    MultisetEstimate::new(counts)
}

/// Aggregation over a set of distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Min,
    Max,
    Avg,
}

/// How a point is compared against a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointMode {
    Min,
    Max,
    Avg,
    /// Distance to the componentwise arithmetic mean.
    Centroid,
    /// Distance to the componentwise median.
    MedianPoint,
}

fn aggregate(values: &[f64], link: Link) -> f64 {
    match link {
        Link::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        Link::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Link::Avg => values.iter().sum::<f64>() / values.len() as f64,
    }
}

fn members<'a>(points: &'a [Vec<f64>], set: &[usize]) -> Result<Vec<&'a [f64]>> {
    set.iter()
        .map(|&i| {
            points.get(i).map(Vec::as_slice).ok_or_else(|| {
                Error::InvalidParameter(format!("item {i} outside {} points", points.len()))
            })
        })
        .collect()
}

/// Componentwise arithmetic mean of the listed points.
pub fn centroid(points: &[&[f64]]) -> Vec<f64> {
    let m = points[0].len();
    (0..m).map(|k| points.iter().map(|p| p[k]).sum::<f64>() / points.len() as f64).collect()
}

fn median_point(points: &[&[f64]]) -> Vec<f64> {
    let m = points[0].len();
    (0..m)
        .map(|k| {
            let mut col: Vec<f64> = points.iter().map(|p| p[k]).collect();
            col.sort_by(f64::total_cmp);
            let h = col.len() / 2;
            if col.len() % 2 == 1 { col[h] } else { (col[h - 1] + col[h]) / 2.0 }
        })
        .collect()
}

/// Proximity between point `x` and the cluster `cluster` (indices into `points`).
pub fn point_to_cluster(
    x: &[f64],
    points: &[Vec<f64>],
    cluster: &[usize],
    mode: PointMode,
    metric: Metric,
) -> Result<f64> {
    if cluster.is_empty() {
        return Err(Error::Empty("cluster"));
    }
    let ys = members(points, cluster)?;
    let link = match mode {
        PointMode::Centroid => return pair_distance(x, &centroid(&ys), metric),
        PointMode::MedianPoint => return pair_distance(x, &median_point(&ys), metric),
        PointMode::Min => Link::Min,
        PointMode::Max => Link::Max,
        PointMode::Avg => Link::Avg,
    };
    let ds = ys.iter().map(|y| pair_distance(x, y, metric)).collect::<Result<Vec<_>>>()?;
    Ok(aggregate(&ds, link))
}

/// Aggregate proximity over all unordered pairs inside one cluster.
pub fn intra_cluster_proximity(
    points: &[Vec<f64>],
    cluster: &[usize],
    link: Link,
    metric: Metric,
) -> Result<f64> {
    if cluster.len() < 2 {
        return Err(Error::InvalidParameter("intra-cluster proximity needs at least two items".into()));
    }
    let ys = members(points, cluster)?;
    let mut ds = Vec::with_capacity(ys.len() * (ys.len() - 1) / 2);
    for a in 0..ys.len() {
        for b in a + 1..ys.len() {
            ds.push(pair_distance(ys[a], ys[b], metric)?);
        }
    }
    Ok(aggregate(&ds, link))
}

/// Aggregate proximity over all cross pairs of two disjoint clusters.
pub fn inter_cluster_proximity(
    points: &[Vec<f64>],
    x: &[usize],
    y: &[usize],
    link: Link,
    metric: Metric,
) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("cluster"));
    }
    if let Some(i) = x.iter().find(|i| y.contains(i)) {
        return Err(Error::InvalidParameter(format!("clusters overlap at item {i}")));
    }
    let (xs, ys) = (members(points, x)?, members(points, y)?);
    let mut ds = Vec::with_capacity(xs.len() * ys.len());
    for a in &xs {
        for b in &ys {
            ds.push(pair_distance(a, b, metric)?);
        }
    }
    Ok(aggregate(&ds, link))
}

/// Full pairwise matrix of `metric` over the dataset rows.
///
/// Rows are computed independently (in parallel under [`Exec::Parallel`]),
/// each entry by the same scalar expression, so both modes agree bitwise.
pub fn proximity_matrix(d: &Dataset, metric: Metric, exec: Exec) -> Result<ProximityMatrix> {
    let n = d.len();
    let rows = exec.map_range(n, |i| {
        (i + 1..n)
            .map(|j| {
                pair_distance(d.row(i), d.row(j), metric)
                    .map_err(|e| Error::AtPair { i, j, source: Box::new(e) })
            })
            .collect::<Result<Vec<f64>>>()
    });
    let mut z = ProximityMatrix::absent(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (k, v) in row?.into_iter().enumerate() {
            z.set(i, i + 1 + k, v)?;
        }
    }
    Ok(z)
}

/// Keep the pairs whose proximity is present and at most `t`.
pub fn threshold_graph(z: &ProximityMatrix, t: f64) -> Result<WeightedGraph> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be nonnegative, got {t}")));
    }
    let edges = z
        .present_pairs()
        .into_iter()
        .filter(|&(_, _, w)| w <= t)
        .map(|(u, v, w)| Edge { u, v, w })
        .collect();
    WeightedGraph::new(z.n(), edges)
}

/// Per-parameter equal-width rules over the range of pairwise absolute
/// differences, as used to grade item pairs on a `k`-level scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScale {
    pub rules: Vec<OrdinalMappingRule>,
}

impl PairScale {
    /// A parameter with a single difference value maps everything to level 0.
    pub fn fit(d: &Dataset, levels: u32) -> Result<Self> {
        if d.len() < 2 {
            return Err(Error::Empty("item pairs"));
        }
        let rules = (0..d.dim())
            .map(|k| {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..d.len() {
                    for j in i + 1..d.len() {
                        let v = (d.row(i)[k] - d.row(j)[k]).abs();
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                OrdinalMappingRule::equal_width(lo, if hi > lo { hi } else { lo + 1.0 }, levels)
            })
            .collect::<Result<_>>()?;
        Ok(PairScale { rules })
    }

    /// Ordinal level (0-based) of every parameter difference of a pair.
    pub fn grade(&self, x: &[f64], y: &[f64]) -> Result<Vec<u32>> {
        let diff = vector_difference(x, y)?;
        if diff.len() != self.rules.len() {
            return Err(Error::DimensionMismatch { left: self.rules.len(), right: diff.len() });
        }
        diff.iter().zip(&self.rules).map(|(&v, r)| r.map(v)).collect()
    }
}

/// Multiset estimate of every item pair: grade each parameter difference on
/// a `levels`-level scale fitted to the data and count the grades.
pub fn pair_estimates(d: &Dataset, levels: u32) -> Result<EstimateMatrix> {
    let scale = PairScale::fit(d, levels)?;
    let mut m = EstimateMatrix::absent(d.len());
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = scale.grade(d.row(i), d.row(j))?;
            m.set(i, j, ordinal_vector_to_multiset(&g, levels as usize)?)?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn four_level_rule() -> OrdinalMappingRule {
        OrdinalMappingRule::new(0.0, vec![(0.2, 0), (0.5, 1), (0.8, 2), (3.5, 3), (5.0, 4)]).unwrap()
    }

    // Point x and cluster Y = {y1, y2, y3}.
    fn point_cluster() -> (Vec<f64>, Vec<Vec<f64>>) {
        (
            vec![0.3, 3.5, 1.4, 1.5],
            vec![vec![1.1, 4.0, 3.2, 4.3], vec![2.0, 5.1, 2.5, 5.2], vec![1.3, 4.7, 4.2, 1.6]],
        )
    }

    #[test]
    fn metrics_on_small_vectors() {
        assert_eq!(pair_distance(&[0.0, 0.0], &[3.0, 4.0], Metric::Euclidean).unwrap(), 5.0);
        assert_eq!(pair_distance(&[1.0, 7.0], &[4.0, 2.0], Metric::Chebyshev).unwrap(), 5.0);
        assert_eq!(pair_distance(&[1.0, 7.0], &[4.0, 2.0], Metric::Manhattan).unwrap(), 8.0);
        let m1 = pair_distance(&[1.0, 7.0], &[4.0, 2.0], Metric::Minkowski { r: 1.0 }).unwrap();
        assert!(close(m1, 8.0, 1e-12));
        let c = pair_distance(&[1.0, 3.0], &[3.0, 1.0], Metric::Canberra).unwrap();
        assert!(close(c, 1.0, 1e-12));
        let a = pair_distance(&[1.0, 1.0], &[2.0, 2.0], Metric::Angular).unwrap();
        assert!(close(a, 1.0, 1e-12));
    }

    #[test]
    fn metric_preconditions() {
        assert_eq!(
            pair_distance(&[1.0], &[1.0, 2.0], Metric::Euclidean),
            Err(Error::DimensionMismatch { left: 1, right: 2 })
        );
        assert_eq!(
            pair_distance(&[1.0, 0.0], &[1.0, 2.0], Metric::Canberra),
            Err(Error::NonPositiveCoordinate { index: 1, value: 0.0 })
        );
        assert!(pair_distance(&[1.0], &[2.0], Metric::Minkowski { r: 0.0 }).is_err());
    }

    #[test]
    fn point_to_cluster_modes() {
        let (x, ys) = point_cluster();
        let all = [0, 1, 2];
        let d = |m| point_to_cluster(&x, &ys, &all, m, Metric::Euclidean).unwrap();
        // Exact distances are 3.460, 4.511, 3.208.
        assert!(close(pair_distance(&x, &ys[0], Metric::Euclidean).unwrap(), 3.460, 5e-4));
        assert!(close(d(PointMode::Min), 3.208, 5e-4));
        assert!(close(d(PointMode::Max), 4.511, 5e-4));
        assert!(close(d(PointMode::Avg), 3.726, 5e-4));
        assert!(close(d(PointMode::Avg), 3.7, 0.05));
        // Mean of the cluster is (1.4667, 4.6, 3.3, 3.7).
        assert!(close(d(PointMode::Centroid), 3.320, 5e-4));
        let single = point_to_cluster(&x, &ys, &[1], PointMode::Centroid, Metric::Euclidean).unwrap();
        assert_eq!(single, pair_distance(&x, &ys[1], Metric::Euclidean).unwrap());
        assert!(point_to_cluster(&x, &ys, &[], PointMode::Min, Metric::Euclidean).is_err());
    }

    #[test]
    fn intra_cluster_pairs() {
        let (x, ys) = point_cluster();
        let mut pts = ys.clone();
        pts.push(x);
        let ds = [
            intra_cluster_proximity(&pts, &[0, 1, 2], Link::Min, Metric::Euclidean).unwrap(),
            intra_cluster_proximity(&pts, &[0, 1, 2], Link::Max, Metric::Euclidean).unwrap(),
            intra_cluster_proximity(&pts, &[0, 1, 2], Link::Avg, Metric::Euclidean).unwrap(),
        ];
        assert!(close(ds[0], 1.822, 5e-4));
        assert!(close(ds[1], 4.062, 5e-4));
        assert!(close(ds[2], 2.951, 5e-4));
        assert!(close(ds[0], 1.8, 0.05));
        let twins = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert_eq!(intra_cluster_proximity(&twins, &[0, 1], Link::Max, Metric::Euclidean).unwrap(), 0.0);
        assert!(intra_cluster_proximity(&twins, &[0], Link::Max, Metric::Euclidean).is_err());
    }

    #[test]
    fn inter_cluster_pairs() {
        let (_, ys) = point_cluster();
        let mut pts = vec![vec![0.1, 1.0, 0.2, 0.3], vec![0.3, 0.9, 0.5, 0.6]];
        pts.extend(ys);
        let f = |l| inter_cluster_proximity(&pts, &[0, 1], &[2, 3, 4], l, Metric::Euclidean).unwrap();
        assert!(close(f(Link::Min), 5.489, 5e-4));
        assert!(close(f(Link::Max), 7.051, 5e-4));
        assert!(close(f(Link::Avg), 6.089, 5e-4));
        assert!(close(f(Link::Avg), 6.1, 0.05));
        assert!(inter_cluster_proximity(&pts, &[0, 1], &[1, 2], Link::Min, Metric::Euclidean).is_err());
    }

    #[test]
    fn difference_and_quantization() {
        let x = [0.3, 3.5, 1.4, 1.5, 2.3, 4.9];
        let y = [0.3, 0.8, 2.2, 1.6, 3.9, 4.1];
        let d = vector_difference(&x, &y).unwrap();
        let expected = [0.0, 2.7, 0.8, 0.1, 1.6, 0.8];
        assert!(d.iter().zip(expected).all(|(a, b)| close(*a, b, 1e-9)));
        // Rounded copy: exact binary differences sit a hair off the bounds.
        assert_eq!(quantize_vector(&expected, &four_level_rule()).unwrap(), vec![0, 3, 2, 0, 3, 2]);
        assert_eq!(quantize_vector(&[0.8, 0.5, 1.8, 2.8], &four_level_rule()).unwrap(), vec![2, 1, 3, 3]);
        assert_eq!(quantize_vector(&[0.0, 0.0], &four_level_rule()).unwrap(), vec![0, 0]);
        assert!(matches!(four_level_rule().map(5.1), Err(Error::OutOfRange { .. })));
        let ord = vector_difference(&[3., 4., 1., 1., 2., 5.], &[3., 1., 2., 1., 4., 4.]).unwrap();
        assert_eq!(ord, vec![0., 3., 1., 0., 2., 1.]);
    }

    #[test]
    fn rule_rejects_bad_intervals() {
        assert!(OrdinalMappingRule::new(0.0, vec![(1.0, 0), (1.0, 1)]).is_err());
        assert!(OrdinalMappingRule::new(0.0, vec![(1.0, 1), (2.0, 1)]).is_err());
        let r = OrdinalMappingRule::equal_width(0.0, 3.0, 3).unwrap();
        assert_eq!(quantize_vector(&[0.0, 1.0, 1.01, 3.0], &r).unwrap(), vec![0, 0, 1, 2]);
    }

    #[test]
    fn scalar_and_multiset_transforms() {
        assert_eq!(ordinal_vector_to_scalar(&[2, 1, 3, 3]), 2);
        assert_eq!(ordinal_vector_to_scalar(&[0, 0, 0, 0]), 0);
        // Sum 13 lies in (3m, 4m].
        assert_eq!(ordinal_vector_to_scalar(&[3, 3, 3, 4]), 3);
        assert_eq!(ordinal_vector_to_scalar(&[4, 4, 4, 4]), 3);
        assert_eq!(ordinal_vector_to_scalar(&[4, 4, 4, 5]), 4);
        assert_eq!(ordinal_vector_to_multiset(&[0, 3, 1, 0, 2, 1], 4).unwrap().counts(), &[2, 2, 1, 1]);
        assert_eq!(ordinal_vector_to_multiset(&[2, 1, 3, 3], 4).unwrap().counts(), &[0, 1, 1, 2]);
        assert_eq!(ordinal_vector_to_multiset(&[2, 2, 2], 3).unwrap().counts(), &[0, 0, 3]);
        assert!(ordinal_vector_to_multiset(&[4], 4).is_err());
    }

    #[test]
    fn matrix_and_threshold() {
        let d = Dataset::numeric(vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![6.0, 8.0]]).unwrap();
        let seq = proximity_matrix(&d, Metric::Euclidean, Exec::Sequential).unwrap();
        let par = proximity_matrix(&d, Metric::Euclidean, Exec::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.get(0, 2), Some(10.0));
        let g = threshold_graph(&seq, 5.0).unwrap();
        assert_eq!(g.edge_pairs(), vec![(0, 1), (1, 2)]);
        assert_eq!(threshold_graph(&seq, 1.0).unwrap().edge_count(), 0);
        assert_eq!(threshold_graph(&seq, 10.0).unwrap().edge_count(), 3);
        let one = Dataset::numeric(vec![vec![1.0]]).unwrap();
        assert_eq!(proximity_matrix(&one, Metric::Euclidean, Exec::Sequential).unwrap().n(), 1);
        let neg = Dataset::numeric(vec![vec![1.0], vec![-1.0]]).unwrap();
        assert!(matches!(
            proximity_matrix(&neg, Metric::Canberra, Exec::Sequential),
            Err(Error::AtPair { i: 0, j: 1, .. })
        ));
    }
}
