use std::collections::BTreeSet;

use proptest::prelude::*;

use combclust::agglomerative::{agglomerative_balanced, agglomerative_basic, Linkage};
use combclust::assignment::{assignment_exact, gap_greedy, multibeam_schedule, AssignmentInstance, Sense};
use combclust::compare::{
    consensus_partition, hierarchy_edit_distance, partition_edit_cost, ranking_distance, ranking_vector_proximity,
    ConsensusMode,
};
use combclust::graph::{correlation_greedy, girvan_newman, minimum_spanning_tree, modularity_greedy, mst_clustering};
use combclust::multiset::{delta, dominates, enumerate_scale, median, Dominance, MedianDomain, MultisetEstimate};
use combclust::proximity::{
    ordinal_vector_to_multiset, pair_distance, point_to_cluster, proximity_matrix, quantize_vector, threshold_graph,
    Metric, OrdinalMappingRule, PointMode,
};
use combclust::quality::{balance_vector, correlation_objective, modularity, ModularityForm};
use combclust::restructuring::{knapsack_dp, restructure_one_stage};
use combclust::{
    validate_partition, Dataset, Edge, Exec, Hierarchy, Partition, PartitionCheck, ProximityMatrix, Ranking,
    SignedWeightedGraph, WeightedGraph,
};

fn labels(max_n: usize) -> impl Strategy<Value = Vec<usize>> {
    (1..=max_n).prop_flat_map(|n| prop::collection::vec(0..n, n))
}

fn partition_pair(max_n: usize) -> impl Strategy<Value = (Partition, Partition)> {
    (1..=max_n).prop_flat_map(|n| {
        (prop::collection::vec(0..n, n), prop::collection::vec(0..n, n))
            .prop_map(|(a, b)| (Partition::from_assignment(&a), Partition::from_assignment(&b)))
    })
}

fn points(max_n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.1f64..100.0, dim), 1..=max_n)
}

/// Random simple graph on `n` vertices from an edge mask and weights.
fn graph(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (prop::collection::vec(any::<bool>(), pairs), prop::collection::vec(1u32..50, pairs)).prop_map(
            move |(mask, w)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if mask[k] {
                            edges.push(Edge { u, v, w: w[k] as f64 / 10.0 });
                        }
                        k += 1;
                    }
                }
                WeightedGraph::new(n, edges).unwrap()
            },
        )
    })
}

fn connected(max_n: usize) -> impl Strategy<Value = WeightedGraph> {
    graph(max_n).prop_map(|g| {
        let comps = g.components();
        let mut edges = g.edges().to_vec();
        for w in comps.clusters().windows(2) {
            edges.push(Edge { u: w[0][0], v: w[1][0], w: 9.9 });
        }
        WeightedGraph::new(g.n(), edges).unwrap()
    })
}

fn complete_matrix(max_n: usize) -> impl Strategy<Value = ProximityMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(1u32..100, n * n).prop_map(move |v| {
            ProximityMatrix::from_fn(n, |i, j| Some(v[i * n + j] as f64 / 10.0)).unwrap()
        })
    })
}

fn ranking(n: usize) -> impl Strategy<Value = Ranking> {
    prop::collection::vec(0..n, n).prop_map(move |lab| {
        let p = Partition::from_assignment(&lab);
        Ranking::new(n, p.clusters().to_vec()).unwrap()
    })
}

fn scale_3_4() -> Vec<MultisetEstimate> {
    enumerate_scale(3, 4, false).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn from_assignment_validates(lab in labels(12)) {
        let p = Partition::from_assignment(&lab);
        prop_assert_eq!(validate_partition(p.n(), p.clusters()), PartitionCheck::Pass);
        prop_assert_eq!(p.sizes().iter().sum::<usize>(), lab.len());
    }

    #[test]
    fn proximity_matrix_symmetric_zero_diagonal(pts in points(8, 3), exec in prop_oneof![Just(Exec::Sequential), Just(Exec::Parallel)]) {
        let z = proximity_matrix(&Dataset::numeric(pts.clone()).unwrap(), Metric::Euclidean, exec).unwrap();
        prop_assert!(z.is_symmetric());
        for i in 0..pts.len() {
            prop_assert_eq!(z.get(i, i), Some(0.0));
        }
    }

    #[test]
    fn parallel_matches_sequential(pts in points(10, 2)) {
        let d = Dataset::numeric(pts).unwrap();
        prop_assert_eq!(
            proximity_matrix(&d, Metric::Manhattan, Exec::Sequential).unwrap(),
            proximity_matrix(&d, Metric::Manhattan, Exec::Parallel).unwrap()
        );
    }

    #[test]
    fn triangle_inequality(pts in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 3), 3)) {
        for m in [Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev] {
            let d = |a: usize, b: usize| pair_distance(&pts[a], &pts[b], m).unwrap();
            prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
            prop_assert_eq!(d(0, 1), d(1, 0));
        }
    }

    #[test]
    fn point_to_cluster_links_ordered(pts in points(6, 2), x in prop::collection::vec(0.1f64..100.0, 2)) {
        let idx: Vec<usize> = (0..pts.len()).collect();
        let at = |m| point_to_cluster(&x, &pts, &idx, m, Metric::Euclidean).unwrap();
        prop_assert!(at(PointMode::Min) <= at(PointMode::Avg) + 1e-12);
        prop_assert!(at(PointMode::Avg) <= at(PointMode::Max) + 1e-12);
    }

    #[test]
    fn threshold_graph_monotone(z in complete_matrix(7), t in 0.0f64..10.0, dt in 0.0f64..5.0) {
        let lo: BTreeSet<_> = threshold_graph(&z, t).unwrap().edge_pairs().into_iter().collect();
        let hi: BTreeSet<_> = threshold_graph(&z, t + dt).unwrap().edge_pairs().into_iter().collect();
        prop_assert!(lo.is_subset(&hi));
    }

    #[test]
    fn quantized_multiset_keeps_length(d in prop::collection::vec(0.0f64..1.0, 1..8)) {
        let rule = OrdinalMappingRule::equal_width(0.0, 1.0, 3).unwrap();
        let q = quantize_vector(&d, &rule).unwrap();
        let e = ordinal_vector_to_multiset(&q, 3).unwrap();
        prop_assert_eq!(e.cardinality() as usize, d.len());
    }

    #[test]
    fn delta_is_a_metric(a in 0usize..15, b in 0usize..15, c in 0usize..15) {
        let s = scale_3_4();
        let d = |x: usize, y: usize| delta(&s[x], &s[y]).unwrap();
        prop_assert_eq!(d(a, b).total() == 0, a == b);
        prop_assert_eq!(d(a, b).total(), d(b, a).total());
        prop_assert!(d(a, c).total() <= d(a, b).total() + d(b, c).total());
    }

    #[test]
    fn dominance_antisymmetric(a in 0usize..15, b in 0usize..15) {
        let s = scale_3_4();
        let ab = dominates(&s[a], &s[b]).unwrap();
        let ba = dominates(&s[b], &s[a]).unwrap();
        let flipped = match ab {
            Dominance::Better => Dominance::Worse,
            Dominance::Worse => Dominance::Better,
            other => other,
        };
        prop_assert_eq!(ba, flipped);
        prop_assert_eq!(ab == Dominance::Equal, a == b);
    }

    #[test]
    fn median_properties(pick in prop::collection::vec(0usize..15, 1..6)) {
        let s = scale_3_4();
        let es: Vec<MultisetEstimate> = pick.iter().map(|&k| s[k].clone()).collect();
        prop_assert_eq!(&median(&es[..1], MedianDomain::Generalized).unwrap().median, &es[0]);
        let set = median(&es, MedianDomain::Set).unwrap();
        prop_assert!(es.contains(&set.median));
        let gen = median(&es, MedianDomain::Generalized).unwrap();
        prop_assert!(gen.cost <= set.cost);
    }

    #[test]
    fn modularity_bounds(g in graph(9), lab in prop::collection::vec(0usize..4, 9)) {
        prop_assume!(g.edge_count() > 0);
        let whole = modularity(&g, &Partition::whole(g.n()), ModularityForm::Standard).unwrap();
        prop_assert!(whole.q.abs() < 1e-12);
        let p = Partition::from_assignment(&lab[..g.n()]);
        let r = modularity(&g, &p, ModularityForm::Standard).unwrap();
        prop_assert!(r.q <= 1.0);
        let inside: usize = r.clusters.iter().map(|c| c.internal).sum();
        let cut: usize = r.clusters.iter().map(|c| c.external).sum();
        prop_assert_eq!(2 * inside + cut, 2 * g.edge_count());
    }

    #[test]
    fn correlation_objective_refinement(g in graph(8), lab in prop::collection::vec(0usize..3, 8), split in any::<bool>()) {
        let n = g.n();
        let signed = SignedWeightedGraph::new(
            n,
            g.edges().iter().enumerate().map(|(k, e)| Edge { w: if k % 2 == 0 { e.w } else { -e.w }, ..*e }).collect(),
        ).unwrap();
        let coarse = Partition::from_assignment(&lab[..n]);
        // Refine by splitting every cluster on item parity.
        let fine_lab: Vec<usize> = (0..n).map(|i| 2 * lab[i] + usize::from(split && i % 2 == 1)).collect();
        let fine = Partition::from_assignment(&fine_lab);
        let c = correlation_objective(&signed, &coarse).unwrap();
        let f = correlation_objective(&signed, &fine).unwrap();
        prop_assert!(f.agreement <= c.agreement + 1e-9);
        prop_assert!(f.disagreement.abs() <= c.disagreement.abs() + 1e-9);
    }

    #[test]
    fn balance_counts_sum_to_clusters(lab in labels(15), lo in 1usize..4, extra in 0usize..3) {
        let p = Partition::from_assignment(&lab);
        let b = balance_vector(&p, lo, lo + extra).unwrap();
        prop_assert_eq!(b.counts.iter().sum::<usize>(), p.len());
    }

    #[test]
    fn edit_trace_round_trips((a, b) in partition_pair(9)) {
        let t = partition_edit_cost(&a, &b).unwrap();
        prop_assert_eq!(t.apply(&a).unwrap(), b.clone());
        prop_assert_eq!(t.cost, t.moves.len());
        prop_assert_eq!(partition_edit_cost(&a, &a).unwrap().cost, 0);
    }

    #[test]
    fn ranking_symmetry(r1 in ranking(6), r2 in ranking(6)) {
        prop_assert_eq!(ranking_distance(&r1, &r2).unwrap(), ranking_distance(&r2, &r1).unwrap());
        let fwd = ranking_vector_proximity(&r1, &r2).unwrap();
        let back = ranking_vector_proximity(&r2, &r1).unwrap();
        let mid = fwd.len() / 2;
        let mut reversed = back.clone();
        reversed.reverse();
        prop_assert_eq!(fwd[mid], back[mid]);
        prop_assert_eq!(fwd, reversed);
    }

    #[test]
    fn hierarchy_distance_metric(a in prop::collection::vec(0usize..4, 4), b in prop::collection::vec(0usize..4, 4), c in prop::collection::vec(0usize..4, 4)) {
        // Parent pointers over five nodes where node k+1 hangs below some node ≤ k.
        let tree = |p: &Vec<usize>| {
            let labels = (0..5).map(|i| format!("n{i}")).collect();
            Hierarchy::new(labels, p.iter().enumerate().map(|(k, &q)| (q.min(k), k + 1)).collect()).unwrap()
        };
        let (x, y, z) = (tree(&a), tree(&b), tree(&c));
        let d = hierarchy_edit_distance;
        prop_assert_eq!(d(&x, &x), 0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }

    #[test]
    fn consensus_beats_inputs(inputs in prop::collection::vec(prop::collection::vec(0usize..3, 5), 2..4)) {
        let ps: Vec<Partition> = inputs.iter().map(|l| Partition::from_assignment(l)).collect();
        let r = consensus_partition(&ps, 1, 5, ConsensusMode::Exhaustive, Exec::Sequential).unwrap();
        for cand in &ps {
            let total: usize = ps.iter().map(|p| partition_edit_cost(p, cand).unwrap().cost).sum();
            prop_assert!(r.total <= total);
        }
    }

    #[test]
    fn basic_trace_monotone_and_replays(z in complete_matrix(8), complete in any::<bool>()) {
        let linkage = if complete { Linkage::Complete } else { Linkage::Single };
        let t = agglomerative_basic(&z, linkage).unwrap();
        prop_assert_eq!(t.events.len(), z.n() - 1);
        prop_assert!(t.events.windows(2).all(|w| w[0].value <= w[1].value));
        prop_assert_eq!(t.replay().unwrap(), t.partition.clone());
    }

    #[test]
    fn balanced_respects_cap(z in complete_matrix(9), cap in 1usize..5) {
        let r = agglomerative_balanced(&z, Linkage::Average, cap, None).unwrap();
        prop_assert!(r.partition.sizes().iter().all(|&s| s <= cap));
        prop_assert_eq!(r.trace.replay().unwrap(), r.partition.clone());
        let whole = agglomerative_balanced(&z, Linkage::Average, z.n(), None).unwrap();
        prop_assert_eq!(whole.partition, Partition::whole(z.n()));
    }

    #[test]
    fn spanning_tree_shape(g in connected(8)) {
        let t = minimum_spanning_tree(&g).unwrap();
        prop_assert_eq!(t.edge_count(), g.n() - 1);
        prop_assert_eq!(t.components().len(), 1);
    }

    #[test]
    fn tree_clusters_connected(z in complete_matrix(8), cap in 1usize..5) {
        let r = mst_clustering(&z, cap, Linkage::Single).unwrap();
        let tree_edges: BTreeSet<(usize, usize)> = r.tree.edge_pairs().into_iter().collect();
        for c in r.clusters.partition.clusters() {
            let inside = tree_edges.iter().filter(|(u, v)| c.contains(u) && c.contains(v)).count();
            prop_assert_eq!(inside, c.len() - 1);
        }
    }

    #[test]
    fn correlation_trace_consistent(g in graph(8), q in 0.0f64..20.0) {
        let signed = SignedWeightedGraph::new(
            g.n(),
            g.edges().iter().enumerate().map(|(k, e)| Edge { w: if k % 3 == 0 { -e.w } else { e.w }, ..*e }).collect(),
        ).unwrap();
        let r = correlation_greedy(&signed, q).unwrap();
        prop_assert!(r.trace.windows(2).all(|w| w[0].objective.agreement < w[1].objective.agreement));
        for t in &r.trace {
            prop_assert!(t.objective.disagreement.abs() <= q + 1e-9);
        }
        if let Some(last) = r.trace.last() {
            let f = correlation_objective(&signed, &r.partition).unwrap();
            prop_assert!((f.agreement - last.objective.agreement).abs() < 1e-9);
        }
    }

    #[test]
    fn modularity_greedy_increases(g in graph(9)) {
        prop_assume!(g.edge_count() > 0);
        let r = modularity_greedy(&g, ModularityForm::Standard).unwrap();
        prop_assert!(r.steps.windows(2).all(|w| w[0].q < w[1].q));
        let q = modularity(&g, &r.partition, ModularityForm::Standard).unwrap().q;
        prop_assert!((q - r.q).abs() < 1e-9);
    }

    #[test]
    fn girvan_newman_components_grow(g in connected(8), extra in 0usize..3) {
        let target = (1 + extra).min(g.n());
        let r = girvan_newman(&g, target, Exec::Sequential).unwrap();
        prop_assert!(r.components.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(r.partition.len(), target);
        prop_assert_eq!(r, girvan_newman(&g, target, Exec::Parallel).unwrap());
    }

    #[test]
    fn assignment_permutation_invariant(c in (1usize..6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-9i32..10, n), n)), shift in 0usize..6) {
        let n = c.len();
        let cost: Vec<Vec<f64>> = c.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let rotated: Vec<Vec<f64>> = (0..n).map(|i| cost[(i + shift) % n].clone()).collect();
        for sense in [Sense::Min, Sense::Max] {
            let a = assignment_exact(&cost, sense).unwrap();
            let b = assignment_exact(&rotated, sense).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-9);
        }
    }

    #[test]
    fn gap_respects_capacity(p in prop::collection::vec(prop::collection::vec(0u32..10, 3), 1..8), caps in prop::collection::vec(0u32..12, 3)) {
        let n = p.len();
        let inst = AssignmentInstance::new(
            p.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect(),
            (0..n).map(|i| (0..3).map(|j| ((i + j) % 4 + 1) as f64).collect()).collect(),
            caps.iter().map(|&c| c as f64).collect(),
        ).unwrap();
        let s = gap_greedy(&inst).unwrap();
        prop_assert!(inst.evaluate(&s.assignment).is_ok());
    }

    #[test]
    fn schedule_covers_nodes(angles in prop::collection::vec(0.0f64..360.0, 1..15), beams in 1usize..5) {
        let s = multibeam_schedule(&angles, beams).unwrap();
        let mut seen: Vec<usize> = s.slots.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..angles.len()).collect::<Vec<_>>());
    }

    #[test]
    fn knapsack_within_capacity(items in prop::collection::vec((0u32..20, 0u32..10), 0..10), cap in 0u32..30) {
        let items: Vec<(f64, f64)> = items.iter().map(|&(p, w)| (p as f64, w as f64)).collect();
        let s = knapsack_dp(&items, cap as f64, 1.0).unwrap();
        prop_assert!(s.weight <= cap as f64);
        let sum: f64 = s.selected.iter().map(|&k| items[k].0).sum();
        prop_assert!((sum - s.profit).abs() < 1e-9);
    }

    #[test]
    fn restructuring_residual_identity((a, b) in partition_pair(8), budget in 0u32..10) {
        let costs = vec![1.0; a.n()];
        let rho = partition_edit_cost(&a, &b).unwrap().cost;
        let plan = restructure_one_stage(&a, &b, &costs, None, budget as f64, 1e-3).unwrap();
        prop_assert_eq!(plan.residual + plan.selected.len(), rho);
        prop_assert!(plan.total_cost <= budget as f64);
        let more = restructure_one_stage(&a, &b, &costs, None, budget as f64 + 1.0, 1e-3).unwrap();
        prop_assert!(more.residual <= plan.residual);
    }
}
