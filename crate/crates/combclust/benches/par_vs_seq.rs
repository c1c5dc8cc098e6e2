//! Sequential vs rayon execution of the data-parallel kernels.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use combclust::compare::{consensus_partition, ConsensusMode};
use combclust::graph::edge_betweenness;
use combclust::proximity::{proximity_matrix, Metric};
use combclust::{Dataset, Edge, Exec, Partition, WeightedGraph};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn dataset(rng: &mut StdRng, n: usize, dim: usize) -> Dataset {
    Dataset::numeric((0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..100.0)).collect()).collect()).unwrap()
}

fn graph(rng: &mut StdRng, n: usize, p: f64) -> WeightedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push(Edge { u, v, w: 1.0 });
            }
        }
    }
    WeightedGraph::new(n, edges).unwrap()
}

fn bench_proximity(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(1);
    let d = dataset(&mut rng, 400, 16);
    let mut group = c.benchmark_group("proximity_matrix");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 400), &d, |b, d| {
            b.iter(|| proximity_matrix(black_box(d), Metric::Euclidean, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_consensus(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(2);
    let inputs: Vec<Partition> =
        (0..5).map(|_| Partition::from_assignment(&(0..9).map(|_| rng.gen_range(0..3)).collect::<Vec<_>>())).collect();
    let mut group = c.benchmark_group("consensus_exhaustive");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 9), &inputs, |b, ps| {
            b.iter(|| consensus_partition(black_box(ps), 2, 4, ConsensusMode::Exhaustive, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_betweenness(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(3);
    let g = graph(&mut rng, 200, 0.05);
    let mut group = c.benchmark_group("edge_betweenness");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 200), &g, |b, g| b.iter(|| edge_betweenness(black_box(g), exec)));
    }
    group.finish();
}

criterion_group!(benches, bench_proximity, bench_consensus, bench_betweenness);
criterion_main!(benches);
