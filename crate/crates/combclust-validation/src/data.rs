use std::collections::BTreeMap;

use combclust::assignment::{AccessPoint, AccessPointInstance, User};
use combclust::compare::ClusteredHierarchy;
use combclust::{Edge, Hierarchy, Partition, ProximityMatrix, Ranking, SignedWeightedGraph};

/// Sparse matrix from 1-based `(i, j, value)` triples.
pub fn matrix(n: usize, triples: &[(usize, usize, f64)]) -> ProximityMatrix {
    let mut z = ProximityMatrix::absent(n);
    for &(i, j, v) in triples {
        z.set(i - 1, j - 1, v).expect("fixture entries are valid");
    }
    z
}

pub fn partition(n: usize, clusters: &[&[usize]]) -> Partition {
    Partition::from_one_based(n, clusters).expect("fixture partitions are valid")
}

/// Tree proximities of the 14-item balanced agglomeration example.
pub const SPARSE_TREE: [(usize, usize, f64); 13] = [
    (1, 2, 1.5), (1, 3, 1.7), (1, 4, 0.5), (1, 5, 0.2), (2, 6, 0.1), (2, 7, 0.6), (3, 8, 3.1),
    (3, 9, 1.0), (3, 10, 0.9), (5, 11, 2.5), (5, 12, 2.1), (8, 13, 0.3), (8, 14, 0.4),
];

/// Merges of the balanced run with cap 3: members joined and linkage value.
pub const SPARSE_TREE_MERGES: [(&[usize], &[usize], f64); 8] = [
    (&[2], &[6], 0.1),
    (&[1], &[5], 0.2),
    (&[8], &[13], 0.3),
    (&[8, 13], &[14], 0.4),
    (&[1, 5], &[4], 0.5),
    (&[2, 6], &[7], 0.6),
    (&[3], &[10], 0.9),
    (&[3, 10], &[9], 1.0),
];

pub const SPARSE_TREE_CLUSTERS: [&[usize]; 6] = [&[8, 13, 14], &[1, 4, 5], &[2, 6, 7], &[3, 9, 10], &[11], &[12]];

/// Twelve-item proximity graph for spanning-tree clustering.
pub const TREE_GRAPH: [(usize, usize, f64); 25] = [
    (1, 2, 0.3), (1, 3, 1.4), (1, 4, 1.45), (2, 3, 0.3), (2, 6, 2.6), (2, 7, 0.2), (2, 8, 1.8),
    (3, 4, 0.4), (3, 7, 1.65), (3, 8, 0.25), (4, 5, 0.4), (4, 8, 0.45), (4, 9, 1.9), (5, 9, 0.35),
    (5, 10, 1.5), (6, 7, 0.1), (6, 11, 1.4), (7, 8, 0.41), (7, 11, 0.4), (8, 9, 0.9), (8, 11, 2.1),
    (9, 10, 0.15), (9, 12, 0.5), (10, 12, 2.0), (11, 12, 2.5),
];

/// Edges drawn as the spanning tree: the graph thresholded at 0.5.
pub fn tree_graph_drawn_edges() -> Vec<(usize, usize)> {
    TREE_GRAPH.iter().filter(|e| e.2 <= 0.5).map(|e| (e.0, e.1)).collect()
}

pub const TREE_GRAPH_CLUSTERS: [&[usize]; 3] = [&[2, 6, 7, 11], &[1, 3, 4, 8], &[5, 9, 10, 12]];

/// Upper triangle of the signed 11-item weight table, row by row.
pub const SIGNED_ROWS: [&[f64]; 10] = [
    &[-3.0, 1.4, -0.6, -5.1, -5.5, -3.5, -1.2, -3.4, -4.5, -6.5],
    &[-0.8, -1.3, -3.3, -1.4, 3.1, -2.9, -3.6, -5.1, -4.9],
    &[-1.1, -2.0, -2.7, -2.1, 3.2, -3.0, -4.5, -4.1],
    &[-0.5, -3.7, -2.5, 2.6, -0.9, -1.3, -2.2],
    &[-6.5, -5.6, -1.1, 2.8, -0.5, -6.1],
    &[3.5, 0.4, -1.8, -3.2, -0.3],
    &[0.5, -0.3, -0.8, 2.9],
    &[1.0, -0.8, -2.8],
    &[3.0, -5.5],
    &[-6.0],
];

pub fn signed_graph() -> SignedWeightedGraph {
    let mut edges = Vec::new();
    for (i, row) in SIGNED_ROWS.iter().enumerate() {
        for (k, &w) in row.iter().enumerate() {
            edges.push(Edge { u: i, v: i + 1 + k, w });
        }
    }
    SignedWeightedGraph::new(11, edges).expect("fixture graph is valid")
}

pub const SIGNED_MERGES: [(&[usize], &[usize]); 8] = [
    (&[6], &[7]),
    (&[3], &[8]),
    (&[9], &[10]),
    (&[6, 7], &[11]),
    (&[5], &[9, 10]),
    (&[4], &[3, 8]),
    (&[1], &[3, 4, 8]),
    (&[2], &[6, 7, 11]),
];

pub const SIGNED_CLUSTERS: [&[usize]; 3] = [&[1, 3, 4, 8], &[5, 9, 10], &[2, 6, 7, 11]];

/// Source and target of the seven-item edit and consensus examples.
pub fn seven_item_partitions() -> Vec<Partition> {
    vec![
        partition(7, &[&[1, 2], &[3, 4], &[5, 6], &[7]]),
        partition(7, &[&[1], &[2, 3], &[4], &[5, 6, 7]]),
        partition(7, &[&[1, 2], &[3, 4], &[5, 6, 7]]),
    ]
}

pub fn seven_item_rankings() -> (Ranking, Ranking) {
    (
        Ranking::from_one_based(7, &[&[1, 6], &[2, 4], &[3, 5, 7]]).expect("valid"),
        Ranking::from_one_based(7, &[&[1, 2], &[3, 4], &[5, 6], &[7]]).expect("valid"),
    )
}

/// Two three-level hierarchies over seven items differing by one arc and
/// by the placement of items 3 and 4.
pub fn hierarchy_pair() -> (ClusteredHierarchy, ClusteredHierarchy) {
    let nodes = ["top", "ml", "mr", "bl", "bm", "br"];
    let e1 = [("top", "ml"), ("top", "mr"), ("ml", "bl"), ("ml", "bm"), ("mr", "bm"), ("mr", "br")];
    let mut e2 = e1.to_vec();
    e2.push(("mr", "bl"));
    let h1 = Hierarchy::from_label_edges(&nodes, &e1).expect("valid");
    let h2 = Hierarchy::from_label_edges(&nodes, &e2).expect("valid");
    let contents = |swap: bool| {
        let mut m = BTreeMap::new();
        m.insert("top".to_string(), vec![0]);
        m.insert("ml".to_string(), vec![1]);
        m.insert("mr".to_string(), vec![if swap { 3 } else { 2 }]);
        m.insert("bl".to_string(), vec![if swap { 2 } else { 3 }]);
        m.insert("bm".to_string(), vec![4]);
        m.insert("br".to_string(), vec![5, 6]);
        m
    };
    (
        ClusteredHierarchy::new(7, h1, contents(false)).expect("valid"),
        ClusteredHierarchy::new(7, h2, contents(true)).expect("valid"),
    )
}

/// Interval estimates of three levels and four elements.
pub const INTERVAL_SCALE_3_4: [[u32; 3]; 12] = [
    [4, 0, 0], [3, 1, 0], [2, 2, 0], [1, 3, 0], [0, 4, 0], [0, 3, 1],
    [0, 2, 2], [0, 1, 3], [0, 0, 4], [2, 1, 1], [1, 2, 1], [1, 1, 2],
];

/// Ordinal intra-cluster labels (levels 1..=3) for a 12-item, 3-cluster solution.
pub const INTRA_LABELS_12: [(usize, usize, f64); 19] = [
    (1, 2, 2.0), (1, 3, 1.0), (1, 4, 2.0), (2, 3, 3.0), (2, 4, 2.0), (3, 4, 1.0),
    (5, 6, 2.0), (5, 7, 3.0), (6, 7, 1.0),
    (8, 9, 1.0), (8, 10, 1.0), (8, 11, 2.0), (8, 12, 3.0), (9, 10, 3.0),
    (9, 11, 3.0), (9, 12, 1.0), (10, 11, 3.0), (10, 12, 2.0), (11, 12, 1.0),
];

pub const INTRA_CLUSTERS_12: [&[usize]; 3] = [&[1, 2, 3, 4], &[5, 6, 7], &[8, 9, 10, 11, 12]];

/// Intra-cluster labels of a nine-item, three-cluster solution.
pub const INTRA_LABELS_9: [(usize, usize, f64); 9] = [
    (1, 2, 2.0), (1, 3, 2.0), (2, 3, 1.0), (4, 5, 2.0), (4, 6, 1.0), (5, 6, 1.0),
    (7, 8, 2.0), (7, 9, 1.0), (8, 9, 1.0),
];

pub const NINE_CLUSTERS: [&[usize]; 3] = [&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]];

/// Inter-cluster labels of the same solution: rows 1..=6 against the
/// later clusters.
pub fn inter_labels_9() -> Vec<(usize, usize, f64)> {
    let rows: [(usize, &[(usize, f64)]); 6] = [
        (1, &[(4, 3.), (5, 3.), (6, 3.), (7, 3.), (8, 3.), (9, 3.)]),
        (2, &[(4, 2.), (5, 2.), (6, 3.), (7, 3.), (8, 3.), (9, 3.)]),
        (3, &[(4, 3.), (5, 3.), (6, 3.), (7, 3.), (8, 3.), (9, 2.)]),
        (4, &[(7, 3.), (8, 3.), (9, 3.)]),
        (5, &[(7, 3.), (8, 3.), (9, 3.)]),
        (6, &[(7, 2.), (8, 3.), (9, 2.)]),
    ];
    rows.iter().flat_map(|(i, r)| r.iter().map(move |&(j, v)| (*i, j, v))).collect()
}

/// Seventeen-item solution for the balance vector; item 9 sits with 11.
pub const BALANCE_CLUSTERS: [&[usize]; 6] =
    [&[1, 5, 7], &[2], &[3, 6, 10, 13, 17], &[9, 11], &[4, 12, 14, 15], &[8, 16]];

/// Per-cluster `(internal, external)` edge counts and `|E|`.
pub const MODULARITY_COUNTS: [(usize, usize); 4] = [(6, 4), (4, 4), (3, 4), (4, 2)];
pub const MODULARITY_EDGES: usize = 26;

/// Four-parameter points: cluster Y, then cluster X.
pub const CLUSTER_Y: [[f64; 4]; 3] = [[1.1, 4.0, 3.2, 4.3], [2.0, 5.1, 2.5, 5.2], [1.3, 4.7, 4.2, 1.6]];
pub const CLUSTER_X: [[f64; 4]; 2] = [[0.1, 1.0, 0.2, 0.3], [0.3, 0.9, 0.5, 0.6]];

/// Reference values: intra (min, max, avg) of Y, inter (min, max, avg) of X and Y.
pub const REFERENCE_INTRA: [f64; 3] = [1.8, 4.0, 2.9];
pub const REFERENCE_INTER: [f64; 3] = [5.4, 7.0, 6.1];

/// Access points: x, y, z, bandwidth, user cap, reliability, admissible distance.
pub const ACCESS_POINTS: [(f64, f64, f64, f64, usize, f64, f64); 4] = [
    (50., 157., 10., 30., 4, 10., 10.),
    (150., 165., 10., 30., 5, 15., 10.),
    (72., 102., 10., 42., 6, 10., 6.),
    (140., 112., 10., 32., 5, 8., 9.),
];

/// Users: x, y, z, bandwidth, reliability.
pub const USERS: [(f64, f64, f64, f64, f64); 14] = [
    (30., 165., 5., 10., 5.),
    (58., 174., 5., 5., 9.),
    (88., 156., 0., 6., 6.),
    (110., 169., 5., 7., 5.),
    (145., 181., 3., 5., 4.),
    (170., 161., 5., 7., 4.),
    (52., 134., 5., 6., 8.),
    (86., 134., 3., 6., 7.),
    (120., 140., 6., 4., 6.),
    (150., 136., 3., 6., 7.),
    (175., 125., 1., 8., 5.),
    (27., 109., 7., 8., 5.),
    (55., 105., 2., 7., 10.),
    (98., 89., 3., 10., 10.),
];

pub fn access_point_instance() -> AccessPointInstance {
    let users = USERS
        .iter()
        .map(|&(x, y, z, f, r)| User { position: [x, y, z], bandwidth: f, reliability: r })
        .collect();
    let points = ACCESS_POINTS
        .iter()
        .map(|&(x, y, z, f, k, r, d)| AccessPoint {
            position: [x, y, z],
            bandwidth: f,
            max_users: k,
            reliability: r,
            range: d,
        })
        .collect();
    AccessPointInstance::new(users, points).expect("fixture instance is valid")
}

/// Coordinates of the first nine users.
pub fn nine_user_coordinates() -> Vec<Vec<f64>> {
    USERS[..9].iter().map(|u| vec![u.0, u.1, u.2]).collect()
}

/// Reference pair tables over the nine users, row-major over `i < j`:
/// coordinate differences, ordinal grades (1..=3) and multiset estimates.
pub const REFERENCE_DIFFERENCES: [[u32; 3]; 36] = [
    [28, 9, 0], [58, 9, 5], [80, 4, 0], [115, 16, 2], [140, 4, 0], [22, 31, 0], [56, 31, 2], [90, 25, 1],
    [30, 18, 5], [52, 5, 0], [107, 25, 3], [112, 13, 0], [6, 40, 0], [28, 40, 2], [82, 34, 1],
    [22, 13, 5], [58, 25, 3], [82, 5, 5], [36, 22, 5], [2, 22, 3], [32, 16, 6],
    [35, 12, 2], [60, 8, 0], [58, 35, 0], [24, 35, 2], [10, 29, 1],
    [25, 20, 2], [93, 48, 2], [59, 48, 0], [25, 41, 1],
    [118, 27, 0], [84, 27, 2], [50, 21, 1],
    [34, 0, 2], [68, 6, 1],
    [34, 6, 3],
];

pub const REFERENCE_GRADES: [[u32; 3]; 36] = [
    [1, 1, 1], [2, 1, 3], [2, 1, 1], [3, 1, 1], [3, 1, 1], [1, 2, 1], [2, 2, 1], [2, 2, 1],
    [1, 2, 3], [2, 1, 1], [3, 2, 2], [3, 1, 1], [1, 3, 1], [1, 3, 1], [2, 3, 1],
    [1, 1, 3], [2, 2, 2], [2, 1, 3], [1, 2, 3], [1, 2, 2], [1, 1, 3],
    [1, 1, 1], [2, 3, 1], [2, 3, 1], [1, 3, 1], [1, 2, 1],
    [3, 2, 1], [2, 3, 1], [2, 3, 1], [1, 3, 1],
    [3, 2, 1], [2, 2, 1], [2, 2, 1],
    [1, 1, 1], [2, 1, 1],
    [1, 1, 2],
];

pub const REFERENCE_ESTIMATES: [[u32; 3]; 36] = [
    [3, 0, 0], [1, 1, 1], [2, 1, 0], [2, 0, 1], [2, 0, 1], [2, 1, 0], [1, 2, 0], [1, 2, 0],
    [1, 1, 1], [2, 1, 0], [0, 2, 1], [2, 0, 1], [2, 0, 1], [2, 0, 1], [1, 1, 1],
    [2, 0, 1], [0, 3, 0], [1, 1, 1], [1, 1, 1], [1, 2, 0], [2, 0, 1],
    [3, 0, 0], [1, 1, 1], [1, 1, 1], [2, 0, 1], [2, 1, 0],
    [1, 1, 1], [1, 1, 1], [1, 1, 1], [2, 0, 1],
    [1, 1, 1], [1, 2, 0], [1, 2, 0],
    [3, 0, 0], [2, 1, 0],
    [2, 1, 0],
];

pub const NINE_USER_CLUSTERS: [&[usize]; 4] = [&[7, 8, 9], &[3, 4, 5], &[1, 2], &[6]];
pub const NINE_USER_FIRST_MERGES: [(usize, usize); 3] = [(1, 2), (4, 5), (7, 8)];

/// Initial and goal solutions of the restructuring example.
pub fn restructuring_pair() -> (Partition, Partition) {
    (
        partition(9, &[&[1, 3, 8], &[2, 4, 7], &[5, 6, 9]]),
        partition(9, &[&[2, 3], &[5, 7, 8], &[1, 4, 6, 9]]),
    )
}

/// Drawn intermediate solution after three relocations.
pub const RESTRUCTURED_CLUSTERS: [&[usize]; 3] = [&[1, 2, 3], &[7, 8], &[4, 5, 6, 9]];
