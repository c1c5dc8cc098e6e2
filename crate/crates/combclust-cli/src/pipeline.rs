//! One function per CLI verb: load inputs, run the configured method,
//! attach requested quality measures, return a report.

use std::collections::HashMap;
use std::path::PathBuf;

use serde::Deserialize;

use combclust::agglomerative::{agglomerative_balanced, agglomerative_basic, agglomerative_multiset, agglomerative_ordinal};
use combclust::assignment::{
    access_point_assignment, assignment_exact, assignment_multiset, gap_exhaustive, gap_greedy, multibeam_schedule,
    AccessPoint, AccessPointInstance, AssignmentInstance, User,
};
use combclust::compare::{consensus_partition, partition_edit_cost, ranking_distance, ranking_vector_proximity};
use combclust::graph::{
    adaptive_mst_clustering, clique_clustering, correlation_greedy, girvan_newman, modularity_greedy, mst_clustering,
};
use combclust::multiset::MultisetEstimate;
use combclust::proximity::{pair_estimates, proximity_matrix};
use combclust::quality::{balance_vector, correlation_objective, inter_quality, intra_quality, modularity};
use combclust::restructuring::restructure_one_stage;
use combclust::{Dataset, Partition, ProximityMatrix};

use crate::config::{AssignKind, CompareKind, Config, Measure, Method};
use crate::error::{CliError, StageExt};
use crate::io::{load_dataset, load_graph, load_named, load_partitions, GraphInput, NamedPartition};
use crate::report::{Outcome, Report, Verb};

/// File arguments as given on the command line.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub input: Vec<PathBuf>,
    pub graph: Option<PathBuf>,
}

impl Inputs {
    fn first_input(&self, what: &str) -> Result<&PathBuf, CliError> {
        self.input.first().ok_or_else(|| CliError::Validation(format!("--input {what} is required")))
    }

    fn graph(&self) -> Result<Option<GraphInput>, CliError> {
        self.graph.as_deref().map(load_graph).transpose()
    }
}

pub fn run(verb: Verb, cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    match verb {
        Verb::Cluster => cluster(cfg, inputs),
        Verb::Consensus => consensus(cfg, inputs),
        Verb::Compare => compare(cfg, inputs),
        Verb::Restructure => restructure(cfg, inputs),
        Verb::Assign => assign(cfg, inputs),
        Verb::Schedule => schedule(cfg, inputs),
        Verb::Quality => quality(cfg, inputs),
    }
}

/// Reorder `d` to follow `names`; the id sets must agree.
fn align_dataset(d: &Dataset, names: &[String]) -> Result<Dataset, CliError> {
    let index: HashMap<&str, usize> = d.items().iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    if index.len() != names.len() {
        return Err(CliError::Validation("dataset and partition cover different items".into()));
    }
    let idx = names
        .iter()
        .map(|s| index.get(s.as_str()).copied().ok_or_else(|| CliError::Validation(format!("item {s:?} missing from dataset"))))
        .collect::<Result<Vec<_>, _>>()?;
    d.subset(&idx).stage("dataset")
}

/// Relabel graph vertices to follow `names`; the vertex sets must agree.
fn align_graph(g: &GraphInput, names: &[String]) -> Result<GraphInput, CliError> {
    if g.names == names {
        return Ok(g.clone());
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    if g.names.len() != names.len() || g.names.iter().any(|s| !index.contains_key(s.as_str())) {
        return Err(CliError::Validation("graph and partition cover different items".into()));
    }
    let map: Vec<usize> = g.names.iter().map(|s| index[s.as_str()]).collect();
    let edges = g.edges.iter().map(|e| combclust::Edge { u: map[e.u], v: map[e.v], w: e.w }).collect();
    Ok(GraphInput { names: names.to_vec(), edges })
}

/// Optional data sources for quality measures, all over the same items.
#[derive(Default)]
struct Sources<'a> {
    matrix: Option<&'a ProximityMatrix>,
    graph: Option<&'a GraphInput>,
}

fn attach_quality(r: &mut Report, cfg: &Config, p: &Partition, src: Sources) -> Result<(), CliError> {
    let q = &cfg.quality;
    for m in &q.measures {
        match m {
            Measure::Intra | Measure::Inter => {
                let Some(z) = src.matrix else {
                    r.warnings.push(format!("{m:?} quality needs a dataset or proximity graph; skipped"));
                    continue;
                };
                if *m == Measure::Intra {
                    r.quality.intra = Some(intra_quality(p, z, q.link, q.total).stage("intra quality")?);
                } else {
                    r.quality.inter = Some(inter_quality(p, z, q.link, q.total).stage("inter quality")?);
                }
            }
            Measure::Balance => {
                r.quality.balance = Some(balance_vector(p, q.balance_lower, q.balance_upper).stage("balance")?);
            }
            Measure::Modularity => match src.graph {
                Some(g) if !g.edges.is_empty() => {
                    r.quality.modularity = Some(modularity(&g.weighted()?, p, q.modularity_form).stage("modularity")?);
                }
                _ => r.warnings.push("modularity needs a graph with edges; skipped".into()),
            },
            Measure::Correlation => match src.graph {
                Some(g) => r.quality.correlation = Some(correlation_objective(&g.signed()?, p).stage("correlation")?),
                None => r.warnings.push("correlation needs a signed graph; skipped".into()),
            },
        }
    }
    Ok(())
}

/// Partition after the first `n - k` merges of a full dendrogram.
fn cut(trace: &combclust::agglomerative::MergeTrace, k: usize) -> Result<Partition, CliError> {
    let n = trace.n;
    let keep = n.saturating_sub(k.max(1)).min(trace.events.len());
    let mut uf = combclust::model::UnionFind::new(n);
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for e in &trace.events[..keep] {
        let joined = [members[e.left].clone(), members[e.right].clone()].concat();
        for w in joined.windows(2) {
            uf.union(w[0], w[1]);
        }
        members.push(joined);
    }
    let labels: Vec<usize> = (0..n).map(|i| uf.find(i)).collect();
    Ok(Partition::from_assignment(&labels))
}

fn cluster(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    let c = &cfg.cluster;
    let exec = cfg.data.exec;
    let graph = inputs.graph()?;
    let dataset = inputs.input.first().map(|p| load_dataset(p, &cfg.data.ordinal_columns)).transpose()?;
    let graph_method = matches!(c.method, Method::Clique | Method::Correlation | Method::Modularity | Method::GirvanNewman);

    let names: Vec<String> = match (&graph, &dataset) {
        (Some(g), _) if graph_method || dataset.is_none() => g.names.clone(),
        (_, Some(d)) => d.items().to_vec(),
        _ => return Err(CliError::Validation("cluster needs --input (dataset) or --graph".into())),
    };
    if names.is_empty() {
        let mut r = Report::new(Verb::Cluster, names, Outcome::Empty);
        r.partition = Some(NamedPartition::default());
        r.warnings.push("no items to cluster".into());
        return Ok(r);
    }
    let dataset = dataset.map(|d| align_dataset(&d, &names)).transpose()?;
    let graph = graph.map(|g| align_graph(&g, &names)).transpose()?;
    let matrix = match (&dataset, &graph) {
        (Some(d), _) => Some(proximity_matrix(d, cfg.data.metric, exec).stage("proximity matrix")?),
        (None, Some(g)) if !graph_method => Some(g.proximity()?),
        _ => None,
    };
    let need_matrix = || matrix.as_ref().ok_or_else(|| CliError::Validation("method needs a dataset or proximity graph".into()));
    let need_dataset = || dataset.as_ref().ok_or_else(|| CliError::Validation("method needs --input dataset".into()));

    let (partition, outcome): (Option<Partition>, Outcome) = match c.method {
        Method::Basic => {
            let t = agglomerative_basic(need_matrix()?, c.linkage).stage("agglomerative")?;
            (Some(cut(&t, c.clusters)?), Outcome::Dendrogram(t))
        }
        Method::Balanced => {
            let b = agglomerative_balanced(need_matrix()?, c.linkage, c.max_size, c.min_size).stage("balanced agglomerative")?;
            (Some(b.partition.clone()), Outcome::Balanced(b))
        }
        Method::Ordinal => (None, Outcome::Ordinal(agglomerative_ordinal(need_matrix()?, c.max_size).stage("ordinal agglomerative")?)),
        Method::Mst => {
            let t = mst_clustering(need_matrix()?, c.max_size, c.linkage).stage("spanning tree clustering")?;
            (Some(t.clusters.partition.clone()), Outcome::Tree(t))
        }
        Method::AdaptiveMst => {
            let t = adaptive_mst_clustering(need_dataset()?, cfg.data.metric, c.levels, c.min_size.unwrap_or(1), c.max_size, exec)
                .stage("adaptive spanning tree clustering")?;
            (Some(t.clusters.partition.clone()), Outcome::AdaptiveTree(t))
        }
        Method::Clique => {
            let g = graph.as_ref().ok_or_else(|| CliError::Validation("clique clustering needs --graph".into()))?;
            (Some(clique_clustering(&g.weighted()?).stage("clique clustering")?), Outcome::Cliques)
        }
        Method::Correlation => {
            let g = graph.as_ref().ok_or_else(|| CliError::Validation("correlation clustering needs --graph".into()))?;
            let r = correlation_greedy(&g.signed()?, c.disagreement_budget).stage("correlation clustering")?;
            (Some(r.partition.clone()), Outcome::Correlation(r))
        }
        Method::Modularity => {
            let g = graph.as_ref().ok_or_else(|| CliError::Validation("modularity clustering needs --graph".into()))?;
            let r = modularity_greedy(&g.weighted()?, c.modularity_form).stage("modularity clustering")?;
            (Some(r.partition.clone()), Outcome::Modularity(r))
        }
        Method::GirvanNewman => {
            let g = graph.as_ref().ok_or_else(|| CliError::Validation("girvan-newman needs --graph".into()))?;
            let r = girvan_newman(&g.weighted()?, c.target_components, exec).stage("girvan-newman")?;
            (Some(r.partition.clone()), Outcome::GirvanNewman(r))
        }
        Method::Multiset => {
            let est = pair_estimates(need_dataset()?, c.levels).stage("pair estimates")?;
            let r = agglomerative_multiset(&est, c.max_size, c.median_domain).stage("multiset agglomerative")?;
            (Some(r.partition.clone()), Outcome::Multiset(r))
        }
    };
    let mut report = Report::new(Verb::Cluster, names.clone(), outcome);
    match &partition {
        Some(p) => {
            report.partition = Some(NamedPartition::from_partition(p, &names));
            attach_quality(&mut report, cfg, p, Sources { matrix: matrix.as_ref(), graph: graph.as_ref() })?;
        }
        None => report.warnings.push("method yields a hierarchy, not a partition".into()),
    }
    Ok(report)
}

fn consensus(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    let (names, named) = load_partitions(&inputs.input)?;
    let ps = named.iter().map(|n| n.to_partition(&names)).collect::<Result<Vec<_>, _>>()?;
    let c = &cfg.consensus;
    let hi = c.max_clusters.min(names.len());
    let r = consensus_partition(&ps, c.min_clusters, hi, c.mode, cfg.data.exec).stage("consensus")?;
    let p = r.partition.clone();
    let mut report = Report::new(Verb::Consensus, names.clone(), Outcome::Consensus(r));
    report.partition = Some(NamedPartition::from_partition(&p, &names));
    attach_quality(&mut report, cfg, &p, Sources::default())?;
    Ok(report)
}

fn two_inputs(inputs: &Inputs, verb: &str) -> Result<(), CliError> {
    if inputs.input.len() != 2 {
        return Err(CliError::Validation(format!("{verb} takes exactly two --input files")));
    }
    Ok(())
}

fn compare(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    two_inputs(inputs, "compare")?;
    let (names, named) = load_partitions(&inputs.input)?;
    let outcome = match cfg.compare.kind {
        CompareKind::Partition => {
            let a = named[0].to_partition(&names)?;
            let b = named[1].to_partition(&names)?;
            Outcome::EditCost(partition_edit_cost(&a, &b).stage("edit cost")?)
        }
        CompareKind::Ranking => {
            let a = named[0].to_ranking(&names)?;
            let b = named[1].to_ranking(&names)?;
            Outcome::RankingDistance {
                scalar: ranking_distance(&a, &b).stage("ranking distance")?,
                vector: ranking_vector_proximity(&a, &b).stage("ranking distance")?,
            }
        }
    };
    Ok(Report::new(Verb::Compare, names, outcome))
}

fn restructure(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    two_inputs(inputs, "restructure")?;
    let (names, named) = load_partitions(&inputs.input)?;
    let s1 = named[0].to_partition(&names)?;
    let s2 = named[1].to_partition(&names)?;
    let rc = &cfg.restructure;
    for id in rc.costs.keys().chain(rc.profits.keys()) {
        if !names.contains(id) {
            return Err(CliError::Validation(format!("restructure config names unknown item {id:?}")));
        }
    }
    let costs: Vec<f64> = names.iter().map(|s| rc.costs.get(s).copied().unwrap_or(rc.default_cost)).collect();
    let profits: Option<Vec<f64>> =
        (!rc.profits.is_empty()).then(|| names.iter().map(|s| rc.profits.get(s).copied().unwrap_or(1.0)).collect());
    let budget = rc.budget.unwrap_or_else(|| costs.iter().sum());
    let plan = restructure_one_stage(&s1, &s2, &costs, profits.as_deref(), budget, rc.resolution).stage("restructuring")?;
    let p = plan.result.clone();
    let mut report = Report::new(Verb::Restructure, names.clone(), Outcome::Restructure(plan));
    report.partition = Some(NamedPartition::from_partition(&p, &names));
    Ok(report)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignFile {
    #[serde(default)]
    items: Vec<String>,
    #[serde(default)]
    cost: Vec<Vec<f64>>,
    #[serde(default)]
    profit: Vec<Vec<f64>>,
    #[serde(default)]
    weight: Vec<Vec<f64>>,
    #[serde(default)]
    capacity: Vec<f64>,
    #[serde(default)]
    users: Vec<User>,
    #[serde(default)]
    points: Vec<AccessPoint>,
    /// Per item, per agent: multiset estimate counts.
    #[serde(default)]
    estimates: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    caps: Vec<usize>,
}

/// Items grouped by agent, in agent order; unassigned items are left out.
fn by_agent(assignment: &[Option<usize>], agents: usize, names: &[String]) -> NamedPartition {
    let mut groups = vec![Vec::new(); agents];
    for (i, a) in assignment.iter().enumerate() {
        if let Some(j) = a {
            groups[*j].push(i);
        }
    }
    let mut named = NamedPartition::from_groups(&groups, names);
    for (k, g) in named.0.iter_mut().enumerate() {
        g.0 = format!("A{}", k + 1);
    }
    named
}

fn assign(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    let path = inputs.first_input("instance file")?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let f: AssignFile = serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let a = &cfg.assign;
    let n = match a.kind {
        AssignKind::Exact => f.cost.len(),
        AssignKind::Gap | AssignKind::GapExhaustive => f.profit.len(),
        AssignKind::AccessPoint => f.users.len(),
        AssignKind::Multiset => f.estimates.len(),
    };
    let names = if f.items.is_empty() { (1..=n).map(|i| i.to_string()).collect() } else { f.items.clone() };
    if names.len() != n {
        return Err(CliError::Validation(format!("{} item names for {n} items", names.len())));
    }
    let (outcome, partition) = match a.kind {
        AssignKind::Exact => {
            let m = assignment_exact(&f.cost, a.sense).stage("assignment")?;
            let assigned: Vec<Option<usize>> = m.row_to_col.iter().map(|&j| Some(j)).collect();
            let p = by_agent(&assigned, n, &names);
            (Outcome::Matching(m), p)
        }
        AssignKind::Gap | AssignKind::GapExhaustive => {
            let inst = AssignmentInstance::new(f.profit, f.weight, f.capacity).stage("assignment instance")?;
            let s = if a.kind == AssignKind::Gap { gap_greedy(&inst) } else { gap_exhaustive(&inst) }.stage("assignment")?;
            let p = by_agent(&s.assignment, inst.agents(), &names);
            (Outcome::Gap(s), p)
        }
        AssignKind::AccessPoint => {
            let agents = f.points.len();
            let inst = AccessPointInstance::new(f.users, f.points).stage("access point instance")?;
            let s = access_point_assignment(&inst, &a.scoring).stage("access point assignment")?;
            let p = by_agent(&s.assignment, agents, &names);
            (Outcome::AccessPoint(s), p)
        }
        AssignKind::Multiset => {
            let profits = f
                .estimates
                .into_iter()
                .map(|row| row.into_iter().map(MultisetEstimate::new).collect::<combclust::Result<Vec<_>>>())
                .collect::<combclust::Result<Vec<_>>>()
                .stage("estimates")?;
            let s = assignment_multiset(&profits, &f.caps, a.search).stage("multiset assignment")?;
            let assigned: Vec<Option<usize>> = s.assignment.iter().map(|&j| Some(j)).collect();
            let p = by_agent(&assigned, f.caps.len(), &names);
            (Outcome::MultisetAssignment(s), p)
        }
    };
    let mut report = Report::new(Verb::Assign, names, outcome);
    report.partition = Some(partition);
    Ok(report)
}

fn schedule(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    let d = load_dataset(inputs.first_input("angle table")?, &[])?;
    let col = match &cfg.schedule.angle_column {
        Some(name) => d
            .parameters()
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| CliError::Validation(format!("no column {name:?}")))?,
        None => 0,
    };
    let angles: Vec<f64> = d.rows().iter().map(|r| r[col]).collect();
    let s = multibeam_schedule(&angles, cfg.schedule.beams).stage("schedule")?;
    let names = d.items().to_vec();
    let mut named = NamedPartition::from_groups(&s.slots, &names);
    for (k, g) in named.0.iter_mut().enumerate() {
        g.0 = format!("T{}", k + 1);
    }
    let mut report = Report::new(Verb::Schedule, names, Outcome::Schedule(s));
    report.partition = Some(named);
    Ok(report)
}

fn quality(cfg: &Config, inputs: &Inputs) -> Result<Report, CliError> {
    let named = load_named(inputs.first_input("partition")?)?;
    let names = named.item_ids();
    let p = named.to_partition(&names)?;
    let matrix = match inputs.input.get(1) {
        Some(path) => {
            let d = align_dataset(&load_dataset(path, &cfg.data.ordinal_columns)?, &names)?;
            Some(proximity_matrix(&d, cfg.data.metric, cfg.data.exec).stage("proximity matrix")?)
        }
        None => None,
    };
    let graph = inputs.graph()?.map(|g| align_graph(&g, &names)).transpose()?;
    let matrix = match (matrix, &graph) {
        (None, Some(g)) => Some(g.proximity()?),
        (m, _) => m,
    };
    let mut report = Report::new(Verb::Quality, names.clone(), Outcome::Quality);
    report.partition = Some(NamedPartition::from_partition(&p, &names));
    if cfg.quality.measures.is_empty() {
        report.warnings.push("no quality measures configured".into());
    }
    attach_quality(&mut report, cfg, &p, Sources { matrix: matrix.as_ref(), graph: graph.as_ref() })?;
    Ok(report)
}
