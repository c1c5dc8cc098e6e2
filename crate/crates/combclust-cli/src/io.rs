//! Reading datasets, graphs and partitions; the named-partition json shape.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use combclust::{Dataset, Edge, ParamKind, Partition, ProximityMatrix, Ranking, SignedWeightedGraph, WeightedGraph};

use crate::error::CliError;

fn invalid(path: &Path, msg: impl fmt::Display) -> CliError {
    CliError::Validation(format!("{}: {msg}", path.display()))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Item ids are strings; json files may also write them as numbers.
#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Int(i64),
}

impl From<RawId> for String {
    fn from(r: RawId) -> String {
        match r {
            RawId::Text(s) => s,
            RawId::Int(i) => i.to_string(),
        }
    }
}

fn id<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    RawId::deserialize(d).map(String::from)
}

fn ids<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    Vec::<RawId>::deserialize(d).map(|v| v.into_iter().map(String::from).collect())
}

/// Numeric ids sort numerically, anything else lexicographically.
pub fn sort_ids(ids: &mut [String]) {
    if ids.iter().all(|s| s.parse::<i64>().is_ok()) {
        ids.sort_by_key(|s| s.parse::<i64>().unwrap_or_default());
    } else {
        ids.sort();
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDataset {
    parameters: Vec<String>,
    items: Vec<JsonItem>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonItem {
    #[serde(deserialize_with = "id")]
    id: String,
    values: Vec<f64>,
}

/// Load a dataset from csv (header row, id in the first column) or json.
pub fn load_dataset(path: &Path, ordinal: &[String]) -> Result<Dataset, CliError> {
    let text = read(path)?;
    let (items, parameters, values) = if is_json(path) {
        let raw: JsonDataset = serde_json::from_str(&text).map_err(|e| invalid(path, e))?;
        let (items, values) = raw.items.into_iter().map(|it| (it.id, it.values)).unzip();
        (items, raw.parameters, values)
    } else {
        parse_csv(path, &text)?
    };
    let mut seen = BTreeSet::new();
    for it in &items {
        if !seen.insert(it) {
            return Err(invalid(path, format!("duplicate item id {it:?}")));
        }
    }
    if let Some(c) = ordinal.iter().find(|c| !parameters.contains(c)) {
        return Err(invalid(path, format!("ordinal column {c:?} is not in the header")));
    }
    let kinds = parameters
        .iter()
        .map(|p| if ordinal.contains(p) { ParamKind::Ordinal } else { ParamKind::Numeric })
        .collect();
    Dataset::new(items, parameters, kinds, values).map_err(|e| invalid(path, e))
}

type Columns = (Vec<String>, Vec<String>, Vec<Vec<f64>>);

fn parse_csv(path: &Path, text: &str) -> Result<Columns, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| invalid(path, e))?.clone();
    if header.len() < 2 {
        return Err(invalid(path, "need an id column and at least one parameter column"));
    }
    let parameters: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let (mut items, mut values) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| invalid(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(parameters.len());
        for (col, field) in rec.iter().enumerate().skip(1) {
            let v = field
                .parse::<f64>()
                .map_err(|_| invalid(path, format!("line {line}, column {}: {field:?} is not a number", col + 1)))?;
            row.push(v);
        }
        items.push(rec[0].to_string());
        values.push(row);
    }
    Ok((items, parameters, values))
}

/// Edge list with vertex names mapped to dense indices.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub names: Vec<String>,
    pub edges: Vec<Edge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    #[serde(default, deserialize_with = "ids")]
    nodes: Vec<String>,
    edges: Vec<JsonEdge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    #[serde(deserialize_with = "id")]
    u: String,
    #[serde(deserialize_with = "id")]
    v: String,
    #[serde(default = "unit")]
    w: f64,
}

fn unit() -> f64 {
    1.0
}

/// Load `u v [w]` lines (whitespace or commas, `#` comments) or a json
/// `{"nodes": [...], "edges": [{"u","v","w"}]}` file.
pub fn load_graph(path: &Path) -> Result<GraphInput, CliError> {
    let text = read(path)?;
    let (declared, raw) = if is_json(path) {
        let g: JsonGraph = serde_json::from_str(&text).map_err(|e| invalid(path, e))?;
        (g.nodes, g.edges.into_iter().map(|e| (e.u, e.v, e.w)).collect())
    } else {
        (Vec::new(), parse_edge_lines(path, &text)?)
    };
    let mut names = declared;
    if names.is_empty() {
        let set: BTreeSet<&String> = raw.iter().flat_map(|(u, v, _)| [u, v]).collect();
        names = set.into_iter().cloned().collect();
        sort_ids(&mut names);
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
    if index.len() != names.len() {
        return Err(invalid(path, "duplicate node name"));
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(raw.len());
    for (u, v, w) in &raw {
        let lookup = |s: &String| index.get(s.as_str()).copied().ok_or_else(|| invalid(path, format!("unknown node {s:?}")));
        let (a, b) = (lookup(u)?, lookup(v)?);
        if a == b {
            return Err(invalid(path, format!("self-loop at {u:?}")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(invalid(path, format!("duplicate edge {u:?} {v:?}")));
        }
        edges.push(Edge { u: a, v: b, w: *w });
    }
    Ok(GraphInput { names, edges })
}

fn parse_edge_lines(path: &Path, text: &str) -> Result<Vec<(String, String, f64)>, CliError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let w = match f.len() {
            2 => 1.0,
            3 => f[2].parse().map_err(|_| invalid(path, format!("line {}: bad weight {:?}", k + 1, f[2])))?,
            _ => return Err(invalid(path, format!("line {}: expected `u v [w]`", k + 1))),
        };
        out.push((f[0].to_string(), f[1].to_string(), w));
    }
    Ok(out)
}

impl GraphInput {
    pub fn weighted(&self) -> Result<WeightedGraph, CliError> {
        WeightedGraph::new(self.names.len(), self.edges.clone()).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn signed(&self) -> Result<SignedWeightedGraph, CliError> {
        if let Some(e) = self.edges.iter().find(|e| e.w == 0.0) {
            return Err(CliError::Validation(format!(
                "zero weight on signed edge {} {}",
                self.names[e.u], self.names[e.v]
            )));
        }
        SignedWeightedGraph::new(self.names.len(), self.edges.clone()).map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Proximity matrix with entries only where an edge exists.
    pub fn proximity(&self) -> Result<ProximityMatrix, CliError> {
        let mut z = ProximityMatrix::absent(self.names.len());
        for e in &self.edges {
            z.set(e.u, e.v, e.w).map_err(|e| CliError::Validation(e.to_string()))?;
        }
        Ok(z)
    }
}

/// Ordered `{cluster-name: [item ids]}` map; order is significant both ways
/// (canonical cluster order on output, layer order for rankings on input).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NamedPartition(pub Vec<(String, Vec<String>)>);

impl NamedPartition {
    /// Name clusters `X1, X2, ...` in the partition's canonical order.
    pub fn from_partition(p: &Partition, names: &[String]) -> Self {
        Self::from_groups(p.clusters(), names)
    }

    pub fn from_groups(groups: &[Vec<usize>], names: &[String]) -> Self {
        NamedPartition(
            groups
                .iter()
                .enumerate()
                .map(|(k, c)| (format!("X{}", k + 1), c.iter().map(|&i| names[i].clone()).collect()))
                .collect(),
        )
    }

    pub fn item_ids(&self) -> Vec<String> {
        let mut v: Vec<String> = self.0.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
        sort_ids(&mut v);
        v
    }

    fn indexed(&self, names: &[String]) -> Result<Vec<Vec<usize>>, CliError> {
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(k, s)| (s.as_str(), k)).collect();
        self.0
            .iter()
            .map(|(cluster, ids)| {
                ids.iter()
                    .map(|s| {
                        index.get(s.as_str()).copied().ok_or_else(|| {
                            CliError::Validation(format!("cluster {cluster:?}: unknown item {s:?}"))
                        })
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_partition(&self, names: &[String]) -> Result<Partition, CliError> {
        let groups = self.indexed(names)?;
        Partition::new(names.len(), groups).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn to_ranking(&self, names: &[String]) -> Result<Ranking, CliError> {
        let groups = self.indexed(names)?;
        Ranking::new(names.len(), groups).map_err(|e| CliError::Validation(e.to_string()))
    }
}

impl Serialize for NamedPartition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for NamedPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Ordered;
        impl<'de> Visitor<'de> for Ordered {
            type Value = NamedPartition;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping cluster names to item id lists")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> Result<NamedPartition, A::Error> {
                let mut out = Vec::new();
                while let Some(k) = a.next_key::<String>()? {
                    let v: Vec<RawId> = a.next_value()?;
                    out.push((k, v.into_iter().map(String::from).collect()));
                }
                Ok(NamedPartition(out))
            }
        }
        d.deserialize_map(Ordered)
    }
}

pub fn load_named(path: &Path) -> Result<NamedPartition, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| invalid(path, e))
}

/// Several partition files over one shared item set.
pub fn load_partitions(paths: &[impl AsRef<Path>]) -> Result<(Vec<String>, Vec<NamedPartition>), CliError> {
    let named: Vec<NamedPartition> = paths.iter().map(|p| load_named(p.as_ref())).collect::<Result<_, _>>()?;
    let Some(first) = named.first() else {
        return Err(CliError::Validation("no partition files given".into()));
    };
    let names = first.item_ids();
    for (p, n) in paths.iter().zip(&named).skip(1) {
        if n.item_ids() != names {
            return Err(invalid(p.as_ref(), "item set differs from the first input"));
        }
    }
    Ok((names, named))
}
