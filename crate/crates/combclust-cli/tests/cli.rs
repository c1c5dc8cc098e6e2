use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use combclust_cli::io::{load_dataset, load_graph};
use combclust_cli::report::{Outcome, Report};
use combclust::ParamKind;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_combclust"));
    for a in args {
        // Bare fixture names resolve to the fixtures directory.
        let p = fixture(a);
        if !a.starts_with('-') && p.exists() {
            cmd.arg(p);
        } else {
            cmd.arg(a);
        }
    }
    cmd.output().unwrap()
}

fn report(args: &[&str]) -> (Report, String) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    (Report::from_json(&text).unwrap(), text)
}

fn clusters(r: &Report) -> Vec<Vec<String>> {
    r.partition.as_ref().unwrap().0.iter().map(|(_, ids)| ids.clone()).collect()
}

fn ids(groups: &[&[u32]]) -> Vec<Vec<String>> {
    groups.iter().map(|g| g.iter().map(|i| i.to_string()).collect()).collect()
}

#[test]
fn balanced_clusters_from_sparse_graph() {
    let (r, _) = report(&["cluster", "--config", "balanced.toml", "--graph", "sparse_tree.edges"]);
    assert_eq!(clusters(&r), ids(&[&[1, 4, 5], &[2, 6, 7], &[3, 9, 10], &[8, 13, 14], &[11], &[12]]));
    let Outcome::Balanced(b) = &r.result else { panic!("{:?}", r.result) };
    assert_eq!(b.trace.events.len(), 8);
}

#[test]
fn correlation_clusters_and_objective() {
    let (r, _) = report(&["cluster", "--config", "correlation.toml", "--graph", "signed.edges"]);
    assert_eq!(clusters(&r), ids(&[&[1, 3, 4, 8], &[2, 6, 7, 11], &[5, 9, 10]]));
    let c = r.quality.correlation.unwrap();
    assert!((c.disagreement + 10.0).abs() < 1e-9 && (c.agreement - 22.5).abs() < 1e-9);
    let Outcome::Correlation(t) = &r.result else { panic!() };
    assert_eq!(t.trace.len(), 8);
}

#[test]
fn consensus_reports_per_input_costs() {
    let (r, _) = report(&[
        "consensus", "--config", "consensus.toml",
        "--input", "partition_a.json", "--input", "partition_b.json", "--input", "partition_c.json",
    ]);
    let Outcome::Consensus(c) = &r.result else { panic!() };
    assert_eq!(c.costs, vec![1, 2, 0]);
    assert_eq!(clusters(&r), ids(&[&[1, 2], &[3, 4], &[5, 6, 7]]));
}

#[test]
fn compare_and_restructure() {
    let (r, _) = report(&["compare", "--input", "partition_a.json", "--input", "partition_b.json"]);
    let Outcome::EditCost(t) = &r.result else { panic!() };
    assert_eq!(t.cost, 3);

    let (r, _) = report(&[
        "restructure", "--config", "restructure.toml",
        "--input", "restructure_from.json", "--input", "restructure_to.json",
    ]);
    assert_eq!(clusters(&r), ids(&[&[1, 2, 3], &[4, 5, 6, 9], &[7, 8]]));
}

#[test]
fn assign_and_schedule() {
    let (r, _) = report(&["assign", "--config", "access_points.toml", "--input", "access_points.json"]);
    let Outcome::AccessPoint(a) = &r.result else { panic!() };
    assert_eq!(a.assignment.len(), 14);
    let placed: usize = clusters(&r).iter().map(Vec::len).sum();
    assert_eq!(placed + a.unassigned.len(), 14);

    let (r, _) = report(&["schedule", "--config", "schedule.toml", "--input", "beams.csv"]);
    let mut all: Vec<String> = clusters(&r).concat();
    all.sort();
    assert_eq!(all, ids(&[&[1, 2, 3, 4, 5, 6, 7]]).concat());
}

#[test]
fn json_report_round_trips_and_is_deterministic() {
    let args = ["cluster", "--config", "students.toml", "--input", "students.csv"];
    let (r1, text1) = report(&args);
    assert_eq!(r1.to_json().trim_end(), text1.trim_end());
    let (r2, _) = report(&args);
    let strip = |mut r: Report| {
        r.generated_at = None;
        r.to_json()
    };
    assert_eq!(strip(r1.clone()), strip(r2));
    assert!(r1.quality.intra.is_some() && r1.quality.balance.is_some());
}

#[test]
fn trace_serialized_in_event_order() {
    let (r, text) = report(&["cluster", "--config", "balanced.toml", "--graph", "sparse_tree.edges"]);
    let Outcome::Balanced(b) = &r.result else { panic!() };
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let values: Vec<f64> =
        v["result"]["detail"]["trace"]["events"].as_array().unwrap().iter().map(|e| e["value"].as_f64().unwrap()).collect();
    assert_eq!(values, b.trace.events.iter().map(|e| e.value).collect::<Vec<_>>());
}

#[test]
fn output_file_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let o = run(&[
        "compare", "--input", "partition_a.json", "--input", "partition_b.json",
        "--format", "text", "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(out).unwrap().contains("edit cost: 3"));
}

#[test]
fn modularity_quality_has_cluster_terms() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.edges");
    std::fs::write(&graph, "1 2\n2 3\n1 3\n4 5\n5 6\n4 6\n3 4\n").unwrap();
    let part = dir.path().join("p.json");
    std::fs::write(&part, r#"{"X1":[1,2,3],"X2":[4,5,6]}"#).unwrap();
    let cfg = dir.path().join("q.toml");
    std::fs::write(&cfg, "[quality]\nmeasures = [\"modularity\"]\nmodularity_form = \"standard\"\n").unwrap();
    let (r, _) = report(&[
        "quality", "--config", cfg.to_str().unwrap(), "--input", part.to_str().unwrap(), "--graph", graph.to_str().unwrap(),
    ]);
    let m = r.quality.modularity.unwrap();
    assert_eq!(m.clusters.len(), 2);
    assert!((m.clusters[0].e - 3.0 / 7.0).abs() < 1e-12);
    assert!((m.q - (2.0 * (3.0 / 7.0 - 0.25))).abs() < 1e-12);
}

#[test]
fn empty_graph_gives_empty_partition_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("empty.edges");
    std::fs::write(&g, "").unwrap();
    let (r, _) = report(&["cluster", "--graph", g.to_str().unwrap()]);
    assert_eq!(r.partition.unwrap().0.len(), 0);
    assert!(!r.warnings.is_empty());
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_cfg = dir.path().join("bad.toml");
    std::fs::write(&bad_cfg, "[cluster]\nmax_sise = 3\n").unwrap();
    assert_eq!(run(&["cluster", "--config", bad_cfg.to_str().unwrap(), "--graph", "sparse_tree.edges"]).status.code(), Some(2));
    let loop_graph = dir.path().join("loop.edges");
    std::fs::write(&loop_graph, "a a 1\n").unwrap();
    assert_eq!(run(&["cluster", "--graph", loop_graph.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["compare", "--input", "partition_a.json"]).status.code(), Some(2));
    assert_eq!(run(&["cluster"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn infeasible_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("split.edges");
    std::fs::write(&g, "1 2 0.5\n3 4 0.5\n").unwrap();
    let out = run(&["cluster", "--config", "spanning_tree.toml", "--graph", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    let inst = dir.path().join("tight.json");
    std::fs::write(&inst, r#"{"estimates":[[[1,0,0]],[[0,1,0]]],"caps":[1]}"#).unwrap();
    let cfg = dir.path().join("m.toml");
    std::fs::write(&cfg, "[assign]\nkind = \"multiset\"\n").unwrap();
    let out = run(&["assign", "--config", cfg.to_str().unwrap(), "--input", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fixture_loaders() {
    let d = load_dataset(&fixture("students.csv"), &["C1", "C2", "C3", "C4", "C5"].map(String::from)).unwrap();
    assert_eq!((d.len(), d.dim()), (14, 5));
    assert!(d.kinds().iter().all(|k| *k == ParamKind::Ordinal));
    let g = load_graph(&fixture("signed.edges")).unwrap();
    assert_eq!((g.names.len(), g.edges.len()), (11, 55));
}
