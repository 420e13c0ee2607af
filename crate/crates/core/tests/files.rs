//! File formats and the end-to-end pipeline.

mod common;

use graphdr::io::{
    load_csv, parse_graph, parse_layout, read_graph, read_layout, render_svg, write_graph, write_layout, Coloring,
    LabelColumn,
};
use graphdr::pipeline::{run_pipeline, PipelineConfig};
use graphdr::{ErrorKind, Semantics};
use std::path::Path;

#[test]
fn graph_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (seed, sem) in [(1, Semantics::Similarity), (2, Semantics::Dissimilarity), (3, Semantics::Probability)] {
        let mut rng = common::rng(seed);
        let g = common::random_graph(&mut rng, 40, 0.2, sem, false);
        let p = dir.path().join(format!("g{seed}.graph"));
        write_graph(&g, &p).unwrap();
        assert_eq!(read_graph(&p).unwrap(), g);
    }
}

#[test]
fn layout_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for dim in [2, 3] {
        let mut rng = common::rng(dim as u64);
        let l = common::random_layout(&mut rng, 50, dim, 1e3);
        let p = dir.path().join(format!("l{dim}.csv"));
        write_layout(&l, &p).unwrap();
        assert_eq!(read_layout(&p, Some(dim)).unwrap(), l);
        assert!(read_layout(&p, Some(5 - dim)).is_err());
    }
}

#[test]
fn malformed_files_report_their_line() {
    let p = Path::new("bad.graph");
    let e = parse_graph("#graphdr v1 N=3 semantics=similarity\n0\t1\t0.5\n1\t1\t0.2\n", p).unwrap_err();
    assert_eq!(e.kind(), ErrorKind::Data);
    assert!(e.to_string().contains('3'), "{e}");
    let e = parse_layout("x,y\n0,1\n2\n", Path::new("bad.csv"), None).unwrap_err();
    assert_eq!(e.kind(), ErrorKind::Data);
}

#[test]
fn digits_fixture_loads_with_labels() {
    let d = load_csv(&common::workspace_file("data/digits_200.csv"), true, Some(&LabelColumn::Name("class".into()))).unwrap();
    assert_eq!((d.n_rows(), d.n_cols()), (200, 64));
    assert_eq!(d.labels().unwrap()[..3], [0, 1, 2]);
}

#[test]
fn svg_has_one_circle_per_point() {
    let mut rng = common::rng(7);
    let l = common::random_layout(&mut rng, 12, 2, 1.0);
    let labels: Vec<i64> = (0..12).map(|i| i % 2).collect();
    let svg = render_svg(&l, Coloring::Labels(&labels)).unwrap();
    // two extra circles in the legend
    assert_eq!(svg.matches("<circle").count(), 14);
}

fn write_planar_csv(path: &Path) {
    let mut rng = common::rng(8);
    let l = common::random_layout(&mut rng, 40, 2, 5.0);
    let mut text = String::from("a,b\n");
    for i in 0..40 {
        let p = l.point(i);
        text.push_str(&format!("{},{}\n", p[0], p[1]));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn identity_pipeline_is_perfectly_faithful() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("plane.csv");
    write_planar_csv(&csv);
    let config = format!(
        r#"input = "{}"
[relate]
recipe = "knn"
k = 6
[embed]
method = "none"
[quality]
metrics = ["faithfulness", "trustworthiness", "stress"]
k = 6
[output]
report = "{}"
"#,
        csv.display(),
        dir.path().join("report.json").display()
    );
    let out = run_pipeline(PipelineConfig::from_toml(&config).unwrap()).unwrap();
    assert_eq!(out.report.metrics["faithfulness"], 1.0);
    assert_eq!(out.report.metrics["trustworthiness"], 1.0);
    assert!(out.report.metrics["stress"] < 1e-12);
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let keys: Vec<&String> = report.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["config", "metrics", "per_node", "timings_ms"]);
}

#[test]
fn pipeline_rejects_mismatched_stages() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("plane.csv");
    write_planar_csv(&csv);
    // sammon needs a complete dissimilarity graph, knn is neither
    let config = format!("input = \"{}\"\n[relate]\nrecipe = \"knn\"\n[embed]\nmethod = \"sammon\"\n", csv.display());
    let e = run_pipeline(PipelineConfig::from_toml(&config).unwrap()).unwrap_err();
    assert_eq!(e.kind(), ErrorKind::Config);
}
