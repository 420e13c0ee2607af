//! Quality metrics checked against brute-force references on random inputs.

mod common;

use graphdr::quality::{
    faithfulness, neighbor_hit, neighborhood_preservation, shape_graph, stress, trustworthiness,
};
use graphdr::{distance_matrix, DataMatrix, Metric, Semantics};
use rand::Rng;

const TOL: f64 = 1e-12;

#[test]
fn shape_graph_matches_brute_force_knn() {
    for seed in 0..5 {
        let mut rng = common::rng(seed);
        let l = common::random_layout(&mut rng, 30, 2, 1.0);
        let expected = common::knn_edge_set(&common::layout_points(&l), 4);
        assert_eq!(common::edge_set(&shape_graph(&l, 4).unwrap()), expected);
    }
}

#[test]
fn faithfulness_matches_set_jaccard() {
    for seed in 0..10 {
        let mut rng = common::rng(100 + seed);
        let a = common::random_graph(&mut rng, 20, 0.3, Semantics::Similarity, false);
        let b = common::random_graph(&mut rng, 20, 0.3, Semantics::Dissimilarity, false);
        let expected = common::jaccard(&common::edge_set(&a), &common::edge_set(&b));
        assert!((faithfulness(&a, &b).unwrap() - expected).abs() < TOL);
    }
}

#[test]
fn stress_matches_brute_force() {
    for seed in 0..5 {
        let mut rng = common::rng(200 + seed);
        let data = common::random_data(&mut rng, 10, 5);
        let l = common::random_layout(&mut rng, 10, 2, 1.0);
        let d = distance_matrix(&data, Metric::Euclidean).unwrap();
        let pts = common::points(&data);
        let dd: Vec<Vec<f64>> = pts.iter().map(|a| pts.iter().map(|b| common::dist(a, b)).collect()).collect();
        let expected = common::kruskal_stress(&common::layout_points(&l), &dd);
        assert!((stress(&l, &d).unwrap() - expected).abs() < TOL);
    }
}

#[test]
fn neighborhood_preservation_matches_brute_force() {
    for seed in 0..5 {
        let mut rng = common::rng(300 + seed);
        let data = common::random_data(&mut rng, 25, 6);
        let l = common::random_layout(&mut rng, 25, 2, 1.0);
        let expected = common::neighborhood_preservation(&common::points(&data), &common::layout_points(&l), 5);
        assert!((neighborhood_preservation(&data, &l, 5).unwrap() - expected).abs() < TOL);
    }
}

#[test]
fn trustworthiness_matches_brute_force() {
    for seed in 0..5 {
        let mut rng = common::rng(400 + seed);
        let data = common::random_data(&mut rng, 20, 6);
        let l = common::random_layout(&mut rng, 20, 2, 1.0);
        for k in [1, 3, 5] {
            let expected = common::trustworthiness(&common::points(&data), &common::layout_points(&l), k);
            assert!((trustworthiness(&data, &l, k).unwrap() - expected).abs() < TOL, "k={k}");
        }
    }
}

#[test]
fn neighbor_hit_matches_brute_force() {
    let mut rng = common::rng(500);
    let l = common::random_layout(&mut rng, 30, 2, 1.0);
    let labels: Vec<i64> = (0..30).map(|_| rng.random_range(0..3)).collect();
    let expected = common::neighbor_hit(&common::layout_points(&l), &labels, 4);
    assert!((neighbor_hit(&l, Some(&labels), 4).unwrap() - expected).abs() < TOL);
}

#[test]
fn random_binary_labels_hit_about_half() {
    let mut rng = common::rng(501);
    let l = common::random_layout(&mut rng, 2000, 2, 1.0);
    let labels: Vec<i64> = (0..2000).map(|_| rng.random_range(0..2)).collect();
    let h = neighbor_hit(&l, Some(&labels), 10).unwrap();
    assert!((h - 0.5).abs() < 0.03, "{h}");
}

#[test]
fn separated_clusters_score_perfectly() {
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    let mut rng = common::rng(502);
    for c in 0..3 {
        for _ in 0..15 {
            rows.push(vec![100.0 * c as f64 + rng.random::<f64>(), rng.random::<f64>()]);
            labels.push(c);
        }
    }
    let data = DataMatrix::from_rows(&rows).unwrap();
    let l = graphdr::Layout::new(45, 2, data.values().to_vec()).unwrap();
    assert_eq!(neighbor_hit(&l, Some(&labels), 5).unwrap(), 1.0);
}
