//! Cross-module properties: serialization round-trips, score invariances,
//! direction symmetry, and end-to-end separability of synthetic scenes.

use boxgraph::evaluation::{synth_pair, PairNoise, SceneParams};
use boxgraph::graph::{self, SemanticGraph, Vertex};
use boxgraph::matching::{MatchPair, MatchSet};
use boxgraph::registration::RansacParams;
use boxgraph::scoring::{graph_similarity, match_graphs};
use boxgraph::skitti_io;
use nalgebra::{Point3, Vector3};
use proptest::prelude::*;

fn f32_coord() -> impl Strategy<Value = f64> {
    (-1000i32..1000i32, 0u8..4u8).prop_map(|(w, frac)| {
        // Exactly representable in f32: integer plus a small dyadic part.
        w as f64 + frac as f64 * 0.25
    })
}

fn arb_vertex() -> impl Strategy<Value = Vertex> {
    (
        f32_coord(),
        f32_coord(),
        f32_coord(),
        0u32..200u32,
        f32_coord().prop_map(|v| v.abs()),
        f32_coord().prop_map(|v| v.abs()),
        f32_coord().prop_map(|v| v.abs()),
    )
        .prop_map(|(x, y, z, class, h, w, d)| Vertex {
            centroid: Point3::new(x, y, z),
            class,
            feature: [h, w, d],
        })
}

fn arb_graph(max_vertices: usize) -> impl Strategy<Value = SemanticGraph> {
    (
        proptest::collection::vec(arb_vertex(), 0..=max_vertices),
        "[a-z0-9]{0,12}",
    )
        .prop_map(|(vertices, scan_id)| SemanticGraph { vertices, scan_id })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bxg_roundtrip_is_identity(g in arb_graph(238)) {
        let bytes = graph::serialize(&g);
        let back = graph::deserialize(&bytes).unwrap();
        prop_assert_eq!(&back, &g);
        // Byte-level identity in the other direction too.
        prop_assert_eq!(graph::serialize(&back), bytes);
    }

    #[test]
    fn bin_roundtrip_is_bit_exact(coords in proptest::collection::vec((f32_coord(), f32_coord(), f32_coord()), 0..100)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.bin");
        let points: Vec<Point3<f64>> = coords.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect();
        skitti_io::write_point_cloud(&path, &points).unwrap();
        let back = skitti_io::read_point_cloud(&path).unwrap();
        prop_assert_eq!(back, points);
    }

    #[test]
    fn filter_is_idempotent(
        labels in proptest::collection::vec(0u32..6, 0..80),
        allowlist in proptest::collection::vec(0u32..6, 0..6),
    ) {
        let points: Vec<Point3<f64>> = (0..labels.len())
            .map(|i| Point3::new(i as f64, 0.0, 0.0))
            .collect();
        let once = skitti_io::attach_and_filter(&points, &labels, &allowlist).unwrap();
        let twice = skitti_io::attach_and_filter(&once.points, &once.labels, &allowlist).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert!(once.labels.iter().all(|l| allowlist.contains(l)));
    }
}

fn translate(g: &SemanticGraph, shift: Vector3<f64>) -> SemanticGraph {
    SemanticGraph {
        vertices: g
            .vertices
            .iter()
            .map(|v| Vertex {
                centroid: v.centroid + shift,
                class: v.class,
                feature: v.feature,
            })
            .collect(),
        scan_id: format!("{}-shifted", g.scan_id),
    }
}

/// Graph on an integer grid so that translated centroids stay exactly
/// representable and distance arithmetic is reproduced bit for bit.
fn integer_graph() -> SemanticGraph {
    let mut vertices = Vec::new();
    let coords = [
        (0.0, 0.0, 0.0),
        (8.0, 0.0, 1.0),
        (0.0, 9.0, 0.0),
        (12.0, 7.0, 2.0),
        (3.0, 15.0, 1.0),
        (20.0, 4.0, 0.0),
    ];
    for (i, &(x, y, z)) in coords.iter().enumerate() {
        vertices.push(Vertex {
            centroid: Point3::new(x, y, z),
            class: (i % 3) as u32,
            feature: [1.0 + i as f64, 2.0, 3.0],
        });
    }
    SemanticGraph {
        vertices,
        scan_id: "grid".into(),
    }
}

#[test]
fn score_is_exactly_translation_invariant_on_integer_data() {
    // Integer centroids and integer shifts make the float arithmetic exact,
    // so the invariance holds with equality, not just within tolerance.
    let g = integer_graph();
    let params = RansacParams {
        iterations: 400,
        seed: 9,
        ..RansacParams::default()
    };
    let same = match_graphs(&g, &g, &params, 1.0);
    for shift in [
        Vector3::new(5.0, 0.0, 0.0),
        Vector3::new(-17.0, 33.0, 2.0),
        Vector3::new(1024.0, -512.0, 64.0),
    ] {
        let moved = translate(&g, shift);
        let result = match_graphs(&g, &moved, &params, 1.0);
        assert_eq!(result.similarity, same.similarity, "shift {shift:?}");
        assert_eq!(result.inliers.len(), g.len());
    }
}

#[test]
fn score_is_translation_invariant_within_rounding_on_general_data() {
    let scene = SceneParams {
        n_vertices: 30,
        ..SceneParams::default()
    };
    let (g, _, _) = synth_pair(5, &scene, &PairNoise::default()).unwrap();
    let params = RansacParams {
        iterations: 600,
        seed: 2,
        ..RansacParams::default()
    };
    let base = match_graphs(&g, &g, &params, 1.0).similarity;
    let moved = translate(&g, Vector3::new(0.37, -4.21, 1.99));
    let shifted = match_graphs(&g, &moved, &params, 1.0).similarity;
    assert!((base - shifted).abs() / base < 1e-9);
}

#[test]
fn omega_grows_by_at_least_one_per_perfect_match() {
    let g = integer_graph();
    let full: Vec<MatchPair> = (0..g.len())
        .map(|i| MatchPair {
            source: i,
            map: i,
            similarity: 1.0,
        })
        .collect();
    let mut prev = 0.0;
    for k in 1..=g.len() {
        let set = MatchSet {
            pairs: full[..k].to_vec(),
        };
        let score = graph_similarity(&g, &g, &set);
        assert!(
            score >= prev + 1.0 - 1e-12,
            "k={k}: {score} vs previous {prev}"
        );
        prev = score;
    }
}

#[test]
fn matching_directions_are_inverse_and_equally_scored() {
    for seed in 0..12u64 {
        let scene = SceneParams {
            n_vertices: 25,
            ..SceneParams::default()
        };
        let (gs, gm, _) = synth_pair(seed, &scene, &PairNoise::default()).unwrap();
        let params = RansacParams {
            iterations: 800,
            seed: 4242,
            ..RansacParams::default()
        };
        let forward = match_graphs(&gs, &gm, &params, 1.0);
        let backward = match_graphs(&gm, &gs, &params, 1.0);

        let tf = forward.pose.expect("forward must register");
        let tb = backward.pose.expect("backward must register");
        let composed = tf.compose(&tb);
        let probe = Point3::new(3.0, -7.0, 2.0);
        assert!((composed.apply(&probe) - probe).norm() < 1e-6, "seed {seed}");
        assert!(
            (forward.similarity - backward.similarity).abs() / forward.similarity < 1e-9,
            "seed {seed}"
        );
    }
}

#[test]
fn true_pairs_outscore_cross_scene_pairs() {
    // End-to-end separability: with 10 cm centroid noise, 20 % dropout and
    // 20 % distractors, the lowest true-pair score stays above the highest
    // cross-scene score.
    let scene = SceneParams {
        n_vertices: 60,
        ..SceneParams::default()
    };
    let noise = PairNoise {
        sigma_c: 0.1,
        sigma_f: 0.02,
        dropout: 0.2,
        distractors: 0.2,
    };
    let params = RansacParams {
        iterations: 1500,
        seed: 31337,
        ..RansacParams::default()
    };

    let trials = 50;
    let pairs: Vec<_> = (0..trials)
        .map(|t| synth_pair(t as u64, &scene, &noise).unwrap())
        .collect();

    let mut min_true = f64::INFINITY;
    let mut max_cross = f64::NEG_INFINITY;
    for t in 0..trials {
        let (gs, gm, _) = &pairs[t];
        min_true = min_true.min(match_graphs(gs, gm, &params, 1.0).similarity);
        for offset in [1, 17, 29] {
            let (_, other_map, _) = &pairs[(t + offset) % trials];
            max_cross = max_cross.max(match_graphs(gs, other_map, &params, 1.0).similarity);
        }
    }
    assert!(
        min_true > max_cross,
        "separation failed: min true {min_true} vs max cross {max_cross}"
    );
}
