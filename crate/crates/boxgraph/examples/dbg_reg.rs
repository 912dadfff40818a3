// debug binary main
use boxgraph::evaluation::{random_rotation, rre, rte};
use boxgraph::graph::{SemanticGraph, Vertex};
use boxgraph::matching::{MatchPair, MatchSet};
use boxgraph::registration::{ransac_register, RansacParams, RigidTransform};
use nalgebra::{Point3, Vector3};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph_from_points(points: &[Point3<f64>], scan_id: &str) -> SemanticGraph {
    SemanticGraph {
        vertices: points.iter().map(|p| Vertex { centroid: *p, class: 1, feature: [1.0, 1.0, 1.0] }).collect(),
        scan_id: scan_id.into(),
    }
}
fn identity_matches(n: usize) -> MatchSet {
    MatchSet { pairs: (0..n).map(|i| MatchPair { source: i, map: i, similarity: 1.0 }).collect() }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(4096);
    for trial in 0..50u64 {
        let n = rng.random_range(10..=100);
        let n_outliers = (n as f64 * rng.random_range(0.0..0.30)).floor() as usize;
        let truth = RigidTransform::new(
            random_rotation(&mut rng),
            Vector3::new(rng.random_range(-30.0..30.0), rng.random_range(-30.0..30.0), rng.random_range(-5.0..5.0)),
        );
        let src: Vec<Point3<f64>> = (0..n).map(|_| Point3::new(rng.random_range(-25.0..25.0), rng.random_range(-25.0..25.0), rng.random_range(-4.0..4.0))).collect();
        let mut dst: Vec<Point3<f64>> = src.iter().map(|p| truth.apply(p)).collect();
        for d in dst.iter_mut().rev().take(n_outliers) {
            let dir = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)).normalize();
            *d += dir * rng.random_range(10.0..60.0);
        }
        let gs = graph_from_points(&src, "s");
        let gm = graph_from_points(&dst, "m");
        let params = RansacParams { iterations: 2000, seed: trial, ..RansacParams::default() };
        match ransac_register(&identity_matches(n), &gs, &gm, &params) {
            Ok((pose, inliers)) => {
                let e_t = rte(&pose, &truth);
                let e_r = rre(&pose, &truth);
                if e_t >= 1e-6 || e_r >= 1e-6 || inliers.len() != n - n_outliers {
                    println!("trial {trial}: n={n} out={n_outliers} inl={} rte={e_t:.3e} rre={e_r:.3e}", inliers.len());
                }
            }
            Err(e) => println!("trial {trial}: ERR {e}"),
        }
    }
}
