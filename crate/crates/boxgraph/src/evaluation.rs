//! Place-recognition and pose-error evaluation protocol.
//!
//! Pairs are labelled from ground-truth poses (positives within 3 m, more
//! than 50 frames apart; negatives beyond 20 m, sampled at 100× the
//! positive count), scored with the full matching pipeline, and reduced to
//! precision–recall aggregates plus translation/rotation error quartiles.

use nalgebra::Point3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{SemanticGraph, Vertex};
use crate::registration::{RansacParams, RigidTransform};
use crate::scoring::match_graphs;
use crate::skitti_io::PoseRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairLabel {
    Positive,
    Negative,
}

impl PairLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairLabel::Positive => "pos",
            PairLabel::Negative => "neg",
        }
    }
}

/// One evaluation pair: scan indices, ground-truth label, and (after
/// scoring) the similarity plus pose error for positives.
#[derive(Debug, Clone)]
pub struct LabeledPair {
    pub scan_s: usize,
    pub scan_m: usize,
    pub label: PairLabel,
    pub score: Option<f64>,
    /// `(RTE metres, RRE degrees)`, present for scored pairs with both a
    /// recovered pose and ground truth.
    pub pose_error: Option<(f64, f64)>,
}

/// Protocol constants for pair generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct PairProtocol {
    /// Positive pairs lie within this ground-truth distance (metres).
    pub pos_radius: f64,
    /// Negative pairs lie beyond this distance (metres).
    pub neg_radius: f64,
    /// Pairs closer than this many frames are excluded.
    pub frame_gap: usize,
    /// Negatives sampled per positive.
    pub neg_ratio: usize,
}

impl Default for PairProtocol {
    fn default() -> Self {
        Self {
            pos_radius: 3.0,
            neg_radius: 20.0,
            frame_gap: 50,
            neg_ratio: 100,
        }
    }
}

/// Generates labelled pairs from ground-truth poses.
///
/// Positives are all pairs within `pos_radius` and more than `frame_gap`
/// frames apart; negatives are `neg_ratio` times as many, sampled uniformly
/// without replacement (seeded) from the pairs beyond `neg_radius`.
pub fn build_pairs(
    poses: &[PoseRecord],
    proto: &PairProtocol,
    seed: u64,
) -> Result<Vec<LabeledPair>> {
    let mut positives = Vec::new();
    let mut negative_candidates = Vec::new();
    for i in 0..poses.len() {
        for j in i + 1..poses.len() {
            let gap = poses[j].index.abs_diff(poses[i].index);
            if gap <= proto.frame_gap {
                continue;
            }
            let dist = (poses[i].transform.translation - poses[j].transform.translation).norm();
            if dist <= proto.pos_radius {
                positives.push((i, j));
            } else if dist > proto.neg_radius {
                negative_candidates.push((i, j));
            }
        }
    }

    let required = proto.neg_ratio * positives.len();
    if negative_candidates.len() < required {
        return Err(Error::InsufficientNegatives {
            required,
            available: negative_candidates.len(),
        });
    }

    let mut pairs: Vec<LabeledPair> = positives
        .into_iter()
        .map(|(s, m)| LabeledPair {
            scan_s: s,
            scan_m: m,
            label: PairLabel::Positive,
            score: None,
            pose_error: None,
        })
        .collect();

    if required > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chosen =
            rand::seq::index::sample(&mut rng, negative_candidates.len(), required).into_vec();
        pairs.extend(chosen.into_iter().map(|k| {
            let (s, m) = negative_candidates[k];
            LabeledPair {
                scan_s: s,
                scan_m: m,
                label: PairLabel::Negative,
                score: None,
                pose_error: None,
            }
        }));
    }

    pairs.sort_unstable_by_key(|p| (p.scan_s, p.scan_m));
    Ok(pairs)
}

/// One threshold of a precision–recall sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub tp: usize,
    pub fp: usize,
}

/// A precision–recall curve over all distinct score thresholds, sorted by
/// descending threshold (recall non-decreasing along the list).
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Sweeps the decision threshold over all distinct scores. Each input is a
/// `(score, is_positive)` pair; a pair is predicted positive at threshold t
/// when its score is ≥ t.
pub fn pr_curve(scored: &[(f64, bool)]) -> Result<PrCurve> {
    let n_pos = scored.iter().filter(|(_, p)| *p).count();
    if n_pos == 0 {
        return Err(Error::NoPositives);
    }
    let n_neg = scored.len() - n_pos;

    let mut sorted: Vec<(f64, bool)> = scored.to_vec();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].0;
        // Consume every pair sharing this score: they are all predicted
        // positive at this threshold.
        while i < sorted.len() && sorted[i].0 == threshold {
            if sorted[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / n_pos as f64,
            tp,
            fp,
        });
    }

    Ok(PrCurve {
        points,
        n_pos,
        n_neg,
    })
}

impl PrCurve {
    /// Maximum F₁ = 2PR/(P+R) over all thresholds.
    pub fn max_f1(&self) -> f64 {
        self.f_beta(1.0)
    }

    /// Maximum F_β = (1+β²)PR/(β²P+R) over all thresholds.
    pub fn f_beta(&self, beta: f64) -> f64 {
        let b2 = beta * beta;
        self.points
            .iter()
            .map(|p| {
                let denom = b2 * p.precision + p.recall;
                if denom > 0.0 {
                    (1.0 + b2) * p.precision * p.recall / denom
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    }

    /// R₁: the largest recall among thresholds with precision exactly 1
    /// (no false positives); 0 when no such threshold exists.
    pub fn recall_at_full_precision(&self) -> f64 {
        self.points
            .iter()
            .filter(|p| p.fp == 0)
            .map(|p| p.recall)
            .fold(0.0, f64::max)
    }

    /// AP = Σ_n (R_n − R_{n−1})·P_n over the descending-threshold sweep.
    pub fn average_precision(&self) -> f64 {
        let mut prev_recall = 0.0;
        let mut ap = 0.0;
        for p in &self.points {
            ap += (p.recall - prev_recall) * p.precision;
            prev_recall = p.recall;
        }
        ap
    }

    /// EP = ½(R₁ + P₀), with P₀ the precision at the highest threshold
    /// (the recall → 0 limit of the sweep).
    pub fn extended_precision(&self) -> f64 {
        let p0 = self.points.first().map_or(0.0, |p| p.precision);
        0.5 * (self.recall_at_full_precision() + p0)
    }
}

/// Relative translation error `‖t − t*‖₂` in metres.
pub fn rte(t: &RigidTransform, t_star: &RigidTransform) -> f64 {
    (t.translation - t_star.translation).norm()
}

/// Relative rotation error `cos⁻¹((Tr(Rᵀ R*) − 1)/2)` in degrees; the arccos
/// argument is clamped to [−1, 1].
pub fn rre(t: &RigidTransform, t_star: &RigidTransform) -> f64 {
    let trace = (t.rotation.transpose() * t_star.rotation).trace();
    let arg = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0);
    arg.acos().to_degrees()
}

/// Parameters for synthetic scene generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub n_vertices: usize,
    pub n_classes: usize,
    /// Side length of the cubic workspace the centroids are drawn from.
    pub extent: f64,
    /// Bounding-box extents are drawn uniformly from this range.
    pub feature_range: (f64, f64),
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            n_vertices: 50,
            n_classes: 6,
            extent: 40.0,
            feature_range: (0.3, 6.0),
        }
    }
}

/// Noise model applied to the map-side copy of a synthetic pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairNoise {
    /// Std-dev of isotropic Gaussian noise on transformed centroids (metres).
    pub sigma_c: f64,
    /// Std-dev of Gaussian jitter on the bounding-box extents.
    pub sigma_f: f64,
    /// Probability of dropping each vertex from the map copy.
    pub dropout: f64,
    /// Distractor vertices injected into the map copy, as a fraction of the
    /// source vertex count.
    pub distractors: f64,
}

impl Default for PairNoise {
    fn default() -> Self {
        Self {
            sigma_c: 0.0,
            sigma_f: 0.0,
            dropout: 0.0,
            distractors: 0.0,
        }
    }
}

/// Deterministic random scene: uniform centroids, classes and features.
pub fn synth_scene(seed: u64, params: &SceneParams) -> Result<SemanticGraph> {
    if params.n_vertices < 3 {
        return Err(Error::DegenerateScene(format!(
            "need at least 3 vertices, got {}",
            params.n_vertices
        )));
    }
    if !(params.extent > 0.0) || !(params.feature_range.1 >= params.feature_range.0) {
        return Err(Error::DegenerateScene("nonpositive workspace extents".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = (0..params.n_vertices)
        .map(|_| random_vertex(&mut rng, params))
        .collect();
    Ok(SemanticGraph {
        vertices,
        scan_id: format!("synth-{seed}"),
    })
}

fn random_vertex(rng: &mut ChaCha8Rng, params: &SceneParams) -> Vertex {
    let half = params.extent / 2.0;
    let (lo, hi) = params.feature_range;
    Vertex {
        centroid: Point3::new(
            rng.random_range(-half..half),
            rng.random_range(-half..half),
            rng.random_range(-half..half),
        ),
        class: rng.random_range(0..params.n_classes) as u32,
        feature: [
            rng.random_range(lo..hi),
            rng.random_range(lo..hi),
            rng.random_range(lo..hi),
        ],
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniformly random rotation from a normalized Gaussian quaternion.
pub fn random_rotation(rng: &mut ChaCha8Rng) -> nalgebra::Matrix3<f64> {
    let coords: [f64; 4] = std::array::from_fn(|_| normal(rng));
    let q = nalgebra::Quaternion::new(coords[0], coords[1], coords[2], coords[3]);
    nalgebra::UnitQuaternion::from_quaternion(q)
        .to_rotation_matrix()
        .into_inner()
}

/// Generates a source scene and a noisy rigidly-moved map copy.
///
/// The map graph carries the source centroids through a random ground-truth
/// transform with per-vertex Gaussian noise, feature jitter, vertex dropout
/// and injected distractor vertices; the transform is returned as truth.
/// Fully deterministic per seed.
pub fn synth_pair(
    seed: u64,
    scene: &SceneParams,
    noise: &PairNoise,
) -> Result<(SemanticGraph, SemanticGraph, RigidTransform)> {
    let source = synth_scene(seed, scene)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);

    let truth = RigidTransform::new(
        random_rotation(&mut rng),
        nalgebra::Vector3::new(
            rng.random_range(-scene.extent..scene.extent),
            rng.random_range(-scene.extent..scene.extent),
            rng.random_range(-scene.extent..scene.extent),
        ),
    );

    let mut map_vertices = Vec::new();
    for v in &source.vertices {
        if rng.random_range(0.0..1.0) < noise.dropout {
            continue;
        }
        let jitter = nalgebra::Vector3::new(
            noise.sigma_c * normal(&mut rng),
            noise.sigma_c * normal(&mut rng),
            noise.sigma_c * normal(&mut rng),
        );
        let feature = std::array::from_fn(|k| {
            (v.feature[k] + noise.sigma_f * normal(&mut rng)).max(0.0)
        });
        map_vertices.push(Vertex {
            centroid: truth.apply(&v.centroid) + jitter,
            class: v.class,
            feature,
        });
    }
    if map_vertices.is_empty() {
        return Err(Error::DegenerateScene("all vertices dropped".into()));
    }

    let n_distractors = (noise.distractors * source.len() as f64).round() as usize;
    for _ in 0..n_distractors {
        let v = random_vertex(&mut rng, scene);
        map_vertices.push(Vertex {
            centroid: truth.apply(&v.centroid),
            class: v.class,
            feature: v.feature,
        });
    }

    // Shuffle so vertex order carries no correspondence information.
    for i in (1..map_vertices.len()).rev() {
        let j = rng.random_range(0..=i);
        map_vertices.swap(i, j);
    }

    let map = SemanticGraph {
        vertices: map_vertices,
        scan_id: format!("synth-{seed}-map"),
    };
    Ok((source, map, truth))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Place,
    Pose,
    Both,
}

/// Derives a per-pair seed from the root seed and the pair ids.
pub fn pair_seed(root: u64, scan_s: usize, scan_m: usize) -> u64 {
    root ^ splitmix64(((scan_s as u64) << 32) | (scan_m as u64 & 0xFFFF_FFFF))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Scores every pair with the full matching pipeline. `graphs` is indexed
/// by scan index, aligned with `poses`. Pair scoring runs on the current
/// rayon pool; output order is the input order.
pub fn score_pairs(
    graphs: &[SemanticGraph],
    poses: &[PoseRecord],
    pairs: &[LabeledPair],
    ransac: &RansacParams,
    tau: f64,
    root_seed: u64,
    mode: EvalMode,
) -> Vec<LabeledPair> {
    assert_eq!(graphs.len(), poses.len());
    pairs
        .par_iter()
        .map(|pair| {
            let params = ransac.with_seed(pair_seed(root_seed, pair.scan_s, pair.scan_m));
            let result = match_graphs(&graphs[pair.scan_s], &graphs[pair.scan_m], &params, tau);
            let pose_error = match (mode, &result.pose) {
                (EvalMode::Place, _) | (_, None) => None,
                (_, Some(pose)) => {
                    let truth = poses[pair.scan_m]
                        .transform
                        .inverse()
                        .compose(&poses[pair.scan_s].transform);
                    Some((rte(pose, &truth), rre(pose, &truth)))
                }
            };
            LabeledPair {
                score: Some(result.similarity),
                pose_error,
                ..pair.clone()
            }
        })
        .collect()
}

/// Aggregate metrics over a scored pair list.
#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ep: Option<f64>,
    /// `[Q1, median, Q3]` of the translation error over positives with a
    /// recovered pose, metres.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rte_quartiles: Option<[f64; 3]>,
    /// `[Q1, median, Q3]` of the rotation error, degrees.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rre_quartiles: Option<[f64; 3]>,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Reduces scored pairs to the metrics report. PR aggregates need at least
/// one positive; β is required whenever PR aggregates are produced.
pub fn metrics_report(
    pairs: &[LabeledPair],
    beta: Option<f64>,
    mode: EvalMode,
) -> Result<MetricsReport> {
    let n_pos = pairs.iter().filter(|p| p.label == PairLabel::Positive).count();
    let n_neg = pairs.len() - n_pos;

    let mut report = MetricsReport {
        max_f1: None,
        f_beta: None,
        beta: None,
        r1: None,
        ap: None,
        ep: None,
        rte_quartiles: None,
        rre_quartiles: None,
        n_pos,
        n_neg,
    };

    if mode != EvalMode::Pose {
        let scored: Vec<(f64, bool)> = pairs
            .iter()
            .map(|p| {
                (
                    p.score.expect("pairs must be scored before aggregation"),
                    p.label == PairLabel::Positive,
                )
            })
            .collect();
        let curve = pr_curve(&scored)?;
        report.max_f1 = Some(curve.max_f1());
        if let Some(beta) = beta {
            report.f_beta = Some(curve.f_beta(beta));
            report.beta = Some(beta);
        }
        report.r1 = Some(curve.recall_at_full_precision());
        report.ap = Some(curve.average_precision());
        report.ep = Some(curve.extended_precision());
    }

    if mode != EvalMode::Place {
        let mut rtes = Vec::new();
        let mut rres = Vec::new();
        for p in pairs.iter().filter(|p| p.label == PairLabel::Positive) {
            if let Some((t, r)) = p.pose_error {
                rtes.push(t);
                rres.push(r);
            }
        }
        report.rte_quartiles = quartiles(&mut rtes);
        report.rre_quartiles = quartiles(&mut rres);
    }

    Ok(report)
}

/// `[Q1, median, Q3]` with linear interpolation between closest ranks.
fn quartiles(values: &mut [f64]) -> Option<[f64; 3]> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let q = |p: f64| -> f64 {
        let rank = p * (values.len() - 1) as f64;
        let lo = rank.floor() as usize;
        let hi = rank.ceil() as usize;
        let frac = rank - lo as f64;
        values[lo] * (1.0 - frac) + values[hi] * frac
    };
    Some([q(0.25), q(0.5), q(0.75)])
}

/// Renders scored pairs as CSV: `scan_s,scan_m,label,score,rte,rre`, with
/// ids taken from `id_of`.
pub fn pairs_to_csv(pairs: &[LabeledPair], id_of: impl Fn(usize) -> String) -> String {
    let mut out = String::from("scan_s,scan_m,label,score,rte,rre\n");
    for p in pairs {
        let score = p.score.map(|s| s.to_string()).unwrap_or_default();
        let (rte, rre) = match p.pose_error {
            Some((t, r)) => (t.to_string(), r.to_string()),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            id_of(p.scan_s),
            id_of(p.scan_m),
            p.label.as_str(),
            score,
            rte,
            rre
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix3, Vector3};

    fn pose_at(index: usize, x: f64) -> PoseRecord {
        PoseRecord {
            index,
            transform: RigidTransform::new(Matrix3::identity(), Vector3::new(x, 0.0, 0.0)),
        }
    }

    #[test]
    fn build_pairs_honours_radius_and_gap() {
        // Two poses 1 m apart, 60 frames apart: one positive.
        let poses = vec![pose_at(0, 0.0), pose_at(60, 1.0)];
        let proto = PairProtocol {
            neg_ratio: 0,
            ..PairProtocol::default()
        };
        let pairs = build_pairs(&poses, &proto, 0).unwrap();
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].label, PairLabel::Positive);

        // Same distance, 10 frames apart: excluded entirely.
        let poses = vec![pose_at(0, 0.0), pose_at(10, 1.0)];
        let pairs = build_pairs(&poses, &proto, 0).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn build_pairs_reports_negative_shortfall() {
        // One positive but no negative candidates at all.
        let poses = vec![pose_at(0, 0.0), pose_at(60, 1.0)];
        let proto = PairProtocol {
            neg_ratio: 5,
            ..PairProtocol::default()
        };
        let err = build_pairs(&poses, &proto, 0).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientNegatives {
                required: 5,
                available: 0
            }
        ));
    }

    #[test]
    fn build_pairs_positive_set_matches_brute_force() {
        // A loop trajectory: brute-force over the distance matrix must agree.
        let n = 200;
        let poses: Vec<PoseRecord> = (0..n)
            .map(|i| {
                let theta = (i % 100) as f64 / 100.0 * std::f64::consts::TAU;
                let r = 60.0;
                PoseRecord {
                    index: i,
                    transform: RigidTransform::new(
                        Matrix3::identity(),
                        Vector3::new(r * theta.cos(), r * theta.sin(), 0.0),
                    ),
                }
            })
            .collect();
        let proto = PairProtocol {
            neg_ratio: 2,
            ..PairProtocol::default()
        };
        let pairs = build_pairs(&poses, &proto, 7).unwrap();

        let mut brute_pos = 0;
        for i in 0..n {
            for j in i + 1..n {
                let d = (poses[i].transform.translation - poses[j].transform.translation).norm();
                if j - i > proto.frame_gap && d <= proto.pos_radius {
                    brute_pos += 1;
                }
            }
        }
        let got_pos = pairs.iter().filter(|p| p.label == PairLabel::Positive).count();
        assert_eq!(got_pos, brute_pos);
        assert!(brute_pos > 0);
        let got_neg = pairs.len() - got_pos;
        assert_eq!(got_neg, proto.neg_ratio * brute_pos);

        // Deterministic per seed.
        let again = build_pairs(&poses, &proto, 7).unwrap();
        let key = |ps: &[LabeledPair]| -> Vec<(usize, usize, bool)> {
            ps.iter()
                .map(|p| (p.scan_s, p.scan_m, p.label == PairLabel::Positive))
                .collect()
        };
        assert_eq!(key(&pairs), key(&again));
    }

    #[test]
    fn pr_curve_hand_worked_instance() {
        let scored = vec![(0.9, true), (0.4, true), (0.6, false)];
        let curve = pr_curve(&scored).unwrap();
        assert_eq!(curve.points.len(), 3);
        assert_relative_eq!(curve.max_f1(), 0.8, epsilon = 1e-12);
        assert_relative_eq!(curve.recall_at_full_precision(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(curve.average_precision(), 5.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(curve.extended_precision(), 0.75, epsilon = 1e-12);
    }

    #[test]
    fn pr_curve_separable_scores() {
        let mut scored = vec![];
        for i in 0..10 {
            scored.push((10.0 + i as f64, true));
            scored.push((i as f64 / 2.0, false));
        }
        let curve = pr_curve(&scored).unwrap();
        assert_eq!(curve.max_f1(), 1.0);
        assert_eq!(curve.recall_at_full_precision(), 1.0);
        assert_relative_eq!(curve.average_precision(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(curve.extended_precision(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn f_beta_at_one_is_f1() {
        let scored = vec![
            (0.9, true),
            (0.8, false),
            (0.7, true),
            (0.3, false),
            (0.2, true),
        ];
        let curve = pr_curve(&scored).unwrap();
        assert_eq!(curve.f_beta(1.0), curve.max_f1());
    }

    #[test]
    fn pr_curve_requires_positives() {
        assert!(matches!(
            pr_curve(&[(0.5, false)]),
            Err(Error::NoPositives)
        ));
    }

    #[test]
    fn rte_rre_examples() {
        let id = RigidTransform::identity();
        assert_eq!(rte(&id, &id), 0.0);
        assert_eq!(rre(&id, &id), 0.0);

        let moved = RigidTransform::new(Matrix3::identity(), Vector3::new(3.0, 4.0, 0.0));
        assert_relative_eq!(rte(&moved, &id), 5.0, epsilon = 1e-12);

        let ang = 10.0f64.to_radians();
        let yaw = RigidTransform::new(
            Matrix3::new(
                ang.cos(), -ang.sin(), 0.0,
                ang.sin(), ang.cos(), 0.0,
                0.0, 0.0, 1.0,
            ),
            Vector3::zeros(),
        );
        assert_relative_eq!(rre(&yaw, &id), 10.0, epsilon = 1e-9);
        // Symmetry.
        assert_relative_eq!(rre(&yaw, &id), rre(&id, &yaw), epsilon = 1e-12);
        assert_eq!(rte(&moved, &id), rte(&id, &moved));
    }

    #[test]
    fn synth_is_deterministic() {
        let scene = SceneParams::default();
        let noise = PairNoise {
            sigma_c: 0.05,
            sigma_f: 0.01,
            dropout: 0.2,
            distractors: 0.2,
        };
        let (a1, b1, t1) = synth_pair(42, &scene, &noise).unwrap();
        let (a2, b2, t2) = synth_pair(42, &scene, &noise).unwrap();
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        assert_eq!(t1.rotation, t2.rotation);
        assert_eq!(t1.translation, t2.translation);
    }

    #[test]
    fn noiseless_pair_recovers_truth() {
        let scene = SceneParams::default();
        let (gs, gm, truth) = synth_pair(3, &scene, &PairNoise::default()).unwrap();
        let params = RansacParams {
            iterations: 2000,
            seed: 1,
            ..RansacParams::default()
        };
        let result = match_graphs(&gs, &gm, &params, 1.0);
        let pose = result.pose.expect("noiseless pair must register");
        assert!(rte(&pose, &truth) < 1e-6);
        assert!(rre(&pose, &truth) < 1e-6);
    }

    #[test]
    fn all_dropped_is_an_error() {
        let scene = SceneParams::default();
        let noise = PairNoise {
            dropout: 1.0,
            ..PairNoise::default()
        };
        assert!(matches!(
            synth_pair(0, &scene, &noise),
            Err(Error::DegenerateScene(_))
        ));
    }

    #[test]
    fn quartile_interpolation() {
        let mut v = vec![1.0, 2.0, 3.0, 4.0];
        assert_eq!(quartiles(&mut v).unwrap(), [1.75, 2.5, 3.25]);
        assert_eq!(quartiles(&mut []), None);
    }

    #[test]
    fn pair_seed_is_stable_and_id_sensitive() {
        assert_eq!(pair_seed(1, 2, 3), pair_seed(1, 2, 3));
        assert_ne!(pair_seed(1, 2, 3), pair_seed(1, 3, 2));
        assert_ne!(pair_seed(1, 2, 3), pair_seed(2, 2, 3));
    }
}
