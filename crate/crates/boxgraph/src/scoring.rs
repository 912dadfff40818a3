//! Graph similarity scoring and the full pair-matching pipeline.
//!
//! The score over a refined match set sums, over unordered couples of
//! inlier matches, the edge similarity of the corresponding centroid
//! distances, plus the vertex similarity of every inlier match. Pairs of
//! graphs count as the same place when the score exceeds the decision
//! threshold τ.

use serde::Serialize;

use crate::graph::SemanticGraph;
use crate::matching::{assign_vertices, delta_raw, vertex_similarity, MatchSet};
use crate::registration::{ransac_register, RansacParams, RigidTransform};

/// Outcome of matching one graph pair.
#[derive(Debug, Clone)]
pub struct MatchResult {
    /// Similarity score ω; 0 whenever no pose was recovered.
    pub similarity: f64,
    pub pose: Option<RigidTransform>,
    /// Refined (inlier) match set.
    pub inliers: MatchSet,
    /// Decision threshold carried from config for reporting.
    pub tau: f64,
}

impl MatchResult {
    fn no_match(tau: f64) -> Self {
        Self {
            similarity: 0.0,
            pose: None,
            inliers: MatchSet::default(),
            tau,
        }
    }

    /// Place-recognition decision: the score is above the threshold.
    pub fn is_match(&self) -> bool {
        self.similarity > self.tau
    }

    /// One CSV row: `scan_s,scan_m,similarity,tx,ty,tz,qw,qx,qy,qz,n_inliers`.
    /// Pose fields are empty when no pose was recovered.
    pub fn csv_row(&self, scan_s: &str, scan_m: &str) -> String {
        match &self.pose {
            Some(t) => {
                let q = t.rotation_quaternion();
                format!(
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    scan_s,
                    scan_m,
                    self.similarity,
                    t.translation.x,
                    t.translation.y,
                    t.translation.z,
                    q.w,
                    q.i,
                    q.j,
                    q.k,
                    self.inliers.len()
                )
            }
            None => format!(
                "{},{},{},,,,,,,,{}",
                scan_s,
                scan_m,
                self.similarity,
                self.inliers.len()
            ),
        }
    }

    /// The same row as a JSON-serializable record.
    pub fn row_record(&self, scan_s: &str, scan_m: &str) -> MatchRow {
        let pose = self.pose.as_ref().map(|t| {
            let q = t.rotation_quaternion();
            PoseFields {
                tx: t.translation.x,
                ty: t.translation.y,
                tz: t.translation.z,
                qw: q.w,
                qx: q.i,
                qy: q.j,
                qz: q.k,
            }
        });
        MatchRow {
            scan_s: scan_s.to_string(),
            scan_m: scan_m.to_string(),
            similarity: self.similarity,
            pose,
            n_inliers: self.inliers.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PoseFields {
    pub tx: f64,
    pub ty: f64,
    pub tz: f64,
    pub qw: f64,
    pub qx: f64,
    pub qy: f64,
    pub qz: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchRow {
    pub scan_s: String,
    pub scan_m: String,
    pub similarity: f64,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseFields>,
    pub n_inliers: usize,
}

/// Edge similarity of two edge lengths: `exp(−δ(len_s, len_m))`.
pub fn edge_similarity(len_s: f64, len_m: f64) -> f64 {
    (-delta_raw(len_s, len_m)).exp()
}

/// Similarity score ω over a refined match set: edge similarities over
/// unordered couples of distinct inlier matches plus vertex similarities of
/// every inlier match. Empty set → 0.
pub fn graph_similarity(source: &SemanticGraph, map: &SemanticGraph, inliers: &MatchSet) -> f64 {
    let mut score = 0.0;
    for (a, pa) in inliers.pairs.iter().enumerate() {
        for pb in &inliers.pairs[a + 1..] {
            let len_s = (source.vertices[pa.source].centroid
                - source.vertices[pb.source].centroid)
                .norm();
            let len_m = (map.vertices[pa.map].centroid - map.vertices[pb.map].centroid).norm();
            score += edge_similarity(len_s, len_m);
        }
        score += vertex_similarity(&source.vertices[pa.source], &map.vertices[pa.map]);
    }
    score
}

/// The full pipeline for one graph pair: optimal assignment, RANSAC
/// registration, similarity over the refined set. Registration failure is
/// encoded as similarity 0 with no pose and empty inliers.
pub fn match_graphs(
    source: &SemanticGraph,
    map: &SemanticGraph,
    ransac: &RansacParams,
    tau: f64,
) -> MatchResult {
    let matches = assign_vertices(source, map);
    if matches.len() < ransac.min_inliers {
        return MatchResult::no_match(tau);
    }
    match ransac_register(&matches, source, map, ransac) {
        Ok((pose, inliers)) => {
            let similarity = graph_similarity(source, map, &inliers);
            MatchResult {
                similarity,
                pose: Some(pose),
                inliers,
                tau,
            }
        }
        Err(_) => MatchResult::no_match(tau),
    }
}
