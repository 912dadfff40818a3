//! Flat key-value run configuration (TOML syntax, unknown keys rejected).
//!
//! ```toml
//! # semantic classes kept during extraction (SemanticKITTI ids:
//! # sidewalk, building, fence, vegetation, trunk, pole, traffic-sign)
//! allowlist = [48, 50, 51, 70, 71, 80, 81]
//!
//! # clustering
//! eps = 1.0
//! min_pts = 5
//! min_cluster_size = 10
//! per_class_eps = []          # e.g. [[70, 1.5]] widens vegetation
//!
//! # registration
//! ransac_iterations = 10000
//! inlier_tol = 1.0
//! min_inliers = 3
//! early_exit = false
//!
//! # place decision + pair protocol
//! tau = 20.0
//! pos_radius = 3.0
//! neg_radius = 20.0
//! frame_gap = 50
//! neg_ratio = 100
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::clustering::ClusteringParams;
use crate::error::{Error, Result};
use crate::evaluation::PairProtocol;
use crate::registration::RansacParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    /// Semantic class ids kept during extraction.
    pub allowlist: Vec<u32>,
    pub eps: f64,
    pub min_pts: usize,
    pub min_cluster_size: usize,
    /// `[class id, eps]` overrides.
    pub per_class_eps: Vec<(u32, f64)>,
    pub ransac_iterations: usize,
    pub inlier_tol: f64,
    pub min_inliers: usize,
    pub early_exit: bool,
    /// Similarity decision threshold τ.
    pub tau: f64,
    pub pos_radius: f64,
    pub neg_radius: f64,
    pub frame_gap: usize,
    pub neg_ratio: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            allowlist: vec![48, 50, 51, 70, 71, 80, 81],
            eps: 1.0,
            min_pts: 5,
            min_cluster_size: 10,
            per_class_eps: Vec::new(),
            ransac_iterations: 10_000,
            inlier_tol: 1.0,
            min_inliers: 3,
            early_exit: false,
            tau: 20.0,
            pos_radius: 3.0,
            neg_radius: 20.0,
            frame_gap: 50,
            neg_ratio: 100,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: Config =
            toml::from_str(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.clustering().validate()?;
        self.ransac(0).validate()?;
        if !(self.tau >= 0.0) {
            return Err(Error::InvalidConfig("tau must be >= 0".into()));
        }
        if !(self.pos_radius > 0.0) || !(self.neg_radius > self.pos_radius) {
            return Err(Error::InvalidConfig(
                "need 0 < pos_radius < neg_radius".into(),
            ));
        }
        Ok(())
    }

    pub fn clustering(&self) -> ClusteringParams {
        ClusteringParams {
            eps: self.eps,
            min_pts: self.min_pts,
            min_cluster_size: self.min_cluster_size,
            per_class_eps: self.per_class_eps.clone(),
        }
    }

    pub fn ransac(&self, seed: u64) -> RansacParams {
        RansacParams {
            iterations: self.ransac_iterations,
            inlier_tol: self.inlier_tol,
            min_inliers: self.min_inliers,
            seed,
            early_exit: self.early_exit,
        }
    }

    pub fn protocol(&self) -> PairProtocol {
        PairProtocol {
            pos_radius: self.pos_radius,
            neg_radius: self.neg_radius,
            frame_gap: self.frame_gap,
            neg_ratio: self.neg_ratio,
        }
    }
}
