//! Rigid 6-DoF pose estimation from matched vertex centroids.
//!
//! The closed-form least-squares fit ([`kabsch`]) aligns corresponded point
//! sets through the SVD of their cross-covariance; [`ransac_register`] wraps
//! it in a hypothesize-and-verify loop that tolerates wrong correspondences
//! and returns the refined inlier set alongside the pose.

use nalgebra::{Matrix3, Point3, UnitQuaternion, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::error::{Error, Result};
use crate::graph::SemanticGraph;
use crate::matching::MatchSet;

/// Relative rank threshold below which a point configuration is treated as
/// collinear and the rotation as unobservable.
const DEGENERACY_RATIO: f64 = 1e-9;

/// An element of SE(3): `p ↦ R·p + t`, mapping source coordinates into
/// destination coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

impl RigidTransform {
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Matrix3::identity(), Vector3::zeros())
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt * self.translation))
    }

    /// Max absolute deviation of `RᵀR` from the identity.
    pub fn orthonormality_deviation(&self) -> f64 {
        let d = self.rotation.transpose() * self.rotation - Matrix3::identity();
        d.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// True when the rotation part is orthonormal with determinant +1
    /// within `tol`.
    pub fn is_valid_rotation(&self, tol: f64) -> bool {
        self.orthonormality_deviation() <= tol && (self.rotation.determinant() - 1.0).abs() <= tol
    }

    /// Rotation part as a unit quaternion with a canonical sign (`w ≥ 0`,
    /// ties resolved by the first nonzero component).
    pub fn rotation_quaternion(&self) -> UnitQuaternion<f64> {
        let q = UnitQuaternion::from_matrix(&self.rotation);
        let c = q.coords; // (x, y, z, w)
        let flip = c.w < 0.0
            || (c.w == 0.0 && (c.x < 0.0 || (c.x == 0.0 && (c.y < 0.0 || (c.y == 0.0 && c.z < 0.0)))));
        if flip {
            UnitQuaternion::new_unchecked(-q.into_inner())
        } else {
            q
        }
    }
}

/// Projects an arbitrary 3×3 matrix onto the nearest proper rotation
/// (Frobenius norm), via SVD with determinant sign correction.
pub fn nearest_rotation(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd of 3x3 always yields u");
    let v_t = svd.v_t.expect("svd of 3x3 always yields v_t");
    let d = (u * v_t).determinant().signum();
    u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t
}

/// Least-squares rigid alignment of corresponded point sets: finds the
/// transform minimizing `Σ‖R·src_k + t − dst_k‖²`.
///
/// Reflections are excluded by correcting the determinant sign of the SVD
/// factors. The sample is rejected as degenerate when the cross-covariance
/// of the centered sets loses rank (all-collinear configurations), i.e.
/// when its second singular value falls below `1e-9` of the largest.
pub fn kabsch(src: &[Point3<f64>], dst: &[Point3<f64>]) -> Result<RigidTransform> {
    if src.len() != dst.len() {
        return Err(Error::DegenerateGeometry(format!(
            "point set sizes differ: {} vs {}",
            src.len(),
            dst.len()
        )));
    }
    if src.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "need at least 3 point pairs, got {}",
            src.len()
        )));
    }

    let n = src.len() as f64;
    let src_mean = src.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / n;
    let dst_mean = dst.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / n;

    let mut cross = Matrix3::zeros();
    for (s, d) in src.iter().zip(dst.iter()) {
        cross += (s.coords - src_mean) * (d.coords - dst_mean).transpose();
    }

    let svd = cross.svd(true, true);
    let mut sv = [svd.singular_values[0], svd.singular_values[1], svd.singular_values[2]];
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    if sv[1] <= DEGENERACY_RATIO * sv[0] {
        return Err(Error::DegenerateGeometry(
            "collinear point configuration: rotation is unobservable".into(),
        ));
    }

    let u = svd.u.expect("svd of 3x3 always yields u");
    let v_t = svd.v_t.expect("svd of 3x3 always yields v_t");
    // cross = U Σ Vᵀ; the maximizing rotation is V·diag(1,1,d)·Uᵀ with
    // d chosen so det(R) = +1.
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let rotation = v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let translation = dst_mean - rotation * src_mean;

    Ok(RigidTransform::new(rotation, translation))
}

/// Parameters for the RANSAC registration loop.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RansacParams {
    /// Fixed hypothesis budget; every iteration runs unless `early_exit`.
    pub iterations: usize,
    /// Inlier residual tolerance in metres.
    pub inlier_tol: f64,
    /// Minimum inlier support below which registration fails.
    pub min_inliers: usize,
    /// Seed for the hypothesis sampler.
    pub seed: u64,
    /// Stop as soon as a hypothesis makes every match an inlier.
    pub early_exit: bool,
}

impl Default for RansacParams {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            inlier_tol: 1.0,
            min_inliers: 3,
            seed: 0,
            early_exit: false,
        }
    }
}

impl RansacParams {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::InvalidConfig("ransac_iterations must be >= 1".into()));
        }
        if !(self.inlier_tol > 0.0) {
            return Err(Error::InvalidConfig("inlier_tol must be > 0".into()));
        }
        if self.min_inliers < 3 {
            return Err(Error::InvalidConfig("min_inliers must be >= 3".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

struct Hypothesis {
    transform: RigidTransform,
    inlier_count: usize,
    inlier_residual: f64,
}

/// Robust pose estimation over a candidate match set.
///
/// Each iteration draws 3 distinct matches, fits [`kabsch`] on their
/// centroids and counts matches with `‖R·c_i + t − c_j‖ ≤ inlier_tol`.
/// The hypothesis with the most inliers wins (ties go to the lower total
/// inlier residual). The winner's inlier set is refit once with the full
/// least-squares solution and the inliers are recomputed against the refit
/// transform before being returned as the refined match set.
pub fn ransac_register(
    matches: &MatchSet,
    source: &SemanticGraph,
    map: &SemanticGraph,
    params: &RansacParams,
) -> Result<(RigidTransform, MatchSet)> {
    let n = matches.len();
    if n < params.min_inliers {
        return Err(Error::RegistrationFailure {
            inliers: n,
            required: params.min_inliers,
        });
    }

    let src: Vec<Point3<f64>> = matches
        .pairs
        .iter()
        .map(|p| source.vertices[p.source].centroid)
        .collect();
    let dst: Vec<Point3<f64>> = matches
        .pairs
        .iter()
        .map(|p| map.vertices[p.map].centroid)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best: Option<Hypothesis> = None;

    for _ in 0..params.iterations {
        let (a, b, c) = sample_triple(&mut rng, n);
        let sample_src = [src[a], src[b], src[c]];
        let sample_dst = [dst[a], dst[b], dst[c]];
        // Degenerate (collinear) samples score nothing; the draw of the
        // next iteration is the resample.
        let Ok(t) = kabsch(&sample_src, &sample_dst) else {
            continue;
        };

        let best_count = best.as_ref().map_or(0, |h| h.inlier_count);
        let mut count = 0usize;
        let mut residual = 0.0f64;
        for k in 0..n {
            // Abandon hypotheses that can no longer reach the incumbent
            // count; such hypotheses cannot tie, so residual ordering is
            // unaffected.
            if count + (n - k) < best_count {
                break;
            }
            let r = (t.rotation * src[k].coords + t.translation - dst[k].coords).norm();
            if r <= params.inlier_tol {
                count += 1;
                residual += r;
            }
        }

        let better = match &best {
            None => count > 0,
            Some(h) => {
                count > h.inlier_count
                    || (count == h.inlier_count && residual < h.inlier_residual)
            }
        };
        if better {
            best = Some(Hypothesis {
                transform: t,
                inlier_count: count,
                inlier_residual: residual,
            });
        }
        if params.early_exit && best.as_ref().is_some_and(|h| h.inlier_count == n) {
            break;
        }
    }

    let best = best.filter(|h| h.inlier_count >= params.min_inliers).ok_or(
        Error::RegistrationFailure {
            inliers: 0,
            required: params.min_inliers,
        },
    )?;

    let inlier_indices = |t: &RigidTransform| -> Vec<usize> {
        (0..n)
            .filter(|&k| {
                (t.rotation * src[k].coords + t.translation - dst[k].coords).norm()
                    <= params.inlier_tol
            })
            .collect()
    };

    let winning = inlier_indices(&best.transform);
    let refit = kabsch(
        &winning.iter().map(|&k| src[k]).collect::<Vec<_>>(),
        &winning.iter().map(|&k| dst[k]).collect::<Vec<_>>(),
    )?;

    let refined = inlier_indices(&refit);
    if refined.len() < params.min_inliers {
        return Err(Error::RegistrationFailure {
            inliers: refined.len(),
            required: params.min_inliers,
        });
    }

    let refined_set = MatchSet {
        pairs: refined
            .into_iter()
            .map(|k| matches.pairs[k].clone())
            .collect(),
    };
    Ok((refit, refined_set))
}

/// Draws three distinct indices in `0..n`, `n ≥ 3`.
fn sample_triple(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize, usize) {
    let a = rng.random_range(0..n);
    let b = loop {
        let b = rng.random_range(0..n);
        if b != a {
            break b;
        }
    };
    let c = loop {
        let c = rng.random_range(0..n);
        if c != a && c != b {
            break c;
        }
    };
    (a, b, c)
}
