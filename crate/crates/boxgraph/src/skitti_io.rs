//! SemanticKITTI-format ingestion: velodyne `.bin` scans, `.label` files,
//! odometry pose files and the `Tr` calibration entry.
//!
//! File layouts:
//! - `.bin`: sequence of 4×f32 little-endian records `(x, y, z, intensity)`;
//!   intensity is discarded on read.
//! - `.label`: sequence of u32 little-endian words; the semantic class is the
//!   lower 16 bits, the upper 16 bits hold a per-dataset instance id that is
//!   discarded (instances come from clustering, not annotations).
//! - poses: text, 12 whitespace-separated decimals per line (row-major 3×4).
//! - calibration: text key-value lines; the key `Tr` is followed by 12
//!   decimals describing the sensor→reference transform.

use std::fs;
use std::path::Path;

use nalgebra::{Matrix3, Point3, Vector3};

use crate::error::{Error, Result};
use crate::registration::{nearest_rotation, RigidTransform};

/// A scan with one semantic class id per point.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCloud {
    pub points: Vec<Point3<f64>>,
    pub labels: Vec<u32>,
}

impl LabeledCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A ground-truth pose: `transform` maps sensor coordinates to world
/// coordinates for scan `index`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseRecord {
    pub index: usize,
    pub transform: RigidTransform,
}

/// Reads a velodyne `.bin` scan. One point per 16-byte record; intensity is
/// dropped.
pub fn read_point_cloud(path: &Path) -> Result<Vec<Point3<f64>>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 16 != 0 {
        return Err(Error::malformed(
            path,
            format!("byte length {} not divisible by 16", bytes.len()),
        ));
    }
    let mut points = Vec::with_capacity(bytes.len() / 16);
    for rec in bytes.chunks_exact(16) {
        let x = f32::from_le_bytes(rec[0..4].try_into().unwrap());
        let y = f32::from_le_bytes(rec[4..8].try_into().unwrap());
        let z = f32::from_le_bytes(rec[8..12].try_into().unwrap());
        points.push(Point3::new(x as f64, y as f64, z as f64));
    }
    Ok(points)
}

/// Writes a `.bin` scan with zero intensity, the inverse of
/// [`read_point_cloud`] for f32-representable coordinates.
pub fn write_point_cloud(path: &Path, points: &[Point3<f64>]) -> Result<()> {
    let mut bytes = Vec::with_capacity(points.len() * 16);
    for p in points {
        bytes.extend_from_slice(&(p.x as f32).to_le_bytes());
        bytes.extend_from_slice(&(p.y as f32).to_le_bytes());
        bytes.extend_from_slice(&(p.z as f32).to_le_bytes());
        bytes.extend_from_slice(&0.0f32.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a `.label` file; returns the semantic class ids (`value & 0xFFFF`).
pub fn read_labels(path: &Path) -> Result<Vec<u32>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() % 4 != 0 {
        return Err(Error::malformed(
            path,
            format!("byte length {} not divisible by 4", bytes.len()),
        ));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|w| u32::from_le_bytes(w.try_into().unwrap()) & 0xFFFF)
        .collect())
}

/// Writes a `.label` file (instance bits zero).
pub fn write_labels(path: &Path, labels: &[u32]) -> Result<()> {
    let mut bytes = Vec::with_capacity(labels.len() * 4);
    for l in labels {
        bytes.extend_from_slice(&(l & 0xFFFF).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Pairs points with labels and keeps exactly the points whose class is in
/// `allowlist`, preserving order.
pub fn attach_and_filter(
    points: &[Point3<f64>],
    labels: &[u32],
    allowlist: &[u32],
) -> Result<LabeledCloud> {
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch {
            points: points.len(),
            labels: labels.len(),
        });
    }
    let mut cloud = LabeledCloud {
        points: Vec::new(),
        labels: Vec::new(),
    };
    for (p, &l) in points.iter().zip(labels.iter()) {
        if allowlist.contains(&l) {
            cloud.points.push(*p);
            cloud.labels.push(l);
        }
    }
    Ok(cloud)
}

/// Reads an odometry pose file.
///
/// If a calibration `C` (sensor→reference) is supplied, each pose `P` is
/// conjugated into the sensor frame as `C⁻¹·P·C`. Rotations are projected
/// onto the nearest proper rotation when they deviate from orthonormality
/// by more than 1e-9; deviations beyond 1e-3 additionally log a warning.
pub fn read_poses(path: &Path, calibration: Option<&RigidTransform>) -> Result<Vec<PoseRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let values = parse_decimals(line).map_err(|reason| {
            Error::malformed(path, format!("line {}: {}", lineno + 1, reason))
        })?;
        if values.len() != 12 {
            return Err(Error::malformed(
                path,
                format!("line {}: expected 12 fields, got {}", lineno + 1, values.len()),
            ));
        }
        let mut transform = transform_from_row_major(&values);
        let deviation = transform.orthonormality_deviation();
        if deviation > 1e-3 {
            log::warn!(
                "{}: line {}: rotation deviates from orthonormality by {:.3e}; re-orthonormalizing",
                path.display(),
                lineno + 1,
                deviation
            );
        }
        if deviation > 1e-9 {
            transform.rotation = nearest_rotation(&transform.rotation);
        }
        if let Some(c) = calibration {
            transform = c.inverse().compose(&transform).compose(c);
        }
        records.push(PoseRecord {
            index: records.len(),
            transform,
        });
    }
    Ok(records)
}

/// Writes poses as 12-decimal row-major 3×4 lines, the inverse of
/// [`read_poses`] without calibration.
pub fn write_poses(path: &Path, poses: &[PoseRecord]) -> Result<()> {
    let mut out = String::new();
    for p in poses {
        let r = &p.transform.rotation;
        let t = &p.transform.translation;
        let row = [
            r[(0, 0)], r[(0, 1)], r[(0, 2)], t.x,
            r[(1, 0)], r[(1, 1)], r[(1, 2)], t.y,
            r[(2, 0)], r[(2, 1)], r[(2, 2)], t.z,
        ];
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads the `Tr` entry of a KITTI calibration file.
pub fn read_calibration(path: &Path) -> Result<RigidTransform> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for line in text.lines() {
        let Some((key, rest)) = line.split_once(|c: char| c == ':' || c.is_whitespace()) else {
            continue;
        };
        if key.trim() != "Tr" {
            continue;
        }
        let values = parse_decimals(rest).map_err(|reason| Error::malformed(path, reason))?;
        if values.len() != 12 {
            return Err(Error::malformed(
                path,
                format!("Tr entry: expected 12 fields, got {}", values.len()),
            ));
        }
        return Ok(transform_from_row_major(&values));
    }
    Err(Error::malformed(path, "no Tr entry found"))
}

fn parse_decimals(line: &str) -> std::result::Result<Vec<f64>, String> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| format!("invalid decimal {tok:?}"))
        })
        .collect()
}

fn transform_from_row_major(v: &[f64]) -> RigidTransform {
    debug_assert_eq!(v.len(), 12);
    let rotation = Matrix3::new(v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10]);
    let translation = Vector3::new(v[3], v[7], v[11]);
    RigidTransform::new(rotation, translation)
}
