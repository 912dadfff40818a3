//! The fully-connected semantic graph descriptor and its compact map format.
//!
//! A vertex stores the cluster centroid, semantic class and axis-aligned
//! bounding-box extents; edges exist implicitly between every vertex pair
//! and are described by the two centroids, so they are never materialized.
//!
//! ## `.bxg` layout
//!
//! ```text
//! magic  "BOXG"                     4 bytes
//! format version                    u16 LE
//! vertex count                      u32 LE
//! scan-id length                    u16 LE
//! scan-id bytes (utf-8)
//! per vertex: cx cy cz class h w d  7 × f32 LE = 28 bytes
//! ```
//!
//! Seven 32-bit values per vertex; the class id round-trips losslessly
//! through f32 for ids below 2²⁴. A map database is a directory of `.bxg`
//! files plus a text index of `scan_id file_name [12-value pose row]` lines.

use std::fs;
use std::path::Path;

use nalgebra::Point3;

use crate::clustering::Cluster;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"BOXG";
pub const FORMAT_VERSION: u16 = 1;
/// Serialized payload bytes per vertex.
pub const VERTEX_BYTES: usize = 28;

/// A clustered object instance: centroid, semantic class, and bounding-box
/// feature `(h, w, d)` = extents along z, y, x in the sensor frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub centroid: Point3<f64>,
    pub class: u32,
    pub feature: [f64; 3],
}

/// The graph descriptor of one scan. Vertex order is the deterministic
/// order produced by `cluster_by_class`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticGraph {
    pub vertices: Vec<Vertex>,
    pub scan_id: String,
}

impl SemanticGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Builds a vertex from a cluster: centroid is the arithmetic mean of the
/// points, the feature the axis-aligned extents (z, y, x).
pub fn vertex_from_cluster(cluster: &Cluster) -> Result<Vertex> {
    if cluster.points.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let mut min = cluster.points[0];
    let mut max = cluster.points[0];
    for p in &cluster.points[1..] {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        min.z = min.z.min(p.z);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
        max.z = max.z.max(p.z);
    }
    Ok(Vertex {
        centroid: cluster.centroid(),
        class: cluster.class,
        feature: [max.z - min.z, max.y - min.y, max.x - min.x],
    })
}

/// One vertex per cluster, order preserved. Clusters are nonempty by
/// construction (`min_cluster_size >= 1`).
pub fn build_graph(clusters: &[Cluster], scan_id: impl Into<String>) -> SemanticGraph {
    SemanticGraph {
        vertices: clusters
            .iter()
            .map(|c| vertex_from_cluster(c).expect("clusters are nonempty"))
            .collect(),
        scan_id: scan_id.into(),
    }
}

/// Encodes a graph into the `.bxg` byte format.
pub fn serialize(graph: &SemanticGraph) -> Vec<u8> {
    let id = graph.scan_id.as_bytes();
    assert!(id.len() <= u16::MAX as usize, "scan id too long");
    let mut out = Vec::with_capacity(12 + id.len() + graph.len() * VERTEX_BYTES);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(graph.len() as u32).to_le_bytes());
    out.extend_from_slice(&(id.len() as u16).to_le_bytes());
    out.extend_from_slice(id);
    for v in &graph.vertices {
        for value in [
            v.centroid.x as f32,
            v.centroid.y as f32,
            v.centroid.z as f32,
            v.class as f32,
            v.feature[0] as f32,
            v.feature[1] as f32,
            v.feature[2] as f32,
        ] {
            out.extend_from_slice(&value.to_le_bytes());
        }
    }
    out
}

/// Decodes a `.bxg` byte sequence.
pub fn deserialize(bytes: &[u8]) -> Result<SemanticGraph> {
    let truncated = |expected: usize| Error::Truncated {
        expected,
        got: bytes.len(),
    };
    if bytes.len() < 12 {
        return Err(truncated(12));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::BadMagic);
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let count = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let id_len = u16::from_le_bytes(bytes[10..12].try_into().unwrap()) as usize;
    let expected = 12 + id_len + count * VERTEX_BYTES;
    if bytes.len() != expected {
        return Err(truncated(expected));
    }
    let scan_id = std::str::from_utf8(&bytes[12..12 + id_len])
        .map_err(|_| Error::BadMagic)?
        .to_string();

    let mut vertices = Vec::with_capacity(count);
    let mut off = 12 + id_len;
    for _ in 0..count {
        let mut vals = [0.0f32; 7];
        for v in vals.iter_mut() {
            *v = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
            off += 4;
        }
        vertices.push(Vertex {
            centroid: Point3::new(vals[0] as f64, vals[1] as f64, vals[2] as f64),
            class: vals[3] as u32,
            feature: [vals[4] as f64, vals[5] as f64, vals[6] as f64],
        });
    }
    Ok(SemanticGraph { vertices, scan_id })
}

pub fn save_bxg(path: &Path, graph: &SemanticGraph) -> Result<()> {
    fs::write(path, serialize(graph)).map_err(|e| Error::io(path, e))
}

pub fn load_bxg(path: &Path) -> Result<SemanticGraph> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    deserialize(&bytes).map_err(|e| match e {
        Error::BadMagic | Error::UnsupportedVersion(_) | Error::Truncated { .. } => {
            Error::malformed(path, e.to_string())
        }
        other => other,
    })
}

/// One row of a map-database index.
#[derive(Debug, Clone, PartialEq)]
pub struct MapIndexEntry {
    pub scan_id: String,
    pub file_name: String,
    /// Optional row-major 3×4 pose.
    pub pose: Option<[f64; 12]>,
}

/// Writes a map-database index: one `scan_id file_name [pose row]` line per
/// entry.
pub fn write_index(path: &Path, entries: &[MapIndexEntry]) -> Result<()> {
    let mut out = String::new();
    for e in entries {
        out.push_str(&e.scan_id);
        out.push(' ');
        out.push_str(&e.file_name);
        if let Some(pose) = &e.pose {
            for v in pose {
                out.push(' ');
                out.push_str(&format!("{v:?}"));
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_index(path: &Path) -> Result<Vec<MapIndexEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let pose = match fields.len() {
            2 => None,
            14 => {
                let mut pose = [0.0f64; 12];
                for (slot, tok) in pose.iter_mut().zip(&fields[2..]) {
                    *slot = tok.parse().map_err(|_| {
                        Error::malformed(path, format!("line {}: bad pose value {tok:?}", lineno + 1))
                    })?;
                }
                Some(pose)
            }
            n => {
                return Err(Error::malformed(
                    path,
                    format!("line {}: expected 2 or 14 fields, got {n}", lineno + 1),
                ))
            }
        };
        entries.push(MapIndexEntry {
            scan_id: fields[0].to_string(),
            file_name: fields[1].to_string(),
            pose,
        });
    }
    Ok(entries)
}
