//! Vertex similarity and optimal per-class assignment between two graphs.
//!
//! Shape similarity compares bounding-box extents through the fractional
//! variation [`delta`]; optimal correspondence is a rectangular linear
//! assignment solved exactly per class block, so vertices of different
//! classes are never paired.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{SemanticGraph, Vertex};

/// One vertex correspondence with its shape similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    /// Index into the source graph's vertex list.
    pub source: usize,
    /// Index into the map graph's vertex list.
    pub map: usize,
    pub similarity: f64,
}

/// A set of vertex correspondences; each source index and each map index
/// appears at most once, and paired vertices always share a class.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MatchSet {
    pub pairs: Vec<MatchPair>,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_similarity(&self) -> f64 {
        self.pairs.iter().map(|p| p.similarity).sum()
    }
}

/// Fractional variation `|a − b| / max(a, b)` for nonnegative scalars;
/// defined as 0 when `max(a, b) = 0` (the continuity limit along a = b → 0).
pub fn delta(a: f64, b: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 {
        return Err(Error::NegativeDelta { a, b });
    }
    Ok(delta_raw(a, b))
}

pub(crate) fn delta_raw(a: f64, b: f64) -> f64 {
    let max = a.max(b);
    if max <= 0.0 {
        0.0
    } else {
        (a - b).abs() / max
    }
}

/// Shape similarity of two vertices: the exponentiated mean fractional
/// variation of the bounding-box extents for same-class vertices, 0
/// otherwise.
pub fn vertex_similarity(a: &Vertex, b: &Vertex) -> f64 {
    if a.class != b.class {
        return 0.0;
    }
    let d = delta_raw(a.feature[0], b.feature[0])
        + delta_raw(a.feature[1], b.feature[1])
        + delta_raw(a.feature[2], b.feature[2]);
    (-d / 3.0).exp()
}

/// Optimal vertex correspondence between two graphs.
///
/// For each class present in both graphs the rectangular assignment
/// maximizing the summed similarity is solved exactly (as a minimization of
/// `1 − σ` costs); the smaller side of each class block is matched fully.
/// Equal-total ties are canonicalized towards the lowest
/// `(source, map)` lexicographic order. Zero-similarity pairs are dropped.
pub fn assign_vertices(source: &SemanticGraph, map: &SemanticGraph) -> MatchSet {
    let source_classes: BTreeSet<u32> = source.vertices.iter().map(|v| v.class).collect();
    let map_classes: BTreeSet<u32> = map.vertices.iter().map(|v| v.class).collect();

    let mut pairs = Vec::new();
    for &class in source_classes.intersection(&map_classes) {
        let rows: Vec<usize> = indices_of_class(source, class);
        let cols: Vec<usize> = indices_of_class(map, class);

        let sim = |r: usize, c: usize| {
            vertex_similarity(&source.vertices[rows[r]], &map.vertices[cols[c]])
        };

        let assigned: Vec<(usize, usize)> = if rows.len() <= cols.len() {
            hungarian_min(rows.len(), cols.len(), |r, c| 1.0 - sim(r, c))
                .into_iter()
                .enumerate()
                .collect()
        } else {
            let mut inverted: Vec<(usize, usize)> =
                hungarian_min(cols.len(), rows.len(), |c, r| 1.0 - sim(r, c))
                    .into_iter()
                    .enumerate()
                    .map(|(c, r)| (r, c))
                    .collect();
            inverted.sort_unstable_by_key(|&(r, _)| r);
            inverted
        };

        let mut block: Vec<MatchPair> = assigned
            .into_iter()
            .map(|(r, c)| MatchPair {
                source: rows[r],
                map: cols[c],
                similarity: sim(r, c),
            })
            .collect();
        canonicalize_ties(&mut block, &|s, m| {
            vertex_similarity(&source.vertices[s], &map.vertices[m])
        });
        pairs.extend(block.into_iter().filter(|p| p.similarity > 0.0));
    }

    pairs.sort_unstable_by_key(|p| (p.source, p.map));
    MatchSet { pairs }
}

fn indices_of_class(graph: &SemanticGraph, class: u32) -> Vec<usize> {
    graph
        .vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| v.class == class)
        .map(|(i, _)| i)
        .collect()
}

/// Swaps map assignments between pair couples whenever the exchange leaves
/// the exact total unchanged and lowers the `(source, map)` lexicographic
/// order. Only exactly-tied optima are affected.
fn canonicalize_ties(block: &mut [MatchPair], sim: &dyn Fn(usize, usize) -> f64) {
    block.sort_unstable_by_key(|p| p.source);
    let k = block.len();
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..k {
            for y in x + 1..k {
                if block[x].map <= block[y].map {
                    continue;
                }
                let current = block[x].similarity + block[y].similarity;
                let swapped = sim(block[x].source, block[y].map) + sim(block[y].source, block[x].map);
                if swapped == current {
                    let (mx, my) = (block[x].map, block[y].map);
                    block[x].map = my;
                    block[y].map = mx;
                    block[x].similarity = sim(block[x].source, my);
                    block[y].similarity = sim(block[y].source, mx);
                    changed = true;
                }
            }
        }
    }
}

/// Exact rectangular linear assignment (Kuhn–Munkres with potentials),
/// minimizing total cost. Requires `n <= m`; returns the assigned column
/// for each row.
fn hungarian_min(n: usize, m: usize, cost: impl Fn(usize, usize) -> f64) -> Vec<usize> {
    assert!(n <= m, "hungarian_min requires rows <= cols");
    if n == 0 {
        return Vec::new();
    }
    // 1-based arrays with column 0 as the virtual start of augmenting paths.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut assigned_row = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        assigned_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = assigned_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![usize::MAX; n];
    for j in 1..=m {
        if assigned_row[j] != 0 {
            assignment[assigned_row[j] - 1] = j - 1;
        }
    }
    debug_assert!(assignment.iter().all(|&c| c != usize::MAX));
    assignment
}
