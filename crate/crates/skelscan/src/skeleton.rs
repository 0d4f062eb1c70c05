//! Chaining ranked grid nodes into polylines and simplex strips.
//!
//! A skeleton is purely combinatorial: vertices in visit order, simplices as
//! index tuples over them, and a partition of the vertex indices into
//! components. Within a component, consecutive simplices share `s` vertices
//! (sliding windows), so a component with `m` vertices carries
//! `max(0, m - s)` simplices. No geometric degeneracy checks are made;
//! collinear triangles are allowed.

use serde::Serialize;

use crate::geometry::{dist_slices, Dataset, Point};
use crate::gridscan::DensityTable;
use crate::{Error, Result};

/// Vertices plus `s`-simplices, possibly split into several chain components.
#[derive(Debug, Clone, Serialize)]
pub struct Skeleton {
    vertices: Vec<Point>,
    simplices: Vec<Vec<usize>>,
    components: Vec<Vec<usize>>,
    dim_s: usize,
}

impl Skeleton {
    fn empty(dim_s: usize) -> Skeleton {
        Skeleton {
            vertices: Vec::new(),
            simplices: Vec::new(),
            components: Vec::new(),
            dim_s,
        }
    }

    /// Assemble a skeleton from chains of vertices, emitting the sliding
    /// windows of `s + 1` consecutive vertices per chain.
    fn from_chains(chains: Vec<Vec<Point>>, dim_s: usize) -> Skeleton {
        let mut vertices = Vec::new();
        let mut components = Vec::new();
        let mut simplices = Vec::new();
        for chain in chains {
            let base = vertices.len();
            let ids: Vec<usize> = (base..base + chain.len()).collect();
            for window in ids.windows(dim_s + 1) {
                simplices.push(window.to_vec());
            }
            vertices.extend(chain);
            components.push(ids);
        }
        Skeleton {
            vertices,
            simplices,
            components,
            dim_s,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Simplex dimension: 1 for segments, 2 for triangles, and so on.
    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    fn chains(&self) -> Vec<Vec<Point>> {
        self.components
            .iter()
            .map(|ids| ids.iter().map(|&i| self.vertices[i].clone()).collect())
            .collect()
    }
}

/// Join the top `k` table centers in rank order into a single polyline.
///
/// Faithful to the ranked construction: it can zigzag, since rank order is by
/// count, not by position. `k = 0` yields an empty skeleton.
pub fn chain_by_rank(table: &DensityTable, k: usize) -> Result<Skeleton> {
    if k > table.len() {
        return Err(Error::RankOutOfRange { k, len: table.len() });
    }
    if k == 0 {
        return Ok(Skeleton::empty(1));
    }
    Ok(Skeleton::from_chains(vec![table.top_centers(k)], 1))
}

/// Greedy nearest-neighbor polyline over `centers`, which must be in table
/// (descending-count) order.
///
/// Starting from the top-ranked center, the chain repeatedly appends the
/// unused center nearest to its tail; distance ties go to the lower-ranked
/// index. With `gap_factor` set, a nearest distance above `gap_factor * r`
/// closes the component and a new one starts at the highest-ranked unused
/// center, so well-separated structures come out as separate components.
pub fn chain_greedy(centers: &[Point], gap_factor: Option<f64>, r: f64) -> Result<Skeleton> {
    if centers.is_empty() {
        return Err(Error::NoCenters);
    }
    let dim = centers[0].dim();
    for c in centers {
        if c.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: c.dim(),
            });
        }
    }
    let gap_limit = gap_factor.map(|g| g * r);

    let mut used = vec![false; centers.len()];
    let mut remaining = centers.len();
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![0usize];
    used[0] = true;
    remaining -= 1;

    while remaining > 0 {
        let tail = &centers[*current.last().unwrap()];
        let mut best: Option<(f64, usize)> = None;
        for (i, c) in centers.iter().enumerate() {
            if used[i] {
                continue;
            }
            let d = dist_slices(tail.coords(), c.coords());
            // Strict < keeps the lowest index on ties.
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, i));
            }
        }
        let (d, next) = best.expect("remaining > 0");
        if gap_limit.is_some_and(|limit| d > limit) {
            chains.push(std::mem::take(&mut current));
            let restart = used.iter().position(|&u| !u).expect("remaining > 0");
            current.push(restart);
            used[restart] = true;
        } else {
            current.push(next);
            used[next] = true;
        }
        remaining -= 1;
    }
    chains.push(current);

    Ok(Skeleton::from_chains(
        chains
            .into_iter()
            .map(|ids| ids.iter().map(|&i| centers[i].clone()).collect())
            .collect(),
        1,
    ))
}

/// Triangles over three consecutive chain vertices; a chain of `m` vertices
/// yields `m - 2` triangles. Multi-component chains are processed per
/// component.
pub fn triangle_strip(chain: &Skeleton) -> Result<Skeleton> {
    simplex_strip(chain, 2)
}

/// Sliding windows of `s + 1` consecutive vertices per component. `s = 1`
/// reproduces the chain; `s = 2` is [`triangle_strip`]. Components shorter
/// than `s + 1` contribute no simplices.
pub fn simplex_strip(chain: &Skeleton, s: usize) -> Result<Skeleton> {
    if s == 0 {
        return Err(Error::InvalidParam {
            name: "s",
            reason: "simplex dimension must be >= 1".into(),
        });
    }
    if chain.dim_s != 1 {
        return Err(Error::InvalidParam {
            name: "chain",
            reason: format!("expected a chain with s = 1, got s = {}", chain.dim_s),
        });
    }
    Ok(Skeleton::from_chains(chain.chains(), s))
}

/// Fraction of dataset points within the closed `radius` of at least one
/// skeleton vertex.
pub fn vertex_coverage(dataset: &Dataset, skel: &Skeleton, radius: f64) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if skel.vertices.is_empty() {
        return Ok(0.0);
    }
    let covered = dataset
        .points()
        .iter()
        .filter(|p| {
            skel.vertices
                .iter()
                .any(|v| dist_slices(p.coords(), v.coords()) <= radius)
        })
        .count();
    Ok(covered as f64 / dataset.len() as f64)
}

/// One-sided Hausdorff distance from the skeleton's vertex set to `truth`:
/// the worst vertex's distance to its nearest truth point.
pub fn vertex_to_truth_distance(skel: &Skeleton, truth: &[Point]) -> Result<f64> {
    if skel.vertices.is_empty() {
        return Err(Error::EmptyInput("skeleton vertex set"));
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("truth point set"));
    }
    let mut worst = 0.0f64;
    for v in &skel.vertices {
        let nearest = truth
            .iter()
            .map(|t| dist_slices(v.coords(), t.coords()))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst)
}
