//! Cubic grid of step `r`, ball counts at grid nodes, and the ranked density
//! table.
//!
//! The grid is never materialized: occupied cells live in a hash map from
//! integer cell keys to point indices, and ball centers are restricted to the
//! grid nodes nearest to at least one data point (at most J of them). Counting
//! a ball walks the occupied cells and skips any cell whose key is further
//! than `ceil(radius/r)` from the center's key in some coordinate; such a cell
//! is separated from the center by more than `radius` along that coordinate
//! alone, so it cannot intersect the ball. This keeps counting at
//! O(#occupied cells * N) per center with no 3^N neighbor enumeration.
//!
//! Determinism contract: for a fixed dataset and parameters the table is
//! byte-identical across runs and across any worker count. Counts are
//! schedule-independent integers and the final sort breaks count ties by
//! lexicographic node key.

use std::collections::{BTreeSet, HashMap};
use std::thread;

use serde::Serialize;

use crate::geometry::{dist_slices, BBox, Dataset, Point};
use crate::{Error, Result};

/// Integer cell key: coordinate `i` of the cell holding point `x` is
/// `floor(x_i / r)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CellKey(Vec<i64>);

impl CellKey {
    /// Key of the cell containing `coords`.
    pub fn of_point(coords: &[f64], r: f64) -> CellKey {
        CellKey(coords.iter().map(|&c| (c / r).floor() as i64).collect())
    }

    /// Key of the grid node nearest to `coords`; exact midpoints round
    /// toward +infinity.
    pub fn nearest_node(coords: &[f64], r: f64) -> CellKey {
        CellKey(
            coords
                .iter()
                .map(|&c| (c / r + 0.5).floor() as i64)
                .collect(),
        )
    }

    /// Coordinates of the grid node this key names (`key * r`).
    pub fn node_position(&self, r: f64) -> Point {
        Point::new(self.0.iter().map(|&k| k as f64 * r).collect())
            .expect("grid node coordinates are finite")
    }

    pub fn indices(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Sparse spatial index: occupied cells only, each holding the indices of its
/// points. Cells partition the dataset.
pub struct GridIndex<'a> {
    dataset: &'a Dataset,
    r: f64,
    cells: HashMap<CellKey, Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn cells(&self) -> &HashMap<CellKey, Vec<usize>> {
        &self.cells
    }

    pub fn occupied_cells(&self) -> usize {
        self.cells.len()
    }
}

/// Partition the dataset into grid cells of step `r`.
pub fn build_grid_index(dataset: &Dataset, r: f64) -> Result<GridIndex<'_>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidGridStep(r));
    }
    let mut cells: HashMap<CellKey, Vec<usize>> = HashMap::new();
    for (i, p) in dataset.points().iter().enumerate() {
        cells
            .entry(CellKey::of_point(p.coords(), r))
            .or_default()
            .push(i);
    }
    Ok(GridIndex { dataset, r, cells })
}

/// Grid nodes nearest to at least one data point, deduplicated and in
/// lexicographic key order. At most J nodes.
pub fn candidate_centers(index: &GridIndex) -> Vec<CellKey> {
    let mut nodes = BTreeSet::new();
    for p in index.dataset.points() {
        nodes.insert(CellKey::nearest_node(p.coords(), index.r));
    }
    nodes.into_iter().collect()
}

/// All grid nodes whose coordinates lie inside the closed bounding box.
/// Exponential in the dimension, hence the hard caps; meant for oracle checks
/// and small-N scans.
pub fn dense_nodes(bbox: &BBox, r: f64) -> Result<Vec<CellKey>> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidGridStep(r));
    }
    let dim = bbox.dim();
    if dim > 3 {
        return Err(Error::DenseNodesDimension(dim));
    }
    let mut ranges: Vec<Vec<i64>> = Vec::with_capacity(dim);
    let mut total: u128 = 1;
    for i in 0..dim {
        let lo = (bbox.min()[i] / r).floor() as i64;
        let hi = (bbox.max()[i] / r).ceil() as i64;
        let ks: Vec<i64> = (lo..=hi)
            .filter(|&k| {
                let c = k as f64 * r;
                bbox.min()[i] <= c && c <= bbox.max()[i]
            })
            .collect();
        total = total.saturating_mul(ks.len() as u128);
        ranges.push(ks);
    }
    const CAP: u128 = 5_000_000;
    if total > CAP {
        return Err(Error::DenseNodesTooMany(total));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut stack = vec![0usize; dim];
    if ranges.iter().any(|ks| ks.is_empty()) {
        return Ok(out);
    }
    loop {
        out.push(CellKey(
            stack.iter().enumerate().map(|(i, &j)| ranges[i][j]).collect(),
        ));
        let mut axis = dim;
        while axis > 0 {
            axis -= 1;
            stack[axis] += 1;
            if stack[axis] < ranges[axis].len() {
                break;
            }
            stack[axis] = 0;
            if axis == 0 {
                return Ok(out);
            }
        }
    }
}

/// Exact number of dataset points in the closed ball around `center`.
pub fn count_ball(center: &Point, radius: f64, index: &GridIndex) -> Result<usize> {
    if center.dim() != index.dataset.dim() {
        return Err(Error::DimensionMismatch {
            expected: index.dataset.dim(),
            got: center.dim(),
        });
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParam {
            name: "radius",
            reason: format!("must be positive and finite, got {radius}"),
        });
    }
    let center_key = CellKey::of_point(center.coords(), index.r);
    Ok(count_ball_filtered(center.coords(), &center_key, radius, index))
}

fn count_ball_filtered(
    center: &[f64],
    center_key: &CellKey,
    radius: f64,
    index: &GridIndex,
) -> usize {
    let reach = (radius / index.r).ceil() as i64;
    let mut n = 0;
    'cells: for (key, members) in &index.cells {
        for (a, b) in key.0.iter().zip(&center_key.0) {
            if (a - b).abs() > reach {
                continue 'cells;
            }
        }
        for &pi in members {
            if dist_slices(index.dataset.point(pi).coords(), center) <= radius {
                n += 1;
            }
        }
    }
    n
}

/// One row of the density table: a grid node, its coordinates, and the exact
/// number of points in the closed ball of the table's radius around it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub node: CellKey,
    pub center: Point,
    pub count: usize,
}

/// Ball counts at grid nodes, sorted by count descending; count ties are
/// ordered by lexicographic node key. Zero-count nodes are dropped.
#[derive(Debug, Clone, Serialize)]
pub struct DensityTable {
    entries: Vec<TableEntry>,
    radius: f64,
}

impl DensityTable {
    /// Assemble a table from raw entries, enforcing the canonical order.
    pub fn new(mut entries: Vec<TableEntry>, radius: f64) -> DensityTable {
        entries.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.node.cmp(&b.node)));
        DensityTable { entries, radius }
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Counting radius the table was built with.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Centers of the top `k` entries, in table order.
    pub fn top_centers(&self, k: usize) -> Vec<Point> {
        self.entries[..k].iter().map(|e| e.center.clone()).collect()
    }
}

/// Where ball centers come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeMode {
    /// Nodes nearest to data points (at most J candidates).
    #[default]
    Candidates,
    /// Every node inside the bounding box; dimension <= 3 only.
    Dense,
}

/// Options for [`density_table`].
#[derive(Debug, Clone, Copy)]
pub struct DensityOpts {
    /// Counting radius as a multiple of the grid step; 1.0 counts in balls of
    /// radius `r`. At spacing `r` such balls stop covering space once
    /// `sqrt(N)/2 > radius_scale`, which is why this is exposed at all.
    pub radius_scale: f64,
    pub node_mode: NodeMode,
    /// Worker threads for counting; 0 defers to `SKELSCAN_THREADS` (where 0 or
    /// unset means all available cores).
    pub workers: usize,
}

impl Default for DensityOpts {
    fn default() -> Self {
        DensityOpts {
            radius_scale: 1.0,
            node_mode: NodeMode::Candidates,
            workers: 0,
        }
    }
}

/// Resolve a worker count: explicit request, else `SKELSCAN_THREADS`, else all
/// available cores.
pub fn effective_workers(requested: usize) -> usize {
    if requested > 0 {
        return requested;
    }
    if let Ok(v) = std::env::var("SKELSCAN_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                return n;
            }
        }
    }
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Count balls at every node for the dataset and sort the nonzero counts into
/// a [`DensityTable`]. An empty dataset yields an empty table.
pub fn density_table(dataset: &Dataset, r: f64, opts: &DensityOpts) -> Result<DensityTable> {
    if !(opts.radius_scale.is_finite() && opts.radius_scale > 0.0) {
        return Err(Error::InvalidParam {
            name: "radius_scale",
            reason: format!("must be positive and finite, got {}", opts.radius_scale),
        });
    }
    let radius = opts.radius_scale * r;
    if dataset.is_empty() {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidGridStep(r));
        }
        return Ok(DensityTable {
            entries: Vec::new(),
            radius,
        });
    }
    let index = build_grid_index(dataset, r)?;
    let nodes = match opts.node_mode {
        NodeMode::Candidates => candidate_centers(&index),
        NodeMode::Dense => dense_nodes(dataset.bbox().expect("nonempty dataset"), r)?,
    };
    let counts = count_nodes(&index, &nodes, radius, effective_workers(opts.workers));
    let entries = nodes
        .into_iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(node, count)| TableEntry {
            center: node.node_position(r),
            node,
            count,
        })
        .collect();
    Ok(DensityTable::new(entries, radius))
}

/// Ball counts for `nodes`, in input order. Work is split into contiguous
/// chunks so the result does not depend on scheduling.
fn count_nodes(index: &GridIndex, nodes: &[CellKey], radius: f64, workers: usize) -> Vec<usize> {
    let count_one = |node: &CellKey| {
        let center = node.node_position(index.r);
        let center_key = CellKey::of_point(center.coords(), index.r);
        count_ball_filtered(center.coords(), &center_key, radius, index)
    };
    let workers = workers.min(nodes.len()).max(1);
    if workers == 1 {
        return nodes.iter().map(count_one).collect();
    }
    let chunk = nodes.len().div_ceil(workers);
    let mut out = vec![0usize; nodes.len()];
    thread::scope(|scope| {
        for (node_chunk, out_chunk) in nodes.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(move || {
                for (node, slot) in node_chunk.iter().zip(out_chunk) {
                    *slot = count_one(node);
                }
            });
        }
    });
    out
}

/// Number of leading entries whose count strictly exceeds `nu`.
pub fn threshold_k(table: &DensityTable, nu: usize) -> usize {
    table.entries.partition_point(|e| e.count > nu)
}

/// How many dataset points lie within the table's counting radius of at least
/// one of the top `k` centers, and how many do not.
///
/// At `radius_scale = 1` and large N the balls need not cover the data even
/// with every node retained; this is the diagnostic that quantifies it.
pub fn coverage_report(dataset: &Dataset, table: &DensityTable, k: usize) -> Result<(usize, usize)> {
    if k > table.len() {
        return Err(Error::RankOutOfRange { k, len: table.len() });
    }
    let centers = &table.entries[..k];
    let mut covered = 0;
    for p in dataset.points() {
        if centers
            .iter()
            .any(|e| dist_slices(p.coords(), e.center.coords()) <= table.radius)
        {
            covered += 1;
        }
    }
    Ok((covered, dataset.len() - covered))
}
