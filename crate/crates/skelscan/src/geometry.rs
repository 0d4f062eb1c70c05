//! Points, datasets, and Euclidean distance.
//!
//! Everything downstream addresses points by their zero-based index into a
//! [`Dataset`]; coordinates are never duplicated into the spatial index.
//! All types are immutable after construction and safe to share across
//! threads.

use serde::Serialize;

use crate::{Error, Result};

/// A point in R^N with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Build a point, rejecting NaN/Inf coordinates and zero dimension.
    pub fn new(coords: Vec<f64>) -> Result<Point> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("coordinate vector"));
        }
        for (i, &c) in coords.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::NonFiniteCoordinate { index: i, value: c });
            }
        }
        Ok(Point { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Axis-aligned bounding box with closed per-coordinate intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl BBox {
    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(self.min.iter().zip(&self.max))
                .all(|(&c, (&lo, &hi))| lo <= c && c <= hi)
    }
}

/// Per-coordinate min and max over a nonempty, dimension-uniform point set.
pub fn bounding_box(points: &[Point]) -> Result<BBox> {
    let first = points.first().ok_or(Error::EmptyDataset)?;
    let dim = first.dim();
    let mut min = first.coords().to_vec();
    let mut max = min.clone();
    for p in &points[1..] {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.dim(),
            });
        }
        for (i, &c) in p.coords().iter().enumerate() {
            if c < min[i] {
                min[i] = c;
            }
            if c > max[i] {
                max[i] = c;
            }
        }
    }
    Ok(BBox { min, max })
}

/// The full point set together with its dimension and bounding box.
///
/// `J = 0` is representable (via [`Dataset::empty`]); operations that cannot
/// handle it say so in their own contracts.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Vec<Point>,
    dim: usize,
    bbox: Option<BBox>,
}

impl Dataset {
    /// Build a dataset from a nonempty point list with uniform dimension.
    pub fn new(points: Vec<Point>) -> Result<Dataset> {
        let bbox = bounding_box(&points)?;
        Ok(Dataset {
            dim: bbox.dim(),
            bbox: Some(bbox),
            points,
        })
    }

    /// A dataset with no points; `dim` must still be fixed up front.
    pub fn empty(dim: usize) -> Dataset {
        Dataset {
            points: Vec::new(),
            dim,
            bbox: None,
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `None` iff the dataset is empty.
    pub fn bbox(&self) -> Option<&BBox> {
        self.bbox.as_ref()
    }
}

/// Euclidean distance between two points of equal dimension.
///
/// Squared differences accumulate in a fixed left-to-right order, so the
/// result is bitwise reproducible and exactly symmetric (each `(a-b)^2`
/// equals `(b-a)^2` in IEEE arithmetic).
pub fn distance(a: &Point, b: &Point) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(dist_slices(a.coords(), b.coords()))
}

pub(crate) fn dist2_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

pub(crate) fn dist_slices(a: &[f64], b: &[f64]) -> f64 {
    dist2_slices(a, b).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    fn pt(coords: &[f64]) -> Point {
        Point::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn pythagorean_triple() {
        assert_eq!(distance(&pt(&[0.0, 0.0]), &pt(&[3.0, 4.0])).unwrap(), 5.0);
    }

    #[test]
    fn identical_points_have_zero_distance() {
        for x in [-3.5, 0.0, 1e9, 1e-12] {
            assert_eq!(distance(&pt(&[x]), &pt(&[x])).unwrap(), 0.0);
        }
    }

    #[test]
    fn distance_matches_two_pass_oracle_in_r7() {
        // Independent oracle: collect squared differences first, then sum in a
        // second pass.
        let mut rng = SplitMix64::new(0x9e37);
        for _ in 0..50 {
            let a: Vec<f64> = (0..7).map(|_| rng.range(-10.0, 10.0)).collect();
            let b: Vec<f64> = (0..7).map(|_| rng.range(-10.0, 10.0)).collect();
            let sq: Vec<f64> = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y) * (x - y))
                .collect();
            let oracle = sq.iter().sum::<f64>().sqrt();
            let got = distance(&pt(&a), &pt(&b)).unwrap();
            assert!((got - oracle).abs() <= 1e-12, "{got} vs {oracle}");
        }
    }

    #[test]
    fn dimension_mismatch_reports_both_dims() {
        let err = distance(&pt(&[1.0]), &pt(&[1.0, 2.0])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('1') && msg.contains('2'), "{msg}");
    }

    #[test]
    fn bbox_two_points() {
        let b = bounding_box(&[pt(&[0.0, 1.0]), pt(&[2.0, -1.0])]).unwrap();
        assert_eq!(b.min(), &[0.0, -1.0]);
        assert_eq!(b.max(), &[2.0, 1.0]);
    }

    #[test]
    fn bbox_single_point_is_degenerate() {
        let b = bounding_box(&[pt(&[0.5, -2.0, 7.0])]).unwrap();
        assert_eq!(b.min(), b.max());
        assert_eq!(b.min(), &[0.5, -2.0, 7.0]);
    }

    #[test]
    fn bbox_empty_input_errors() {
        assert!(matches!(bounding_box(&[]), Err(Error::EmptyDataset)));
    }

    #[test]
    fn bbox_contains_all_members_r4() {
        let mut rng = SplitMix64::new(11);
        let pts: Vec<Point> = (0..100)
            .map(|_| pt(&(0..4).map(|_| rng.range(-5.0, 5.0)).collect::<Vec<_>>()))
            .collect();
        let b = bounding_box(&pts).unwrap();
        // Membership oracle: every point is inside the closed box.
        assert!(pts.iter().all(|p| b.contains(p)));
    }

    #[test]
    fn bbox_idempotent_on_its_corners() {
        let b = bounding_box(&[pt(&[0.0, 1.0]), pt(&[2.0, -1.0])]).unwrap();
        let corners = vec![
            pt(&[b.min()[0], b.min()[1]]),
            pt(&[b.min()[0], b.max()[1]]),
            pt(&[b.max()[0], b.min()[1]]),
            pt(&[b.max()[0], b.max()[1]]),
        ];
        assert_eq!(bounding_box(&corners).unwrap(), b);
    }

    #[test]
    fn point_rejects_non_finite() {
        assert!(Point::new(vec![1.0, f64::NAN]).is_err());
        assert!(Point::new(vec![f64::INFINITY]).is_err());
        assert!(Point::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn distance_is_exactly_symmetric(
            (a, b) in (1usize..9).prop_flat_map(|dim| (
                proptest::collection::vec(-1e6f64..1e6, dim),
                proptest::collection::vec(-1e6f64..1e6, dim),
            )),
        ) {
            let (pa, pb) = (pt(&a), pt(&b));
            prop_assert_eq!(
                distance(&pa, &pb).unwrap().to_bits(),
                distance(&pb, &pa).unwrap().to_bits()
            );
        }

        #[test]
        fn triangle_inequality(
            dim in 1usize..6,
            seed in any::<u64>(),
        ) {
            let mut rng = SplitMix64::new(seed);
            let draw = |rng: &mut SplitMix64| {
                pt(&(0..dim).map(|_| rng.range(-100.0, 100.0)).collect::<Vec<_>>())
            };
            let (a, b, c) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let ab = distance(&a, &b).unwrap();
            let bc = distance(&b, &c).unwrap();
            let ac = distance(&a, &c).unwrap();
            prop_assert!(ac <= (ab + bc) * (1.0 + 1e-9));
        }
    }
}
