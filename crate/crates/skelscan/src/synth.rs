//! Deterministic synthetic datasets with planted low-dimensional structure.
//!
//! Generation is a pure function of the spec: one SplitMix64 stream (see
//! [`crate::rng`]) seeded by `spec.seed` drives everything, and the draw
//! order is fixed so the same spec reproduces the same bits in any
//! implementation of the scheme:
//!
//! 1. structure parameters (anchors/controls/centers, coordinate-major);
//! 2. per structured point: its anchor parameters, then - only when
//!    `noise_sigma > 0` - a Gaussian noise vector of the full dimension
//!    (drawn as whole polar pairs, spare half discarded on odd dimensions);
//! 3. background points, uniform in the box, coordinate-major.
//!
//! Structured points come first in the dataset, then background points, so
//! callers can split them by index.

use serde::{Deserialize, Serialize};

use crate::geometry::{Dataset, Point};
use crate::rng::{gaussian_vec, SplitMix64};
use crate::{Error, Result};

/// What gets planted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SynthKind {
    /// Segment between two uniform endpoints.
    Line,
    /// Quadratic Bezier arc through three uniform control points.
    PolylineCurve,
    /// 2-D patch spanned by two random orthonormal directions.
    Plane,
    /// Tight blobs around uniform centers; point `i` belongs to blob
    /// `i % count`.
    Clusters { count: usize },
}

impl SynthKind {
    /// Parse the CLI spelling of a kind.
    pub fn parse(name: &str, clusters: usize) -> Result<SynthKind> {
        match name {
            "line" => Ok(SynthKind::Line),
            "polyline-curve" => Ok(SynthKind::PolylineCurve),
            "plane" => Ok(SynthKind::Plane),
            "clusters" => Ok(SynthKind::Clusters { count: clusters }),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

/// Full description of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    #[serde(flatten)]
    pub kind: SynthKind,
    pub dim: usize,
    /// Points sampled on the planted structure.
    pub structured: usize,
    /// Uniform background points.
    pub background: usize,
    /// Isotropic Gaussian noise scale applied to structured points.
    pub noise_sigma: f64,
    pub seed: u64,
    /// The background box is `[box_min, box_max]^dim`; structure parameters
    /// are drawn from the same box.
    pub box_min: f64,
    pub box_max: f64,
}

impl SynthSpec {
    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParam {
                name: "dim",
                reason: "must be >= 1".into(),
            });
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParam {
                name: "noise_sigma",
                reason: format!("must be >= 0, got {}", self.noise_sigma),
            });
        }
        if !(self.box_min.is_finite() && self.box_max.is_finite() && self.box_min < self.box_max) {
            return Err(Error::InvalidParam {
                name: "box",
                reason: format!("need box_min < box_max, got [{}, {}]", self.box_min, self.box_max),
            });
        }
        if let SynthKind::Clusters { count } = self.kind {
            if count == 0 {
                return Err(Error::InvalidParam {
                    name: "clusters",
                    reason: "must be >= 1".into(),
                });
            }
        }
        if let SynthKind::Plane = self.kind {
            if self.dim < 2 {
                return Err(Error::InvalidParam {
                    name: "dim",
                    reason: "plane needs dim >= 2".into(),
                });
            }
        }
        Ok(())
    }
}

enum Structure {
    Line { a: Vec<f64>, b: Vec<f64> },
    Curve { p0: Vec<f64>, p1: Vec<f64>, p2: Vec<f64> },
    Plane { origin: Vec<f64>, u: Vec<f64>, v: Vec<f64>, extent: f64 },
    Clusters { centers: Vec<Vec<f64>> },
}

fn uniform_vec(rng: &mut SplitMix64, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.range(lo, hi)).collect()
}

fn unit(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v {
        *x /= norm;
    }
}

impl Structure {
    fn draw(spec: &SynthSpec, rng: &mut SplitMix64) -> Structure {
        let (lo, hi, dim) = (spec.box_min, spec.box_max, spec.dim);
        match spec.kind {
            SynthKind::Line => Structure::Line {
                a: uniform_vec(rng, dim, lo, hi),
                b: uniform_vec(rng, dim, lo, hi),
            },
            SynthKind::PolylineCurve => Structure::Curve {
                p0: uniform_vec(rng, dim, lo, hi),
                p1: uniform_vec(rng, dim, lo, hi),
                p2: uniform_vec(rng, dim, lo, hi),
            },
            SynthKind::Plane => {
                let origin = uniform_vec(rng, dim, lo, hi);
                let mut u = gaussian_vec(rng, dim);
                unit(&mut u);
                let mut v = gaussian_vec(rng, dim);
                let proj: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (x, &u_i) in v.iter_mut().zip(&u) {
                    *x -= proj * u_i;
                }
                unit(&mut v);
                Structure::Plane {
                    origin,
                    u,
                    v,
                    extent: (hi - lo) / 2.0,
                }
            }
            SynthKind::Clusters { count } => Structure::Clusters {
                centers: (0..count).map(|_| uniform_vec(rng, dim, lo, hi)).collect(),
            },
        }
    }

    fn anchor(&self, i: usize, rng: &mut SplitMix64) -> Vec<f64> {
        match self {
            Structure::Line { a, b } => {
                let t = rng.next_f64();
                a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
            }
            Structure::Curve { p0, p1, p2 } => {
                let t = rng.next_f64();
                let (w0, w1, w2) = ((1.0 - t) * (1.0 - t), 2.0 * (1.0 - t) * t, t * t);
                (0..p0.len())
                    .map(|c| w0 * p0[c] + w1 * p1[c] + w2 * p2[c])
                    .collect()
            }
            Structure::Plane { origin, u, v, extent } => {
                let a = rng.range(-extent / 2.0, extent / 2.0);
                let b = rng.range(-extent / 2.0, extent / 2.0);
                origin
                    .iter()
                    .zip(u.iter().zip(v))
                    .map(|(o, (ui, vi))| o + a * ui + b * vi)
                    .collect()
            }
            Structure::Clusters { centers } => centers[i % centers.len()].clone(),
        }
    }
}

/// Generate the dataset plus the noiseless anchor of every structured point.
pub fn generate(spec: &SynthSpec) -> Result<(Dataset, Vec<Point>)> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let structure = Structure::draw(spec, &mut rng);

    let mut points = Vec::with_capacity(spec.structured + spec.background);
    let mut truth = Vec::with_capacity(spec.structured);
    for i in 0..spec.structured {
        let anchor = structure.anchor(i, &mut rng);
        let coords = if spec.noise_sigma > 0.0 {
            let noise = gaussian_vec(&mut rng, spec.dim);
            anchor
                .iter()
                .zip(&noise)
                .map(|(a, g)| a + spec.noise_sigma * g)
                .collect()
        } else {
            anchor.clone()
        };
        truth.push(Point::new(anchor)?);
        points.push(Point::new(coords)?);
    }
    for _ in 0..spec.background {
        points.push(Point::new(uniform_vec(
            &mut rng,
            spec.dim,
            spec.box_min,
            spec.box_max,
        ))?);
    }

    let dataset = if points.is_empty() {
        Dataset::empty(spec.dim)
    } else {
        Dataset::new(points)?
    };
    Ok((dataset, truth))
}
