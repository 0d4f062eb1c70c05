//! Reference methods to compare skeletons against: the least-squares
//! regression line (vertical residuals) and PCA (perpendicular residuals).
//!
//! PCA runs on the population covariance (1/J normalization) via power
//! iteration with deflation, so no linear-algebra dependency is needed. The
//! start vector is a seeded pseudo-random unit vector, iterates are
//! re-orthogonalized against already-found directions each step, and a stage
//! whose image collapses below `1e-12` of the matrix scale is accepted as a
//! zero-variance direction.

use serde::Serialize;

use crate::geometry::{Dataset, Point};
use crate::rng::{gaussian_vec, SplitMix64};
use crate::{Error, Result};

/// Fitted line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegressionLine {
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(x, y)` samples, minimizing the squared
/// vertical residuals. All-equal `x` values have no slope/intercept
/// representation and are rejected.
pub fn fit_regression_line(samples: &[(f64, f64)]) -> Result<RegressionLine> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: samples.len(),
        });
    }
    let x0 = samples[0].0;
    if samples.iter().all(|&(x, _)| x == x0) {
        return Err(Error::VerticalLine);
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = samples.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in samples {
        let dx = x - mean_x;
        sxx += dx * dx;
        sxy += dx * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::VerticalLine);
    }
    let slope = sxy / sxx;
    Ok(RegressionLine {
        slope,
        intercept: mean_y - slope * mean_x,
    })
}

/// Sum of squared vertical residuals of `line` over `samples`.
pub fn regression_objective(line: &RegressionLine, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(x, y)| {
            let e = line.slope * x + line.intercept - y;
            e * e
        })
        .sum()
}

/// Centroid plus the leading principal directions of a dataset.
#[derive(Debug, Clone, Serialize)]
pub struct PrincipalFrame {
    pub mean: Point,
    /// Orthonormal directions, by descending variance.
    pub directions: Vec<Vec<f64>>,
    /// Eigenvalues of the population covariance; tiny negatives are clamped
    /// to zero.
    pub variances: Vec<f64>,
    /// `ties[i]` marks a direction whose variance is within `1e-9` of an
    /// adjacent reported variance; directions inside such a block are an
    /// arbitrary basis of the tied subspace, so tests must not pin them down.
    pub ties: Vec<bool>,
}

const START_SEED: u64 = 0x00c0_ffee_5eed;
const MAX_ITERS: usize = 10_000;
const DIRECTION_TOL: f64 = 1e-10;
const TIE_GAP: f64 = 1e-9;

/// Top `k` eigenpairs of a symmetric matrix by power iteration with
/// deflation, eigenvalues in descending order.
pub fn top_eigenpairs(matrix: &[Vec<f64>], k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = matrix.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParam {
            name: "k",
            reason: format!("must be in 1..={n}, got {k}"),
        });
    }
    let scale = matrix
        .iter()
        .flatten()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let zero_cut = 1e-12 * scale;

    let mut work: Vec<Vec<f64>> = matrix.to_vec();
    let mut rng = SplitMix64::new(START_SEED);
    let mut values = Vec::with_capacity(k);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);

    for _ in 0..k {
        let mut v = fresh_start(&mut rng, n, &vectors)?;
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..MAX_ITERS {
            let mut w = mat_vec(&work, &v);
            orthogonalize(&mut w, &vectors);
            let norm = vec_norm(&w);
            if norm <= zero_cut {
                // The deflated matrix annihilates v: a zero-variance
                // direction; v is already unit and orthogonal to the rest.
                converged = true;
                break;
            }
            for x in &mut w {
                *x /= norm;
            }
            residual = direction_change(&v, &w);
            v = w;
            if residual < DIRECTION_TOL {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                iters: MAX_ITERS,
                residual,
            });
        }
        let lambda = rayleigh(&work, &v);
        deflate(&mut work, lambda, &v);
        values.push(lambda);
        vectors.push(v);
    }

    // Deflation noise can leave near-tied stages a hair out of order.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    let values = order.iter().map(|&i| values[i]).collect();
    let vectors = order.iter().map(|&i| vectors[i].clone()).collect();
    Ok((values, vectors))
}

fn fresh_start(rng: &mut SplitMix64, n: usize, found: &[Vec<f64>]) -> Result<Vec<f64>> {
    for _ in 0..100 {
        let mut v = gaussian_vec(rng, n);
        orthogonalize(&mut v, found);
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            for x in &mut v {
                *x /= norm;
            }
            return Ok(v);
        }
    }
    Err(Error::NonConvergence {
        iters: 100,
        residual: f64::NAN,
    })
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for u in basis {
        let proj: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        for (x, &u_i) in v.iter_mut().zip(u) {
            *x -= proj * u_i;
        }
    }
}

fn vec_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn direction_change(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let flip: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum();
    diff.min(flip).sqrt()
}

fn rayleigh(m: &[Vec<f64>], v: &[f64]) -> f64 {
    mat_vec(m, v).iter().zip(v).map(|(a, b)| a * b).sum()
}

fn deflate(m: &mut [Vec<f64>], lambda: f64, v: &[f64]) {
    for (i, row) in m.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x -= lambda * v[i] * v[j];
        }
    }
}

/// Population covariance of the dataset and its centroid.
pub fn covariance(dataset: &Dataset) -> Result<(Point, Vec<Vec<f64>>)> {
    if dataset.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: dataset.len(),
        });
    }
    let n = dataset.dim();
    let j = dataset.len() as f64;
    let mut mean = vec![0.0; n];
    for p in dataset.points() {
        for (m, &c) in mean.iter_mut().zip(p.coords()) {
            *m += c;
        }
    }
    for m in &mut mean {
        *m /= j;
    }
    let mut cov = vec![vec![0.0; n]; n];
    for p in dataset.points() {
        let d: Vec<f64> = p.coords().iter().zip(&mean).map(|(c, m)| c - m).collect();
        for a in 0..n {
            for b in a..n {
                cov[a][b] += d[a] * d[b];
            }
        }
    }
    for a in 0..n {
        for b in a..n {
            cov[a][b] /= j;
            cov[b][a] = cov[a][b];
        }
    }
    Ok((Point::new(mean)?, cov))
}

/// Fit the top `k` principal directions of the dataset.
pub fn fit_pca(dataset: &Dataset, k: usize) -> Result<PrincipalFrame> {
    let n = dataset.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParam {
            name: "k",
            reason: format!("must be in 1..={n}, got {k}"),
        });
    }
    let (mean, cov) = covariance(dataset)?;
    let (raw_values, directions) = top_eigenpairs(&cov, k)?;
    let variances: Vec<f64> = raw_values.iter().map(|&v| v.max(0.0)).collect();
    debug_assert!(raw_values.iter().all(|&v| v >= -1e-12 * (1.0 + variances[0])));
    let mut ties = vec![false; k];
    for i in 1..k {
        if variances[i - 1] - variances[i] < TIE_GAP {
            ties[i - 1] = true;
            ties[i] = true;
        }
    }
    Ok(PrincipalFrame {
        mean,
        directions,
        variances,
        ties,
    })
}

/// Sum over the dataset of squared distances to the affine subspace through
/// the frame's mean spanned by its first `k` directions.
pub fn pca_objective(dataset: &Dataset, frame: &PrincipalFrame, k: usize) -> Result<f64> {
    if k > frame.directions.len() {
        return Err(Error::InvalidParam {
            name: "k",
            reason: format!(
                "frame has {} directions, need {k}",
                frame.directions.len()
            ),
        });
    }
    let mut total = 0.0;
    for p in dataset.points() {
        let mut resid: Vec<f64> = p
            .coords()
            .iter()
            .zip(frame.mean.coords())
            .map(|(c, m)| c - m)
            .collect();
        for u in &frame.directions[..k] {
            let proj: f64 = u.iter().zip(&resid).map(|(a, b)| a * b).sum();
            for (x, &u_i) in resid.iter_mut().zip(u) {
                *x -= proj * u_i;
            }
        }
        total += resid.iter().map(|x| x * x).sum::<f64>();
    }
    Ok(total)
}
