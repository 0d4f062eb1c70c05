//! Shared test oracles. Everything here is written independently of the
//! library's implementation paths: counting scans all points, the
//! eigensolver is cyclic Jacobi, node enumeration is done by hand.
#![allow(dead_code)]

use skelscan::geometry::{distance, Dataset, Point};
use skelscan::rng::{gaussian_vec, SplitMix64};

pub fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).unwrap()
}

pub fn uniform_dataset(rng: &mut SplitMix64, j: usize, dim: usize, lo: f64, hi: f64) -> Dataset {
    Dataset::new(
        (0..j)
            .map(|_| pt(&(0..dim).map(|_| rng.range(lo, hi)).collect::<Vec<_>>()))
            .collect(),
    )
    .unwrap()
}

/// Brute-force closed-ball count over every point.
pub fn brute_force_count(dataset: &Dataset, center: &Point, radius: f64) -> usize {
    dataset
        .points()
        .iter()
        .filter(|p| distance(p, center).unwrap() <= radius)
        .count()
}

/// All eigenpairs of a symmetric matrix by cyclic Jacobi rotations,
/// eigenvalues in descending order.
pub fn jacobi_eigen(matrix: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- G^T A G with G the rotation in the (p, q) plane.
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                // V <- V G accumulates eigenvectors in the columns.
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].partial_cmp(&a[x][x]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

/// ||u - w|| up to sign.
pub fn direction_gap(u: &[f64], w: &[f64]) -> f64 {
    let diff: f64 = u.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum();
    let flip: f64 = u.iter().zip(w).map(|(a, b)| (a + b) * (a + b)).sum();
    diff.min(flip).sqrt()
}

/// Random orthonormal basis of R^n by Gram-Schmidt over Gaussian draws.
pub fn random_orthonormal(rng: &mut SplitMix64, n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut v = gaussian_vec(rng, n);
        for u in &basis {
            let proj: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            for (x, &ui) in v.iter_mut().zip(u) {
                *x -= proj * ui;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for x in &mut v {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    basis
}

/// Symmetric matrix with prescribed spectrum: Q diag(values) Q^T.
pub fn matrix_with_spectrum(basis: &[Vec<f64>], values: &[f64]) -> Vec<Vec<f64>> {
    let n = basis.len();
    let mut m = vec![vec![0.0; n]; n];
    for (u, &lambda) in basis.iter().zip(values) {
        for i in 0..n {
            for j in 0..n {
                m[i][j] += lambda * u[i] * u[j];
            }
        }
    }
    // Force exact symmetry against rounding.
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
    m
}
