#![allow(dead_code, clippy::needless_range_loop)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uids::SparseDataset;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gaussian features times `scales`, labels drawn from a logistic model.
/// Both classes are always present.
pub fn synthetic_dense(n: usize, scales: &[f64], seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = scales.len();
    let truth: Vec<f64> = (0..d).map(|j| normal(&mut rng) / scales[j]).collect();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let row: Vec<f64> = scales.iter().map(|s| s * normal(&mut rng)).collect();
        let z: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum();
        let p = 1.0 / (1.0 + (-z).exp());
        let label = match i {
            0 => 0,
            1 => 1,
            _ => u8::from(rng.gen::<f64>() < p),
        };
        x.push(row);
        y.push(label);
    }
    (x, y)
}

pub fn synthetic(n: usize, d: usize, seed: u64) -> SparseDataset {
    let (x, y) = synthetic_dense(n, &vec![1.0; d], seed);
    SparseDataset::from_dense(&x, y).unwrap()
}

pub fn to_dense(ds: &SparseDataset) -> Vec<Vec<f64>> {
    (0..ds.n_rows())
        .map(|i| {
            let mut v = vec![0.0; ds.n_features()];
            let r = ds.row(i);
            for (&j, &x) in r.indices.iter().zip(r.values) {
                v[j] = x;
            }
            v
        })
        .collect()
}

pub fn sig(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

pub fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Unregularized logloss of one dense row.
pub fn logloss(theta: &[f64], x: &[f64], y: u8) -> f64 {
    let p = sig(dotv(theta, x));
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// `∇ℓ_i = (σ − y)x + Cθ`.
pub fn reg_loss_grad(theta: &[f64], x: &[f64], y: u8, c: f64) -> Vec<f64> {
    let r = sig(dotv(theta, x)) - f64::from(y);
    x.iter().zip(theta).map(|(xi, t)| r * xi + c * t).collect()
}

/// `(1/n) Σ σ(1−σ) x xᵀ + C·I` built explicitly.
pub fn dense_hessian(theta: &[f64], x: &[Vec<f64>], c: f64) -> Vec<Vec<f64>> {
    let d = theta.len();
    let n = x.len() as f64;
    let mut h = vec![vec![0.0; d]; d];
    for row in x {
        let p = sig(dotv(theta, row));
        let w = p * (1.0 - p) / n;
        for a in 0..d {
            for b in 0..d {
                h[a][b] += w * row[a] * row[b];
            }
        }
    }
    for (a, r) in h.iter_mut().enumerate() {
        r[a] += c;
    }
    h
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut r = r.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..=n {
                m[r][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale = b.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-8);
    diff / scale
}
