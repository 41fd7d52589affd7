//! Distributional-robustness diagnostics.
//!
//! The worst-case expected loss over the χ² ball
//! `{Q : E_P[½(1 − dQ/dP)²] ≤ δ}` equals the dual
//!
//! ```text
//! inf_η  √(2δ+1) · E_P[(l − η)₊²]^½ + η
//! ```
//!
//! which is convex in `η`. `Γ = ‖θ̃ − θ̂‖²` measures how far a subset model
//! moved from the full-set model.

use thiserror::Error;

use crate::linalg::sq_distance;
use crate::model::ModelParams;

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("loss vector is empty")]
    Empty,
    #[error("losses must be finite")]
    NonFinite,
    #[error("radius must be finite and nonnegative, got {0}")]
    InvalidRadius(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("covariance needs at least two samples")]
    TooShort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorstCase {
    pub value: f64,
    /// Minimizing dual variable; `-inf` for `δ = 0`, where the infimum is
    /// only approached as `η → −∞`.
    pub eta_star: f64,
}

/// Absolute tolerance on `η` for the golden-section search.
pub const ETA_TOL: f64 = 1e-9;

/// `√(2δ+1)·E[(l − η)₊²]^½ + η`.
pub fn dual_objective(losses: &[f64], delta: f64, eta: f64) -> f64 {
    let m = losses.len() as f64;
    let second: f64 = losses
        .iter()
        .map(|&l| {
            let t = (l - eta).max(0.0);
            t * t
        })
        .sum::<f64>()
        / m;
    (2.0 * delta + 1.0).sqrt() * second.sqrt() + eta
}

fn moments(losses: &[f64]) -> (f64, f64, f64, f64) {
    let m = losses.len() as f64;
    let mean = losses.iter().sum::<f64>() / m;
    let var = losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / m;
    let lo = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, var, lo, hi)
}

/// Worst-case risk over the χ² ball of radius `delta` around the empirical
/// distribution of `losses`.
///
/// Below `min(l)` the objective is `k·√(V + (μ−η)²) + η` (`k = √(2δ+1)`,
/// `V` the population variance) with stationary point `η = μ − √(V/2δ)`, so
/// the bracket's lower end is pushed past that point; the upper end is
/// `max(l)`, where the objective equals `max(l)`.
pub fn worst_case_risk(losses: &[f64], delta: f64) -> Result<WorstCase, RiskError> {
    if losses.is_empty() {
        return Err(RiskError::Empty);
    }
    if losses.iter().any(|l| !l.is_finite()) {
        return Err(RiskError::NonFinite);
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(RiskError::InvalidRadius(delta));
    }
    let (mean, var, lo, hi) = moments(losses);
    if delta == 0.0 {
        return Ok(WorstCase {
            value: mean,
            eta_star: f64::NEG_INFINITY,
        });
    }
    if hi == lo {
        return Ok(WorstCase {
            value: hi,
            eta_star: hi,
        });
    }
    let unconstrained = mean - (var / (2.0 * delta)).sqrt();
    let a = (lo - 1.0).min(unconstrained - 1.0);
    let eta = golden_section(|e| dual_objective(losses, delta, e), a, hi, ETA_TOL);
    let value = dual_objective(losses, delta, eta);
    Ok(WorstCase {
        value,
        eta_star: eta,
    })
}

/// Minimizer of a unimodal `f` on `[a, b]`.
fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    let mid = 0.5 * (a + b);
    [a, mid, b]
        .into_iter()
        .min_by(|x, y| f(*x).total_cmp(&f(*y)))
        .unwrap_or(mid)
}

/// `(δ, worst-case value, η*)` for each radius, in input order.
pub fn worst_case_curve(
    losses: &[f64],
    deltas: &[f64],
) -> Result<Vec<(f64, WorstCase)>, RiskError> {
    deltas
        .iter()
        .map(|&d| worst_case_risk(losses, d).map(|w| (d, w)))
        .collect()
}

/// `‖θ̃ − θ̂‖²`.
pub fn gamma_shift(full: &ModelParams, subset: &ModelParams) -> Result<f64, RiskError> {
    if full.dim() != subset.dim() {
        return Err(RiskError::LengthMismatch(full.dim(), subset.dim()));
    }
    Ok(sq_distance(&full.theta, &subset.theta))
}

/// Sample covariance of `φ` and the perturbations `ε = (π − 1)/n`.
pub fn cov_phi_eps(phi: &[f64], probs: &[f64]) -> Result<f64, RiskError> {
    if phi.len() != probs.len() {
        return Err(RiskError::LengthMismatch(phi.len(), probs.len()));
    }
    let n = phi.len();
    if n < 2 {
        return Err(RiskError::TooShort);
    }
    let eps: Vec<f64> = probs
        .iter()
        .map(|&p| crate::sampling::perturbation(p, n))
        .collect();
    let mp = phi.iter().sum::<f64>() / n as f64;
    let me = eps.iter().sum::<f64>() / n as f64;
    Ok(phi
        .iter()
        .zip(&eps)
        .map(|(a, b)| (a - mp) * (b - me))
        .sum::<f64>()
        / (n - 1) as f64)
}
