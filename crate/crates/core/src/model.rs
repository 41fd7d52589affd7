//! L2-regularized binary logistic regression over sparse rows.
//!
//! The regularizer is folded into every per-sample loss,
//! `ℓ_i(θ) = logloss_i(θ) + (C/2)‖θ‖²`, so the empirical risk is the mean
//! of `ℓ_i` and the per-sample gradients sum to zero at the optimum.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::data::{Row, SparseDataset};
use crate::linalg::{self, dot, norm};

/// Probabilities are clamped to `[PROB_EPS, 1 − PROB_EPS]` before any log.
pub const PROB_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dimension mismatch: model has {expected} weights, input needs {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("training data contains a single class")]
    SingleClass,
    #[error("regularization strength must be positive and finite, got {0}")]
    InvalidRegularization(f64),
    #[error("invalid sample weights: {0}")]
    InvalidWeights(String),
    #[error(
        "trainer stopped after {} iterations with gradient norm {:.3e}",
        .0.fit.iterations,
        .0.fit.grad_norm
    )]
    NotConverged(Box<ModelParams>),
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Diagnostics from the trainer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitInfo {
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub theta: Vec<f64>,
    /// Coefficient of `(1/2)‖θ‖²` in every per-sample loss.
    pub reg_c: f64,
    pub fit: FitInfo,
}

impl ModelParams {
    pub fn new(theta: Vec<f64>, reg_c: f64) -> Self {
        Self {
            theta,
            reg_c,
            fit: FitInfo {
                grad_norm: f64::NAN,
                iterations: 0,
                converged: false,
            },
        }
    }

    pub fn zeros(dim: usize, reg_c: f64) -> Self {
        Self::new(vec![0.0; dim], reg_c)
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    fn check(&self, ds: &SparseDataset) -> Result<(), ModelError> {
        if ds.n_features() != self.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim(),
                got: ds.n_features(),
            });
        }
        Ok(())
    }

    /// Plain-text form: `d C` on the first line, then `index value` for every
    /// nonzero weight.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.dim(), self.reg_c);
        for (k, &w) in self.theta.iter().enumerate() {
            if w != 0.0 {
                writeln!(out, "{k} {w}").unwrap();
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or("empty model file")?;
        let mut h = header.split_whitespace();
        let dim: usize = h
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or("line 1: expected `d C`")?;
        let reg_c: f64 = h
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or("line 1: expected `d C`")?;
        let mut theta = vec![0.0; dim];
        for (no, line) in lines {
            let mut t = line.split_whitespace();
            let k: usize = t
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("line {}: bad index", no + 1))?;
            let w: f64 = t
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("line {}: bad value", no + 1))?;
            if k >= dim || !w.is_finite() {
                return Err(format!("line {}: entry out of range", no + 1));
            }
            theta[k] = w;
        }
        Ok(Self::new(theta, reg_c))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ModelError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_text(&text).map_err(|msg| ModelError::Format {
            path: path.display().to_string(),
            msg,
        })
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(PROB_EPS, 1.0 - PROB_EPS)
}

fn logloss(p: f64, y: u8) -> f64 {
    let p = clamp_prob(p);
    if y == 1 {
        -p.ln()
    } else {
        -(1.0 - p).ln()
    }
}

/// `σ(θᵀx)` clamped away from 0 and 1.
pub fn predict_proba(params: &ModelParams, x: Row<'_>) -> Result<f64, ModelError> {
    if let Some(k) = x.max_index() {
        if k >= params.dim() {
            return Err(ModelError::DimensionMismatch {
                expected: params.dim(),
                got: k + 1,
            });
        }
    }
    Ok(clamp_prob(sigmoid(x.dot(&params.theta))))
}

/// Unregularized logloss of every row.
pub fn sample_losses(params: &ModelParams, ds: &SparseDataset) -> Result<Vec<f64>, ModelError> {
    params.check(ds)?;
    Ok(ds
        .rows()
        .zip(ds.labels())
        .map(|(x, &y)| logloss(sigmoid(x.dot(&params.theta)), y))
        .collect())
}

/// Mean unregularized logloss, the reporting metric.
pub fn mean_logloss(params: &ModelParams, ds: &SparseDataset) -> Result<f64, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let losses = sample_losses(params, ds)?;
    Ok(losses.iter().sum::<f64>() / losses.len() as f64)
}

/// Mean of the regularized per-sample losses.
pub fn risk(params: &ModelParams, ds: &SparseDataset) -> Result<f64, ModelError> {
    let reg = 0.5 * params.reg_c * dot(&params.theta, &params.theta);
    Ok(mean_logloss(params, ds)? + reg)
}

/// Fraction of rows classified correctly at threshold 0.5.
pub fn accuracy(params: &ModelParams, ds: &SparseDataset) -> Result<f64, ModelError> {
    params.check(ds)?;
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let hits = ds
        .rows()
        .zip(ds.labels())
        .filter(|(x, &y)| u8::from(x.dot(&params.theta) > 0.0) == y)
        .count();
    Ok(hits as f64 / ds.n_rows() as f64)
}

/// Gradient of the regularized risk.
pub fn gradient(params: &ModelParams, ds: &SparseDataset) -> Result<Vec<f64>, ModelError> {
    params.check(ds)?;
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    Ok(Objective::unweighted(ds, params.reg_c).gradient(&params.theta))
}

/// Gradient of one regularized per-sample loss, `(σ(θᵀx_i) − y_i)·x_i + C·θ`.
pub fn sample_gradient(
    params: &ModelParams,
    ds: &SparseDataset,
    i: usize,
) -> Result<Vec<f64>, ModelError> {
    params.check(ds)?;
    let mut g: Vec<f64> = params.theta.iter().map(|w| params.reg_c * w).collect();
    add_logloss_gradient(params, ds, i, 1.0, &mut g);
    Ok(g)
}

/// `out += scale · ∇ logloss_i(θ)` (unregularized).
pub(crate) fn add_logloss_gradient(
    params: &ModelParams,
    ds: &SparseDataset,
    i: usize,
    scale: f64,
    out: &mut [f64],
) {
    let x = ds.row(i);
    let residual = sigmoid(x.dot(&params.theta)) - f64::from(ds.label(i));
    x.axpy(scale * residual, out);
}

/// `H·v` without forming `H`.
pub fn hvp(params: &ModelParams, ds: &SparseDataset, v: &[f64]) -> Result<Vec<f64>, ModelError> {
    params.check(ds)?;
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if v.len() != params.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: params.dim(),
            got: v.len(),
        });
    }
    let h = Hessian::new(&Objective::unweighted(ds, params.reg_c), &params.theta);
    let mut out = vec![0.0; v.len()];
    h.apply(v, &mut out);
    Ok(out)
}

/// Exact diagonal of `H`: `(1/n)Σ σ_i(1−σ_i)·x_ik² + C`.
pub fn hessian_diag(params: &ModelParams, ds: &SparseDataset) -> Result<Vec<f64>, ModelError> {
    params.check(ds)?;
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    Ok(Hessian::new(&Objective::unweighted(ds, params.reg_c), &params.theta).diagonal())
}

/// Weighted regularized risk `(1/norm) Σ_i w_i ℓ_i(θ)`. With unit weights and
/// `norm = n` this is the plain empirical risk.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a> {
    ds: &'a SparseDataset,
    weights: Option<&'a [f64]>,
    norm: f64,
    reg_c: f64,
    /// `C · Σw / norm`, the effective ridge.
    ridge: f64,
}

impl<'a> Objective<'a> {
    pub fn unweighted(ds: &'a SparseDataset, reg_c: f64) -> Self {
        Self {
            ds,
            weights: None,
            norm: ds.n_rows() as f64,
            reg_c,
            ridge: reg_c,
        }
    }

    pub fn weighted(
        ds: &'a SparseDataset,
        weights: &'a [f64],
        norm: f64,
        reg_c: f64,
    ) -> Result<Self, ModelError> {
        if weights.len() != ds.n_rows() {
            return Err(ModelError::InvalidWeights(format!(
                "{} weights for {} rows",
                weights.len(),
                ds.n_rows()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || !(norm > 0.0) {
            return Err(ModelError::InvalidWeights(
                "weights must be finite and nonnegative".into(),
            ));
        }
        Ok(Self {
            ds,
            weights: Some(weights),
            norm,
            reg_c,
            ridge: reg_c * weights.iter().sum::<f64>() / norm,
        })
    }

    fn weight(&self, i: usize) -> f64 {
        self.weights.map_or(1.0, |w| w[i]) / self.norm
    }

    /// Objective value via the softplus form, exact for any margin.
    pub fn value(&self, theta: &[f64]) -> f64 {
        let data: f64 = (0..self.ds.n_rows())
            .map(|i| {
                let z = self.ds.row(i).dot(theta);
                self.weight(i) * (softplus(z) - f64::from(self.ds.label(i)) * z)
            })
            .sum();
        data + 0.5 * self.ridge * dot(theta, theta)
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = theta.iter().map(|w| self.ridge * w).collect();
        for i in 0..self.ds.n_rows() {
            let x = self.ds.row(i);
            let r = sigmoid(x.dot(theta)) - f64::from(self.ds.label(i));
            x.axpy(self.weight(i) * r, &mut g);
        }
        g
    }
}

/// Hessian of an [`Objective`] at a fixed `θ`, kept as per-row curvature
/// weights so each product is two sparse passes.
#[derive(Debug, Clone)]
pub struct Hessian<'a> {
    ds: &'a SparseDataset,
    curvature: Vec<f64>,
    ridge: f64,
}

impl<'a> Hessian<'a> {
    pub fn new(obj: &Objective<'a>, theta: &[f64]) -> Self {
        let curvature = (0..obj.ds.n_rows())
            .map(|i| {
                let s = sigmoid(obj.ds.row(i).dot(theta));
                obj.weight(i) * s * (1.0 - s)
            })
            .collect();
        Self {
            ds: obj.ds,
            curvature,
            ridge: obj.ridge,
        }
    }

    pub fn for_params(params: &ModelParams, ds: &'a SparseDataset) -> Result<Self, ModelError> {
        params.check(ds)?;
        if ds.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        Ok(Self::new(
            &Objective::unweighted(ds, params.reg_c),
            &params.theta,
        ))
    }

    pub fn dim(&self) -> usize {
        self.ds.n_features()
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (o, vi) in out.iter_mut().zip(v) {
            *o = self.ridge * vi;
        }
        for (x, &c) in self.ds.rows().zip(&self.curvature) {
            if c != 0.0 {
                x.axpy(c * x.dot(v), out);
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![self.ridge; self.dim()];
        for (x, &c) in self.ds.rows().zip(&self.curvature) {
            for (&k, &v) in x.indices.iter().zip(x.values) {
                d[k] += c * v * v;
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub reg_c: f64,
    /// Stop once the gradient norm of the objective is at most this.
    pub tol: f64,
    /// Newton iterations.
    pub max_iter: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            reg_c: 0.1,
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

impl TrainConfig {
    pub fn new(reg_c: f64, tol: f64, max_iter: usize) -> Self {
        Self {
            reg_c,
            tol,
            max_iter,
        }
    }
}

/// Minimizes the regularized empirical risk from `θ = 0`.
pub fn train(ds: &SparseDataset, cfg: &TrainConfig) -> Result<ModelParams, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if !ds.has_both_classes() {
        return Err(ModelError::SingleClass);
    }
    check_reg(cfg.reg_c)?;
    newton_cg(&Objective::unweighted(ds, cfg.reg_c), ds.n_features(), cfg)
}

/// Minimizes `(1/norm) Σ w_i ℓ_i(θ)`, the importance-weighted subset risk.
pub fn train_weighted(
    ds: &SparseDataset,
    weights: &[f64],
    norm: f64,
    cfg: &TrainConfig,
) -> Result<ModelParams, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if !ds.has_both_classes() {
        return Err(ModelError::SingleClass);
    }
    check_reg(cfg.reg_c)?;
    let obj = Objective::weighted(ds, weights, norm, cfg.reg_c)?;
    newton_cg(&obj, ds.n_features(), cfg)
}

fn check_reg(c: f64) -> Result<(), ModelError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(ModelError::InvalidRegularization(c));
    }
    Ok(())
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 60;

/// Damped Newton with Jacobi-preconditioned CG for the Newton system.
fn newton_cg(
    obj: &Objective<'_>,
    dim: usize,
    cfg: &TrainConfig,
) -> Result<ModelParams, ModelError> {
    let mut theta = vec![0.0; dim];
    let mut g = obj.gradient(&theta);
    let mut g_norm = norm(&g);
    let mut f = obj.value(&theta);
    let mut iterations = 0;
    let cg_cap = (2 * dim + 20).min(2000);

    while g_norm > cfg.tol && iterations < cfg.max_iter {
        let h = Hessian::new(obj, &theta);
        let inv_diag: Vec<f64> = h.diagonal().iter().map(|d| 1.0 / d).collect();
        let forcing = g_norm.sqrt().min(0.5);
        let neg_g: Vec<f64> = g.iter().map(|x| -x).collect();
        let step = linalg::pcg(
            |v, out| h.apply(v, out),
            Some(&inv_diag),
            &neg_g,
            forcing,
            cg_cap,
        );
        let dir = step.x;
        let slope = dot(&g, &dir);
        if !(slope < 0.0) {
            break;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            // a decrease below the rounding of f cannot be verified
            if -ARMIJO * t * slope <= 4.0 * f64::EPSILON * f.abs().max(1.0) {
                break;
            }
            let trial: Vec<f64> = theta.iter().zip(&dir).map(|(w, d)| w + t * d).collect();
            let f_trial = obj.value(&trial);
            if f_trial <= f + ARMIJO * t * slope {
                accepted = Some((trial, f_trial));
                break;
            }
            t *= 0.5;
        }
        let (next, f_next) = match accepted {
            Some(a) => a,
            None => {
                // Near the optimum the decrease is below rounding of f; take the
                // full step when it still shrinks the gradient.
                let trial: Vec<f64> = theta.iter().zip(&dir).map(|(w, d)| w + d).collect();
                if norm(&obj.gradient(&trial)) < g_norm {
                    let f_trial = obj.value(&trial);
                    (trial, f_trial)
                } else {
                    break;
                }
            }
        };
        theta = next;
        f = f_next;
        g = obj.gradient(&theta);
        g_norm = norm(&g);
        iterations += 1;
    }

    let params = ModelParams {
        theta,
        reg_c: obj.reg_c,
        fit: FitInfo {
            grad_norm: g_norm,
            iterations,
            converged: g_norm <= cfg.tol,
        },
    };
    if params.fit.converged {
        Ok(params)
    } else {
        Err(ModelError::NotConverged(Box::new(params)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_row(x: Vec<(usize, f64)>, y: u8, d: usize) -> SparseDataset {
        SparseDataset::new(d, vec![x], vec![y]).unwrap()
    }

    #[test]
    fn predict_proba_cases() {
        let ds = one_row(vec![(0, 1.0)], 1, 2);
        let zero = ModelParams::zeros(2, 0.0);
        assert_eq!(predict_proba(&zero, ds.row(0)).unwrap(), 0.5);
        let p = ModelParams::new(vec![3f64.ln(), 0.0], 0.0);
        assert!((predict_proba(&p, ds.row(0)).unwrap() - 0.75).abs() < 1e-15);
        let big = ModelParams::new(vec![1000.0], 0.0);
        let ds1 = one_row(vec![(0, 1.0)], 1, 1);
        assert_eq!(predict_proba(&big, ds1.row(0)).unwrap(), 1.0 - 1e-12);
        let short = ModelParams::zeros(1, 0.0);
        let wide = one_row(vec![(3, 1.0)], 1, 4);
        assert!(matches!(
            predict_proba(&short, wide.row(0)),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn risk_cases() {
        let ds = SparseDataset::from_dense(&[vec![1.0, 2.0], vec![-1.0, 0.5]], vec![1, 0]).unwrap();
        let ln2 = 2f64.ln();
        assert!((risk(&ModelParams::zeros(2, 0.0), &ds).unwrap() - ln2).abs() < 1e-15);
        assert!((risk(&ModelParams::zeros(2, 0.1), &ds).unwrap() - ln2).abs() < 1e-15);
        let single = one_row(vec![(0, 1.0)], 1, 1);
        let p = ModelParams::new(vec![3f64.ln()], 0.0);
        assert!((risk(&p, &single).unwrap() - 0.287_682_072_451_780_9).abs() < 1e-12);
        let empty = SparseDataset::new(2, vec![], vec![]).unwrap();
        assert!(matches!(
            risk(&ModelParams::zeros(2, 0.0), &empty),
            Err(ModelError::EmptyDataset)
        ));
    }

    #[test]
    fn gradient_single_sample() {
        let ds = one_row(vec![(0, 1.0), (1, 2.0)], 1, 2);
        let g = gradient(&ModelParams::zeros(2, 0.0), &ds).unwrap();
        assert_eq!(g, vec![-0.5, -1.0]);
        let gi = sample_gradient(&ModelParams::new(vec![1.0, 0.0], 0.5), &ds, 0).unwrap();
        let s = sigmoid(1.0);
        assert!((gi[0] - ((s - 1.0) + 0.5)).abs() < 1e-15);
        assert!((gi[1] - 2.0 * (s - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn hvp_and_diag_cases() {
        let ds = one_row(vec![(0, 1.0)], 1, 2);
        let out = hvp(&ModelParams::zeros(2, 0.0), &ds, &[1.0, 1.0]).unwrap();
        assert_eq!(out, vec![0.25, 0.0]);
        // column 1 has no data: regularizer only
        let out = hvp(&ModelParams::zeros(2, 1.0), &ds, &[0.0, 3.0]).unwrap();
        assert_eq!(out, vec![0.0, 3.0]);

        let ds = one_row(vec![(0, 1.0), (1, 2.0)], 1, 3);
        assert_eq!(
            hessian_diag(&ModelParams::zeros(3, 0.0), &ds).unwrap(),
            vec![0.25, 1.0, 0.0]
        );
        assert_eq!(
            hessian_diag(&ModelParams::zeros(3, 0.1), &ds).unwrap()[2],
            0.1
        );
        assert!(hvp(&ModelParams::zeros(3, 0.0), &ds, &[1.0]).is_err());
    }

    #[test]
    fn trains_two_point_problem() {
        let ds = SparseDataset::new(1, vec![vec![(0, 1.0)], vec![(0, 2.0)]], vec![1, 0]).unwrap();
        let p = train(&ds, &TrainConfig::new(0.1, 1e-8, 100)).unwrap();
        assert!(p.theta[0].is_finite());
        assert!(norm(&gradient(&p, &ds).unwrap()) <= 1e-8);
        assert!(p.fit.converged);
    }

    #[test]
    fn separable_data_stays_finite() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 - 9.5, 1.0]).collect();
        let y = (0..20).map(|i| u8::from(i >= 10)).collect();
        let ds = SparseDataset::from_dense(&x, y).unwrap();
        let p = train(&ds, &TrainConfig::new(0.1, 1e-10, 100)).unwrap();
        assert!(p.theta.iter().all(|w| w.is_finite()));
        assert!(p.fit.grad_norm <= 1e-10);
    }

    #[test]
    fn train_errors() {
        let ds = SparseDataset::from_dense(&[vec![1.0], vec![2.0]], vec![1, 1]).unwrap();
        assert!(matches!(
            train(&ds, &TrainConfig::default()),
            Err(ModelError::SingleClass)
        ));
        let ds = SparseDataset::from_dense(&[vec![1.0], vec![2.0]], vec![1, 0]).unwrap();
        assert!(matches!(
            train(&ds, &TrainConfig::new(0.0, 1e-8, 10)),
            Err(ModelError::InvalidRegularization(_))
        ));
        match train(&ds, &TrainConfig::new(0.1, 1e-30, 3)) {
            Err(ModelError::NotConverged(p)) => assert_eq!(p.fit.iterations, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn weighted_objective_with_unit_weights_matches_plain() {
        let ds = SparseDataset::from_dense(
            &[vec![1.0, 0.0], vec![0.5, -1.0], vec![-1.0, 2.0]],
            vec![1, 0, 1],
        )
        .unwrap();
        let cfg = TrainConfig::new(0.1, 1e-10, 100);
        let a = train(&ds, &cfg).unwrap();
        let b = train_weighted(&ds, &[1.0; 3], 3.0, &cfg).unwrap();
        assert!(linalg::sq_distance(&a.theta, &b.theta) < 1e-18);
    }

    #[test]
    fn model_text_round_trip() {
        let p = ModelParams::new(vec![0.0, -1.25, 1e-300, 0.1 + 0.2], 0.1);
        let q = ModelParams::from_text(&p.to_text()).unwrap();
        assert_eq!(q.theta, p.theta);
        assert_eq!(q.reg_c, p.reg_c);
        assert!(p.to_text().starts_with("4 0.1\n1 -1.25\n"));
        assert!(ModelParams::from_text("2 0.1\n5 1.0\n").is_err());
    }
}
