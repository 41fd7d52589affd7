//! Influence of training samples on validation loss.
//!
//! For a trained `θ̂` the influence of upweighting training sample `i` on the
//! summed validation loss is
//!
//! ```text
//! φ_i = −(Σ_j ∇L_j(θ̂))ᵀ H⁻¹ ∇ℓ_i(θ̂)
//! ```
//!
//! which is bilinear, so `H⁻¹` is applied once to the aggregated validation
//! gradient. Validation terms `L_j` are plain logloss; training terms `ℓ_i`
//! carry the per-sample regularizer. Inverse Hessian products come from CG
//! with the mixed preconditioner `α·diag(H) + (1−α)·I`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::data::SparseDataset;
use crate::linalg::{self, dot, norm, CgOutcome};
use crate::model::{add_logloss_gradient, sample_gradient, Hessian, ModelError, ModelParams};

#[derive(Debug, Error)]
pub enum InfluenceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("Hessian is not positive definite (C = {0}); inverse products need C > 0")]
    NotPositiveDefinite(f64),
    #[error("validation set is empty")]
    EmptyValidation,
    #[error("CG stopped after {} iterations with residual {:.3e}", .0.iterations, .0.residual)]
    NotConverged(Box<CgOutcome>),
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgConfig {
    /// Weight of `diag(H)` in the mixed preconditioner; 0 is plain CG.
    pub alpha_precond: f64,
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PcgConfig {
    fn default() -> Self {
        Self {
            alpha_precond: 1.0,
            tol: 1e-8,
            max_iter: 10_000,
        }
    }
}

impl PcgConfig {
    pub fn validate(&self) -> Result<(), InfluenceError> {
        if !(0.0..=1.0).contains(&self.alpha_precond) {
            return Err(InfluenceError::Config(format!(
                "alpha_precond {} not in [0,1]",
                self.alpha_precond
            )));
        }
        if !(self.tol > 0.0) {
            return Err(InfluenceError::Config(format!(
                "tol {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Inverse of `α·diag(H) + (1−α)·I`, or `None` for plain CG.
fn mixed_preconditioner(h: &Hessian<'_>, alpha: f64) -> Option<Vec<f64>> {
    if alpha == 0.0 {
        return None;
    }
    Some(
        h.diagonal()
            .into_iter()
            .map(|d| 1.0 / (alpha * d + (1.0 - alpha)))
            .collect(),
    )
}

fn solve(
    h: &Hessian<'_>,
    precond: Option<&[f64]>,
    v: &[f64],
    cfg: &PcgConfig,
) -> Result<CgOutcome, InfluenceError> {
    let out = linalg::pcg(|x, y| h.apply(x, y), precond, v, cfg.tol, cfg.max_iter);
    if out.converged {
        Ok(out)
    } else {
        Err(InfluenceError::NotConverged(Box::new(out)))
    }
}

fn hessian<'a>(params: &ModelParams, tr: &'a SparseDataset) -> Result<Hessian<'a>, InfluenceError> {
    if !(params.reg_c > 0.0) {
        return Err(InfluenceError::NotPositiveDefinite(params.reg_c));
    }
    Ok(Hessian::for_params(params, tr)?)
}

/// `H⁻¹·v` for the training-set Hessian at `params`. On non-convergence the
/// error carries the best iterate.
pub fn inverse_hvp_pcg(
    params: &ModelParams,
    tr: &SparseDataset,
    v: &[f64],
    cfg: &PcgConfig,
) -> Result<CgOutcome, InfluenceError> {
    cfg.validate()?;
    if v.len() != params.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: params.dim(),
            got: v.len(),
        }
        .into());
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(InfluenceError::Config(
            "right-hand side is not finite".into(),
        ));
    }
    let h = hessian(params, tr)?;
    let precond = mixed_preconditioner(&h, cfg.alpha_precond);
    solve(&h, precond.as_deref(), v, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceReport {
    /// `φ_i` for every training row.
    pub phi: Vec<f64>,
    /// `‖ψ_i‖ = ‖H⁻¹∇ℓ_i‖`, when requested.
    pub psi_norms: Option<Vec<f64>>,
    pub cg_iters: usize,
    pub residual: f64,
}

impl InfluenceReport {
    /// CSV with header `index,phi[,psi_norm]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.psi_norms.is_some() {
            "index,phi,psi_norm\n"
        } else {
            "index,phi\n"
        });
        for (i, phi) in self.phi.iter().enumerate() {
            match &self.psi_norms {
                Some(psi) => writeln!(out, "{i},{phi},{}", psi[i]).unwrap(),
                None => writeln!(out, "{i},{phi}").unwrap(),
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("missing header")?;
        let with_psi = match header.trim() {
            "index,phi" => false,
            "index,phi,psi_norm" => true,
            other => return Err(format!("unexpected header {other:?}")),
        };
        let mut phi = Vec::new();
        let mut psi = Vec::new();
        for (no, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let want = if with_psi { 3 } else { 2 };
            let bad = || format!("row {}: malformed {line:?}", no + 1);
            if cols.len() != want || cols[0].parse::<usize>().ok() != Some(phi.len()) {
                return Err(bad());
            }
            phi.push(cols[1].parse::<f64>().map_err(|_| bad())?);
            if with_psi {
                psi.push(cols[2].parse::<f64>().map_err(|_| bad())?);
            }
        }
        Ok(Self {
            phi,
            psi_norms: with_psi.then_some(psi),
            cg_iters: 0,
            residual: f64::NAN,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), InfluenceError> {
        let path = path.as_ref();
        fs::write(path, self.to_csv()).map_err(|source| InfluenceError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, InfluenceError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| InfluenceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_csv(&text).map_err(|msg| InfluenceError::Format {
            path: path.display().to_string(),
            msg,
        })
    }
}

/// Summed validation logloss gradient `Σ_j ∇L_j(θ̂)`.
pub fn validation_gradient(
    params: &ModelParams,
    va: &SparseDataset,
) -> Result<Vec<f64>, InfluenceError> {
    if va.is_empty() {
        return Err(InfluenceError::EmptyValidation);
    }
    if va.n_features() != params.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: params.dim(),
            got: va.n_features(),
        }
        .into());
    }
    let mut g = vec![0.0; params.dim()];
    for j in 0..va.n_rows() {
        add_logloss_gradient(params, va, j, 1.0, &mut g);
    }
    Ok(g)
}

/// `φ_i` for every training row from a single inverse-HVP solve.
pub fn compute_phi(
    params: &ModelParams,
    tr: &SparseDataset,
    va: &SparseDataset,
    cfg: &PcgConfig,
) -> Result<InfluenceReport, InfluenceError> {
    let g_va = validation_gradient(params, va)?;
    let s = inverse_hvp_pcg(params, tr, &g_va, cfg)?;
    let phi = phi_from_solution(params, tr, &s.x)?;
    Ok(InfluenceReport {
        phi,
        psi_norms: None,
        cg_iters: s.iterations,
        residual: s.residual,
    })
}

/// `φ_i = −sᵀ∇ℓ_i` with `∇ℓ_i = (σ_i − y_i)x_i + Cθ̂`, in one sparse pass.
fn phi_from_solution(
    params: &ModelParams,
    tr: &SparseDataset,
    s: &[f64],
) -> Result<Vec<f64>, InfluenceError> {
    if tr.n_features() != params.dim() {
        return Err(ModelError::DimensionMismatch {
            expected: params.dim(),
            got: tr.n_features(),
        }
        .into());
    }
    let reg_term = params.reg_c * dot(s, &params.theta);
    Ok((0..tr.n_rows())
        .map(|i| {
            let x = tr.row(i);
            let r = crate::model::sigmoid(x.dot(&params.theta)) - f64::from(tr.label(i));
            -(r * x.dot(s) + reg_term)
        })
        .collect())
}

/// `‖H⁻¹∇ℓ_i‖` for every training row; one solve per row, run in parallel.
pub fn compute_psi_norms(
    params: &ModelParams,
    tr: &SparseDataset,
    cfg: &PcgConfig,
) -> Result<Vec<f64>, InfluenceError> {
    cfg.validate()?;
    let h = hessian(params, tr)?;
    let precond = mixed_preconditioner(&h, cfg.alpha_precond);
    (0..tr.n_rows())
        .into_par_iter()
        .map(|i| {
            let g = sample_gradient(params, tr, i)?;
            let s = solve(&h, precond.as_deref(), &g, cfg)?;
            Ok(norm(&s.x))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{train, TrainConfig};

    fn toy() -> SparseDataset {
        SparseDataset::from_dense(
            &[
                vec![1.0, 0.2, 0.0],
                vec![-0.5, 1.0, 0.3],
                vec![0.3, -1.2, 1.0],
                vec![1.5, 0.1, -0.7],
                vec![-1.0, -0.4, 0.2],
                vec![0.2, 0.9, -1.1],
            ],
            vec![1, 0, 1, 1, 0, 0],
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let ds = toy();
        let p = ModelParams::zeros(3, 0.1);
        let out = inverse_hvp_pcg(&p, &ds, &[0.0; 3], &PcgConfig::default()).unwrap();
        assert_eq!(out.x, vec![0.0; 3]);
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn regularizer_only_block_is_identity() {
        // feature 1 never occurs, so H restricted to it is C·I with C = 1
        let ds = SparseDataset::new(2, vec![vec![(0, 1.0)], vec![(0, -1.0)]], vec![1, 0]).unwrap();
        let p = ModelParams::new(vec![0.3, -2.0], 1.0);
        let out = inverse_hvp_pcg(&p, &ds, &[0.0, 2.5], &PcgConfig::default()).unwrap();
        assert!((out.x[1] - 2.5).abs() < 1e-12);
        assert!(out.x[0].abs() < 1e-12);
    }

    #[test]
    fn config_and_precondition_errors() {
        let ds = toy();
        let bad = PcgConfig {
            alpha_precond: 1.5,
            ..PcgConfig::default()
        };
        let p = ModelParams::zeros(3, 0.1);
        assert!(matches!(
            inverse_hvp_pcg(&p, &ds, &[1.0; 3], &bad),
            Err(InfluenceError::Config(_))
        ));
        let p0 = ModelParams::zeros(3, 0.0);
        assert!(matches!(
            inverse_hvp_pcg(&p0, &ds, &[1.0; 3], &PcgConfig::default()),
            Err(InfluenceError::NotPositiveDefinite(_))
        ));
        let tight = PcgConfig {
            max_iter: 1,
            tol: 1e-14,
            alpha_precond: 0.0,
        };
        match inverse_hvp_pcg(&p, &ds, &[1.0, -2.0, 0.5], &tight) {
            Err(InfluenceError::NotConverged(out)) => assert_eq!(out.iterations, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicated_rows_get_equal_influence() {
        let base = toy();
        let tr = base.concat(&base.subset(&[2])).unwrap();
        let p = train(&tr, &TrainConfig::new(0.1, 1e-10, 100)).unwrap();
        let va = base.subset(&[0, 1, 4]);
        let rep = compute_phi(&p, &tr, &va, &PcgConfig::default()).unwrap();
        assert_eq!(rep.phi[2], rep.phi[6]);
        let psi = compute_psi_norms(&p, &tr, &PcgConfig::default()).unwrap();
        assert_eq!(psi[2], psi[6]);
    }

    #[test]
    fn zero_gradient_sample_has_zero_psi() {
        // θ̂ = 0 whenever the data is symmetric; a zero row then has gradient
        // (0.5 − y)·0 + C·0 = 0.
        let ds = SparseDataset::new(
            2,
            vec![
                vec![(0, 1.0)],
                vec![(0, -1.0)],
                vec![(0, 1.0)],
                vec![(0, -1.0)],
                vec![],
            ],
            vec![1, 0, 0, 1, 1],
        )
        .unwrap();
        let p = ModelParams::zeros(2, 0.1);
        let psi = compute_psi_norms(&p, &ds, &PcgConfig::default()).unwrap();
        assert_eq!(psi[4], 0.0);
    }

    #[test]
    fn influence_csv_round_trip() {
        let rep = InfluenceReport {
            phi: vec![-0.5, 1.25e-7],
            psi_norms: Some(vec![0.1, 2.0]),
            cg_iters: 3,
            residual: 0.0,
        };
        let text = rep.to_csv();
        assert!(text.starts_with("index,phi,psi_norm\n0,-0.5,0.1\n"));
        let back = InfluenceReport::from_csv(&text).unwrap();
        assert_eq!(back.phi, rep.phi);
        assert_eq!(back.psi_norms, rep.psi_norms);
        assert!(InfluenceReport::from_csv("index,phi\n1,0.5\n").is_err());
    }
}
