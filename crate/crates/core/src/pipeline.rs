//! Train / influence / subsample / retrain experiments under the
//! train-validation-test protocol.
//!
//! Validation data drives the sampling; test data is only touched when
//! scoring finished models. [`influence_stage`] has no access to the test set.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::data::{self, flip_labels, load_libsvm, DataError, SparseDataset, SplitSpec};
use crate::influence::{compute_phi, compute_psi_norms, InfluenceError, PcgConfig};
use crate::model::{self, train, train_weighted, ModelError, ModelParams, TrainConfig};
use crate::risk::{cov_phi_eps, gamma_shift, worst_case_curve, WorstCase};
use crate::sampling::{self, Influence, Method, MethodParams, Scale};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("full-set training failed: {0}")]
    Train(#[from] ModelError),
    #[error("influence computation failed: {0}")]
    Influence(#[from] InfluenceError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Everything that determines an experiment. Parsed from `key = value`
/// lines; list values are comma-separated.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub tr: Option<PathBuf>,
    pub va: Option<PathBuf>,
    pub te: Option<PathBuf>,
    /// Single file split into train/validation/test by `split`.
    pub data: Option<PathBuf>,
    pub split: SplitSpec,
    pub n_features: Option<usize>,
    /// Coefficient of `(1/2)‖θ‖²` in every per-sample loss.
    pub reg_c: f64,
    pub train_tol: f64,
    pub train_max_iter: usize,
    pub methods: Vec<Method>,
    pub ratios: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub sigmoid_alphas: Vec<f64>,
    pub linear_alpha: Scale,
    pub optlr_floor: f64,
    pub flip_fraction: Option<f64>,
    pub pcg: PcgConfig,
    pub deltas: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            tr: None,
            va: None,
            te: None,
            data: None,
            split: SplitSpec {
                va_fraction: 0.24,
                te_fraction: 0.2,
                seed: 0,
            },
            n_features: None,
            reg_c: 0.1,
            train_tol: 1e-8,
            train_max_iter: 100,
            methods: vec![
                Method::Random,
                Method::OptLr,
                Method::Dropout,
                Method::Linear,
                Method::Sigmoid,
            ],
            ratios: vec![0.95],
            repeats: 10,
            seed: 0,
            sigmoid_alphas: vec![0.1, 1.0, 5.0, 10.0, 50.0],
            linear_alpha: Scale::Auto,
            optlr_floor: 0.01,
            flip_fraction: None,
            pcg: PcgConfig::default(),
            deltas: vec![0.0, 0.5, 2.0, 10.0],
        }
    }
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("{s:?}: {e}")))
        .collect()
}

fn parse_one<T: FromStr>(v: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| format!("{v:?}: {e}"))
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 23] = [
        "tr",
        "va",
        "te",
        "data",
        "va_fraction",
        "te_fraction",
        "split_seed",
        "n_features",
        "reg_c",
        "train_tol",
        "train_max_iter",
        "methods",
        "ratios",
        "repeats",
        "seed",
        "sigmoid_alphas",
        "linear_alpha",
        "optlr_floor",
        "flip_fraction",
        "pcg_alpha",
        "pcg_tol",
        "pcg_max_iter",
        "deltas",
    ];

    /// Sets one option. Paths are taken verbatim.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        let path = || Some(PathBuf::from(v));
        match key.trim() {
            "tr" => self.tr = path(),
            "va" => self.va = path(),
            "te" => self.te = path(),
            "data" => self.data = path(),
            "va_fraction" => self.split.va_fraction = parse_one(v)?,
            "te_fraction" => self.split.te_fraction = parse_one(v)?,
            "split_seed" => self.split.seed = parse_one(v)?,
            "n_features" => self.n_features = Some(parse_one(v)?),
            "reg_c" => self.reg_c = parse_one(v)?,
            "train_tol" => self.train_tol = parse_one(v)?,
            "train_max_iter" => self.train_max_iter = parse_one(v)?,
            "methods" => self.methods = parse_list(v)?,
            "ratios" => self.ratios = parse_list(v)?,
            "repeats" => self.repeats = parse_one(v)?,
            "seed" => self.seed = parse_one(v)?,
            "sigmoid_alphas" => self.sigmoid_alphas = parse_list(v)?,
            "linear_alpha" => self.linear_alpha = parse_one(v)?,
            "optlr_floor" => self.optlr_floor = parse_one(v)?,
            "flip_fraction" => self.flip_fraction = Some(parse_one(v)?),
            "pcg_alpha" => self.pcg.alpha_precond = parse_one(v)?,
            "pcg_tol" => self.pcg.tol = parse_one(v)?,
            "pcg_max_iter" => self.pcg.max_iter = parse_one(v)?,
            "deltas" => self.deltas = parse_list(v)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults. Relative paths are
    /// resolved against `base_dir` when given.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self, PipelineError> {
        let mut cfg = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| PipelineError::Config {
                line: no + 1,
                msg: "expected `key = value`".into(),
            })?;
            cfg.set(k, v)
                .map_err(|msg| PipelineError::Config { line: no + 1, msg })?;
        }
        if let Some(base) = base_dir {
            for p in [&mut cfg.tr, &mut cfg.va, &mut cfg.te, &mut cfg.data]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, path.parent())
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Invalid(m));
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if let Some(r) = self.ratios.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
            return bad(format!("ratio {r} not in (0,1]"));
        }
        if self.methods.contains(&Method::Sigmoid) && self.sigmoid_alphas.is_empty() {
            return bad("sigmoid requested without sigmoid_alphas".into());
        }
        if let Some(f) = self.flip_fraction {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("flip_fraction {f} not in [0,1]"));
            }
        }
        if self.deltas.iter().any(|d| !(*d >= 0.0)) {
            return bad("deltas must be nonnegative".into());
        }
        self.pcg.validate()?;
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig::new(self.reg_c, self.train_tol, self.train_max_iter)
    }
}

/// Train, validation and (optional) test sets sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Datasets {
    pub tr: SparseDataset,
    pub va: SparseDataset,
    pub te: Option<SparseDataset>,
}

impl Datasets {
    /// Widens every set to the largest feature dimension among them.
    pub fn new(
        tr: SparseDataset,
        va: SparseDataset,
        te: Option<SparseDataset>,
    ) -> Result<Self, DataError> {
        let d = [Some(&tr), Some(&va), te.as_ref()]
            .into_iter()
            .flatten()
            .map(SparseDataset::n_features)
            .max()
            .unwrap_or(0);
        Ok(Self {
            tr: tr.with_n_features(d)?,
            va: va.with_n_features(d)?,
            te: te.map(|t| t.with_n_features(d)).transpose()?,
        })
    }

    pub fn load(cfg: &ExperimentConfig) -> Result<Self, PipelineError> {
        if let Some(path) = &cfg.data {
            let ds = load_libsvm(path, cfg.n_features)?;
            let (tr, va, te) = data::split(&ds, &cfg.split)?;
            let te = (!te.is_empty()).then_some(te);
            return Ok(Self::new(tr, va, te)?);
        }
        let (Some(tr), Some(va)) = (&cfg.tr, &cfg.va) else {
            return Err(PipelineError::Invalid(
                "need `data`, or both `tr` and `va`".into(),
            ));
        };
        let tr = load_libsvm(tr, cfg.n_features)?;
        let va = load_libsvm(va, cfg.n_features)?;
        let te = cfg
            .te
            .as_ref()
            .map(|p| load_libsvm(p, cfg.n_features))
            .transpose()?;
        Ok(Self::new(tr, va, te)?)
    }
}

/// 64-bit FNV-1a; stable across platforms and toolchains.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Draw seed of one experiment cell: `base ⊕ FNV-1a(label, ratio bits, repeat)`.
pub fn cell_seed(base: u64, label: &str, ratio: f64, repeat: usize) -> u64 {
    let mut bytes = label.as_bytes().to_vec();
    bytes.push(0);
    bytes.extend_from_slice(&ratio.to_bits().to_le_bytes());
    bytes.extend_from_slice(&(repeat as u64).to_le_bytes());
    base ^ fnv1a(&bytes)
}

/// Seed used to corrupt training labels in the noise experiment.
pub fn flip_seed(base: u64) -> u64 {
    base ^ fnv1a(b"flip")
}

/// A sampling method with its hyperparameter fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub method: Method,
    pub sigmoid_alpha: Option<f64>,
}

impl Variant {
    pub fn label(&self) -> String {
        match self.sigmoid_alpha {
            Some(a) => format!("{}@{a}", self.method),
            None => self.method.to_string(),
        }
    }
}

fn variants(cfg: &ExperimentConfig) -> Vec<Variant> {
    cfg.methods
        .iter()
        .flat_map(|&method| {
            if method == Method::Sigmoid {
                cfg.sigmoid_alphas
                    .iter()
                    .map(|&a| Variant {
                        method,
                        sigmoid_alpha: Some(a),
                    })
                    .collect()
            } else {
                vec![Variant {
                    method,
                    sigmoid_alpha: None,
                }]
            }
        })
        .collect()
}

/// Output of the influence stage; computed from train and validation only.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceStage {
    pub phi: Vec<f64>,
    pub psi_norms: Option<Vec<f64>>,
    pub cg_iters: usize,
    pub seconds: f64,
}

pub fn influence_stage(
    full: &ModelParams,
    tr: &SparseDataset,
    va: &SparseDataset,
    pcg: &PcgConfig,
    need_psi: bool,
) -> Result<InfluenceStage, InfluenceError> {
    let start = Instant::now();
    let rep = compute_phi(full, tr, va, pcg)?;
    let psi_norms = need_psi
        .then(|| compute_psi_norms(full, tr, pcg))
        .transpose()?;
    Ok(InfluenceStage {
        phi: rep.phi,
        psi_norms,
        cg_iters: rep.cg_iters,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Scores of one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub va_logloss: f64,
    /// NaN without a test set.
    pub te_logloss: f64,
    pub accuracy: f64,
}

fn score(
    params: &ModelParams,
    va: &SparseDataset,
    te: Option<&SparseDataset>,
) -> Result<Scores, ModelError> {
    Ok(Scores {
        va_logloss: model::mean_logloss(params, va)?,
        te_logloss: te
            .map(|t| model::mean_logloss(params, t))
            .transpose()?
            .unwrap_or(f64::NAN),
        accuracy: te
            .map(|t| model::accuracy(params, t))
            .transpose()?
            .unwrap_or(f64::NAN),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub variant: Variant,
    pub ratio: f64,
    pub repeat: usize,
    pub seed: u64,
    pub n_selected: usize,
    pub scores: Scores,
    /// `‖θ̃ − θ̂‖²`.
    pub gamma: f64,
    pub cov_phi_eps: f64,
    /// Worst-case test risk at each configured radius.
    pub worst_case: Vec<WorstCase>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub label: String,
    pub ratio: f64,
    pub repeats: usize,
    pub va: (f64, f64),
    pub te: (f64, f64),
    pub accuracy: (f64, f64),
    pub gamma: f64,
    pub worst_case: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub full: Scores,
    pub full_params: ModelParams,
    pub n_train: usize,
    pub influence_cg_iters: usize,
    /// Wall time of the influence stage; informational, never written to CSV.
    pub influence_seconds: f64,
    pub cells: Vec<CellResult>,
    pub aggregates: Vec<AggregateRow>,
    /// `(ratio, α)` of the sigmoid variant picked on validation loss.
    pub sigmoid_choice: Vec<(f64, f64)>,
    pub deltas: Vec<f64>,
}

impl ExperimentReport {
    pub fn aggregate(&self, label: &str, ratio: f64) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|a| a.label == label && a.ratio == ratio)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, v.sqrt())
}

fn run_cell(
    variant: Variant,
    ratio: f64,
    repeat: usize,
    cfg: &ExperimentConfig,
    data: &Datasets,
    full: &ModelParams,
    stage: &InfluenceStage,
) -> CellResult {
    let seed = cell_seed(cfg.seed, &variant.label(), ratio, repeat);
    let mut cell = CellResult {
        variant,
        ratio,
        repeat,
        seed,
        n_selected: 0,
        scores: Scores {
            va_logloss: f64::NAN,
            te_logloss: f64::NAN,
            accuracy: f64::NAN,
        },
        gamma: f64::NAN,
        cov_phi_eps: f64::NAN,
        worst_case: Vec::new(),
        error: None,
    };
    let outcome = (|| -> Result<(), String> {
        let params = MethodParams {
            linear_alpha: cfg.linear_alpha,
            sigmoid_alpha: variant.sigmoid_alpha.unwrap_or(1.0),
            optlr_floor: cfg.optlr_floor,
            optlr_lambda: Scale::Auto,
        };
        let influence = Influence {
            phi: &stage.phi,
            psi_norms: stage.psi_norms.as_deref(),
        };
        let plan = sampling::plan(
            variant.method,
            influence,
            data.tr.labels(),
            ratio,
            seed,
            &params,
        )
        .map_err(|e| e.to_string())?;
        let subset = data.tr.subset(&plan.selected);
        let tcfg = cfg.train_config();
        let fitted = if variant.method.is_weighted() {
            let weights: Vec<f64> = plan.selected.iter().map(|&i| 1.0 / plan.probs[i]).collect();
            train_weighted(&subset, &weights, data.tr.n_rows() as f64, &tcfg)
        } else {
            train(&subset, &tcfg)
        }
        .map_err(|e| e.to_string())?;

        cell.n_selected = plan.selected.len();
        cell.scores = score(&fitted, &data.va, data.te.as_ref()).map_err(|e| e.to_string())?;
        cell.gamma = gamma_shift(full, &fitted).map_err(|e| e.to_string())?;
        cell.cov_phi_eps = cov_phi_eps(&stage.phi, &plan.probs).unwrap_or(f64::NAN);
        if let Some(te) = &data.te {
            let losses = model::sample_losses(&fitted, te).map_err(|e| e.to_string())?;
            cell.worst_case = worst_case_curve(&losses, &cfg.deltas)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|(_, w)| w)
                .collect();
        }
        Ok(())
    })();
    cell.error = outcome.err();
    cell
}

fn aggregate(cells: &[&CellResult], label: String, ratio: f64, n_deltas: usize) -> AggregateRow {
    let col = |f: &dyn Fn(&CellResult) -> f64| -> Vec<f64> {
        cells
            .iter()
            .filter(|c| c.error.is_none())
            .map(|c| f(c))
            .collect()
    };
    let worst_case = (0..n_deltas)
        .map(|k| {
            let vals = col(&|c| c.worst_case.get(k).map_or(f64::NAN, |w| w.value));
            let etas = col(&|c| c.worst_case.get(k).map_or(f64::NAN, |w| w.eta_star));
            (mean_std(&vals).0, mean_std(&etas).0)
        })
        .collect();
    AggregateRow {
        label,
        ratio,
        repeats: cells.len(),
        va: mean_std(&col(&|c| c.scores.va_logloss)),
        te: mean_std(&col(&|c| c.scores.te_logloss)),
        accuracy: mean_std(&col(&|c| c.scores.accuracy)),
        gamma: mean_std(&col(&|c| c.gamma)).0,
        worst_case,
    }
}

/// Runs the full protocol on in-memory datasets.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    data: &Datasets,
) -> Result<ExperimentReport, PipelineError> {
    cfg.validate()?;
    let tcfg = cfg.train_config();
    let full = train(&data.tr, &tcfg)?;
    let full_scores = score(&full, &data.va, data.te.as_ref())?;

    let need_psi = cfg.methods.contains(&Method::OptLr);
    let stage = influence_stage(&full, &data.tr, &data.va, &cfg.pcg, need_psi)?;

    let vars = variants(cfg);
    let jobs: Vec<(Variant, f64, usize)> = cfg
        .ratios
        .iter()
        .flat_map(|&r| {
            vars.iter()
                .flat_map(move |&v| (0..cfg.repeats).map(move |k| (v, r, k)))
        })
        .collect();
    let cells: Vec<CellResult> = jobs
        .par_iter()
        .map(|&(v, r, k)| run_cell(v, r, k, cfg, data, &full, &stage))
        .collect();

    let n_deltas = if data.te.is_some() {
        cfg.deltas.len()
    } else {
        0
    };
    let mut aggregates = Vec::new();
    let mut sigmoid_choice = Vec::new();
    for &ratio in &cfg.ratios {
        let mut best: Option<AggregateRow> = None;
        for v in &vars {
            let group: Vec<&CellResult> = cells
                .iter()
                .filter(|c| c.variant == *v && c.ratio == ratio)
                .collect();
            let row = aggregate(&group, v.label(), ratio, n_deltas);
            if v.method == Method::Sigmoid {
                let better = best
                    .as_ref()
                    .is_none_or(|b| row.va.0 < b.va.0 || b.va.0.is_nan());
                if better && !row.va.0.is_nan() {
                    best = Some(row.clone());
                }
            }
            aggregates.push(row);
        }
        if let Some(mut b) = best {
            let alpha: f64 = b
                .label
                .split('@')
                .nth(1)
                .and_then(|a| a.parse().ok())
                .unwrap_or(f64::NAN);
            sigmoid_choice.push((ratio, alpha));
            b.label = Method::Sigmoid.to_string();
            aggregates.push(b);
        }
    }

    Ok(ExperimentReport {
        full: full_scores,
        full_params: full,
        n_train: data.tr.n_rows(),
        influence_cg_iters: stage.cg_iters,
        influence_seconds: stage.seconds,
        cells,
        aggregates,
        sigmoid_choice,
        deltas: if n_deltas > 0 {
            cfg.deltas.clone()
        } else {
            Vec::new()
        },
    })
}

/// Loads the configured data and runs the protocol. A configured
/// `flip_fraction` is ignored here; see [`run_noise_experiment`].
pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<ExperimentReport, PipelineError> {
    let data = Datasets::load(cfg)?;
    run_experiment(cfg, &data)
}

/// Same protocol with a fraction of training labels flipped beforehand.
/// Validation and test labels are untouched.
pub fn run_noise_experiment(
    cfg: &ExperimentConfig,
    data: &Datasets,
) -> Result<ExperimentReport, PipelineError> {
    let fraction = cfg
        .flip_fraction
        .ok_or_else(|| PipelineError::Invalid("noise experiment needs flip_fraction".into()))?;
    let noisy = Datasets {
        tr: flip_labels(&data.tr, fraction, flip_seed(cfg.seed))?,
        va: data.va.clone(),
        te: data.te.clone(),
    };
    run_experiment(cfg, &noisy)
}

pub const REPORT_HEADER: &str = "method,ratio,repeat,va_logloss,te_logloss,accuracy";
pub const AGGREGATE_HEADER: &str =
    "method,ratio,repeats,va_mean,va_std,te_mean,te_std,acc_mean,acc_std";

/// Per-cell rows.
pub fn report_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for c in &report.cells {
        let s = c.scores;
        writeln!(
            out,
            "{},{:?},{},{:?},{:?},{:?}",
            c.variant.label(),
            c.ratio,
            c.repeat,
            s.va_logloss,
            s.te_logloss,
            s.accuracy
        )
        .unwrap();
    }
    out
}

/// Full-set row followed by one row per (method, ratio); `sigmoid` is the
/// variant picked on validation loss.
pub fn aggregate_csv(report: &ExperimentReport) -> String {
    let mut out = format!("{AGGREGATE_HEADER}\n");
    let f = report.full;
    writeln!(
        out,
        "full,1.0,1,{:?},0.0,{:?},0.0,{:?},0.0",
        f.va_logloss, f.te_logloss, f.accuracy
    )
    .unwrap();
    for a in &report.aggregates {
        writeln!(
            out,
            "{},{:?},{},{:?},{:?},{:?},{:?},{:?},{:?}",
            a.label, a.ratio, a.repeats, a.va.0, a.va.1, a.te.0, a.te.1, a.accuracy.0, a.accuracy.1
        )
        .unwrap();
    }
    out
}

pub fn gamma_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("ratio,method,gamma\n");
    for a in &report.aggregates {
        writeln!(out, "{:?},{},{:?}", a.ratio, a.label, a.gamma).unwrap();
    }
    out
}

/// Repeat-averaged worst-case test risk per (method, ratio, δ).
pub fn robustness_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("method,ratio,delta,worst_case,eta_star\n");
    for a in &report.aggregates {
        for (d, (v, e)) in report.deltas.iter().zip(&a.worst_case) {
            writeln!(out, "{},{:?},{d:?},{v:?},{e:?}", a.label, a.ratio).unwrap();
        }
    }
    out
}

/// Writes `report.csv`, `aggregate.csv`, `gamma.csv` and `robustness.csv`
/// into `dir`, creating it if needed. Rewriting the same report yields
/// identical files.
pub fn emit_report(
    report: &ExperimentReport,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, PipelineError> {
    let dir = dir.as_ref();
    let io = |path: &Path| {
        let p = path.display().to_string();
        move |source| PipelineError::Io { path: p, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let files = [
        ("report.csv", report_csv(report)),
        ("aggregate.csv", aggregate_csv(report)),
        ("gamma.csv", gamma_csv(report)),
        ("robustness.csv", robustness_csv(report)),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
