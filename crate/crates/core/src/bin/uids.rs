use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uids::data::load_libsvm;
use uids::influence::{compute_phi, compute_psi_norms, InfluenceReport, PcgConfig};
use uids::model::{self, train, ModelParams, TrainConfig};
use uids::pipeline::{self, Datasets, ExperimentConfig};
use uids::risk::worst_case_curve;
use uids::sampling::{self, Influence, Method, MethodParams, Scale};

type Res<T> = Result<T, Box<dyn std::error::Error>>;

/// Influence-based unweighted subsampling for L2 logistic regression.
///
/// C is the coefficient of (1/2)‖θ‖² added to every per-sample logloss, so
/// the training objective is mean logloss + (C/2)‖θ‖².
#[derive(Parser)]
#[command(name = "uids", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit the full-set model and write it as text.
    Train {
        #[arg(long)]
        tr: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        reg_c: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-sample influence on validation loss (`index,phi[,psi_norm]`).
    Influence {
        #[arg(long)]
        tr: PathBuf,
        #[arg(long)]
        va: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Also compute parameter-influence norms (needed by optlr).
        #[arg(long)]
        psi: bool,
        /// Weight of diag(H) in the preconditioner; 0 is plain CG.
        #[arg(long, default_value_t = 1.0)]
        pcg_alpha: f64,
        #[arg(long, default_value_t = 1e-8)]
        pcg_tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a subset from an influence CSV (`index,prob,selected`).
    Sample {
        #[arg(long)]
        tr: PathBuf,
        #[arg(long)]
        influence: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        ratio: f64,
        /// Sigmoid α, linear α or optlr λ; `auto` where supported.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        optlr_floor: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Test logloss and accuracy of a model; optionally the worst-case curve.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        te: PathBuf,
        /// Comma-separated χ² radii.
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Writes `delta,worst_case,eta_star` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full train / influence / subsample / retrain experiment.
    Pipeline(ExpArgs),
    /// The experiment with a fraction of training labels flipped.
    Noise(ExpArgs),
}

#[derive(Args)]
struct ExpArgs {
    /// `key = value` file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tr: Option<PathBuf>,
    #[arg(long)]
    va: Option<PathBuf>,
    #[arg(long)]
    te: Option<PathBuf>,
    #[arg(long)]
    reg_c: Option<f64>,
    /// Comma-separated method names.
    #[arg(long)]
    method: Option<String>,
    /// Comma-separated ratios in (0,1].
    #[arg(long)]
    ratio: Option<String>,
    /// Comma-separated sigmoid α values.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    flip: Option<f64>,
    /// Output directory for the CSV reports.
    #[arg(long)]
    out: PathBuf,
}

impl ExpArgs {
    fn config(&self) -> Res<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let overrides = [
            ("tr", path(&self.tr)),
            ("va", path(&self.va)),
            ("te", path(&self.te)),
            ("reg_c", self.reg_c.map(|v| v.to_string())),
            ("methods", self.method.clone()),
            ("ratios", self.ratio.clone()),
            ("sigmoid_alphas", self.alpha.clone()),
            ("repeats", self.repeats.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("flip_fraction", self.flip.map(|v| v.to_string())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v).map_err(|e| format!("--{key}: {e}"))?;
            }
        }
        if self.tr.is_some() {
            cfg.data = None;
        }
        Ok(cfg)
    }
}

fn write(path: &Path, body: &str) -> Res<()> {
    fs::write(path, body).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn run(cmd: Cmd) -> Res<()> {
    match cmd {
        Cmd::Train {
            tr,
            reg_c,
            tol,
            max_iter,
            out,
        } => {
            let ds = load_libsvm(&tr, None)?;
            let params = train(&ds, &TrainConfig::new(reg_c, tol, max_iter))?;
            params.save(&out)?;
            eprintln!(
                "trained on {} rows, {} features: {} iterations, gradient norm {:.3e}",
                ds.n_rows(),
                ds.n_features(),
                params.fit.iterations,
                params.fit.grad_norm
            );
        }
        Cmd::Influence {
            tr,
            va,
            model,
            psi,
            pcg_alpha,
            pcg_tol,
            out,
        } => {
            let params = ModelParams::load(&model)?;
            let tr = load_libsvm(&tr, Some(params.dim()))?;
            let va = load_libsvm(&va, Some(params.dim()))?;
            let pcg = PcgConfig {
                alpha_precond: pcg_alpha,
                tol: pcg_tol,
                ..PcgConfig::default()
            };
            let start = std::time::Instant::now();
            let mut rep = compute_phi(&params, &tr, &va, &pcg)?;
            if psi {
                rep.psi_norms = Some(compute_psi_norms(&params, &tr, &pcg)?);
            }
            rep.save(&out)?;
            eprintln!(
                "influence of {} rows in {:.3}s ({} CG iterations)",
                tr.n_rows(),
                start.elapsed().as_secs_f64(),
                rep.cg_iters
            );
        }
        Cmd::Sample {
            tr,
            influence,
            method,
            ratio,
            alpha,
            optlr_floor,
            seed,
            out,
        } => {
            let tr = load_libsvm(&tr, None)?;
            let rep = InfluenceReport::load(&influence)?;
            let scale: Scale = alpha.as_deref().unwrap_or("auto").parse()?;
            let mut params = MethodParams {
                optlr_floor,
                ..MethodParams::default()
            };
            match method {
                Method::Linear => params.linear_alpha = scale,
                Method::OptLr => params.optlr_lambda = scale,
                Method::Sigmoid => {
                    params.sigmoid_alpha = match scale {
                        Scale::Fixed(a) => a,
                        Scale::Auto if alpha.is_none() => 1.0,
                        Scale::Auto => return Err("sigmoid needs a numeric --alpha".into()),
                    }
                }
                _ => {}
            }
            let inf = Influence {
                phi: &rep.phi,
                psi_norms: rep.psi_norms.as_deref(),
            };
            let plan = sampling::plan(method, inf, tr.labels(), ratio, seed, &params)?;
            write(&out, &plan.to_csv())?;
            eprintln!("selected {} of {} rows", plan.selected.len(), tr.n_rows());
        }
        Cmd::Evaluate {
            model,
            te,
            deltas,
            out,
        } => {
            let params = ModelParams::load(&model)?;
            let te = load_libsvm(&te, Some(params.dim()))?;
            println!("te_logloss,accuracy");
            println!(
                "{},{}",
                model::mean_logloss(&params, &te)?,
                model::accuracy(&params, &te)?
            );
            if let Some(out) = out {
                let losses = model::sample_losses(&params, &te)?;
                let mut body = String::from("delta,worst_case,eta_star\n");
                for (d, w) in worst_case_curve(&losses, &deltas)? {
                    body.push_str(&format!("{d},{},{}\n", w.value, w.eta_star));
                }
                write(&out, &body)?;
            }
        }
        Cmd::Pipeline(args) => {
            let cfg = args.config()?;
            let report = pipeline::run_pipeline(&cfg)?;
            finish(&report, &args.out)?;
        }
        Cmd::Noise(args) => {
            let cfg = args.config()?;
            let data = Datasets::load(&cfg)?;
            let report = pipeline::run_noise_experiment(&cfg, &data)?;
            finish(&report, &args.out)?;
        }
    }
    Ok(())
}

fn finish(report: &pipeline::ExperimentReport, out: &Path) -> Res<()> {
    pipeline::emit_report(report, out)?;
    for c in report.cells.iter().filter(|c| c.error.is_some()) {
        eprintln!(
            "cell {} ratio={} repeat={} failed: {}",
            c.variant.label(),
            c.ratio,
            c.repeat,
            c.error.as_deref().unwrap_or_default()
        );
    }
    for (ratio, alpha) in &report.sigmoid_choice {
        eprintln!("ratio {ratio}: sigmoid α={alpha} chosen on validation loss");
    }
    eprintln!(
        "full set: te_logloss={} accuracy={}; influence stage {:.3}s",
        report.full.te_logloss, report.full.accuracy, report.influence_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
