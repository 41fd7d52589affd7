//! Sampling functions that map influence to selection probabilities, and
//! class-stratified fixed-budget subset draws.
//!
//! Every influence-based mapping is non-increasing in `φ`: samples whose
//! upweighting would raise validation loss are kept less often.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::data::{round_half_up, SparseDataset};
use crate::model::{sample_losses, ModelError, ModelParams};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("target ratio {0} not in (0,1]")]
    InvalidRatio(f64),
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("all influence values are zero; automatic scaling is undefined, pass a fixed alpha")]
    ZeroScale,
    #[error("influence vector is constant; sigmoid sampling needs max(φ) > min(φ)")]
    ConstantPhi,
    #[error("non-finite input value")]
    NonFinite,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("parameter-influence norms must be nonnegative")]
    NegativeNorm,
    #[error("class {0} has no samples")]
    EmptyClass(u8),
    #[error("selected sample {0} has zero probability")]
    ZeroProbability(usize),
    #[error("method {0} needs {1}")]
    MissingInput(Method, &'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Dropout,
    Linear,
    Sigmoid,
    OptLr,
    Random,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Dropout,
        Method::Linear,
        Method::Sigmoid,
        Method::OptLr,
        Method::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dropout => "dropout",
            Method::Linear => "linear",
            Method::Sigmoid => "sigmoid",
            Method::OptLr => "optlr",
            Method::Random => "random",
        }
    }

    /// Whether retraining uses the `1/π` importance-weighted risk.
    pub fn is_weighted(self) -> bool {
        self == Method::OptLr
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown method {s:?} (dropout, linear, sigmoid, optlr, random)")
            })
    }
}

/// A scale parameter that is either fixed or derived from the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Auto,
    Fixed(f64),
}

impl FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("auto") {
            return Ok(Scale::Auto);
        }
        s.trim()
            .parse()
            .map(Scale::Fixed)
            .map_err(|_| format!("expected a number or `auto`, got {s:?}"))
    }
}

fn check_finite(v: &[f64]) -> Result<(), SamplingError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SamplingError::NonFinite)
    }
}

fn check_alpha(alpha: f64) -> Result<(), SamplingError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(SamplingError::InvalidAlpha(alpha))
    }
}

/// Deterministic rule: keep `φ ≤ 0`, drop `φ > 0`.
pub fn dropout_probs(phi: &[f64]) -> Vec<f64> {
    phi.iter()
        .map(|&p| if p <= 0.0 { 1.0 } else { 0.0 })
        .collect()
}

/// `1 / max|φ|`.
pub fn auto_linear_alpha(phi: &[f64]) -> Result<f64, SamplingError> {
    let m = phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    if m == 0.0 {
        return Err(SamplingError::ZeroScale);
    }
    Ok(1.0 / m)
}

/// `π_i = max{0, min{1, −α·φ_i}}`. Returns the probabilities and the `α`
/// actually used.
pub fn linear_probs(phi: &[f64], alpha: Scale) -> Result<(Vec<f64>, f64), SamplingError> {
    check_finite(phi)?;
    let alpha = match alpha {
        Scale::Auto => auto_linear_alpha(phi)?,
        Scale::Fixed(a) => a,
    };
    check_alpha(alpha)?;
    let probs = phi.iter().map(|&p| (-alpha * p).clamp(0.0, 1.0)).collect();
    Ok((probs, alpha))
}

/// `π_i = 1 / (1 + exp(α·φ_i / (max φ − min φ)))`.
pub fn sigmoid_probs(phi: &[f64], alpha: f64) -> Result<Vec<f64>, SamplingError> {
    check_finite(phi)?;
    check_alpha(alpha)?;
    let (lo, hi) = phi
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
            (lo.min(p), hi.max(p))
        });
    let range = hi - lo;
    if !(range > 0.0) {
        return Err(SamplingError::ConstantPhi);
    }
    Ok(phi
        .iter()
        .map(|&p| crate::model::sigmoid(-alpha * p / range))
        .collect())
}

/// Weighted-baseline probabilities `π_i = max{floor, min{1, λ‖ψ_i‖}}` with
/// `λ = 1 / max‖ψ‖` under [`Scale::Auto`]. Returns the probabilities and `λ`.
pub fn optlr_probs(
    psi_norms: &[f64],
    floor: f64,
    lambda: Scale,
) -> Result<(Vec<f64>, f64), SamplingError> {
    check_finite(psi_norms)?;
    if psi_norms.iter().any(|&p| p < 0.0) {
        return Err(SamplingError::NegativeNorm);
    }
    if !(0.0..=1.0).contains(&floor) {
        return Err(SamplingError::InvalidAlpha(floor));
    }
    let lambda = match lambda {
        Scale::Auto => {
            let m = psi_norms.iter().fold(0.0f64, |m, &p| m.max(p));
            if m == 0.0 {
                return Err(SamplingError::ZeroScale);
            }
            1.0 / m
        }
        Scale::Fixed(l) => l,
    };
    check_alpha(lambda)?;
    let probs = psi_norms
        .iter()
        .map(|&p| (lambda * p).min(1.0).max(floor))
        .collect();
    Ok((probs, lambda))
}

/// Equal probability for every sample.
pub fn random_probs(n: usize, ratio: f64) -> Vec<f64> {
    vec![ratio; n]
}

/// Perturbation implied by a probability, `ε = (π − 1)/n ∈ [−1/n, 0]`.
pub fn perturbation(prob: f64, n: usize) -> f64 {
    (prob - 1.0) / n as f64
}

/// Per-class sample budgets `[negatives, positives]`. The total is
/// `round(ratio·n)`, apportioned to the classes by largest remainder so the
/// class ratio is preserved to within one sample; an even remainder goes to
/// the larger class.
pub fn class_quotas(labels: &[u8], ratio: f64) -> Result<[usize; 2], SamplingError> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(SamplingError::InvalidRatio(ratio));
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let counts = [labels.len() - pos, pos];
    for (c, &n) in counts.iter().enumerate() {
        if n == 0 {
            return Err(SamplingError::EmptyClass(c as u8));
        }
    }
    let n = labels.len();
    let total = round_half_up(ratio * n as f64).min(n);
    let ideal = counts.map(|c| (total * c) as f64 / n as f64);
    let mut q = ideal.map(|x| (x + 1e-9).floor() as usize);
    let frac = |c: usize| ideal[c] - q[c] as f64;
    let mut order = [0, 1];
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(counts[b].cmp(&counts[a])));
    let mut left = total - (q[0] + q[1]);
    for c in order {
        if left > 0 && q[c] < counts[c] {
            q[c] += 1;
            left -= 1;
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub method: Method,
    pub probs: Vec<f64>,
    /// Sorted indices of the selected training rows.
    pub selected: Vec<usize>,
    pub target_ratio: f64,
    pub seed: u64,
    /// Method hyperparameter (`α`, or `λ` for optlr); NaN when unused.
    pub alpha: f64,
}

impl SamplingPlan {
    /// `# method=.. alpha=.. seed=.. ratio=..` then `index,prob,selected`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# method={} alpha={} seed={} ratio={}\nindex,prob,selected\n",
            self.method, self.alpha, self.seed, self.target_ratio
        );
        let mut sel = self.selected.iter().peekable();
        for (i, p) in self.probs.iter().enumerate() {
            let chosen = sel.next_if(|&&s| s == i).is_some();
            writeln!(out, "{i},{p},{}", u8::from(chosen)).unwrap();
        }
        out
    }

    pub fn selection_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.probs.len()];
        for &i in &self.selected {
            mask[i] = true;
        }
        mask
    }
}

/// Draws a class-stratified subset of exactly the budget from
/// [`class_quotas`].
///
/// Dropout ranks each class by `ranking` ascending (the influence values;
/// falls back to probabilities descending), ties by index. The other methods
/// draw weighted samples without replacement with weights `π`
/// (Efraimidis–Spirakis keys); zero-weight samples only fill a shortfall and
/// are then taken uniformly at random.
pub fn draw_subset(
    probs: &[f64],
    labels: &[u8],
    method: Method,
    target_ratio: f64,
    seed: u64,
    ranking: Option<&[f64]>,
) -> Result<SamplingPlan, SamplingError> {
    if probs.len() != labels.len() {
        return Err(SamplingError::LengthMismatch(probs.len(), labels.len()));
    }
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(SamplingError::NonFinite);
    }
    if let Some(r) = ranking {
        if r.len() != probs.len() {
            return Err(SamplingError::LengthMismatch(r.len(), probs.len()));
        }
        check_finite(r)?;
    }
    let quotas = class_quotas(labels, target_ratio)?;
    let mut selected = Vec::with_capacity(quotas[0] + quotas[1]);

    for class in 0..2u8 {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let quota = quotas[class as usize];
        let mut order = if method == Method::Dropout {
            let mut m = members;
            match ranking {
                Some(r) => m.sort_by(|&a, &b| r[a].total_cmp(&r[b]).then(a.cmp(&b))),
                None => m.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b))),
            }
            m
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::from(class));
            weighted_order(&members, probs, &mut rng)
        };
        order.truncate(quota);
        selected.extend(order);
    }
    selected.sort_unstable();
    Ok(SamplingPlan {
        method,
        probs: probs.to_vec(),
        selected,
        target_ratio,
        seed,
        alpha: f64::NAN,
    })
}

/// Random priority order: positive weights by descending `ln(u)/w`, then the
/// zero-weight members shuffled.
fn weighted_order<R: Rng>(members: &[usize], probs: &[f64], rng: &mut R) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = Vec::new();
    let mut zero: Vec<usize> = Vec::new();
    for &i in members {
        // one draw per member keeps the stream aligned across weight changes
        let u: f64 = 1.0 - rng.gen::<f64>();
        if probs[i] > 0.0 {
            keyed.push((u.ln() / probs[i], i));
        } else {
            zero.push(i);
        }
    }
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    zero.shuffle(rng);
    keyed.into_iter().map(|(_, i)| i).chain(zero).collect()
}

/// Inputs a sampling method may need.
#[derive(Debug, Clone, Copy)]
pub struct Influence<'a> {
    pub phi: &'a [f64],
    pub psi_norms: Option<&'a [f64]>,
}

/// Hyperparameters for [`plan`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodParams {
    pub linear_alpha: Scale,
    pub sigmoid_alpha: f64,
    pub optlr_floor: f64,
    pub optlr_lambda: Scale,
}

impl Default for MethodParams {
    fn default() -> Self {
        Self {
            linear_alpha: Scale::Auto,
            sigmoid_alpha: 1.0,
            optlr_floor: 0.01,
            optlr_lambda: Scale::Auto,
        }
    }
}

/// Probabilities for `method` followed by [`draw_subset`].
pub fn plan(
    method: Method,
    influence: Influence<'_>,
    labels: &[u8],
    target_ratio: f64,
    seed: u64,
    params: &MethodParams,
) -> Result<SamplingPlan, SamplingError> {
    let phi = influence.phi;
    if phi.len() != labels.len() {
        return Err(SamplingError::LengthMismatch(phi.len(), labels.len()));
    }
    let (probs, alpha) = match method {
        Method::Dropout => (dropout_probs(phi), f64::NAN),
        Method::Linear => linear_probs(phi, params.linear_alpha)?,
        Method::Sigmoid => (
            sigmoid_probs(phi, params.sigmoid_alpha)?,
            params.sigmoid_alpha,
        ),
        Method::OptLr => {
            let psi = influence.psi_norms.ok_or(SamplingError::MissingInput(
                method,
                "parameter-influence norms",
            ))?;
            optlr_probs(psi, params.optlr_floor, params.optlr_lambda)?
        }
        Method::Random => (random_probs(labels.len(), target_ratio), f64::NAN),
    };
    let ranking = (method == Method::Dropout).then_some(phi);
    let mut plan = draw_subset(&probs, labels, method, target_ratio, seed, ranking)?;
    plan.alpha = alpha;
    Ok(plan)
}

/// Importance-weighted subset risk `(1/n) Σ_{i selected} ℓ_i(θ)/π_i` with
/// regularized per-sample losses and `n` the full training size.
pub fn subset_risk_weighted(
    params: &ModelParams,
    tr: &SparseDataset,
    selected: &[usize],
    probs: &[f64],
) -> Result<f64, SamplingError> {
    if probs.len() != tr.n_rows() {
        return Err(SamplingError::LengthMismatch(probs.len(), tr.n_rows()));
    }
    if tr.is_empty() {
        return Err(ModelError::EmptyDataset.into());
    }
    let losses = sample_losses(params, tr)?;
    let reg = 0.5 * params.reg_c * crate::linalg::dot(&params.theta, &params.theta);
    let mut total = 0.0;
    for &i in selected {
        if !(probs[i] > 0.0) {
            return Err(SamplingError::ZeroProbability(i));
        }
        total += (losses[i] + reg) / probs[i];
    }
    Ok(total / tr.n_rows() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dropout_examples() {
        assert_eq!(dropout_probs(&[-1.0, 0.0, 3.0]), vec![1.0, 1.0, 0.0]);
        assert_eq!(dropout_probs(&[-1.0, -2.0]), vec![1.0, 1.0]);
        assert_eq!(dropout_probs(&[0.1, 2.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn linear_examples() {
        let (p, a) = linear_probs(&[-2.0, 0.0, 1.0], Scale::Auto).unwrap();
        assert_eq!(a, 0.5);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
        let (p, _) = linear_probs(&[-4.0, -0.5, 0.25], Scale::Fixed(0.5)).unwrap();
        assert_eq!(p, vec![1.0, 0.25, 0.0]);
        assert!(matches!(
            linear_probs(&[0.0, 0.0], Scale::Auto),
            Err(SamplingError::ZeroScale)
        ));
        assert!(linear_probs(&[1.0], Scale::Fixed(-1.0)).is_err());
    }

    #[test]
    fn sigmoid_examples() {
        let p = sigmoid_probs(&[-2.0, 0.0, 2.0], 1.0).unwrap();
        let s = |z: f64| 1.0 / (1.0 + (-z).exp());
        assert!((p[0] - s(0.5)).abs() < 1e-15);
        assert_eq!(p[1], 0.5);
        assert!((p[2] - s(-0.5)).abs() < 1e-15);
        assert!((p[0] - 0.622_459_331_201_854_6).abs() < 1e-12);
        let steep = sigmoid_probs(&[-1.0, 1.0], 1000.0).unwrap();
        assert!(steep[0] > 1.0 - 1e-12 && steep[1] < 1e-12);
        assert!(matches!(
            sigmoid_probs(&[1.0, 1.0], 1.0),
            Err(SamplingError::ConstantPhi)
        ));
    }

    #[test]
    fn optlr_examples() {
        let (p, lambda) = optlr_probs(&[4.0, 0.0, 2.0, 0.01], 0.01, Scale::Auto).unwrap();
        assert_eq!(lambda, 0.25);
        assert_eq!(p, vec![1.0, 0.01, 0.5, 0.01]);
        assert!(matches!(
            optlr_probs(&[0.0, 0.0], 0.01, Scale::Auto),
            Err(SamplingError::ZeroScale)
        ));
        assert!(matches!(
            optlr_probs(&[-1.0], 0.01, Scale::Auto),
            Err(SamplingError::NegativeNorm)
        ));
    }

    #[test]
    fn quotas_follow_largest_class_rule() {
        let labels: Vec<u8> = (0..100).map(|i| u8::from(i < 40)).collect();
        assert_eq!(class_quotas(&labels, 0.95).unwrap(), [57, 38]);
        let labels: Vec<u8> = (0..7).map(|i| u8::from(i < 3)).collect();
        // total round(3.5)=4 split 16/7 : 12/7
        assert_eq!(class_quotas(&labels, 0.5).unwrap(), [2, 2]);
        // an even split of the remainder favours the larger class
        let labels: Vec<u8> = (0..4).map(|i| u8::from(i < 2)).collect();
        assert_eq!(
            class_quotas(&labels, 0.75).unwrap().iter().sum::<usize>(),
            3
        );
        assert!(class_quotas(&[1, 1], 0.5).is_err());
        assert!(class_quotas(&[0, 1], 0.0).is_err());
    }

    #[test]
    fn full_ratio_selects_everything() {
        let labels = [0, 1, 1, 0, 1];
        let plan = draw_subset(&[1.0; 5], &labels, Method::Sigmoid, 1.0, 3, None).unwrap();
        assert_eq!(plan.selected, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn dropout_takes_negative_then_smallest_positive() {
        // one class, 10 samples: 5 negative φ, quota 7 → the 5 plus the two
        // smallest positive φ
        let phi = [0.3, -1.0, 0.1, -0.2, 0.9, -0.5, 0.05, -3.0, 0.4, -0.01];
        let mut labels = [0u8; 11];
        labels[10] = 1;
        let mut phi_all = phi.to_vec();
        phi_all.push(0.0);
        let probs = dropout_probs(&phi_all);
        let plan = draw_subset(&probs, &labels, Method::Dropout, 0.7, 0, Some(&phi_all)).unwrap();
        let class0: Vec<usize> = plan.selected.iter().copied().filter(|&i| i < 10).collect();
        assert_eq!(class0, vec![1, 2, 3, 5, 6, 7, 9]);
    }

    #[test]
    fn zero_weights_fill_shortfall_only() {
        let labels = [0u8; 6].iter().chain(&[1u8]).copied().collect::<Vec<_>>();
        let probs = [0.9, 0.0, 0.2, 0.0, 0.0, 0.5, 1.0];
        let plan = draw_subset(&probs, &labels, Method::Linear, 4.0 / 7.0, 9, None).unwrap();
        let class0: Vec<usize> = plan.selected.iter().copied().filter(|&i| i < 6).collect();
        assert_eq!(class0.len(), 3);
        for i in [0, 2, 5] {
            assert!(class0.contains(&i));
        }
    }

    #[test]
    fn plan_csv_layout() {
        let plan = SamplingPlan {
            method: Method::Sigmoid,
            probs: vec![0.25, 1.0],
            selected: vec![1],
            target_ratio: 0.5,
            seed: 7,
            alpha: 1.0,
        };
        assert_eq!(
            plan.to_csv(),
            "# method=sigmoid alpha=1 seed=7 ratio=0.5\nindex,prob,selected\n0,0.25,0\n1,1,1\n"
        );
    }

    #[test]
    fn weighted_risk_reductions() {
        let tr =
            SparseDataset::from_dense(&[vec![1.0], vec![-2.0], vec![0.5]], vec![1, 0, 0]).unwrap();
        let p = ModelParams::new(vec![0.7], 0.1);
        let full = crate::model::risk(&p, &tr).unwrap();
        let all = subset_risk_weighted(&p, &tr, &[0, 1, 2], &[1.0; 3]).unwrap();
        assert!((all - full).abs() < 1e-15);
        let losses = sample_losses(&p, &tr).unwrap();
        let reg = 0.5 * 0.1 * 0.49;
        let one = subset_risk_weighted(&p, &tr, &[1], &[1.0, 0.5, 1.0]).unwrap();
        assert!((one - 2.0 * (losses[1] + reg) / 3.0).abs() < 1e-15);
        assert!(matches!(
            subset_risk_weighted(&p, &tr, &[1], &[1.0, 0.0, 1.0]),
            Err(SamplingError::ZeroProbability(1))
        ));
    }

    fn phi_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 2..40)
            .prop_filter("non-constant", |v| v.iter().any(|&x| x != v[0]))
    }

    fn sample_cov(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / (n - 1.0)
    }

    proptest! {
        #[test]
        fn mappings_are_monotone(phi in phi_vec(), alpha in 0.01f64..60.0) {
            let sig = sigmoid_probs(&phi, alpha).unwrap();
            let (lin, _) = linear_probs(&phi, Scale::Auto).unwrap();
            let drop = dropout_probs(&phi);
            for a in 0..phi.len() {
                for b in 0..phi.len() {
                    if phi[a] <= phi[b] {
                        prop_assert!(sig[a] >= sig[b]);
                        prop_assert!(lin[a] >= lin[b]);
                        prop_assert!(drop[a] >= drop[b]);
                    }
                }
            }
            prop_assert!(sig.iter().chain(&lin).all(|p| (0.0..=1.0).contains(p)));
        }

        #[test]
        fn perturbation_negatively_correlated(phi in phi_vec(), alpha in 0.01f64..60.0) {
            let n = phi.len();
            let (lin, _) = linear_probs(&phi, Scale::Auto).unwrap();
            for probs in [dropout_probs(&phi), lin, sigmoid_probs(&phi, alpha).unwrap()] {
                let eps: Vec<f64> = probs.iter().map(|&p| perturbation(p, n)).collect();
                prop_assert!(eps.iter().all(|&e| (-1.0 / n as f64..=0.0).contains(&e)));
                prop_assert!(sample_cov(&phi, &eps) <= 1e-15);
            }
        }

        #[test]
        fn positive_rescaling_is_harmless(phi in phi_vec(), c in 1e-3f64..1e3, alpha in 0.1f64..50.0) {
            let scaled: Vec<f64> = phi.iter().map(|p| p * c).collect();
            prop_assert_eq!(dropout_probs(&phi), dropout_probs(&scaled));
            let a = sigmoid_probs(&phi, alpha).unwrap();
            let b = sigmoid_probs(&scaled, alpha).unwrap();
            let (la, _) = linear_probs(&phi, Scale::Auto).unwrap();
            let (lb, _) = linear_probs(&scaled, Scale::Auto).unwrap();
            for i in 0..phi.len() {
                prop_assert!((a[i] - b[i]).abs() < 1e-12);
                prop_assert!((la[i] - lb[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn draws_respect_budget_and_class_ratio(
            labels in prop::collection::vec(0u8..2, 4..120),
            ratio in 0.05f64..1.0,
            seed in any::<u64>(),
            method_ix in 0usize..5,
        ) {
            prop_assume!(labels.contains(&0) && labels.contains(&1));
            let n = labels.len();
            let phi: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
            let psi: Vec<f64> = (0..n).map(|i| (i % 7) as f64 + 0.5).collect();
            let method = Method::ALL[method_ix];
            let inf = Influence { phi: &phi, psi_norms: Some(&psi) };
            let a = plan(method, inf, &labels, ratio, seed, &MethodParams::default()).unwrap();
            let b = plan(method, inf, &labels, ratio, seed, &MethodParams::default()).unwrap();
            prop_assert_eq!(&a.selected, &b.selected);
            let total = (ratio * n as f64 + 0.5 + 1e-9).floor() as usize;
            prop_assert_eq!(a.selected.len(), total);
            prop_assert!(a.selected.windows(2).all(|w| w[0] < w[1]));
            if !a.selected.is_empty() {
                let pos_sel = a.selected.iter().filter(|&&i| labels[i] == 1).count() as f64;
                let frac_sel = pos_sel / a.selected.len() as f64;
                let frac_all = labels.iter().filter(|&&y| y == 1).count() as f64 / n as f64;
                prop_assert!((frac_sel - frac_all).abs() <= 1.0 / a.selected.len() as f64 + 1e-12);
            }
        }
    }
}
