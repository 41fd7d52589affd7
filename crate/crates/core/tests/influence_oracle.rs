mod common;

use common::*;
use uids::influence::{compute_phi, PcgConfig};
use uids::model::{train, TrainConfig};
use uids::SparseDataset;

fn tight() -> PcgConfig {
    PcgConfig {
        tol: 1e-12,
        ..PcgConfig::default()
    }
}

/// `φ_i = −(Σ_j ∇L_j)ᵀ H⁻¹ ∇ℓ_i` evaluated pair by pair with a dense solve
/// per training row.
fn pairwise_phi(theta: &[f64], c: f64, tr: &SparseDataset, va: &SparseDataset) -> Vec<f64> {
    let xt = to_dense(tr);
    let xv = to_dense(va);
    let h = dense_hessian(theta, &xt, c);
    (0..tr.n_rows())
        .map(|i| {
            let psi = solve_dense(&h, &reg_loss_grad(theta, &xt[i], tr.label(i), c));
            let total: f64 = (0..va.n_rows())
                .map(|j| dotv(&reg_loss_grad(theta, &xv[j], va.label(j), 0.0), &psi))
                .sum();
            -total
        })
        .collect()
}

#[test]
fn phi_matches_pairwise_oracle() {
    let tr = SparseDataset::from_dense(
        &[
            vec![1.0, 0.2, 0.0],
            vec![-0.5, 1.0, 0.3],
            vec![0.3, -1.2, 1.0],
            vec![1.5, 0.1, -0.7],
            vec![-1.0, -0.4, 0.2],
        ],
        vec![1, 0, 1, 1, 0],
    )
    .unwrap();
    let va = SparseDataset::from_dense(&[vec![0.8, -0.1, 0.4], vec![-0.2, 0.9, -0.5]], vec![1, 0])
        .unwrap();
    let params = train(&tr, &TrainConfig::new(0.1, 1e-12, 100)).unwrap();
    let got = compute_phi(&params, &tr, &va, &tight()).unwrap();
    let want = pairwise_phi(&params.theta, 0.1, &tr, &va);
    for (g, w) in got.phi.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-9 * w.abs().max(1e-3), "{g} vs {w}");
    }
}

#[test]
fn phi_matches_pairwise_oracle_on_sparse_synthetic() {
    let tr = synthetic(40, 6, 21);
    let va = synthetic(15, 6, 22);
    let params = train(&tr, &TrainConfig::new(0.2, 1e-12, 100)).unwrap();
    let got = compute_phi(&params, &tr, &va, &tight()).unwrap();
    let want = pairwise_phi(&params.theta, 0.2, &tr, &va);
    assert!(rel_err(&got.phi, &want) < 1e-8);
}

#[test]
fn phi_is_permutation_equivariant() {
    let tr = synthetic(30, 4, 23);
    let va = synthetic(10, 4, 24);
    let cfg = TrainConfig::new(0.1, 1e-12, 100);
    let base = compute_phi(&train(&tr, &cfg).unwrap(), &tr, &va, &tight())
        .unwrap()
        .phi;
    let perm: Vec<usize> = (0..30).map(|i| (i * 7 + 3) % 30).collect();
    let shuffled = tr.subset(&perm);
    let phi = compute_phi(&train(&shuffled, &cfg).unwrap(), &shuffled, &va, &tight())
        .unwrap()
        .phi;
    for (k, &i) in perm.iter().enumerate() {
        assert!((phi[k] - base[i]).abs() <= 1e-8 * base[i].abs().max(1e-3));
    }
}

#[test]
fn duplicated_validation_doubles_phi() {
    let tr = synthetic(25, 3, 25);
    let va = synthetic(8, 3, 26);
    let params = train(&tr, &TrainConfig::new(0.1, 1e-12, 100)).unwrap();
    let once = compute_phi(&params, &tr, &va, &tight()).unwrap().phi;
    let twice = compute_phi(&params, &tr, &va.concat(&va).unwrap(), &tight())
        .unwrap()
        .phi;
    let doubled: Vec<f64> = once.iter().map(|x| 2.0 * x).collect();
    assert!(rel_err(&twice, &doubled) < 1e-9);
}
