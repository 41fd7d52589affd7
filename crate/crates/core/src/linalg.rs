//! Dense vector helpers and a matrix-free preconditioned conjugate gradient.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖b − A·x‖`, recomputed from scratch at exit.
    pub residual: f64,
    pub converged: bool,
    /// Whether the solve fell back to unpreconditioned CG after stagnating.
    pub restarted: bool,
}

/// Iterations without a new best residual before falling back to plain CG.
const STAGNATION_WINDOW: usize = 10;

/// Solves `A·x = b` for symmetric positive definite `A` given only its
/// action. `inv_precond` holds the inverse of a diagonal preconditioner;
/// `None` is plain CG. Stops when `‖b − A·x‖ ≤ tol·‖b‖`.
///
/// The recursively updated residual drifts from the true one, so on apparent
/// convergence the true residual is recomputed and the iteration restarted
/// from it if needed.
pub fn pcg<F>(
    apply: F,
    inv_precond: Option<&[f64]>,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> CgOutcome
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return CgOutcome {
            x,
            iterations: 0,
            residual: 0.0,
            converged: true,
            restarted: false,
        };
    }
    let target = tol * b_norm;
    let mut precond = inv_precond;
    let mut restarted = false;

    let mut ax = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut iterations = 0;

    let mut best_x = x.clone();
    let mut best_res = b_norm;
    let mut since_best = 0;

    let precondition = |r: &[f64], z: &mut [f64], m: Option<&[f64]>| match m {
        Some(m) => z
            .iter_mut()
            .zip(r)
            .zip(m)
            .for_each(|((zi, ri), mi)| *zi = ri * mi),
        None => z.copy_from_slice(r),
    };

    'outer: loop {
        precondition(&r, &mut z, precond);
        p.copy_from_slice(&z);
        let mut rz = dot(&r, &z);

        loop {
            if iterations >= max_iter {
                break 'outer;
            }
            apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                // loss of positive curvature: numerically exhausted
                break 'outer;
            }
            let step = rz / pap;
            axpy(step, &p, &mut x);
            axpy(-step, &ap, &mut r);
            iterations += 1;

            let r_norm = norm(&r);
            if r_norm < best_res {
                best_res = r_norm;
                best_x.copy_from_slice(&x);
                since_best = 0;
            } else {
                since_best += 1;
            }

            if r_norm <= target {
                apply(&x, &mut ax);
                r.iter_mut()
                    .zip(b)
                    .zip(&ax)
                    .for_each(|((ri, bi), ai)| *ri = bi - ai);
                let true_res = norm(&r);
                if true_res <= target {
                    return CgOutcome {
                        x,
                        iterations,
                        residual: true_res,
                        converged: true,
                        restarted,
                    };
                }
                best_res = true_res;
                best_x.copy_from_slice(&x);
                since_best = 0;
                continue 'outer;
            }

            if since_best >= STAGNATION_WINDOW && precond.is_some() && !restarted {
                precond = None;
                restarted = true;
                x.copy_from_slice(&best_x);
                apply(&x, &mut ax);
                r.iter_mut()
                    .zip(b)
                    .zip(&ax)
                    .for_each(|((ri, bi), ai)| *ri = bi - ai);
                since_best = 0;
                continue 'outer;
            }

            precondition(&r, &mut z, precond);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            p.iter_mut()
                .zip(&z)
                .for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
    }

    apply(&best_x, &mut ax);
    let residual = norm(
        &b.iter()
            .zip(&ax)
            .map(|(bi, ai)| bi - ai)
            .collect::<Vec<_>>(),
    );
    CgOutcome {
        converged: residual <= target,
        x: best_x,
        iterations,
        residual,
        restarted,
    }
}
