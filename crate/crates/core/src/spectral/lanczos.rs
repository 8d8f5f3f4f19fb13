//! Lanczos iteration with full reorthogonalization for the top of a
//! Hermitian spectrum. Results are estimates only.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eig_hermitian;
use crate::error::{Result, SpinError};

type C = Complex64;

pub const EXPLORATORY_NOTE: &str = "exploratory - not used for certification";
const BREAKDOWN: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct LanczosResult {
    /// Ritz values, descending.
    pub ritz_values: Vec<f64>,
    /// `|beta_k * e_k^T y|` for each Ritz value; zero after exhaustion.
    pub residual_bounds: Vec<f64>,
    pub steps: usize,
    /// Times the recurrence broke down and restarted from a fresh vector.
    pub restarts: usize,
    pub note: &'static str,
}

impl LanczosResult {
    /// Ritz values whose residual bound is at most `tol`.
    pub fn converged(&self, tol: f64) -> Vec<f64> {
        self.ritz_values.iter().zip(&self.residual_bounds).filter(|(_, &r)| r <= tol).map(|(&v, _)| v).collect()
    }
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C> {
    let v: Vec<C> = (0..dim).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = norm(&v);
    v.into_iter().map(|z| z / s).collect()
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize(w: &mut [C], basis: &[Vec<C>]) {
    for _ in 0..2 {
        for b in basis {
            let h = dot(b, w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= h * y;
            }
        }
    }
}

/// Runs up to `k` Lanczos steps from a seeded random start. On breakdown the
/// recurrence restarts from a random vector orthogonal to the basis so far,
/// which keeps repeated eigenvalues visible; it stops when the space is
/// exhausted.
pub fn lanczos_top<F>(apply: F, dim: usize, k: usize, seed: u64) -> Result<LanczosResult>
where
    F: Fn(&[C]) -> Result<Vec<C>>,
{
    if dim == 0 || k == 0 {
        return Err(SpinError::InvalidArgument("lanczos needs dim >= 1 and k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let x = random_unit(&mut rng, dim);
    let y = random_unit(&mut rng, dim);
    let ax = apply(&x)?;
    let ay = apply(&y)?;
    if ax.len() != dim || ay.len() != dim {
        return Err(SpinError::InvalidArgument(format!("map returned length {} for dim {dim}", ax.len())));
    }
    let asym = (dot(&ax, &y) - dot(&x, &ay)).norm();
    if asym > SYMMETRY_TOL * (1.0 + norm(&ax) + norm(&ay)) {
        return Err(SpinError::NotHermitian(asym));
    }

    let steps = k.min(dim);
    let mut basis: Vec<Vec<C>> = Vec::with_capacity(steps);
    let mut alphas: Vec<f64> = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);
    let mut restarts = 0;
    let mut q = random_unit(&mut rng, dim);
    let mut last_beta = 0.0;

    while basis.len() < steps {
        let mut w = apply(&q)?;
        let alpha = dot(&q, &w).re;
        basis.push(q);
        orthogonalize(&mut w, &basis);
        alphas.push(alpha);
        let beta = norm(&w);
        last_beta = beta;
        if basis.len() == steps {
            break;
        }
        if beta > BREAKDOWN {
            betas.push(beta);
            q = w.into_iter().map(|z| z / beta).collect();
            continue;
        }
        let mut fresh = random_unit(&mut rng, dim);
        orthogonalize(&mut fresh, &basis);
        let s = norm(&fresh);
        if s < 1e-8 {
            last_beta = 0.0;
            break;
        }
        restarts += 1;
        betas.push(0.0);
        q = fresh.into_iter().map(|z| z / s).collect();
    }

    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            C::new(alphas[i], 0.0)
        } else if i + 1 == j || j + 1 == i {
            C::new(betas[i.min(j)], 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let spec = eig_hermitian(&t)?;
    let vecs = spec.eigenvectors.expect("jacobi returns vectors");
    let exhausted = basis.len() == dim;
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|j| {
            let bound = if exhausted { 0.0 } else { (last_beta * vecs[(m - 1, j)]).norm() };
            (spec.eigenvalues[j], bound)
        })
        .collect();
    pairs.reverse();
    Ok(LanczosResult {
        ritz_values: pairs.iter().map(|p| p.0).collect(),
        residual_bounds: pairs.iter().map(|p| p.1).collect(),
        steps: m,
        restarts,
        note: EXPLORATORY_NOTE,
    })
}
