//! Hermitian eigensolvers, eigenspace extraction, and exact eigenpair checks.

mod exact;
mod lanczos;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SpinError};

pub use exact::{exact_kernel, exact_theta2_scaled, exact_verify_eigenpair, same_ring, ExactTheta2};
pub(crate) use exact::shifted_integer_matrix;
pub use lanczos::{lanczos_top, LanczosResult, EXPLORATORY_NOTE};

type C = Complex64;

pub const HERMITIAN_TOL: f64 = 1e-8;
pub const JACOBI_TOL: f64 = 1e-12;
pub const DEFAULT_WINDOW: f64 = 1e-7;
const MAX_SWEEPS: usize = 100;

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`.
    pub eigenvectors: Option<DMatrix<C>>,
    /// max |Mv - lambda v| over the returned pairs.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct Eigenspace {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns.
    pub basis: DMatrix<C>,
}

impl Eigenspace {
    pub fn multiplicity(&self) -> usize {
        self.basis.ncols()
    }
}

/// Largest entrywise modulus of `m - m*`.
pub fn hermitian_defect(m: &DMatrix<C>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn frobenius(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Full spectrum of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Pairs (p, q) are visited row by row; sweeps stop once the off-diagonal
/// Frobenius mass is below `1e-12 * |M|_F`.
pub fn eig_hermitian(m: &DMatrix<C>) -> Result<SpectrumResult> {
    if m.nrows() != m.ncols() {
        return Err(SpinError::InvalidArgument(format!("matrix is {}x{}, not square", m.nrows(), m.ncols())));
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(SpinError::NotHermitian(defect));
    }
    let n = m.nrows();
    // column-major working copies, symmetrized
    let mut a: Vec<C> = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5).as_slice().to_vec();
    let mut v: Vec<C> = DMatrix::<C>::identity(n, n).as_slice().to_vec();
    let norm = frobenius(&a);
    let target = JACOBI_TOL * norm;
    let skip = 1e-18 * norm;

    let off = |a: &[C]| {
        let mut s = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    s += a[i + j * n].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(SpinError::Internal(format!("jacobi did not converge in {MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let beta = a[p + q * n];
                let mag = beta.norm();
                if mag <= skip {
                    continue;
                }
                rotate(&mut a, &mut v, n, p, q, beta, mag);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i + i * n].re.total_cmp(&a[j + j * n].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i + i * n].re).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| v[r + order[c] * n]);
    let residual = pair_residual(m, &eigenvalues, &vecs);
    Ok(SpectrumResult { eigenvalues, eigenvectors: Some(vecs), residual })
}

/// One rotation `A <- G* A G`, `V <- V G` zeroing `A[p,q]`, with
/// `G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]` on coordinates (p, q).
fn rotate(a: &mut [C], v: &mut [C], n: usize, p: usize, q: usize, beta: C, mag: f64) {
    let phase = (beta / mag).conj();
    let alpha = a[p + p * n].re;
    let gamma = a[q + q * n].re;
    let theta = (gamma - alpha) / (2.0 * mag);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase * s;
    let cp = phase * c;

    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let x = a[i + p * n];
        let y = a[i + q * n];
        let np = x * c - y * sp;
        let nq = x * s + y * cp;
        a[i + p * n] = np;
        a[i + q * n] = nq;
        a[p + i * n] = np.conj();
        a[q + i * n] = nq.conj();
    }
    a[p + p * n] = C::new(alpha - t * mag, 0.0);
    a[q + q * n] = C::new(gamma + t * mag, 0.0);
    a[p + q * n] = C::new(0.0, 0.0);
    a[q + p * n] = C::new(0.0, 0.0);

    for i in 0..n {
        let x = v[i + p * n];
        let y = v[i + q * n];
        v[i + p * n] = x * c - y * sp;
        v[i + q * n] = x * s + y * cp;
    }
}

fn pair_residual(m: &DMatrix<C>, vals: &[f64], vecs: &DMatrix<C>) -> f64 {
    let mv = m * vecs;
    let mut worst = 0.0f64;
    for (j, &lam) in vals.iter().enumerate() {
        for i in 0..m.nrows() {
            worst = worst.max((mv[(i, j)] - vecs[(i, j)] * lam).norm());
        }
    }
    worst
}

impl SpectrumResult {
    /// Eigenpairs with `|lambda - target| <= window`.
    pub fn eigenspace(&self, target: f64, window: f64) -> Eigenspace {
        let idx: Vec<usize> = (0..self.eigenvalues.len())
            .filter(|&i| (self.eigenvalues[i] - target).abs() <= window)
            .collect();
        let n = self.eigenvectors.as_ref().map_or(0, |v| v.nrows());
        let basis = match &self.eigenvectors {
            Some(v) => DMatrix::from_fn(n, idx.len(), |r, c| v[(r, idx[c])]),
            None => DMatrix::zeros(n, 0),
        };
        Eigenspace { eigenvalues: idx.iter().map(|&i| self.eigenvalues[i]).collect(), basis }
    }

    pub fn multiplicity(&self, target: f64, window: f64) -> usize {
        self.eigenvalues.iter().filter(|&&x| (x - target).abs() <= window).count()
    }
}

pub fn eigenspace_at(m: &DMatrix<C>, target: f64, window: f64) -> Result<Eigenspace> {
    Ok(eig_hermitian(m)?.eigenspace(target, window))
}

/// Groups sorted values into runs whose consecutive gaps are at most `window`.
pub fn clusters(sorted: &[f64], window: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > window {
            let run = &sorted[start..i];
            out.push((run.iter().sum::<f64>() / run.len() as f64, run.len()));
            start = i;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::theta2_matrix;
    use crate::hadamard::{fourier, paley, petrescu, PaleyKind};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn real(rows: &[&[f64]]) -> DMatrix<C> {
        DMatrix::from_fn(rows.len(), rows.len(), |i, j| C::new(rows[i][j], 0.0))
    }

    fn reconstruction_error(m: &DMatrix<C>, r: &SpectrumResult) -> f64 {
        let v = r.eigenvectors.as_ref().unwrap();
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            r.eigenvalues.len(),
            r.eigenvalues.iter().map(|&x| C::new(x, 0.0)),
        ));
        (m - v * lam * v.adjoint()).norm()
    }

    fn orthonormality(v: &DMatrix<C>) -> f64 {
        (v.adjoint() * v - DMatrix::<C>::identity(v.ncols(), v.ncols())).camax()
    }

    fn random_hermitian(n: usize, seed: u64) -> DMatrix<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&g + g.adjoint()) * C::new(0.5, 0.0)
    }

    #[test]
    fn two_by_two_and_identity() {
        let r = eig_hermitian(&real(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        assert!((r.eigenvalues[0] - 1.0).abs() < 1e-14 && (r.eigenvalues[1] - 3.0).abs() < 1e-14);
        let r = eig_hermitian(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(r.eigenvalues, vec![1.0; 3]);
    }

    #[test]
    fn f2_parity_spectrum() {
        let r = eig_hermitian(&theta2_matrix(&fourier(2).unwrap())).unwrap();
        let want = [0.0, 0.0, 1.0, 1.0];
        for (x, w) in r.eigenvalues.iter().zip(want) {
            assert!((x - w).abs() < 1e-12);
        }
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = real(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_hermitian(&m), Err(SpinError::NotHermitian(_))));
        let m = DMatrix::from_row_slice(2, 2, &[C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, 1.0), C::new(1.0, 0.0)]);
        assert!(eig_hermitian(&m).is_err());
    }

    #[test]
    fn matches_library_oracle_on_random_hermitian() {
        for (n, seed) in [(1, 1), (5, 2), (17, 3), (40, 4)] {
            let m = random_hermitian(n, seed);
            let ours = eig_hermitian(&m).unwrap();
            let mut oracle: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            oracle.sort_by(f64::total_cmp);
            for (a, b) in ours.eigenvalues.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10, "n={n}: {a} vs {b}");
            }
            assert!(orthonormality(ours.eigenvectors.as_ref().unwrap()) < 1e-10);
            assert!(reconstruction_error(&m, &ours) <= 1e-9 * m.norm());
        }
    }

    #[test]
    fn reconstruction_on_angle_matrices() {
        let hs = [
            fourier(5).unwrap(),
            petrescu(C::new(0.0, 1.0)).unwrap(),
            paley(PaleyKind::II, 5).unwrap(),
            fourier(20).unwrap(),
        ];
        for h in hs {
            let m = theta2_matrix(&h);
            let r = eig_hermitian(&m).unwrap();
            assert!(reconstruction_error(&m, &r) <= 1e-9 * m.norm(), "q = {}", h.q());
            assert!(orthonormality(r.eigenvectors.as_ref().unwrap()) < 1e-10);
            assert!(r.residual < 1e-10);
        }
    }

    #[test]
    fn deterministic_bits() {
        let m = random_hermitian(12, 9);
        let a = eig_hermitian(&m).unwrap();
        let b = eig_hermitian(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }

    #[test]
    fn eigenspace_multiplicities() {
        let m = theta2_matrix(&fourier(2).unwrap());
        assert_eq!(eigenspace_at(&m, 1.0, DEFAULT_WINDOW).unwrap().multiplicity(), 2);
        assert_eq!(eigenspace_at(&m, 5.0, DEFAULT_WINDOW).unwrap().multiplicity(), 0);
        let e = eigenspace_at(&m, 1.0, DEFAULT_WINDOW).unwrap();
        assert!(((&m * &e.basis) - &e.basis).camax() < 1e-12);
    }

    #[test]
    fn clusters_group_runs() {
        let c = clusters(&[0.0, 1e-9, 0.5, 1.0, 1.0 + 5e-8], 1e-7);
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].1, 2);
        assert_eq!(c[2].1, 2);
        assert!(clusters(&[], 1e-7).is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn ascending_and_reconstructs(n in 1usize..12, seed in 0u64..1000) {
            let m = random_hermitian(n, seed);
            let r = eig_hermitian(&m).unwrap();
            prop_assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(reconstruction_error(&m, &r) <= 1e-9 * m.norm().max(1e-300));
            prop_assert!(orthonormality(r.eigenvectors.as_ref().unwrap()) < 1e-10);
        }
    }
}
