//! Variant-spectrum agreement and commutativity of the level-2 flat space.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::angle::{theta_build, Variant, DEFAULT_DENSE_CAP};
use crate::error::Result;
use crate::hadamard::HadamardMatrix;
use crate::jsonfmt::F17;
use crate::spectral::eig_hermitian;

type C = Complex64;

/// Eigenvalues below this are treated as zero when comparing variants.
pub const ZERO_CUTOFF: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantSpectrum {
    pub variant: Variant,
    /// Ascending nonzero eigenvalues of theta.
    pub nonzero: Vec<F17>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariantReport {
    pub level: usize,
    pub pass: bool,
    /// Largest elementwise gap between any two variants' nonzero spectra;
    /// infinite when the counts differ.
    pub max_distance: F17,
    pub spectra: Vec<VariantSpectrum>,
}

impl VariantReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

/// Compares sorted nonzero theta spectra of U, UBAR, UT, USTAR pairwise.
pub fn variant_spectra_check(h: &HadamardMatrix, n: usize, tol: f64) -> Result<VariantReport> {
    let spectra: Vec<Vec<f64>> = Variant::ALL
        .par_iter()
        .map(|&v| {
            let op = theta_build(h, n, v, DEFAULT_DENSE_CAP)?;
            let vals = eig_hermitian(op.dense().expect("dense"))?.eigenvalues;
            Ok(vals.into_iter().filter(|x| x.abs() > ZERO_CUTOFF).collect())
        })
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..spectra.len() {
        for j in i + 1..spectra.len() {
            let (a, b) = (&spectra[i], &spectra[j]);
            if a.len() != b.len() {
                worst = f64::INFINITY;
                continue;
            }
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(VariantReport {
        level: n,
        pass: worst <= tol,
        max_distance: F17(worst),
        spectra: Variant::ALL
            .iter()
            .zip(spectra)
            .map(|(&variant, s)| VariantSpectrum { variant, nonzero: s.into_iter().map(F17).collect() })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AbelianReport {
    pub q: usize,
    /// Dimension of the 1-eigenspace of theta at level 2.
    pub dimension: usize,
    pub max_commutator: F17,
    pub pass: bool,
}

impl AbelianReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

/// Reshapes each basis vector of the level-2 1-eigenspace to the Q x Q
/// matrix `M[a1][a2] = v[a1 + Q*a2]` and reports the largest pairwise
/// commutator Frobenius norm.
pub fn abelianness_check(h: &HadamardMatrix, window: f64, tol: f64) -> Result<AbelianReport> {
    let q = h.q();
    let op = theta_build(h, 2, Variant::U, DEFAULT_DENSE_CAP)?;
    let space = eig_hermitian(op.dense().expect("dense"))?.eigenspace(1.0, window);
    let mats: Vec<DMatrix<C>> =
        space.basis.column_iter().map(|col| DMatrix::from_fn(q, q, |a1, a2| col[a1 + q * a2])).collect();
    let mut worst = 0.0f64;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            worst = worst.max((&mats[i] * &mats[j] - &mats[j] * &mats[i]).norm());
        }
    }
    Ok(AbelianReport { q, dimension: mats.len(), max_commutator: F17(worst), pass: worst <= tol })
}
