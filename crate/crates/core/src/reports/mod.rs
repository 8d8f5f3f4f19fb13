//! Subfactor-level readouts of angle spectra: relative-commutant dimensions,
//! infinite-depth evidence, principal-graph comparison, family sweeps.

mod checks;
mod graph;
mod sweep;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use crate::angle::{theta_build, Variant, DEFAULT_DENSE_CAP};
use crate::error::{Result, SpinError};
use crate::exact::{is_algebraic_integer, lattice_supported, rational_reconstruct, round_vector_dyadic, CyclotomicInt, Rational};
use crate::hadamard::HadamardMatrix;
use crate::jsonfmt::F17;
use crate::spectral::{clusters, eig_hermitian, exact_kernel, exact_theta2_scaled, ExactTheta2, SpectrumResult, DEFAULT_WINDOW};

pub use checks::{abelianness_check, variant_spectra_check, AbelianReport, VariantReport};
pub use graph::{amenability_compare, graph_gram_spectrum, graph_spectrum_report, AmenabilityReport, GraphSpectrum, PrincipalGraph};
pub use sweep::{sweep_petrescu, SweepOpts, SweepReport, SweepRow};

type C = Complex64;

pub const DIMENSION_NOTE: &str =
    "d_n is the multiplicity of eigenvalue 1 of theta at level n (variant U); variants agree on this count";

/// Spectrum of Q*theta at level n for variant U, eigenvectors included.
pub(crate) fn q_theta_spectrum(h: &HadamardMatrix, n: usize, var: Variant, cap: usize) -> Result<SpectrumResult> {
    let op = theta_build(h, n, var, cap)?;
    let m = op.q_scaled().expect("theta_build is dense");
    eig_hermitian(&m)
}

/// `{"eigenvalues":[...asc],"level":n,"variant":...}` for theta itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaSpectrum {
    pub eigenvalues: Vec<F17>,
    pub level: usize,
    pub variant: Variant,
}

impl ThetaSpectrum {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serialization")
    }
}

/// Ascending eigenvalues of theta at level n.
pub fn theta_spectrum(h: &HadamardMatrix, n: usize, var: Variant, cap: usize) -> Result<ThetaSpectrum> {
    let op = theta_build(h, n, var, cap)?;
    let vals = eig_hermitian(op.dense().expect("theta_build is dense"))?.eigenvalues;
    Ok(ThetaSpectrum { eigenvalues: vals.into_iter().map(F17).collect(), level: n, variant: var })
}

fn catalan(n: usize) -> u64 {
    (0..n as u64).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Truncation {
    pub level: usize,
    pub dim: usize,
    pub cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelCommDims {
    pub q: usize,
    pub variant: Variant,
    /// `dims[n-1] = d_n`.
    pub dims: Vec<usize>,
    /// Catalan numbers `C_n`, the Temperley-Lieb dimensions, for context.
    pub catalan: Vec<u64>,
    /// Set when a level past the dense cap stopped the computation.
    pub truncated: Option<Truncation>,
    pub note: &'static str,
}

impl RelCommDims {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("dims serialization")
    }
}

/// d_1..d_max from multiplicities of eigenvalue 1 of theta.
pub fn relcomm_dims(h: &HadamardMatrix, max_level: usize, window: f64, cap: usize) -> Result<RelCommDims> {
    if max_level < 1 {
        return Err(SpinError::InvalidArgument("max level must be at least 1".into()));
    }
    let q = h.q();
    let mut dims = Vec::new();
    let mut truncated = None;
    for n in 1..=max_level {
        match theta_build(h, n, Variant::U, cap) {
            Ok(op) => {
                let spec = eig_hermitian(op.dense().expect("dense"))?;
                dims.push(spec.multiplicity(1.0, window));
            }
            Err(SpinError::DenseCapExceeded { dim, cap }) => {
                truncated = Some(Truncation { level: n, dim, cap });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let catalan = (1..=dims.len()).map(catalan).collect();
    Ok(RelCommDims { q, variant: Variant::U, dims, catalan, truncated, note: DIMENSION_NOTE })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DepthOpts {
    pub tol: f64,
    pub max_den: u64,
    pub window: f64,
    pub cap: usize,
}

impl Default for DepthOpts {
    fn default() -> Self {
        DepthOpts { tol: 1e-9, max_den: 1_000_000, window: DEFAULT_WINDOW, cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Certification {
    None,
    Numeric,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DepthStatus {
    #[serde(rename = "NO_EVIDENCE")]
    NoEvidence,
    #[serde(rename = "INFINITE_DEPTH_EVIDENCE")]
    Evidence,
    #[serde(rename = "INFINITE_DEPTH_CERTIFIED")]
    Certified,
}

impl DepthStatus {
    pub fn name(self) -> &'static str {
        match self {
            DepthStatus::NoEvidence => "NO_EVIDENCE",
            DepthStatus::Evidence => "INFINITE_DEPTH_EVIDENCE",
            DepthStatus::Certified => "INFINITE_DEPTH_CERTIFIED",
        }
    }
}

/// How an exact certificate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactMethod {
    /// Numeric eigenvector rounded into (1/2^k) Z[zeta_N].
    DyadicRounding,
    /// Integer kernel of `den*A - num*Q^2*I`.
    IntegerKernel,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub value: F17,
    pub multiplicity: usize,
    pub rational: Option<Rational>,
    pub algebraic_integer: Option<bool>,
    pub residual: Option<F17>,
    pub certification: Certification,
    pub method: Option<ExactMethod>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthReport {
    pub status: DepthStatus,
    pub q: usize,
    pub level: usize,
    pub variant: Variant,
    pub mult_one: usize,
    pub candidates: Vec<Candidate>,
    /// Ascending eigenvalues of Q*theta.
    pub eigenvalues: Vec<F17>,
}

impl DepthReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }

    fn derive_status(candidates: &[Candidate]) -> DepthStatus {
        let foreign = |c: &&Candidate| c.algebraic_integer == Some(false);
        let best = candidates.iter().filter(foreign).map(|c| c.certification).max();
        match best {
            Some(Certification::Exact) => DepthStatus::Certified,
            Some(Certification::Numeric) => DepthStatus::Evidence,
            _ => DepthStatus::NoEvidence,
        }
    }

    /// The candidate whose reconstruction is `r`.
    pub fn candidate(&self, r: &str) -> Option<&Candidate> {
        self.candidates.iter().find(|c| c.rational.as_ref().is_some_and(|x| x.to_string() == r))
    }
}

/// Spectrum of Q*theta at `level`, each eigenvalue cluster run through
/// rational reconstruction; non-integer rationals at level 2 are then
/// checked exactly when the matrix has exact entries.
pub fn depth_evidence(h: &HadamardMatrix, level: usize, opts: DepthOpts) -> Result<DepthReport> {
    let q = h.q();
    let spec = q_theta_spectrum(h, level, Variant::U, opts.cap)?;
    let qf = q as f64;
    let mult_one = spec.multiplicity(qf, opts.window * qf);
    let vecs = spec.eigenvectors.as_ref().expect("dense spectrum has vectors");

    let mut exact: Option<Option<ExactTheta2>> = None;
    let mut candidates = Vec::new();
    let mut start = 0;
    for (value, mult) in clusters(&spec.eigenvalues, opts.window) {
        let cols = start..start + mult;
        start += mult;
        let Some(r) = rational_reconstruct(value, opts.max_den, opts.tol) else {
            candidates.push(Candidate {
                value: F17(value),
                multiplicity: mult,
                rational: None,
                algebraic_integer: None,
                residual: None,
                certification: Certification::None,
                method: None,
            });
            continue;
        };
        let alg = is_algebraic_integer(&r);
        let mut cert = Certification::Numeric;
        let mut method = None;
        if !alg && level == 2 && h.exact().is_some() {
            let ex = exact.get_or_insert_with(|| exact_theta2_scaled(h).ok());
            if let Some(ex) = ex {
                let basis = vecs.columns(cols.start, mult).into_owned();
                method = certify(ex, &basis, &r, opts.window)?;
                if method.is_some() {
                    cert = Certification::Exact;
                }
            }
        }
        candidates.push(Candidate {
            value: F17(value),
            multiplicity: mult,
            residual: Some(F17((value - r.to_f64()).abs())),
            rational: Some(r),
            algebraic_integer: Some(alg),
            certification: cert,
            method,
        });
    }
    Ok(DepthReport {
        status: DepthReport::derive_status(&candidates),
        q,
        level,
        variant: Variant::U,
        mult_one,
        candidates,
        eigenvalues: spec.eigenvalues.iter().map(|&x| F17(x)).collect(),
    })
}

/// Tries dyadic rounding of a simple eigenvector, then the integer kernel.
fn certify(ex: &ExactTheta2, basis: &DMatrix<C>, lambda: &Rational, window: f64) -> Result<Option<ExactMethod>> {
    let n = ex.conductor;
    if basis.ncols() == 1 && lattice_supported(n) {
        let v: Vec<C> = basis.column(0).iter().copied().collect();
        let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if let Some(pivot) = v.iter().find(|z| z.norm() > window.max(1e-6) * big) {
            let scaled: Vec<C> = v.iter().map(|z| z / pivot).collect();
            if let Some((_, w)) = round_vector_dyadic(&scaled, n, 4, 1e-7) {
                if ex.verify(&w, lambda)? {
                    return Ok(Some(ExactMethod::DyadicRounding));
                }
            }
        }
    }
    if let Some(a) = ex.as_integers() {
        let m = crate::spectral::shifted_integer_matrix(&a, ex.q, lambda);
        let d = ex.dim();
        if let Some(k) = exact_kernel(&m, d, d, 1)?.into_iter().next() {
            let v: Vec<CyclotomicInt> = k.into_iter().map(|x: BigInt| CyclotomicInt::from_int(n, x)).collect();
            if ex.verify(&v, lambda)? {
                return Ok(Some(ExactMethod::IntegerKernel));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{fourier, paley, petrescu, PaleyKind};

    #[test]
    fn catalan_numbers() {
        assert_eq!((1..=5).map(catalan).collect::<Vec<_>>(), vec![1, 2, 5, 14, 42]);
    }

    #[test]
    fn theta_spectrum_f2() {
        let s = theta_spectrum(&fourier(2).unwrap(), 2, Variant::U, DEFAULT_DENSE_CAP).unwrap();
        let want = [0.0, 0.0, 1.0, 1.0];
        assert!(s.eigenvalues.iter().zip(want).all(|(a, b)| (a.0 - b).abs() < 1e-12));
        assert!(s.to_json().ends_with(r#"],"level":2,"variant":"U"}"#));
    }

    #[test]
    fn fourier_dims() {
        let r = relcomm_dims(&fourier(2).unwrap(), 2, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(r.dims, vec![1, 2]);
        for q in [3, 5] {
            let r = relcomm_dims(&fourier(q).unwrap(), 2, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).unwrap();
            assert_eq!(r.dims, vec![1, q]);
        }
    }

    #[test]
    fn truncation_marker() {
        let r = relcomm_dims(&fourier(3).unwrap(), 5, DEFAULT_WINDOW, 30).unwrap();
        assert_eq!(r.dims, vec![1, 3, 9]);
        assert_eq!(r.truncated, Some(Truncation { level: 4, dim: 81, cap: 30 }));
        assert!(r.to_json().contains(r#""truncated":{"level":4,"dim":81,"cap":30}"#));
    }

    #[test]
    fn paley_one_has_temperley_lieb_two_boxes() {
        let r = relcomm_dims(&paley(PaleyKind::I, 11).unwrap(), 2, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).unwrap();
        assert_eq!(r.dims, vec![1, 2]);
    }

    #[test]
    fn petrescu_certified() {
        let r = depth_evidence(&petrescu(C::new(1.0, 0.0)).unwrap(), 2, DepthOpts::default()).unwrap();
        assert_eq!(r.status, DepthStatus::Certified);
        let c = r.candidate("1/49").expect("1/49 candidate");
        assert_eq!(c.certification, Certification::Exact);
        assert_eq!(c.algebraic_integer, Some(false));
        assert!(r.to_json().starts_with(r#"{"status":"INFINITE_DEPTH_CERTIFIED","q":7,"level":2"#));
    }

    #[test]
    fn paley_two_certified() {
        let r = depth_evidence(&paley(PaleyKind::II, 5).unwrap(), 2, DepthOpts::default()).unwrap();
        assert_eq!(r.status, DepthStatus::Certified);
        let c = r.candidate("20/9").expect("20/9 candidate");
        assert_eq!(c.certification, Certification::Exact);
        assert_eq!(c.multiplicity, 54);
        assert_eq!(r.mult_one, 2);
    }

    #[test]
    fn fourier_has_no_evidence() {
        let r = depth_evidence(&fourier(3).unwrap(), 2, DepthOpts::default()).unwrap();
        assert_eq!(r.status, DepthStatus::NoEvidence);
        let vals: Vec<String> = r.candidates.iter().map(|c| c.rational.as_ref().unwrap().to_string()).collect();
        assert_eq!(vals, vec!["0/1", "3/1"]);
    }

    #[test]
    fn exact_certificate_never_downgrades() {
        // dropping exact entries can only lose certification
        let h = paley(PaleyKind::II, 5).unwrap();
        let with = depth_evidence(&h, 2, DepthOpts::default()).unwrap();
        let without = depth_evidence(&h.clone().without_exact(), 2, DepthOpts::default()).unwrap();
        assert_eq!(without.status, DepthStatus::Evidence);
        assert!(with.status >= without.status);
    }
}
