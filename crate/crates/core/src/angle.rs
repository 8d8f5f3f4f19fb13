//! The angle operator theta at level n, densely or matrix-free.
//!
//! theta is stored with norm at most 1; Q*theta is obtained by scaling.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::box_vector::BoxVector;
use crate::engine::{theta_diagram, Evaluator};
use crate::error::{Result, SpinError};
use crate::hadamard::{variant, HadamardMatrix, VariantKind};
use crate::jsonfmt::F17;

type C = Complex64;

pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    U,
    #[serde(rename = "UBAR")]
    UBar,
    #[serde(rename = "UT")]
    UT,
    #[serde(rename = "USTAR")]
    UStar,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::U, Variant::UBar, Variant::UT, Variant::UStar];

    /// The matrix whose angle operator this variant denotes.
    pub fn transform(self, h: &HadamardMatrix) -> HadamardMatrix {
        match self {
            Variant::U => h.clone(),
            Variant::UBar => variant(h, VariantKind::Conj),
            Variant::UT => variant(h, VariantKind::Transpose),
            Variant::UStar => variant(h, VariantKind::Adjoint),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::U => "U",
            Variant::UBar => "UBAR",
            Variant::UT => "UT",
            Variant::UStar => "USTAR",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SpinError::Parse(format!("unknown variant {s:?} (U, UBAR, UT, USTAR)")))
    }
}

#[derive(Clone, Debug)]
pub enum Realization {
    Dense(DMatrix<C>),
    /// Evaluates the angle diagram against the stored (already transformed) matrix.
    MatrixFree(HadamardMatrix),
}

#[derive(Clone, Debug)]
pub struct AngleOperator {
    pub q: usize,
    pub level: usize,
    pub variant: Variant,
    pub realization: Realization,
}

impl AngleOperator {
    pub fn dim(&self) -> usize {
        self.q.pow(self.level as u32)
    }

    pub fn dense(&self) -> Option<&DMatrix<C>> {
        match &self.realization {
            Realization::Dense(m) => Some(m),
            Realization::MatrixFree(_) => None,
        }
    }

    /// Q*theta as a dense matrix.
    pub fn q_scaled(&self) -> Option<DMatrix<C>> {
        self.dense().map(|m| m.scale(self.q as f64))
    }

    pub fn apply(&self, v: &BoxVector) -> Result<BoxVector> {
        check_box(self.q, self.level, v)?;
        match &self.realization {
            Realization::Dense(m) => {
                let x = nalgebra::DVector::from_column_slice(&v.coeffs);
                BoxVector::new(self.q, self.level, (m * x).as_slice().to_vec())
            }
            Realization::MatrixFree(h) => {
                let d = theta_diagram(self.q, self.level)?;
                Evaluator::new(&d, h)?.apply(v)
            }
        }
    }

    /// `{"kind":"angle","q","level","variant","entries":[[[re,im],...],...]}`
    pub fn to_json(&self) -> Option<String> {
        #[derive(Serialize)]
        struct Repr {
            kind: &'static str,
            q: usize,
            level: usize,
            variant: Variant,
            entries: Vec<Vec<[F17; 2]>>,
        }
        let m = self.dense()?;
        let r = Repr {
            kind: "angle",
            q: self.q,
            level: self.level,
            variant: self.variant,
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [F17(m[(i, j)].re), F17(m[(i, j)].im)]).collect())
                .collect(),
        };
        Some(serde_json::to_string(&r).expect("operator serialization"))
    }
}

fn check_box(q: usize, level: usize, v: &BoxVector) -> Result<()> {
    if v.q != q {
        return Err(SpinError::QMismatch { expected: q, got: v.q });
    }
    if v.level != level || v.shaded {
        return Err(SpinError::LevelMismatch { expected: level, got: v.level });
    }
    Ok(())
}

/// Closed form at level 2:
/// `theta[(a1,a2),(b1,b2)] = |sum_m H[m,b1] conj(H[m,b2]) conj(H[m,a1]) H[m,a2]|^2 / Q^3`.
pub fn theta2_matrix(h: &HadamardMatrix) -> DMatrix<C> {
    let q = h.q();
    let m = h.entries();
    // p[(m, a1 + q*a2)] = conj(H[m,a1]) H[m,a2], so S(a,b) = (p* p)[(b,a)]
    let p = DMatrix::from_fn(q, q * q, |r, a| m[(r, a % q)].conj() * m[(r, a / q)]);
    let s = p.adjoint() * &p;
    let q3 = (q as f64).powi(3);
    DMatrix::from_fn(q * q, q * q, |a, b| C::new(s[(b, a)].norm_sqr() / q3, 0.0))
}

pub fn theta2_dense(h: &HadamardMatrix) -> AngleOperator {
    AngleOperator { q: h.q(), level: 2, variant: Variant::U, realization: Realization::Dense(theta2_matrix(h)) }
}

/// Dense theta from the angle diagram, one basis box per column.
pub fn theta_dense(h: &HadamardMatrix, n: usize, var: Variant) -> Result<AngleOperator> {
    theta_dense_capped(h, n, var, DEFAULT_DENSE_CAP)
}

pub fn theta_dense_capped(h: &HadamardMatrix, n: usize, var: Variant, cap: usize) -> Result<AngleOperator> {
    let q = h.q();
    let dim = dense_dim(q, n, cap)?;
    let hv = var.transform(h);
    let d = theta_diagram(q, n)?;
    let m = Evaluator::new(&d, &hv)?.dense()?;
    debug_assert_eq!(m.nrows(), dim);
    Ok(AngleOperator { q, level: n, variant: var, realization: Realization::Dense(m) })
}

fn dense_dim(q: usize, n: usize, cap: usize) -> Result<usize> {
    if n < 1 {
        return Err(SpinError::InvalidArgument("level must be at least 1".into()));
    }
    match q.checked_pow(n as u32) {
        Some(d) if d <= cap => Ok(d),
        Some(d) => Err(SpinError::DenseCapExceeded { dim: d, cap }),
        None => Err(SpinError::DenseCapExceeded { dim: usize::MAX, cap }),
    }
}

/// Dense theta, taking the closed form at level 2.
pub fn theta_build(h: &HadamardMatrix, n: usize, var: Variant, cap: usize) -> Result<AngleOperator> {
    if n == 2 {
        dense_dim(h.q(), n, cap)?;
        let mut op = theta2_dense(&var.transform(h));
        op.variant = var;
        return Ok(op);
    }
    theta_dense_capped(h, n, var, cap)
}

pub fn theta_matrix_free(h: &HadamardMatrix, n: usize, var: Variant) -> Result<AngleOperator> {
    if n < 1 {
        return Err(SpinError::InvalidArgument("level must be at least 1".into()));
    }
    Ok(AngleOperator { q: h.q(), level: n, variant: var, realization: Realization::MatrixFree(var.transform(h)) })
}

/// theta applied to one box without forming the matrix.
pub fn theta_apply(h: &HadamardMatrix, n: usize, var: Variant, v: &BoxVector) -> Result<BoxVector> {
    theta_matrix_free(h, n, var)?.apply(v)
}
