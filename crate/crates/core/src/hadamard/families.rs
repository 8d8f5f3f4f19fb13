use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::{ff_make, jacobsthal, prime_power};
use super::{root, validate, CMatrix, ExactEntries, HadamardMatrix};
use crate::box_vector::BoxVector;
use crate::error::{Result, SpinError};
use crate::exact::{round_vector_dyadic, CyclotomicInt, Rational};

/// Petrescu exponent table in powers of omega = exp(i pi/3), with the
/// t-dependent entries marked: `(omega power, t power)`.
const PETRESCU: [[(u32, i32); 7]; 7] = [
    [(1, 1), (4, 1), (5, 0), (3, 0), (3, 0), (1, 0), (0, 0)],
    [(4, 1), (1, 1), (3, 0), (5, 0), (3, 0), (1, 0), (0, 0)],
    [(5, 0), (3, 0), (1, -1), (4, -1), (1, 0), (3, 0), (0, 0)],
    [(3, 0), (5, 0), (4, -1), (1, -1), (1, 0), (3, 0), (0, 0)],
    [(3, 0), (3, 0), (1, 0), (1, 0), (4, 0), (5, 0), (0, 0)],
    [(1, 0), (1, 0), (3, 0), (3, 0), (5, 0), (4, 0), (0, 0)],
    [(0, 0); 7],
];

/// The one-parameter 7x7 family. Exact entries are attached when t is a
/// power of zeta_12.
pub fn petrescu(t: Complex64) -> Result<HadamardMatrix> {
    if (t.norm() - 1.0).abs() > 1e-12 {
        return Err(SpinError::InvalidArgument(format!("petrescu needs |t| = 1, got |t| = {}", t.norm())));
    }
    let omega = |k: u32| root(6, k as i64);
    let entries = CMatrix::from_fn(7, 7, |i, j| {
        let (w, tp) = PETRESCU[i][j];
        let tf = match tp {
            1 => t,
            -1 => t.conj(),
            _ => Complex64::new(1.0, 0.0),
        };
        omega(w) * tf
    });
    let k12 = (t.arg() * 6.0 / PI).round() as i64;
    let exact = ((t - root(12, k12)).norm() <= 1e-12).then(|| {
        let exps: Vec<u32> = PETRESCU
            .iter()
            .flatten()
            .map(|&(w, tp)| (2 * w as i64 + tp as i64 * k12).rem_euclid(12) as u32)
            .collect();
        ExactEntries::from_exponents(12, 7, &exps)
    });
    Ok(HadamardMatrix { entries, exact })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PaleyKind {
    I,
    II,
}

/// Real Paley Hadamard matrix from GF(q).
///
/// Type I (q = 3 mod 4), order q+1: `I + S` with `S[0][i] = 1`,
/// `S[i][0] = -1`, `S[i][j] = chi(i - j)`.
/// Type II (q = 1 mod 4), order 2(q+1):
/// `[[0, j], [j^T, K]] (x) [[1,1],[1,-1]] + I (x) [[1,-1],[-1,-1]]`.
pub fn paley(kind: PaleyKind, q: u64) -> Result<HadamardMatrix> {
    let (p, m) = prime_power(q).ok_or(SpinError::NotPrimePower(q))?;
    if q.is_multiple_of(2) {
        return Err(SpinError::EvenOrder { what: "paley construction", q });
    }
    let (name, residue) = match kind {
        PaleyKind::I => ("I", 3),
        PaleyKind::II => ("II", 1),
    };
    if q % 4 != residue {
        return Err(SpinError::WrongResidue { kind: name, residue, q });
    }
    let k = jacobsthal(&ff_make(p, m)?)?;
    let q = q as usize;
    let signs: Vec<i8> = match kind {
        PaleyKind::I => {
            let n = q + 1;
            let s = |i: usize, j: usize| -> i8 {
                match (i, j) {
                    (0, 0) => 0,
                    (0, _) => 1,
                    (_, 0) => -1,
                    _ => k[i - 1][j - 1],
                }
            };
            (0..n).flat_map(|i| (0..n).map(move |j| (i == j) as i8 + s(i, j))).collect()
        }
        PaleyKind::II => {
            let n = q + 1;
            let c = |i: usize, j: usize| -> i8 {
                match (i, j) {
                    (0, 0) => 0,
                    (0, _) | (_, 0) => 1,
                    _ => k[i - 1][j - 1],
                }
            };
            let hp = [[1i8, 1], [1, -1]];
            let hm = [[1i8, -1], [-1, -1]];
            let mut out = Vec::with_capacity(4 * n * n);
            for i in 0..n {
                for s in 0..2 {
                    for j in 0..n {
                        for t in 0..2 {
                            out.push(c(i, j) * hp[s][t] + (i == j) as i8 * hm[s][t]);
                        }
                    }
                }
            }
            out
        }
    };
    let order = (signs.len() as f64).sqrt().round() as usize;
    let h = HadamardMatrix::from_signs(order, &signs)
        .map_err(|e| SpinError::ValidationFailed(format!("paley {name} q = {q}: {e}")))?;
    let r = validate(&h, 1e-8);
    if !r.pass {
        return Err(SpinError::ValidationFailed(format!(
            "paley {name} q = {q}: residual {:e}",
            r.frobenius_residual.0
        )));
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlatFamily {
    Petrescu(Complex64),
    Paley2(u64),
}

/// A level-2 box with its expected eigenvalue under Q*theta.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatVector {
    pub vector: BoxVector,
    pub eigenvalue: Rational,
}

/// Known eigenvectors of Q*theta at level 2: the Petrescu array (eigenvalue
/// 1/49) and `[[0,0],[0,K]] (x) diag(1,-1)` for Paley type II (eigenvalue
/// 16q/(q+1)^2).
pub fn known_flat_vector(family: FlatFamily) -> Result<FlatVector> {
    match family {
        FlatFamily::Petrescu(t) => {
            if (t.norm() - 1.0).abs() > 1e-12 {
                return Err(SpinError::InvalidArgument("petrescu needs |t| = 1".into()));
            }
            let a = petrescu_array(t);
            let coeffs = (0..49).map(|f| Complex64::new(a[f % 7][f / 7], 0.0)).collect();
            Ok(FlatVector { vector: BoxVector::new(7, 2, coeffs)?, eigenvalue: Rational::new(1, 49)? })
        }
        FlatFamily::Paley2(q) => {
            let (p, m) = prime_power(q).ok_or(SpinError::NotPrimePower(q))?;
            if q % 4 != 1 {
                return Err(SpinError::WrongResidue { kind: "II", residue: 1, q });
            }
            let k = jacobsthal(&ff_make(p, m)?)?;
            let n = q as usize + 1;
            let big = 2 * n;
            let s = |i: usize, j: usize| if i == 0 || j == 0 { 0 } else { k[i - 1][j - 1] };
            let d = [1i8, -1];
            let mut coeffs = vec![Complex64::new(0.0, 0.0); big * big];
            for a1 in 0..big {
                for a2 in 0..big {
                    let v = if a1 % 2 == a2 % 2 { s(a1 / 2, a2 / 2) * d[a1 % 2] } else { 0 };
                    coeffs[a1 + big * a2] = Complex64::new(v as f64, 0.0);
                }
            }
            let ev = Rational::new(16 * q, (q + 1) * (q + 1))?;
            Ok(FlatVector { vector: BoxVector::new(big, 2, coeffs)?, eigenvalue: ev })
        }
    }
}

/// Exact form of [`known_flat_vector`] in Z[zeta_N]: the vector scaled by the
/// smallest 2^k (k <= 4) that makes every entry a ring element.
pub fn known_flat_vector_exact(family: FlatFamily, conductor: u32) -> Result<(Vec<CyclotomicInt>, Rational)> {
    let fv = known_flat_vector(family)?;
    let (_, v) = round_vector_dyadic(&fv.vector.coeffs, conductor, 4, 1e-9).ok_or_else(|| {
        SpinError::NoExactForm(format!("flat vector has no dyadic form over conductor {conductor}"))
    })?;
    Ok((v, fv.eigenvalue))
}

/// The 7x7 eigenvector array, row index = slot 1.
fn petrescu_array(t: Complex64) -> [[f64; 7]; 7] {
    let w = root(6, 1);
    let s3 = 3f64.sqrt();
    let im = |z: Complex64| z.im / s3;
    let (a, b, c) = (im(t * w.conj()), im(t), im(t * w));
    let (d, e) = (-im(t * w), -im(t * w.conj()));
    let r0 = 2.0 * t.re;
    let r1 = -2.0 * (t * w.conj()).re;
    let r2 = -2.0 * (t * w).re;
    [
        [0.0, 0.0, 1.0, -1.0, a, -b, c],
        [0.0, 0.0, -1.0, 1.0, a, -b, c],
        [1.0, -1.0, 0.0, 0.0, b, d, e],
        [-1.0, 1.0, 0.0, 0.0, b, d, e],
        [a, a, b, b, 0.0, r0, r1],
        [-b, -b, d, d, r0, 0.0, r2],
        [c, c, e, e, r1, r2, 0.0],
    ]
}
