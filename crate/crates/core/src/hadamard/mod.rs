//! Complex Hadamard matrices: generators, validation, transforms, file formats.

mod families;
mod field;

pub use families::{
    known_flat_vector, known_flat_vector_exact, paley, petrescu, FlatFamily, FlatVector, PaleyKind,
};
pub use field::{ff_make, is_prime, jacobsthal, prime_power, quad_char, Elem, FiniteField};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Result, SpinError};
use crate::exact::{bigint_from_json, cyc_mul, unit_root, CyclotomicInt};
use crate::jsonfmt::F17;

pub type CMatrix = DMatrix<Complex64>;

/// Exact entries of a Hadamard matrix in Z[zeta_N], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactEntries {
    pub conductor: u32,
    pub q: usize,
    pub entries: Vec<CyclotomicInt>,
}

impl ExactEntries {
    pub fn get(&self, i: usize, j: usize) -> &CyclotomicInt {
        &self.entries[i * self.q + j]
    }

    /// Entries of the form zeta_N^k, as the exponent table k.
    pub fn root_exponents(&self) -> Option<Vec<u32>> {
        self.entries.iter().map(|e| e.root_exponent()).collect()
    }

    /// Build from a table of zeta_n exponents, shrinking the conductor to the
    /// smallest divisor of n that still holds every entry.
    pub fn from_exponents(n: u32, q: usize, exps: &[u32]) -> Self {
        let n = n.max(1);
        let g = exps.iter().fold(n, |g, &e| g.gcd(&(e % n)));
        let conductor = n / g;
        let entries = exps
            .iter()
            .map(|&e| CyclotomicInt::zeta_pow(conductor, ((e % n) / g) as i64))
            .collect();
        ExactEntries { conductor, q, entries }
    }

    pub fn embed(&self) -> CMatrix {
        CMatrix::from_fn(self.q, self.q, |i, j| self.get(i, j).embed())
    }

    fn lift(&self, to: u32) -> Result<Self> {
        Ok(ExactEntries {
            conductor: to,
            q: self.q,
            entries: self.entries.iter().map(|e| e.lift(to)).collect::<Result<_>>()?,
        })
    }

    /// Entries as integers, when every entry is +1 or -1.
    pub fn as_signs(&self) -> Option<Vec<i8>> {
        self.entries
            .iter()
            .map(|e| match e.as_integer().and_then(|c| c.to_i64()) {
                Some(1) => Some(1),
                Some(-1) => Some(-1),
                _ => None,
            })
            .collect()
    }
}

/// Square matrix, optionally with exact entries. Use [`validate`] to check the
/// Hadamard property; constructors named `*_unchecked` skip it.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardMatrix {
    entries: CMatrix,
    exact: Option<ExactEntries>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub q: usize,
    pub max_modulus_deviation: F17,
    pub frobenius_residual: F17,
    pub tol: F17,
    pub pass: bool,
}

/// Checks unimodular entries and H H* = Q I.
///
/// Passes when every |h_ij| is within `tol` of 1 and the Frobenius norm of
/// `H H* - Q I` is at most `tol * Q`.
pub fn validate_entries(m: &CMatrix, tol: f64) -> Result<ValidationReport> {
    if m.nrows() != m.ncols() {
        return Err(SpinError::InvalidArgument(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let q = m.nrows();
    let dev = m.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let gram = m * m.adjoint() - CMatrix::identity(q, q).scale(q as f64);
    let res = gram.norm();
    let pass = dev <= tol && res <= tol * q as f64;
    Ok(ValidationReport {
        q,
        max_modulus_deviation: F17(dev),
        frobenius_residual: F17(res),
        tol: F17(tol),
        pass,
    })
}

pub fn validate(h: &HadamardMatrix, tol: f64) -> ValidationReport {
    validate_entries(&h.entries, tol).expect("HadamardMatrix is square")
}

impl HadamardMatrix {
    /// Square matrix, validated at `tol`.
    pub fn new(entries: CMatrix, tol: f64) -> Result<Self> {
        let h = Self::new_unchecked(entries)?;
        let r = validate(&h, tol);
        if !r.pass {
            return Err(SpinError::ValidationFailed(format!(
                "max modulus deviation {:e}, residual {:e}",
                r.max_modulus_deviation.0, r.frobenius_residual.0
            )));
        }
        Ok(h)
    }

    pub fn new_unchecked(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(SpinError::InvalidArgument("matrix must be square and nonempty".into()));
        }
        Ok(HadamardMatrix { entries, exact: None })
    }

    /// Matrix whose float entries are the embedding of `exact`.
    pub fn from_exact(exact: ExactEntries) -> Result<Self> {
        for e in &exact.entries {
            if !cyc_mul(e, &e.conj())?.is_one() {
                return Err(SpinError::ValidationFailed(format!("exact entry {e} is not unimodular")));
            }
        }
        let h = HadamardMatrix { entries: exact.embed(), exact: Some(exact) };
        let r = validate(&h, 1e-8);
        if !r.pass {
            return Err(SpinError::ValidationFailed(format!(
                "residual {:e}",
                r.frobenius_residual.0
            )));
        }
        Ok(h)
    }

    pub fn from_signs(q: usize, signs: &[i8]) -> Result<Self> {
        if signs.len() != q * q || signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(SpinError::InvalidArgument("expected a square table of +1/-1".into()));
        }
        let exps: Vec<u32> = signs.iter().map(|&s| (s < 0) as u32).collect();
        Self::from_exact(ExactEntries::from_exponents(2, q, &exps))
    }

    pub fn q(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn exact(&self) -> Option<&ExactEntries> {
        self.exact.as_ref()
    }

    /// Attach exact entries recognized from the floats, if every entry lies
    /// within `tol` of a root of unity of order at most 12.
    pub fn with_inferred_exact(mut self, tol: f64) -> Self {
        if self.exact.is_none() {
            self.exact = infer_exact(&self.entries, tol);
        }
        self
    }

    pub fn without_exact(mut self) -> Self {
        self.exact = None;
        self
    }

    /// Copy with one entry overwritten (exact data dropped).
    pub fn with_entry_unchecked(&self, i: usize, j: usize, v: Complex64) -> Self {
        let mut e = self.entries.clone();
        e[(i, j)] = v;
        HadamardMatrix { entries: e, exact: None }
    }
}

/// Smallest N <= 12 with every entry within `tol` of some zeta_N^k.
pub fn infer_exact(m: &CMatrix, tol: f64) -> Option<ExactEntries> {
    let q = m.nrows();
    'outer: for n in 1..=12u32 {
        let mut exps = Vec::with_capacity(q * q);
        for i in 0..q {
            for j in 0..q {
                let z = m[(i, j)];
                let k = (z.arg() * n as f64 / (2.0 * PI)).round().rem_euclid(n as f64) as u32;
                if (z - root(n, k as i64)).norm() > tol {
                    continue 'outer;
                }
                exps.push(k);
            }
        }
        return Some(ExactEntries::from_exponents(n, q, &exps));
    }
    None
}

pub(crate) fn root(n: u32, k: i64) -> Complex64 {
    unit_root(n, k)
}

/// F_Q[j][k] = exp(2 pi i jk / Q).
pub fn fourier(q: usize) -> Result<HadamardMatrix> {
    if q == 0 {
        return Err(SpinError::InvalidArgument("fourier needs q >= 1".into()));
    }
    let exps: Vec<u32> = (0..q).flat_map(|j| (0..q).map(move |k| ((j * k) % q) as u32)).collect();
    let exact = ExactEntries::from_exponents(q as u32, q, &exps);
    let entries = CMatrix::from_fn(q, q, |j, k| root(q as u32, (j * k) as i64));
    Ok(HadamardMatrix { entries, exact: Some(exact) })
}

/// Kronecker product, left factor outer: row Q_B*i + s.
pub fn kron(a: &HadamardMatrix, b: &HadamardMatrix) -> HadamardMatrix {
    let entries = a.entries.kronecker(&b.entries);
    let exact = match (&a.exact, &b.exact) {
        (Some(ea), Some(eb)) => kron_exact(ea, eb).ok(),
        _ => None,
    };
    HadamardMatrix { entries, exact }
}

fn kron_exact(a: &ExactEntries, b: &ExactEntries) -> Result<ExactEntries> {
    let n = a.conductor.lcm(&b.conductor);
    let (a, b) = (a.lift(n)?, b.lift(n)?);
    let q = a.q * b.q;
    let mut entries = Vec::with_capacity(q * q);
    for i in 0..a.q {
        for s in 0..b.q {
            for j in 0..a.q {
                for t in 0..b.q {
                    entries.push(cyc_mul(a.get(i, j), b.get(s, t))?);
                }
            }
        }
    }
    let out = ExactEntries { conductor: n, q, entries };
    Ok(match out.root_exponents() {
        Some(exps) => ExactEntries::from_exponents(n, q, &exps),
        None => out,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VariantKind {
    Conj,
    Transpose,
    Adjoint,
}

/// Entrywise conjugate, transpose, or conjugate transpose.
pub fn variant(h: &HadamardMatrix, kind: VariantKind) -> HadamardMatrix {
    let entries = match kind {
        VariantKind::Conj => h.entries.conjugate(),
        VariantKind::Transpose => h.entries.transpose(),
        VariantKind::Adjoint => h.entries.adjoint(),
    };
    let exact = h.exact.as_ref().map(|e| {
        let q = e.q;
        let pick = |i: usize, j: usize| match kind {
            VariantKind::Conj => e.get(i, j).conj(),
            VariantKind::Transpose => e.get(j, i).clone(),
            VariantKind::Adjoint => e.get(j, i).conj(),
        };
        ExactEntries {
            conductor: e.conductor,
            q,
            entries: (0..q).flat_map(|i| (0..q).map(move |j| (i, j))).map(|(i, j)| pick(i, j)).collect(),
        }
    });
    HadamardMatrix { entries, exact }
}

/// Rescale rows and columns so row 0 and column 0 are all ones.
pub fn dephase(h: &HadamardMatrix) -> HadamardMatrix {
    let m = &h.entries;
    let q = h.q();
    let h00 = m[(0, 0)];
    let entries = CMatrix::from_fn(q, q, |i, j| {
        if i == 0 || j == 0 {
            Complex64::one()
        } else {
            m[(i, j)] * m[(i, 0)].conj() * m[(0, j)].conj() * h00
        }
    });
    let exact = h.exact.as_ref().and_then(|e| {
        let g00 = e.get(0, 0).clone();
        let mut out = Vec::with_capacity(q * q);
        for i in 0..q {
            for j in 0..q {
                let v = if i == 0 || j == 0 {
                    CyclotomicInt::from_int(e.conductor, 1)
                } else {
                    let a = cyc_mul(e.get(i, j), &e.get(i, 0).conj()).ok()?;
                    let b = cyc_mul(&a, &e.get(0, j).conj()).ok()?;
                    cyc_mul(&b, &g00).ok()?
                };
                out.push(v);
            }
        }
        Some(ExactEntries { conductor: e.conductor, q, entries: out })
    });
    HadamardMatrix { entries, exact }
}

#[derive(Serialize)]
struct FloatRepr {
    kind: &'static str,
    q: usize,
    entries: Vec<Vec<[F17; 2]>>,
}

#[derive(Serialize)]
struct ExactRepr {
    kind: &'static str,
    conductor: u32,
    entries: Vec<Vec<Vec<serde_json::Value>>>,
}

#[derive(Serialize)]
struct RealRepr {
    kind: &'static str,
    entries: Vec<Vec<i8>>,
}

impl HadamardMatrix {
    /// `{"kind":"hadamard","q":Q,"entries":[[[re,im],...],...]}`
    pub fn to_json(&self) -> String {
        let q = self.q();
        let r = FloatRepr {
            kind: "hadamard",
            q,
            entries: (0..q)
                .map(|i| (0..q).map(|j| [F17(self.get(i, j).re), F17(self.get(i, j).im)]).collect())
                .collect(),
        };
        serde_json::to_string(&r).expect("matrix serialization")
    }

    /// `{"kind":"hadamard-exact","conductor":N,"entries":[[[c0,...],...],...]}`
    pub fn to_json_exact(&self) -> Option<String> {
        let e = self.exact.as_ref()?;
        let r = ExactRepr {
            kind: "hadamard-exact",
            conductor: e.conductor,
            entries: (0..e.q)
                .map(|i| {
                    (0..e.q)
                        .map(|j| {
                            e.get(i, j)
                                .coeffs()
                                .iter()
                                .map(|c| match c.to_i64() {
                                    Some(v) => serde_json::Value::from(v),
                                    None => serde_json::Value::from(c.to_string()),
                                })
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        };
        Some(serde_json::to_string(&r).expect("matrix serialization"))
    }

    /// `{"kind":"hadamard-real","entries":[[1,-1,...],...]}` for +-1 matrices.
    pub fn to_json_real(&self) -> Option<String> {
        let e = self.exact.as_ref()?;
        let signs = e.as_signs()?;
        let r = RealRepr { kind: "hadamard-real", entries: signs.chunks(e.q).map(<[i8]>::to_vec).collect() };
        Some(serde_json::to_string(&r).expect("matrix serialization"))
    }

    /// Reads any of the three matrix formats. Float input gets exact entries
    /// attached when they can be recognized. The result is not validated.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(s)?;
        let kind = v.get("kind").and_then(|k| k.as_str()).unwrap_or("");
        let rows = v
            .get("entries")
            .and_then(|e| e.as_array())
            .ok_or_else(|| SpinError::Parse("missing \"entries\" array".into()))?;
        let q = rows.len();
        let bad = |what: &str| SpinError::Parse(format!("malformed {kind} entries: {what}"));
        let row = |r: &serde_json::Value| -> Result<Vec<serde_json::Value>> {
            let r = r.as_array().ok_or_else(|| bad("row is not an array"))?;
            if r.len() != q {
                return Err(bad("matrix is not square"));
            }
            Ok(r.clone())
        };
        match kind {
            "hadamard" => {
                if let Some(qd) = v.get("q").and_then(|x| x.as_u64()) {
                    if qd as usize != q {
                        return Err(bad("q disagrees with row count"));
                    }
                }
                let mut m = CMatrix::zeros(q, q);
                for (i, r) in rows.iter().enumerate() {
                    for (j, z) in row(r)?.iter().enumerate() {
                        let pair = z.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("entry is not [re, im]"))?;
                        let re = pair[0].as_f64().ok_or_else(|| bad("non-numeric"))?;
                        let im = pair[1].as_f64().ok_or_else(|| bad("non-numeric"))?;
                        m[(i, j)] = Complex64::new(re, im);
                    }
                }
                Ok(Self::new_unchecked(m)?.with_inferred_exact(1e-10))
            }
            "hadamard-exact" => {
                let n = v
                    .get("conductor")
                    .and_then(|x| x.as_u64())
                    .filter(|&n| (1..=10_000).contains(&n))
                    .ok_or_else(|| bad("missing conductor"))? as u32;
                let mut entries = Vec::with_capacity(q * q);
                for r in rows {
                    for c in row(r)? {
                        let coeffs = c
                            .as_array()
                            .ok_or_else(|| bad("entry is not a coefficient list"))?
                            .iter()
                            .map(|x| bigint_from_json(x).ok_or_else(|| bad("coefficient")))
                            .collect::<Result<Vec<BigInt>>>()?;
                        entries.push(CyclotomicInt::new(n, coeffs)?);
                    }
                }
                Self::from_exact(ExactEntries { conductor: n, q, entries })
            }
            "hadamard-real" => {
                let mut signs = Vec::with_capacity(q * q);
                for r in rows {
                    for c in row(r)? {
                        signs.push(c.as_i64().filter(|x| x.abs() == 1).ok_or_else(|| bad("entry is not +-1"))? as i8);
                    }
                }
                Self::from_signs(q, &signs)
            }
            other => Err(SpinError::Parse(format!("unknown matrix kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fourier_small() {
        let f2 = fourier(2).unwrap();
        assert!((f2.get(1, 1) - c(-1.0, 0.0)).norm() < 1e-15);
        let f3 = fourier(3).unwrap();
        assert!((f3.get(1, 2) - Complex64::from_polar(1.0, 4.0 * PI / 3.0)).norm() < 1e-15);
        for q in 2..=12 {
            let f = fourier(q).unwrap();
            assert!(validate(&f, 1e-8).pass, "q = {q}");
            let e = f.exact().unwrap();
            assert!((e.embed() - f.entries()).norm() < 1e-12);
        }
    }

    #[test]
    fn validation_failures() {
        let ones = CMatrix::from_element(2, 2, c(1.0, 0.0));
        assert!(!validate_entries(&ones, 1e-8).unwrap().pass);
        assert!(validate_entries(&CMatrix::zeros(2, 3), 1e-8).is_err());
        assert!(HadamardMatrix::new(ones, 1e-8).is_err());
    }

    #[test]
    fn kron_conventions() {
        let f2 = fourier(2).unwrap();
        let h4 = kron(&f2, &f2);
        assert_eq!(h4.q(), 4);
        assert!(validate(&h4, 1e-8).pass);
        assert_eq!(h4.exact().unwrap().as_signs().unwrap()[..4], [1, 1, 1, 1]);
        // row Q_B*i + s, column Q_B*j + t
        let f3 = fourier(3).unwrap();
        let k = kron(&f2, &f3);
        assert!(validate(&k, 1e-8).pass);
        assert!((k.get(3 + 1, 3 + 2) - f2.get(1, 1) * f3.get(1, 2)).norm() < 1e-15);
        assert_eq!(k.exact().unwrap().conductor, 6);
        assert!((k.exact().unwrap().embed() - k.entries()).norm() < 1e-12);
        let one = fourier(1).unwrap();
        assert_eq!(kron(&one, &f3).entries(), f3.entries());
    }

    #[test]
    fn variants_and_dephase() {
        let f2 = fourier(2).unwrap();
        assert_eq!(variant(&f2, VariantKind::Conj).entries(), f2.entries());
        let p = petrescu(Complex64::from_polar(1.0, 0.3)).unwrap();
        let back = variant(&variant(&p, VariantKind::Adjoint), VariantKind::Adjoint);
        assert_eq!(back.entries(), p.entries());
        let pi = petrescu(c(0.0, 1.0)).unwrap();
        for kind in [VariantKind::Conj, VariantKind::Transpose, VariantKind::Adjoint] {
            let v = variant(&pi, kind);
            assert!(validate(&v, 1e-8).pass);
            assert!((v.exact().unwrap().embed() - v.entries()).norm() < 1e-12);
        }
        let f5 = fourier(5).unwrap();
        assert!((dephase(&f5).entries() - f5.entries()).norm() < 1e-14);
        let d = dephase(&petrescu(c(1.0, 0.0)).unwrap());
        assert!(validate(&d, 1e-8).pass);
        for k in 0..7 {
            assert!((d.get(0, k) - 1.0).norm() < 1e-14 && (d.get(k, 0) - 1.0).norm() < 1e-14);
        }
        assert!((d.exact().unwrap().embed() - d.entries()).norm() < 1e-12);
        assert!((dephase(&d).entries() - d.entries()).norm() < 1e-14);
    }

    #[test]
    fn json_formats_round_trip() {
        let p = petrescu(Complex64::from_polar(1.0, 0.3)).unwrap();
        let back = HadamardMatrix::from_json(&p.to_json()).unwrap();
        assert_eq!(back.entries(), p.entries());
        assert!(back.exact().is_none());

        let f3 = fourier(3).unwrap();
        let from_float = HadamardMatrix::from_json(&f3.to_json()).unwrap();
        assert_eq!(from_float.exact(), f3.exact());
        let from_exact = HadamardMatrix::from_json(&f3.to_json_exact().unwrap()).unwrap();
        assert_eq!(from_exact.exact(), f3.exact());
        assert!(f3.to_json_real().is_none());

        let h = paley(PaleyKind::II, 5).unwrap();
        let real = h.to_json_real().unwrap();
        assert!(real.starts_with(r#"{"kind":"hadamard-real","entries":[[1,"#));
        let back = HadamardMatrix::from_json(&real).unwrap();
        assert_eq!(back.entries(), h.entries());
        assert!(HadamardMatrix::from_json(r#"{"kind":"hadamard-real","entries":[[1,2],[1,1]]}"#).is_err());
        assert!(HadamardMatrix::from_json(r#"{"kind":"nope","entries":[]}"#).is_err());
    }

    #[test]
    fn inferred_conductors() {
        let m = paley(PaleyKind::I, 3).unwrap().entries().clone();
        assert_eq!(infer_exact(&m, 1e-10).unwrap().conductor, 2);
        let p1 = petrescu(c(1.0, 0.0)).unwrap();
        assert_eq!(infer_exact(p1.entries(), 1e-10).unwrap().conductor, 6);
        assert!(infer_exact(petrescu(Complex64::from_polar(1.0, 0.3)).unwrap().entries(), 1e-10).is_none());
    }
}
