//! Exact level-2 eigenpair checks over Z[zeta_N], and exact integer kernels.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Result, SpinError};
use crate::exact::{cyc_mul, CyclotomicInt, Rational};
use crate::hadamard::{ExactEntries, HadamardMatrix};

/// `Q^2 * (Q theta)` at level 2 in exact arithmetic: entry (a, b) is
/// `|S(a,b)|^2`, `S(a,b) = sum_m H[m,b1] conj(H[m,b2]) conj(H[m,a1]) H[m,a2]`.
#[derive(Clone, Debug)]
pub struct ExactTheta2 {
    pub q: usize,
    pub conductor: u32,
    /// Row-major, `q^2 x q^2`.
    pub entries: Vec<CyclotomicInt>,
}

/// Common conductor when Z[zeta_a] and Z[zeta_b] are the same ring
/// (they coincide exactly when a and b differ by a factor 2 with the smaller odd).
pub fn same_ring(a: u32, b: u32) -> Option<u32> {
    let canon = |n: u32| if n % 4 == 2 { n / 2 } else { n };
    (canon(a) == canon(b)).then(|| a.lcm(&b))
}

fn abs_sq_counts(counts: &[i64]) -> Vec<i64> {
    let n = counts.len();
    let mut out = vec![0i64; n];
    for (i, &ci) in counts.iter().enumerate().filter(|(_, c)| **c != 0) {
        for (j, &cj) in counts.iter().enumerate().filter(|(_, c)| **c != 0) {
            out[(i + n - j) % n] += ci * cj;
        }
    }
    out
}

/// Builds [`ExactTheta2`] from the exact entries of `h`.
pub fn exact_theta2_scaled(h: &HadamardMatrix) -> Result<ExactTheta2> {
    let ex = h.exact().ok_or_else(|| SpinError::NoExactForm("matrix carries no exact entries".into()))?;
    let (q, n) = (ex.q, ex.conductor);
    let entries = match ex.root_exponents() {
        Some(exps) => scaled_from_roots(q, ex.conductor, &exps),
        None => scaled_generic(ex)?,
    };
    Ok(ExactTheta2 { q, conductor: n, entries })
}

/// Entries `zeta^e`: each S(a,b) is a histogram of exponents.
fn scaled_from_roots(q: usize, n: u32, exps: &[u32]) -> Vec<CyclotomicInt> {
    let q2 = q * q;
    let nn = n as usize;
    // pe[a][m] = exponent of conj(H[m,a1]) H[m,a2]
    let pe: Vec<Vec<usize>> = (0..q2)
        .map(|a| (0..q).map(|m| (exps[m * q + a / q] as usize + nn - exps[m * q + a % q] as usize) % nn).collect())
        .collect();
    (0..q2)
        .into_par_iter()
        .flat_map_iter(|a| {
            let pa = &pe[a];
            pe.iter()
                .map(|pb| {
                    let mut hist = vec![0i64; nn];
                    for (x, y) in pa.iter().zip(pb) {
                        hist[(x + nn - y) % nn] += 1;
                    }
                    CyclotomicInt::from_exponent_counts(n, &abs_sq_counts(&hist))
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn scaled_generic(ex: &ExactEntries) -> Result<Vec<CyclotomicInt>> {
    let (q, n) = (ex.q, ex.conductor);
    let q2 = q * q;
    let p: Vec<Vec<CyclotomicInt>> = (0..q2)
        .map(|a| (0..q).map(|m| cyc_mul(&ex.get(m, a % q).conj(), ex.get(m, a / q))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<CyclotomicInt>> = (0..q2)
        .into_par_iter()
        .map(|a| {
            (0..q2)
                .map(|b| {
                    let mut s = CyclotomicInt::zero(n);
                    for (x, y) in p[a].iter().zip(&p[b]) {
                        s = s.add(&cyc_mul(x, &y.conj())?)?;
                    }
                    cyc_mul(&s, &s.conj())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

impl ExactTheta2 {
    pub fn dim(&self) -> usize {
        self.q * self.q
    }

    pub fn get(&self, a: usize, b: usize) -> &CyclotomicInt {
        &self.entries[a * self.dim() + b]
    }

    /// The entries as rational integers, when they all are.
    pub fn as_integers(&self) -> Option<Vec<BigInt>> {
        self.entries.iter().map(|e| e.as_integer().cloned()).collect()
    }

    /// True iff `den(l) * sum_b A[a][b] v_b = num(l) * Q^2 * v_a` for every a,
    /// i.e. `Q theta v = l v`. A zero vector is never an eigenvector.
    pub fn verify(&self, v: &[CyclotomicInt], lambda: &Rational) -> Result<bool> {
        let d = self.dim();
        if v.len() != d {
            return Err(SpinError::InvalidArgument(format!("vector length {} for dimension {d}", v.len())));
        }
        let vc = v[0].conductor();
        if let Some(bad) = v.iter().find(|x| x.conductor() != vc) {
            return Err(SpinError::MixedRings(format!("vector mixes conductors {vc} and {}", bad.conductor())));
        }
        let common = same_ring(self.conductor, vc).ok_or_else(|| {
            SpinError::MixedRings(format!("matrix over Z[zeta_{}], vector over Z[zeta_{vc}]", self.conductor))
        })?;
        if v.iter().all(CyclotomicInt::is_zero) {
            return Ok(false);
        }
        let v: Vec<CyclotomicInt> = v.iter().map(|x| x.lift(common)).collect::<Result<_>>()?;
        let ints = self.as_integers();
        let lifted: Option<Vec<CyclotomicInt>> = match ints {
            Some(_) => None,
            None => Some(self.entries.iter().map(|x| x.lift(common)).collect::<Result<_>>()?),
        };
        let den = lambda.denom().clone();
        let rhs_scale = lambda.numer() * BigInt::from(self.q * self.q);
        let row_ok = |a: usize| -> Result<bool> {
            let mut acc = CyclotomicInt::zero(common);
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let term = match (&ints, &lifted) {
                    (Some(k), _) => {
                        let c = &k[a * d + b];
                        if c.is_zero() {
                            continue;
                        }
                        vb.scale(c)
                    }
                    (None, Some(e)) => cyc_mul(&e[a * d + b], vb)?,
                    _ => unreachable!(),
                };
                acc = acc.add(&term)?;
            }
            Ok(acc.scale(&den) == v[a].scale(&rhs_scale))
        };
        let results: Vec<Result<bool>> = (0..d).into_par_iter().map(row_ok).collect();
        for r in results {
            if !r? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Checks `Q theta_n v = lambda v` exactly at level n = 2.
pub fn exact_verify_eigenpair(h: &HadamardMatrix, n: usize, v: &[CyclotomicInt], lambda: &Rational) -> Result<bool> {
    if n != 2 {
        return Err(SpinError::LevelMismatch { expected: 2, got: n });
    }
    if v.len() != h.q() * h.q() {
        return Err(SpinError::InvalidArgument(format!("vector length {} for q = {}", v.len(), h.q())));
    }
    exact_theta2_scaled(h)?.verify(v, lambda)
}

const RANK_PRIME: u64 = 2_147_483_647;

fn rank_mod_p(m: &[BigInt], rows: usize, cols: usize) -> usize {
    let p = BigInt::from(RANK_PRIME);
    let mut a: Vec<u64> = m.iter().map(|x| x.mod_floor(&p).to_u64().expect("reduced mod p")).collect();
    let pw = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % RANK_PRIME;
            }
            b = b * b % RANK_PRIME;
            e >>= 1;
        }
        r
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else { continue };
        for j in 0..cols {
            a.swap(piv * cols + j, r * cols + j);
        }
        let inv = pw(a[r * cols + c], RANK_PRIME - 2);
        for i in r + 1..rows {
            let f = a[i * cols + c] * inv % RANK_PRIME;
            if f == 0 {
                continue;
            }
            for j in c..cols {
                a[i * cols + j] = (a[i * cols + j] + RANK_PRIME - f * a[r * cols + j] % RANK_PRIME) % RANK_PRIME;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Up to `limit` primitive integer vectors spanning part of the right kernel
/// of the `rows x cols` integer matrix `m` (row-major). A full-rank residue
/// mod a prime rules the kernel out before any big-integer work.
pub fn exact_kernel(m: &[BigInt], rows: usize, cols: usize, limit: usize) -> Result<Vec<Vec<BigInt>>> {
    if m.len() != rows * cols {
        return Err(SpinError::InvalidArgument(format!("{} entries for a {rows}x{cols} matrix", m.len())));
    }
    if limit == 0 || rank_mod_p(m, rows, cols) == cols {
        return Ok(Vec::new());
    }

    // fraction-free elimination to echelon form
    let mut a: Vec<Vec<BigInt>> = m.chunks(cols).map(<[BigInt]>::to_vec).collect();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(piv, r);
        let (top, rest) = a.split_at_mut(r + 1);
        let prow = &top[r];
        let exact = rest
            .par_iter_mut()
            .map(|row| {
                for j in c + 1..cols {
                    let t = &row[j] * &prow[c] - &row[c] * &prow[j];
                    let (qt, rem) = t.div_rem(&prev);
                    if !rem.is_zero() {
                        return false;
                    }
                    row[j] = qt;
                }
                row[c] = BigInt::zero();
                true
            })
            .reduce(|| true, |x, y| x && y);
        if !exact {
            return Err(SpinError::Internal("fraction-free elimination produced an inexact quotient".into()));
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }

    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in free.iter().take(limit) {
        let mut x = vec![BigRational::zero(); cols];
        x[f] = BigRational::one();
        for k in (0..pivots.len()).rev() {
            let c = pivots[k];
            let mut s = BigRational::zero();
            for j in c + 1..cols {
                if !a[k][j].is_zero() && !x[j].is_zero() {
                    s += &x[j] * BigRational::from_integer(a[k][j].clone());
                }
            }
            x[c] = -s / BigRational::from_integer(a[k][c].clone());
        }
        let l = x.iter().fold(BigInt::one(), |l, v| l.lcm(v.denom()));
        let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&l / v.denom())).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        let ints: Vec<BigInt> = ints.into_iter().map(|v| v / &g).collect();
        let residual_zero = m.chunks(cols).all(|row| row.iter().zip(&ints).map(|(p, q)| p * q).sum::<BigInt>().is_zero());
        if !residual_zero {
            return Err(SpinError::Internal("kernel vector failed exact back-check".into()));
        }
        out.push(ints);
    }
    Ok(out)
}

/// Integer matrix `den * A - num * Q^2 * I` whose kernel is the
/// `num/den`-eigenspace of `Q theta`.
pub(crate) fn shifted_integer_matrix(a: &[BigInt], q: usize, lambda: &Rational) -> Vec<BigInt> {
    let d = q * q;
    let shift = lambda.numer() * BigInt::from(d);
    let den = lambda.denom();
    let mut out: Vec<BigInt> = a.iter().map(|x| x * den).collect();
    for i in 0..d {
        out[i * d + i] -= &shift;
    }
    out
}
