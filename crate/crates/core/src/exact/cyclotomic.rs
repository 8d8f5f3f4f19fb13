use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, SpinError};

/// The N-th cyclotomic polynomial, coefficients from the constant term up.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic_poly needs n >= 1");
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_monic(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Exact quotient of `a` by a monic `b`; the remainder must vanish.
fn div_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut rem = a.to_vec();
    let mut quot = vec![0i64; a.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db];
        quot[i] = c;
        for (j, &bj) in b.iter().enumerate() {
            rem[i + j] -= c * bj;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// zeta_n^k as a float, exact at multiples of a quarter turn.
pub fn unit_root(n: u32, k: i64) -> Complex64 {
    let n = n as i64;
    let k = k.rem_euclid(n);
    if (4 * k) % n == 0 {
        return [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(4 * k / n) as usize];
    }
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
}

/// Euler phi, the degree of the N-th cyclotomic polynomial.
pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u32
}

/// Element of Z[zeta_N] stored as the power-basis remainder modulo Phi_N.
///
/// `coeffs` always has length N; positions at or above phi(N) are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclotomicInt {
    conductor: u32,
    coeffs: Vec<BigInt>,
}

impl CyclotomicInt {
    /// Builds from arbitrary length-N coefficients and reduces them.
    pub fn new(conductor: u32, coeffs: Vec<BigInt>) -> Result<Self> {
        if conductor == 0 {
            return Err(SpinError::InvalidArgument("conductor must be positive".into()));
        }
        if coeffs.len() != conductor as usize {
            return Err(SpinError::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                conductor,
                coeffs.len()
            )));
        }
        let mut x = CyclotomicInt { conductor, coeffs };
        x.reduce();
        Ok(x)
    }

    pub fn from_i64s(conductor: u32, coeffs: &[i64]) -> Result<Self> {
        Self::new(conductor, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(conductor: u32) -> Self {
        CyclotomicInt { conductor, coeffs: vec![BigInt::zero(); conductor as usize] }
    }

    pub fn from_int(conductor: u32, v: impl Into<BigInt>) -> Self {
        let mut x = Self::zero(conductor);
        x.coeffs[0] = v.into();
        x
    }

    /// zeta_N^k for any integer k.
    pub fn zeta_pow(conductor: u32, k: i64) -> Self {
        Self::from_exponent_counts(conductor, &{
            let mut h = vec![0i64; conductor as usize];
            h[k.rem_euclid(conductor as i64) as usize] = 1;
            h
        })
    }

    /// Sum of `counts[k] * zeta_N^k`.
    pub fn from_exponent_counts(conductor: u32, counts: &[i64]) -> Self {
        debug_assert_eq!(counts.len(), conductor as usize);
        let mut x = CyclotomicInt {
            conductor,
            coeffs: counts.iter().map(|&c| BigInt::from(c)).collect(),
        };
        x.reduce();
        x
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Some(c) when the element is the rational integer c.
    pub fn as_integer(&self) -> Option<&BigInt> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn reduce(&mut self) {
        let phi = cyclotomic_poly(self.conductor);
        let d = phi.len() - 1;
        for i in (d..self.coeffs.len()).rev() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let c = std::mem::take(&mut self.coeffs[i]);
            for (j, &pj) in phi.iter().enumerate().take(d) {
                if pj != 0 {
                    self.coeffs[i - d + j] -= &c * pj;
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.conductor != other.conductor {
            return Err(SpinError::ConductorMismatch(self.conductor, other.conductor));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(CyclotomicInt { conductor: self.conductor, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(CyclotomicInt { conductor: self.conductor, coeffs })
    }

    pub fn neg(&self) -> Self {
        CyclotomicInt { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        CyclotomicInt { conductor: self.conductor, coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Complex conjugate: zeta^k maps to zeta^(N-k).
    pub fn conj(&self) -> Self {
        let n = self.conductor as usize;
        let mut coeffs = vec![BigInt::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(n - k) % n] = c.clone();
        }
        let mut x = CyclotomicInt { conductor: self.conductor, coeffs };
        x.reduce();
        x
    }

    /// Value at zeta_N = exp(2 pi i / N).
    pub fn embed(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| unit_root(self.conductor, k as i64) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// Same number viewed in Z[zeta_M] for a multiple M of the conductor.
    pub fn lift(&self, to: u32) -> Result<Self> {
        if to == 0 || !to.is_multiple_of(self.conductor) {
            return Err(SpinError::ConductorMismatch(self.conductor, to));
        }
        let step = (to / self.conductor) as usize;
        let mut coeffs = vec![BigInt::zero(); to as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * step] = c.clone();
        }
        CyclotomicInt::new(to, coeffs)
    }

    /// Some(k) when the element equals zeta_N^k.
    pub fn root_exponent(&self) -> Option<u32> {
        (0..self.conductor).find(|&k| *self == Self::zeta_pow(self.conductor, k as i64))
    }

    pub fn is_one(&self) -> bool {
        self.as_integer().is_some_and(One::is_one)
    }
}

/// Product in Z[zeta_N]; rejects operands of different conductor.
pub fn cyc_mul(a: &CyclotomicInt, b: &CyclotomicInt) -> Result<CyclotomicInt> {
    a.check(b)?;
    let n = a.conductor as usize;
    let mut coeffs = vec![BigInt::zero(); n];
    for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            coeffs[(i + j) % n] += x * y;
        }
    }
    let mut out = CyclotomicInt { conductor: a.conductor, coeffs };
    out.reduce();
    Ok(out)
}

impl fmt::Display for CyclotomicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            match k {
                0 => write!(f, "{sign}{mag}")?,
                _ if mag.is_one() => write!(f, "{sign}z{}^{k}", self.conductor)?,
                _ => write!(f, "{sign}{mag}*z{}^{k}", self.conductor)?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycRepr {
    conductor: u32,
    coeffs: Vec<serde_json::Value>,
}

fn bigint_to_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

pub(crate) fn bigint_from_json(v: &serde_json::Value) -> Option<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(BigInt::from),
        serde_json::Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl Serialize for CyclotomicInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CycRepr { conductor: self.conductor, coeffs: self.coeffs.iter().map(bigint_to_json).collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CyclotomicInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = CycRepr::deserialize(deserializer)?;
        let coeffs = r
            .coeffs
            .iter()
            .map(|v| bigint_from_json(v).ok_or_else(|| D::Error::custom("bad integer coefficient")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CyclotomicInt::new(r.conductor, coeffs).map_err(D::Error::custom)
    }
}
