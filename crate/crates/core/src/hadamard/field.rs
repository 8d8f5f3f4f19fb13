use crate::error::{Result, SpinError};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// (p, m) with q = p^m, if q is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let (mut r, mut m) = (q, 0);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

/// GF(p^m) as F_p[x]/(modulus). Elements are coefficient vectors, constant
/// term first, and are numbered `c0*p^(m-1) + c1*p^(m-2) + ...` so that
/// numbering agrees with lexicographic order of the coefficient arrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteField {
    pub p: u64,
    pub m: u32,
    /// Monic, length m+1, constant term first.
    pub modulus: Vec<u64>,
    pub q: u64,
}

pub type Elem = Vec<u64>;

/// Builds GF(p^m) with the lexicographically smallest monic irreducible modulus.
pub fn ff_make(p: u64, m: u32) -> Result<FiniteField> {
    if !is_prime(p) {
        return Err(SpinError::NotPrime(p));
    }
    if m == 0 {
        return Err(SpinError::InvalidArgument("extension degree must be at least 1".into()));
    }
    let q = p.checked_pow(m).filter(|&q| q <= 10_000).ok_or_else(|| {
        SpinError::InvalidArgument(format!("field order {p}^{m} exceeds 10000"))
    })?;
    // candidate low coefficients enumerated with c0 most significant
    for code in 0..q {
        let mut low = vec![0u64; m as usize];
        let mut r = code;
        for i in (0..m as usize).rev() {
            low[i] = r % p;
            r /= p;
        }
        let mut f = low;
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(FiniteField { p, m, modulus: f, q });
        }
    }
    Err(SpinError::Internal(format!("no irreducible of degree {m} over F_{p}")))
}

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Remainder of `a` modulo a monic `b` over F_p.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (j, &bj) in b.iter().enumerate() {
            r[shift + j] = (r[shift + j] + p - lead * bj % p) % p;
        }
        r = trim(r);
    }
    r
}

/// Exhaustive check: no monic factor of degree 1..=deg/2.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 1 {
        return true;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut r = code;
            for _ in 0..d {
                g.push(r % p);
                r /= p;
            }
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    pub fn zero(&self) -> Elem {
        vec![0; self.m as usize]
    }

    pub fn one(&self) -> Elem {
        let mut e = self.zero();
        e[0] = 1;
        e
    }

    pub fn elem(&self, index: u64) -> Elem {
        let mut e = self.zero();
        let mut r = index;
        for i in (0..self.m as usize).rev() {
            e[i] = r % self.p;
            r /= self.p;
        }
        e
    }

    pub fn index(&self, e: &Elem) -> u64 {
        e.iter().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.q).map(|i| self.elem(i))
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let mut prod = vec![0u64; 2 * self.m as usize];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.m as usize, 0);
        r
    }

    pub fn pow(&self, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

/// Quadratic character: 0 at 0, +1 on nonzero squares, -1 otherwise.
pub fn quad_char(f: &FiniteField, a: &Elem) -> i8 {
    if f.is_zero(a) {
        return 0;
    }
    if f.p == 2 {
        return 1;
    }
    if f.pow(a, (f.q - 1) / 2) == f.one() {
        1
    } else {
        -1
    }
}

/// K[a][b] = chi(a - b) over the field's element numbering.
pub fn jacobsthal(f: &FiniteField) -> Result<Vec<Vec<i8>>> {
    if f.q.is_multiple_of(2) {
        return Err(SpinError::EvenOrder { what: "jacobsthal matrix", q: f.q });
    }
    let els: Vec<Elem> = f.elements().collect();
    Ok(els
        .iter()
        .map(|a| els.iter().map(|b| quad_char(f, &f.sub(a, b))).collect())
        .collect())
}
