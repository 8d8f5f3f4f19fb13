use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinError};
use crate::jsonfmt::F17;

/// Element of a box space: Q^n complex coefficients, slot 1 varying fastest
/// (`flat = a1 + Q*a2 + Q^2*a3 + ...`).
///
/// `shaded` marks boxes whose marked boundary region is shaded. Those only
/// occur as intermediate results of diagrams; at level 0 a shaded box carries
/// one spin and so has Q coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxVector {
    pub q: usize,
    pub level: usize,
    pub shaded: bool,
    pub coeffs: Vec<Complex64>,
}

/// Number of independent spins carried by a box of the given shape.
pub fn region_count(level: usize, shaded: bool) -> usize {
    if level == 0 {
        shaded as usize
    } else {
        level
    }
}

impl BoxVector {
    pub fn new(q: usize, level: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_shading(q, level, false, coeffs)
    }

    pub fn with_shading(q: usize, level: usize, shaded: bool, coeffs: Vec<Complex64>) -> Result<Self> {
        let want = q.pow(region_count(level, shaded) as u32);
        if coeffs.len() != want {
            return Err(SpinError::InvalidArgument(format!(
                "box of level {level} over q = {q} needs {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(BoxVector { q, level, shaded, coeffs })
    }

    pub fn from_real(q: usize, level: usize, coeffs: &[f64]) -> Result<Self> {
        Self::new(q, level, coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(q: usize, level: usize) -> Self {
        BoxVector { q, level, shaded: false, coeffs: vec![Complex64::new(0.0, 0.0); q.pow(level as u32)] }
    }

    pub fn basis(q: usize, level: usize, flat: usize) -> Self {
        let mut b = Self::zeros(q, level);
        b.coeffs[flat] = Complex64::new(1.0, 0.0);
        b
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn flat_index(q: usize, spins: &[usize]) -> usize {
        spins.iter().rev().fold(0, |acc, &a| acc * q + a)
    }

    pub fn spins(q: usize, level: usize, mut flat: usize) -> Vec<usize> {
        (0..level)
            .map(|_| {
                let a = flat % q;
                flat /= q;
                a
            })
            .collect()
    }

    pub fn get(&self, spins: &[usize]) -> Complex64 {
        self.coeffs[Self::flat_index(self.q, spins)]
    }

    pub fn scale(&self, a: Complex64) -> Self {
        BoxVector { coeffs: self.coeffs.iter().map(|c| c * a).collect(), ..self.clone() }
    }

    /// `a*self + b*other`, shapes must match.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| a * x + b * y).collect();
        Ok(BoxVector { coeffs, ..self.clone() })
    }

    /// Max-norm distance.
    pub fn dist_inf(&self, other: &Self) -> f64 {
        if self.coeffs.len() != other.coeffs.len() {
            return f64::INFINITY;
        }
        self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(SpinError::QMismatch { expected: self.q, got: other.q });
        }
        if self.level != other.level || self.shaded != other.shaded {
            return Err(SpinError::LevelMismatch { expected: self.level, got: other.level });
        }
        Ok(())
    }

    /// The unit of the level-n box space.
    ///
    /// With spins read around the boundary, the through-strands pair slot i
    /// with slot n-1-i, so the unit is supported on palindromic spin tuples.
    /// The constant makes it a fixed point of the angle diagram.
    pub fn identity(q: usize, level: usize) -> Self {
        let qf = q as f64;
        let c = qf.powf(level as f64 / 2.0) * qf.powf(-(level.div_ceil(2) as f64) / 2.0);
        let mut b = Self::zeros(q, level);
        for (flat, slot) in b.coeffs.iter_mut().enumerate() {
            let a = Self::spins(q, level, flat);
            if (0..level).all(|i| a[i] == a[level - 1 - i]) {
                *slot = Complex64::new(c, 0.0);
            }
        }
        b
    }
}

#[derive(Serialize, Deserialize)]
struct BoxRepr {
    kind: String,
    q: usize,
    level: usize,
    coeffs: Vec<[F17; 2]>,
}

impl BoxVector {
    pub fn to_json(&self) -> String {
        let r = BoxRepr {
            kind: "box".into(),
            q: self.q,
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| [F17(c.re), F17(c.im)]).collect(),
        };
        serde_json::to_string(&r).expect("box serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: BoxRepr = serde_json::from_str(s)?;
        if r.kind != "box" {
            return Err(SpinError::Parse(format!("expected kind \"box\", got {:?}", r.kind)));
        }
        Self::new(r.q, r.level, r.coeffs.iter().map(|[re, im]| Complex64::new(re.0, im.0)).collect())
    }
}
