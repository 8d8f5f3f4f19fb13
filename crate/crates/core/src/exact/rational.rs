use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::SpinError;

/// Exact rational number, always in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> crate::Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(SpinError::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(num.into(), den)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact value of a finite float.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub(crate) fn from_inner(r: BigRational) -> Self {
        Rational(r)
    }
}

/// A rational number is an algebraic integer exactly when it is an integer.
pub fn is_algebraic_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SpinError::Parse(format!("not a rational: {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Rational::new(p, q)
            }
            None => Ok(Rational::from_int(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_reduced() {
        let r = Rational::new(6, -4).unwrap();
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(r, Rational::new(-3, 2).unwrap());
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn algebraic_integer_iff_integral() {
        assert!(is_algebraic_integer(&Rational::from_int(3)));
        assert!(is_algebraic_integer(&Rational::zero()));
        assert!(!is_algebraic_integer(&Rational::new(20, 9).unwrap()));
        assert!(is_algebraic_integer(&Rational::new(18, 9).unwrap()));
    }

    #[test]
    fn string_form() {
        let r: Rational = "1/49".parse().unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"1/49\"");
        let back: Rational = serde_json::from_str("\"2/98\"").unwrap();
        assert_eq!(back, r);
        assert_eq!("7".parse::<Rational>().unwrap().to_string(), "7/1");
        assert!("x/2".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
    }
}
