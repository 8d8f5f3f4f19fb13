use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::Rational;

/// Recover a small-denominator rational from a float.
///
/// Walks the continued-fraction convergents of the exact binary value of `x`
/// and returns the first one (hence the smallest denominator) with
/// `q <= max_den` and `|x - p/q| <= tol`.
pub fn rational_reconstruct(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() || tol < 0.0 || max_den == 0 {
        return None;
    }
    let exact = BigRational::from_float(x)?;
    let max_den = BigInt::from(max_den);

    // convergent recurrences h_k = a_k h_{k-1} + h_{k-2}, likewise k
    let (mut h_prev, mut h) = (BigInt::from(0), BigInt::from(1));
    let (mut k_prev, mut k) = (BigInt::from(1), BigInt::from(0));
    let mut rem = exact.clone();
    loop {
        let a = rem.floor().to_integer();
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            return None;
        }
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);

        let cand = BigRational::new(h.clone(), k.clone());
        let err = Rational::from_inner((&cand - &exact).abs()).to_f64();
        if err <= tol {
            return Some(Rational::from_inner(cand));
        }
        let frac = &rem - BigRational::from_integer(a);
        if frac.is_zero() {
            return None;
        }
        rem = frac.recip();
    }
}
