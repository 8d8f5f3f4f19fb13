use num_bigint::BigInt;
use num_complex::Complex64;

use super::CyclotomicInt;

/// Conductors whose ring of integers is a rank-2 (or rank-1) lattice with
/// power basis {1, zeta}; rounding to the nearest ring element is then
/// well defined coordinatewise.
pub fn lattice_supported(conductor: u32) -> bool {
    matches!(conductor, 1 | 2 | 3 | 4 | 6)
}

/// Nearest element `a + b*zeta_N` to `z`, if within `tol`.
pub fn round_to_ring(z: Complex64, conductor: u32, tol: f64) -> Option<CyclotomicInt> {
    if !lattice_supported(conductor) {
        return None;
    }
    let (a, b) = if conductor <= 2 {
        (z.re.round(), 0.0)
    } else {
        let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / conductor as f64);
        let b = (z.im / zeta.im).round();
        ((z.re - b * zeta.re).round(), b)
    };
    if !a.is_finite() || !b.is_finite() || a.abs() > 1e15 || b.abs() > 1e15 {
        return None;
    }
    let mut coeffs = vec![BigInt::from(0); conductor as usize];
    coeffs[0] = BigInt::from(a as i64);
    if conductor > 2 {
        coeffs[1] = BigInt::from(b as i64);
    }
    let x = CyclotomicInt::new(conductor, coeffs).ok()?;
    ((x.embed() - z).norm() <= tol).then_some(x)
}

/// Smallest k <= max_k such that `2^k * v` rounds entrywise into the ring;
/// returns k and the rounded entries.
pub fn round_vector_dyadic(
    v: &[Complex64],
    conductor: u32,
    max_k: u32,
    tol: f64,
) -> Option<(u32, Vec<CyclotomicInt>)> {
    (0..=max_k).find_map(|k| {
        let s = (1u64 << k) as f64;
        v.iter()
            .map(|&z| round_to_ring(z * s, conductor, tol))
            .collect::<Option<Vec<_>>>()
            .map(|r| (k, r))
    })
}
