//! Spectra along the Petrescu family at roots of unity.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use super::q_theta_spectrum;
use crate::angle::{Variant, DEFAULT_DENSE_CAP};
use crate::error::{Result, SpinError};
use crate::exact::unit_root;
use crate::hadamard::petrescu;
use crate::jsonfmt::{fmt17, F17};
use crate::spectral::DEFAULT_WINDOW;

pub const ONE_OVER_49: f64 = 1.0 / 49.0;
const PETRESCU_Q: f64 = 7.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOpts {
    pub window: f64,
    /// Tolerance for the 1/49 eigenvalue and for spectrum constancy.
    pub tol: f64,
    pub cap: usize,
}

impl Default for SweepOpts {
    fn default() -> Self {
        SweepOpts { window: DEFAULT_WINDOW, tol: 1e-8, cap: DEFAULT_DENSE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub t_re: F17,
    pub t_im: F17,
    pub mult_one: usize,
    pub has_one_over_49: bool,
    /// Ascending eigenvalues of Q*theta.
    pub eigenvalues: Vec<F17>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub samples: usize,
    pub level: usize,
    pub one_over_49_everywhere: bool,
    pub mult_one_constant: bool,
    pub spectrum_constant: bool,
    pub rows: Vec<SweepRow>,
}

/// Evaluates `t = exp(2 pi i k / samples)` for k = 0..samples.
pub fn sweep_petrescu(samples: usize, level: usize, opts: SweepOpts) -> Result<SweepReport> {
    if samples < 1 {
        return Err(SpinError::InvalidArgument("sweep needs at least one sample".into()));
    }
    let rows: Vec<SweepRow> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let t = sample_point(k, samples);
            let spec = q_theta_spectrum(&petrescu(t)?, level, Variant::U, opts.cap)?;
            let vals = spec.eigenvalues;
            Ok(SweepRow {
                t_re: F17(t.re),
                t_im: F17(t.im),
                mult_one: vals.iter().filter(|&&x| (x / PETRESCU_Q - 1.0).abs() <= opts.window).count(),
                has_one_over_49: vals.iter().any(|&x| (x - ONE_OVER_49).abs() <= opts.tol),
                eigenvalues: vals.into_iter().map(F17).collect(),
            })
        })
        .collect::<Result<_>>()?;
    let first = &rows[0];
    let spectrum_constant = rows.iter().all(|r| {
        r.eigenvalues.iter().zip(&first.eigenvalues).all(|(a, b)| (a.0 - b.0).abs() <= opts.tol)
    });
    Ok(SweepReport {
        samples,
        level,
        one_over_49_everywhere: rows.iter().all(|r| r.has_one_over_49),
        mult_one_constant: rows.iter().all(|r| r.mult_one == first.mult_one),
        spectrum_constant,
        rows,
    })
}

/// Exact at quarter turns so t = 1, i, -1, -i stay on the root-of-unity path.
fn sample_point(k: usize, samples: usize) -> Complex64 {
    let g = k.gcd(&samples);
    let (num, den) = (k / g, samples / g);
    match u32::try_from(den) {
        Ok(d) => unit_root(d, num as i64),
        Err(_) => Complex64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64),
    }
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sweep serialization")
    }

    /// Header `t_re,t_im,mult_one,eig_min,eig_max,has_one_over_49,eig_0,...`.
    pub fn to_csv(&self) -> String {
        let d = self.rows.first().map_or(0, |r| r.eigenvalues.len());
        let mut out = String::from("t_re,t_im,mult_one,eig_min,eig_max,has_one_over_49");
        for i in 0..d {
            out.push_str(&format!(",eig_{i}"));
        }
        out.push('\n');
        for r in &self.rows {
            let min = r.eigenvalues.first().map_or(f64::NAN, |x| x.0);
            let max = r.eigenvalues.last().map_or(f64::NAN, |x| x.0);
            let mut fields =
                vec![fmt17(r.t_re.0), fmt17(r.t_im.0), r.mult_one.to_string(), fmt17(min), fmt17(max), r.has_one_over_49.to_string()];
            fields.extend(r.eigenvalues.iter().map(|x| fmt17(x.0)));
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::petrescu;
    use crate::reports::{depth_evidence, DepthOpts};

    #[test]
    fn sample_points() {
        assert_eq!(sample_point(0, 16), Complex64::new(1.0, 0.0));
        assert_eq!(sample_point(4, 16), Complex64::new(0.0, 1.0));
        assert!((sample_point(3, 16) - Complex64::from_polar(1.0, 2.0 * PI * 3.0 / 16.0)).norm() < 1e-15);
    }

    #[test]
    fn single_sample_matches_depth_report() {
        let s = sweep_petrescu(1, 2, SweepOpts::default()).unwrap();
        let d = depth_evidence(&petrescu(Complex64::new(1.0, 0.0)).unwrap(), 2, DepthOpts::default()).unwrap();
        assert_eq!(s.rows[0].eigenvalues, d.eigenvalues);
        assert_eq!(s.rows[0].mult_one, d.mult_one);
        assert!(s.rows[0].has_one_over_49);
    }

    #[test]
    fn eight_samples_keep_one_over_49() {
        let s = sweep_petrescu(8, 2, SweepOpts::default()).unwrap();
        assert!(s.one_over_49_everywhere);
        let csv = s.to_csv();
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("t_re,t_im,mult_one,eig_min,eig_max,has_one_over_49,eig_0,"));
        assert_eq!(header.split(',').count(), 6 + 49);
        assert_eq!(lines.count(), 8);
    }

    #[test]
    fn rejects_zero_samples() {
        assert!(sweep_petrescu(0, 2, SweepOpts::default()).is_err());
    }
}
