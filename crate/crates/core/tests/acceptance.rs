//! Acceptance criteria 1-12, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;

use spinspec_core::angle::{theta2_dense, theta_build, theta_dense, Variant, DEFAULT_DENSE_CAP};
use spinspec_core::box_vector::BoxVector;
use spinspec_core::engine::run_identity_suite;
use spinspec_core::exact::Rational;
use spinspec_core::hadamard::{
    ff_make, fourier, jacobsthal, known_flat_vector, known_flat_vector_exact, paley, petrescu, FlatFamily,
    HadamardMatrix, PaleyKind,
};
use spinspec_core::reports::{
    abelianness_check, amenability_compare, depth_evidence, relcomm_dims, sweep_petrescu, variant_spectra_check,
    DepthOpts, DepthStatus, PrincipalGraph, SweepOpts,
};
use spinspec_core::spectral::{eig_hermitian, exact_verify_eigenpair, hermitian_defect, DEFAULT_WINDOW};

type C = Complex64;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SUITE_TOL: f64 = 1e-10;
const CLOSED_FORM_TOL: f64 = 1e-10;
const EIGENPAIR_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-8;
const HYGIENE_TOL: f64 = 1e-10;
const RANGE_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;

fn unit(angle: f64) -> C {
    C::from_polar(1.0, angle)
}

/// F2, F3, F5, Petrescu(1), Petrescu(e^{0.3i}), Paley II q = 5.
fn suite_set() -> Vec<(String, HadamardMatrix)> {
    vec![
        ("F2".into(), fourier(2).unwrap()),
        ("F3".into(), fourier(3).unwrap()),
        ("F5".into(), fourier(5).unwrap()),
        ("Petrescu(1)".into(), petrescu(unit(0.0)).unwrap()),
        ("Petrescu(e^0.3i)".into(), petrescu(unit(0.3)).unwrap()),
        ("PaleyII(5)".into(), paley(PaleyKind::II, 5).unwrap()),
    ]
}

fn test_matrix() -> Vec<(String, HadamardMatrix)> {
    let mut v = suite_set();
    v.push(("Petrescu(i)".into(), petrescu(unit(PI / 2.0)).unwrap()));
    v.push(("Petrescu(e^(i pi/5))".into(), petrescu(unit(PI / 5.0)).unwrap()));
    v.push(("PaleyI(11)".into(), paley(PaleyKind::I, 11).unwrap()));
    v.push(("F4".into(), fourier(4).unwrap()));
    v
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

/// Oracle: `(Q theta_2)[a][b] = |sum_m H[m,b1] conj(H[m,b2]) conj(H[m,a1]) H[m,a2]|^2 / Q^2`
/// summed term by term.
fn q_theta2_bruteforce(h: &HadamardMatrix) -> DMatrix<f64> {
    let q = h.q();
    let q2 = (q * q) as f64;
    DMatrix::from_fn(q * q, q * q, |a, b| {
        let (a1, a2, b1, b2) = (a % q, a / q, b % q, b / q);
        let s: C = (0..q).map(|m| h.get(m, b1) * h.get(m, b2).conj() * h.get(m, a1).conj() * h.get(m, a2)).sum();
        s.norm_sqr() / q2
    })
}

fn eigen_residual(m: &DMatrix<C>, v: &BoxVector, lambda: f64) -> f64 {
    let x = nalgebra::DVector::from_column_slice(&v.coeffs);
    let r = m * &x - x.scale(lambda);
    r.camax() / x.camax()
}

fn c1_identity_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (name, h) in suite_set() {
        let r = run_identity_suite(&h).map_err(|e| format!("{name}: {e}"))?;
        for c in &r.checks {
            worst = worst.max(c.residual.0);
            ensure(c.residual.0 < SUITE_TOL, || format!("{name}: {} residual {:e}", c.name, c.residual.0))?;
        }
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        let reid = names.iter().filter(|n| n.starts_with("reidemeister II")).count();
        ensure(reid == 4, || format!("{name}: {reid} reidemeister checks"))?;
        for n in 1..=3 {
            ensure(names.contains(&format!("theta(1) = 1 at level {n}").as_str()), || format!("{name}: no theta(1) at {n}"))?;
        }
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("worst residual {worst:.1e} in {:.1?}", start.elapsed()))
}

fn c2_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for (name, h) in suite_set() {
        let eng = theta_dense(&h, 2, Variant::U).map_err(|e| e.to_string())?;
        let eng = eng.dense().unwrap();
        let closed = theta2_dense(&h);
        let closed = closed.dense().unwrap();
        let oracle = q_theta2_bruteforce(&h);
        let qf = h.q() as f64;
        let d = (eng - closed).camax();
        let o = eng.iter().zip(oracle.iter()).map(|(e, o)| (e * qf - o).norm()).fold(0.0, f64::max);
        worst = worst.max(d).max(o / qf);
        ensure(d < CLOSED_FORM_TOL, || format!("{name}: engine vs closed form {d:e}"))?;
        ensure(o < CLOSED_FORM_TOL, || format!("{name}: engine vs term-by-term sum {o:e}"))?;
    }
    Ok(format!("max entry gap {worst:.1e}"))
}

fn c3_petrescu() -> Outcome {
    let mut worst = 0.0f64;
    for (label, angle) in [("1", 0.0), ("i", PI / 2.0), ("e^(i pi/5)", PI / 5.0)] {
        let h = petrescu(unit(angle)).unwrap();
        let fv = known_flat_vector(FlatFamily::Petrescu(unit(angle))).unwrap();
        ensure(fv.eigenvalue == Rational::new(1, 49).unwrap(), || format!("t={label}: expected value {}", fv.eigenvalue))?;
        let m = theta_dense(&h, 2, Variant::U).unwrap().q_scaled().unwrap();
        let r = eigen_residual(&m, &fv.vector, 1.0 / 49.0);
        worst = worst.max(r);
        ensure(r < EIGENPAIR_TOL, || format!("t={label}: residual {r:e}"))?;
    }
    let h = petrescu(unit(0.0)).unwrap();
    ensure(h.exact().is_some(), || "no exact entries at t=1".into())?;
    let (v, lambda) = known_flat_vector_exact(FlatFamily::Petrescu(unit(0.0)), 6).map_err(|e| e.to_string())?;
    let exact = exact_verify_eigenpair(&h, 2, &v, &lambda).map_err(|e| e.to_string())?;
    ensure(exact, || "exact verifier over Z[zeta_6] returned false".into())?;
    let rep = depth_evidence(&h, 2, DepthOpts::default()).map_err(|e| e.to_string())?;
    ensure(rep.status == DepthStatus::Certified, || format!("status {}", rep.status.name()))?;
    ensure(rep.candidate("1/49").is_some(), || "no 1/49 candidate".into())?;
    Ok(format!("residual {worst:.1e}; exact true; {}", rep.status.name()))
}

fn paley_case(q: u64, num: i64, den: i64, conductor: u32) -> Outcome {
    let start = Instant::now();
    let h = paley(PaleyKind::II, q).map_err(|e| e.to_string())?;
    let fv = known_flat_vector(FlatFamily::Paley2(q)).map_err(|e| e.to_string())?;
    let want = Rational::new(num, den).unwrap();
    ensure(fv.eigenvalue == want, || format!("q={q}: expected {want}, generator says {}", fv.eigenvalue))?;
    let m = theta_build(&h, 2, Variant::U, DEFAULT_DENSE_CAP).unwrap().q_scaled().unwrap();
    let r = eigen_residual(&m, &fv.vector, want.to_f64());
    ensure(r < EIGENPAIR_TOL, || format!("q={q}: residual {r:e}"))?;
    let (v, lambda) = known_flat_vector_exact(FlatFamily::Paley2(q), conductor).map_err(|e| e.to_string())?;
    ensure(exact_verify_eigenpair(&h, 2, &v, &lambda).map_err(|e| e.to_string())?, || format!("q={q}: exact false"))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!("q={q} ({want}) residual {r:.1e} in {:.1?}", start.elapsed()))
}

fn c4_paley() -> Outcome {
    let a = paley_case(5, 20, 9, 2)?;
    let b = paley_case(9, 144, 100, 2)?;
    Ok(format!("{a}; {b}"))
}

fn c5_finite_field() -> Outcome {
    for (p, m) in [(5u64, 1u32), (3, 2), (13, 1)] {
        let q = p.pow(m) as usize;
        let k = jacobsthal(&ff_make(p, m).unwrap()).map_err(|e| e.to_string())?;
        for i in 0..q {
            ensure(k[i].iter().map(|&x| x as i64).sum::<i64>() == 0, || format!("q={q}: K j != 0 at row {i}"))?;
            for j in 0..q {
                ensure(k[i][j] == k[j][i], || format!("q={q}: K not symmetric at ({i},{j})"))?;
                let sq: i64 = (0..q).map(|l| k[i][l] as i64 * k[l][j] as i64).sum();
                let want = if i == j { q as i64 - 1 } else { -1 };
                ensure(sq == want, || format!("q={q}: K^2[{i}][{j}] = {sq}, want {want}"))?;
            }
        }
    }
    Ok("q in {5, 9, 13}".into())
}

fn c6_irreducible() -> Outcome {
    for (name, h) in test_matrix() {
        let d = relcomm_dims(&h, 1, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).map_err(|e| e.to_string())?;
        ensure(d.dims == [1], || format!("{name}: d1 = {:?}", d.dims))?;
    }
    Ok(format!("{} matrices", test_matrix().len()))
}

fn c7_fourier_amenable() -> Outcome {
    for q in [2, 3, 5] {
        let d = relcomm_dims(&fourier(q).unwrap(), 2, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).map_err(|e| e.to_string())?;
        ensure(d.dims == [1, q], || format!("F{q}: dims {:?}", d.dims))?;
    }
    let a3 = PrincipalGraph::parse("* y\nx y\n").unwrap();
    let r = amenability_compare(&fourier(2).unwrap(), &a3, 3, SPECTRUM_TOL).map_err(|e| e.to_string())?;
    let theta: Vec<f64> = r.theta_spectrum.iter().map(|x| x.0).collect();
    ensure(theta.len() == 2 && theta[0].abs() < SPECTRUM_TOL && (theta[1] - 2.0).abs() < SPECTRUM_TOL, || {
        format!("union of Q theta spectra {theta:?}")
    })?;
    ensure(r.equal, || format!("graph {:?} vs theta {theta:?}", r.graph_spectrum))?;
    Ok("d2 = Q; F2 spectra {0, 2} = A3".into())
}

fn c8_variants() -> Outcome {
    let mut worst = 0.0f64;
    for (name, h) in [("Petrescu(i)", petrescu(unit(PI / 2.0)).unwrap()), ("F5", fourier(5).unwrap())] {
        let r = variant_spectra_check(&h, 2, SPECTRUM_TOL).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_distance.0);
        ensure(r.pass, || format!("{name}: distance {:e}", r.max_distance.0))?;
    }
    Ok(format!("max distance {worst:.1e}"))
}

fn c9_abelian() -> Outcome {
    let mut worst = 0.0f64;
    for (name, h) in test_matrix() {
        let r = abelianness_check(&h, DEFAULT_WINDOW, SPECTRUM_TOL).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_commutator.0);
        ensure(r.pass, || format!("{name}: commutator {:e}", r.max_commutator.0))?;
    }
    Ok(format!("max commutator {worst:.1e}"))
}

fn c10_hygiene() -> Outcome {
    let mut built = 0;
    let mut worst_imag = 0.0f64;
    for (name, h) in test_matrix() {
        let q = h.q();
        for n in 1..=3 {
            if q.pow(n as u32) > 343 {
                continue;
            }
            let op = theta_build(&h, n, Variant::U, DEFAULT_DENSE_CAP).map_err(|e| e.to_string())?;
            let m = op.dense().unwrap();
            built += 1;
            let herm = hermitian_defect(m);
            ensure(herm < HYGIENE_TOL, || format!("{name} n={n}: hermitian defect {herm:e}"))?;
            if n == 2 {
                let imag = m.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                let sym = (m - m.transpose()).camax();
                worst_imag = worst_imag.max(imag);
                ensure(imag < HYGIENE_TOL && sym < HYGIENE_TOL, || format!("{name}: level 2 not real symmetric"))?;
                let tr = m.trace();
                ensure((tr - q as f64).norm() < TRACE_TOL, || format!("{name}: trace {tr}"))?;
            }
            let vals = eig_hermitian(m).map_err(|e| e.to_string())?.eigenvalues;
            let (lo, hi) = (vals[0], vals[vals.len() - 1]);
            ensure(lo >= -RANGE_TOL && hi <= 1.0 + RANGE_TOL, || format!("{name} n={n}: spectrum in [{lo}, {hi}]"))?;
        }
    }
    Ok(format!("{built} operators self-adjoint, spectra in [0, 1], level 2 real symmetric"))
}

fn c11_temperley_lieb() -> Outcome {
    let d1 = relcomm_dims(&paley(PaleyKind::I, 11).unwrap(), 2, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).map_err(|e| e.to_string())?;
    ensure(d1.dims == [1, 2], || format!("Paley I q=11: dims {:?}", d1.dims))?;
    let d2 = relcomm_dims(&paley(PaleyKind::II, 5).unwrap(), 2, DEFAULT_WINDOW, DEFAULT_DENSE_CAP).map_err(|e| e.to_string())?;
    ensure(d2.dims == [1, 2], || format!("Paley II q=5: dims {:?}", d2.dims))?;
    Ok(format!("Paley I Q=12 d2 = {}; Paley II Q=12 d2 = {}", d1.dims[1], d2.dims[1]))
}

fn c12_sweep() -> Outcome {
    let start = Instant::now();
    let s = sweep_petrescu(16, 2, SweepOpts { tol: SPECTRUM_TOL, ..SweepOpts::default() }).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(300))?;
    ensure(s.rows.len() == 16, || format!("{} rows", s.rows.len()))?;
    ensure(s.one_over_49_everywhere, || {
        let missing: Vec<usize> = s.rows.iter().enumerate().filter(|(_, r)| !r.has_one_over_49).map(|(i, _)| i).collect();
        format!("1/49 missing at samples {missing:?}")
    })?;
    Ok(format!("16 samples in {:.1?}", start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("engine identity suite", c1_identity_suite),
        ("engine theta_2 = closed form", c2_closed_form),
        ("Petrescu eigenvalue 1/49", c3_petrescu),
        ("Paley II eigenvalues 20/9 and 36/25", c4_paley),
        ("Jacobsthal identities", c5_finite_field),
        ("irreducibility d1 = 1", c6_irreducible),
        ("Fourier d2 = Q and A3 spectra", c7_fourier_amenable),
        ("variant spectra agree", c8_variants),
        ("level-2 flat space abelian", c9_abelian),
        ("spectral hygiene", c10_hygiene),
        ("Temperley-Lieb 2-box spaces", c11_temperley_lieb),
        ("Petrescu 16-point sweep", c12_sweep),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
