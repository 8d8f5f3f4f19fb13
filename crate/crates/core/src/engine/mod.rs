//! State-sum evaluation of layered annular diagrams with a single input box.
//!
//! A cut through the diagram crosses `w` strands, which bound gaps `0..=w`.
//! Gap 0 and gap `w` are the same region (the one touching the marked point
//! of the box) seen from either side. Each shaded gap owns one tensor axis;
//! two gaps of the same region keep duplicate axes with the tensor supported
//! on their diagonal. Boxes of the positive kind have gap 0 unshaded, so slot
//! i of a level-n box is gap 2i+1.
//!
//! Layer semantics (spin on a shaded gap written s, t):
//! * `Cross(p)` on strands p, p+1. With gap p+1 shaded the spin s is replaced
//!   by a fresh t with weight `Q^(-1/2) W(s,t)`, `W = H` for `U` and `H*` for
//!   `UStar`. With gap p+1 unshaded the amplitude is multiplied by `V(a,c)`
//!   where a, c are the spins of gaps p and p+2, `V = H` for `U` and the
//!   entrywise conjugate for `UStar`.
//! * `Cup(p)` inserts a new arc in gap p. A shaded gap is split in two
//!   (factor `Q^(1/4)`); an unshaded gap gains a new shaded region with a free
//!   spin (factor `Q^(-1/4)`).
//! * `Cap(p)` joins strands p and p+1, or strands w-1 and 0 across the outer
//!   region when `p = w-1`. A closed shaded region has its spin summed
//!   (factor `Q^(-1/4)`); closing an unshaded region merges its two shaded
//!   neighbours with spin agreement (factor `Q^(1/4)`).
//!
//! The output is multiplied by `Q^((k_out - k_in)/4)`, k counting the shaded
//! boundary intervals of output and input, and by the diagram's global scale.

mod tensor;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::box_vector::{region_count, BoxVector};
use crate::error::{Result, SpinError};
use crate::hadamard::HadamardMatrix;
use crate::jsonfmt::F17;
use tensor::Tensor;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CrossKind {
    #[serde(rename = "U")]
    U,
    #[serde(rename = "USTAR")]
    UStar,
}

impl CrossKind {
    pub fn flip(self) -> Self {
        match self {
            CrossKind::U => CrossKind::UStar,
            CrossKind::UStar => CrossKind::U,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    Cross { pos: usize, kind: CrossKind },
    Cup { pos: usize },
    Cap { pos: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    pub q: usize,
    /// Level of the input box (its arity is twice this).
    pub input_level: usize,
    /// Shading of the input box's marked region.
    pub outer_shaded: bool,
    pub layers: Vec<Layer>,
    pub global_scale: f64,
}

impl Diagram {
    pub fn new(q: usize, input_level: usize, outer_shaded: bool, layers: Vec<Layer>) -> Self {
        Diagram { q, input_level, outer_shaded, layers, global_scale: 1.0 }
    }

    pub fn input_arity(&self) -> usize {
        2 * self.input_level
    }

    /// Gap shadings at every cut, input first; checks width consistency.
    pub fn cut_shadings(&self) -> Result<Vec<Vec<bool>>> {
        let mut sh = initial_shading(self.input_level, self.outer_shaded);
        let mut cuts = vec![sh.clone()];
        for (i, layer) in self.layers.iter().enumerate() {
            let w = sh.len() - 1;
            match *layer {
                Layer::Cross { pos, .. } => {
                    if pos + 1 >= w {
                        return Err(SpinError::Width(format!("layer {i}: CROSS at {pos} needs width > {}, have {w}", pos + 1)));
                    }
                }
                Layer::Cup { pos } => {
                    if pos > w {
                        return Err(SpinError::Width(format!("layer {i}: CUP at gap {pos} beyond width {w}")));
                    }
                    let new = if sh[pos] { [false, true] } else { [true, false] };
                    sh.splice(pos + 1..pos + 1, new);
                }
                Layer::Cap { pos } => {
                    if w < 2 || pos + 1 > w {
                        return Err(SpinError::Width(format!("layer {i}: CAP at {pos} needs width > {}, have {w}", pos + 1)));
                    }
                    if pos + 1 < w {
                        sh.drain(pos + 1..pos + 3);
                    } else {
                        sh = sh[1..w].to_vec();
                    }
                }
            }
            cuts.push(sh.clone());
        }
        Ok(cuts)
    }

    /// Arity of the output box.
    pub fn output_arity(&self) -> Result<usize> {
        Ok(self.cut_shadings()?.last().map_or(0, |s| s.len() - 1))
    }

    /// Shading of gap 0 at every cut.
    pub fn leftmost_shading(&self) -> Result<Vec<bool>> {
        Ok(self.cut_shadings()?.iter().map(|s| s[0]).collect())
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct LayerRepr {
            kind: &'static str,
            pos: usize,
            #[serde(skip_serializing_if = "Option::is_none")]
            u: Option<CrossKind>,
        }
        #[derive(Serialize)]
        struct Repr {
            q: usize,
            arity: usize,
            layers: Vec<LayerRepr>,
            outer_shaded: bool,
            global_scale: F17,
        }
        let layers = self
            .layers
            .iter()
            .map(|l| match *l {
                Layer::Cross { pos, kind } => LayerRepr { kind: "CROSS", pos, u: Some(kind) },
                Layer::Cup { pos } => LayerRepr { kind: "CUP", pos, u: None },
                Layer::Cap { pos } => LayerRepr { kind: "CAP", pos, u: None },
            })
            .collect();
        let r = Repr {
            q: self.q,
            arity: self.input_arity(),
            layers,
            outer_shaded: self.outer_shaded,
            global_scale: F17(self.global_scale),
        };
        serde_json::to_string(&r).expect("diagram serialization")
    }
}

fn initial_shading(level: usize, outer_shaded: bool) -> Vec<bool> {
    (0..=2 * level).map(|k| (k % 2 == 0) == outer_shaded).collect()
}

fn axis_of(sh: &[bool], gap: usize) -> usize {
    sh[..gap].iter().filter(|&&s| s).count()
}

/// Diagram bound to a matrix, with the crossing weight tables prepared.
pub struct Evaluator<'a> {
    diagram: &'a Diagram,
    w_u: Vec<C>,
    w_ustar: Vec<C>,
    v_u: Vec<C>,
    v_ustar: Vec<C>,
}

impl<'a> Evaluator<'a> {
    pub fn new(diagram: &'a Diagram, h: &HadamardMatrix) -> Result<Self> {
        if diagram.q != h.q() {
            return Err(SpinError::QMismatch { expected: diagram.q, got: h.q() });
        }
        diagram.cut_shadings()?;
        let q = h.q();
        let m = h.entries();
        let table = |f: &dyn Fn(usize, usize) -> C| -> Vec<C> {
            (0..q * q).map(|k| f(k / q, k % q)).collect()
        };
        Ok(Evaluator {
            diagram,
            w_u: table(&|s, t| m[(s, t)]),
            w_ustar: table(&|s, t| m[(t, s)].conj()),
            v_u: table(&|a, c| m[(a, c)]),
            v_ustar: table(&|a, c| m[(a, c)].conj()),
        })
    }

    pub fn apply(&self, x: &BoxVector) -> Result<BoxVector> {
        self.apply_counted(x).map(|(b, _)| b)
    }

    /// Result together with the number of scalar multiply-adds performed.
    pub fn apply_counted(&self, x: &BoxVector) -> Result<(BoxVector, u64)> {
        let d = self.diagram;
        if x.q != d.q {
            return Err(SpinError::QMismatch { expected: d.q, got: x.q });
        }
        if x.level != d.input_level || x.shaded != d.outer_shaded {
            return Err(SpinError::LevelMismatch { expected: d.input_level, got: x.level });
        }
        let q = d.q;
        let qf = q as f64;
        let n_in = d.input_level;
        let mut sh = initial_shading(n_in, d.outer_shaded);
        let mut t = Tensor::new(q, region_count(n_in, d.outer_shaded), x.coeffs.clone());
        if d.outer_shaded && n_in > 0 {
            t = t.append_copy_of_first();
        }

        for layer in &d.layers {
            let w = sh.len() - 1;
            match *layer {
                Layer::Cross { pos, kind } => {
                    let mid = pos + 1;
                    if sh[mid] {
                        let wt = match kind {
                            CrossKind::U => &self.w_u,
                            CrossKind::UStar => &self.w_ustar,
                        };
                        t = t.contract(axis_of(&sh, mid), wt).scale(qf.powf(-0.5));
                    } else {
                        let vt = match kind {
                            CrossKind::U => &self.v_u,
                            CrossKind::UStar => &self.v_ustar,
                        };
                        t = t.mul_pair(axis_of(&sh, pos), axis_of(&sh, pos + 2), vt);
                    }
                }
                Layer::Cup { pos } => {
                    if sh[pos] {
                        t = t.insert_copy(axis_of(&sh, pos)).scale(qf.powf(0.25));
                        sh.splice(pos + 1..pos + 1, [false, true]);
                    } else {
                        t = t.insert_free(axis_of(&sh, pos + 1)).scale(qf.powf(-0.25));
                        sh.splice(pos + 1..pos + 1, [true, false]);
                    }
                }
                Layer::Cap { pos } if pos + 1 < w => {
                    let mid = pos + 1;
                    if sh[mid] {
                        t = t.sum_axis(axis_of(&sh, mid)).scale(qf.powf(-0.25));
                    } else {
                        t = t.diagonal(axis_of(&sh, pos), axis_of(&sh, pos + 2)).scale(qf.powf(0.25));
                    }
                    sh.drain(pos + 1..pos + 3);
                    if sh.len() == 1 && sh[0] && t.rank == 2 {
                        t = t.diagonal(0, 1);
                    }
                }
                Layer::Cap { .. } => {
                    // closes strands w-1 and 0 around the outer region
                    if sh[0] {
                        let last = t.rank - 1;
                        t = t.diagonal(0, last).sum_axis(0).scale(qf.powf(-0.25));
                    } else {
                        t = t.mask_equal(axis_of(&sh, 1), axis_of(&sh, w - 1)).scale(qf.powf(0.25));
                    }
                    sh = sh[1..w].to_vec();
                    if sh.len() == 1 && sh[0] && t.rank == 2 {
                        t = t.diagonal(0, 1);
                    }
                }
            }
        }

        let n_out = (sh.len() - 1) / 2;
        let out_shaded = sh[0];
        if out_shaded && n_out > 0 {
            t = t.diagonal(0, t.rank - 1);
        }
        let k_in = region_count(n_in, d.outer_shaded) as f64;
        let k_out = region_count(n_out, out_shaded) as f64;
        let s = qf.powf((k_out - k_in) / 4.0) * d.global_scale;
        let t = t.scale(s);
        let cost = t.cost;
        Ok((BoxVector::with_shading(q, n_out, out_shaded, t.data)?, cost))
    }

    /// Matrix of the map on the standard basis, columns built in parallel.
    pub fn dense(&self) -> Result<DMatrix<C>> {
        let d = self.diagram;
        let dim_in = d.q.pow(region_count(d.input_level, d.outer_shaded) as u32);
        let cols: Vec<BoxVector> = (0..dim_in)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![C::new(0.0, 0.0); dim_in];
                e[j] = C::new(1.0, 0.0);
                self.apply(&BoxVector::with_shading(d.q, d.input_level, d.outer_shaded, e)?)
            })
            .collect::<Result<_>>()?;
        let dim_out = cols.first().map_or(0, |c| c.dim());
        Ok(DMatrix::from_fn(dim_out, dim_in, |i, j| cols[j].coeffs[i]))
    }
}

/// Evaluates the diagram on one box.
pub fn evaluate(d: &Diagram, x: &BoxVector, h: &HadamardMatrix) -> Result<BoxVector> {
    Evaluator::new(d, h)?.apply(x)
}

/// As [`evaluate`], also returning the multiply-add count.
pub fn evaluate_counted(d: &Diagram, x: &BoxVector, h: &HadamardMatrix) -> Result<(BoxVector, u64)> {
    Evaluator::new(d, h)?.apply_counted(x)
}

/// Two concentric loops crossing all 2n legs of a level-n box, inner loop
/// crossings alternating U, U*, ... and the outer loop the reverse, scaled
/// by 1/Q so the unit box is fixed.
pub fn theta_diagram(q: usize, n: usize) -> Result<Diagram> {
    if n < 1 {
        return Err(SpinError::InvalidArgument("angle diagram needs level n >= 1".into()));
    }
    let mut layers = Vec::with_capacity(2 * (2 * n + 2));
    for first in [CrossKind::U, CrossKind::UStar] {
        layers.push(Layer::Cup { pos: 0 });
        let mut kind = first;
        for pos in 1..=2 * n {
            layers.push(Layer::Cross { pos, kind });
            kind = kind.flip();
        }
        layers.push(Layer::Cap { pos: 2 * n + 1 });
    }
    Ok(Diagram { q, input_level: n, outer_shaded: false, layers, global_scale: 1.0 / q as f64 })
}

/// Closes a level-n box into a scalar with nested caps around the middle gap.
pub fn closure_diagram(q: usize, n: usize) -> Diagram {
    let layers = (0..n).rev().map(|pos| Layer::Cap { pos }).collect();
    Diagram::new(q, n, false, layers)
}

/// Normalized trace, `tr(1) = 1`.
pub fn trace(x: &BoxVector, h: &HadamardMatrix) -> Result<C> {
    let d = closure_diagram(x.q, x.level);
    let v = evaluate(&d, x, h)?;
    Ok(v.coeffs[0] * (x.q as f64).powf(-(x.level as f64) / 2.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub residual: F17,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub q: usize,
    pub tol: F17,
    pub all_pass: bool,
    pub checks: Vec<SuiteCheck>,
}

pub const SUITE_TOL: f64 = 1e-10;

/// The Q = 5 product example: x = e0 (x) e1 and y = e1 (x) e2 multiplied as
/// a single level-4 box, giving `Q^(-1/2) sum_d e0 (x) ed (x) e2`.
pub fn worked_example_residual() -> Result<f64> {
    let q = 5;
    let h = crate::hadamard::fourier(q)?;
    let z = BoxVector::basis(q, 4, BoxVector::flat_index(q, &[0, 1, 1, 2]));
    let d = Diagram::new(q, 4, false, vec![Layer::Cap { pos: 3 }, Layer::Cap { pos: 2 }, Layer::Cup { pos: 2 }]);
    let out = evaluate(&d, &z, &h)?;
    let mut want = BoxVector::zeros(q, 3);
    for m in 0..q {
        want.coeffs[BoxVector::flat_index(q, &[0, m, 2])] = C::new(1.0 / (q as f64).sqrt(), 0.0);
    }
    Ok(out.dist_inf(&want))
}

/// Runs every convention-pinning identity against `h`.
pub fn run_identity_suite(h: &HadamardMatrix) -> Result<SuiteReport> {
    let q = h.q();
    let sqrt_q = (q as f64).sqrt();
    let mut checks = Vec::new();
    let mut push = |name: &str, residual: f64| {
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        checks.push(SuiteCheck { name: name.into(), residual: F17(residual), pass: residual < SUITE_TOL });
    };

    let shaded_loop = Diagram::new(q, 0, false, vec![Layer::Cup { pos: 0 }, Layer::Cap { pos: 0 }]);
    let v = evaluate(&shaded_loop, &BoxVector::new(q, 0, vec![C::new(1.0, 0.0)])?, h)?;
    push("shaded loop = sqrt(Q)", (v.coeffs[0] - sqrt_q).norm());

    let unshaded_loop = Diagram::new(q, 0, true, vec![Layer::Cup { pos: 0 }, Layer::Cap { pos: 0 }]);
    let x = BoxVector::with_shading(q, 0, true, (0..q).map(|i| C::new(1.0 + i as f64, 0.5 - i as f64)).collect())?;
    let v = evaluate(&unshaded_loop, &x, h)?;
    push("unshaded loop = sqrt(Q)", v.dist_inf(&x.scale(C::new(sqrt_q, 0.0))));

    for (pos, region) in [(0, "shaded"), (1, "unshaded")] {
        for (k1, k2) in [(CrossKind::U, CrossKind::UStar), (CrossKind::UStar, CrossKind::U)] {
            let d = Diagram::new(
                q,
                2,
                false,
                vec![Layer::Cross { pos, kind: k1 }, Layer::Cross { pos, kind: k2 }],
            );
            let m = Evaluator::new(&d, h)?.dense()?;
            let res = (m - DMatrix::<C>::identity(q * q, q * q)).camax();
            let names = |k: CrossKind| if k == CrossKind::U { "u" } else { "u*" };
            push(&format!("reidemeister II, {region} middle, {} then {}", names(k1), names(k2)), res);
        }
    }

    push("Q=5 product example", worked_example_residual()?);

    for n in 1..=3 {
        let tr = trace(&BoxVector::identity(q, n), h)?;
        push(&format!("tr(1) = 1 at level {n}"), (tr - 1.0).norm());
    }

    for n in 1..=3 {
        let id = BoxVector::identity(q, n);
        let out = evaluate(&theta_diagram(q, n)?, &id, h)?;
        push(&format!("theta(1) = 1 at level {n}"), out.dist_inf(&id));
    }

    let eng = Evaluator::new(&theta_diagram(q, 2)?, h)?.dense()?;
    let closed = crate::angle::theta2_matrix(h);
    push("level-2 engine = closed form", (eng - closed).camax());

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { q, tol: F17(SUITE_TOL), all_pass, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::{fourier, petrescu};
    use proptest::prelude::*;

    #[test]
    fn width_errors() {
        let d = Diagram::new(3, 1, false, vec![Layer::Cross { pos: 1, kind: CrossKind::U }]);
        assert!(matches!(d.cut_shadings(), Err(SpinError::Width(_))));
        let d = Diagram::new(3, 1, false, vec![Layer::Cap { pos: 0 }, Layer::Cap { pos: 0 }]);
        assert!(d.cut_shadings().is_err());
        let h = fourier(4).unwrap();
        let d = theta_diagram(3, 1).unwrap();
        assert!(matches!(evaluate(&d, &BoxVector::zeros(3, 1), &h), Err(SpinError::QMismatch { .. })));
        let h3 = fourier(3).unwrap();
        assert!(matches!(evaluate(&d, &BoxVector::zeros(3, 2), &h3), Err(SpinError::LevelMismatch { .. })));
        assert!(theta_diagram(3, 0).is_err());
    }

    #[test]
    fn theta_diagram_shape() {
        let d = theta_diagram(2, 2).unwrap();
        assert_eq!(d.output_arity().unwrap(), 4);
        assert_eq!(d.layers.len(), 12);
        let left = d.leftmost_shading().unwrap();
        assert!(!left[0] && !left[12]);
        assert!(left[6], "marked region shaded between the two loops");
        let js = d.to_json();
        assert!(js.starts_with(r#"{"q":2,"arity":4,"layers":[{"kind":"CUP","pos":0},{"kind":"CROSS","pos":1,"u":"U"}"#), "{js}");
    }

    #[test]
    fn loops_and_worked_example() {
        assert!(worked_example_residual().unwrap() < 1e-12);
        let h = fourier(3).unwrap();
        let d = Diagram::new(3, 0, false, vec![Layer::Cup { pos: 0 }, Layer::Cap { pos: 0 }]);
        let v = evaluate(&d, &BoxVector::new(3, 0, vec![C::new(1.0, 0.0)]).unwrap(), &h).unwrap();
        assert!((v.coeffs[0] - 3f64.sqrt()).norm() < 1e-14);
    }

    #[test]
    fn suite_passes_for_fourier_and_petrescu() {
        for h in [fourier(3).unwrap(), petrescu(Complex64::from_polar(1.0, 0.3)).unwrap()] {
            let r = run_identity_suite(&h).unwrap();
            assert!(r.all_pass, "{r:?}");
        }
    }

    #[test]
    fn broken_matrix_fails_reidemeister() {
        let h = fourier(3).unwrap().with_entry_unchecked(1, 1, C::new(0.0, 0.0));
        let r = run_identity_suite(&h).unwrap();
        assert!(!r.all_pass);
        assert!(r.checks.iter().any(|c| c.name.starts_with("reidemeister") && !c.pass));
    }

    #[test]
    fn deterministic_bits() {
        let h = petrescu(Complex64::from_polar(1.0, 0.7)).unwrap();
        let d = theta_diagram(7, 2).unwrap();
        let x = BoxVector::new(7, 2, (0..49).map(|i| C::new((i as f64).sin(), (i as f64).cos())).collect()).unwrap();
        let a = evaluate(&d, &x, &h).unwrap();
        let b = evaluate(&d, &x, &h).unwrap();
        assert!(a.coeffs.iter().zip(&b.coeffs).all(|(u, v)| u.re.to_bits() == v.re.to_bits() && u.im.to_bits() == v.im.to_bits()));
    }

    #[test]
    fn cost_scales_like_model() {
        let cost = |q: usize| {
            let h = fourier(q).unwrap();
            let x = BoxVector::basis(q, 2, 1);
            evaluate_counted(&theta_diagram(q, 2).unwrap(), &x, &h).unwrap().1 as f64
        };
        // model n * Q^(n+3) at n = 2
        let model = (5.0f64 / 3.0).powi(5);
        let measured = cost(5) / cost(3);
        assert!(measured >= model / 3.0 && measured <= model * 3.0, "measured {measured}, model {model}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn evaluation_is_linear(
            xs in prop::collection::vec(-1.0f64..1.0, 18),
            ys in prop::collection::vec(-1.0f64..1.0, 18),
            a in (-1.0f64..1.0, -1.0f64..1.0),
            b in (-1.0f64..1.0, -1.0f64..1.0),
        ) {
            let h = petrescu(Complex64::from_polar(1.0, 0.7)).unwrap();
            let h3 = fourier(3).unwrap();
            let d = theta_diagram(3, 2).unwrap();
            let x = BoxVector::new(3, 2, xs.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()).unwrap();
            let y = BoxVector::new(3, 2, ys.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()).unwrap();
            let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
            let lhs = evaluate(&d, &x.combine(a, &y, b).unwrap(), &h3).unwrap();
            let rhs = evaluate(&d, &x, &h3).unwrap().combine(a, &evaluate(&d, &y, &h3).unwrap(), b).unwrap();
            prop_assert!(lhs.dist_inf(&rhs) < 1e-12);
            let d7 = Diagram::new(7, 1, false, vec![Layer::Cup { pos: 1 }, Layer::Cross { pos: 1, kind: CrossKind::U }, Layer::Cap { pos: 0 }]);
            let x7 = BoxVector::new(7, 1, (0..7).map(|i| Complex64::new(xs[i], ys[i])).collect()).unwrap();
            let y7 = BoxVector::new(7, 1, (0..7).map(|i| Complex64::new(ys[i + 7], xs[i + 7])).collect()).unwrap();
            let lhs = evaluate(&d7, &x7.combine(a, &y7, b).unwrap(), &h).unwrap();
            let rhs = evaluate(&d7, &x7, &h).unwrap().combine(a, &evaluate(&d7, &y7, &h).unwrap(), b).unwrap();
            prop_assert!(lhs.dist_inf(&rhs) < 1e-12);
        }
    }
}
