//! Principal-graph input and the spectral comparison with Q*theta.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::q_theta_spectrum;
use crate::angle::{Variant, DEFAULT_DENSE_CAP};
use crate::error::{Result, SpinError};
use crate::hadamard::HadamardMatrix;
use crate::jsonfmt::F17;
use crate::spectral::eig_hermitian;

pub const DISTINGUISHED: &str = "*";

/// Connected bipartite graph; even vertex 0 is `*`. Parallel edges count
/// with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalGraph {
    pub even: Vec<String>,
    pub odd: Vec<String>,
    /// (even index, odd index), one entry per edge.
    pub edges: Vec<(usize, usize)>,
}

impl PrincipalGraph {
    /// Parses lines `even_label odd_label`; blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut even: Vec<String> = vec![DISTINGUISHED.to_string()];
        let mut odd: Vec<String> = Vec::new();
        let mut even_ix: HashMap<String, usize> = HashMap::from([(DISTINGUISHED.to_string(), 0)]);
        let mut odd_ix: HashMap<String, usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut seen_star = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [e, o] = parts[..] else {
                return Err(SpinError::Graph(format!("line {}: expected `even odd`, got {line:?}", lineno + 1)));
            };
            if o == DISTINGUISHED {
                return Err(SpinError::Graph(format!("line {}: `*` must be an even vertex", lineno + 1)));
            }
            seen_star |= e == DISTINGUISHED;
            let ei = *even_ix.entry(e.to_string()).or_insert_with(|| {
                even.push(e.to_string());
                even.len() - 1
            });
            let oi = *odd_ix.entry(o.to_string()).or_insert_with(|| {
                odd.push(o.to_string());
                odd.len() - 1
            });
            edges.push((ei, oi));
        }
        if !seen_star {
            return Err(SpinError::Graph("no edge at the distinguished vertex `*`".into()));
        }
        if let Some(both) = even.iter().find(|l| odd_ix.contains_key(*l)) {
            return Err(SpinError::Graph(format!("label {both:?} appears on both sides")));
        }
        let g = PrincipalGraph { even, odd, edges };
        g.check_connected()?;
        Ok(g)
    }

    fn check_connected(&self) -> Result<()> {
        let ne = self.even.len();
        let total = ne + self.odd.len();
        let mut adj = vec![Vec::new(); total];
        for &(e, o) in &self.edges {
            adj[e].push(ne + o);
            adj[ne + o].push(e);
        }
        let mut seen = vec![false; total];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        match seen.iter().position(|s| !s) {
            None => Ok(()),
            Some(i) => {
                let label = if i < ne { &self.even[i] } else { &self.odd[i - ne] };
                Err(SpinError::Graph(format!("graph is disconnected: {label:?} is unreachable from `*`")))
            }
        }
    }

    /// Even-by-odd adjacency counts.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.even.len(), self.odd.len());
        for &(e, o) in &self.edges {
            g[(e, o)] += 1.0;
        }
        g
    }
}

/// Ascending spectrum of the even-side Gram matrix `G G^T`.
pub fn graph_gram_spectrum(g: &PrincipalGraph) -> Result<Vec<f64>> {
    let a = g.adjacency();
    let gram = (&a * a.transpose()).map(|x| Complex64::new(x, 0.0));
    Ok(eig_hermitian(&gram)?.eigenvalues)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphSpectrum {
    pub even: Vec<String>,
    pub odd: Vec<String>,
    pub edges: usize,
    /// Ascending eigenvalues of `G G^T`.
    pub eigenvalues: Vec<F17>,
}

impl GraphSpectrum {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

pub fn graph_spectrum_report(g: &PrincipalGraph) -> Result<GraphSpectrum> {
    Ok(GraphSpectrum {
        even: g.even.clone(),
        odd: g.odd.clone(),
        edges: g.edges.len(),
        eigenvalues: graph_gram_spectrum(g)?.into_iter().map(F17).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmenabilityReport {
    pub max_level: usize,
    pub tol: F17,
    pub graph_spectrum: Vec<F17>,
    /// Union over levels of the Q*theta spectra, clustered at `tol`.
    pub theta_spectrum: Vec<F17>,
    /// Per graph eigenvalue, the distance to the nearest Q*theta eigenvalue.
    pub forward_distances: Vec<F17>,
    /// Per Q*theta eigenvalue, the distance to the nearest graph eigenvalue.
    pub reverse_distances: Vec<F17>,
    pub subset: bool,
    pub equal: bool,
}

impl AmenabilityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization")
    }
}

fn nearest(x: f64, set: &[f64]) -> f64 {
    set.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min)
}

/// Distances between the graph spectrum and the union of Q*theta spectra
/// over levels 1..=max_level, in both directions.
pub fn amenability_compare(h: &HadamardMatrix, g: &PrincipalGraph, max_level: usize, tol: f64) -> Result<AmenabilityReport> {
    if max_level < 1 {
        return Err(SpinError::InvalidArgument("max level must be at least 1".into()));
    }
    let gs = graph_gram_spectrum(g)?;
    let mut all: Vec<f64> = Vec::new();
    for n in 1..=max_level {
        all.extend(q_theta_spectrum(h, n, Variant::U, DEFAULT_DENSE_CAP)?.eigenvalues);
    }
    all.sort_by(f64::total_cmp);
    let theta: Vec<f64> = crate::spectral::clusters(&all, tol).into_iter().map(|c| c.0).collect();
    let forward: Vec<f64> = gs.iter().map(|&x| nearest(x, &theta)).collect();
    let reverse: Vec<f64> = theta.iter().map(|&x| nearest(x, &gs)).collect();
    let subset = forward.iter().all(|&d| d <= tol);
    let equal = subset && reverse.iter().all(|&d| d <= tol);
    let f = |v: &[f64]| v.iter().map(|&x| F17(x)).collect();
    Ok(AmenabilityReport {
        max_level,
        tol: F17(tol),
        graph_spectrum: f(&gs),
        theta_spectrum: f(&theta),
        forward_distances: f(&forward),
        reverse_distances: f(&reverse),
        subset,
        equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hadamard::fourier;

    const A3: &str = "* y\nx y\n";

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn a3_spectrum() {
        let g = PrincipalGraph::parse(A3).unwrap();
        assert_eq!(g.even, vec!["*", "x"]);
        assert!(close(&graph_gram_spectrum(&g).unwrap(), &[0.0, 2.0]));
    }

    #[test]
    fn single_edge_and_star() {
        assert!(close(&graph_gram_spectrum(&PrincipalGraph::parse("* y").unwrap()).unwrap(), &[1.0]));
        let star: String = (0..5).map(|i| format!("* leaf{i}\n")).collect();
        assert!(close(&graph_gram_spectrum(&PrincipalGraph::parse(&star).unwrap()).unwrap(), &[5.0]));
    }

    #[test]
    fn spectrum_report_json() {
        let r = graph_spectrum_report(&PrincipalGraph::parse(A3).unwrap()).unwrap();
        assert_eq!(r.edges, 2);
        assert!(r.to_json().starts_with(r#"{"even":["*","x"],"odd":["y"],"edges":2,"eigenvalues":["#));
    }

    #[test]
    fn parallel_edges_count() {
        let g = PrincipalGraph::parse("* y\n* y\n").unwrap();
        assert!(close(&graph_gram_spectrum(&g).unwrap(), &[4.0]));
    }

    #[test]
    fn rejects_malformed_graphs() {
        for bad in ["* y\na b\n", "x y\n", "y *\n", "* y\ny z\n", "* y z\n", ""] {
            assert!(matches!(PrincipalGraph::parse(bad), Err(SpinError::Graph(_))), "{bad:?}");
        }
        assert!(PrincipalGraph::parse("# comment\n\n* y  # trailing\n").is_ok());
    }

    #[test]
    fn f2_matches_a3() {
        let g = PrincipalGraph::parse(A3).unwrap();
        for max_level in 2..=3 {
            let r = amenability_compare(&fourier(2).unwrap(), &g, max_level, 1e-8).unwrap();
            assert!(r.subset && r.equal, "{r:?}");
        }
    }

    #[test]
    fn f3_against_single_edge_fails() {
        let g = PrincipalGraph::parse("* y").unwrap();
        let r = amenability_compare(&fourier(3).unwrap(), &g, 2, 1e-8).unwrap();
        assert!(!r.subset);
        assert!((r.forward_distances[0].0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn star_q_always_matched() {
        let star: String = (0..3).map(|i| format!("* v{i}\n")).collect();
        let g = PrincipalGraph::parse(&star).unwrap();
        let r = amenability_compare(&fourier(3).unwrap(), &g, 1, 1e-8).unwrap();
        assert!(r.subset);
    }
}
