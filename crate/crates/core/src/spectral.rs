//! Adjacency matrices of flow graphs, Perron–Frobenius data, and the closed
//! form bounds on layered triangulations and wall widths.

use crate::flowgraph::FlowGraph;
use serde::Serialize;
use thiserror::Error;

pub const TOLERANCE: f64 = 1e-10;
pub const ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not irreducible")]
    NotIrreducible,
    #[error("power iteration stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("{0}")]
    DomainError(String),
    #[error("missing input: {0}")]
    MissingInput(String),
}

/// `entries[w][v]` counts the edges `v → w`, indexed by vertex position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjacencyMatrix {
    pub n: usize,
    pub labels: Vec<usize>,
    pub entries: Vec<Vec<u32>>,
    pub irreducible: bool,
}

impl AdjacencyMatrix {
    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    fn apply(&self, x: &[f64], transpose: bool) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a != 0 {
                    if transpose {
                        y[j] += a as f64 * x[i];
                    } else {
                        y[i] += a as f64 * x[j];
                    }
                }
            }
        }
        y
    }
}

/// Builds the matrix and decides irreducibility from reachability in the
/// matrix itself, independently of the graph's SCC routine.
pub fn adjacency(fg: &FlowGraph) -> AdjacencyMatrix {
    let n = fg.vertex_count();
    let mut entries = vec![vec![0u32; n]; n];
    for e in &fg.edges {
        let (v, w) = (fg.index_of(e.source).unwrap(), fg.index_of(e.target).unwrap());
        entries[w][v] += 1;
    }
    let reach_all = |transpose: bool| {
        if n == 0 {
            return false;
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let a = if transpose { entries[i][j] } else { entries[j][i] };
                if a > 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.iter().all(|&s| s)
    };
    let irreducible = reach_all(false) && reach_all(true);
    AdjacencyMatrix { n, labels: fg.vertices.clone(), entries, irreducible }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronData {
    pub lambda: f64,
    /// `A·w = λ·w`, scaled to maximum entry 1.
    pub right_vec: Vec<f64>,
    /// `Aᵀ·w′ = λ·w′`, scaled to maximum entry 1.
    pub left_vec: Vec<f64>,
    pub iterations: usize,
    /// Largest of the two sup-norm residuals.
    pub residual: f64,
}

fn normalize(x: &mut [f64]) {
    let m = x.iter().cloned().fold(0.0, f64::max);
    x.iter_mut().for_each(|v| *v /= m);
}

/// Power iteration for one side. Iterating with `A + I` keeps the iteration
/// convergent when `A` is irreducible but periodic.
fn power(mat: &AdjacencyMatrix, transpose: bool) -> Result<(f64, Vec<f64>, usize, f64), SpectralError> {
    let n = mat.n;
    let mut x = vec![1.0; n];
    let residual_of = |x: &[f64]| {
        let ax = mat.apply(x, transpose);
        let lambda = ax.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() / x.iter().map(|b| b * b).sum::<f64>();
        let r = ax.iter().zip(x).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max);
        (lambda, r)
    };
    let mut iterations = 0;
    let (mut lambda, mut residual) = residual_of(&x);
    while residual >= TOLERANCE {
        if iterations >= ITERATION_CAP {
            return Err(SpectralError::NoConvergence { iterations, residual });
        }
        let ax = mat.apply(&x, transpose);
        x = ax.iter().zip(&x).map(|(a, b)| a + b).collect();
        normalize(&mut x);
        iterations += 1;
        (lambda, residual) = residual_of(&x);
    }
    // Polish: keep iterating while the residual still shrinks.
    for _ in 0..1000 {
        let ax = mat.apply(&x, transpose);
        let mut y: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a + b).collect();
        normalize(&mut y);
        let (l, r) = residual_of(&y);
        if r >= residual {
            break;
        }
        (x, lambda, residual) = (y, l, r);
        iterations += 1;
        if residual == 0.0 {
            break;
        }
    }
    normalize(&mut x);
    Ok((lambda, x, iterations, residual))
}

/// Perron eigenvalue and both positive eigenvectors.
pub fn perron(mat: &AdjacencyMatrix) -> Result<PerronData, SpectralError> {
    if !mat.irreducible {
        return Err(SpectralError::NotIrreducible);
    }
    let (lambda, right_vec, i1, r1) = power(mat, false)?;
    let (_, left_vec, i2, r2) = power(mat, true)?;
    Ok(PerronData { lambda, right_vec, left_vec, iterations: i1 + i2, residual: r1.max(r2) })
}

/// Upper bound on the number of tetrahedra of a layered veering triangulation
/// of a monodromy with normalized dilatation at most `p`:
/// `(P⁹ − 1)/2 · (2 ln P⁹ / ln(2P⁻⁹ + 1) − 1)`.
///
/// The closed form dips slightly below zero for `1 < P < 1.0478` (minimum
/// about −0.067 near `P = 1.0264`) and increases from there on.
pub fn bound(p: f64) -> Result<f64, SpectralError> {
    if p.is_nan() || p < 1.0 || p.is_infinite() {
        return Err(SpectralError::DomainError(format!("P must be a finite number at least 1, got {p}")));
    }
    let p9 = p.powi(9);
    Ok((p9 - 1.0) / 2.0 * (2.0 * p9.ln() / (2.0 / p9).ln_1p() - 1.0))
}

/// `bound(P)` divided by its leading term `(9/2)·P¹⁸·ln P`.
pub fn bound_asymptote_ratio(p: f64) -> Result<f64, SpectralError> {
    let b = bound(p)?;
    Ok(b / (4.5 * p.powi(18) * p.ln()))
}

/// Dilatation and layering edge counts for the wall-width inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WallBoundInput {
    pub lambda: f64,
    pub e: u32,
    pub e_prime: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WallBoundReport {
    pub max_width: usize,
    /// With no walls the inequality holds for any input.
    pub vacuous: bool,
    /// `2 ln(λ^e) / ln(2λ^(−e′) + 1) − 1`, when inputs were given.
    pub right_side: Option<f64>,
    pub holds: Option<bool>,
}

/// Evaluates `W ≤ 2 ln(λ^e)/ln(2λ^(−e′) + 1) − 1`. The inputs come from
/// outside; with `check` unset and no input only `W` is reported.
pub fn wall_width_bound_check(
    max_width: usize,
    input: Option<WallBoundInput>,
    check: bool,
) -> Result<WallBoundReport, SpectralError> {
    let vacuous = max_width <= 1;
    let Some(inp) = input else {
        if check {
            return Err(SpectralError::MissingInput("the check needs λ, e and e′".into()));
        }
        return Ok(WallBoundReport { max_width, vacuous, right_side: None, holds: None });
    };
    if inp.lambda.is_nan() || inp.lambda <= 1.0 || inp.e == 0 || inp.e_prime == 0 {
        return Err(SpectralError::DomainError("need λ > 1 and e, e′ ≥ 1".into()));
    }
    let num = 2.0 * inp.e as f64 * inp.lambda.ln();
    let den = (2.0 * inp.lambda.powf(-(inp.e_prime as f64))).ln_1p();
    let rhs = num / den - 1.0;
    Ok(WallBoundReport { max_width, vacuous, right_side: Some(rhs), holds: Some(max_width as f64 <= rhs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flowgraph::build_flow_graph;
    use crate::triangulation::VeeringTriangulation;

    fn matrix(rows: Vec<Vec<u32>>) -> AdjacencyMatrix {
        let n = rows.len();
        let mut arcs = Vec::new();
        for (w, r) in rows.iter().enumerate() {
            for (v, &a) in r.iter().enumerate() {
                arcs.extend(std::iter::repeat_n((v, w), a as usize));
            }
        }
        let m = adjacency(&FlowGraph::from_arcs(n, &arcs));
        assert_eq!(m.entries, rows);
        m
    }

    #[test]
    fn one_by_one() {
        let p = perron(&matrix(vec![vec![3]])).unwrap();
        assert!((p.lambda - 3.0).abs() < 1e-12);
        assert_eq!(p.right_vec, vec![1.0]);
        assert_eq!(p.left_vec, vec![1.0]);
    }

    #[test]
    fn smallest_example_rows_sum_to_three() {
        let vt = VeeringTriangulation::from_signature("cPcbbbdxm_10", false).unwrap();
        let m = adjacency(&build_flow_graph(&vt));
        assert_eq!(m.n, 2);
        assert!(m.row_sums().iter().all(|&s| s == 3));
    }

    #[test]
    fn periodic_matrix_converges() {
        // A permutation matrix is irreducible with period 2.
        let p = perron(&matrix(vec![vec![0, 1], vec![1, 0]])).unwrap();
        assert!((p.lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reducible_matrix_is_rejected() {
        assert_eq!(perron(&matrix(vec![vec![1, 0], vec![1, 1]])), Err(SpectralError::NotIrreducible));
    }

    #[test]
    fn bound_values() {
        assert_eq!(bound(1.0).unwrap(), 0.0);
        assert!((bound(2f64.powf(1.0 / 9.0)).unwrap() - 0.5).abs() < 1e-12);
        let r = bound_asymptote_ratio(1000.0).unwrap();
        assert!((0.95..=1.05).contains(&r), "{r}");
        assert!(matches!(bound(0.5), Err(SpectralError::DomainError(_))));
        assert!(bound(f64::NAN).is_err());
    }

    #[test]
    fn bound_is_increasing_past_its_dip() {
        assert!(bound(1.02).unwrap() < 0.0);
        assert!(bound(1.05).unwrap() > 0.0);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=2000 {
            let b = bound(1.027 + k as f64 * 0.002).unwrap();
            assert!(b > prev);
            prev = b;
        }
    }

    #[test]
    fn bound_does_not_depend_on_log_base() {
        for p in [1.1, 1.5, 3.0] {
            let p9: f64 = f64::powi(p, 9);
            let base10 = (p9 - 1.0) / 2.0 * (2.0 * p9.log10() / (2.0 / p9 + 1.0).log10() - 1.0);
            assert!((bound(p).unwrap() - base10).abs() < 1e-9 * base10.abs().max(1.0));
        }
    }

    #[test]
    fn wall_bound_inputs() {
        assert!(wall_width_bound_check(1, None, false).unwrap().vacuous);
        assert!(matches!(wall_width_bound_check(3, None, true), Err(SpectralError::MissingInput(_))));
        let r = wall_width_bound_check(3, Some(WallBoundInput { lambda: 2.0, e: 9, e_prime: 9 }), true).unwrap();
        assert!(r.right_side.unwrap() > 3.0);
        assert_eq!(r.holds, Some(true));
        let mut prev = f64::INFINITY;
        for e_prime in 1..20 {
            let inp = WallBoundInput { lambda: 2.0, e: 9, e_prime };
            let rhs = wall_width_bound_check(3, Some(inp), true).unwrap().right_side.unwrap();
            assert!(rhs > prev || prev == f64::INFINITY);
            prev = rhs;
        }
    }
}
