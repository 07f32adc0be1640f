//! Per-instance check that the infinitesimal components are exactly the inner
//! cycles of walls, plus the vertex accounting for the reduced flow graph.

use super::{detect_walls, validate_wall, Wall, WallContext, WallError};
use crate::flowgraph::{self, FlowGraph};
use serde::Serialize;
use std::collections::BTreeSet;

/// Everything needed to reproduce a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub signature: String,
    pub reason: String,
    pub component: Option<Vec<usize>>,
    pub grid_trace: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub infinitesimal_count: usize,
    pub wall_count: usize,
    pub components_match_walls: bool,
    pub rooted_height_one_tree: bool,
    pub reduced_strongly_connected: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.components_match_walls && self.rooted_height_one_tree && self.reduced_strongly_connected
    }
}

fn trace(walls: &[Wall]) -> Vec<String> {
    walls
        .iter()
        .enumerate()
        .map(|(k, w)| {
            format!("wall {k}: width {} period {} twisted {} rows {:?}", w.width, w.period, w.twisted, w.grid)
        })
        .collect()
}

/// Runs the full check on the flow graph of `ctx.vt`.
pub fn verify_theorem(
    signature: &str,
    ctx: &WallContext,
) -> Result<(VerificationReport, Vec<Wall>, FlowGraph), WallError> {
    verify_with(signature, ctx, &flowgraph::build_flow_graph(ctx.vt))
}

/// Runs the check against an arbitrary graph on the same vertex set, so that
/// corrupted graphs can exercise the failure path.
pub fn verify_with(
    signature: &str,
    ctx: &WallContext,
    fg: &FlowGraph,
) -> Result<(VerificationReport, Vec<Wall>, FlowGraph), WallError> {
    let violation = |reason: String, component: Option<Vec<usize>>, walls: &[Wall]| {
        WallError::TheoremViolation(Box::new(Counterexample {
            signature: signature.to_string(),
            reason,
            component,
            grid_trace: trace(walls),
        }))
    };
    let cond = fg.scc();
    let walls = detect_walls(ctx, fg, &cond).map_err(|e| {
        let comp = match &e {
            WallError::UncoveredInfinitesimalComponent { component }
            | WallError::MalformedInfinitesimalComponent { component } => Some(component.clone()),
            _ => None,
        };
        violation(e.to_string(), comp, &[])
    })?;
    for w in &walls {
        validate_wall(ctx, w).map_err(|r| violation(format!("invalid wall: {r}"), None, &walls))?;
    }

    let mut components: Vec<BTreeSet<usize>> = cond
        .components
        .iter()
        .zip(&cond.infinitesimal)
        .filter(|(_, &inf)| inf)
        .map(|(c, _)| c.iter().copied().collect())
        .collect();
    let mut cycles: Vec<BTreeSet<usize>> = walls
        .iter()
        .flat_map(|w| w.distinct_infinitesimal_cycles())
        .map(|c| c.into_iter().collect())
        .collect();
    components.sort();
    cycles.sort();
    let matched = components == cycles;
    if !matched {
        let stray = components.iter().find(|c| !cycles.contains(c)).map(|c| c.iter().copied().collect());
        return Err(violation("infinitesimal components differ from wall cycles".into(), stray, &walls));
    }
    let tree = cond.is_rooted_height_one_tree();
    if !tree {
        return Err(violation("condensation is not a rooted tree of height one".into(), None, &walls));
    }
    let removed: BTreeSet<usize> = walls.iter().flat_map(|w| w.inner_vertices()).collect();
    let reduced = flowgraph::reduce(fg, &removed).map_err(|e| violation(e.to_string(), None, &walls))?;
    let report = VerificationReport {
        infinitesimal_count: cond.infinitesimal_count(),
        wall_count: walls.len(),
        components_match_walls: matched,
        rooted_height_one_tree: tree,
        reduced_strongly_connected: true,
    };
    Ok((report, walls, reduced))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Accounting {
    /// Vertices of the flow graph.
    pub n: usize,
    /// Vertices of the reduced flow graph.
    pub n_prime: usize,
    /// Largest wall width, 1 without walls.
    pub max_width: usize,
    /// Sum of `(w − 1)·h` over walls.
    pub removed: usize,
}

/// Checks `N − N′ = Σ(w − 1)·h` and `N ≤ N′·W`.
pub fn accounting(fg: &FlowGraph, reduced: &FlowGraph, walls: &[Wall]) -> Result<Accounting, WallError> {
    let a = Accounting {
        n: fg.vertex_count(),
        n_prime: reduced.vertex_count(),
        max_width: walls.iter().map(|w| w.width).max().unwrap_or(1),
        removed: walls.iter().map(|w| w.discarded()).sum(),
    };
    if a.n < a.n_prime || a.n - a.n_prime != a.removed || a.n > a.n_prime * a.max_width {
        return Err(WallError::AccountingMismatch { n: a.n, n_prime: a.n_prime, w: a.max_width, removed: a.removed });
    }
    Ok(a)
}
