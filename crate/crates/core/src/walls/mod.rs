//! Walls: periodic grids of tetrahedra whose inner rows carry the infinitesimal
//! cycles of the flow graph.
//!
//! Rows are numbered `1..=w+1` in the documentation and stored 0-based in
//! [`Wall::grid`]. For an inner row `i`, the bottom edge of `t[i][j]` is the
//! top edge of `t[i][j+1]`, and it is a side edge of exactly two tetrahedra:
//! `t[i-1][j']` and `t[i+1][j']` with `j' = j` for odd `i`, `j + 1` for even `i`.

pub mod oracle;
pub mod regions;
pub mod tiling;
mod verify;

pub use verify::{accounting, verify_theorem, verify_with, Accounting, Counterexample, VerificationReport};

use crate::flowgraph::{Condensation, FlowGraph};
use crate::triangulation::{EdgeStack, VeeringTriangulation};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WallError {
    #[error("infinitesimal component {component:?} is not covered by any wall")]
    UncoveredInfinitesimalComponent { component: Vec<usize> },
    #[error("infinitesimal component {component:?} is not a simple outdegree-one cycle")]
    MalformedInfinitesimalComponent { component: Vec<usize> },
    #[error("theorem violated: {}", .0.reason)]
    TheoremViolation(Box<Counterexample>),
    #[error("unclassifiable region: {0}")]
    UnclassifiableRegion(String),
    #[error("wall accounting mismatch: N={n}, N'={n_prime}, W={w}, removed={removed}")]
    AccountingMismatch { n: usize, n_prime: usize, w: usize, removed: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Wall {
    /// `grid[i][j]` is the tetrahedron in row `i + 1`, column `j`.
    pub grid: Vec<Vec<usize>>,
    pub width: usize,
    /// Minimal period of the grid.
    pub period: usize,
    pub twisted: bool,
    /// Whether going once around the wall exchanges its two sides, so that
    /// rows `i` and `w + 2 − i` carry one cycle traversed half a period apart.
    /// Implies `twisted`; the converse fails when both side tetrahedra of the
    /// inner edges coincide.
    pub mobius: bool,
    /// Bottom edges of rows `2..=w`, one period of each row's own cycle.
    pub infinitesimal_cycles: Vec<Vec<usize>>,
    /// Bottom edges of rows 1 and `w + 1`.
    pub boundary_cycles: [Vec<usize>; 2],
    pub maximal: bool,
}

impl Wall {
    /// Inner cycles with the twisted identification applied, ordered by first vertex.
    pub fn distinct_infinitesimal_cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.infinitesimal_cycles {
            let key: BTreeSet<usize> = c.iter().copied().collect();
            if seen.insert(key) {
                out.push(c.clone());
            }
        }
        out
    }

    /// All vertices on inner cycles.
    pub fn inner_vertices(&self) -> BTreeSet<usize> {
        self.infinitesimal_cycles.iter().flatten().copied().collect()
    }

    /// Inner vertices dropped from the reduced flow graph, `(w − 1)·h`, where
    /// `h` is the grid period, halved when the sides are exchanged.
    pub fn discarded(&self) -> usize {
        let d = (self.width - 1) * self.period;
        if self.mobius {
            d / 2
        } else {
            d
        }
    }
}

/// Triangulation data the wall routines share.
pub struct WallContext<'a> {
    pub vt: &'a VeeringTriangulation,
    pub stacks: &'a [EdgeStack],
}

impl WallContext<'_> {
    fn bottom(&self, t: usize) -> usize {
        self.vt.bottom_edge[t]
    }

    /// The next tetrahedron along an inner row.
    fn row_successor(&self, t: usize) -> usize {
        self.vt.tet_below[self.bottom(t)]
    }

    /// The tetrahedra having `e` as a side edge, if there are exactly two.
    fn side_pair(&self, e: usize) -> Option<[usize; 2]> {
        let s = &self.stacks[e].stacks;
        (s[0].len() == 1 && s[1].len() == 1).then(|| [s[0][0], s[1][0]])
    }

    /// `pair` minus one occurrence of `t`.
    fn other_side(&self, e: usize, t: usize) -> Option<usize> {
        let [a, b] = self.side_pair(e)?;
        if a == t {
            Some(b)
        } else if b == t {
            Some(a)
        } else {
            None
        }
    }
}

/// Vertices of an infinitesimal component in flow order, starting at the smallest.
fn component_cycle(fg: &FlowGraph, comp: &[usize]) -> Option<Vec<usize>> {
    let succ = fg.successors();
    let set: BTreeSet<usize> = comp.iter().copied().collect();
    let mut cycle = vec![comp[0]];
    let mut v = comp[0];
    loop {
        let s = &succ[fg.index_of(v)?];
        if s.len() != 1 {
            return None;
        }
        let next = fg.vertices[s[0]];
        if !set.contains(&next) {
            return None;
        }
        if next == comp[0] {
            break;
        }
        if cycle.contains(&next) {
            return None;
        }
        cycle.push(next);
        v = next;
    }
    (cycle.len() == comp.len()).then_some(cycle)
}

/// Splits the side tetrahedra along the seed row into two consistent rows.
///
/// Starting from one bottom face of the first tetrahedron, cross into the side
/// tetrahedron, leave through its other face around the edge into the next row
/// tetrahedron, and continue from the bottom face containing the side edge of
/// the top-edge colour in the face just entered. Returns the row period (one or
/// two turns around the cycle) and the two rows.
fn split_sides(ctx: &WallContext, row: &[usize]) -> Option<(usize, Vec<usize>, Vec<usize>)> {
    let vt = ctx.vt;
    let h = row.len();
    let start_face = vt.top_vertices(row[0])[0];
    let mut face = start_face;
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for step in 0..2 * h {
        let t = row[step % h];
        let e = ctx.bottom(t);
        let g = vt.table.gluing(t, face);
        let [b1, b2] = vt.bottom_vertices(t);
        let (x, y) = (g.perm[b1 as usize], g.perm[b2 as usize]);
        let other_face = (0..4u8).find(|&f| f != x && f != y && f != g.face)?;
        let g2 = vt.table.gluing(g.tet, other_face);
        let next = row[(step + 1) % h];
        if g2.tet != next || !vt.is_top_face(next, g2.face) {
            return None;
        }
        let other_bottom = vt.top_vertices(t).into_iter().find(|&f| f != face)?;
        left.push(g.tet);
        right.push(vt.table.gluing(t, other_bottom).tet);
        debug_assert_eq!(vt.edge(g.tet, x, y), e);
        // The entered top face holds the top edge and one bottom vertex.
        let bv = vt.bottom_vertices(next).into_iter().find(|&b| b != g2.face)?;
        let tc = vt.edge_color[vt.top_edge[next]];
        let u = vt
            .top_vertices(next)
            .into_iter()
            .find(|&u| vt.edge_color[vt.edge(next, u, bv)] == tc)?;
        face = vt.top_vertices(next).into_iter().find(|&f| f != u)?;
        if step + 1 == h && face == start_face {
            return Some((h, left, right));
        }
    }
    (face == start_face).then_some((2 * h, left, right))
}

/// Grows raw rows outward from the seed until a row fails to be inner.
/// `prev` is the row on the other side of `cur`.
fn grow(
    ctx: &WallContext,
    inner: &[bool],
    prev: &[usize],
    first: Vec<usize>,
    limit: usize,
) -> Vec<Vec<usize>> {
    let h = prev.len();
    let mut rows = vec![first];
    let mut back = prev.to_vec();
    while rows.len() <= limit {
        let cur = rows.last().unwrap();
        let is_inner = (0..h).all(|m| {
            let e = ctx.bottom(cur[m]);
            inner[e]
                && ctx.row_successor(cur[m]) == cur[(m + 1) % h]
                && ctx.other_side(e, back[(m + 1) % h]).is_some()
        });
        if !is_inner {
            break;
        }
        let next: Vec<usize> = (0..h)
            .map(|m| ctx.other_side(ctx.bottom(cur[m]), back[(m + 1) % h]).unwrap())
            .collect();
        back = cur.clone();
        rows.push(next);
    }
    rows
}

fn is_cyclic_shift(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && (0..a.len()).any(|s| (0..a.len()).all(|j| a[j] == b[(j + s) % a.len()]))
}

fn minimal_period(rows: &[Vec<usize>]) -> usize {
    let h = rows[0].len();
    (1..=h)
        .find(|&p| h.is_multiple_of(p) && rows.iter().all(|r| (0..h).all(|j| r[j] == r[(j + p) % h])))
        .unwrap_or(h)
}

fn row_period(row: &[usize]) -> usize {
    minimal_period(std::slice::from_ref(&row.to_vec()))
}

/// Assembles a wall from raw rows listed top boundary to bottom boundary, with
/// the seed at position `seed`; raw rows are aligned so that the side tetrahedra
/// of the bottom edge of `raw[k][j]` sit in column `j` of the rows further out.
fn assemble(ctx: &WallContext, raw: Vec<Vec<usize>>, seed: usize) -> Wall {
    let w = raw.len() - 1;
    let h = raw[0].len();
    let even = |i: usize| (i + 1).is_multiple_of(2);
    let mut shift = vec![0i64; raw.len()];
    for k in seed + 1..raw.len() {
        shift[k] = shift[k - 1] - even(k - 1) as i64;
    }
    for k in (0..seed).rev() {
        shift[k] = shift[k + 1] - even(k + 1) as i64;
    }
    let mut grid: Vec<Vec<usize>> = raw
        .iter()
        .enumerate()
        .map(|(k, r)| (0..h).map(|j| r[(j as i64 + shift[k]).rem_euclid(h as i64) as usize]).collect())
        .collect();
    let period = minimal_period(&grid);
    for r in &mut grid {
        r.truncate(period);
    }
    let twisted = (0..=w).all(|k| is_cyclic_shift(&grid[k], &grid[w - k]));
    let mobius = twisted
        && (1..w).any(|k| {
            let pair = k != w - k && grid[k].iter().any(|t| grid[w - k].contains(t));
            let half = k == w - k && 2 * row_period(&grid[k]) == period;
            pair || half
        });
    let cycle = |r: &Vec<usize>| -> Vec<usize> { r[..row_period(r)].iter().map(|&t| ctx.bottom(t)).collect() };
    Wall {
        infinitesimal_cycles: grid[1..w].iter().map(cycle).collect(),
        boundary_cycles: [cycle(&grid[0]), cycle(&grid[w])],
        width: w,
        period,
        twisted,
        mobius,
        grid,
        maximal: true,
    }
}

/// Grows one maximal wall around each infinitesimal component and merges walls
/// with the same inner cycles. Fails if a component is not an outdegree-one
/// cycle or is left uncovered.
pub fn detect_walls(ctx: &WallContext, fg: &FlowGraph, cond: &Condensation) -> Result<Vec<Wall>, WallError> {
    let vt = ctx.vt;
    let mut inner = vec![false; vt.edge_count()];
    for (k, c) in cond.components.iter().enumerate() {
        if cond.infinitesimal[k] {
            for &v in c {
                inner[v] = true;
            }
        }
    }
    let mut walls: Vec<Wall> = Vec::new();
    let mut keys: Vec<BTreeSet<usize>> = Vec::new();
    for (k, comp) in cond.components.iter().enumerate() {
        if !cond.infinitesimal[k] {
            continue;
        }
        let malformed = || WallError::MalformedInfinitesimalComponent { component: comp.clone() };
        let cycle = component_cycle(fg, comp).ok_or_else(malformed)?;
        let row: Vec<usize> = cycle.iter().map(|&e| vt.tet_above[e]).collect();
        let consistent = (0..row.len()).all(|j| {
            ctx.row_successor(row[j]) == row[(j + 1) % row.len()] && ctx.side_pair(cycle[j]).is_some()
        });
        if !consistent {
            return Err(malformed());
        }
        if keys.iter().any(|key| key.contains(&cycle[0])) {
            continue;
        }
        let (h, left, right) = split_sides(ctx, &row).ok_or_else(malformed)?;
        let seed: Vec<usize> = (0..h).map(|j| row[j % row.len()]).collect();
        let limit = 2 * vt.tet_count() + 2;
        let up = grow(ctx, &inner, &seed, left, limit);
        let down = grow(ctx, &inner, &seed, right, limit);
        if up.len() > limit || down.len() > limit {
            return Err(malformed());
        }
        let mut raw: Vec<Vec<usize>> = up.into_iter().rev().collect();
        let seed_pos = raw.len();
        raw.push(seed);
        raw.extend(down);
        let wall = assemble(ctx, raw, seed_pos);
        let key = wall.inner_vertices();
        if !key.contains(&cycle[0]) {
            return Err(malformed());
        }
        keys.push(key);
        walls.push(wall);
    }
    for (k, comp) in cond.components.iter().enumerate() {
        if cond.infinitesimal[k] && !keys.iter().any(|key| key.contains(&comp[0])) {
            return Err(WallError::UncoveredInfinitesimalComponent { component: comp.clone() });
        }
    }
    Ok(walls)
}

/// Checks the two grid conditions literally.
pub fn validate_wall(ctx: &WallContext, wall: &Wall) -> Result<(), String> {
    let g = &wall.grid;
    let w = wall.width;
    let h = wall.period;
    if w < 2 || g.len() != w + 1 || g.iter().any(|r| r.len() != h) {
        return Err("grid has the wrong shape".into());
    }
    for i in 2..=w {
        let row = &g[i - 1];
        for j in 0..h {
            let e = ctx.bottom(row[j]);
            if ctx.vt.top_edge[row[(j + 1) % h]] != e {
                return Err(format!("row {i} column {j}: bottom edge is not the next top edge"));
            }
            let jj = if i % 2 == 1 { j } else { (j + 1) % h };
            let mut want = [g[i - 2][jj], g[i][jj]];
            let Some(mut have) = ctx.side_pair(e) else {
                return Err(format!("row {i} column {j}: edge {e} is a side of more than two tetrahedra"));
            };
            want.sort_unstable();
            have.sort_unstable();
            if want != have {
                return Err(format!("row {i} column {j}: side tetrahedra {have:?}, grid has {want:?}"));
            }
        }
    }
    Ok(())
}
