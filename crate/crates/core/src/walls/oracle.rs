//! Exhaustive grid search for walls, used as an independent check of the detector.
//!
//! Every cycle of the map `t ↦ tetrahedron below the bottom edge of t` is tried
//! as row 2 with one and two turns per period, and every way of distributing
//! the two side tetrahedra of each row-2 bottom edge between rows 1 and 3 is
//! enumerated. Further rows are then forced by the definition.

use super::{validate_wall, Wall, WallContext};
use std::collections::{BTreeMap, BTreeSet};

/// Shape data of one wall found by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct WallShape {
    pub width: usize,
    pub period: usize,
    pub twisted: bool,
}

/// For each set of inner vertices, the shapes of the widest walls having it.
pub type OracleResult = BTreeMap<BTreeSet<usize>, BTreeSet<WallShape>>;

fn side_pair(ctx: &WallContext, e: usize) -> Option<[usize; 2]> {
    let s = &ctx.stacks[e].stacks;
    (s[0].len() == 1 && s[1].len() == 1).then(|| [s[0][0], s[1][0]])
}

fn other(pair: [usize; 2], t: usize) -> Option<usize> {
    if pair[0] == t {
        Some(pair[1])
    } else if pair[1] == t {
        Some(pair[0])
    } else {
        None
    }
}

fn shape(grid: &[Vec<usize>]) -> WallShape {
    let h = grid[0].len();
    let period = (1..=h)
        .find(|&p| h.is_multiple_of(p) && grid.iter().all(|r| (0..h).all(|j| r[j] == r[(j + p) % h])))
        .unwrap();
    let w = grid.len() - 1;
    // Each row against its mirror row, allowing a separate shift per row.
    let twisted = (0..=w).all(|i| {
        (0..period).any(|s| (0..period).all(|j| grid[i][j] == grid[w - i][(j + s) % period]))
    });
    WallShape { width: w, period, twisted }
}

/// Searches every wall whose row 2 is a given cycle; returns the widest
/// extension for each side assignment.
fn walls_from_row(ctx: &WallContext, row2: Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
    let vt = ctx.vt;
    let h = row2.len();
    let pairs: Vec<[usize; 2]> = row2.iter().map(|&t| side_pair(ctx, vt.bottom_edge[t]).unwrap()).collect();
    let limit = 2 * vt.tet_count() + 2;
    for mask in 0u32..(1u32 << h) {
        // Skip assignments that only swap equal side tetrahedra.
        if (0..h).any(|j| mask >> j & 1 == 1 && pairs[j][0] == pairs[j][1]) {
            continue;
        }
        let mut row1 = vec![0; h];
        let mut row3 = vec![0; h];
        for j in 0..h {
            let b = (mask >> j & 1) as usize;
            row1[(j + 1) % h] = pairs[j][b];
            row3[(j + 1) % h] = pairs[j][1 - b];
        }
        let mut grid = vec![row1, row2.clone(), row3];
        // Row i (1-based) is grid[i - 1]; extend while the last row is inner.
        while grid.len() <= limit {
            let i = grid.len();
            let cur = &grid[i - 1];
            let prev = &grid[i - 2];
            let mut next = vec![0; h];
            let mut ok = true;
            for j in 0..h {
                let e = vt.bottom_edge[cur[j]];
                if vt.top_edge[cur[(j + 1) % h]] != e {
                    ok = false;
                    break;
                }
                let jj = if i % 2 == 1 { j } else { (j + 1) % h };
                match side_pair(ctx, e).and_then(|p| other(p, prev[jj])) {
                    Some(t) => next[jj] = t,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
            grid.push(next);
        }
        out.push(grid);
    }
}

/// All maximal walls, grouped by inner vertex set.
pub fn exhaustive_walls(ctx: &WallContext) -> OracleResult {
    let vt = ctx.vt;
    let n = vt.tet_count();
    let mut seen = vec![false; n];
    let mut found = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        let mut t = vt.tet_below[vt.bottom_edge[start]];
        while t != start {
            cycle.push(t);
            t = vt.tet_below[vt.bottom_edge[t]];
        }
        for &c in &cycle {
            seen[c] = true;
        }
        if cycle.iter().any(|&c| side_pair(ctx, vt.bottom_edge[c]).is_none()) {
            continue;
        }
        let doubled: Vec<usize> = cycle.iter().chain(cycle.iter()).copied().collect();
        walls_from_row(ctx, cycle, &mut found);
        walls_from_row(ctx, doubled, &mut found);
    }
    let mut by_key: OracleResult = BTreeMap::new();
    for grid in found {
        let w = grid.len() - 1;
        let s = shape(&grid);
        let candidate = Wall {
            grid: grid.iter().map(|r| r[..s.period].to_vec()).collect(),
            width: w,
            period: s.period,
            twisted: s.twisted,
            mobius: false,
            infinitesimal_cycles: vec![],
            boundary_cycles: [vec![], vec![]],
            maximal: false,
        };
        debug_assert!(validate_wall(ctx, &candidate).is_ok());
        let key: BTreeSet<usize> = grid[1..w].iter().flatten().map(|&t| vt.bottom_edge[t]).collect();
        by_key.entry(key).or_default().insert(s);
    }
    // Keep only the widest walls, and drop keys strictly inside another key.
    let keys: Vec<BTreeSet<usize>> = by_key.keys().cloned().collect();
    by_key.retain(|k, _| !keys.iter().any(|o| o != k && k.is_subset(o)));
    for shapes in by_key.values_mut() {
        let wmax = shapes.iter().map(|s| s.width).max().unwrap();
        shapes.retain(|s| s.width == wmax);
    }
    by_key
}

/// Compares detected walls with the exhaustive search.
pub fn compare(ctx: &WallContext, walls: &[Wall]) -> Result<(), String> {
    let oracle = exhaustive_walls(ctx);
    let detected: BTreeMap<BTreeSet<usize>, &Wall> = walls.iter().map(|w| (w.inner_vertices(), w)).collect();
    let ok: BTreeSet<_> = oracle.keys().collect();
    let dk: BTreeSet<_> = detected.keys().collect();
    if ok != dk {
        return Err(format!("inner vertex sets differ: search {ok:?}, detector {dk:?}"));
    }
    for (k, w) in detected {
        let s = WallShape { width: w.width, period: w.period, twisted: w.twisted };
        if !oracle[&k].contains(&s) {
            return Err(format!("wall on {k:?}: detector {s:?}, search {:?}", oracle[&k]));
        }
    }
    Ok(())
}
