//! ASCII drawing of a wall as a brick tiling.
//!
//! Each cell shows a tetrahedron and, after the slash, its bottom edge. Even
//! rows are offset by half a cell, since the side tetrahedra of an inner edge
//! sit in the same column on odd rows and one column over on even rows.

use super::Wall;
use crate::triangulation::VeeringTriangulation;
use std::fmt::Write as _;

/// Draws one period of the wall, twice over so the periodicity is visible.
pub fn render_wall(vt: &VeeringTriangulation, wall: &Wall) -> String {
    let cells: Vec<Vec<String>> = wall
        .grid
        .iter()
        .map(|row| row.iter().map(|&t| format!("t{t}/e{}", vt.bottom_edge[t])).collect())
        .collect();
    let cell = cells.iter().flatten().map(String::len).max().unwrap_or(1) + 2;
    let mut out = String::new();
    let kind = match (wall.twisted, wall.mobius) {
        (_, true) => "twisted, Möbius",
        (true, false) => "twisted",
        _ => "untwisted",
    };
    let _ = writeln!(out, "width {}, period {}, {kind}", wall.width, wall.period);
    let rule = "-".repeat(2 * wall.period * (cell + 1) + cell / 2 + 1);
    for (i, row) in cells.iter().enumerate() {
        let inner = i > 0 && i < wall.width;
        let label = format!("{:>3}{}", i + 1, if inner { '*' } else { ' ' });
        let pad = if i % 2 == 1 { " ".repeat(cell / 2) } else { String::new() };
        let body: Vec<String> = row.iter().chain(row.iter()).map(|c| format!("{c:^cell$}")).collect();
        let _ = writeln!(out, "     {rule}");
        let _ = writeln!(out, "{label} {pad}|{}|", body.join("|"));
    }
    let _ = writeln!(out, "     {rule}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::build_edge_stacks;
    use crate::walls::{verify_theorem, WallContext};

    #[test]
    fn draws_every_row() {
        let sig = "eLAkbbcdddhwqj_2102";
        let vt = VeeringTriangulation::from_signature(sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap();
        let ctx = WallContext { vt: &vt, stacks: &stacks };
        let (_, walls, _) = verify_theorem(sig, &ctx).unwrap();
        let pic = render_wall(&vt, &walls[0]);
        assert!(pic.starts_with("width 3, period 1, twisted, Möbius"));
        assert_eq!(pic.lines().filter(|l| l.contains('|')).count(), 4);
        assert!(pic.contains("  2* "));
    }
}
