//! The unstable branched surface dual to a veering triangulation, its dual
//! graph and anti-branching cycles, the boundary triangulation with its
//! ladderpole loops, and slope admissibility.
//!
//! The sector dual to an edge `e` is a polygon whose corners are the
//! tetrahedra around `e`: the tetrahedron above `e`, one side stack, the
//! tetrahedron below `e` and the other side stack back up. Its sides are the
//! faces crossed on the way round. The branch locus crosses every face once,
//! so its segments are indexed by faces and its double points by tetrahedra.

use crate::triangulation::{EdgeStack, VeeringTriangulation};
use crate::walls::Wall;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BranchedError {
    #[error("cusp {cusp} has intersection number 0 with the ladderpole slope")]
    ZeroIntersection { cusp: usize },
    #[error("branched surface is inconsistent: {0}")]
    Inconsistent(String),
}

/// The polygon dual to one edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sector {
    pub edge: usize,
    /// Tetrahedron above the edge; the top corner.
    pub top: usize,
    /// Tetrahedron below the edge; the bottom corner.
    pub bottom: usize,
    /// Corners on each side, top to bottom.
    pub sides: [Vec<usize>; 2],
    /// The two faces at the top corner.
    pub upper_faces: [usize; 2],
    /// The remaining faces, top to bottom on each side.
    pub lower_faces: [Vec<usize>; 2],
}

impl Sector {
    pub fn lower_face_count(&self) -> usize {
        self.lower_faces[0].len() + self.lower_faces[1].len()
    }
}

/// How a sector meets the branch segment through a face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Incidence {
    pub face: usize,
    pub sector: usize,
    /// The face is one of the sector's upper sides.
    pub upper: bool,
}

/// One segment of the branch locus inside a tetrahedron, entering through a
/// top face and leaving through a bottom face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchSegment {
    pub tet: usize,
    pub entry_face: usize,
    pub exit_face: usize,
    /// Local vertices `(top, bottom)` of the opposite-coloured side the
    /// segment runs along.
    pub side: (u8, u8),
    /// Cusp faced by the segment.
    pub cusp: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchedSurfaceComplex {
    pub sectors: Vec<Sector>,
    /// Cyclic sequences of segments; each runs against the coorientation.
    pub branch_circles: Vec<Vec<BranchSegment>>,
    pub double_points: usize,
    pub incidence: Vec<Incidence>,
}

/// Top face of `t` that contains the side `(u, b)`, other than the one opposite `u`.
fn top_face_of_side(vt: &VeeringTriangulation, t: usize, side: (u8, u8)) -> u8 {
    let [c, d] = vt.bottom_vertices(t);
    if side.1 == c {
        d
    } else {
        c
    }
}

/// Bottom face of `t` that contains the side `(u, b)`.
fn bottom_face_of_side(vt: &VeeringTriangulation, t: usize, side: (u8, u8)) -> u8 {
    let [a, b] = vt.top_vertices(t);
    if side.0 == a {
        b
    } else {
        a
    }
}

/// Builds sectors and branch circles and checks their combinatorics.
pub fn build_branched_surface(
    vt: &VeeringTriangulation,
    stacks: &[EdgeStack],
) -> Result<BranchedSurfaceComplex, BranchedError> {
    let bad = |s: String| Err(BranchedError::Inconsistent(s));
    let mut sectors = Vec::with_capacity(stacks.len());
    let mut incidence = Vec::new();
    for s in stacks {
        let sector = Sector {
            edge: s.edge,
            top: s.above,
            bottom: s.below,
            sides: s.stacks.clone(),
            upper_faces: [s.faces[0][0], s.faces[1][0]],
            lower_faces: [s.faces[0][1..].to_vec(), s.faces[1][1..].to_vec()],
        };
        if sector.lower_face_count() < 2 {
            return bad(format!("sector {} has fewer than two lower sides", s.edge));
        }
        for f in sector.upper_faces {
            incidence.push(Incidence { face: f, sector: s.edge, upper: true });
        }
        for &f in sector.lower_faces.iter().flatten() {
            incidence.push(Incidence { face: f, sector: s.edge, upper: false });
        }
        sectors.push(sector);
    }

    // Each face carries one branch segment; the one sector reaching it from
    // above is the large branch, and must be the bottom edge of the
    // tetrahedron above the face, a same-coloured side of the one below.
    let mut per_face = vec![(0usize, 0usize); vt.face_count()];
    for inc in &incidence {
        if inc.upper {
            per_face[inc.face].0 += 1;
        } else {
            per_face[inc.face].1 += 1;
        }
    }
    for (f, &(up, low)) in per_face.iter().enumerate() {
        if (up, low) != (1, 2) {
            return bad(format!("face {f} meets {up} sectors from above and {low} from below"));
        }
        let large = incidence.iter().find(|i| i.face == f && i.upper).unwrap().sector;
        let (ut, _) = vt.face_upper[f];
        let (lt, lf) = vt.face_lower[f];
        if vt.bottom_edge[ut] != large {
            return bad(format!("face {f}: large branch is not the bottom edge above it"));
        }
        let same = vt.same_sides(lt).iter().any(|&(u, b)| u != lf && b != lf && vt.edge(lt, u, b) == large);
        if !same {
            return bad(format!("face {f}: large branch is not a same-coloured side below it"));
        }
    }

    let segments = branch_segments(vt);
    let branch_circles = trace_circles(vt, &segments)?;
    Ok(BranchedSurfaceComplex { sectors, branch_circles, double_points: vt.tet_count(), incidence })
}

/// The two branch segments of every tetrahedron.
fn branch_segments(vt: &VeeringTriangulation) -> Vec<BranchSegment> {
    let mut out = Vec::with_capacity(2 * vt.tet_count());
    for t in 0..vt.tet_count() {
        for side in vt.opposite_sides(t) {
            out.push(BranchSegment {
                tet: t,
                entry_face: vt.face_id[t][top_face_of_side(vt, t, side) as usize],
                exit_face: vt.face_id[t][bottom_face_of_side(vt, t, side) as usize],
                side,
                cusp: vt.classes.vertices[t][side.0 as usize],
            });
        }
    }
    out
}

fn trace_circles(
    vt: &VeeringTriangulation,
    segments: &[BranchSegment],
) -> Result<Vec<Vec<BranchSegment>>, BranchedError> {
    // Segment entering through each face; a face is a top face of exactly one
    // tetrahedron, which has exactly one segment entering through it.
    let mut entering = vec![usize::MAX; vt.face_count()];
    for (k, s) in segments.iter().enumerate() {
        if entering[s.entry_face] != usize::MAX {
            return Err(BranchedError::Inconsistent(format!("two segments enter face {}", s.entry_face)));
        }
        entering[s.entry_face] = k;
    }
    let mut used = vec![false; segments.len()];
    let mut circles = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        let mut circle = Vec::new();
        let mut k = start;
        while !used[k] {
            used[k] = true;
            circle.push(segments[k]);
            k = entering[segments[k].exit_face];
        }
        if k != start {
            return Err(BranchedError::Inconsistent("branch locus is not a union of circles".into()));
        }
        if circle.iter().any(|s| s.cusp != circle[0].cusp) {
            return Err(BranchedError::Inconsistent("branch circle changes cusp".into()));
        }
        circles.push(circle);
    }
    Ok(circles)
}

/// The dual graph: a vertex per tetrahedron and, for each face, an edge from
/// the tetrahedron below it to the one above it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualGraph {
    pub vertex_count: usize,
    /// `edges[f] = (lower tetrahedron, upper tetrahedron)`.
    pub edges: Vec<(usize, usize)>,
    /// Anti-branching continuation of each face through the tetrahedron above it.
    pub anti_branching: Vec<usize>,
    /// Branching continuation of each face through the tetrahedron above it.
    pub branching: Vec<usize>,
}

/// Builds the dual graph and classifies the turns at each vertex.
///
/// Entering a tetrahedron through a bottom face, the turn to a top face is
/// branching when the two faces share an opposite-coloured side and
/// anti-branching when they share a same-coloured side.
pub fn dual_graph(vt: &VeeringTriangulation) -> DualGraph {
    let fc = vt.face_count();
    let mut anti_branching = vec![0; fc];
    let mut branching = vec![0; fc];
    for f in 0..fc {
        let (t, bf) = vt.face_upper[f];
        for (sides, out) in [(vt.same_sides(t), &mut anti_branching), (vt.opposite_sides(t), &mut branching)] {
            let side = sides.into_iter().find(|&(u, b)| u != bf && b != bf).expect("one side per kind");
            out[f] = vt.face_id[t][top_face_of_side(vt, t, side) as usize];
        }
    }
    DualGraph {
        vertex_count: vt.tet_count(),
        edges: (0..fc).map(|f| (vt.face_lower[f].0, vt.face_upper[f].0)).collect(),
        anti_branching,
        branching,
    }
}

/// A cycle in the dual graph making only anti-branching turns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbCycle {
    /// Faces crossed, starting from the smallest.
    pub faces: Vec<usize>,
    /// Tetrahedra passed through, one per face.
    pub tets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbCycles {
    pub cycles: Vec<AbCycle>,
    /// Number of cycles longer than the cap, left out of `cycles`.
    pub over_cap: usize,
}

impl DualGraph {
    /// AB cycles with at most `cap` faces. Anti-branching turns are forced, so
    /// these are the cycles of a permutation of the faces.
    pub fn ab_cycles(&self, cap: usize) -> AbCycles {
        let mut seen = vec![false; self.edges.len()];
        let mut cycles = Vec::new();
        let mut over_cap = 0;
        for start in 0..self.edges.len() {
            if seen[start] {
                continue;
            }
            let mut faces = Vec::new();
            let mut f = start;
            while !seen[f] {
                seen[f] = true;
                faces.push(f);
                f = self.anti_branching[f];
            }
            if faces.len() > cap {
                over_cap += 1;
                continue;
            }
            let tets = faces.iter().map(|&f| self.edges[f].1).collect();
            cycles.push(AbCycle { faces, tets });
        }
        AbCycles { cycles, over_cap }
    }

    /// Index of the AB cycle through each face.
    pub fn ab_cycle_of_face(&self) -> Vec<usize> {
        let all = self.ab_cycles(usize::MAX);
        let mut out = vec![0; self.edges.len()];
        for (k, c) in all.cycles.iter().enumerate() {
            for &f in &c.faces {
                out[f] = k;
            }
        }
        out
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {name} {{\n");
        for v in 0..self.vertex_count {
            let _ = writeln!(s, "  {v};");
        }
        for (f, &(a, b)) in self.edges.iter().enumerate() {
            let _ = writeln!(s, "  {a} -> {b} [label=\"f{f}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// AB cycles counted inside one wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WallAbCount {
    /// Distinct AB cycles through faces of inner-row tetrahedra.
    pub found: usize,
    /// The width, or half of it rounded up for a twisted wall.
    pub expected: usize,
    /// The grid reads as twisted but its inner rows do not repeat, so the
    /// grid alone does not say whether the wall closes up as a Möbius band.
    pub ambiguous: bool,
}

impl WallAbCount {
    pub fn matches(&self) -> bool {
        self.found == self.expected
    }
}

pub fn wall_ab_count(vt: &VeeringTriangulation, dual: &DualGraph, wall: &Wall) -> WallAbCount {
    let cycle_of = dual.ab_cycle_of_face();
    let w = wall.width;
    let found: BTreeSet<usize> = wall.grid[1..w]
        .iter()
        .flatten()
        .flat_map(|&t| vt.face_id[t].iter().map(|&f| cycle_of[f]).collect::<Vec<_>>())
        .collect();
    WallAbCount {
        found: found.len(),
        expected: if wall.twisted { w.div_ceil(2) } else { w },
        ambiguous: wall.twisted && !wall.mobius,
    }
}

/// A corner of a boundary triangle: the link of vertex `vertex` of
/// tetrahedron `tet`, at the edge towards `toward`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Corner {
    pub tet: usize,
    pub vertex: u8,
    pub toward: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspBoundary {
    pub cusp: usize,
    /// Boundary triangles as `(tetrahedron, vertex)`.
    pub triangles: Vec<(usize, u8)>,
    /// Each loop lists the corners it cuts, in order.
    pub ladderpole_loops: Vec<Vec<Corner>>,
    pub loop_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryData {
    pub cusps: Vec<CuspBoundary>,
}

impl BoundaryData {
    pub fn loop_counts(&self) -> Vec<usize> {
        self.cusps.iter().map(|c| c.loop_count).collect()
    }
}

/// Vertex links of the cusps with their ladderpole loops.
///
/// In the boundary triangle at a top vertex `u` of a tetrahedron, the
/// opposite-coloured side `(u, b)` carries an interval between the two link
/// edges on the faces containing that side. Following these intervals
/// across faces closes them into loops.
pub fn boundary_triangulation(vt: &VeeringTriangulation) -> BoundaryData {
    let n = vt.tet_count();
    let mut cusps: Vec<CuspBoundary> = (0..vt.classes.cusp_count)
        .map(|cusp| CuspBoundary { cusp, triangles: vec![], ladderpole_loops: vec![], loop_count: 0 })
        .collect();
    for t in 0..n {
        for v in 0..4u8 {
            cusps[vt.classes.vertices[t][v as usize]].triangles.push((t, v));
        }
    }
    // Interval in triangle (t, u): enters on the link edge in the top face,
    // leaves on the link edge in the bottom face.
    let mut intervals = Vec::new();
    for t in 0..n {
        for side in vt.opposite_sides(t) {
            intervals.push((t, side));
        }
    }
    let mut entering: BTreeMap<(usize, u8, u8), usize> = Default::default();
    for (k, &(t, side)) in intervals.iter().enumerate() {
        entering.insert((t, side.0, top_face_of_side(vt, t, side)), k);
    }
    let mut succ = vec![0; intervals.len()];
    for (k, &(t, side)) in intervals.iter().enumerate() {
        let bf = bottom_face_of_side(vt, t, side);
        let g = vt.table.gluing(t, bf);
        let u2 = g.perm[side.0 as usize];
        succ[k] = entering[&(g.tet, u2, g.face)];
    }
    let mut seen = vec![false; intervals.len()];
    for start in 0..intervals.len() {
        if seen[start] {
            continue;
        }
        let mut path = Vec::new();
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            let (t, side) = intervals[k];
            path.push(Corner { tet: t, vertex: side.0, toward: side.1 });
            k = succ[k];
        }
        let c = vt.classes.vertices[path[0].tet][path[0].vertex as usize];
        cusps[c].ladderpole_loops.push(path);
    }
    for c in &mut cusps {
        c.loop_count = c.ladderpole_loops.len();
    }
    BoundaryData { cusps }
}

/// The complementary region of B around one cusp: a once-punctured cusped
/// polygon times a circle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspRegion {
    pub cusp: usize,
    /// Cusps of the polygon, one per cusp circle.
    pub polygon_cusps: usize,
    /// The circle factor runs along the ladderpole slope.
    pub ladderpole_slope: bool,
}

/// One region per cusp, with cusp circles counted from the branch circles.
pub fn complementary_regions_of_b(complex: &BranchedSurfaceComplex, cusp_count: usize) -> Vec<CuspRegion> {
    let mut counts = vec![0; cusp_count];
    for c in &complex.branch_circles {
        counts[c[0].cusp] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(cusp, polygon_cusps)| CuspRegion { cusp, polygon_cusps, ladderpole_slope: true })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlopeVerdict {
    pub admissible: bool,
    pub prongs: Vec<u64>,
    /// Cusps whose core orbit has at least three prongs.
    pub singular: Vec<usize>,
}

/// Reads off admissibility and prong counts from the intersection numbers of
/// the filling slopes with the ladderpole slopes, one per cusp.
pub fn slope_admissibility(intersections: &[u64]) -> Result<SlopeVerdict, BranchedError> {
    if let Some(cusp) = intersections.iter().position(|&v| v == 0) {
        return Err(BranchedError::ZeroIntersection { cusp });
    }
    Ok(SlopeVerdict {
        admissible: intersections.iter().all(|&v| v >= 2),
        prongs: intersections.to_vec(),
        singular: (0..intersections.len()).filter(|&i| intersections[i] >= 3).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::build_edge_stacks;

    fn complex(sig: &str) -> (VeeringTriangulation, BranchedSurfaceComplex) {
        let vt = VeeringTriangulation::from_signature(sig, false).unwrap();
        let stacks = build_edge_stacks(&vt).unwrap();
        let c = build_branched_surface(&vt, &stacks).unwrap();
        (vt, c)
    }

    #[test]
    fn duality_counts_on_smallest_example() {
        let (_, c) = complex("cPcbbbdxm_10");
        assert_eq!(c.sectors.len(), 2);
        assert_eq!(c.double_points, 2);
    }

    #[test]
    fn circles_partition_segments() {
        let (vt, c) = complex("eLAkbbcdddhwqj_2102");
        let total: usize = c.branch_circles.iter().map(Vec::len).sum();
        assert_eq!(total, 2 * vt.tet_count());
        let faces: BTreeSet<usize> = c.branch_circles.iter().flatten().map(|s| s.exit_face).collect();
        assert_eq!(faces.len(), vt.face_count());
    }

    #[test]
    fn turns_are_permutations() {
        let vt = VeeringTriangulation::from_signature("fLAMcaccdeejsnaxk_20010", false).unwrap();
        let d = dual_graph(&vt);
        for turn in [&d.anti_branching, &d.branching] {
            let set: BTreeSet<_> = turn.iter().collect();
            assert_eq!(set.len(), vt.face_count());
        }
        let all = d.ab_cycles(usize::MAX);
        assert_eq!(all.cycles.iter().map(|c| c.faces.len()).sum::<usize>(), vt.face_count());
        assert_eq!(d.ab_cycles(0).over_cap, all.cycles.len());
    }

    #[test]
    fn slope_examples() {
        let v = slope_admissibility(&[3, 2]).unwrap();
        assert!(v.admissible);
        assert_eq!(v.prongs, vec![3, 2]);
        assert_eq!(v.singular, vec![0]);
        assert!(!slope_admissibility(&[1, 5]).unwrap().admissible);
        assert!(slope_admissibility(&[2, 2]).unwrap().singular.is_empty());
        assert_eq!(slope_admissibility(&[2, 0]), Err(BranchedError::ZeroIntersection { cusp: 1 }));
    }
}
