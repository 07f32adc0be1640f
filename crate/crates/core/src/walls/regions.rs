//! Complementary regions of the flow graph and of the reduced flow graph in the
//! branched surface.
//!
//! Each sector polygon is cut along the graph edges it carries, which run from
//! its top corner to other corners. A corner at a tetrahedron whose bottom
//! edge is a graph vertex lies on the graph and is truncated. The resulting
//! pieces are glued across faces: at each face one piece arrives from the
//! large side and two from the small side. Pieces that are small along all of
//! their faces are tongues; the rest glue up into the core of a region, which
//! must be an annulus or a Möbius band. Tongue sides, split at graph vertices,
//! are the attaching arcs, and an arc through `k` corners off the graph gives
//! the criss-cross parameter `k + 1`.

use super::{Wall, WallContext, WallError};
use crate::flowgraph::{FlowGraph, SourceRole};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Core {
    Annulus,
    Mobius,
}

/// How the attaching arcs of the tongues sit on the core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// Arcs lift to `y = ±x + 2i`.
    Zigzag,
    /// Arcs lift to `y = ±x + 2i/w`.
    Crisscross(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplementaryRegion {
    pub core: Core,
    pub tongue_count: usize,
    pub pattern: Pattern,
    /// Wall whose inner vertices were removed inside this region.
    pub source_wall: Option<usize>,
    /// Sectors meeting the region, with multiplicity of pieces.
    pub sectors: Vec<usize>,
    pub attaching_arcs: usize,
}

/// Which graph the branched surface is cut along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphVariant {
    Full,
    Reduced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EdgeKind {
    /// A side of the sector polygon; `down` when traversed from the
    /// tetrahedron above the face to the one below.
    Segment { face: usize, upper: bool, down: bool },
    Chord,
    Truncation,
}

#[derive(Debug, Clone, Copy)]
struct PieceEdge {
    kind: EdgeKind,
    from: usize,
    to: usize,
    /// Corner tetrahedra at the two ends.
    tets: (usize, usize),
}

#[derive(Debug, Clone)]
struct Piece {
    sector: usize,
    edges: Vec<PieceEdge>,
}

impl Piece {
    fn segments(&self) -> impl Iterator<Item = (usize, &PieceEdge)> {
        self.edges.iter().enumerate().filter(|(_, e)| matches!(e.kind, EdgeKind::Segment { .. }))
    }

    fn is_tongue(&self) -> bool {
        self.segments().all(|(_, e)| matches!(e.kind, EdgeKind::Segment { upper: false, .. }))
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.0[ra] = rb;
    }
}

/// A corner of a sector polygon: its tetrahedron, and whether it is one of
/// the upper or lower neighbours along the polygon.
struct Polygon {
    corners: Vec<usize>,
    /// `faces[i]` joins corner `i` to corner `i + 1` (cyclically).
    faces: Vec<usize>,
    upper: Vec<bool>,
    /// Whether corner `i` is above corner `i + 1` across `faces[i]`.
    down: Vec<bool>,
}

fn polygon(ctx: &WallContext, e: usize) -> Polygon {
    let s = &ctx.stacks[e];
    let mut corners = vec![s.above];
    corners.extend(&s.stacks[0]);
    corners.push(s.below);
    corners.extend(s.stacks[1].iter().rev());
    let mut faces = s.faces[0].clone();
    faces.extend(s.faces[1].iter().rev());
    let k0 = s.faces[0].len();
    let m = faces.len();
    let upper = (0..m).map(|i| i == 0 || i == m - 1).collect();
    let down = (0..m).map(|i| i < k0).collect();
    Polygon { corners, faces, upper, down }
}

/// Corner indices in the polygon of `e` reached by graph edges out of `e`.
fn chord_corners(ctx: &WallContext, graph: &FlowGraph, e: usize) -> Result<BTreeSet<usize>, WallError> {
    let vt = ctx.vt;
    let s = &ctx.stacks[e];
    let k0 = s.stacks[0].len();
    let mut out = BTreeSet::new();
    for fe in graph.edges.iter().filter(|fe| fe.source == e) {
        let idx = match fe.role {
            SourceRole::Top => k0 + 1,
            SourceRole::SideA | SourceRole::SideB => {
                let (u, b) = vt.opposite_sides(fe.tet)[usize::from(fe.role == SourceRole::SideB)];
                let hit = |side: usize| {
                    (0..s.stacks[side].len()).find(|&k| {
                        let (p, q) = s.positions[side][k];
                        s.stacks[side][k] == fe.tet && ((p, q) == (u, b) || (q, p) == (u, b))
                    })
                };
                match (hit(0), hit(1)) {
                    (Some(k), _) => 1 + k,
                    (None, Some(k)) => corner_count(s) - 1 - k,
                    _ => {
                        return Err(WallError::UnclassifiableRegion(format!(
                            "graph edge from {e} through tetrahedron {} is not in its sector",
                            fe.tet
                        )))
                    }
                }
            }
        };
        out.insert(idx);
    }
    Ok(out)
}

fn corner_count(s: &crate::triangulation::EdgeStack) -> usize {
    s.stacks[0].len() + s.stacks[1].len() + 2
}

/// Cuts one sector polygon into pieces, allocating vertex slots from `next`.
fn cut_sector(
    ctx: &WallContext,
    graph: &FlowGraph,
    e: usize,
    next: &mut usize,
) -> Result<Vec<Piece>, WallError> {
    let vt = ctx.vt;
    let poly = polygon(ctx, e);
    let m = poly.corners.len();
    let chords = chord_corners(ctx, graph, e)?;
    let on_graph = |t: usize| graph.contains(vt.bottom_edge[t]);

    // Each piece is a cyclic list of vertices: `Some(i)` is polygon corner i,
    // `None` is the top corner acting as the apex between two chords.
    let mut shapes: Vec<Vec<Option<usize>>> = Vec::new();
    if chords.is_empty() {
        shapes.push((0..m).map(Some).collect());
    } else {
        let cuts: Vec<usize> = chords.iter().copied().collect();
        shapes.push((0..=cuts[0]).map(Some).collect());
        for w in cuts.windows(2) {
            let mut v = vec![None];
            v.extend((w[0]..=w[1]).map(Some));
            shapes.push(v);
        }
        let mut last: Vec<Option<usize>> = (cuts[cuts.len() - 1]..m).map(Some).collect();
        last.push(Some(0));
        shapes.push(last);
    }

    let mut pieces = Vec::new();
    for shape in shapes {
        let k = shape.len();
        let tet_of = |c: Option<usize>| poly.corners[c.unwrap_or(0)];
        // Slots on entry to and exit from each vertex, with a truncation edge
        // between them when the vertex lies on the graph.
        let mut edges = Vec::new();
        let mut slots = Vec::with_capacity(k);
        for &c in &shape {
            let t = tet_of(c);
            let a = *next;
            *next += 1;
            if on_graph(t) {
                let b = *next;
                *next += 1;
                edges.push(PieceEdge { kind: EdgeKind::Truncation, from: a, to: b, tets: (t, t) });
                slots.push((a, b));
            } else {
                slots.push((a, a));
            }
        }
        for i in 0..k {
            let (c, d) = (shape[i], shape[(i + 1) % k]);
            // Consecutive corners are joined by a face, except across the
            // closing chord of a piece cut out by chords.
            let closing = i + 1 == k && !chords.is_empty();
            let kind = match (c, d) {
                (Some(x), Some(_)) if !closing => {
                    EdgeKind::Segment { face: poly.faces[x], upper: poly.upper[x], down: poly.down[x] }
                }
                _ => EdgeKind::Chord,
            };
            edges.push(PieceEdge { kind, from: slots[i].1, to: slots[(i + 1) % k].0, tets: (tet_of(c), tet_of(d)) });
        }
        pieces.push(Piece { sector: e, edges });
    }
    Ok(pieces)
}

/// Orientation of a segment edge relative to its piece's boundary order.
fn direction(edge: &PieceEdge) -> i8 {
    match edge.kind {
        EdgeKind::Segment { down: true, .. } => 1,
        _ => -1,
    }
}

/// The region decomposition of B cut along `graph`.
pub fn complementary_regions(
    ctx: &WallContext,
    graph: &FlowGraph,
    walls: &[Wall],
    variant: GraphVariant,
) -> Result<Vec<ComplementaryRegion>, WallError> {
    let bad = |s: String| WallError::UnclassifiableRegion(s);
    let vt = ctx.vt;
    let mut next = 0;
    let mut pieces = Vec::new();
    for e in 0..vt.edge_count() {
        pieces.extend(cut_sector(ctx, graph, e, &mut next)?);
    }

    // Piece and edge index of each face occurrence.
    let mut at_face: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vt.face_count()];
    for (p, piece) in pieces.iter().enumerate() {
        for (i, edge) in piece.segments() {
            if let EdgeKind::Segment { face, .. } = edge.kind {
                at_face[face].push((p, i));
            }
        }
    }

    let mut slots = UnionFind::new(next);
    let mut regions = UnionFind::new(pieces.len());
    let mut sign: Vec<i8> = vec![0; pieces.len()];
    let mut glue: Vec<((usize, usize), (usize, usize))> = Vec::new();
    let mut tongue_at: Vec<(usize, usize)> = Vec::new();
    for (f, occ) in at_face.iter().enumerate() {
        if occ.len() != 3 {
            return Err(bad(format!("face {f} meets {} pieces", occ.len())));
        }
        let upper = |&(p, i): &(usize, usize)| matches!(pieces[p].edges[i].kind, EdgeKind::Segment { upper: true, .. });
        let large: Vec<_> = occ.iter().copied().filter(upper).collect();
        let core_small: Vec<_> = occ.iter().copied().filter(|x| !upper(x) && !pieces[x.0].is_tongue()).collect();
        let tongues: Vec<_> = occ.iter().copied().filter(|x| !upper(x) && pieces[x.0].is_tongue()).collect();
        if large.len() != 1 || core_small.len() != 1 || tongues.len() != 1 {
            return Err(bad(format!(
                "face {f}: {} large, {} core and {} tongue pieces",
                large.len(),
                core_small.len(),
                tongues.len()
            )));
        }
        glue.push((large[0], core_small[0]));
        tongue_at.push(tongues[0]);
    }
    for &((p, i), (q, j)) in &glue {
        let (a, b) = (pieces[p].edges[i], pieces[q].edges[j]);
        // Match the ends at the tetrahedron above the face and at the one below.
        let ends = |x: &PieceEdge| if direction(x) == 1 { (x.from, x.to) } else { (x.to, x.from) };
        let ((a_up, a_down), (b_up, b_down)) = (ends(&a), ends(&b));
        slots.union(a_up, b_up);
        slots.union(a_down, b_down);
        regions.union(p, q);
    }

    // Orientability: glued pieces must induce opposite directions on the
    // shared side.
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); pieces.len()];
    for &((p, i), (q, j)) in &glue {
        let rel = -direction(&pieces[p].edges[i]) * direction(&pieces[q].edges[j]);
        adj[p].push((q, rel));
        adj[q].push((p, rel));
    }
    let mut orientable_root: BTreeMap<usize, bool> = BTreeMap::new();
    for start in 0..pieces.len() {
        if sign[start] != 0 || pieces[start].is_tongue() {
            continue;
        }
        sign[start] = 1;
        let mut ok = true;
        let mut stack = vec![start];
        while let Some(p) = stack.pop() {
            for &(q, rel) in &adj[p] {
                let want = sign[p] * rel;
                if sign[q] == 0 {
                    sign[q] = want;
                    stack.push(q);
                } else if sign[q] != want {
                    ok = false;
                }
            }
        }
        orientable_root.insert(regions.find(start), ok);
    }

    // Wall of each removed vertex.
    let mut wall_of: BTreeMap<usize, usize> = BTreeMap::new();
    if variant == GraphVariant::Reduced {
        for (k, w) in walls.iter().enumerate() {
            for v in w.inner_vertices() {
                wall_of.insert(v, k);
            }
        }
    }

    let roots: BTreeSet<usize> = orientable_root.keys().copied().collect();
    let mut out = Vec::new();
    let on_graph = |t: usize| graph.contains(vt.bottom_edge[t]);
    for root in roots {
        let core: Vec<usize> =
            (0..pieces.len()).filter(|&p| !pieces[p].is_tongue() && regions.find(p) == root).collect();
        let mut vertices = BTreeSet::new();
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for &p in &core {
            for e in &pieces[p].edges {
                vertices.insert(slots.find(e.from));
                vertices.insert(slots.find(e.to));
                if !matches!(e.kind, EdgeKind::Segment { .. }) {
                    boundary.push((slots.find(e.from), slots.find(e.to)));
                }
            }
        }
        let glued = glue.iter().filter(|((p, _), _)| regions.find(*p) == root).count();
        let chi = vertices.len() as i64 - (glued + boundary.len()) as i64 + core.len() as i64;

        // Boundary components as components of the boundary edge graph.
        let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut buf = UnionFind::new(vertices.len());
        let mut degree = vec![0; vertices.len()];
        for &(a, b) in &boundary {
            buf.union(index[&a], index[&b]);
            degree[index[&a]] += 1;
            degree[index[&b]] += 1;
        }
        if degree.iter().any(|&d| d != 0 && d != 2) {
            return Err(bad("boundary is not a union of circles".into()));
        }
        let bcomp: BTreeSet<usize> = (0..vertices.len()).filter(|&i| degree[i] > 0).map(|i| buf.find(i)).collect();
        let orientable = orientable_root[&root];
        let core_kind = match (chi, orientable, bcomp.len()) {
            (0, true, 2) => Core::Annulus,
            (0, false, 1) => Core::Mobius,
            _ => {
                return Err(bad(format!(
                    "core with χ = {chi}, orientable {orientable}, {} boundary components",
                    bcomp.len()
                )))
            }
        };

        // Tongues of this region and their attaching sides.
        let tongues: BTreeSet<usize> = tongue_at
            .iter()
            .zip(&glue)
            .filter(|(_, ((p, _), _))| regions.find(*p) == root)
            .map(|((t, _), _)| *t)
            .collect();
        let mut arcs: Vec<Vec<PieceEdge>> = Vec::new();
        for &t in &tongues {
            let segs: Vec<PieceEdge> = pieces[t].segments().map(|(_, e)| *e).collect();
            // Segments come in polygon order; orient each run downwards.
            let mut run: Vec<PieceEdge> = Vec::new();
            for s in segs {
                if let Some(prev) = run.last() {
                    if on_graph(prev.tets.1) {
                        arcs.push(std::mem::take(&mut run));
                    }
                }
                run.push(s);
            }
            if !run.is_empty() {
                arcs.push(run);
            }
        }
        let mut widths = BTreeSet::new();
        for arc in &arcs {
            let d = direction(&arc[0]);
            if arc.iter().any(|s| direction(s) != d) {
                return Err(bad("attaching arc is not oriented downwards throughout".into()));
            }
            let interior = arc.len() - 1;
            if arc[..interior].iter().any(|s| on_graph(s.tets.1)) {
                return Err(bad("attaching arc passes through the graph".into()));
            }
            widths.insert(interior + 1);
        }
        // Arcs cross the core: on an annulus each one joins the two boundary
        // circles, and on every boundary circle as many arcs start as end.
        let mut boundary_of = |slots: &mut UnionFind, slot: usize| -> Result<usize, WallError> {
            let i = index.get(&slots.find(slot)).copied().filter(|&i| degree[i] > 0);
            i.map(|i| buf.find(i)).ok_or_else(|| bad("attaching arc ends off the boundary".into()))
        };
        let mut balance: BTreeMap<usize, i64> = BTreeMap::new();
        for arc in &arcs {
            let (first, last) = (arc[0], arc[arc.len() - 1]);
            let (top_face, bottom_face) = if direction(&first) == 1 { (first, last) } else { (last, first) };
            let core_edge = |x: &PieceEdge| {
                let EdgeKind::Segment { face, .. } = x.kind else { unreachable!() };
                let ((p, i), _) = glue[face];
                pieces[p].edges[i]
            };
            let (top_core, bottom_core) = (core_edge(&top_face), core_edge(&bottom_face));
            let up = if direction(&top_core) == 1 { top_core.from } else { top_core.to };
            let down = if direction(&bottom_core) == 1 { bottom_core.to } else { bottom_core.from };
            let (a, b) = (boundary_of(&mut slots, up)?, boundary_of(&mut slots, down)?);
            if core_kind == Core::Annulus && a == b {
                return Err(bad("attaching arc returns to the boundary circle it left".into()));
            }
            *balance.entry(a).or_default() += 1;
            *balance.entry(b).or_default() -= 1;
        }
        if balance.values().any(|&x| x != 0) {
            return Err(bad("attaching arcs do not alternate along the boundary".into()));
        }

        let w = match widths.len() {
            0 => 1,
            1 => *widths.iter().next().unwrap(),
            _ => return Err(bad(format!("attaching arcs of mixed widths {widths:?}"))),
        };
        let sectors: Vec<usize> = (0..pieces.len())
            .filter(|&p| regions.find(p) == root || tongues.contains(&p))
            .map(|p| pieces[p].sector)
            .collect();
        let walls_here: BTreeSet<usize> = sectors.iter().filter_map(|e| wall_of.get(e).copied()).collect();
        let source_wall = match walls_here.len() {
            0 => None,
            1 => walls_here.iter().next().copied(),
            _ => return Err(bad("region meets several walls".into())),
        };
        let pattern = match variant {
            GraphVariant::Full if w == 1 => Pattern::Zigzag,
            GraphVariant::Full => return Err(bad(format!("flow graph region with criss-cross parameter {w}"))),
            GraphVariant::Reduced => {
                let expected = source_wall.map_or(1, |k| walls[k].width);
                if w != expected {
                    return Err(bad(format!("criss-cross parameter {w}, expected {expected}")));
                }
                Pattern::Crisscross(w)
            }
        };
        out.push(ComplementaryRegion {
            core: core_kind,
            tongue_count: tongues.len(),
            pattern,
            source_wall,
            sectors,
            attaching_arcs: arcs.len(),
        });
    }

    // Every piece lies in exactly one region.
    let covered: usize = out.iter().map(|r| r.sectors.len()).sum();
    if covered != pieces.len() {
        return Err(bad(format!("{} pieces, {covered} assigned to regions", pieces.len())));
    }
    Ok(out)
}
