//! Edge and vertex classes, taut and transverse-taut structure, veering colours,
//! tetrahedron types and edge stacks.
//!
//! Local edges of a tetrahedron are numbered `0:01 1:02 2:03 3:12 4:13 5:23`.
//! Faces are numbered by their opposite vertex.

use crate::perm;
use crate::sigparse::{self, GluingTable, SigError, PAIR_EDGES};
use serde::Serialize;
use thiserror::Error;

/// Vertex pairs of the six local edges.
pub const LOCAL_EDGES: [(u8, u8); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Local edge number of `{u, v}`.
pub fn local_edge(u: u8, v: u8) -> usize {
    let (a, b) = (u.min(v), u.max(v));
    LOCAL_EDGES.iter().position(|&e| e == (a, b)).expect("distinct vertices")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangulationError {
    #[error(transparent)]
    Signature(#[from] SigError),
    /// `angle_sum` is in multiples of π.
    #[error("edge {edge} has angle sum {angle_sum}π, expected 2π")]
    NotTaut { edge: usize, angle_sum: usize },
    #[error("face coorientations cannot be made consistent")]
    NotTransverseTaut,
    #[error("the triangulation is not orientable")]
    NonOrientable,
    #[error("edge colours cannot alternate around every tetrahedron")]
    NotVeering,
    #[error("edge {edge}: {reason}")]
    StackPatternViolation { edge: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn other(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TetType {
    Toggle,
    RedFan,
    BlueFan,
}

/// The 6·n edge slots and 4·n vertex slots partitioned by the gluing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeClasses {
    /// `edges[t][k]` is the class of local edge `k` of tetrahedron `t`.
    pub edges: Vec<[usize; 6]>,
    pub edge_count: usize,
    /// `vertices[t][v]` is the cusp of vertex `v` of tetrahedron `t`.
    pub vertices: Vec<[usize; 4]>,
    pub cusp_count: usize,
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
    /// Class numbers in order of first occurrence.
    fn numbering(&mut self) -> (Vec<usize>, usize) {
        let n = self.0.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[x] = label[r];
        }
        (out, next)
    }
}

/// Union-find closure of the edge and vertex identifications.
pub fn build_edge_classes(table: &GluingTable) -> EdgeClasses {
    let n = table.tet_count();
    let mut ue = UnionFind::new(6 * n);
    let mut uv = UnionFind::new(4 * n);
    for t in 0..n {
        for f in 0..4u8 {
            let g = table.gluing(t, f);
            for (k, &(u, v)) in LOCAL_EDGES.iter().enumerate() {
                if u != f && v != f {
                    let k2 = local_edge(g.perm[u as usize], g.perm[v as usize]);
                    ue.union(6 * t + k, 6 * g.tet + k2);
                }
            }
            for v in 0..4u8 {
                if v != f {
                    uv.union(4 * t + v as usize, 4 * g.tet + g.perm[v as usize] as usize);
                }
            }
        }
    }
    let (el, edge_count) = ue.numbering();
    let (vl, cusp_count) = uv.numbering();
    EdgeClasses {
        edges: (0..n).map(|t| std::array::from_fn(|k| el[6 * t + k])).collect(),
        edge_count,
        vertices: (0..n).map(|t| std::array::from_fn(|v| vl[4 * t + v])).collect(),
        cusp_count,
    }
}

/// Checks that every edge class carries exactly two π angles.
pub fn validate_taut(classes: &EdgeClasses, angles: &[u8]) -> Result<(), TriangulationError> {
    let mut count = vec![0usize; classes.edge_count];
    for (t, &d) in angles.iter().enumerate() {
        for (u, v) in PAIR_EDGES[d as usize] {
            count[classes.edges[t][local_edge(u, v)]] += 1;
        }
    }
    match count.iter().position(|&c| c != 2) {
        Some(edge) => Err(TriangulationError::NotTaut { edge, angle_sum: count[edge] }),
        None => Ok(()),
    }
}

/// For each tetrahedron, its two top faces (cooriented out of it), sorted.
///
/// The canonical solution makes face 0 of tetrahedron 0 a top face; `flip`
/// returns the reversed one.
pub fn derive_coorientation(
    table: &GluingTable,
    angles: &[u8],
    flip: bool,
) -> Result<Vec<[u8; 2]>, TriangulationError> {
    let n = table.tet_count();
    // Faces opposite the vertices of one π edge share the other π edge.
    let halves = |t: usize| {
        let [(a, b), (c, e)] = PAIR_EDGES[angles[t] as usize];
        ([a, b], [c, e])
    };
    let mut top: Vec<Option<[u8; 2]>> = vec![None; n];
    let (h0, h1) = halves(0);
    top[0] = Some(if h0.contains(&0) != flip { h0 } else { h1 });
    let mut stack = vec![0];
    while let Some(t) = stack.pop() {
        let tt = top[t].expect("visited");
        for f in 0..4u8 {
            let g = table.gluing(t, f);
            let want_top = !tt.contains(&f);
            let (ha, hb) = halves(g.tet);
            let cand = if ha.contains(&g.face) == want_top { ha } else { hb };
            match top[g.tet] {
                None => {
                    top[g.tet] = Some(cand);
                    stack.push(g.tet);
                }
                Some(x) if x != cand => return Err(TriangulationError::NotTransverseTaut),
                Some(_) => {}
            }
        }
    }
    Ok(top.into_iter().map(|x| x.expect("gluing is connected")).collect())
}

/// +1/−1 per tetrahedron so that every gluing reverses orientation.
pub fn derive_orientation(table: &GluingTable) -> Result<Vec<i8>, TriangulationError> {
    let n = table.tet_count();
    let mut o = vec![0i8; n];
    o[0] = 1;
    let mut stack = vec![0];
    while let Some(t) = stack.pop() {
        for f in 0..4u8 {
            let g = table.gluing(t, f);
            let want = -perm::sign(g.perm) * o[t];
            if o[g.tet] == 0 {
                o[g.tet] = want;
                stack.push(g.tet);
            } else if o[g.tet] != want {
                return Err(TriangulationError::NonOrientable);
            }
        }
    }
    Ok(o)
}

/// The colouring forced on each equatorial edge, before the global choice.
fn forced_colors(
    classes: &EdgeClasses,
    angles: &[u8],
    orientation: &[i8],
) -> Result<Vec<Color>, TriangulationError> {
    let mut col: Vec<Option<Color>> = vec![None; classes.edge_count];
    for (t, &p) in angles.iter().enumerate() {
        for (q, c) in [((p + 1) % 3, Color::Blue), ((p + 2) % 3, Color::Red)] {
            let c = if orientation[t] < 0 { c.other() } else { c };
            for (u, v) in PAIR_EDGES[q as usize] {
                let e = classes.edges[t][local_edge(u, v)];
                match col[e] {
                    None => col[e] = Some(c),
                    Some(x) if x != c => return Err(TriangulationError::NotVeering),
                    Some(_) => {}
                }
            }
        }
    }
    col.into_iter()
        .map(|c| c.ok_or(TriangulationError::NotVeering))
        .collect()
}

/// Checks a colouring against the alternation rule; either global choice passes.
pub fn is_veering_coloring(
    classes: &EdgeClasses,
    angles: &[u8],
    orientation: &[i8],
    colors: &[Color],
) -> bool {
    let mut flipped = None;
    for (t, &p) in angles.iter().enumerate() {
        for (q, c) in [((p + 1) % 3, Color::Blue), ((p + 2) % 3, Color::Red)] {
            let c = if orientation[t] < 0 { c.other() } else { c };
            for (u, v) in PAIR_EDGES[q as usize] {
                let actual = colors[classes.edges[t][local_edge(u, v)]];
                let f = actual != c;
                if *flipped.get_or_insert(f) != f {
                    return false;
                }
            }
        }
    }
    true
}

/// A validated transverse veering triangulation.
#[derive(Debug, Clone, Serialize)]
pub struct VeeringTriangulation {
    #[serde(skip)]
    pub table: GluingTable,
    pub angles: Vec<u8>,
    pub classes: EdgeClasses,
    pub orientation: Vec<i8>,
    /// Top faces of each tetrahedron.
    pub top_faces: Vec<[u8; 2]>,
    /// Whether the reversed coorientation was chosen.
    pub flipped: bool,
    pub edge_color: Vec<Color>,
    pub tet_type: Vec<TetType>,
    pub top_edge: Vec<usize>,
    pub bottom_edge: Vec<usize>,
    /// Tetrahedron whose bottom edge is the given edge.
    pub tet_above: Vec<usize>,
    /// Tetrahedron whose top edge is the given edge.
    pub tet_below: Vec<usize>,
    /// `face_id[t][f]` numbers the face pairs in order of first occurrence.
    pub face_id: Vec<[usize; 4]>,
    /// For each face, the tetrahedron above it and the face's local index there.
    pub face_upper: Vec<(usize, u8)>,
    /// For each face, the tetrahedron below it and the face's local index there.
    pub face_lower: Vec<(usize, u8)>,
}

impl VeeringTriangulation {
    /// Decodes and validates a census signature.
    pub fn from_signature(sig: &str, flip: bool) -> Result<Self, TriangulationError> {
        let (s, table) = sigparse::decode(sig)?;
        Self::new(table, s.angle_part, flip)
    }

    pub fn new(table: GluingTable, angles: Vec<u8>, flip: bool) -> Result<Self, TriangulationError> {
        let n = table.tet_count();
        if angles.len() != n {
            return Err(SigError::AngleLengthMismatch { expected: n, found: angles.len() }.into());
        }
        let classes = build_edge_classes(&table);
        validate_taut(&classes, &angles)?;
        let top_faces = derive_coorientation(&table, &angles, flip)?;
        let orientation = derive_orientation(&table)?;
        let mut edge_color = forced_colors(&classes, &angles, &orientation)?;
        // The lowest-numbered equatorial edge of tetrahedron 0 is red.
        let first_eq = (0..6)
            .find(|&k| {
                let (u, v) = LOCAL_EDGES[k];
                sigparse::edge_pair(u, v) != angles[0]
            })
            .expect("four equatorial edges");
        if edge_color[classes.edges[0][first_eq]] == Color::Blue {
            edge_color.iter_mut().for_each(|c| *c = c.other());
        }
        let mut top_edge = vec![0; n];
        let mut bottom_edge = vec![0; n];
        let mut tet_above = vec![usize::MAX; classes.edge_count];
        let mut tet_below = vec![usize::MAX; classes.edge_count];
        for t in 0..n {
            let [f1, f2] = top_faces[t];
            let bot = classes.edges[t][local_edge(f1, f2)];
            let tv = complement(top_faces[t]);
            let top = classes.edges[t][local_edge(tv[0], tv[1])];
            top_edge[t] = top;
            bottom_edge[t] = bot;
            tet_above[bot] = t;
            tet_below[top] = t;
        }
        let mut face_id = vec![[usize::MAX; 4]; n];
        let mut face_upper = Vec::with_capacity(2 * n);
        let mut face_lower = Vec::with_capacity(2 * n);
        for t in 0..n {
            for f in 0..4u8 {
                if face_id[t][f as usize] != usize::MAX {
                    continue;
                }
                let g = table.gluing(t, f);
                let id = face_upper.len();
                face_id[t][f as usize] = id;
                face_id[g.tet][g.face as usize] = id;
                // A top face of t is a bottom face of the tetrahedron across it.
                if top_faces[t].contains(&f) {
                    face_upper.push((g.tet, g.face));
                    face_lower.push((t, f));
                } else {
                    face_upper.push((t, f));
                    face_lower.push((g.tet, g.face));
                }
            }
        }
        let tet_type = (0..n)
            .map(|t| {
                let (ct, cb) = (edge_color[top_edge[t]], edge_color[bottom_edge[t]]);
                match (ct == cb, ct) {
                    (false, _) => TetType::Toggle,
                    (true, Color::Red) => TetType::RedFan,
                    (true, Color::Blue) => TetType::BlueFan,
                }
            })
            .collect();
        Ok(VeeringTriangulation {
            table,
            angles,
            classes,
            orientation,
            top_faces,
            flipped: flip,
            edge_color,
            tet_type,
            top_edge,
            bottom_edge,
            tet_above,
            tet_below,
            face_id,
            face_upper,
            face_lower,
        })
    }

    pub fn tet_count(&self) -> usize {
        self.table.tet_count()
    }

    pub fn edge_count(&self) -> usize {
        self.classes.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.face_upper.len()
    }

    /// Edge classes of the three edges of face `f` of `t`.
    pub fn face_edges(&self, t: usize, f: u8) -> [usize; 3] {
        let v: Vec<u8> = (0..4u8).filter(|&x| x != f).collect();
        [self.edge(t, v[0], v[1]), self.edge(t, v[0], v[2]), self.edge(t, v[1], v[2])]
    }

    /// Edge class of the local edge `{u, v}` of tetrahedron `t`.
    pub fn edge(&self, t: usize, u: u8, v: u8) -> usize {
        self.classes.edges[t][local_edge(u, v)]
    }

    pub fn is_top_face(&self, t: usize, f: u8) -> bool {
        self.top_faces[t].contains(&f)
    }

    /// Endpoints of the top edge.
    pub fn top_vertices(&self, t: usize) -> [u8; 2] {
        complement(self.top_faces[t])
    }

    /// Endpoints of the bottom edge, which are also the indices of the top faces.
    pub fn bottom_vertices(&self, t: usize) -> [u8; 2] {
        self.top_faces[t]
    }

    /// The four equatorial edges as `(top vertex, bottom vertex)`.
    pub fn sides(&self, t: usize) -> [(u8, u8); 4] {
        let [a, b] = self.top_vertices(t);
        let [c, d] = self.bottom_vertices(t);
        [(a, c), (a, d), (b, c), (b, d)]
    }

    /// Equatorial edges with the colour of the top edge.
    pub fn same_sides(&self, t: usize) -> [(u8, u8); 2] {
        self.sides_by(t, true)
    }

    /// Equatorial edges with the other colour; these feed the flow graph.
    pub fn opposite_sides(&self, t: usize) -> [(u8, u8); 2] {
        self.sides_by(t, false)
    }

    fn sides_by(&self, t: usize, same: bool) -> [(u8, u8); 2] {
        let tc = self.edge_color[self.top_edge[t]];
        let v: Vec<_> = self
            .sides(t)
            .into_iter()
            .filter(|&(u, w)| (self.edge_color[self.edge(t, u, w)] == tc) == same)
            .collect();
        [v[0], v[1]]
    }

    pub fn type_counts(&self) -> TypeCounts {
        let mut c = TypeCounts::default();
        for ty in &self.tet_type {
            match ty {
                TetType::Toggle => c.toggle += 1,
                TetType::RedFan => c.red_fan += 1,
                TetType::BlueFan => c.blue_fan += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TypeCounts {
    pub toggle: usize,
    pub red_fan: usize,
    pub blue_fan: usize,
}

/// The two vertices not in `pair`, sorted.
pub fn complement(pair: [u8; 2]) -> [u8; 2] {
    let mut out = [0u8; 2];
    let mut i = 0;
    for v in 0..4u8 {
        if !pair.contains(&v) {
            out[i] = v;
            i += 1;
        }
    }
    out
}

/// One position in a walk around an edge: tetrahedron `tet` with the edge at
/// local vertices `(u, v)`, about to leave through face `exit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeWalkState {
    pub tet: usize,
    pub u: u8,
    pub v: u8,
    pub exit: u8,
    pub other: u8,
}

impl EdgeWalkState {
    /// Crosses the exit face.
    pub fn step(self, table: &GluingTable) -> EdgeWalkState {
        let g = table.gluing(self.tet, self.exit);
        let p = g.perm;
        EdgeWalkState {
            tet: g.tet,
            u: p[self.u as usize],
            v: p[self.v as usize],
            exit: p[self.other as usize],
            other: p[self.exit as usize],
        }
    }
}

/// The tetrahedra around one edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeStack {
    pub edge: usize,
    pub above: usize,
    pub below: usize,
    /// The two side stacks, each ordered top to bottom.
    pub stacks: [Vec<usize>; 2],
    /// Local endpoints of the edge in each stack tetrahedron.
    pub positions: [Vec<(u8, u8)>; 2],
    /// Faces crossed on each side, from the tetrahedron above down to the one
    /// below; one longer than the stack.
    pub faces: [Vec<usize>; 2],
}

impl EdgeStack {
    /// Stack members in which the edge has the opposite colour to their top edge.
    pub fn outdegree(&self) -> usize {
        1 + self.stacks.iter().map(|s| s.len() - 1).sum::<usize>()
    }
}

/// Walks around every edge from the tetrahedron above it and checks the
/// toggle/fan pattern of each side stack.
pub fn build_edge_stacks(vt: &VeeringTriangulation) -> Result<Vec<EdgeStack>, TriangulationError> {
    let mut out = Vec::with_capacity(vt.edge_count());
    for e in 0..vt.edge_count() {
        let above = vt.tet_above[e];
        let below = vt.tet_below[e];
        let [u, v] = vt.bottom_vertices(above);
        let [x, y] = vt.top_vertices(above);
        let mut stacks: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        let mut positions: [Vec<(u8, u8)>; 2] = [Vec::new(), Vec::new()];
        let mut faces: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (side, (exit, other)) in [(x, y), (y, x)].into_iter().enumerate() {
            faces[side].push(vt.face_id[above][exit as usize]);
            let mut s = EdgeWalkState { tet: above, u, v, exit, other }.step(&vt.table);
            let mut guard = 0;
            while !(s.tet == below && vt.top_vertices(s.tet) == sorted(s.u, s.v)) {
                stacks[side].push(s.tet);
                positions[side].push((s.u, s.v));
                faces[side].push(vt.face_id[s.tet][s.exit as usize]);
                s = s.step(&vt.table);
                guard += 1;
                if guard > 6 * vt.tet_count() {
                    return Err(TriangulationError::StackPatternViolation {
                        edge: e,
                        reason: "walk does not reach the tetrahedron below".into(),
                    });
                }
            }
        }
        let stack = EdgeStack { edge: e, above, below, stacks, positions, faces };
        check_stack_pattern(vt, &stack)?;
        out.push(stack);
    }
    Ok(out)
}

fn sorted(a: u8, b: u8) -> [u8; 2] {
    [a.min(b), a.max(b)]
}

fn check_stack_pattern(vt: &VeeringTriangulation, s: &EdgeStack) -> Result<(), TriangulationError> {
    let fail = |reason: String| TriangulationError::StackPatternViolation { edge: s.edge, reason };
    let c = vt.edge_color[s.edge];
    let fan_of = |c: Color| if c == Color::Red { TetType::RedFan } else { TetType::BlueFan };
    for stack in &s.stacks {
        let types: Vec<TetType> = stack.iter().map(|&t| vt.tet_type[t]).collect();
        match types.len() {
            0 => return Err(fail("empty stack".into())),
            1 if types[0] != fan_of(c) => {
                return Err(fail(format!("single stack tetrahedron is {:?}", types[0])))
            }
            1 => {}
            k => {
                if types[0] != TetType::Toggle || types[k - 1] != TetType::Toggle {
                    return Err(fail("long stack does not start and end with toggles".into()));
                }
                if types[1..k - 1].iter().any(|&ty| ty != fan_of(c.other())) {
                    return Err(fail("inner stack tetrahedra are not opposite-colour fans".into()));
                }
            }
        }
    }
    Ok(())
}
