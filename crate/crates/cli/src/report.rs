//! The full per-signature pipeline and its report.

use serde::Serialize;
use std::collections::BTreeSet;
use std::time::Instant;
use veering_core::branched::{boundary_triangulation, dual_graph, wall_ab_count, WallAbCount};
use veering_core::flowgraph::{build_flow_graph, FlowGraph};
use veering_core::spectral::{adjacency, perron};
use veering_core::triangulation::{build_edge_stacks, Color, TetType, TypeCounts, VeeringTriangulation};
use veering_core::walls::regions::{complementary_regions, ComplementaryRegion, Core, GraphVariant, Pattern};
use veering_core::walls::{accounting, verify_with, Accounting, Counterexample, Wall, WallContext, WallError};
use veering_core::{decode, encode};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    /// Use the opposite coorientation.
    pub flip: bool,
    /// Longest AB cycle listed; `None` means `4·n`.
    pub ab_cap: Option<usize>,
    /// Record per-stage wall-clock timings. Off in batch mode so that output
    /// is reproducible byte for byte.
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// The signature does not decode or is not a veering triangulation.
    InputError,
    /// A structural check failed; see `counterexample` or `error`.
    TheoremViolation,
    /// A later stage failed without contradicting a structural result.
    ModuleError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::ModuleError => crate::exit::OK,
            Status::TheoremViolation => crate::exit::THEOREM_VIOLATION,
            Status::InputError => crate::exit::INPUT_ERROR,
        }
    }
}

/// Edge classes, colours and tetrahedron types of the validated structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub edge_count: usize,
    pub cusp_count: usize,
    pub edge_colors: Vec<Color>,
    pub tet_types: Vec<TetType>,
    /// Edge class of local edges 01, 02, 03, 12, 13, 23 of each tetrahedron.
    pub tet_edges: Vec<[usize; 6]>,
    pub top_edges: Vec<usize>,
    pub bottom_edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub indegrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SccSummary {
    pub component_count: usize,
    pub infinitesimal_count: usize,
    pub rooted_height_one_tree: bool,
    pub strongly_connected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WallSummary {
    pub width: usize,
    pub period: usize,
    pub twisted: bool,
    pub mobius: bool,
    /// Distinct infinitesimal cycles after the twisted identification.
    pub infinitesimal_cycles: usize,
    /// Vertices dropped from the reduced flow graph.
    pub discarded: usize,
    pub ab_cycles: WallAbCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub strongly_connected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub lambda: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundarySummary {
    pub cusp_count: usize,
    /// Ladderpole loops per cusp.
    pub loop_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbSummary {
    pub cap: usize,
    pub listed: usize,
    pub over_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionSummary {
    pub core: Core,
    pub tongue_count: usize,
    pub pattern: Pattern,
    pub source_wall: Option<usize>,
}

impl From<&ComplementaryRegion> for RegionSummary {
    fn from(r: &ComplementaryRegion) -> Self {
        RegionSummary { core: r.core, tongue_count: r.tongue_count, pattern: r.pattern, source_wall: r.source_wall }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Regions {
    /// Regions of B cut along the flow graph.
    pub full: Vec<RegionSummary>,
    /// Regions of B cut along the reduced flow graph.
    pub reduced: Vec<RegionSummary>,
}

/// Milliseconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub decode_ms: f64,
    pub triangulation_ms: f64,
    pub flow_graph_ms: f64,
    pub walls_ms: f64,
    pub regions_ms: f64,
    pub spectral_ms: f64,
    pub boundary_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub signature: String,
    pub canonical: Option<String>,
    pub tet_count: usize,
    pub flipped: bool,
    pub veering_valid: bool,
    pub status: Status,
    pub error: Option<String>,
    pub types: Option<TypeCounts>,
    pub structure: Option<Structure>,
    pub flow_graph: Option<FlowStats>,
    pub scc: Option<SccSummary>,
    pub walls: Vec<WallSummary>,
    pub reduced: Option<ReducedStats>,
    pub accounting: Option<Accounting>,
    pub spectral: Option<SpectralSummary>,
    pub boundary: Option<BoundarySummary>,
    pub ab_cycles: Option<AbSummary>,
    pub regions: Option<Regions>,
    pub theorem_verified: bool,
    pub counterexample: Option<Counterexample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl AnalysisReport {
    fn new(signature: &str, flipped: bool) -> Self {
        AnalysisReport {
            signature: signature.to_string(),
            canonical: None,
            tet_count: 0,
            flipped,
            veering_valid: false,
            status: Status::Ok,
            error: None,
            types: None,
            structure: None,
            flow_graph: None,
            scc: None,
            walls: Vec::new(),
            reduced: None,
            accounting: None,
            spectral: None,
            boundary: None,
            ab_cycles: None,
            regions: None,
            theorem_verified: false,
            counterexample: None,
            timings: None,
        }
    }

    fn fail(&mut self, status: Status, msg: impl ToString) {
        self.status = status;
        self.error = Some(msg.to_string());
    }

    pub fn strongly_connected(&self) -> Option<bool> {
        self.scc.as_ref().map(|s| s.strongly_connected)
    }

    pub fn max_width(&self) -> Option<usize> {
        self.accounting.map(|a| a.max_width)
    }
}

struct Clock {
    start: Instant,
    last: Instant,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Clock { start: now, last: now }
    }

    fn lap(&mut self) -> f64 {
        let now = Instant::now();
        let ms = (now - self.last).as_secs_f64() * 1e3;
        self.last = now;
        ms
    }
}

/// Everything the subcommands need besides the report itself.
pub struct Pipeline {
    pub vt: VeeringTriangulation,
    pub stacks: Vec<veering_core::triangulation::EdgeStack>,
    pub flow: FlowGraph,
    pub walls: Vec<Wall>,
    pub reduced: FlowGraph,
}

/// Decodes and validates `signature`; errors are input errors.
pub fn load(signature: &str, flip: bool) -> Result<(VeeringTriangulation, Vec<veering_core::triangulation::EdgeStack>), String> {
    let (sig, table) = decode(signature).map_err(|e| e.to_string())?;
    let vt = VeeringTriangulation::new(table, sig.angle_part, flip).map_err(|e| e.to_string())?;
    let stacks = build_edge_stacks(&vt).map_err(|e| e.to_string())?;
    Ok((vt, stacks))
}

/// Runs every stage. A report is always produced; its status says how far
/// the pipeline got and which exit code applies.
pub fn analyze(signature: &str, opts: &Options) -> AnalysisReport {
    analyze_full(signature, opts).0
}

/// As [`analyze`], also returning the intermediate objects when the theorem
/// check succeeded.
pub fn analyze_full(signature: &str, opts: &Options) -> (AnalysisReport, Option<Pipeline>) {
    let mut r = AnalysisReport::new(signature, opts.flip);
    let mut clock = Clock::new();
    let mut t = Timings::default();
    let pipeline = run_stages(signature, opts, &mut r, &mut t, &mut clock);
    t.total_ms = (Instant::now() - clock.start).as_secs_f64() * 1e3;
    if opts.timings {
        r.timings = Some(t);
    }
    (r, pipeline)
}

fn run_stages(
    signature: &str,
    opts: &Options,
    r: &mut AnalysisReport,
    t: &mut Timings,
    clock: &mut Clock,
) -> Option<Pipeline> {

    let (sig, table) = match decode(signature) {
        Ok(x) => x,
        Err(e) => {
            r.fail(Status::InputError, e);
            return None;
        }
    };
    r.tet_count = sig.tet_count;
    r.canonical = Some(encode(&table, &sig.angle_part));
    t.decode_ms = clock.lap();

    let vt = match VeeringTriangulation::new(table, sig.angle_part, opts.flip) {
        Ok(vt) => vt,
        Err(e) => {
            r.fail(Status::InputError, e);
            return None;
        }
    };
    let stacks = match build_edge_stacks(&vt) {
        Ok(s) => s,
        Err(e) => {
            r.fail(Status::InputError, e);
            return None;
        }
    };
    r.veering_valid = true;
    r.types = Some(vt.type_counts());
    r.structure = Some(Structure {
        edge_count: vt.edge_count(),
        cusp_count: vt.classes.cusp_count,
        edge_colors: vt.edge_color.clone(),
        tet_types: vt.tet_type.clone(),
        tet_edges: vt.classes.edges.clone(),
        top_edges: vt.top_edge.clone(),
        bottom_edges: vt.bottom_edge.clone(),
    });
    t.triangulation_ms = clock.lap();

    let fg = build_flow_graph(&vt);
    let cond = fg.scc();
    r.flow_graph = Some(FlowStats { vertex_count: fg.vertex_count(), edge_count: fg.edge_count(), indegrees: fg.indegrees() });
    r.scc = Some(SccSummary {
        component_count: cond.component_count(),
        infinitesimal_count: cond.infinitesimal_count(),
        rooted_height_one_tree: cond.is_rooted_height_one_tree(),
        strongly_connected: cond.is_strongly_connected(),
    });
    let cap = opts.ab_cap.unwrap_or(4 * vt.tet_count());
    let dual = dual_graph(&vt);
    let ab = dual.ab_cycles(cap);
    r.ab_cycles = Some(AbSummary { cap, listed: ab.cycles.len(), over_cap: ab.over_cap });
    t.flow_graph_ms = clock.lap();

    let ctx = WallContext { vt: &vt, stacks: &stacks };
    let (walls, reduced) = match verify_with(signature, &ctx, &fg) {
        Ok((_, walls, reduced)) => (walls, reduced),
        Err(WallError::TheoremViolation(cx)) => {
            r.fail(Status::TheoremViolation, &cx.reason);
            r.counterexample = Some(*cx);
            return None;
        }
        Err(e) => {
            r.fail(Status::TheoremViolation, e);
            return None;
        }
    };
    r.walls = walls
        .iter()
        .map(|w| WallSummary {
            width: w.width,
            period: w.period,
            twisted: w.twisted,
            mobius: w.mobius,
            infinitesimal_cycles: w.distinct_infinitesimal_cycles().len(),
            discarded: w.discarded(),
            ab_cycles: wall_ab_count(&vt, &dual, w),
        })
        .collect();
    r.reduced = Some(ReducedStats {
        vertex_count: reduced.vertex_count(),
        edge_count: reduced.edge_count(),
        strongly_connected: reduced.scc().is_strongly_connected(),
    });
    match accounting(&fg, &reduced, &walls) {
        Ok(a) => r.accounting = Some(a),
        Err(e) => {
            r.fail(Status::TheoremViolation, e);
            return None;
        }
    }
    r.theorem_verified = true;
    t.walls_ms = clock.lap();

    let full = complementary_regions(&ctx, &fg, &walls, GraphVariant::Full);
    let red = complementary_regions(&ctx, &reduced, &walls, GraphVariant::Reduced);
    match (full, red) {
        (Ok(full), Ok(red)) => {
            r.regions = Some(Regions {
                full: full.iter().map(RegionSummary::from).collect(),
                reduced: red.iter().map(RegionSummary::from).collect(),
            })
        }
        (Err(e), _) | (_, Err(e)) => r.fail(Status::TheoremViolation, e),
    }
    t.regions_ms = clock.lap();

    match perron(&adjacency(&reduced)) {
        Ok(p) => r.spectral = Some(SpectralSummary { lambda: p.lambda, residual: p.residual, iterations: p.iterations }),
        Err(e) => {
            if r.error.is_none() {
                r.fail(Status::ModuleError, e);
            }
        }
    }
    t.spectral_ms = clock.lap();

    let b = boundary_triangulation(&vt);
    r.boundary = Some(BoundarySummary { cusp_count: b.cusps.len(), loop_counts: b.loop_counts() });
    t.boundary_ms = clock.lap();

    Some(Pipeline { vt, stacks, flow: fg, walls, reduced })
}

/// Vertices on infinitesimal cycles, for highlighting.
pub fn infinitesimal_vertices(walls: &[Wall]) -> BTreeSet<usize> {
    walls.iter().flat_map(|w| w.inner_vertices()).collect()
}

/// Short human-readable rendering of a report.
pub fn render_text(r: &AnalysisReport) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "signature      {}", r.signature);
    if let Some(c) = &r.canonical {
        let _ = writeln!(s, "canonical      {c}");
    }
    let _ = writeln!(s, "tetrahedra     {}", r.tet_count);
    let _ = writeln!(s, "status         {}", serde_json::to_value(r.status).unwrap().as_str().unwrap_or(""));
    if let Some(e) = &r.error {
        let _ = writeln!(s, "error          {e}");
    }
    if let Some(ty) = r.types {
        let _ = writeln!(s, "types          toggle {}, red fan {}, blue fan {}", ty.toggle, ty.red_fan, ty.blue_fan);
    }
    if let Some(f) = &r.flow_graph {
        let _ = writeln!(s, "flow graph     {} vertices, {} arcs", f.vertex_count, f.edge_count);
    }
    if let Some(c) = &r.scc {
        let _ = writeln!(
            s,
            "components     {} ({} infinitesimal), strongly connected: {}",
            c.component_count, c.infinitesimal_count, c.strongly_connected
        );
    }
    if r.veering_valid {
        let widths: Vec<String> = r.walls.iter().map(|w| w.width.to_string()).collect();
        let _ = writeln!(s, "walls          {}", if widths.is_empty() { "none".into() } else { widths.join(" ") });
    }
    if let Some(red) = &r.reduced {
        let _ = writeln!(s, "reduced        {} vertices, strongly connected: {}", red.vertex_count, red.strongly_connected);
    }
    if let Some(sp) = &r.spectral {
        let _ = writeln!(s, "lambda         {:.12} (residual {:.1e})", sp.lambda, sp.residual);
    }
    if let Some(b) = &r.boundary {
        let _ = writeln!(s, "ladderpoles    {:?}", b.loop_counts);
    }
    let _ = writeln!(s, "theorem        {}", if r.theorem_verified { "verified" } else { "not verified" });
    s
}
