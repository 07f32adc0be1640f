//! `veering`: analysis of veering triangulation census codes.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use veering_cli::batch::{self, Format};
use veering_cli::exit;
use veering_cli::input::read_census;
use veering_cli::report::{self, analyze_full, infinitesimal_vertices, load, render_text, Options, Status};
use veering_core::branched::{
    boundary_triangulation, build_branched_surface, complementary_regions_of_b, dual_graph, BoundaryData, CuspRegion,
};
use veering_core::flowgraph::to_dot;
use veering_core::spectral::{
    adjacency, bound, bound_asymptote_ratio, perron, wall_width_bound_check, WallBoundInput, WallBoundReport,
};
use veering_core::walls::tiling::render_wall;
use veering_core::walls::Wall;

#[derive(Parser)]
#[command(name = "veering", version, about = "Flow graphs, walls and spectral data of veering triangulations")]
struct Cli {
    /// Use the opposite coorientation.
    #[arg(long, global = true)]
    flip: bool,
    /// Longest AB cycle to list (default: 4 times the number of tetrahedra).
    #[arg(long, global = true, value_name = "LEN")]
    ab_cap: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// A single signature.
    #[arg(long, conflicts_with = "file")]
    sig: Option<String>,
    /// Census file, one signature per line.
    #[arg(required_unless_present = "sig")]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DotGraph {
    Dual,
    Flow,
    FlowRed,
}

#[derive(Subcommand)]
enum Command {
    /// Check that signatures decode to veering triangulations.
    Validate(Source),
    /// Run the full pipeline and print a report.
    Analyze {
        #[command(flatten)]
        source: Source,
        /// Print the report as JSON.
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        /// Print a graph in Graphviz format instead of the report.
        #[arg(long, value_enum)]
        dot: Option<DotGraph>,
    },
    /// Analyse every signature in a census file in parallel.
    Batch {
        file: PathBuf,
        /// One CSV row per signature.
        #[arg(long, conflicts_with = "jsonl")]
        csv: bool,
        /// One JSON report per line (the default).
        #[arg(long)]
        jsonl: bool,
    },
    /// Describe the walls and draw their tilings.
    Walls {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        json: bool,
    },
    /// Ladderpole loops and cusp regions, as JSON.
    Boundary(Source),
    /// Perron data of the reduced flow graph, as JSON.
    Spectral {
        #[command(flatten)]
        source: Source,
        /// Dilatation for the wall-width inequality.
        #[arg(long, requires_all = ["e", "e_prime"])]
        lambda: Option<f64>,
        #[arg(long)]
        e: Option<u32>,
        #[arg(long)]
        e_prime: Option<u32>,
    },
    /// Evaluate the tetrahedron-count bound at normalized dilatation P.
    Bound {
        #[arg(long = "P", value_name = "FLOAT", allow_negative_numbers = true)]
        p: f64,
    },
}

fn signatures(source: &Source) -> Result<Vec<String>, String> {
    match (&source.sig, &source.file) {
        (Some(s), _) => Ok(vec![s.clone()]),
        (None, Some(path)) => read_census(path).map_err(|e| format!("{}: {e}", path.display())),
        (None, None) => Err("give --sig or a census file".into()),
    }
}

/// Folds per-signature exit codes: a theorem violation outranks an input error.
fn combine(codes: impl IntoIterator<Item = i32>) -> i32 {
    codes.into_iter().fold(exit::OK, |acc, c| match (acc, c) {
        (exit::THEOREM_VIOLATION, _) | (_, exit::THEOREM_VIOLATION) => exit::THEOREM_VIOLATION,
        (exit::INPUT_ERROR, _) | (_, exit::INPUT_ERROR) => exit::INPUT_ERROR,
        _ => exit::OK,
    })
}

fn json_line<T: Serialize>(out: &mut impl Write, v: &T, pretty: bool) -> std::io::Result<()> {
    if pretty {
        serde_json::to_writer_pretty(&mut *out, v)?;
    } else {
        serde_json::to_writer(&mut *out, v)?;
    }
    out.write_all(b"\n")
}

#[derive(Serialize)]
struct WallJson<'a> {
    #[serde(flatten)]
    wall: &'a Wall,
    discarded: usize,
    tiling: String,
}

#[derive(Serialize)]
struct WallsJson<'a> {
    signature: &'a str,
    walls: Vec<WallJson<'a>>,
}

#[derive(Serialize)]
struct BoundaryJson<'a> {
    signature: &'a str,
    loop_counts: Vec<usize>,
    #[serde(flatten)]
    data: &'a BoundaryData,
    cusp_regions: Vec<CuspRegion>,
}

#[derive(Serialize)]
struct SpectralJson<'a> {
    signature: &'a str,
    vertex_count: usize,
    labels: &'a [usize],
    row_sums: Vec<u32>,
    lambda: f64,
    residual: f64,
    iterations: usize,
    right_vec: &'a [f64],
    left_vec: &'a [f64],
    wall_bound: WallBoundReport,
}

#[derive(Serialize)]
struct BoundJson {
    p: f64,
    bound: f64,
    asymptote_ratio: f64,
}

fn fail(sig: &str, status: Status, msg: &str) -> i32 {
    eprintln!("{sig}: {msg}");
    status.exit_code()
}

/// Runs the pipeline on one signature for the subcommands that need it,
/// reporting failures on stderr.
fn pipeline(sig: &str, opts: &Options) -> Result<(report::AnalysisReport, report::Pipeline), i32> {
    let (r, p) = analyze_full(sig, opts);
    match p {
        Some(p) => Ok((r, p)),
        None => Err(fail(sig, r.status, r.error.as_deref().unwrap_or("analysis failed"))),
    }
}

fn run(cli: Cli) -> Result<i32, String> {
    let opts = Options { flip: cli.flip, ab_cap: cli.ab_cap, timings: true };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let io = |e: std::io::Error| e.to_string();
    let code = match cli.command {
        Command::Validate(source) => {
            let mut codes = Vec::new();
            for sig in signatures(&source)? {
                match load(&sig, cli.flip) {
                    Ok((vt, _)) => {
                        let t = vt.type_counts();
                        writeln!(
                            out,
                            "{sig}: ok, {} tetrahedra, toggle {}, red fan {}, blue fan {}",
                            vt.tet_count(),
                            t.toggle,
                            t.red_fan,
                            t.blue_fan
                        )
                        .map_err(io)?;
                        codes.push(exit::OK);
                    }
                    Err(e) => codes.push(fail(&sig, Status::InputError, &e)),
                }
            }
            combine(codes)
        }
        Command::Analyze { source, json, dot } => {
            let sigs = signatures(&source)?;
            let pretty = source.sig.is_some();
            let mut codes = Vec::new();
            for sig in &sigs {
                let (r, p) = analyze_full(sig, &opts);
                if let Some(e) = &r.error {
                    eprintln!("{sig}: {e}");
                }
                codes.push(r.status.exit_code());
                match (dot, p) {
                    (Some(which), Some(p)) => {
                        let text = match which {
                            DotGraph::Dual => dual_graph(&p.vt).to_dot("dual"),
                            DotGraph::Flow => to_dot(&p.flow, "flow", &infinitesimal_vertices(&p.walls)),
                            DotGraph::FlowRed => to_dot(&p.reduced, "flow_red", &BTreeSet::new()),
                        };
                        out.write_all(text.as_bytes()).map_err(io)?;
                    }
                    (Some(_), None) => {}
                    (None, _) if json => json_line(&mut out, &r, pretty).map_err(io)?,
                    (None, _) => {
                        if sigs.len() > 1 {
                            writeln!(out).map_err(io)?;
                        }
                        out.write_all(render_text(&r).as_bytes()).map_err(io)?
                    }
                }
            }
            combine(codes)
        }
        Command::Batch { file, csv, jsonl: _ } => {
            let sigs = read_census(&file).map_err(|e| format!("{}: {e}", file.display()))?;
            let workers = batch::workers_from_env()?;
            let (reports, summary) = batch::run_batch(&sigs, &opts, workers);
            let format = if csv { Format::Csv } else { Format::Jsonl };
            batch::write_reports(&mut out, &reports, format).map_err(io)?;
            let s = serde_json::to_string(&summary).map_err(|e| e.to_string())?;
            eprintln!("summary {s}");
            summary.exit_code()
        }
        Command::Walls { source, json } => {
            let mut codes = Vec::new();
            for sig in signatures(&source)? {
                let (_, p) = match pipeline(&sig, &opts) {
                    Ok(x) => x,
                    Err(c) => {
                        codes.push(c);
                        continue;
                    }
                };
                codes.push(exit::OK);
                if json {
                    let walls = p
                        .walls
                        .iter()
                        .map(|w| WallJson { wall: w, discarded: w.discarded(), tiling: render_wall(&p.vt, w) })
                        .collect();
                    json_line(&mut out, &WallsJson { signature: &sig, walls }, source.sig.is_some()).map_err(io)?;
                    continue;
                }
                writeln!(out, "{sig}: {} wall(s)", p.walls.len()).map_err(io)?;
                for (k, w) in p.walls.iter().enumerate() {
                    writeln!(out, "\nwall {k}: inner cycles {:?}", w.distinct_infinitesimal_cycles()).map_err(io)?;
                    out.write_all(render_wall(&p.vt, w).as_bytes()).map_err(io)?;
                }
            }
            combine(codes)
        }
        Command::Boundary(source) => {
            let mut codes = Vec::new();
            for sig in signatures(&source)? {
                let (vt, stacks) = match load(&sig, cli.flip) {
                    Ok(x) => x,
                    Err(e) => {
                        codes.push(fail(&sig, Status::InputError, &e));
                        continue;
                    }
                };
                let data = boundary_triangulation(&vt);
                let complex = match build_branched_surface(&vt, &stacks) {
                    Ok(c) => c,
                    Err(e) => {
                        codes.push(fail(&sig, Status::TheoremViolation, &e.to_string()));
                        continue;
                    }
                };
                let doc = BoundaryJson {
                    signature: &sig,
                    loop_counts: data.loop_counts(),
                    data: &data,
                    cusp_regions: complementary_regions_of_b(&complex, vt.classes.cusp_count),
                };
                json_line(&mut out, &doc, source.sig.is_some()).map_err(io)?;
                codes.push(exit::OK);
            }
            combine(codes)
        }
        Command::Spectral { source, lambda, e, e_prime } => {
            let input = match (lambda, e, e_prime) {
                (Some(lambda), Some(e), Some(e_prime)) => Some(WallBoundInput { lambda, e, e_prime }),
                _ => None,
            };
            let mut codes = Vec::new();
            for sig in signatures(&source)? {
                let (r, p) = match pipeline(&sig, &opts) {
                    Ok(x) => x,
                    Err(c) => {
                        codes.push(c);
                        continue;
                    }
                };
                let m = adjacency(&p.reduced);
                let pd = match perron(&m) {
                    Ok(pd) => pd,
                    Err(e) => {
                        codes.push(fail(&sig, Status::ModuleError, &e.to_string()));
                        continue;
                    }
                };
                let max_width = r.max_width().unwrap_or(1);
                let wall_bound = wall_width_bound_check(max_width, input, false).map_err(|e| e.to_string())?;
                let doc = SpectralJson {
                    signature: &sig,
                    vertex_count: m.n,
                    labels: &m.labels,
                    row_sums: m.row_sums(),
                    lambda: pd.lambda,
                    residual: pd.residual,
                    iterations: pd.iterations,
                    right_vec: &pd.right_vec,
                    left_vec: &pd.left_vec,
                    wall_bound,
                };
                json_line(&mut out, &doc, source.sig.is_some()).map_err(io)?;
                codes.push(exit::OK);
            }
            combine(codes)
        }
        Command::Bound { p } => {
            let value = bound(p).map_err(|e| e.to_string())?;
            let ratio = bound_asymptote_ratio(p).map_err(|e| e.to_string())?;
            json_line(&mut out, &BoundJson { p, bound: value, asymptote_ratio: ratio }, false).map_err(io)?;
            exit::OK
        }
    };
    out.flush().map_err(io)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INPUT_ERROR as u8 } else { exit::OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(exit::INPUT_ERROR as u8)
        }
    }
}
