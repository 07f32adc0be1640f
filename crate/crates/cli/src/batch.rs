//! Parallel analysis of census files with order-preserving output.

use crate::report::{analyze, AnalysisReport, Options, Status};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;

/// Environment variable holding the worker count for batch runs.
pub const WORKERS_ENV: &str = "VEERING_WORKERS";

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BatchSummary {
    pub signatures: usize,
    pub input_errors: usize,
    pub theorem_violations: usize,
    pub strongly_connected: usize,
    /// Among the signatures that analysed successfully; 0 when there are none.
    pub fraction_strongly_connected: f64,
    /// Number of walls of each width.
    pub wall_width_histogram: BTreeMap<usize, usize>,
    /// Largest wall width seen; 1 when no signature has walls, 0 for no signatures.
    pub max_width: usize,
}

impl BatchSummary {
    pub fn from_reports(reports: &[AnalysisReport]) -> Self {
        let mut s = BatchSummary { signatures: reports.len(), ..Default::default() };
        let mut analysed = 0;
        for r in reports {
            match r.status {
                Status::InputError => s.input_errors += 1,
                Status::TheoremViolation => s.theorem_violations += 1,
                _ => {}
            }
            if let Some(sc) = r.strongly_connected() {
                analysed += 1;
                s.strongly_connected += sc as usize;
            }
            for w in &r.walls {
                *s.wall_width_histogram.entry(w.width).or_insert(0) += 1;
            }
            if let Some(w) = r.max_width() {
                s.max_width = s.max_width.max(w);
            }
        }
        if analysed > 0 {
            s.fraction_strongly_connected = s.strongly_connected as f64 / analysed as f64;
        }
        s
    }

    /// Exit code for the whole run: a theorem violation outranks input errors.
    pub fn exit_code(&self) -> i32 {
        if self.theorem_violations > 0 {
            crate::exit::THEOREM_VIOLATION
        } else if self.input_errors > 0 {
            crate::exit::INPUT_ERROR
        } else {
            crate::exit::OK
        }
    }
}

/// Worker count from [`WORKERS_ENV`]; `None` when unset.
pub fn workers_from_env() -> Result<Option<usize>, String> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")),
        },
    }
}

/// Analyses every signature, in parallel, returning reports in input order.
/// Timings are never recorded here so that output is reproducible.
pub fn run_batch(signatures: &[String], opts: &Options, workers: Option<usize>) -> (Vec<AnalysisReport>, BatchSummary) {
    let opts = Options { timings: false, ..*opts };
    let work = || signatures.par_iter().map(|s| analyze(s, &opts)).collect::<Vec<_>>();
    let reports = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool with a positive worker count")
            .install(work),
        None => work(),
    };
    let summary = BatchSummary::from_reports(&reports);
    (reports, summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Csv,
}

const CSV_HEADER: [&str; 14] = [
    "signature",
    "tet_count",
    "veering_valid",
    "status",
    "strongly_connected",
    "components",
    "infinitesimal",
    "wall_widths",
    "max_width",
    "reduced_vertices",
    "lambda",
    "ladderpole_loops",
    "theorem_verified",
    "error",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn csv_row(r: &AnalysisReport) -> Vec<String> {
    let status = serde_json::to_value(r.status).expect("status serializes");
    let widths: Vec<usize> = r.walls.iter().map(|w| w.width).collect();
    vec![
        r.signature.clone(),
        r.tet_count.to_string(),
        r.veering_valid.to_string(),
        status.as_str().unwrap_or_default().to_string(),
        opt(r.strongly_connected()),
        opt(r.scc.as_ref().map(|s| s.component_count)),
        opt(r.scc.as_ref().map(|s| s.infinitesimal_count)),
        join(&widths),
        opt(r.max_width()),
        opt(r.reduced.as_ref().map(|s| s.vertex_count)),
        opt(r.spectral.as_ref().map(|s| format!("{:.12}", s.lambda))),
        r.boundary.as_ref().map(|b| join(&b.loop_counts)).unwrap_or_default(),
        r.theorem_verified.to_string(),
        r.error.clone().unwrap_or_default(),
    ]
}

/// Writes one row per report. An empty report list writes nothing at all.
pub fn write_reports(out: &mut dyn Write, reports: &[AnalysisReport], format: Format) -> std::io::Result<()> {
    if reports.is_empty() {
        return Ok(());
    }
    match format {
        Format::Jsonl => {
            for r in reports {
                serde_json::to_writer(&mut *out, r)?;
                out.write_all(b"\n")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in reports {
                w.write_record(csv_row(r))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
