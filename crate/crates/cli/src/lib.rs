//! Analysis pipeline, batch runner and report types behind the `veering`
//! binary.

pub mod batch;
pub mod input;
pub mod report;

pub use batch::{run_batch, BatchSummary};
pub use report::{analyze, AnalysisReport, Options, Status};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const THEOREM_VIOLATION: i32 = 1;
    pub const INPUT_ERROR: i32 = 2;
}
