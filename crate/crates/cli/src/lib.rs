//! Dataset loading, benchmark runs and reports for `celljoin-core`.

#[global_allocator]
static ALLOCATOR: mimalloc::MiMalloc = mimalloc::MiMalloc;

pub mod dataset;
pub mod report;
pub mod run;

pub use dataset::{load_case, load_root, BenchmarkCase, DatasetError};
pub use report::RunReport;
pub use run::{run_bench, run_case, run_modes, RunConfig, RunError};
