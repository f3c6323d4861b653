//! Prime search, bound evaluation, exports and the end-to-end code demo.

pub mod bounds;
pub mod demo;
pub mod export;
pub mod record;
pub mod search;

pub use bounds::{converse_check, eval_bound, eval_bounds, BoundReport, ConverseReport, Gamma};
pub use demo::{ldc_demo, DemoReport};
pub use export::{read_records, write_records, ExportFormat};
pub use record::{SearchRecord, Summary, TestMethod};
pub use search::{run_search, Checkpoint, Method, RunConfig, SearchOutcome};
