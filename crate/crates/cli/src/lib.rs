//! Batch front end: scenario files in, JSON reports and CSV tables out.

pub mod golden;
pub mod pipeline;
pub mod report;
pub mod scenario;

pub use pipeline::{run_scenario, Pipeline};
pub use report::Report;
pub use scenario::Scenario;
