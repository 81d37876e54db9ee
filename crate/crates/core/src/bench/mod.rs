//! Benchmark harness: run records, cloud files, distribution specs, the exact
//! assignment baseline and the desk-scale experiments.

pub mod assignment;
pub mod cloudfile;
pub mod experiments;
pub mod genspec;
pub mod record;
pub mod runtime;
pub mod stats;

pub use cloudfile::{load_cloud, read_cloud, save_cloud, write_cloud};
pub use genspec::DistributionSpec;
pub use record::{read_records, write_records, RunRecord, CSV_HEADER};
