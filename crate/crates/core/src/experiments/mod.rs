//! Seeded experiment campaigns producing CSV reports.
//!
//! Every runner validates its configuration first, computes per-seed results
//! in parallel, and returns rows sorted by seed and metric, so outputs are
//! byte-identical for a given configuration regardless of thread count.

pub mod config;
pub mod report;
mod runs;
mod selftest;

pub use config::{ExperimentConfig, ExperimentKind, SeedSpec};
pub use report::{Report, ReportRow, SeedTag};
pub use runs::{
    coalescence_pairs, run_coalescence, run_monotone_tilt, run_quantile_demo, run_shape, run_uniqueness_proxy,
    uniqueness_gaps, CoalescencePair, UniquenessSample,
};
pub use selftest::{exact_identity_suite, oracle_equivalence, run_selftest, IdentityCounts, OracleCounts};

use crate::error::Result;

/// Validate `config` and run the experiment it names.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Shape => run_shape(config),
        ExperimentKind::Coalescence => run_coalescence(config),
        ExperimentKind::Monotone => run_monotone_tilt(config),
        ExperimentKind::Uniqueness => run_uniqueness_proxy(config),
        ExperimentKind::Quantile => run_quantile_demo(config),
        ExperimentKind::Selftest => run_selftest(config),
    }
}
