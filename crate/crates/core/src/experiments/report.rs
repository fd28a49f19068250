//! Report rows, CSV output and run manifests.

use super::config::ExperimentConfig;
use crate::error::Result;
use std::cmp::Ordering;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Seed of a row: a single seed, or `all` for aggregates over the seed list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SeedTag {
    Seed(u64),
    All,
}

impl std::fmt::Display for SeedTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedTag::Seed(s) => write!(f, "{s}"),
            SeedTag::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: &'static str,
    pub seed: SeedTag,
    /// `key=value` pairs joined by `;`.
    pub params: String,
    pub metric: String,
    pub value: f64,
}

impl ReportRow {
    pub fn new(
        experiment: &'static str,
        seed: SeedTag,
        params: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
    ) -> Self {
        ReportRow { experiment, seed, params: params.into(), metric: metric.into(), value }
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        self.seed
            .cmp(&other.seed)
            .then_with(|| self.metric.cmp(&other.metric))
            .then_with(|| self.params.cmp(&other.params))
    }
}

/// Output of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: &'static str,
    pub rows: Vec<ReportRow>,
    /// Failures of exact (non-statistical) checks.
    pub violations: usize,
    pub seeds: Vec<u64>,
}

pub const CSV_HEADER: [&str; 5] = ["experiment", "seed", "params", "metric", "value"];

impl Report {
    pub fn new(experiment: &'static str, mut rows: Vec<ReportRow>, violations: usize, seeds: Vec<u64>) -> Self {
        rows.sort_by(ReportRow::key_cmp);
        Report { experiment, rows, violations, seeds }
    }

    /// Rows with the given metric and params.
    pub fn values(&self, metric: &str, params: &str) -> Vec<(SeedTag, f64)> {
        self.rows.iter().filter(|r| r.metric == metric && r.params == params).map(|r| (r.seed, r.value)).collect()
    }

    /// The aggregate value of a metric, if present.
    pub fn aggregate(&self, metric: &str, params: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.seed == SeedTag::All && r.metric == metric && r.params == params).map(|r| r.value)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.experiment.to_string(),
                r.seed.to_string(),
                r.params.clone(),
                r.metric.clone(),
                r.value.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Write `<dir>/<experiment>.csv` and `<dir>/manifest`; returns both paths.
    pub fn write_outputs(&self, config: &ExperimentConfig, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        fs::create_dir_all(dir)?;
        let csv_path = dir.join(format!("{}.csv", self.experiment));
        self.write_csv(fs::File::create(&csv_path)?)?;
        let manifest_path = dir.join("manifest");
        fs::write(&manifest_path, self.manifest(config))?;
        Ok((csv_path, manifest_path))
    }

    /// Plain-text `key = value` manifest: config echo, code version, seeds.
    pub fn manifest(&self, config: &ExperimentConfig) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let mut s = String::new();
        s.push_str("# config\n");
        s.push_str(&config.to_text());
        s.push_str("# run\n");
        s.push_str(&format!("code_version = {} {}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("all_seeds = {}\n", seeds.join(", ")));
        s.push_str(&format!("rows = {}\n", self.rows.len()));
        s.push_str(&format!("violations = {}\n", self.violations));
        s.push_str(&format!("output = {}.csv\n", self.experiment));
        s
    }
}

/// `key=value;key=value` parameter string.
pub fn params(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}
