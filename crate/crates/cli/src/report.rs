use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliResult;

/// Metrics of one scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub scan: u32,
    pub ospa: f64,
    pub truth_count: f64,
    pub estimated_count: f64,
    pub expected_cardinality: f64,
    /// Absent when no track is reported.
    pub p_d_estimate: Option<f64>,
    pub wall_time_ms: f64,
}

/// Scan-averaged summary of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean_ospa: f64,
    /// Mean of `|estimated_count - truth_count|`.
    pub mean_cardinality_error: f64,
    /// Mean detection probability estimate over the window scans where one exists.
    pub mean_p_d: Option<f64>,
}

impl Aggregate {
    pub fn from_records(records: &[ScanRecord], pd_window: [u32; 2]) -> Self {
        let n = records.len().max(1) as f64;
        let mean_ospa = records.iter().map(|r| r.ospa).sum::<f64>() / n;
        let mean_cardinality_error =
            records.iter().map(|r| (r.estimated_count - r.truth_count).abs()).sum::<f64>() / n;
        let window: Vec<f64> = records
            .iter()
            .filter(|r| r.scan >= pd_window[0] && r.scan <= pd_window[1])
            .filter_map(|r| r.p_d_estimate)
            .collect();
        let mean_p_d = (!window.is_empty()).then(|| window.iter().sum::<f64>() / window.len() as f64);
        Self { mean_ospa, mean_cardinality_error, mean_p_d }
    }
}

/// Per-scan records of one filter run (or a pointwise average of runs).
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub seed: u64,
    pub records: Vec<ScanRecord>,
    pub aggregate: Aggregate,
}

impl RunReport {
    pub fn new(seed: u64, records: Vec<ScanRecord>, pd_window: [u32; 2]) -> Self {
        let aggregate = Aggregate::from_records(&records, pd_window);
        Self { seed, records, aggregate }
    }

    pub fn write_records<W: Write>(&self, out: W) -> CliResult<()> {
        write_rows(&self.records, out)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        self.write_records(File::create(path)?)
    }
}

pub fn read_records<R: Read>(input: R) -> CliResult<Vec<ScanRecord>> {
    read_rows(input)
}

pub(crate) fn write_rows<S: Serialize, W: Write>(rows: &[S], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn read_rows<S: for<'de> Deserialize<'de>, R: Read>(input: R) -> CliResult<Vec<S>> {
    let mut rows = Vec::new();
    for r in csv::Reader::from_reader(input).deserialize() {
        rows.push(r?);
    }
    Ok(rows)
}

/// Row of the per-run aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub mean_ospa: f64,
    pub mean_cardinality_error: f64,
    pub mean_p_d: Option<f64>,
}

impl From<&RunReport> for RunSummary {
    fn from(r: &RunReport) -> Self {
        Self {
            seed: r.seed,
            mean_ospa: r.aggregate.mean_ospa,
            mean_cardinality_error: r.aggregate.mean_cardinality_error,
            mean_p_d: r.aggregate.mean_p_d,
        }
    }
}

/// Plot-ready long-format row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub experiment: String,
    pub scan: u32,
    pub metric: String,
    pub value: f64,
}

pub fn long_format(experiment: &str, records: &[ScanRecord]) -> Vec<SeriesRow> {
    let mut rows = Vec::with_capacity(records.len() * 5);
    for r in records {
        let mut push = |metric: &str, value: f64| {
            rows.push(SeriesRow { experiment: experiment.to_string(), scan: r.scan, metric: metric.to_string(), value })
        };
        push("ospa", r.ospa);
        push("truth_count", r.truth_count);
        push("estimated_count", r.estimated_count);
        push("expected_cardinality", r.expected_cardinality);
        if let Some(p) = r.p_d_estimate {
            push("p_d_estimate", p);
        }
    }
    rows
}

/// Pointwise mean of equally long series. `p_d_estimate` is averaged over the
/// runs that report one on that scan.
pub fn average_series(reports: &[RunReport]) -> Vec<ScanRecord> {
    let Some(first) = reports.first() else {
        return Vec::new();
    };
    let n = reports.len() as f64;
    (0..first.records.len())
        .map(|k| {
            let mean = |f: &dyn Fn(&ScanRecord) -> f64| reports.iter().map(|r| f(&r.records[k])).sum::<f64>() / n;
            let pd: Vec<f64> = reports.iter().filter_map(|r| r.records[k].p_d_estimate).collect();
            ScanRecord {
                scan: first.records[k].scan,
                ospa: mean(&|r| r.ospa),
                truth_count: mean(&|r| r.truth_count),
                estimated_count: mean(&|r| r.estimated_count),
                expected_cardinality: mean(&|r| r.expected_cardinality),
                p_d_estimate: (!pd.is_empty()).then(|| pd.iter().sum::<f64>() / pd.len() as f64),
                wall_time_ms: mean(&|r| r.wall_time_ms),
            }
        })
        .collect()
}
