//! File formats for results: the metrics CSV, and the comparison,
//! regression, and summary reports consumed as JSON.
//!
//! The CSV column order is fixed; metric values carry six decimal places,
//! weight and depth cells are blank for strategies that lack them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::experiment::{GroupSummary, MetricName};
use crate::metrics::MetricRecord;
use crate::model::{Linkage, Provenance, Strategy};
use crate::stats::{
    drop_one_regressions, ols_fit, welch_t_test, OlsResult, StatsError, WelchResult,
};

pub const CSV_COLUMNS: [&str; 21] = [
    "codebase",
    "strategy",
    "linkage",
    "depth",
    "wc",
    "ws",
    "we",
    "wi",
    "wr",
    "ww",
    "wAccess",
    "wRead",
    "wWrite",
    "wSequence",
    "requestedN",
    "actualN",
    "cohesion",
    "coupling",
    "complexity",
    "uniformComplexity",
    "combined",
];

/// Significance level used to flag comparisons; reporting metadata, never
/// control flow.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("io error on '{}': {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("row {row}: bad value '{value}' in column '{column}'")]
    BadCell { row: usize, column: String, value: String },
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("unknown metric '{0}'")]
    UnknownMetric(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

// ---------------------------------------------------------------------------
// Metrics CSV
// ---------------------------------------------------------------------------

fn weight_cell(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| format!("{v}"))
}

fn record_row(record: &MetricRecord) -> Vec<String> {
    let p = &record.provenance;
    let tw = p.type_weights;
    let aw = p.access_weights;
    let mw = p.measure_weights;
    vec![
        record.codebase.clone(),
        p.strategy.to_string(),
        p.linkage.to_string(),
        p.depth.map_or(String::new(), |d| d.to_string()),
        weight_cell(tw.map(|w| w[0])),
        weight_cell(tw.map(|w| w[1])),
        weight_cell(tw.map(|w| w[2])),
        weight_cell(tw.map(|w| w[3])),
        weight_cell(aw.map(|w| w[0])),
        weight_cell(aw.map(|w| w[1])),
        weight_cell(mw.map(|w| w[0])),
        weight_cell(mw.map(|w| w[1])),
        weight_cell(mw.map(|w| w[2])),
        weight_cell(mw.map(|w| w[3])),
        p.requested_clusters.to_string(),
        p.actual_clusters.to_string(),
        format!("{:.6}", record.cohesion),
        format!("{:.6}", record.coupling),
        format!("{:.6}", record.complexity),
        format!("{:.6}", record.uniform_complexity),
        format!("{:.6}", record.combined),
    ]
}

/// Renders records as CSV with the fixed column order.
pub fn render_metrics_csv(records: &[MetricRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_COLUMNS).expect("writing to memory cannot fail");
    for record in records {
        writer.write_record(record_row(record)).expect("writing to memory cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("no partial flush")).expect("csv is utf-8")
}

pub fn write_metrics_csv(records: &[MetricRecord], path: impl AsRef<Path>) -> Result<(), ReportError> {
    let path = path.as_ref();
    std::fs::write(path, render_metrics_csv(records))
        .map_err(|source| ReportError::Io { path: path.to_path_buf(), source })
}

fn parse_cell<T: std::str::FromStr>(
    row: usize,
    column: &str,
    value: &str,
) -> Result<T, ReportError> {
    value.parse().map_err(|_| ReportError::BadCell {
        row,
        column: column.to_string(),
        value: value.to_string(),
    })
}

fn optional_cell(row: usize, column: &str, value: &str) -> Result<Option<f64>, ReportError> {
    if value.is_empty() {
        Ok(None)
    } else {
        parse_cell(row, column, value).map(Some)
    }
}

/// Reads a metrics CSV back into records. Columns are located by header
/// name, so column order and extra columns are tolerated.
pub fn read_metrics_csv(path: impl AsRef<Path>) -> Result<Vec<MetricRecord>, ReportError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ReportError::Io { path: path.to_path_buf(), source })?;
    parse_metrics_csv(&text)
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricRecord>, ReportError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| -> Result<usize, ReportError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ReportError::MissingColumn(name.to_string()))
    };
    let mut columns = BTreeMap::new();
    for name in CSV_COLUMNS {
        columns.insert(name, column(name)?);
    }
    let cell = |record: &csv::StringRecord, name: &str| -> String {
        record.get(columns[name]).unwrap_or("").to_string()
    };

    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let line = i + 2; // header is line 1
        let strategy_text = cell(&row, "strategy");
        let strategy = Strategy::ALL
            .into_iter()
            .find(|s| s.as_str() == strategy_text)
            .ok_or_else(|| ReportError::BadCell {
                row: line,
                column: "strategy".into(),
                value: strategy_text.clone(),
            })?;
        let linkage_text = cell(&row, "linkage");
        let linkage = Linkage::ALL
            .into_iter()
            .find(|l| l.as_str() == linkage_text)
            .ok_or_else(|| ReportError::BadCell {
                row: line,
                column: "linkage".into(),
                value: linkage_text.clone(),
            })?;
        let depth = {
            let text = cell(&row, "depth");
            if text.is_empty() { None } else { Some(parse_cell::<u32>(line, "depth", &text)?) }
        };
        let quad = |names: [&str; 4]| -> Result<Option<[f64; 4]>, ReportError> {
            let mut values = [0.0; 4];
            let mut present = 0;
            for (slot, name) in values.iter_mut().zip(names) {
                if let Some(v) = optional_cell(line, name, &cell(&row, name))? {
                    *slot = v;
                    present += 1;
                }
            }
            Ok((present == 4).then_some(values))
        };
        let type_weights = quad(["wc", "ws", "we", "wi"])?;
        let measure_weights = quad(["wAccess", "wRead", "wWrite", "wSequence"])?;
        let access_weights = {
            let r = optional_cell(line, "wr", &cell(&row, "wr"))?;
            let w = optional_cell(line, "ww", &cell(&row, "ww"))?;
            match (r, w) {
                (Some(r), Some(w)) => Some([r, w]),
                _ => None,
            }
        };
        let provenance = Provenance {
            strategy,
            linkage,
            depth,
            type_weights,
            access_weights,
            measure_weights,
            requested_clusters: parse_cell(line, "requestedN", &cell(&row, "requestedN"))?,
            actual_clusters: parse_cell(line, "actualN", &cell(&row, "actualN"))?,
        };
        out.push(MetricRecord {
            codebase: cell(&row, "codebase"),
            provenance,
            cohesion: parse_cell(line, "cohesion", &cell(&row, "cohesion"))?,
            coupling: parse_cell(line, "coupling", &cell(&row, "coupling"))?,
            complexity: parse_cell(line, "complexity", &cell(&row, "complexity"))?,
            uniform_complexity: parse_cell(
                line,
                "uniformComplexity",
                &cell(&row, "uniformComplexity"),
            )?,
            combined: parse_cell(line, "combined", &cell(&row, "combined"))?,
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Comparison report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonEntry {
    pub a: String,
    pub b: String,
    #[serde(rename = "clusterCount", skip_serializing_if = "Option::is_none")]
    pub cluster_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub welch: Option<WelchResult>,
    /// Reject the equal-means hypothesis at the significance level.
    #[serde(rename = "rejectEqualMeans", skip_serializing_if = "Option::is_none")]
    pub reject_equal_means: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub metric: String,
    pub significance: f64,
    pub comparisons: Vec<ComparisonEntry>,
}

impl ComparisonReport {
    /// True when any group was too small to test; callers map this to a
    /// dedicated exit code while the other entries proceed.
    pub fn has_sample_errors(&self) -> bool {
        self.comparisons.iter().any(|c| c.error.is_some())
    }
}

fn compare_pair(
    a_label: &str,
    b_label: &str,
    cluster_count: Option<usize>,
    a: &[f64],
    b: &[f64],
) -> ComparisonEntry {
    match welch_t_test(a, b) {
        Ok(welch) => ComparisonEntry {
            a: a_label.to_string(),
            b: b_label.to_string(),
            cluster_count,
            reject_equal_means: Some(welch.p < SIGNIFICANCE_LEVEL),
            welch: Some(welch),
            error: None,
        },
        Err(err) => ComparisonEntry {
            a: a_label.to_string(),
            b: b_label.to_string(),
            cluster_count,
            welch: None,
            reject_equal_means: None,
            error: Some(err.to_string()),
        },
    }
}

/// Welch comparisons between every pair of labeled samples, optionally per
/// actual cluster count (union of counts seen on either side).
pub fn build_comparison(
    samples: &[(String, Vec<MetricRecord>)],
    metric: MetricName,
    by_clusters: bool,
) -> ComparisonReport {
    let mut comparisons = Vec::new();
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let (a_label, a_records) = &samples[i];
            let (b_label, b_records) = &samples[j];
            if by_clusters {
                let mut counts: Vec<usize> = a_records
                    .iter()
                    .chain(b_records)
                    .map(|r| r.provenance.actual_clusters)
                    .collect();
                counts.sort_unstable();
                counts.dedup();
                for count in counts {
                    let a: Vec<f64> = a_records
                        .iter()
                        .filter(|r| r.provenance.actual_clusters == count)
                        .map(|r| metric.value(r))
                        .collect();
                    let b: Vec<f64> = b_records
                        .iter()
                        .filter(|r| r.provenance.actual_clusters == count)
                        .map(|r| metric.value(r))
                        .collect();
                    comparisons.push(compare_pair(a_label, b_label, Some(count), &a, &b));
                }
            } else {
                let a: Vec<f64> = a_records.iter().map(|r| metric.value(r)).collect();
                let b: Vec<f64> = b_records.iter().map(|r| metric.value(r)).collect();
                comparisons.push(compare_pair(a_label, b_label, None, &a, &b));
            }
        }
    }
    ComparisonReport {
        metric: metric.as_str().to_string(),
        significance: SIGNIFICANCE_LEVEL,
        comparisons,
    }
}

// ---------------------------------------------------------------------------
// Regression report
// ---------------------------------------------------------------------------

/// Numeric view of a record field for regression designs. Linkage is encoded
/// ordinally (single 0, complete 1, average 2). Returns `None` when the
/// record does not carry the parameter.
pub fn param_value(record: &MetricRecord, name: &str) -> Result<Option<f64>, ReportError> {
    let p = &record.provenance;
    let value = match name {
        "depth" => p.depth.map(f64::from),
        "wc" => p.type_weights.map(|w| w[0]),
        "ws" => p.type_weights.map(|w| w[1]),
        "we" => p.type_weights.map(|w| w[2]),
        "wi" => p.type_weights.map(|w| w[3]),
        "wr" => p.access_weights.map(|w| w[0]),
        "ww" => p.access_weights.map(|w| w[1]),
        "wAccess" => p.measure_weights.map(|w| w[0]),
        "wRead" => p.measure_weights.map(|w| w[1]),
        "wWrite" => p.measure_weights.map(|w| w[2]),
        "wSequence" => p.measure_weights.map(|w| w[3]),
        "linkage" => Some(p.linkage as u8 as f64),
        "requestedN" => Some(p.requested_clusters as f64),
        "actualN" => Some(p.actual_clusters as f64),
        other => return Err(ReportError::UnknownColumn(other.to_string())),
    };
    Ok(value)
}

pub fn parse_metric_name(name: &str) -> Result<MetricName, ReportError> {
    MetricName::parse(name).ok_or_else(|| ReportError::UnknownMetric(name.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct DropOneEntry {
    /// Name of the omitted parameter column.
    pub omitted: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<OlsResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RegressionReport {
    pub metric: String,
    pub parameters: Vec<String>,
    pub intercept: bool,
    pub observations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full: Option<OlsResult>,
    #[serde(rename = "fullError", skip_serializing_if = "Option::is_none")]
    pub full_error: Option<String>,
    #[serde(rename = "dropOne", skip_serializing_if = "Option::is_none")]
    pub drop_one: Option<Vec<DropOneEntry>>,
}

/// Regresses the metric on the named parameter columns over all records that
/// carry every one of them. A singular full design (the usual weight-family
/// multicollinearity) falls back to one regression per omitted column.
pub fn build_regression(
    records: &[MetricRecord],
    params: &[String],
    metric: MetricName,
    with_intercept: bool,
) -> Result<RegressionReport, ReportError> {
    if params.is_empty() {
        return Err(ReportError::UnknownColumn("(no parameters given)".into()));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    for record in records {
        let mut row = Vec::with_capacity(params.len());
        let mut complete = true;
        for name in params {
            match param_value(record, name)? {
                Some(v) => row.push(v),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            rows.push(row);
            y.push(metric.value(record));
        }
    }

    let observations = rows.len();
    match ols_fit(&rows, &y, with_intercept) {
        Ok(full) => Ok(RegressionReport {
            metric: metric.as_str().to_string(),
            parameters: params.to_vec(),
            intercept: with_intercept,
            observations,
            full: Some(full),
            full_error: None,
            drop_one: None,
        }),
        Err(StatsError::SingularDesign) => {
            let entries = drop_one_regressions(&rows, &y, with_intercept)
                .into_iter()
                .map(|sub| match sub.result {
                    Ok(result) => DropOneEntry {
                        omitted: params[sub.omitted_column].clone(),
                        result: Some(result),
                        error: None,
                    },
                    Err(err) => DropOneEntry {
                        omitted: params[sub.omitted_column].clone(),
                        result: None,
                        error: Some(err.to_string()),
                    },
                })
                .collect();
            Ok(RegressionReport {
                metric: metric.as_str().to_string(),
                parameters: params.to_vec(),
                intercept: with_intercept,
                observations,
                full: None,
                full_error: Some(StatsError::SingularDesign.to_string()),
                drop_one: Some(entries),
            })
        }
        Err(other) => Err(other.into()),
    }
}

// ---------------------------------------------------------------------------
// Summary report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct SummaryReport {
    pub metric: String,
    #[serde(rename = "groupBy")]
    pub group_by: Vec<String>,
    pub groups: Vec<GroupSummary>,
}

/// Pretty JSON with a trailing newline; all report types serialize with
/// deterministic key order.
pub fn render_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    text.push('\n');
    text
}
