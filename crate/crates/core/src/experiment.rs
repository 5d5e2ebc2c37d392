//! The decomposition sweep: enumerates every parameter combination of a
//! strategy, clusters, converts, scores, and normalizes, producing one
//! deterministic record stream per run. Also houses best-record selection
//! and the quartile summaries behind the reporting commands.
//!
//! Parameter combinations are independent work units evaluated through
//! rayon; outputs are merged in canonical order (linkage, depth, weights,
//! requested cluster count) before normalization, so the worker count never
//! changes a byte of output.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::cluster::{
    cluster_vectors, convert_class_to_entity, convert_functionality_to_entity, entity_partition,
    ClusterError,
};
use crate::metrics::{self, MetricRecord, MetricValues};
use crate::model::{
    CodebaseModel, Decomposition, Diagnostic, DiagnosticKind, Functionality, Linkage, Provenance,
    Strategy,
};
use crate::sa::{MeasureWeights, SaError, SimilarityMatrices};
use crate::vectorize::{
    entity_embeddings, ev_vectors, AccessWeights, CallGraphSums, LabeledVectors, TraceSums,
    TypeWeights, VectorizeError,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("weight step {0} must be positive and divide 100")]
    BadStep(u32),
    #[error("depth range [{0}, {1}] must lie within [1, 32] with lower <= upper")]
    BadDepthRange(u32, u32),
    #[error("no linkages configured")]
    NoLinkages,
    #[error("strategy {strategy} is inapplicable: {reason}")]
    StrategyInapplicable { strategy: Strategy, reason: String },
    #[error("empty input")]
    EmptyInput,
    #[error(transparent)]
    Vectorize(#[from] VectorizeError),
    #[error(transparent)]
    Sa(#[from] SaError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
}

// ---------------------------------------------------------------------------
// Sweep configuration and parameter algebra
// ---------------------------------------------------------------------------

/// Parameter space of one strategy's sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub strategy: Strategy,
    /// Grid step for weight tuples, in percent.
    pub weight_step: u32,
    /// Inclusive call-graph depth range; only the call-graph strategy uses it.
    pub depth_range: (u32, u32),
    pub linkages: Vec<Linkage>,
}

impl SweepConfig {
    pub fn new(strategy: Strategy) -> Self {
        SweepConfig {
            strategy,
            weight_step: 10,
            depth_range: (1, 6),
            linkages: Linkage::ALL.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.weight_step == 0 || 100 % self.weight_step != 0 {
            return Err(ExperimentError::BadStep(self.weight_step));
        }
        let (lo, hi) = self.depth_range;
        if lo < 1 || hi > 32 || lo > hi {
            return Err(ExperimentError::BadDepthRange(lo, hi));
        }
        if self.linkages.is_empty() {
            return Err(ExperimentError::NoLinkages);
        }
        Ok(())
    }

    /// Linkages deduplicated in canonical (declaration) order.
    fn canonical_linkages(&self) -> Vec<Linkage> {
        let set: BTreeSet<Linkage> = self.linkages.iter().copied().collect();
        set.into_iter().collect()
    }
}

/// All non-negative compositions of 100 into `k` parts in multiples of
/// `step`, lexicographically ordered.
pub fn weight_grid(k: usize, step: u32) -> Result<Vec<Vec<f64>>, ExperimentError> {
    if step == 0 || 100 % step != 0 {
        return Err(ExperimentError::BadStep(step));
    }
    if k == 0 {
        return Err(ExperimentError::EmptyInput);
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(k: usize, remaining: u32, step: u32, current: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            current.push(remaining as f64);
            out.push(current.clone());
            current.pop();
            return;
        }
        let mut value = 0;
        while value <= remaining {
            current.push(value as f64);
            recurse(k - 1, remaining - value, step, current, out);
            current.pop();
            value += step;
        }
    }
    recurse(k, 100, step, &mut current, &mut out);
    Ok(out)
}

/// Cluster-count caps by codebase size: up to 10 entities allow 3
/// microservices, up to 20 allow 5, larger codebases allow 10. The minimum
/// is always 3.
pub fn cluster_count_range(entity_count: usize) -> (usize, usize) {
    let max = if entity_count <= 10 {
        3
    } else if entity_count <= 20 {
        5
    } else {
        10
    };
    (3, max)
}

// ---------------------------------------------------------------------------
// Sweep execution
// ---------------------------------------------------------------------------

/// One scored decomposition out of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub decomposition: Decomposition,
    pub metrics: MetricRecord,
}

#[derive(Debug, Default)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

struct RawRecord {
    decomposition: Decomposition,
    values: MetricValues,
}

type TupleOutput = (Vec<RawRecord>, Vec<Diagnostic>);

/// One parameter combination of the sweep.
struct TupleSpec {
    linkage: Linkage,
    depth: Option<u32>,
    weights: Option<Vec<f64>>,
}

impl TupleSpec {
    fn provenance(&self, strategy: Strategy, requested: usize) -> Provenance {
        let mut p = Provenance::new(strategy, self.linkage);
        p.depth = self.depth;
        p.requested_clusters = requested;
        if let Some(w) = &self.weights {
            match strategy {
                Strategy::Fvcg => p.type_weights = Some([w[0], w[1], w[2], w[3]]),
                Strategy::Fvsa => p.access_weights = Some([w[0], w[1]]),
                Strategy::Sa => p.measure_weights = Some([w[0], w[1], w[2], w[3]]),
                Strategy::Cv | Strategy::Ev => {}
            }
        }
        p
    }

    fn describe(&self, strategy: Strategy) -> String {
        let mut parts = vec![strategy.to_string(), self.linkage.to_string()];
        if let Some(d) = self.depth {
            parts.push(format!("depth={d}"));
        }
        if let Some(w) = &self.weights {
            let joined: Vec<String> = w.iter().map(|v| format!("{v}")).collect();
            parts.push(format!("weights={}", joined.join(",")));
        }
        parts.join(" ")
    }
}

/// Weight-independent vector state, computed once per sweep and shared by
/// every parameter combination.
enum StrategyInputs<'a> {
    CallGraph {
        functionalities: Vec<&'a Functionality>,
        /// sums[depth - lo][functionality index]
        sums: Vec<Vec<CallGraphSums>>,
        depth_lo: u32,
    },
    AccessSequence {
        functionalities: Vec<&'a Functionality>,
        sums: Vec<TraceSums>,
    },
    Similarity(SimilarityMatrices),
    Fixed(LabeledVectors),
}

fn inapplicable(strategy: Strategy, reason: impl Into<String>) -> ExperimentError {
    ExperimentError::StrategyInapplicable { strategy, reason: reason.into() }
}

fn build_inputs<'a>(
    model: &'a CodebaseModel,
    config: &SweepConfig,
) -> Result<(StrategyInputs<'a>, Vec<Diagnostic>), ExperimentError> {
    let strategy = config.strategy;
    let mut diagnostics = Vec::new();
    let inputs = match strategy {
        Strategy::Fvcg => {
            let mut functionalities: Vec<&Functionality> = model.functionalities.iter().collect();
            functionalities.sort_by(|a, b| a.name.cmp(&b.name));
            if functionalities.len() < 2 {
                return Err(inapplicable(strategy, "needs at least 2 functionalities"));
            }
            let index = model.index();
            let (lo, hi) = config.depth_range;
            let mut sums = Vec::with_capacity((hi - lo + 1) as usize);
            for depth in lo..=hi {
                let per_functionality: Result<Vec<CallGraphSums>, VectorizeError> = functionalities
                    .iter()
                    .map(|f| CallGraphSums::build_indexed(&index, model.embedding_dimension, f, depth))
                    .collect();
                sums.push(per_functionality?);
            }
            StrategyInputs::CallGraph { functionalities, sums, depth_lo: lo }
        }
        Strategy::Fvsa => {
            let embeddings = entity_embeddings(model)?;
            let mut functionalities: Vec<&Functionality> = model.functionalities.iter().collect();
            functionalities.sort_by(|a, b| a.name.cmp(&b.name));
            let mut kept = Vec::new();
            let mut sums = Vec::new();
            for f in functionalities {
                match TraceSums::build(f, &embeddings, model.embedding_dimension) {
                    Ok(s) => {
                        kept.push(f);
                        sums.push(s);
                    }
                    Err(VectorizeError::EmptyTrace(_)) => diagnostics.push(Diagnostic::new(
                        DiagnosticKind::SkippedEmptyTrace,
                        f.name.clone(),
                        "functionality has no entity accesses",
                    )),
                    Err(other) => return Err(other.into()),
                }
            }
            if kept.len() < 2 {
                return Err(inapplicable(strategy, "needs at least 2 functionalities with non-empty traces"));
            }
            StrategyInputs::AccessSequence { functionalities: kept, sums }
        }
        Strategy::Sa => {
            if model.functionalities.iter().all(|f| f.trace.is_empty()) {
                return Err(inapplicable(strategy, "no functionality has entity accesses"));
            }
            let matrices = SimilarityMatrices::build(model)
                .map_err(|e| inapplicable(strategy, e.to_string()))?;
            StrategyInputs::Similarity(matrices)
        }
        Strategy::Cv => {
            let (vectors, mut skips) = crate::vectorize::cv_vectors(model)?;
            diagnostics.append(&mut skips);
            if vectors.len() < 2 {
                return Err(inapplicable(strategy, "needs at least 2 classes with methods"));
            }
            StrategyInputs::Fixed(vectors)
        }
        Strategy::Ev => {
            let vectors = ev_vectors(model)?;
            if vectors.len() < 2 {
                return Err(inapplicable(strategy, "needs at least 2 entities"));
            }
            StrategyInputs::Fixed(vectors)
        }
    };
    Ok((inputs, diagnostics))
}

impl StrategyInputs<'_> {
    /// Builds the labeled vectors for one parameter combination. `Ok(None)`
    /// means the combination is skipped (zero denominator).
    fn vectors(&self, tuple: &TupleSpec) -> Result<Option<LabeledVectors>, ExperimentError> {
        match self {
            StrategyInputs::CallGraph { functionalities, sums, depth_lo } => {
                let weights = tuple.weights.as_ref().expect("call-graph tuples carry weights");
                let weights = TypeWeights { controller: weights[0], service: weights[1], entity: weights[2], intermediate: weights[3] };
                let depth = tuple.depth.expect("call-graph tuples carry a depth");
                let per_depth = &sums[(depth - depth_lo) as usize];
                let mut entries = Vec::with_capacity(functionalities.len());
                for (f, s) in functionalities.iter().zip(per_depth) {
                    match s.combine(&weights) {
                        Ok(v) => entries.push((f.name.clone(), v)),
                        Err(VectorizeError::ZeroDenominator) => return Ok(None),
                        Err(other) => return Err(other.into()),
                    }
                }
                Ok(Some(LabeledVectors::new(entries)?))
            }
            StrategyInputs::AccessSequence { functionalities, sums } => {
                let weights = tuple.weights.as_ref().expect("access tuples carry weights");
                let weights = AccessWeights { read: weights[0], write: weights[1] };
                let mut entries = Vec::with_capacity(functionalities.len());
                for (f, s) in functionalities.iter().zip(sums) {
                    match s.combine(&weights) {
                        Ok(v) => entries.push((f.name.clone(), v)),
                        Err(VectorizeError::ZeroDenominator) => return Ok(None),
                        Err(other) => return Err(other.into()),
                    }
                }
                Ok(Some(LabeledVectors::new(entries)?))
            }
            StrategyInputs::Similarity(matrices) => {
                let w = tuple.weights.as_ref().expect("similarity tuples carry weights");
                let weights = MeasureWeights { access: w[0], read: w[1], write: w[2], sequence: w[3] };
                Ok(Some(matrices.combine(&weights)))
            }
            StrategyInputs::Fixed(vectors) => Ok(Some(vectors.clone())),
        }
    }
}

fn enumerate_tuples(config: &SweepConfig) -> Result<Vec<TupleSpec>, ExperimentError> {
    let linkages = config.canonical_linkages();
    let mut tuples = Vec::new();
    match config.strategy {
        Strategy::Fvcg => {
            let grid = weight_grid(4, config.weight_step)?;
            let (lo, hi) = config.depth_range;
            for linkage in linkages {
                for depth in lo..=hi {
                    for weights in &grid {
                        tuples.push(TupleSpec { linkage, depth: Some(depth), weights: Some(weights.clone()) });
                    }
                }
            }
        }
        Strategy::Fvsa => {
            let grid = weight_grid(2, config.weight_step)?;
            for linkage in linkages {
                for weights in &grid {
                    tuples.push(TupleSpec { linkage, depth: None, weights: Some(weights.clone()) });
                }
            }
        }
        Strategy::Sa => {
            let grid = weight_grid(4, config.weight_step)?;
            for linkage in linkages {
                for weights in &grid {
                    tuples.push(TupleSpec { linkage, depth: None, weights: Some(weights.clone()) });
                }
            }
        }
        Strategy::Cv | Strategy::Ev => {
            for linkage in linkages {
                tuples.push(TupleSpec { linkage, depth: None, weights: None });
            }
        }
    }
    Ok(tuples)
}

/// Escalates the requested cluster count from 3 upward: cut, convert,
/// deduplicate by actual cluster count (keeping the lowest requested count
/// per actual count), and stop once the actual count exceeds the cap or the
/// requested count reaches the leaf count.
fn process_tuple(
    model: &CodebaseModel,
    strategy: Strategy,
    inputs: &StrategyInputs<'_>,
    tuple: &TupleSpec,
    max_clusters: usize,
) -> Result<TupleOutput, ExperimentError> {
    let mut diagnostics = Vec::new();
    let Some(vectors) = inputs.vectors(tuple)? else {
        diagnostics.push(Diagnostic::new(
            DiagnosticKind::SkippedCombination,
            tuple.describe(strategy),
            "all contributions have zero weight for some functionality",
        ));
        return Ok((Vec::new(), diagnostics));
    };
    if vectors.len() < 2 {
        diagnostics.push(Diagnostic::new(
            DiagnosticKind::SkippedCombination,
            tuple.describe(strategy),
            "fewer than 2 vectors to cluster",
        ));
        return Ok((Vec::new(), diagnostics));
    }
    let dendrogram = cluster_vectors(&vectors, tuple.linkage)?;
    let leaves = dendrogram.leaf_count();
    let mut records = Vec::new();
    let mut seen_actual: BTreeSet<usize> = BTreeSet::new();
    let (min_requested, _) = cluster_count_range(model.entities.len());
    for requested in min_requested..=leaves {
        let groups = crate::cluster::cut(&dendrogram, requested)?;
        let provenance = tuple.provenance(strategy, requested);
        let decomposition = match strategy {
            Strategy::Sa | Strategy::Ev => {
                Some(entity_partition(&groups, provenance).expect("cut groups partition the entities"))
            }
            Strategy::Cv => {
                let (d, mut diag) = convert_class_to_entity(&groups, model, provenance);
                diagnostics.append(&mut diag);
                d
            }
            Strategy::Fvcg | Strategy::Fvsa => {
                let (d, mut diag) = convert_functionality_to_entity(&groups, model, provenance);
                diagnostics.append(&mut diag);
                d
            }
        };
        let Some(decomposition) = decomposition else { continue };
        let actual = decomposition.cluster_count();
        if actual > max_clusters {
            break;
        }
        if seen_actual.insert(actual) {
            let (values, mut diag) = metrics::evaluate(&decomposition, model);
            diagnostics.append(&mut diag);
            records.push(RawRecord { decomposition, values });
        }
    }
    Ok((records, diagnostics))
}

fn run_sweep_raw(
    model: &CodebaseModel,
    config: &SweepConfig,
) -> Result<TupleOutput, ExperimentError> {
    config.validate()?;
    let (inputs, mut diagnostics) = build_inputs(model, config)?;
    let tuples = enumerate_tuples(config)?;
    let (_, max_clusters) = cluster_count_range(model.entities.len());

    let outputs: Result<Vec<TupleOutput>, ExperimentError> = tuples
        .par_iter()
        .map(|tuple| process_tuple(model, config.strategy, &inputs, tuple, max_clusters))
        .collect();

    let mut records = Vec::new();
    for (mut tuple_records, mut tuple_diagnostics) in outputs? {
        records.append(&mut tuple_records);
        diagnostics.append(&mut tuple_diagnostics);
    }
    Ok((records, diagnostics))
}

/// Normalizes complexity over the record set and fills in the combined
/// metric. The normalization set is everything generated within one run.
fn finalize(codebase: &str, raw: Vec<RawRecord>) -> Vec<SweepRecord> {
    let max_complexity =
        raw.iter().map(|r| r.values.complexity).fold(0.0f64, f64::max);
    raw.into_iter()
        .map(|r| {
            let uniform = metrics::uniform_complexity(r.values.complexity, max_complexity)
                .expect("complexity is bounded by the set maximum");
            let combined = metrics::combined(r.values.cohesion, r.values.coupling, uniform)
                .expect("metrics are within range by construction");
            let metrics = MetricRecord {
                codebase: codebase.to_string(),
                provenance: r.decomposition.provenance.clone(),
                cohesion: r.values.cohesion,
                coupling: r.values.coupling,
                complexity: r.values.complexity,
                uniform_complexity: uniform,
                combined,
            };
            SweepRecord { decomposition: r.decomposition, metrics }
        })
        .collect()
}

/// Full sweep of one strategy. Records are ordered by parameter tuple
/// (linkage, depth, weights) and then by requested cluster count; uniform
/// complexity is normalized over this sweep's output.
pub fn run_sweep(model: &CodebaseModel, config: &SweepConfig) -> Result<SweepOutput, ExperimentError> {
    let (raw, diagnostics) = run_sweep_raw(model, config)?;
    Ok(SweepOutput { records: finalize(&model.name, raw), diagnostics })
}

/// Sweeps several strategies, normalizing uniform complexity across the
/// union of their records. A strategy that is inapplicable to the model is
/// logged as a diagnostic and skipped; other errors abort.
pub fn run_sweeps(
    model: &CodebaseModel,
    configs: &[SweepConfig],
) -> Result<SweepOutput, ExperimentError> {
    let mut raw = Vec::new();
    let mut diagnostics = Vec::new();
    for config in configs {
        match run_sweep_raw(model, config) {
            Ok((mut records, mut diag)) => {
                raw.append(&mut records);
                diagnostics.append(&mut diag);
            }
            Err(ExperimentError::StrategyInapplicable { strategy, reason }) => {
                diagnostics.push(Diagnostic::new(
                    DiagnosticKind::StrategyInapplicable,
                    strategy.to_string(),
                    reason,
                ));
            }
            Err(other) => return Err(other),
        }
    }
    Ok(SweepOutput { records: finalize(&model.name, raw), diagnostics })
}

// ---------------------------------------------------------------------------
// Selection and summaries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Cohesion,
    Coupling,
    Complexity,
    UniformComplexity,
    Combined,
}

impl MetricName {
    pub const ALL: [MetricName; 5] = [
        MetricName::Cohesion,
        MetricName::Coupling,
        MetricName::Complexity,
        MetricName::UniformComplexity,
        MetricName::Combined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::Cohesion => "cohesion",
            MetricName::Coupling => "coupling",
            MetricName::Complexity => "complexity",
            MetricName::UniformComplexity => "uniformComplexity",
            MetricName::Combined => "combined",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        MetricName::ALL.into_iter().find(|m| m.as_str() == name)
    }

    pub fn value(self, record: &MetricRecord) -> f64 {
        match self {
            MetricName::Cohesion => record.cohesion,
            MetricName::Coupling => record.coupling,
            MetricName::Complexity => record.complexity,
            MetricName::UniformComplexity => record.uniform_complexity,
            MetricName::Combined => record.combined,
        }
    }

    /// Cohesion improves upward; everything else downward.
    pub fn default_direction(self) -> Direction {
        match self {
            MetricName::Cohesion => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }
}

impl std::fmt::Display for MetricName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Best record per (codebase, strategy, actual cluster count). Metric ties
/// break toward the lexicographically smallest parameter tuple.
pub fn select_best(
    records: &[SweepRecord],
    metric: MetricName,
    direction: Direction,
) -> Result<Vec<SweepRecord>, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let mut best: BTreeMap<(String, Strategy, usize), &SweepRecord> = BTreeMap::new();
    for record in records {
        let key = (
            record.metrics.codebase.clone(),
            record.metrics.provenance.strategy,
            record.metrics.provenance.actual_clusters,
        );
        let value = metric.value(&record.metrics);
        best.entry(key)
            .and_modify(|current| {
                let current_value = metric.value(&current.metrics);
                let improves = match direction {
                    Direction::Minimize => value < current_value,
                    Direction::Maximize => value > current_value,
                };
                let ties = value == current_value
                    && record.metrics.provenance.param_key() < current.metrics.provenance.param_key();
                if improves || ties {
                    *current = record;
                }
            })
            .or_insert(record);
    }
    Ok(best.into_values().cloned().collect())
}

/// Record fields usable as grouping keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupField {
    Codebase,
    Strategy,
    Linkage,
    Depth,
    RequestedN,
    ActualN,
}

impl GroupField {
    pub const ALL: [GroupField; 6] = [
        GroupField::Codebase,
        GroupField::Strategy,
        GroupField::Linkage,
        GroupField::Depth,
        GroupField::RequestedN,
        GroupField::ActualN,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupField::Codebase => "codebase",
            GroupField::Strategy => "strategy",
            GroupField::Linkage => "linkage",
            GroupField::Depth => "depth",
            GroupField::RequestedN => "requestedN",
            GroupField::ActualN => "actualN",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        GroupField::ALL.into_iter().find(|f| f.as_str() == name)
    }

    pub fn value(self, record: &MetricRecord) -> String {
        match self {
            GroupField::Codebase => record.codebase.clone(),
            GroupField::Strategy => record.provenance.strategy.to_string(),
            GroupField::Linkage => record.provenance.linkage.to_string(),
            GroupField::Depth => record.provenance.depth.map_or(String::new(), |d| d.to_string()),
            GroupField::RequestedN => record.provenance.requested_clusters.to_string(),
            GroupField::ActualN => record.provenance.actual_clusters.to_string(),
        }
    }
}

/// Five-number summary plus outliers for one group of records.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GroupSummary {
    pub group: BTreeMap<String, String>,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub outliers: Vec<f64>,
}

fn median_of(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Quartiles by the median-of-halves rule: for odd counts the median belongs
/// to both halves. Outliers lie beyond 1.5 IQR from the quartiles.
pub fn summarize(
    records: &[MetricRecord],
    group_by: &[GroupField],
    metric: MetricName,
) -> Result<Vec<GroupSummary>, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let mut groups: BTreeMap<Vec<String>, Vec<f64>> = BTreeMap::new();
    for record in records {
        let key: Vec<String> = group_by.iter().map(|f| f.value(record)).collect();
        groups.entry(key).or_default().push(metric.value(record));
    }
    let summaries = groups
        .into_iter()
        .map(|(key, mut values)| {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            let median = median_of(&values);
            let lower = &values[0..=(n - 1) / 2];
            let upper = &values[n / 2..];
            let q1 = median_of(lower);
            let q3 = median_of(upper);
            let iqr = q3 - q1;
            let outliers: Vec<f64> = values
                .iter()
                .copied()
                .filter(|v| *v < q1 - 1.5 * iqr || *v > q3 + 1.5 * iqr)
                .collect();
            let group = group_by
                .iter()
                .map(|f| f.as_str().to_string())
                .zip(key)
                .collect();
            GroupSummary { group, count: n, min: values[0], q1, median, q3, max: values[n - 1], outliers }
        })
        .collect();
    Ok(summaries)
}
