//! Scores an entity decomposition against a codebase model: cohesion,
//! coupling, complexity, uniform complexity, and the combined metric.
//!
//! Accesses to entities the decomposition does not cover (legitimately
//! dropped during conversion) are skipped everywhere; `evaluate` reports the
//! skipped entities once per run.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    Access, AccessMode, CodebaseModel, Decomposition, Diagnostic, DiagnosticKind, Provenance,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("complexity {value} exceeds the normalization maximum {max}")]
    ValueExceedsMax { value: f64, max: f64 },
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
}

/// Maximal run of same-cluster accesses within one functionality's trace.
/// Each run is one local transaction of the distributed transaction the
/// functionality would become.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTransaction {
    pub cluster_index: usize,
    pub accesses: Vec<Access>,
}

/// Splits a trace into local transactions under the given entity->cluster
/// assignment. Accesses to unassigned entities are skipped.
pub fn local_transactions(
    trace: &[Access],
    assignment: &BTreeMap<&str, usize>,
) -> Vec<LocalTransaction> {
    let mut out: Vec<LocalTransaction> = Vec::new();
    for access in trace {
        let Some(&cluster) = assignment.get(access.entity.as_str()) else { continue };
        match out.last_mut() {
            Some(last) if last.cluster_index == cluster => last.accesses.push(access.clone()),
            _ => out.push(LocalTransaction { cluster_index: cluster, accesses: vec![access.clone()] }),
        }
    }
    out
}

/// Mean over clusters of the cluster cohesion: the average share of the
/// cluster's entities that a functionality touching the cluster accesses.
/// Clusters touched by no functionality score 0.
pub fn cohesion(decomposition: &Decomposition, model: &CodebaseModel) -> f64 {
    let assignment = decomposition.assignment();
    let k = decomposition.cluster_count();
    // touched[c] accumulates, per functionality touching cluster c, the
    // number of distinct cluster entities it accesses.
    let mut shares: Vec<Vec<f64>> = vec![Vec::new(); k];
    for f in &model.functionalities {
        let mut per_cluster: BTreeMap<usize, BTreeSet<&str>> = BTreeMap::new();
        for access in &f.trace {
            if let Some(&cluster) = assignment.get(access.entity.as_str()) {
                per_cluster.entry(cluster).or_default().insert(access.entity.as_str());
            }
        }
        for (cluster, entities) in per_cluster {
            let size = decomposition.clusters()[cluster].len();
            shares[cluster].push(entities.len() as f64 / size as f64);
        }
    }
    let cluster_cohesion: Vec<f64> = shares
        .iter()
        .map(|s| if s.is_empty() { 0.0 } else { s.iter().sum::<f64>() / s.len() as f64 })
        .collect();
    cluster_cohesion.iter().sum::<f64>() / k as f64
}

/// Mean over ordered pairs of distinct clusters of the share of the target
/// cluster's entities exposed to the source cluster: entities accessed
/// immediately after an access in the source cluster. 0 for one cluster.
pub fn coupling(decomposition: &Decomposition, model: &CodebaseModel) -> f64 {
    let k = decomposition.cluster_count();
    if k < 2 {
        return 0.0;
    }
    let assignment = decomposition.assignment();
    let mut exposed: BTreeMap<(usize, usize), BTreeSet<&str>> = BTreeMap::new();
    for f in &model.functionalities {
        let assigned: Vec<(&str, usize)> = f
            .trace
            .iter()
            .filter_map(|a| assignment.get(a.entity.as_str()).map(|&c| (a.entity.as_str(), c)))
            .collect();
        for pair in assigned.windows(2) {
            let ((_, c1), (e2, c2)) = (pair[0], pair[1]);
            if c1 != c2 {
                exposed.entry((c1, c2)).or_default().insert(e2);
            }
        }
    }
    let mut total = 0.0;
    for c1 in 0..k {
        for c2 in 0..k {
            if c1 == c2 {
                continue;
            }
            let known = exposed.get(&(c1, c2)).map_or(0, |s| s.len());
            total += known as f64 / decomposition.clusters()[c2].len() as f64;
        }
    }
    total / (k * (k - 1)) as f64
}

/// Migration-effort complexity. A functionality is distributed when its
/// trace splits into two or more local transactions; each distinct
/// (entity, mode) pair inside each local transaction then costs one per
/// other distributed functionality that accesses the entity in the opposite
/// mode. Non-distributed functionalities cost nothing and induce no cost.
pub fn complexity(decomposition: &Decomposition, model: &CodebaseModel) -> f64 {
    let assignment = decomposition.assignment();
    let transactions: Vec<(&str, Vec<LocalTransaction>)> = model
        .functionalities
        .iter()
        .map(|f| (f.name.as_str(), local_transactions(&f.trace, &assignment)))
        .collect();

    // Distributed readers/writers per entity.
    let mut readers: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut writers: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (name, transactions) in &transactions {
        if transactions.len() < 2 {
            continue;
        }
        for lt in transactions {
            for access in &lt.accesses {
                let target = match access.mode {
                    AccessMode::R => &mut readers,
                    AccessMode::W => &mut writers,
                };
                target.entry(access.entity.as_str()).or_default().insert(name);
            }
        }
    }

    let mut total = 0u64;
    for (name, transactions) in &transactions {
        if transactions.len() < 2 {
            continue;
        }
        for lt in transactions {
            let mut seen: BTreeSet<(&str, AccessMode)> = BTreeSet::new();
            for access in &lt.accesses {
                if !seen.insert((access.entity.as_str(), access.mode)) {
                    continue;
                }
                let peers = match access.mode {
                    AccessMode::R => writers.get(access.entity.as_str()),
                    AccessMode::W => readers.get(access.entity.as_str()),
                };
                if let Some(peers) = peers {
                    total += peers.iter().filter(|g| *g != name).count() as u64;
                }
            }
        }
    }
    total as f64
}

/// Complexity scaled into [0, 1] by the maximum over the compared
/// decomposition set; 0 when that maximum is 0.
pub fn uniform_complexity(value: f64, max_over_set: f64) -> Result<f64, MetricsError> {
    if max_over_set == 0.0 {
        return Ok(0.0);
    }
    if value > max_over_set {
        return Err(MetricsError::ValueExceedsMax { value, max: max_over_set });
    }
    Ok(value / max_over_set)
}

/// Balance of the three metrics, in [0, 1], lower is better:
/// (1 + uniform complexity + coupling - cohesion) / 3.
pub fn combined(cohesion: f64, coupling: f64, uniform_complexity: f64) -> Result<f64, MetricsError> {
    for (name, value) in [
        ("cohesion", cohesion),
        ("coupling", coupling),
        ("uniform complexity", uniform_complexity),
    ] {
        if !(0.0..=1.0).contains(&value) {
            return Err(MetricsError::OutOfRange { name, value });
        }
    }
    Ok((1.0 + uniform_complexity + coupling - cohesion) / 3.0)
}

/// The three per-decomposition metrics; uniform and combined need the whole
/// record set and are filled in at reporting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValues {
    pub cohesion: f64,
    pub coupling: f64,
    pub complexity: f64,
}

/// Computes cohesion, coupling, and complexity, reporting entities whose
/// accesses were skipped (present in traces but not covered by the
/// decomposition) once.
pub fn evaluate(
    decomposition: &Decomposition,
    model: &CodebaseModel,
) -> (MetricValues, Vec<Diagnostic>) {
    let values = MetricValues {
        cohesion: cohesion(decomposition, model),
        coupling: coupling(decomposition, model),
        complexity: complexity(decomposition, model),
    };
    let covered: BTreeSet<&str> = decomposition.entities().collect();
    let skipped: BTreeSet<&str> = model
        .functionalities
        .iter()
        .flat_map(|f| f.trace.iter().map(|a| a.entity.as_str()))
        .filter(|e| !covered.contains(e))
        .collect();
    let mut diagnostics = Vec::new();
    if !skipped.is_empty() {
        let list: Vec<&str> = skipped.into_iter().collect();
        diagnostics.push(Diagnostic::new(
            DiagnosticKind::SkippedAccesses,
            format!("{}/{}", decomposition.provenance.strategy, decomposition.provenance.requested_clusters),
            format!("accesses to uncovered entities skipped: {}", list.join(", ")),
        ));
    }
    (values, diagnostics)
}

/// One decomposition's full score sheet, keyed by its parameter tuple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRecord {
    pub codebase: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub cohesion: f64,
    pub coupling: f64,
    pub complexity: f64,
    #[serde(rename = "uniformComplexity")]
    pub uniform_complexity: f64,
    pub combined: f64,
}
