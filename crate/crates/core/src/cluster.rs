//! Agglomerative hierarchical clustering over labeled vectors, dendrogram
//! cutting, and conversion of class/functionality clusters into entity
//! decompositions.
//!
//! Agglomeration recomputes linkage distances from the base matrix at every
//! step (naive O(n^3)); desk-scale inputs make nearest-neighbor-chain
//! optimization unnecessary. Ties are broken by the lexicographically
//! smallest (left label, right label) pair so merge sequences are fully
//! deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::ingest::IngestError;
use crate::model::{
    CodebaseModel, Decomposition, Diagnostic, DiagnosticKind, EntityName, Provenance,
};
use crate::vectorize::LabeledVectors;

pub use crate::model::Linkage;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClusterError {
    #[error("need at least 2 points, found {0}")]
    TooFewPoints(usize),
    #[error("vector dimensions disagree: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("condensed matrix of length {len} does not fit {n} points")]
    BadMatrixLength { n: usize, len: usize },
    #[error("{labels} labels for {n} points")]
    LabelCountMismatch { n: usize, labels: usize },
    #[error("cannot cut {leaves} leaves into {requested} clusters")]
    BadClusterCount { requested: usize, leaves: usize },
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Upper triangle (without diagonal) of a symmetric distance matrix, row by
/// row.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CondensedMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, ClusterError> {
        if n < 2 {
            return Err(ClusterError::TooFewPoints(n));
        }
        if data.len() != n * (n - 1) / 2 {
            return Err(ClusterError::BadMatrixLength { n, len: data.len() });
        }
        Ok(CondensedMatrix { n, data })
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        // Offset of row `lo` in the condensed layout, then column shift.
        let row_start = lo * self.n - lo * (lo + 1) / 2;
        self.data[row_start + (hi - lo - 1)]
    }
}

/// Euclidean distances between all pairs of labeled vectors.
pub fn pairwise_distances(vectors: &LabeledVectors) -> Result<CondensedMatrix, ClusterError> {
    let n = vectors.len();
    if n < 2 {
        return Err(ClusterError::TooFewPoints(n));
    }
    let dim = vectors.dimension();
    let mut data = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let (_, vi) = vectors.get(i);
        for j in (i + 1)..n {
            let (_, vj) = vectors.get(j);
            if vj.len() != dim {
                return Err(ClusterError::DimensionMismatch(dim, vj.len()));
            }
            let d = vi
                .values()
                .iter()
                .zip(vj.values())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            data.push(d);
        }
    }
    CondensedMatrix::new(n, data)
}

// ---------------------------------------------------------------------------
// Dendrograms
// ---------------------------------------------------------------------------

/// One merge step. Node ids follow the usual convention: `0..n` are leaves,
/// `n + k` is the cluster created by merge `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

/// Binary merge tree with heights; `n - 1` merges over `n` leaves.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    leaves: Vec<String>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

fn linkage_distance(base: &CondensedMatrix, a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    // Canonical pair order (cluster with the smallest member first) keeps the
    // average-linkage sum independent of which operand is which.
    let (a, b) = if a.first() <= b.first() { (a, b) } else { (b, a) };
    match linkage {
        Linkage::Single => {
            let mut best = f64::INFINITY;
            for &i in a {
                for &j in b {
                    best = best.min(base.get(i, j));
                }
            }
            best
        }
        Linkage::Complete => {
            let mut worst = f64::NEG_INFINITY;
            for &i in a {
                for &j in b {
                    worst = worst.max(base.get(i, j));
                }
            }
            worst
        }
        Linkage::Average => {
            let mut sum = 0.0;
            for &i in a {
                for &j in b {
                    sum += base.get(i, j);
                }
            }
            sum / (a.len() * b.len()) as f64
        }
    }
}

/// Agglomerates bottom-up: at each step the pair of active clusters with
/// minimum linkage distance merges, recomputed from the base matrix. Each
/// cluster is represented by its smallest member label; equal distances are
/// resolved by the smallest (left, right) representative-label pair.
pub fn agglomerate(
    distances: &CondensedMatrix,
    labels: &[String],
    linkage: Linkage,
) -> Result<Dendrogram, ClusterError> {
    let n = distances.point_count();
    if labels.len() != n {
        return Err(ClusterError::LabelCountMismatch { n, labels: labels.len() });
    }

    struct Active {
        node: usize,
        members: Vec<usize>,
        rep: usize, // member with the smallest label
    }
    let rep_of = |members: &[usize]| -> usize {
        *members.iter().min_by_key(|i| &labels[**i]).expect("clusters are non-empty")
    };
    let mut active: Vec<Active> =
        (0..n).map(|i| Active { node: i, members: vec![i], rep: i }).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best: Option<(f64, (&str, &str), usize, usize)> = None;
        for p in 0..active.len() {
            for q in (p + 1)..active.len() {
                let d = linkage_distance(distances, &active[p].members, &active[q].members, linkage);
                let (la, lb) = (labels[active[p].rep].as_str(), labels[active[q].rep].as_str());
                let pair = if la < lb { (la, lb) } else { (lb, la) };
                let candidate = (d, pair, p, q);
                let better = match &best {
                    None => true,
                    Some((bd, bpair, _, _)) => d < *bd || (d == *bd && pair < *bpair),
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
        let (height, _, p, q) = best.expect("at least two active clusters");
        let right = active.swap_remove(q.max(p));
        let left = active.swap_remove(q.min(p));
        // Left child is the cluster with the smaller representative label.
        let (left, right) =
            if labels[left.rep] <= labels[right.rep] { (left, right) } else { (right, left) };
        let mut members = left.members.clone();
        members.extend_from_slice(&right.members);
        members.sort_unstable();
        merges.push(Merge { left: left.node, right: right.node, height });
        let rep = rep_of(&members);
        active.push(Active { node: n + step, members, rep });
    }

    Ok(Dendrogram { leaves: labels.to_vec(), merges })
}

/// Distance computation plus agglomeration in one call.
pub fn cluster_vectors(
    vectors: &LabeledVectors,
    linkage: Linkage,
) -> Result<Dendrogram, ClusterError> {
    let distances = pairwise_distances(vectors)?;
    let labels: Vec<String> = vectors.labels().map(|l| l.to_string()).collect();
    agglomerate(&distances, &labels, linkage)
}

/// Undoes the last `k - 1` merges, partitioning the leaves into `k` groups.
/// Group members are sorted and groups ordered by smallest member label.
pub fn cut(dendrogram: &Dendrogram, k: usize) -> Result<Vec<Vec<String>>, ClusterError> {
    let n = dendrogram.leaf_count();
    if k < 1 || k > n {
        return Err(ClusterError::BadClusterCount { requested: k, leaves: n });
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = (0..n).map(|i| (i, vec![i])).collect();
    for (step, merge) in dendrogram.merges.iter().take(n - k).enumerate() {
        let mut members = groups.remove(&merge.left).expect("child node is active");
        members.extend(groups.remove(&merge.right).expect("child node is active"));
        groups.insert(n + step, members);
    }
    let mut out: Vec<Vec<String>> = groups
        .into_values()
        .map(|members| {
            let mut labels: Vec<String> =
                members.into_iter().map(|i| dendrogram.leaves[i].clone()).collect();
            labels.sort();
            labels
        })
        .collect();
    out.sort_by(|a, b| a[0].cmp(&b[0]));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cluster conversion
// ---------------------------------------------------------------------------

/// Keeps only classes declaring entities, maps them to their entity names,
/// drops clusters left empty, and renumbers. Labels that already name
/// entities (and are not class names) pass through unchanged, so converting
/// an entity decomposition is the identity. Returns `None` when every
/// cluster empties out.
pub fn convert_class_to_entity(
    clusters: &[Vec<String>],
    model: &CodebaseModel,
    provenance: Provenance,
) -> (Option<Decomposition>, Vec<Diagnostic>) {
    let index = model.index();
    let mut out: Vec<BTreeSet<EntityName>> = Vec::new();
    for cluster in clusters {
        let mut entities = BTreeSet::new();
        for label in cluster {
            if let Some(entity) = index.declared_entity(label) {
                entities.insert(entity.to_string());
            } else if index.class_methods(label).is_none() && index.is_entity(label) {
                entities.insert(label.clone());
            }
        }
        if !entities.is_empty() {
            out.push(entities);
        }
    }
    finish_conversion(out, provenance)
}

/// Assigns each entity to the cluster whose functionalities access it the
/// most, counting trace occurrences; ties go to the lowest cluster index.
/// Entities never accessed are omitted with a diagnostic. Labels that
/// already name entities pass through into their own cluster unchanged.
pub fn convert_functionality_to_entity(
    clusters: &[Vec<String>],
    model: &CodebaseModel,
    provenance: Provenance,
) -> (Option<Decomposition>, Vec<Diagnostic>) {
    let index = model.index();
    let mut counts: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    let mut passthrough: BTreeMap<&str, usize> = BTreeMap::new();
    for (ci, cluster) in clusters.iter().enumerate() {
        for label in cluster {
            if let Some(f) = index.functionality(label) {
                for access in &f.trace {
                    counts.entry(access.entity.as_str()).or_insert_with(|| vec![0; clusters.len()])
                        [ci] += 1;
                }
            } else if index.is_entity(label) {
                passthrough.entry(label.as_str()).or_insert(ci);
            }
        }
    }

    let mut diagnostics = Vec::new();
    let mut out: Vec<BTreeSet<EntityName>> = vec![BTreeSet::new(); clusters.len()];
    for entity in &model.entities {
        if let Some(&ci) = passthrough.get(entity.as_str()) {
            out[ci].insert(entity.clone());
            continue;
        }
        match counts.get(entity.as_str()) {
            Some(per_cluster) => {
                let (best, _) = per_cluster
                    .iter()
                    .enumerate()
                    .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
                    .expect("clusters are non-empty");
                out[best].insert(entity.clone());
            }
            None => {
                diagnostics.push(Diagnostic::new(
                    DiagnosticKind::OmittedEntity,
                    entity.clone(),
                    "no functionality in any cluster accesses this entity",
                ));
            }
        }
    }
    out.retain(|cluster| !cluster.is_empty());
    let (decomposition, mut rest) = finish_conversion(out, provenance);
    diagnostics.append(&mut rest);
    (decomposition, diagnostics)
}

fn finish_conversion(
    clusters: Vec<BTreeSet<EntityName>>,
    provenance: Provenance,
) -> (Option<Decomposition>, Vec<Diagnostic>) {
    if clusters.is_empty() {
        let diagnostic = Diagnostic::new(
            DiagnosticKind::EmptyConversion,
            format!("{}/{}", provenance.strategy, provenance.linkage),
            format!("requested {} clusters, all empty after conversion", provenance.requested_clusters),
        );
        return (None, vec![diagnostic]);
    }
    let decomposition =
        Decomposition::new(clusters, provenance).expect("conversion output clusters are disjoint");
    (Some(decomposition), Vec::new())
}

/// Wraps an entity partition (from the entity-native strategies) as a
/// decomposition without conversion.
pub fn entity_partition(
    groups: &[Vec<String>],
    provenance: Provenance,
) -> Result<Decomposition, crate::model::DecompositionError> {
    let clusters: Vec<BTreeSet<EntityName>> =
        groups.iter().map(|g| g.iter().cloned().collect()).collect();
    Decomposition::new(clusters, provenance)
}

// ---------------------------------------------------------------------------
// Decomposition files
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDecomposition {
    provenance: Provenance,
    clusters: Vec<BTreeSet<String>>,
}

/// Canonical serialization of a decomposition, as written by
/// [`save_decomposition`].
pub fn render_decomposition(decomposition: &Decomposition) -> String {
    let mut text = serde_json::to_string_pretty(decomposition)
        .expect("decomposition serialization cannot fail");
    text.push('\n');
    text
}

pub fn save_decomposition(
    decomposition: &Decomposition,
    path: impl AsRef<Path>,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    std::fs::write(path, render_decomposition(decomposition))
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

pub fn load_decomposition(path: impl AsRef<Path>) -> Result<Decomposition, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    parse_decomposition(&text)
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition, IngestError> {
    let file: FileDecomposition = serde_json::from_str(text).map_err(|err| match err.classify() {
        serde_json::error::Category::Syntax | serde_json::error::Category::Eof => {
            IngestError::Parse { line: err.line(), column: err.column(), message: err.to_string() }
        }
        _ => IngestError::Schema(err.to_string()),
    })?;
    Decomposition::new(file.clusters, file.provenance)
        .map_err(|e| IngestError::Schema(e.to_string()))
}
