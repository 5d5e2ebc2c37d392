//! Class, entity, and functionality embeddings: the `cv`/`ev`
//! representations and the two functionality vectorization strategies
//! (call-graph weighted mean and access-sequence weighted mean).
//!
//! Iteration order is deterministic everywhere (sorted labels, sorted method
//! ids), so all vector outputs are bit-stable.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{
    CodebaseModel, Diagnostic, DiagnosticKind, Embedding, EntityName, Functionality, MethodRecord,
    MethodType, ModelIndex,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VectorizeError {
    #[error("empty input")]
    EmptyInput,
    #[error("vector dimensions disagree: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unknown class '{0}'")]
    UnknownClass(String),
    #[error("class '{0}' has no methods, directly or inherited")]
    EmptyClass(String),
    #[error("unknown entity '{0}'")]
    UnknownEntity(String),
    #[error("unknown method '{0}'")]
    UnknownMethod(String),
    #[error("call graph depth must be at least 1")]
    InvalidDepth,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    /// Every contributing element carries weight zero. A skip signal for the
    /// parameter combination, not a crash.
    #[error("all contributions have zero weight")]
    ZeroDenominator,
    #[error("functionality '{0}' has an empty trace")]
    EmptyTrace(String),
    #[error("duplicate label '{0}'")]
    DuplicateLabel(String),
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Shared weight-tuple validation: non-negative, finite, summing to 100.
pub(crate) fn check_weight_sum(weights: &[f64]) -> Result<(), String> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(format!("weight {w} is not a non-negative number"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 100.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(format!("weights sum to {sum}, expected 100"));
    }
    Ok(())
}

/// Per-method-type weights for the call-graph strategy, in percent. The four
/// values must sum to 100. Fields are public so test harnesses can bypass the
/// sum check when probing ratio invariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypeWeights {
    pub controller: f64,
    pub service: f64,
    pub entity: f64,
    pub intermediate: f64,
}

impl TypeWeights {
    pub fn new(controller: f64, service: f64, entity: f64, intermediate: f64) -> Result<Self, VectorizeError> {
        check_weight_sum(&[controller, service, entity, intermediate])
            .map_err(VectorizeError::InvalidWeights)?;
        Ok(TypeWeights { controller, service, entity, intermediate })
    }

    pub fn uniform() -> Self {
        TypeWeights { controller: 25.0, service: 25.0, entity: 25.0, intermediate: 25.0 }
    }

    pub fn from_array(w: [f64; 4]) -> Result<Self, VectorizeError> {
        TypeWeights::new(w[0], w[1], w[2], w[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.controller, self.service, self.entity, self.intermediate]
    }

    pub fn weight(&self, method_type: MethodType) -> f64 {
        match method_type {
            MethodType::Controller => self.controller,
            MethodType::Service => self.service,
            MethodType::Entity => self.entity,
            MethodType::Intermediate => self.intermediate,
        }
    }
}

/// Read/write weights for the access-sequence strategy, in percent, summing
/// to 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccessWeights {
    pub read: f64,
    pub write: f64,
}

impl AccessWeights {
    pub fn new(read: f64, write: f64) -> Result<Self, VectorizeError> {
        check_weight_sum(&[read, write]).map_err(VectorizeError::InvalidWeights)?;
        Ok(AccessWeights { read, write })
    }

    pub fn from_array(w: [f64; 2]) -> Result<Self, VectorizeError> {
        AccessWeights::new(w[0], w[1])
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.read, self.write]
    }
}

// ---------------------------------------------------------------------------
// Labeled vectors
// ---------------------------------------------------------------------------

/// Clustering input: uniquely labeled vectors sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledVectors {
    entries: Vec<(String, Embedding)>,
}

impl LabeledVectors {
    pub fn new(entries: Vec<(String, Embedding)>) -> Result<Self, VectorizeError> {
        let mut labels = BTreeSet::new();
        for (label, _) in &entries {
            if !labels.insert(label.as_str()) {
                return Err(VectorizeError::DuplicateLabel(label.clone()));
            }
        }
        if let Some(((_, first), rest)) = entries.split_first() {
            for (_, v) in rest {
                if v.len() != first.len() {
                    return Err(VectorizeError::DimensionMismatch(first.len(), v.len()));
                }
            }
        }
        Ok(LabeledVectors { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.entries.first().map_or(0, |(_, v)| v.len())
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn get(&self, i: usize) -> (&str, &Embedding) {
        let (l, v) = &self.entries[i];
        (l.as_str(), v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Embedding)> {
        self.entries.iter().map(|(l, v)| (l.as_str(), v))
    }
}

// ---------------------------------------------------------------------------
// Aggregation primitives
// ---------------------------------------------------------------------------

/// Component-wise arithmetic mean.
pub fn mean_embedding(vectors: &[Embedding]) -> Result<Embedding, VectorizeError> {
    let first = vectors.first().ok_or(VectorizeError::EmptyInput)?;
    let dim = first.len();
    let mut sum = vec![0.0f64; dim];
    for v in vectors {
        if v.len() != dim {
            return Err(VectorizeError::DimensionMismatch(dim, v.len()));
        }
        for (acc, x) in sum.iter_mut().zip(v.values()) {
            *acc += x;
        }
    }
    let n = vectors.len() as f64;
    for acc in &mut sum {
        *acc /= n;
    }
    Ok(Embedding::new(sum))
}

/// Methods of `class` plus the methods of every ancestor along the superclass
/// chain, ordered by class depth (own methods first) and then by method id.
pub fn class_methods_closure<'a>(
    model: &'a CodebaseModel,
    class: &str,
) -> Result<Vec<&'a MethodRecord>, VectorizeError> {
    let index = model.index();
    closure_indexed(&index, class)
}

fn closure_indexed<'a>(
    index: &ModelIndex<'a>,
    class: &str,
) -> Result<Vec<&'a MethodRecord>, VectorizeError> {
    if index.class_methods(class).is_none() {
        return Err(VectorizeError::UnknownClass(class.to_string()));
    }
    let mut out = Vec::new();
    let mut visited = BTreeSet::new();
    let mut cursor = Some(class.to_string());
    while let Some(current) = cursor {
        if !visited.insert(current.clone()) {
            break; // inheritance cycle; validation reports it separately
        }
        if let Some(methods) = index.class_methods(&current) {
            out.extend_from_slice(methods);
        }
        cursor = index.superclass(&current).map(|s| s.to_string());
    }
    Ok(out)
}

/// Mean of the class's method embeddings, inheritance included.
pub fn class_embedding(model: &CodebaseModel, class: &str) -> Result<Embedding, VectorizeError> {
    class_embedding_indexed(&model.index(), class)
}

fn class_embedding_indexed(index: &ModelIndex<'_>, class: &str) -> Result<Embedding, VectorizeError> {
    let closure = closure_indexed(index, class)?;
    if closure.is_empty() {
        return Err(VectorizeError::EmptyClass(class.to_string()));
    }
    let embeddings: Vec<Embedding> = closure.iter().map(|m| m.embedding.clone()).collect();
    mean_embedding(&embeddings)
}

/// The embedding of the entity's declaring class.
pub fn entity_embedding(model: &CodebaseModel, entity: &str) -> Result<Embedding, VectorizeError> {
    entity_embedding_indexed(&model.index(), entity)
}

fn entity_embedding_indexed(index: &ModelIndex<'_>, entity: &str) -> Result<Embedding, VectorizeError> {
    if !index.is_entity(entity) {
        return Err(VectorizeError::UnknownEntity(entity.to_string()));
    }
    let class = index
        .declaring_class(entity)
        .ok_or_else(|| VectorizeError::EmptyClass(entity.to_string()))?;
    class_embedding_indexed(index, class)
}

/// Embeddings for every declared entity, keyed by entity name.
pub fn entity_embeddings(
    model: &CodebaseModel,
) -> Result<BTreeMap<EntityName, Embedding>, VectorizeError> {
    let index = model.index();
    let mut out = BTreeMap::new();
    for entity in &model.entities {
        out.insert(entity.clone(), entity_embedding_indexed(&index, entity)?);
    }
    Ok(out)
}

/// Methods reachable from `method_id` by at most `depth - 1` call edges,
/// breadth first. Depth 1 is the starting method alone; cycles are absorbed
/// by set semantics.
pub fn call_graph_nodes<'a>(
    model: &'a CodebaseModel,
    method_id: &str,
    depth: u32,
) -> Result<BTreeSet<&'a str>, VectorizeError> {
    call_graph_nodes_indexed(&model.index(), method_id, depth)
}

fn call_graph_nodes_indexed<'a>(
    index: &ModelIndex<'a>,
    method_id: &str,
    depth: u32,
) -> Result<BTreeSet<&'a str>, VectorizeError> {
    if depth == 0 {
        return Err(VectorizeError::InvalidDepth);
    }
    let root = index
        .method(method_id)
        .ok_or_else(|| VectorizeError::UnknownMethod(method_id.to_string()))?;
    let mut nodes: BTreeSet<&str> = BTreeSet::new();
    nodes.insert(root.id.as_str());
    let mut frontier: VecDeque<&MethodRecord> = VecDeque::from([root]);
    for _ in 1..depth {
        let mut next = VecDeque::new();
        while let Some(m) = frontier.pop_front() {
            for callee in &m.calls {
                if let Some(target) = index.method(callee) {
                    if nodes.insert(target.id.as_str()) {
                        next.push_back(target);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(nodes)
}

// ---------------------------------------------------------------------------
// Functionality vectorization by call graph
// ---------------------------------------------------------------------------

/// Weight-independent aggregation state for one functionality's call graph:
/// per-method-type embedding sums and node counts. Combining with a weight
/// tuple is then a four-term linear combination, which keeps full weight-grid
/// sweeps cheap.
#[derive(Debug, Clone, PartialEq)]
pub struct CallGraphSums {
    sums: [Vec<f64>; 4],
    counts: [usize; 4],
    dimension: usize,
}

// Per-type accumulation order mirrors the weighted-mean definition:
// controller, service, intermediate, entity.
const TYPE_ORDER: [MethodType; 4] = [
    MethodType::Controller,
    MethodType::Service,
    MethodType::Intermediate,
    MethodType::Entity,
];

impl CallGraphSums {
    pub fn build(
        model: &CodebaseModel,
        functionality: &Functionality,
        depth: u32,
    ) -> Result<Self, VectorizeError> {
        Self::build_indexed(&model.index(), model.embedding_dimension, functionality, depth)
    }

    pub(crate) fn build_indexed(
        index: &ModelIndex<'_>,
        dimension: usize,
        functionality: &Functionality,
        depth: u32,
    ) -> Result<Self, VectorizeError> {
        let nodes = call_graph_nodes_indexed(index, &functionality.controller_method_id, depth)?;
        let mut sums = [vec![0.0; dimension], vec![0.0; dimension], vec![0.0; dimension], vec![0.0; dimension]];
        let mut counts = [0usize; 4];
        for id in &nodes {
            let method = index.method(id).expect("node came from the index");
            let slot = TYPE_ORDER.iter().position(|t| *t == method.method_type).unwrap();
            counts[slot] += 1;
            for (acc, x) in sums[slot].iter_mut().zip(method.embedding.values()) {
                *acc += x;
            }
        }
        Ok(CallGraphSums { sums, counts, dimension })
    }

    /// Weighted mean over the node set: each node weighted by its method
    /// type's weight, denominator the sum of applied weights.
    pub fn combine(&self, weights: &TypeWeights) -> Result<Embedding, VectorizeError> {
        let ws: Vec<f64> = TYPE_ORDER.iter().map(|t| weights.weight(*t)).collect();
        let denominator: f64 =
            ws.iter().zip(&self.counts).map(|(w, n)| w * *n as f64).sum();
        if denominator == 0.0 {
            return Err(VectorizeError::ZeroDenominator);
        }
        let mut out = vec![0.0f64; self.dimension];
        for (w, sum) in ws.iter().zip(&self.sums) {
            for (acc, x) in out.iter_mut().zip(sum) {
                *acc += w * x;
            }
        }
        for acc in &mut out {
            *acc /= denominator;
        }
        Ok(Embedding::new(out))
    }
}

/// Functionality vector from its depth-bounded call graph (weighted mean of
/// node embeddings by method type).
pub fn fvcg_vector(
    model: &CodebaseModel,
    functionality: &Functionality,
    depth: u32,
    weights: &TypeWeights,
) -> Result<Embedding, VectorizeError> {
    CallGraphSums::build(model, functionality, depth)?.combine(weights)
}

/// One call-graph vector per functionality, labeled by functionality name in
/// sorted order. A zero denominator aborts the whole parameter combination.
pub fn fvcg_vectors(
    model: &CodebaseModel,
    depth: u32,
    weights: &TypeWeights,
) -> Result<LabeledVectors, VectorizeError> {
    let index = model.index();
    let mut names: Vec<&Functionality> = model.functionalities.iter().collect();
    names.sort_by(|a, b| a.name.cmp(&b.name));
    let mut entries = Vec::with_capacity(names.len());
    for f in names {
        let sums = CallGraphSums::build_indexed(&index, model.embedding_dimension, f, depth)?;
        entries.push((f.name.clone(), sums.combine(weights)?));
    }
    LabeledVectors::new(entries)
}

// ---------------------------------------------------------------------------
// Functionality vectorization by sequence of accesses
// ---------------------------------------------------------------------------

/// Weight-independent aggregation state for one functionality's access trace:
/// entity-embedding sums and occurrence counts, split by access mode. Each
/// trace occurrence contributes once (multiset semantics).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSums {
    read_sum: Vec<f64>,
    write_sum: Vec<f64>,
    read_count: usize,
    write_count: usize,
}

impl TraceSums {
    pub fn build(
        functionality: &Functionality,
        entity_embeddings: &BTreeMap<EntityName, Embedding>,
        dimension: usize,
    ) -> Result<Self, VectorizeError> {
        if functionality.trace.is_empty() {
            return Err(VectorizeError::EmptyTrace(functionality.name.clone()));
        }
        let mut read_sum = vec![0.0f64; dimension];
        let mut write_sum = vec![0.0f64; dimension];
        let mut read_count = 0usize;
        let mut write_count = 0usize;
        for access in &functionality.trace {
            let embedding = entity_embeddings
                .get(&access.entity)
                .ok_or_else(|| VectorizeError::UnknownEntity(access.entity.clone()))?;
            let (sum, count) = match access.mode {
                crate::model::AccessMode::R => (&mut read_sum, &mut read_count),
                crate::model::AccessMode::W => (&mut write_sum, &mut write_count),
            };
            *count += 1;
            for (acc, x) in sum.iter_mut().zip(embedding.values()) {
                *acc += x;
            }
        }
        Ok(TraceSums { read_sum, write_sum, read_count, write_count })
    }

    pub fn combine(&self, weights: &AccessWeights) -> Result<Embedding, VectorizeError> {
        let denominator =
            weights.read * self.read_count as f64 + weights.write * self.write_count as f64;
        if denominator == 0.0 {
            return Err(VectorizeError::ZeroDenominator);
        }
        let mut out: Vec<f64> = self
            .read_sum
            .iter()
            .zip(&self.write_sum)
            .map(|(r, w)| weights.read * r + weights.write * w)
            .collect();
        for acc in &mut out {
            *acc /= denominator;
        }
        Ok(Embedding::new(out))
    }
}

/// Functionality vector from its access trace (weighted mean of accessed
/// entities' embeddings, reads and writes weighted separately).
pub fn fvsa_vector(
    model: &CodebaseModel,
    functionality: &Functionality,
    weights: &AccessWeights,
) -> Result<Embedding, VectorizeError> {
    let embeddings = entity_embeddings(model)?;
    TraceSums::build(functionality, &embeddings, model.embedding_dimension)?.combine(weights)
}

/// One access-sequence vector per functionality with a non-empty trace;
/// empty-trace functionalities are skipped with a diagnostic. A zero
/// denominator aborts the whole parameter combination.
pub fn fvsa_vectors(
    model: &CodebaseModel,
    weights: &AccessWeights,
) -> Result<(LabeledVectors, Vec<Diagnostic>), VectorizeError> {
    let embeddings = entity_embeddings(model)?;
    let mut names: Vec<&Functionality> = model.functionalities.iter().collect();
    names.sort_by(|a, b| a.name.cmp(&b.name));
    let mut entries = Vec::new();
    let mut diagnostics = Vec::new();
    for f in names {
        match TraceSums::build(f, &embeddings, model.embedding_dimension) {
            Ok(sums) => entries.push((f.name.clone(), sums.combine(weights)?)),
            Err(VectorizeError::EmptyTrace(_)) => diagnostics.push(Diagnostic::new(
                DiagnosticKind::SkippedEmptyTrace,
                f.name.clone(),
                "functionality has no entity accesses",
            )),
            Err(other) => return Err(other),
        }
    }
    Ok((LabeledVectors::new(entries)?, diagnostics))
}

// ---------------------------------------------------------------------------
// Class and entity vectorization
// ---------------------------------------------------------------------------

/// One vector per class with at least one method (inheritance included),
/// labeled by class name in sorted order. Classes whose closure is empty are
/// skipped with a diagnostic.
pub fn cv_vectors(
    model: &CodebaseModel,
) -> Result<(LabeledVectors, Vec<Diagnostic>), VectorizeError> {
    let index = model.index();
    let mut entries = Vec::new();
    let mut diagnostics = Vec::new();
    for class in index.classes() {
        match class_embedding_indexed(&index, class) {
            Ok(embedding) => entries.push((class.to_string(), embedding)),
            Err(VectorizeError::EmptyClass(_)) => diagnostics.push(Diagnostic::new(
                DiagnosticKind::SkippedEmptyClass,
                class,
                "class has no methods, directly or inherited",
            )),
            Err(other) => return Err(other),
        }
    }
    Ok((LabeledVectors::new(entries)?, diagnostics))
}

/// One vector per declared entity, labeled by entity name in sorted order.
pub fn ev_vectors(model: &CodebaseModel) -> Result<LabeledVectors, VectorizeError> {
    let embeddings = entity_embeddings(model)?;
    LabeledVectors::new(embeddings.into_iter().collect())
}
