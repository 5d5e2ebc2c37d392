//! Shared domain types: the codebase model fed into every strategy, and the
//! entity decompositions that come out of clustering.
//!
//! All types are immutable values after construction; nothing in the engine
//! mutates a model in place, so shared references are safe across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type MethodId = String;
pub type ClassName = String;
pub type EntityName = String;
pub type FunctionalityName = String;

// ---------------------------------------------------------------------------
// Embeddings and methods
// ---------------------------------------------------------------------------

/// Fixed-length real vector representing a method, class, entity, or
/// functionality. Produced offline by an embedding model or by the synthetic
/// generator; this engine only aggregates them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    pub fn new(values: Vec<f64>) -> Self {
        Embedding(values)
    }

    pub fn zeros(dimension: usize) -> Self {
        Embedding(vec![0.0; dimension])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn l2_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Role of a method in the monolith. Collector labels outside the four
/// categories (repository, configuration, unclassified) are normalized to
/// `Intermediate` at ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodType {
    Controller,
    Service,
    Entity,
    Intermediate,
}

impl MethodType {
    pub const ALL: [MethodType; 4] = [
        MethodType::Controller,
        MethodType::Service,
        MethodType::Entity,
        MethodType::Intermediate,
    ];
}

/// One method of the monolith, with its embedding and outgoing calls.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRecord {
    pub id: MethodId,
    pub class_name: ClassName,
    pub super_class: Option<ClassName>,
    pub method_type: MethodType,
    /// Present exactly when the declaring class is an entity class.
    pub entity_name: Option<EntityName>,
    pub embedding: Embedding,
    pub calls: Vec<MethodId>,
}

// ---------------------------------------------------------------------------
// Functionalities and accesses
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AccessMode {
    R,
    W,
}

/// One read or write of a domain entity within a functionality's trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Access {
    pub entity: EntityName,
    pub mode: AccessMode,
}

impl Access {
    pub fn read(entity: impl Into<EntityName>) -> Self {
        Access { entity: entity.into(), mode: AccessMode::R }
    }

    pub fn write(entity: impl Into<EntityName>) -> Self {
        Access { entity: entity.into(), mode: AccessMode::W }
    }
}

/// An externally triggerable operation of the monolith, rooted at a
/// controller method. The trace may be empty for functionalities that touch
/// no entities.
#[derive(Debug, Clone, PartialEq)]
pub struct Functionality {
    pub name: FunctionalityName,
    pub controller_method_id: MethodId,
    pub trace: Vec<Access>,
}

/// The serialized codebase model: the sole input to all strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct CodebaseModel {
    pub name: String,
    pub embedding_dimension: usize,
    pub methods: Vec<MethodRecord>,
    pub entities: Vec<EntityName>,
    pub functionalities: Vec<Functionality>,
}

impl CodebaseModel {
    /// Builds lookup tables over the model. Cheap at desk scale; computed
    /// once per operation or once per sweep.
    pub fn index(&self) -> ModelIndex<'_> {
        ModelIndex::new(self)
    }
}

// ---------------------------------------------------------------------------
// Model index
// ---------------------------------------------------------------------------

/// Lookup tables derived from a model: method-by-id, methods-by-class (sorted
/// by id), the superclass of each class, and the entity/class bijection.
/// Assumes the model passes validation; on inconsistent data the first value
/// in sorted order wins.
pub struct ModelIndex<'a> {
    by_id: BTreeMap<&'a str, &'a MethodRecord>,
    by_class: BTreeMap<&'a str, Vec<&'a MethodRecord>>,
    super_of: BTreeMap<&'a str, &'a str>,
    entity_class: BTreeMap<&'a str, &'a str>,
    class_entity: BTreeMap<&'a str, &'a str>,
    functionality_by_name: BTreeMap<&'a str, &'a Functionality>,
    entity_set: BTreeSet<&'a str>,
}

impl<'a> ModelIndex<'a> {
    fn new(model: &'a CodebaseModel) -> Self {
        let mut by_id = BTreeMap::new();
        let mut by_class: BTreeMap<&str, Vec<&MethodRecord>> = BTreeMap::new();
        let mut super_of = BTreeMap::new();
        let mut entity_class = BTreeMap::new();
        let mut class_entity = BTreeMap::new();
        for m in &model.methods {
            by_id.entry(m.id.as_str()).or_insert(m);
            by_class.entry(m.class_name.as_str()).or_default().push(m);
            if let Some(s) = &m.super_class {
                super_of.entry(m.class_name.as_str()).or_insert(s.as_str());
            }
            if let Some(e) = &m.entity_name {
                entity_class.entry(e.as_str()).or_insert(m.class_name.as_str());
                class_entity.entry(m.class_name.as_str()).or_insert(e.as_str());
            }
        }
        for methods in by_class.values_mut() {
            methods.sort_by(|a, b| a.id.cmp(&b.id));
        }
        let functionality_by_name =
            model.functionalities.iter().map(|f| (f.name.as_str(), f)).collect();
        let entity_set = model.entities.iter().map(|e| e.as_str()).collect();
        ModelIndex { by_id, by_class, super_of, entity_class, class_entity, functionality_by_name, entity_set }
    }

    pub fn method(&self, id: &str) -> Option<&'a MethodRecord> {
        self.by_id.get(id).copied()
    }

    pub fn class_methods(&self, class: &str) -> Option<&[&'a MethodRecord]> {
        self.by_class.get(class).map(|v| v.as_slice())
    }

    /// Class names in sorted order (a class exists iff it has a method).
    pub fn classes(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.by_class.keys().copied()
    }

    pub fn superclass(&self, class: &str) -> Option<&'a str> {
        self.super_of.get(class).copied()
    }

    /// The class declaring `entity`, if any method carries that entity name.
    pub fn declaring_class(&self, entity: &str) -> Option<&'a str> {
        self.entity_class.get(entity).copied()
    }

    /// The entity declared by `class`, if it is an entity class.
    pub fn declared_entity(&self, class: &str) -> Option<&'a str> {
        self.class_entity.get(class).copied()
    }

    pub fn functionality(&self, name: &str) -> Option<&'a Functionality> {
        self.functionality_by_name.get(name).copied()
    }

    pub fn is_entity(&self, name: &str) -> bool {
        self.entity_set.contains(name)
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Machine-readable invariant violation codes. Violations are data, not
/// failures: `validate_model` reports all of them instead of stopping at the
/// first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "String")]
pub enum ViolationCode {
    BadDimension,
    ClassDeclaresMultipleEntities,
    DanglingCall,
    DuplicateEntity,
    DuplicateFunctionalityName,
    DuplicateMethodId,
    EmbeddingDim,
    EntityDeclaredTwice,
    EntityNameMismatch,
    EntityWithoutMethods,
    InheritanceCycle,
    NonfiniteEmbedding,
    NotAController,
    SuperclassConflict,
    UnknownController,
    UnknownMethodEntity,
    UnknownTraceEntity,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::BadDimension => "BAD_DIMENSION",
            ViolationCode::ClassDeclaresMultipleEntities => "CLASS_DECLARES_MULTIPLE_ENTITIES",
            ViolationCode::DanglingCall => "DANGLING_CALL",
            ViolationCode::DuplicateEntity => "DUPLICATE_ENTITY",
            ViolationCode::DuplicateFunctionalityName => "DUPLICATE_FUNCTIONALITY_NAME",
            ViolationCode::DuplicateMethodId => "DUPLICATE_METHOD_ID",
            ViolationCode::EmbeddingDim => "EMBEDDING_DIM",
            ViolationCode::EntityDeclaredTwice => "ENTITY_DECLARED_TWICE",
            ViolationCode::EntityNameMismatch => "ENTITY_NAME_MISMATCH",
            ViolationCode::EntityWithoutMethods => "ENTITY_WITHOUT_METHODS",
            ViolationCode::InheritanceCycle => "INHERITANCE_CYCLE",
            ViolationCode::NonfiniteEmbedding => "NONFINITE_EMBEDDING",
            ViolationCode::NotAController => "NOT_A_CONTROLLER",
            ViolationCode::SuperclassConflict => "SUPERCLASS_CONFLICT",
            ViolationCode::UnknownController => "UNKNOWN_CONTROLLER",
            ViolationCode::UnknownMethodEntity => "UNKNOWN_METHOD_ENTITY",
            ViolationCode::UnknownTraceEntity => "UNKNOWN_TRACE_ENTITY",
        }
    }
}

impl From<ViolationCode> for String {
    fn from(code: ViolationCode) -> String {
        code.as_str().to_string()
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One invariant violation, keyed by the offending id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub subject: String,
    pub detail: String,
}

impl Violation {
    fn new(code: ViolationCode, subject: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation { code, subject: subject.into(), detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.subject, self.detail)
    }
}

/// Checks every model invariant and returns the violations sorted by
/// (code, subject, detail). An empty report means the model is valid.
pub fn validate_model(model: &CodebaseModel) -> Vec<Violation> {
    let mut out = Vec::new();

    if model.embedding_dimension == 0 {
        out.push(Violation::new(
            ViolationCode::BadDimension,
            model.name.clone(),
            "embedding dimension must be at least 1",
        ));
    }

    let entity_set: BTreeSet<&str> = model.entities.iter().map(|e| e.as_str()).collect();

    // Duplicate entries in the entity list.
    let mut seen = BTreeSet::new();
    for e in &model.entities {
        if !seen.insert(e.as_str()) {
            out.push(Violation::new(ViolationCode::DuplicateEntity, e.clone(), "entity declared more than once"));
        }
    }

    // Method-level checks.
    let mut method_ids = BTreeSet::new();
    let mut class_supers: BTreeMap<&str, BTreeSet<Option<&str>>> = BTreeMap::new();
    let mut entity_classes: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut class_entities: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for m in &model.methods {
        if !method_ids.insert(m.id.as_str()) {
            out.push(Violation::new(ViolationCode::DuplicateMethodId, m.id.clone(), "method id declared more than once"));
        }
        if m.embedding.len() != model.embedding_dimension {
            out.push(Violation::new(
                ViolationCode::EmbeddingDim,
                m.id.clone(),
                format!("embedding has length {}, model declares {}", m.embedding.len(), model.embedding_dimension),
            ));
        }
        if !m.embedding.is_finite() {
            out.push(Violation::new(ViolationCode::NonfiniteEmbedding, m.id.clone(), "embedding contains NaN or infinity"));
        }
        match (&m.entity_name, m.method_type) {
            (Some(_), MethodType::Entity) | (None, MethodType::Controller | MethodType::Service | MethodType::Intermediate) => {}
            (Some(_), _) => {
                out.push(Violation::new(ViolationCode::EntityNameMismatch, m.id.clone(), "entity name on a non-entity method"));
            }
            (None, MethodType::Entity) => {
                out.push(Violation::new(ViolationCode::EntityNameMismatch, m.id.clone(), "entity method without an entity name"));
            }
        }
        if let Some(e) = &m.entity_name {
            if !entity_set.contains(e.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownMethodEntity,
                    m.id.clone(),
                    format!("references undeclared entity '{e}'"),
                ));
            }
            entity_classes.entry(e.as_str()).or_default().insert(m.class_name.as_str());
            class_entities.entry(m.class_name.as_str()).or_default().insert(e.as_str());
        }
        class_supers.entry(m.class_name.as_str()).or_default().insert(m.super_class.as_deref());
    }
    for m in &model.methods {
        for callee in &m.calls {
            if !method_ids.contains(callee.as_str()) {
                out.push(Violation::new(
                    ViolationCode::DanglingCall,
                    callee.clone(),
                    format!("called from '{}' but not declared", m.id),
                ));
            }
        }
    }

    // Entity identity is the name: one declaring class per entity, one entity
    // per declaring class.
    for (entity, classes) in &entity_classes {
        if classes.len() > 1 {
            let list: Vec<&str> = classes.iter().copied().collect();
            out.push(Violation::new(
                ViolationCode::EntityDeclaredTwice,
                (*entity).to_string(),
                format!("declared by classes {}", list.join(", ")),
            ));
        }
    }
    for (class, entities) in &class_entities {
        if entities.len() > 1 {
            let list: Vec<&str> = entities.iter().copied().collect();
            out.push(Violation::new(
                ViolationCode::ClassDeclaresMultipleEntities,
                (*class).to_string(),
                format!("declares entities {}", list.join(", ")),
            ));
        }
    }
    for e in &entity_set {
        if !entity_classes.contains_key(*e) {
            out.push(Violation::new(
                ViolationCode::EntityWithoutMethods,
                (*e).to_string(),
                "no method carries this entity name",
            ));
        }
    }

    // Superclass declarations must agree across a class's methods, and chains
    // must terminate.
    let mut super_of: BTreeMap<&str, Option<&str>> = BTreeMap::new();
    for (class, supers) in &class_supers {
        if supers.len() > 1 {
            out.push(Violation::new(
                ViolationCode::SuperclassConflict,
                (*class).to_string(),
                "methods of this class disagree on its superclass",
            ));
        }
        super_of.insert(class, supers.iter().next().copied().flatten());
    }
    for start in super_of.keys() {
        let mut path = vec![*start];
        let mut cursor = *start;
        while let Some(Some(next)) = super_of.get(cursor) {
            if path.contains(next) {
                out.push(Violation::new(
                    ViolationCode::InheritanceCycle,
                    (*start).to_string(),
                    format!("superclass chain revisits '{next}' via {}", path.join(" -> ")),
                ));
                break;
            }
            path.push(next);
            cursor = next;
        }
    }

    // Functionality-level checks.
    let mut functionality_names = BTreeSet::new();
    let by_id: BTreeMap<&str, &MethodRecord> =
        model.methods.iter().map(|m| (m.id.as_str(), m)).collect();
    for f in &model.functionalities {
        if !functionality_names.insert(f.name.as_str()) {
            out.push(Violation::new(
                ViolationCode::DuplicateFunctionalityName,
                f.name.clone(),
                "functionality name declared more than once",
            ));
        }
        match by_id.get(f.controller_method_id.as_str()) {
            None => out.push(Violation::new(
                ViolationCode::UnknownController,
                f.name.clone(),
                format!("controller method '{}' not declared", f.controller_method_id),
            )),
            Some(m) if m.method_type != MethodType::Controller => out.push(Violation::new(
                ViolationCode::NotAController,
                f.name.clone(),
                format!("method '{}' has type {:?}", f.controller_method_id, m.method_type),
            )),
            Some(_) => {}
        }
        let mut reported: BTreeSet<&str> = BTreeSet::new();
        for (pos, access) in f.trace.iter().enumerate() {
            if !entity_set.contains(access.entity.as_str()) && reported.insert(access.entity.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownTraceEntity,
                    f.name.clone(),
                    format!("position {pos} references undeclared entity '{}'", access.entity),
                ));
            }
        }
    }

    out.sort_by(|a, b| {
        (a.code.as_str(), &a.subject, &a.detail).cmp(&(b.code.as_str(), &b.subject, &b.detail))
    });
    out
}

// ---------------------------------------------------------------------------
// Decompositions
// ---------------------------------------------------------------------------

/// Identification strategy that produced a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Fvcg,
    Fvsa,
    Sa,
    Cv,
    Ev,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Strategy::Fvcg, Strategy::Fvsa, Strategy::Sa, Strategy::Cv, Strategy::Ev];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Fvcg => "fvcg",
            Strategy::Fvsa => "fvsa",
            Strategy::Sa => "sa",
            Strategy::Cv => "cv",
            Strategy::Ev => "ev",
        }
    }

    /// Entity-native strategies cluster entities directly, so the actual
    /// cluster count always equals the requested one.
    pub fn is_entity_native(self) -> bool {
        matches!(self, Strategy::Sa | Strategy::Ev)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rule defining inter-cluster distance during agglomeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    Average,
}

impl Linkage {
    pub const ALL: [Linkage; 3] = [Linkage::Single, Linkage::Complete, Linkage::Average];

    pub fn as_str(self) -> &'static str {
        match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Strategy id plus the full parameter tuple behind one decomposition.
/// Weight fields are populated per strategy: `type_weights` for the call
/// graph strategy, `access_weights` for the access-sequence strategy,
/// `measure_weights` for the similarity-measure strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub strategy: Strategy,
    pub linkage: Linkage,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth: Option<u32>,
    #[serde(rename = "typeWeights", skip_serializing_if = "Option::is_none", default)]
    pub type_weights: Option<[f64; 4]>,
    #[serde(rename = "accessWeights", skip_serializing_if = "Option::is_none", default)]
    pub access_weights: Option<[f64; 2]>,
    #[serde(rename = "measureWeights", skip_serializing_if = "Option::is_none", default)]
    pub measure_weights: Option<[f64; 4]>,
    #[serde(rename = "requestedN")]
    pub requested_clusters: usize,
    #[serde(rename = "actualN")]
    pub actual_clusters: usize,
}

impl Provenance {
    pub fn new(strategy: Strategy, linkage: Linkage) -> Self {
        Provenance {
            strategy,
            linkage,
            depth: None,
            type_weights: None,
            access_weights: None,
            measure_weights: None,
            requested_clusters: 0,
            actual_clusters: 0,
        }
    }

    /// Canonical ordering key over (linkage, depth, weights): the sweep emits
    /// records in this order and `select_best` breaks metric ties with it.
    pub fn param_key(&self) -> (u8, u32, Vec<OrderedF64>) {
        let weights: Vec<OrderedF64> = self
            .type_weights
            .map(|w| w.to_vec())
            .or_else(|| self.access_weights.map(|w| w.to_vec()))
            .or_else(|| self.measure_weights.map(|w| w.to_vec()))
            .unwrap_or_default()
            .into_iter()
            .map(OrderedF64)
            .collect();
        (self.linkage as u8, self.depth.unwrap_or(0), weights)
    }
}

/// Total ordering wrapper for finite weight values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedF64(pub f64);

impl Eq for OrderedF64 {}

impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("decomposition has no clusters")]
    NoClusters,
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("entity '{0}' appears in more than one cluster")]
    OverlappingClusters(String),
}

/// Partition of domain entities into candidate microservice clusters.
/// Clusters are stored in canonical order (by smallest member) so serialized
/// output is byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub provenance: Provenance,
    clusters: Vec<BTreeSet<EntityName>>,
}

impl Decomposition {
    /// Validates disjointness and non-emptiness, canonicalizes cluster order,
    /// and records the actual cluster count in the provenance.
    pub fn new(
        clusters: Vec<BTreeSet<EntityName>>,
        mut provenance: Provenance,
    ) -> Result<Self, DecompositionError> {
        if clusters.is_empty() {
            return Err(DecompositionError::NoClusters);
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for (i, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(DecompositionError::EmptyCluster(i));
            }
            for entity in cluster {
                if !seen.insert(entity.as_str()) {
                    return Err(DecompositionError::OverlappingClusters(entity.clone()));
                }
            }
        }
        let mut clusters = clusters;
        clusters.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
        provenance.actual_clusters = clusters.len();
        Ok(Decomposition { provenance, clusters })
    }

    pub fn clusters(&self) -> &[BTreeSet<EntityName>] {
        &self.clusters
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    /// All entities covered by the decomposition, sorted.
    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.clusters.iter().flat_map(|c| c.iter().map(|e| e.as_str()))
    }

    /// Entity -> cluster index lookup.
    pub fn assignment(&self) -> BTreeMap<&str, usize> {
        let mut map = BTreeMap::new();
        for (i, cluster) in self.clusters.iter().enumerate() {
            for entity in cluster {
                map.insert(entity.as_str(), i);
            }
        }
        map
    }
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Non-fatal events raised while building vectors, converting clusters, or
/// scoring decompositions. Diagnostics flow to a sidecar log, never into
/// data outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticKind {
    SkippedEmptyClass,
    SkippedEmptyTrace,
    SkippedCombination,
    OmittedEntity,
    SkippedAccesses,
    EmptyConversion,
    StrategyInapplicable,
}

impl DiagnosticKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticKind::SkippedEmptyClass => "SKIPPED_EMPTY_CLASS",
            DiagnosticKind::SkippedEmptyTrace => "SKIPPED_EMPTY_TRACE",
            DiagnosticKind::SkippedCombination => "SKIPPED_COMBINATION",
            DiagnosticKind::OmittedEntity => "OMITTED_ENTITY",
            DiagnosticKind::SkippedAccesses => "SKIPPED_ACCESSES",
            DiagnosticKind::EmptyConversion => "EMPTY_CONVERSION",
            DiagnosticKind::StrategyInapplicable => "STRATEGY_INAPPLICABLE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub subject: String,
    pub detail: String,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, subject: impl Into<String>, detail: impl Into<String>) -> Self {
        Diagnostic { kind, subject: subject.into(), detail: detail.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.kind.as_str(), self.subject, self.detail)
    }
}
