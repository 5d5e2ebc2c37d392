//! Engine for identifying candidate microservice decompositions of a
//! monolith from a serialized codebase model.
//!
//! The pipeline: a [`model::CodebaseModel`] (methods, call edges, embeddings,
//! entities, functionality access traces) is turned into labeled vectors by
//! one of five strategies, clustered agglomeratively, converted into entity
//! decompositions, and scored with cohesion/coupling/complexity metrics.
//! The [`experiment`] module sweeps the full parameter space and feeds the
//! statistical comparison of strategies.
//!
//! Strategies:
//!
//! - `fvcg` — functionality vectors aggregated over the depth-bounded call
//!   graph, weighted by method type.
//! - `fvsa` — functionality vectors aggregated over the access trace,
//!   weighted by access mode.
//! - `sa`   — entity feature vectors from four access-based similarity
//!   measures.
//! - `cv`   — class vectors (mean of method embeddings, inheritance
//!   included).
//! - `ev`   — entity vectors (class vectors restricted to entity classes).

pub mod cluster;
pub mod experiment;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod report;
pub mod sa;
pub mod stats;
pub mod vectorize;

pub use model::{
    Access, AccessMode, CodebaseModel, Decomposition, Diagnostic, DiagnosticKind, Embedding,
    Functionality, Linkage, MethodRecord, MethodType, Provenance, Strategy, Violation,
    ViolationCode,
};
