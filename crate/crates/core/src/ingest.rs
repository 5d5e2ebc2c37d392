//! Reading and writing the codebase-model file format, plus a deterministic
//! synthetic model generator with hash-based stand-in embeddings.
//!
//! The on-disk format is JSON with a `version` field (`cdm/1`) so collectors
//! in any ecosystem can emit it. Collector method labels (controller,
//! service, entity, repository, configuration, other) are normalized to the
//! four in-memory method types at load; repository, configuration and other
//! become `Intermediate`.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate_model, Access, CodebaseModel, Embedding, Functionality, MethodRecord, MethodType,
    Violation,
};

pub const MODEL_FORMAT_VERSION: &str = "cdm/1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("model failed validation with {} violation(s)", report.len())]
    Validation { report: Vec<Violation> },
    #[error("io error on '{}': {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

// ---------------------------------------------------------------------------
// File schema
// ---------------------------------------------------------------------------

/// Collector-facing method labels. Richer than the in-memory set; normalized
/// on load, and `Intermediate` canonically saves as `other`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMethodType {
    Controller,
    Service,
    Entity,
    Repository,
    Configuration,
    Other,
}

impl RawMethodType {
    fn normalize(self) -> MethodType {
        match self {
            RawMethodType::Controller => MethodType::Controller,
            RawMethodType::Service => MethodType::Service,
            RawMethodType::Entity => MethodType::Entity,
            RawMethodType::Repository | RawMethodType::Configuration | RawMethodType::Other => {
                MethodType::Intermediate
            }
        }
    }

    fn canonical(method_type: MethodType) -> RawMethodType {
        match method_type {
            MethodType::Controller => RawMethodType::Controller,
            MethodType::Service => RawMethodType::Service,
            MethodType::Entity => RawMethodType::Entity,
            MethodType::Intermediate => RawMethodType::Other,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileMethod {
    id: String,
    #[serde(rename = "className")]
    class_name: String,
    #[serde(rename = "superClass", skip_serializing_if = "Option::is_none", default)]
    super_class: Option<String>,
    #[serde(rename = "methodType")]
    method_type: RawMethodType,
    #[serde(rename = "entityName", skip_serializing_if = "Option::is_none", default)]
    entity_name: Option<String>,
    embedding: Vec<f64>,
    calls: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileFunctionality {
    name: String,
    #[serde(rename = "controllerMethodId")]
    controller_method_id: String,
    trace: Vec<Access>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileModel {
    version: String,
    name: String,
    #[serde(rename = "embeddingDimension")]
    embedding_dimension: usize,
    methods: Vec<FileMethod>,
    entities: Vec<String>,
    functionalities: Vec<FileFunctionality>,
}

// ---------------------------------------------------------------------------
// Load / save
// ---------------------------------------------------------------------------

/// Loads a model file; the returned model always passes `validate_model`.
/// Collections are put into canonical order (methods by id, entities and
/// functionalities by name) regardless of file order.
pub fn load_model(path: impl AsRef<Path>) -> Result<CodebaseModel, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    parse_model(&text)
}

/// Same as [`load_model`] but from an in-memory string.
pub fn parse_model(text: &str) -> Result<CodebaseModel, IngestError> {
    let model = parse_model_unchecked(text)?;
    let report = validate_model(&model);
    if !report.is_empty() {
        return Err(IngestError::Validation { report });
    }
    Ok(model)
}

/// Loads a model without running validation, for callers that report the
/// violations themselves.
pub fn load_model_unchecked(path: impl AsRef<Path>) -> Result<CodebaseModel, IngestError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|source| IngestError::Io { path: path.to_path_buf(), source })?;
    parse_model_unchecked(&text)
}

/// Schema-checked parse with canonical ordering, no invariant validation.
pub fn parse_model_unchecked(text: &str) -> Result<CodebaseModel, IngestError> {
    let file: FileModel = serde_json::from_str(text).map_err(classify_json_error)?;
    if file.version != MODEL_FORMAT_VERSION {
        return Err(IngestError::Schema(format!(
            "unsupported version '{}' (expected '{MODEL_FORMAT_VERSION}')",
            file.version
        )));
    }
    let mut model = CodebaseModel {
        name: file.name,
        embedding_dimension: file.embedding_dimension,
        methods: file
            .methods
            .into_iter()
            .map(|m| MethodRecord {
                id: m.id,
                class_name: m.class_name,
                super_class: m.super_class,
                method_type: m.method_type.normalize(),
                entity_name: m.entity_name,
                embedding: Embedding::new(m.embedding),
                calls: m.calls,
            })
            .collect(),
        entities: file.entities,
        functionalities: file
            .functionalities
            .into_iter()
            .map(|f| Functionality {
                name: f.name,
                controller_method_id: f.controller_method_id,
                trace: f.trace,
            })
            .collect(),
    };
    canonicalize(&mut model);
    Ok(model)
}

fn classify_json_error(err: serde_json::Error) -> IngestError {
    match err.classify() {
        serde_json::error::Category::Syntax | serde_json::error::Category::Eof => {
            IngestError::Parse { line: err.line(), column: err.column(), message: err.to_string() }
        }
        _ => IngestError::Schema(err.to_string()),
    }
}

fn canonicalize(model: &mut CodebaseModel) {
    model.methods.sort_by(|a, b| a.id.cmp(&b.id));
    for m in &mut model.methods {
        m.calls.sort();
    }
    model.entities.sort();
    model.functionalities.sort_by(|a, b| a.name.cmp(&b.name));
}

/// Writes a model in canonical form: fixed key order, collections sorted,
/// byte-identical output for identical input.
pub fn save_model(model: &CodebaseModel, path: impl AsRef<Path>) -> Result<(), IngestError> {
    let path = path.as_ref();
    let report = validate_model(model);
    if !report.is_empty() {
        return Err(IngestError::Validation { report });
    }
    let text = render_model(model);
    fs::write(path, text).map_err(|source| IngestError::Io { path: path.to_path_buf(), source })
}

/// Canonical serialization of a model, as written by [`save_model`].
pub fn render_model(model: &CodebaseModel) -> String {
    let mut canonical = model.clone();
    canonicalize(&mut canonical);
    let file = FileModel {
        version: MODEL_FORMAT_VERSION.to_string(),
        name: canonical.name,
        embedding_dimension: canonical.embedding_dimension,
        methods: canonical
            .methods
            .into_iter()
            .map(|m| FileMethod {
                id: m.id,
                class_name: m.class_name,
                super_class: m.super_class,
                method_type: RawMethodType::canonical(m.method_type),
                entity_name: m.entity_name,
                embedding: m.embedding.values().to_vec(),
                calls: m.calls,
            })
            .collect(),
        entities: canonical.entities,
        functionalities: canonical
            .functionalities
            .into_iter()
            .map(|f| FileFunctionality {
                name: f.name,
                controller_method_id: f.controller_method_id,
                trace: f.trace,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("model serialization cannot fail");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------------
// Stand-in embeddings
// ---------------------------------------------------------------------------

/// FNV-1a, 64-bit. Stable across platforms and releases, which `DefaultHasher`
/// does not guarantee.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Deterministic stand-in for learned method vectors. Each token's 64-bit
/// hash selects an index (`hash % dimension`) and a sign (hash parity, even
/// positive); signs accumulate per index and the result is L2-normalized
/// unless it is all-zero.
pub fn hash_embedding<S: AsRef<str>>(tokens: &[S], dimension: usize) -> Embedding {
    assert!(dimension >= 1, "embedding dimension must be at least 1");
    let mut values = vec![0.0f64; dimension];
    for token in tokens {
        let hash = fnv1a64(token.as_ref().as_bytes());
        let index = (hash % dimension as u64) as usize;
        let sign = if hash & 1 == 0 { 1.0 } else { -1.0 };
        values[index] += sign;
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in &mut values {
            *v /= norm;
        }
    }
    Embedding::new(values)
}

// ---------------------------------------------------------------------------
// Synthetic models
// ---------------------------------------------------------------------------

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntheticSpecError {
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("trace length range [{0}, {1}] has lower bound above upper bound")]
    BadTraceRange(usize, usize),
}

/// Parameters for the synthetic generator. Identical specs produce identical
/// models, byte for byte once saved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub entity_count: usize,
    pub functionality_count: usize,
    pub methods_per_class: usize,
    pub embedding_dimension: usize,
    pub trace_length_range: (usize, usize),
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SyntheticSpecError> {
        for (name, value) in [
            ("entity count", self.entity_count),
            ("functionality count", self.functionality_count),
            ("methods per class", self.methods_per_class),
            ("embedding dimension", self.embedding_dimension),
        ] {
            if value == 0 {
                return Err(SyntheticSpecError::ZeroCount(name));
            }
        }
        let (lo, hi) = self.trace_length_range;
        if lo > hi {
            return Err(SyntheticSpecError::BadTraceRange(lo, hi));
        }
        Ok(())
    }
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            entity_count: 12,
            functionality_count: 16,
            methods_per_class: 3,
            embedding_dimension: 384,
            trace_length_range: (1, 6),
            seed: 0,
        }
    }
}

const WORDS: [&str; 24] = [
    "account", "audit", "batch", "cache", "dispatch", "export", "fetch", "filter", "index",
    "invoice", "ledger", "merge", "notify", "order", "parse", "publish", "query", "report",
    "schedule", "submit", "sync", "token", "update", "verify",
];

/// Generates a validated synthetic model: one entity class per entity (every
/// third one extending a shared base class to exercise inheritance), one
/// controller and one service class per functionality, and a pool of utility
/// classes. Controllers call into service methods, services into entity and
/// utility methods, utilities into entity methods, so call graphs have depth
/// beyond the controller.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<CodebaseModel, SyntheticSpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dim = spec.embedding_dimension;
    let mpc = spec.methods_per_class;

    let entities: Vec<String> = (0..spec.entity_count).map(|i| format!("Entity{i:03}")).collect();

    let mut methods: Vec<MethodRecord> = Vec::new();
    let embed = |rng: &mut ChaCha8Rng, class: &str, local: &str, kind: &str| {
        let tokens = [
            class.to_string(),
            local.to_string(),
            kind.to_string(),
            WORDS[rng.random_range(0..WORDS.len())].to_string(),
            WORDS[rng.random_range(0..WORDS.len())].to_string(),
        ];
        hash_embedding(&tokens, dim)
    };

    // Shared base class exercising the inheritance closure.
    let base_class = "BaseRecord";
    for k in 0..mpc {
        let local = format!("m{k}");
        let embedding = embed(&mut rng, base_class, &local, "intermediate");
        methods.push(MethodRecord {
            id: format!("{base_class}.{local}"),
            class_name: base_class.to_string(),
            super_class: None,
            method_type: MethodType::Intermediate,
            entity_name: None,
            embedding,
            calls: vec![],
        });
    }

    let mut entity_method_ids: Vec<String> = Vec::new();
    for (i, entity) in entities.iter().enumerate() {
        let super_class = (i % 3 == 0).then(|| base_class.to_string());
        for k in 0..mpc {
            let local = format!("m{k}");
            let id = format!("{entity}.{local}");
            let embedding = embed(&mut rng, entity, &local, "entity");
            entity_method_ids.push(id.clone());
            methods.push(MethodRecord {
                id,
                class_name: entity.clone(),
                super_class: super_class.clone(),
                method_type: MethodType::Entity,
                entity_name: Some(entity.clone()),
                embedding,
                calls: vec![],
            });
        }
    }

    let util_count = (spec.entity_count / 4).max(1);
    let mut util_method_ids: Vec<String> = Vec::new();
    for u in 0..util_count {
        let class = format!("Util{u:02}");
        for k in 0..mpc {
            let local = format!("m{k}");
            let id = format!("{class}.{local}");
            let embedding = embed(&mut rng, &class, &local, "intermediate");
            let calls = sample_distinct(&mut rng, &entity_method_ids, 0..=1);
            util_method_ids.push(id.clone());
            methods.push(MethodRecord {
                id,
                class_name: class.clone(),
                super_class: None,
                method_type: MethodType::Intermediate,
                entity_name: None,
                embedding,
                calls,
            });
        }
    }

    let leaf_pool: Vec<String> =
        entity_method_ids.iter().chain(util_method_ids.iter()).cloned().collect();
    let mut service_method_ids: Vec<String> = Vec::new();
    for j in 0..spec.functionality_count {
        let class = format!("Service{j:03}");
        for k in 0..mpc {
            let local = format!("m{k}");
            let id = format!("{class}.{local}");
            let embedding = embed(&mut rng, &class, &local, "service");
            let calls = sample_distinct(&mut rng, &leaf_pool, 0..=2);
            service_method_ids.push(id.clone());
            methods.push(MethodRecord {
                id,
                class_name: class.clone(),
                super_class: None,
                method_type: MethodType::Service,
                entity_name: None,
                embedding,
                calls,
            });
        }
    }

    let mut functionalities: Vec<Functionality> = Vec::new();
    for j in 0..spec.functionality_count {
        let class = format!("Controller{j:03}");
        for k in 0..mpc {
            let local = format!("m{k}");
            let id = format!("{class}.{local}");
            let embedding = embed(&mut rng, &class, &local, "controller");
            // The functionality root always reaches its own service class;
            // the other controller methods fan out at random.
            let calls = if k == 0 {
                let mut calls = vec![format!("Service{j:03}.m0")];
                calls.extend(sample_distinct(&mut rng, &service_method_ids, 0..=2));
                calls.sort();
                calls.dedup();
                calls
            } else {
                sample_distinct(&mut rng, &service_method_ids, 0..=2)
            };
            methods.push(MethodRecord {
                id,
                class_name: class.clone(),
                super_class: None,
                method_type: MethodType::Controller,
                entity_name: None,
                embedding,
                calls,
            });
        }
        let (lo, hi) = spec.trace_length_range;
        let length = rng.random_range(lo..=hi);
        let trace = (0..length)
            .map(|_| {
                let entity = entities[rng.random_range(0..entities.len())].clone();
                if rng.random_range(0..2) == 0 {
                    Access::read(entity)
                } else {
                    Access::write(entity)
                }
            })
            .collect();
        functionalities.push(Functionality {
            name: format!("Func{j:03}"),
            controller_method_id: format!("{class}.m0"),
            trace,
        });
    }

    let mut model = CodebaseModel {
        name: format!("synthetic-{}", spec.seed),
        embedding_dimension: dim,
        methods,
        entities,
        functionalities,
    };
    canonicalize(&mut model);
    let report = validate_model(&model);
    assert!(report.is_empty(), "generator produced an invalid model: {report:?}");
    Ok(model)
}

fn sample_distinct(
    rng: &mut ChaCha8Rng,
    pool: &[String],
    count_range: std::ops::RangeInclusive<usize>,
) -> Vec<String> {
    let count = rng.random_range(count_range).min(pool.len());
    let mut picked = std::collections::BTreeSet::new();
    while picked.len() < count {
        picked.insert(pool[rng.random_range(0..pool.len())].clone());
    }
    picked.into_iter().collect()
}
