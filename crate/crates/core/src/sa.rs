//! The four access-based similarity measures between domain entities and the
//! assembly of entity feature vectors from them.
//!
//! Access, read, and write are set-based and asymmetric: from entity `ei`,
//! the share of its accessing (reading, writing) functionalities that also
//! touch `ej`. Sequence counts adjacent trace positions covering an entity
//! pair, normalized by the global maximum, and is symmetric by construction.
//! Division by an empty set yields 0 so isolated entities survive sweeps.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{CodebaseModel, Embedding, EntityName, FunctionalityName};
use crate::vectorize::{check_weight_sum, LabeledVectors};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SaError {
    #[error("need at least 2 entities, found {0}")]
    TooFewEntities(usize),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
}

/// Weights over the four similarity measures, in percent, summing to 100.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureWeights {
    pub access: f64,
    pub read: f64,
    pub write: f64,
    pub sequence: f64,
}

impl MeasureWeights {
    pub fn new(access: f64, read: f64, write: f64, sequence: f64) -> Result<Self, SaError> {
        check_weight_sum(&[access, read, write, sequence]).map_err(SaError::InvalidWeights)?;
        Ok(MeasureWeights { access, read, write, sequence })
    }

    pub fn from_array(w: [f64; 4]) -> Result<Self, SaError> {
        MeasureWeights::new(w[0], w[1], w[2], w[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.access, self.read, self.write, self.sequence]
    }
}

/// Reader, writer, and accessor functionality sets per declared entity.
/// Accessors are the union of readers and writers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntitySets {
    pub readers: BTreeSet<FunctionalityName>,
    pub writers: BTreeSet<FunctionalityName>,
    pub accessors: BTreeSet<FunctionalityName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessSets {
    per_entity: BTreeMap<EntityName, EntitySets>,
}

impl AccessSets {
    pub fn get(&self, entity: &str) -> Option<&EntitySets> {
        self.per_entity.get(entity)
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.per_entity.keys().map(|e| e.as_str())
    }
}

/// Collects reader/writer/accessor sets for every declared entity, including
/// entities never touched by any trace (all three sets empty).
pub fn build_access_sets(model: &CodebaseModel) -> AccessSets {
    let mut per_entity: BTreeMap<EntityName, EntitySets> =
        model.entities.iter().map(|e| (e.clone(), EntitySets::default())).collect();
    for f in &model.functionalities {
        for access in &f.trace {
            let Some(sets) = per_entity.get_mut(&access.entity) else { continue };
            match access.mode {
                crate::model::AccessMode::R => {
                    sets.readers.insert(f.name.clone());
                }
                crate::model::AccessMode::W => {
                    sets.writers.insert(f.name.clone());
                }
            }
            sets.accessors.insert(f.name.clone());
        }
    }
    AccessSets { per_entity }
}

fn share(base: &BTreeSet<FunctionalityName>, other: &BTreeSet<FunctionalityName>) -> f64 {
    if base.is_empty() {
        return 0.0;
    }
    base.intersection(other).count() as f64 / base.len() as f64
}

/// Of the functionalities accessing `ei`, the share that also access `ej`.
pub fn measure_access(sets: &AccessSets, ei: &str, ej: &str) -> f64 {
    match (sets.get(ei), sets.get(ej)) {
        (Some(a), Some(b)) => share(&a.accessors, &b.accessors),
        _ => 0.0,
    }
}

/// Of the functionalities reading `ei`, the share that also read `ej`.
pub fn measure_read(sets: &AccessSets, ei: &str, ej: &str) -> f64 {
    match (sets.get(ei), sets.get(ej)) {
        (Some(a), Some(b)) => share(&a.readers, &b.readers),
        _ => 0.0,
    }
}

/// Of the functionalities writing `ei`, the share that also write `ej`.
pub fn measure_write(sets: &AccessSets, ei: &str, ej: &str) -> f64 {
    match (sets.get(ei), sets.get(ej)) {
        (Some(a), Some(b)) => share(&a.writers, &b.writers),
        _ => 0.0,
    }
}

/// Adjacent-access counts per unordered entity pair, over all traces.
/// Same-entity repetitions are not a pair of two entities and never count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceCounts {
    counts: BTreeMap<(EntityName, EntityName), u64>,
    max: u64,
}

impl SequenceCounts {
    pub fn build(model: &CodebaseModel) -> Self {
        let mut counts: BTreeMap<(EntityName, EntityName), u64> = BTreeMap::new();
        for f in &model.functionalities {
            for pair in f.trace.windows(2) {
                let (a, b) = (&pair[0].entity, &pair[1].entity);
                if a == b {
                    continue;
                }
                let key = if a < b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        let max = counts.values().copied().max().unwrap_or(0);
        SequenceCounts { counts, max }
    }

    /// Pair count over the global maximum; 0 when no trace has adjacencies.
    pub fn measure(&self, ei: &str, ej: &str) -> f64 {
        if self.max == 0 || ei == ej {
            return 0.0;
        }
        let key = if ei < ej { (ei.to_string(), ej.to_string()) } else { (ej.to_string(), ei.to_string()) };
        self.counts.get(&key).copied().unwrap_or(0) as f64 / self.max as f64
    }
}

/// Consecutive-access similarity between two entities.
pub fn measure_sequence(model: &CodebaseModel, ei: &str, ej: &str) -> f64 {
    SequenceCounts::build(model).measure(ei, ej)
}

// ---------------------------------------------------------------------------
// Feature vector assembly
// ---------------------------------------------------------------------------

/// The four full similarity matrices over sorted entities. Weight-independent;
/// built once per model, then combined per weight tuple during sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrices {
    entities: Vec<EntityName>,
    access: Vec<Vec<f64>>,
    read: Vec<Vec<f64>>,
    write: Vec<Vec<f64>>,
    sequence: Vec<Vec<f64>>,
}

impl SimilarityMatrices {
    pub fn build(model: &CodebaseModel) -> Result<Self, SaError> {
        let mut entities: Vec<EntityName> = model.entities.clone();
        entities.sort();
        entities.dedup();
        if entities.len() < 2 {
            return Err(SaError::TooFewEntities(entities.len()));
        }
        let sets = build_access_sets(model);
        let seq = SequenceCounts::build(model);
        let n = entities.len();
        let mut access = vec![vec![0.0; n]; n];
        let mut read = vec![vec![0.0; n]; n];
        let mut write = vec![vec![0.0; n]; n];
        let mut sequence = vec![vec![0.0; n]; n];
        for (i, ei) in entities.iter().enumerate() {
            for (j, ej) in entities.iter().enumerate() {
                access[i][j] = measure_access(&sets, ei, ej);
                read[i][j] = measure_read(&sets, ei, ej);
                write[i][j] = measure_write(&sets, ei, ej);
                sequence[i][j] = seq.measure(ei, ej);
            }
        }
        Ok(SimilarityMatrices { entities, access, read, write, sequence })
    }

    pub fn entities(&self) -> &[EntityName] {
        &self.entities
    }

    /// Row `i` of the weighted combination is entity `i`'s feature vector;
    /// clustering treats rows as points under Euclidean distance.
    pub fn combine(&self, weights: &MeasureWeights) -> LabeledVectors {
        let n = self.entities.len();
        let mut entries = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<f64> = (0..n)
                .map(|j| {
                    (weights.access / 100.0) * self.access[i][j]
                        + (weights.read / 100.0) * self.read[i][j]
                        + (weights.write / 100.0) * self.write[i][j]
                        + (weights.sequence / 100.0) * self.sequence[i][j]
                })
                .collect();
            entries.push((self.entities[i].clone(), Embedding::new(row)));
        }
        LabeledVectors::new(entries).expect("entity labels are unique")
    }
}

/// Entity feature vectors from the weighted combination of the four
/// similarity measures. Dimension equals the entity count, diagonal included.
pub fn sa_feature_vectors(
    model: &CodebaseModel,
    weights: &MeasureWeights,
) -> Result<LabeledVectors, SaError> {
    Ok(SimilarityMatrices::build(model)?.combine(weights))
}
