//! Brute-force transcriptions of the scoring and vectorization definitions,
//! written directly against the model types and kept independent of the
//! engine's computation paths. Everything here favors clarity over speed.

use std::collections::BTreeSet;

use decomp_core::model::{
    AccessMode, CodebaseModel, Decomposition, Functionality, MethodRecord, MethodType,
};

fn method<'a>(model: &'a CodebaseModel, id: &str) -> Option<&'a MethodRecord> {
    model.methods.iter().find(|m| m.id == id)
}

/// Methods reachable from `start` by at most `depth - 1` call edges,
/// ids sorted.
pub fn reachable_nodes(model: &CodebaseModel, start: &str, depth: u32) -> Vec<String> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(start.to_string());
    let mut frontier = vec![start.to_string()];
    for _ in 1..depth {
        let mut next = Vec::new();
        for id in frontier {
            if let Some(m) = method(model, &id) {
                for callee in &m.calls {
                    if method(model, callee).is_some() && seen.insert(callee.clone()) {
                        next.push(callee.clone());
                    }
                }
            }
        }
        frontier = next;
    }
    seen.into_iter().collect()
}

fn type_weight(weights: &[f64; 4], method_type: MethodType) -> f64 {
    match method_type {
        MethodType::Controller => weights[0],
        MethodType::Service => weights[1],
        MethodType::Entity => weights[2],
        MethodType::Intermediate => weights[3],
    }
}

/// Weighted mean over the call-graph node set, node by node.
pub fn fvcg(
    model: &CodebaseModel,
    f: &Functionality,
    depth: u32,
    weights: &[f64; 4],
) -> Option<Vec<f64>> {
    let dim = model.embedding_dimension;
    let mut numerator = vec![0.0; dim];
    let mut denominator = 0.0;
    for id in reachable_nodes(model, &f.controller_method_id, depth) {
        let m = method(model, &id)?;
        let w = type_weight(weights, m.method_type);
        denominator += w;
        for (acc, v) in numerator.iter_mut().zip(m.embedding.values()) {
            *acc += w * v;
        }
    }
    if denominator == 0.0 {
        return None;
    }
    Some(numerator.into_iter().map(|v| v / denominator).collect())
}

/// Superclass-chain method list of a class, then the plain mean.
pub fn class_embedding(model: &CodebaseModel, class: &str) -> Option<Vec<f64>> {
    let mut rows: Vec<&MethodRecord> = Vec::new();
    let mut current = Some(class.to_string());
    let mut visited: BTreeSet<String> = BTreeSet::new();
    while let Some(name) = current {
        if !visited.insert(name.clone()) {
            break;
        }
        let mut own: Vec<&MethodRecord> =
            model.methods.iter().filter(|m| m.class_name == name).collect();
        own.sort_by(|a, b| a.id.cmp(&b.id));
        current = own.first().and_then(|m| m.super_class.clone());
        rows.extend(own);
    }
    if rows.is_empty() {
        return None;
    }
    let dim = model.embedding_dimension;
    let mut mean = vec![0.0; dim];
    for m in &rows {
        for (acc, v) in mean.iter_mut().zip(m.embedding.values()) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= rows.len() as f64;
    }
    Some(mean)
}

pub fn entity_embedding(model: &CodebaseModel, entity: &str) -> Option<Vec<f64>> {
    let mut carriers: Vec<&MethodRecord> =
        model.methods.iter().filter(|m| m.entity_name.as_deref() == Some(entity)).collect();
    carriers.sort_by(|a, b| a.id.cmp(&b.id));
    class_embedding(model, &carriers.first()?.class_name)
}

/// Weighted mean over trace occurrences, read and write weighted apart.
pub fn fvsa(model: &CodebaseModel, f: &Functionality, weights: &[f64; 2]) -> Option<Vec<f64>> {
    if f.trace.is_empty() {
        return None;
    }
    let dim = model.embedding_dimension;
    let mut numerator = vec![0.0; dim];
    let mut denominator = 0.0;
    for access in &f.trace {
        let w = match access.mode {
            AccessMode::R => weights[0],
            AccessMode::W => weights[1],
        };
        let embedding = entity_embedding(model, &access.entity)?;
        denominator += w;
        for (acc, v) in numerator.iter_mut().zip(&embedding) {
            *acc += w * v;
        }
    }
    if denominator == 0.0 {
        return None;
    }
    Some(numerator.into_iter().map(|v| v / denominator).collect())
}

fn functionalities_matching(
    model: &CodebaseModel,
    entity: &str,
    want: Option<AccessMode>,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for f in &model.functionalities {
        let hit = f.trace.iter().any(|a| {
            a.entity == entity && want.is_none_or(|mode| a.mode == mode)
        });
        if hit {
            out.insert(f.name.clone());
        }
    }
    out
}

fn share_of(base: &BTreeSet<String>, other: &BTreeSet<String>) -> f64 {
    if base.is_empty() {
        return 0.0;
    }
    let both = base.iter().filter(|f| other.contains(*f)).count();
    both as f64 / base.len() as f64
}

pub fn access(model: &CodebaseModel, ei: &str, ej: &str) -> f64 {
    share_of(
        &functionalities_matching(model, ei, None),
        &functionalities_matching(model, ej, None),
    )
}

pub fn read(model: &CodebaseModel, ei: &str, ej: &str) -> f64 {
    share_of(
        &functionalities_matching(model, ei, Some(AccessMode::R)),
        &functionalities_matching(model, ej, Some(AccessMode::R)),
    )
}

pub fn write(model: &CodebaseModel, ei: &str, ej: &str) -> f64 {
    share_of(
        &functionalities_matching(model, ei, Some(AccessMode::W)),
        &functionalities_matching(model, ej, Some(AccessMode::W)),
    )
}

fn adjacent_count(model: &CodebaseModel, a: &str, b: &str) -> u64 {
    let mut count = 0;
    for f in &model.functionalities {
        for pair in f.trace.windows(2) {
            let (x, y) = (pair[0].entity.as_str(), pair[1].entity.as_str());
            if (x == a && y == b) || (x == b && y == a) {
                count += 1;
            }
        }
    }
    count
}

pub fn sequence(model: &CodebaseModel, ei: &str, ej: &str) -> f64 {
    if ei == ej {
        return 0.0;
    }
    let mut global_max = 0;
    for (i, a) in model.entities.iter().enumerate() {
        for b in model.entities.iter().skip(i + 1) {
            global_max = global_max.max(adjacent_count(model, a, b));
        }
    }
    if global_max == 0 {
        return 0.0;
    }
    adjacent_count(model, ei, ej) as f64 / global_max as f64
}

fn cluster_of(decomposition: &Decomposition, entity: &str) -> Option<usize> {
    decomposition
        .clusters()
        .iter()
        .position(|cluster| cluster.contains(entity))
}

/// Trace restricted to covered entities, as (entity, mode, cluster) triples.
fn covered_trace<'a>(
    decomposition: &Decomposition,
    f: &'a Functionality,
) -> Vec<(&'a str, AccessMode, usize)> {
    f.trace
        .iter()
        .filter_map(|a| {
            cluster_of(decomposition, &a.entity).map(|c| (a.entity.as_str(), a.mode, c))
        })
        .collect()
}

pub fn cohesion(decomposition: &Decomposition, model: &CodebaseModel) -> f64 {
    let k = decomposition.cluster_count();
    let mut total = 0.0;
    for (index, cluster) in decomposition.clusters().iter().enumerate() {
        let mut shares: Vec<f64> = Vec::new();
        for f in &model.functionalities {
            let touched: BTreeSet<&str> = covered_trace(decomposition, f)
                .into_iter()
                .filter(|(_, _, c)| *c == index)
                .map(|(e, _, _)| e)
                .collect();
            if !touched.is_empty() {
                shares.push(touched.len() as f64 / cluster.len() as f64);
            }
        }
        if !shares.is_empty() {
            total += shares.iter().sum::<f64>() / shares.len() as f64;
        }
    }
    total / k as f64
}

pub fn coupling(decomposition: &Decomposition, model: &CodebaseModel) -> f64 {
    let k = decomposition.cluster_count();
    if k < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for c1 in 0..k {
        for c2 in 0..k {
            if c1 == c2 {
                continue;
            }
            let mut exposed: BTreeSet<&str> = BTreeSet::new();
            for f in &model.functionalities {
                let trace = covered_trace(decomposition, f);
                for pair in trace.windows(2) {
                    if pair[0].2 == c1 && pair[1].2 == c2 {
                        exposed.insert(pair[1].0);
                    }
                }
            }
            total += exposed.len() as f64 / decomposition.clusters()[c2].len() as f64;
        }
    }
    total / (k * (k - 1)) as f64
}

fn transaction_runs<'a>(
    decomposition: &Decomposition,
    f: &'a Functionality,
) -> Vec<Vec<(&'a str, AccessMode)>> {
    let mut runs: Vec<Vec<(&str, AccessMode)>> = Vec::new();
    let mut last_cluster: Option<usize> = None;
    for (entity, mode, cluster) in covered_trace(decomposition, f) {
        if last_cluster == Some(cluster) {
            runs.last_mut().unwrap().push((entity, mode));
        } else {
            runs.push(vec![(entity, mode)]);
            last_cluster = Some(cluster);
        }
    }
    runs
}

pub fn complexity(decomposition: &Decomposition, model: &CodebaseModel) -> f64 {
    let distributed: Vec<&Functionality> = model
        .functionalities
        .iter()
        .filter(|f| transaction_runs(decomposition, f).len() >= 2)
        .collect();
    let mut total = 0u64;
    for f in &distributed {
        for run in transaction_runs(decomposition, f) {
            let distinct: BTreeSet<(&str, AccessMode)> = run.into_iter().collect();
            for (entity, mode) in distinct {
                let opposite = match mode {
                    AccessMode::R => AccessMode::W,
                    AccessMode::W => AccessMode::R,
                };
                total += distributed
                    .iter()
                    .filter(|g| {
                        g.name != f.name
                            && g.trace.iter().any(|a| a.entity == entity && a.mode == opposite)
                    })
                    .count() as u64;
            }
        }
    }
    total as f64
}
