//! Acceptance suite. One test per criterion; each prints a PASS line once
//! its assertions hold, so a full run reads as a checklist.

mod oracle;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use decomp_core::cluster::{agglomerate, parse_decomposition, CondensedMatrix, Linkage};
use decomp_core::experiment::{
    cluster_count_range, run_sweep, run_sweeps, weight_grid, SweepConfig,
};
use decomp_core::ingest::{generate_synthetic, SyntheticSpec};
use decomp_core::metrics;
use decomp_core::model::{
    Access, CodebaseModel, Decomposition, Embedding, Functionality, MethodRecord, MethodType,
    Provenance, Strategy,
};
use decomp_core::sa::{build_access_sets, measure_access, measure_read, measure_write, SequenceCounts};
use decomp_core::stats::{drop_one_regressions, ols_fit, welch_t_test, StatsError};
use decomp_core::vectorize::{fvcg_vector, fvsa_vector, AccessWeights, TypeWeights, VectorizeError};

fn close(a: f64, b: f64, tolerance: f64) -> bool {
    (a - b).abs() <= tolerance * a.abs().max(b.abs()).max(1.0)
}

fn assert_close(a: f64, b: f64, tolerance: f64, context: &str) {
    assert!(close(a, b, tolerance), "{context}: {a} vs {b}");
}

fn batch_spec(seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        entity_count: 1 + (seed as usize) % 8,
        functionality_count: 1 + (seed as usize / 3) % 10,
        methods_per_class: 1 + (seed as usize) % 3,
        embedding_dimension: 2 + (seed as usize) % 5,
        trace_length_range: (0, (seed as usize) % 7),
        seed,
    }
}

/// Round-robin partition of the model's entities into k clusters.
fn round_robin_partition(model: &CodebaseModel, k: usize, offset: usize) -> Decomposition {
    let clusters: Vec<BTreeSet<String>> = (0..k)
        .map(|c| {
            model
                .entities
                .iter()
                .enumerate()
                .filter(|(i, _)| (i + offset) % k == c)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect();
    Decomposition::new(clusters, Provenance::new(Strategy::Ev, Linkage::Average)).unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1: formula oracles on 200 seeded models
// ---------------------------------------------------------------------------

#[test]
fn c1_formula_oracles_match_brute_force() {
    let started = Instant::now();
    let type_weight_tuples: [[f64; 4]; 4] = [
        [25.0, 25.0, 25.0, 25.0],
        [70.0, 10.0, 10.0, 10.0],
        [100.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 100.0, 0.0],
    ];
    let access_weight_tuples: [[f64; 2]; 3] = [[50.0, 50.0], [100.0, 0.0], [30.0, 70.0]];

    for seed in 0..200u64 {
        let model = generate_synthetic(&batch_spec(seed)).unwrap();

        // Functionality vectorization by call graph.
        for f in &model.functionalities {
            for depth in 1..=3u32 {
                for weights in &type_weight_tuples {
                    let implementation = fvcg_vector(
                        &model,
                        f,
                        depth,
                        &TypeWeights {
                            controller: weights[0],
                            service: weights[1],
                            entity: weights[2],
                            intermediate: weights[3],
                        },
                    );
                    match (implementation, oracle::fvcg(&model, f, depth, weights)) {
                        (Ok(got), Some(want)) => {
                            for (g, w) in got.values().iter().zip(&want) {
                                assert_close(*g, *w, 1e-9, &format!("fvcg {seed}/{}/{depth}", f.name));
                            }
                        }
                        (Err(VectorizeError::ZeroDenominator), None) => {}
                        (got, want) => panic!("fvcg {seed}/{}: {got:?} vs {want:?}", f.name),
                    }
                }
            }

            // Functionality vectorization by sequence of accesses.
            for weights in &access_weight_tuples {
                let implementation = fvsa_vector(
                    &model,
                    f,
                    &AccessWeights { read: weights[0], write: weights[1] },
                );
                match (implementation, oracle::fvsa(&model, f, weights)) {
                    (Ok(got), Some(want)) => {
                        for (g, w) in got.values().iter().zip(&want) {
                            assert_close(*g, *w, 1e-9, &format!("fvsa {seed}/{}", f.name));
                        }
                    }
                    (Err(VectorizeError::EmptyTrace(_)), None) => {}
                    (Err(VectorizeError::ZeroDenominator), None) => {}
                    (got, want) => panic!("fvsa {seed}/{}: {got:?} vs {want:?}", f.name),
                }
            }
        }

        // The four similarity measures, all ordered pairs. Set/count logic
        // divides identical integers, so equality is exact.
        let sets = build_access_sets(&model);
        let sequences = SequenceCounts::build(&model);
        for ei in &model.entities {
            for ej in &model.entities {
                assert_eq!(measure_access(&sets, ei, ej), oracle::access(&model, ei, ej), "access {seed} {ei}->{ej}");
                assert_eq!(measure_read(&sets, ei, ej), oracle::read(&model, ei, ej), "read {seed} {ei}->{ej}");
                assert_eq!(measure_write(&sets, ei, ej), oracle::write(&model, ei, ej), "write {seed} {ei}->{ej}");
                assert_eq!(sequences.measure(ei, ej), oracle::sequence(&model, ei, ej), "sequence {seed} {ei}->{ej}");
            }
        }

        // Decomposition metrics over round-robin partitions.
        for k in 1..=model.entities.len().min(4) {
            let decomposition = round_robin_partition(&model, k, seed as usize % k);
            assert_close(
                metrics::cohesion(&decomposition, &model),
                oracle::cohesion(&decomposition, &model),
                1e-9,
                &format!("cohesion {seed}/{k}"),
            );
            assert_close(
                metrics::coupling(&decomposition, &model),
                oracle::coupling(&decomposition, &model),
                1e-9,
                &format!("coupling {seed}/{k}"),
            );
            assert_eq!(
                metrics::complexity(&decomposition, &model),
                oracle::complexity(&decomposition, &model),
                "complexity {seed}/{k}"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "oracle batch took {elapsed:?}");
    println!("ACCEPTANCE C1 formula-oracles (200 models, {elapsed:?}): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 2: convexity and ratio invariance on 1000 draws
// ---------------------------------------------------------------------------

fn draw_call_graph_model(rng: &mut ChaCha8Rng) -> CodebaseModel {
    let dim = 3;
    let node_count = 1 + rng.random_range(1..6);
    let types = [MethodType::Controller, MethodType::Service, MethodType::Entity, MethodType::Intermediate];
    let mut methods = Vec::new();
    let mut entities = Vec::new();
    for i in 0..node_count {
        let method_type = if i == 0 { MethodType::Controller } else { types[rng.random_range(0..4)] };
        let entity_name = (method_type == MethodType::Entity).then(|| format!("E{i}"));
        if let Some(e) = &entity_name {
            entities.push(e.clone());
        }
        let embedding = Embedding::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect());
        let calls = if i == 0 { (1..node_count).map(|j| format!("m{j}")).collect() } else { vec![] };
        methods.push(MethodRecord {
            id: format!("m{i}"),
            class_name: format!("C{i}"),
            super_class: None,
            method_type,
            entity_name,
            embedding,
            calls,
        });
    }
    CodebaseModel {
        name: "draw".into(),
        embedding_dimension: dim,
        methods,
        entities,
        functionalities: vec![Functionality {
            name: "f".into(),
            controller_method_id: "m0".into(),
            trace: vec![],
        }],
    }
}

fn draw_trace_model(rng: &mut ChaCha8Rng) -> CodebaseModel {
    let dim = 3;
    let entity_count = 1 + rng.random_range(0..4);
    let mut methods = vec![MethodRecord {
        id: "ctl".into(),
        class_name: "Ctl".into(),
        super_class: None,
        method_type: MethodType::Controller,
        entity_name: None,
        embedding: Embedding::zeros(dim),
        calls: vec![],
    }];
    let entities: Vec<String> = (0..entity_count).map(|i| format!("E{i}")).collect();
    for e in &entities {
        methods.push(MethodRecord {
            id: format!("{e}.m"),
            class_name: e.clone(),
            super_class: None,
            method_type: MethodType::Entity,
            entity_name: Some(e.clone()),
            embedding: Embedding::new((0..dim).map(|_| rng.random_range(-5.0..5.0)).collect()),
            calls: vec![],
        });
    }
    let trace: Vec<Access> = (0..1 + rng.random_range(0..6))
        .map(|_| {
            let entity = entities[rng.random_range(0..entities.len())].clone();
            if rng.random_range(0..2) == 0 { Access::read(entity) } else { Access::write(entity) }
        })
        .collect();
    CodebaseModel {
        name: "draw".into(),
        embedding_dimension: dim,
        methods,
        entities,
        functionalities: vec![Functionality { name: "f".into(), controller_method_id: "ctl".into(), trace }],
    }
}

#[test]
fn c2_convexity_and_ratio_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    for _ in 0..500 {
        let model = draw_call_graph_model(&mut rng);
        let f = &model.functionalities[0];
        let depth = rng.random_range(1..4);
        let weights = TypeWeights {
            controller: 1.0 + rng.random_range(0.0..99.0),
            service: 1.0 + rng.random_range(0.0..99.0),
            entity: 1.0 + rng.random_range(0.0..99.0),
            intermediate: 1.0 + rng.random_range(0.0..99.0),
        };
        let vector = fvcg_vector(&model, f, depth, &weights).unwrap();

        let nodes = decomp_core::vectorize::call_graph_nodes(&model, "m0", depth).unwrap();
        for d in 0..model.embedding_dimension {
            let components: Vec<f64> = model
                .methods
                .iter()
                .filter(|m| nodes.contains(m.id.as_str()))
                .map(|m| m.embedding.values()[d])
                .collect();
            let lo = components.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = components.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let got = vector.values()[d];
            assert!(got >= lo - 1e-12 && got <= hi + 1e-12, "fvcg convexity: {got} outside [{lo}, {hi}]");
        }

        let scale = rng.random_range(0.01..100.0);
        let scaled = TypeWeights {
            controller: scale * weights.controller,
            service: scale * weights.service,
            entity: scale * weights.entity,
            intermediate: scale * weights.intermediate,
        };
        let rescaled = fvcg_vector(&model, f, depth, &scaled).unwrap();
        for (a, b) in vector.values().iter().zip(rescaled.values()) {
            assert!(close(*a, *b, 1e-12), "fvcg ratio invariance: {a} vs {b}");
        }
    }

    for _ in 0..500 {
        let model = draw_trace_model(&mut rng);
        let f = &model.functionalities[0];
        let weights = AccessWeights {
            read: 1.0 + rng.random_range(0.0..99.0),
            write: 1.0 + rng.random_range(0.0..99.0),
        };
        let vector = fvsa_vector(&model, f, &weights).unwrap();

        let accessed: BTreeSet<&str> = f.trace.iter().map(|a| a.entity.as_str()).collect();
        for d in 0..model.embedding_dimension {
            let components: Vec<f64> = model
                .methods
                .iter()
                .filter(|m| m.entity_name.as_deref().is_some_and(|e| accessed.contains(e)))
                .map(|m| m.embedding.values()[d])
                .collect();
            let lo = components.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = components.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let got = vector.values()[d];
            assert!(got >= lo - 1e-12 && got <= hi + 1e-12, "fvsa convexity: {got} outside [{lo}, {hi}]");
        }

        let scale = rng.random_range(0.01..100.0);
        let scaled = AccessWeights { read: scale * weights.read, write: scale * weights.write };
        let rescaled = fvsa_vector(&model, f, &scaled).unwrap();
        for (a, b) in vector.values().iter().zip(rescaled.values()) {
            assert!(close(*a, *b, 1e-12), "fvsa ratio invariance: {a} vs {b}");
        }
    }

    println!("ACCEPTANCE C2 convexity-and-ratio-invariance (1000 draws): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 3: clustering equivalence against the per-step reference
// ---------------------------------------------------------------------------

/// Per-step reference agglomeration: recompute every pair's linkage distance
/// from the base matrix, merge the minimum, break ties by the smallest
/// (left, right) representative-label pair.
fn reference_agglomerate(
    base: &CondensedMatrix,
    labels: &[String],
    linkage: Linkage,
) -> Vec<(usize, usize, f64)> {
    struct Cluster {
        node: usize,
        members: Vec<usize>,
    }
    let n = base.point_count();
    let mut clusters: Vec<Cluster> = (0..n).map(|i| Cluster { node: i, members: vec![i] }).collect();
    let rep = |c: &Cluster| -> usize {
        *c.members.iter().min_by_key(|i| &labels[**i]).unwrap()
    };
    let distance = |a: &Cluster, b: &Cluster| -> f64 {
        // Cluster holding the smallest member first, matching the canonical
        // summation order.
        let (x, y) = if a.members.iter().min() <= b.members.iter().min() { (a, b) } else { (b, a) };
        let mut values = Vec::new();
        for &i in &x.members {
            for &j in &y.members {
                values.push(base.get(i, j));
            }
        }
        match linkage {
            Linkage::Single => values.iter().copied().fold(f64::INFINITY, f64::min),
            Linkage::Complete => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Linkage::Average => values.iter().sum::<f64>() / values.len() as f64,
        }
    };

    let mut merges = Vec::new();
    for step in 0..n - 1 {
        let mut best: Option<(f64, (String, String), usize, usize)> = None;
        for p in 0..clusters.len() {
            for q in (p + 1)..clusters.len() {
                let d = distance(&clusters[p], &clusters[q]);
                let (la, lb) = (labels[rep(&clusters[p])].clone(), labels[rep(&clusters[q])].clone());
                let pair = if la <= lb { (la, lb) } else { (lb, la) };
                let replace = match &best {
                    None => true,
                    Some((bd, bp, _, _)) => d < *bd || (d == *bd && pair < *bp),
                };
                if replace {
                    best = Some((d, pair, p, q));
                }
            }
        }
        let (height, _, p, q) = best.unwrap();
        let second = clusters.swap_remove(q.max(p));
        let first = clusters.swap_remove(q.min(p));
        let (left, right) = if labels[rep(&first)] <= labels[rep(&second)] {
            (first, second)
        } else {
            (second, first)
        };
        merges.push((left.node, right.node, height));
        let mut members = left.members;
        members.extend(right.members);
        members.sort_unstable();
        clusters.push(Cluster { node: n + step, members });
    }
    merges
}

#[test]
fn c3_clustering_matches_reference_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let n = rng.random_range(2..=12);
        let data: Vec<f64> = (0..n * (n - 1) / 2).map(|_| rng.random_range(0.0..10.0)).collect();
        let matrix = CondensedMatrix::new(n, data).unwrap();
        let labels: Vec<String> = (0..n).map(|i| format!("p{i:02}")).collect();
        for linkage in Linkage::ALL {
            let dendrogram = agglomerate(&matrix, &labels, linkage).unwrap();
            let reference = reference_agglomerate(&matrix, &labels, linkage);
            assert_eq!(dendrogram.merges().len(), reference.len());
            for (got, want) in dendrogram.merges().iter().zip(&reference) {
                assert_eq!(
                    (got.left, got.right),
                    (want.0, want.1),
                    "case {case} {linkage}: merge sequence diverged"
                );
                assert_eq!(got.height, want.2, "case {case} {linkage}: heights diverged");
            }
            let heights: Vec<f64> = dendrogram.merges().iter().map(|m| m.height).collect();
            for pair in heights.windows(2) {
                assert!(pair[0] <= pair[1], "case {case} {linkage}: heights decreased: {heights:?}");
            }
        }
    }
    println!("ACCEPTANCE C3 clustering-reference-equivalence (100 cases x 3 linkages): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 4: sweep algebra
// ---------------------------------------------------------------------------

#[test]
fn c4_sweep_algebra() {
    assert_eq!(weight_grid(2, 10).unwrap().len(), 11);
    assert_eq!(weight_grid(4, 10).unwrap().len(), 286);

    // Call-graph strategy: weight grid times the six depths, per linkage.
    let config = SweepConfig::new(Strategy::Fvcg);
    let (lo, hi) = config.depth_range;
    let tuples_per_linkage =
        weight_grid(4, config.weight_step).unwrap().len() * ((hi - lo + 1) as usize);
    assert_eq!(tuples_per_linkage, 1716);

    assert_eq!(cluster_count_range(8), (3, 3));
    assert_eq!(cluster_count_range(15), (3, 5));
    assert_eq!(cluster_count_range(25), (3, 10));

    let model = generate_synthetic(&SyntheticSpec {
        entity_count: 12,
        functionality_count: 10,
        methods_per_class: 2,
        embedding_dimension: 8,
        trace_length_range: (1, 5),
        seed: 4,
    })
    .unwrap();
    let output = run_sweep(&model, &SweepConfig::new(Strategy::Ev)).unwrap();
    assert_eq!(output.records.len(), 9, "3 linkages x requested 3..=5");

    println!("ACCEPTANCE C4 sweep-algebra: PASS");
}

// ---------------------------------------------------------------------------
// Criterion 5: statistics against fixed values and a reference solver
// ---------------------------------------------------------------------------

#[test]
fn c5_statistics() {
    // Fixed Welch pair.
    let welch = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
    assert!((welch.t - -1.0).abs() < 1e-12, "t = {}", welch.t);
    assert!((welch.df - 8.0).abs() < 1e-12, "df = {}", welch.df);
    assert!((welch.p - 0.3466).abs() < 1e-4, "p = {}", welch.p);

    // Noise-free linear data recovers exact coefficients.
    let rows: Vec<Vec<f64>> = (0..12)
        .map(|i| vec![i as f64, ((i * 7) % 5) as f64])
        .collect();
    let y: Vec<f64> = rows.iter().map(|r| 3.0 * r[0] - 2.0 * r[1] + 7.0).collect();
    let fit = ols_fit(&rows, &y, true).unwrap();
    assert!((fit.coefficients[0].value - 3.0).abs() < 1e-9);
    assert!((fit.coefficients[1].value - -2.0).abs() < 1e-9);
    assert!((fit.intercept.as_ref().unwrap().value - 7.0).abs() < 1e-9);
    assert!((fit.r_squared - 1.0).abs() < 1e-9);

    // 50 random designs against an SVD least-squares reference.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..50 {
        let k = rng.random_range(1..4usize);
        let n = rng.random_range(k + 3..30);
        let rows: Vec<Vec<f64>> =
            (0..n).map(|_| (0..k).map(|_| rng.random_range(-5.0..5.0)).collect()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let fit = ols_fit(&rows, &y, true).unwrap();

        let mut flat = Vec::with_capacity(n * (k + 1));
        for row in &rows {
            flat.push(1.0);
            flat.extend_from_slice(row);
        }
        let design = nalgebra::DMatrix::from_row_slice(n, k + 1, &flat);
        let response = nalgebra::DVector::from_column_slice(&y);
        let reference = design.svd(true, true).solve(&response, 1e-12).expect("solvable");

        assert!((fit.intercept.as_ref().unwrap().value - reference[0]).abs() < 1e-8, "case {case}: intercept");
        for (i, c) in fit.coefficients.iter().enumerate() {
            assert!((c.value - reference[i + 1]).abs() < 1e-8, "case {case}: coefficient {i}");
        }
    }

    // The full four-weight family with an intercept is exactly collinear;
    // dropping any single column fixes it on the full grid.
    let grid = weight_grid(4, 10).unwrap();
    let y: Vec<f64> = grid
        .iter()
        .map(|w| 0.002 * w[0] - 0.001 * w[1] + 0.0005 * w[2] + 0.3)
        .collect();
    assert!(matches!(ols_fit(&grid, &y, true), Err(StatsError::SingularDesign)));
    let subs = drop_one_regressions(&grid, &y, true);
    assert_eq!(subs.len(), 4);
    for sub in &subs {
        assert!(sub.result.is_ok(), "omitting column {} failed", sub.omitted_column);
    }

    println!("ACCEPTANCE C5 statistics: PASS");
}

// ---------------------------------------------------------------------------
// Criterion 6: metric bounds and corners over a 20-seed batch
// ---------------------------------------------------------------------------

#[test]
fn c6_metric_bounds_and_corners() {
    assert_eq!(metrics::combined(1.0, 0.0, 0.0), Ok(0.0));
    assert_eq!(metrics::combined(0.0, 1.0, 1.0), Ok(1.0));

    let configs: Vec<SweepConfig> = Strategy::ALL.into_iter().map(SweepConfig::new).collect();
    for seed in 0..20u64 {
        let model = generate_synthetic(&SyntheticSpec {
            entity_count: 8,
            functionality_count: 8,
            methods_per_class: 2,
            embedding_dimension: 8,
            trace_length_range: (0, 4),
            seed,
        })
        .unwrap();
        let output = run_sweeps(&model, &configs).unwrap();
        for record in &output.records {
            let m = &record.metrics;
            let p = &m.provenance;
            let context = format!("seed {seed} {} {} n={}", p.strategy, p.linkage, p.requested_clusters);
            assert!((0.0..=1.0).contains(&m.cohesion), "{context}: cohesion {}", m.cohesion);
            assert!((0.0..=1.0).contains(&m.coupling), "{context}: coupling {}", m.coupling);
            assert!(m.complexity >= 0.0, "{context}: complexity {}", m.complexity);
            assert!((0.0..=1.0).contains(&m.uniform_complexity), "{context}: uniform {}", m.uniform_complexity);
            assert!((0.0..=1.0).contains(&m.combined), "{context}: combined {}", m.combined);
            if p.actual_clusters == 1 {
                assert_eq!(m.complexity, 0.0, "{context}: single cluster complexity");
                assert_eq!(m.coupling, 0.0, "{context}: single cluster coupling");
            }
        }

        // Single-cluster decompositions directly.
        let single = round_robin_partition(&model, 1, 0);
        assert_eq!(metrics::complexity(&single, &model), 0.0);
        assert_eq!(metrics::coupling(&single, &model), 0.0);
    }

    println!("ACCEPTANCE C6 metric-bounds-and-corners (20 seeds): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 7: byte determinism across runs and worker counts
// ---------------------------------------------------------------------------

fn decomp_bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decomp"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn expect_success(output: &Output, what: &str) {
    assert!(
        output.status.success(),
        "{what} failed ({:?}):\n{}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn c7_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    let synth = |name: &str| -> Vec<u8> {
        let path = dir.join(name);
        let output = decomp_bin(
            &[
                "synth", "--entities", "12", "--functionalities", "10", "--dimension", "8",
                "--seed", "11", "-o", path.to_str().unwrap(),
            ],
            dir,
        );
        expect_success(&output, "synth");
        std::fs::read(&path).unwrap()
    };
    let first_model = synth("a.json");
    let second_model = synth("b.json");
    assert_eq!(first_model, second_model, "synth is not byte deterministic");

    let sweep = |out: &str, jobs: &str| -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        let output = decomp_bin(
            &[
                "sweep", "a.json", "--strategy", "all", "--step", "25", "--depth-range", "1,2",
                "--jobs", jobs, "--out-dir", out,
            ],
            dir,
        );
        expect_success(&output, "sweep");
        let base = dir.join(out);
        (
            std::fs::read(base.join("metrics.csv")).unwrap(),
            std::fs::read(base.join("decompositions.jsonl")).unwrap(),
            std::fs::read(base.join("diagnostics.log")).unwrap(),
        )
    };
    let sweep_one = sweep("s1", "1");
    let sweep_two = sweep("s2", "1");
    let sweep_parallel = sweep("s4", "4");
    assert_eq!(sweep_one, sweep_two, "sweep is not byte deterministic");
    assert_eq!(sweep_one, sweep_parallel, "worker count changed sweep bytes");

    let compare = |out: &str| -> Vec<u8> {
        let csv = dir.join("s1").join("metrics.csv");
        let path = dir.join(out);
        let output = decomp_bin(
            &[
                "compare", csv.to_str().unwrap(), "--metric", "combined",
                "-o", path.to_str().unwrap(),
            ],
            dir,
        );
        expect_success(&output, "compare");
        std::fs::read(&path).unwrap()
    };
    let compare_one = compare("r1.json");
    let compare_two = compare("r2.json");
    assert_eq!(compare_one, compare_two, "compare is not byte deterministic");

    println!("ACCEPTANCE C7 determinism: PASS");
}

// ---------------------------------------------------------------------------
// Criterion 8: conversion correctness
// ---------------------------------------------------------------------------

fn conversion_model() -> CodebaseModel {
    let entity = |name: &str| MethodRecord {
        id: format!("{name}.m"),
        class_name: name.to_string(),
        super_class: None,
        method_type: MethodType::Entity,
        entity_name: Some(name.to_string()),
        embedding: Embedding::new(vec![0.0]),
        calls: vec![],
    };
    CodebaseModel {
        name: "conversion".into(),
        embedding_dimension: 1,
        methods: vec![
            entity("e1"),
            entity("e2"),
            MethodRecord {
                id: "ctl".into(),
                class_name: "Ctl".into(),
                super_class: None,
                method_type: MethodType::Controller,
                entity_name: None,
                embedding: Embedding::new(vec![0.0]),
                calls: vec![],
            },
        ],
        entities: vec!["e1".into(), "e2".into()],
        functionalities: vec![
            Functionality {
                name: "f1".into(),
                controller_method_id: "ctl".into(),
                trace: vec![Access::read("e1"), Access::read("e1")],
            },
            Functionality {
                name: "f2".into(),
                controller_method_id: "ctl".into(),
                trace: vec![Access::read("e1"), Access::write("e2")],
            },
            Functionality {
                name: "f3".into(),
                controller_method_id: "ctl".into(),
                trace: vec![Access::write("e2"), Access::read("e2")],
            },
        ],
    }
}

#[test]
fn c8_conversion_correctness() {
    use decomp_core::cluster::{convert_class_to_entity, convert_functionality_to_entity};

    let model = conversion_model();
    let provenance = Provenance::new(Strategy::Fvsa, Linkage::Average);

    // e1 counted 3:0 goes to cluster A, e2 counted 1:2 goes to cluster B.
    let clusters = vec![vec!["f1".to_string(), "f2".to_string()], vec!["f3".to_string()]];
    let (d, _) = convert_functionality_to_entity(&clusters, &model, provenance.clone());
    let d = d.unwrap();
    let set = |items: &[&str]| -> BTreeSet<String> { items.iter().map(|s| s.to_string()).collect() };
    assert_eq!(d.clusters(), &[set(&["e1"]), set(&["e2"])]);

    // Tie on e1 (one access from each cluster) goes to the lower index.
    let mut tie_model = conversion_model();
    tie_model.functionalities[0].trace = vec![Access::read("e1")];
    tie_model.functionalities[1].trace = vec![Access::write("e2")];
    tie_model.functionalities[2].trace = vec![Access::write("e1")];
    let clusters = vec![vec!["f3".to_string()], vec!["f1".to_string(), "f2".to_string()]];
    let (d, _) = convert_functionality_to_entity(&clusters, &tie_model, provenance.clone());
    let d = d.unwrap();
    assert_eq!(d.cluster_count(), 2, "tie must not fuse the entities");
    assert!(d.clusters().contains(&set(&["e1"])));
    assert!(d.clusters().contains(&set(&["e2"])));

    // Converting an entity decomposition is the identity, both ways.
    let entity_clusters = vec![vec!["e1".to_string()], vec!["e2".to_string()]];
    let (via_functionality, _) =
        convert_functionality_to_entity(&entity_clusters, &model, provenance.clone());
    let (via_class, _) = convert_class_to_entity(&entity_clusters, &model, provenance);
    for d in [via_functionality.unwrap(), via_class.unwrap()] {
        assert_eq!(d.clusters(), &[set(&["e1"]), set(&["e2"])]);
    }

    println!("ACCEPTANCE C8 conversion-correctness: PASS");
}

// ---------------------------------------------------------------------------
// Criterion 9: end-to-end desk experiment
// ---------------------------------------------------------------------------

#[test]
fn c9_end_to_end_desk_experiment() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let dir = dir.path();

    for seed in 0..10u64 {
        let model_path = dir.join(format!("model{seed}.json"));
        let sweep_dir = dir.join(format!("sweep{seed}"));
        let output = decomp_bin(
            &[
                "synth", "--entities", "12", "--functionalities", "12",
                "--methods-per-class", "2", "--dimension", "16",
                "--seed", &(100 + seed).to_string(),
                "-o", model_path.to_str().unwrap(),
            ],
            dir,
        );
        expect_success(&output, "synth");

        let output = decomp_bin(&["validate", model_path.to_str().unwrap()], dir);
        expect_success(&output, "validate");

        let output = decomp_bin(
            &[
                "sweep", model_path.to_str().unwrap(), "--strategy", "all",
                "--out-dir", sweep_dir.to_str().unwrap(),
            ],
            dir,
        );
        expect_success(&output, "sweep");

        let csv = sweep_dir.join("metrics.csv");
        let comparison_path = dir.join(format!("comparison{seed}.json"));
        let output = decomp_bin(
            &[
                "compare", csv.to_str().unwrap(), "--metric", "combined",
                "-o", comparison_path.to_str().unwrap(),
            ],
            dir,
        );
        expect_success(&output, "compare");

        let regression_path = dir.join(format!("regression{seed}.json"));
        let output = decomp_bin(
            &[
                "regress", csv.to_str().unwrap(), "--params", "wc,ws,we,wi",
                "--metric", "combined", "-o", regression_path.to_str().unwrap(),
            ],
            dir,
        );
        expect_success(&output, "regress");

        // Zero invariant violations in anything the sweep produced.
        let records = decomp_core::report::read_metrics_csv(&csv).unwrap();
        assert!(!records.is_empty());
        let mut strategies_seen: BTreeSet<Strategy> = BTreeSet::new();
        for m in &records {
            strategies_seen.insert(m.provenance.strategy);
            assert!((0.0..=1.0).contains(&m.cohesion), "cohesion {}", m.cohesion);
            assert!((0.0..=1.0).contains(&m.coupling), "coupling {}", m.coupling);
            assert!(m.complexity >= 0.0);
            assert!((0.0..=1.0).contains(&m.uniform_complexity));
            assert!((0.0..=1.0).contains(&m.combined));
            assert!(m.provenance.actual_clusters >= 1);
        }
        assert_eq!(strategies_seen.len(), 5, "seed {seed}: all five strategies must complete");

        for line in std::fs::read_to_string(sweep_dir.join("decompositions.jsonl")).unwrap().lines() {
            // Parsing re-checks disjointness and non-emptiness.
            parse_decomposition(line).unwrap();
        }

        let comparison: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&comparison_path).unwrap()).unwrap();
        assert!(!comparison["comparisons"].as_array().unwrap().is_empty());
        let regression: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&regression_path).unwrap()).unwrap();
        assert_eq!(regression["dropOne"].as_array().unwrap().len(), 4);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 300, "desk experiment took {elapsed:?}");
    println!("ACCEPTANCE C9 end-to-end-desk-experiment (10 models, {elapsed:?}): PASS");
}
