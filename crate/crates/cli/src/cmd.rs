//! Command implementations. Every command validates its flags before
//! touching files; data outputs are byte-deterministic and diagnostics go to
//! a sidecar log plus standard error, never into data files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;

use decomp_core::cluster::{
    cluster_vectors, convert_class_to_entity, convert_functionality_to_entity, cut,
    entity_partition, load_decomposition, save_decomposition,
};
use decomp_core::experiment::{
    run_sweep, run_sweeps, summarize as summarize_records, GroupField, MetricName, SweepConfig,
    SweepOutput,
};
use decomp_core::ingest::{
    generate_synthetic, load_model, load_model_unchecked, render_model, IngestError, SyntheticSpec,
};
use decomp_core::metrics::{self, MetricRecord};
use decomp_core::model::{validate_model, CodebaseModel, Decomposition, Provenance, Strategy};
use decomp_core::report::{
    build_comparison, build_regression, parse_metric_name, read_metrics_csv, render_json,
    render_metrics_csv, ComparisonReport, RegressionReport, ReportError, SummaryReport,
};
use decomp_core::sa::sa_feature_vectors;
use decomp_core::stats::StatsError;
use decomp_core::vectorize::{
    cv_vectors, ev_vectors, fvcg_vectors, fvsa_vectors, AccessWeights, LabeledVectors,
    TypeWeights, VectorizeError,
};

use crate::{
    CmdResult, CompareArgs, Failure, GenerateArgs, RegressArgs, ReportFormat, SummarizeArgs,
    SweepArgs, SynthArgs, ValidateFormat, EXIT_INAPPLICABLE, EXIT_INVALID, EXIT_IO, EXIT_STATS,
};

fn ingest_failure(err: IngestError) -> Failure {
    let code = match &err {
        IngestError::Validation { .. } => EXIT_INVALID,
        _ => EXIT_IO,
    };
    Failure::new(code, err.to_string())
}

fn report_failure(err: ReportError) -> Failure {
    let code = match &err {
        ReportError::Io { .. } | ReportError::Csv(_) => EXIT_IO,
        ReportError::Stats(StatsError::SampleTooSmall { .. }) => EXIT_STATS,
        ReportError::Stats(_) => EXIT_STATS,
        _ => EXIT_INVALID,
    };
    Failure::new(code, err.to_string())
}

fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_IO, format!("cannot write '{}': {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// validate / synth
// ---------------------------------------------------------------------------

pub fn validate(model_path: &Path, format: ValidateFormat) -> CmdResult {
    let model = load_model_unchecked(model_path).map_err(ingest_failure)?;
    let report = validate_model(&model);
    match format {
        ValidateFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
        ValidateFormat::Text => {
            for violation in &report {
                println!("{violation}");
            }
        }
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_INVALID, format!("{} violation(s)", report.len())))
    }
}

pub fn synth(args: &SynthArgs) -> CmdResult {
    let spec = SyntheticSpec {
        entity_count: args.entities,
        functionality_count: args.functionalities,
        methods_per_class: args.methods_per_class,
        embedding_dimension: args.dimension,
        trace_length_range: args.trace_range,
        seed: args.seed,
    };
    let model =
        generate_synthetic(&spec).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    std::fs::write(&args.out, render_model(&model))
        .map_err(|e| Failure::new(EXIT_IO, format!("cannot write '{}': {e}", args.out.display())))?;
    println!("wrote model '{}' ({} methods) to {}", model.name, model.methods.len(), args.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

fn reject_extraneous(args: &GenerateArgs, strategy: Strategy) -> CmdResult {
    let mut extraneous = Vec::new();
    if args.depth.is_some() && strategy != Strategy::Fvcg {
        extraneous.push("--depth");
    }
    if args.type_weights.is_some() && strategy != Strategy::Fvcg {
        extraneous.push("--type-weights");
    }
    if args.access_weights.is_some() && strategy != Strategy::Fvsa {
        extraneous.push("--access-weights");
    }
    if args.measure_weights.is_some() && strategy != Strategy::Sa {
        extraneous.push("--measure-weights");
    }
    if extraneous.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_INVALID,
            format!("{} does not take {}", strategy, extraneous.join(", ")),
        ))
    }
}

fn vectorize_failure(err: VectorizeError) -> Failure {
    match err {
        VectorizeError::ZeroDenominator => Failure::new(
            EXIT_INAPPLICABLE,
            "all contributions have zero weight for this parameter combination",
        ),
        other => Failure::new(EXIT_INVALID, other.to_string()),
    }
}

pub fn generate(args: &GenerateArgs) -> CmdResult {
    let Some(strategy) = args.strategy.single() else {
        return Err(Failure::new(EXIT_INVALID, "generate needs a single strategy, not 'all'"));
    };
    reject_extraneous(args, strategy)?;
    if args.n < 1 {
        return Err(Failure::new(EXIT_INVALID, "--n must be at least 1"));
    }

    let mut provenance = Provenance::new(strategy, args.linkage.into());
    provenance.requested_clusters = args.n;

    // Resolve and validate the strategy's parameters before reading files.
    enum Params {
        CallGraph(u32, TypeWeights),
        AccessSequence(AccessWeights),
        Measures(decomp_core::sa::MeasureWeights),
        None,
    }
    let params = match strategy {
        Strategy::Fvcg => {
            let depth = args
                .depth
                .ok_or_else(|| Failure::new(EXIT_INVALID, "fvcg requires --depth"))?;
            if depth < 1 {
                return Err(Failure::new(EXIT_INVALID, "--depth must be at least 1"));
            }
            let w = args
                .type_weights
                .ok_or_else(|| Failure::new(EXIT_INVALID, "fvcg requires --type-weights"))?;
            let weights = TypeWeights::from_array(w)
                .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
            provenance.depth = Some(depth);
            provenance.type_weights = Some(w);
            Params::CallGraph(depth, weights)
        }
        Strategy::Fvsa => {
            let w = args
                .access_weights
                .ok_or_else(|| Failure::new(EXIT_INVALID, "fvsa requires --access-weights"))?;
            let weights = AccessWeights::from_array(w)
                .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
            provenance.access_weights = Some(w);
            Params::AccessSequence(weights)
        }
        Strategy::Sa => {
            let w = args
                .measure_weights
                .ok_or_else(|| Failure::new(EXIT_INVALID, "sa requires --measure-weights"))?;
            let weights = decomp_core::sa::MeasureWeights::from_array(w)
                .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
            provenance.measure_weights = Some(w);
            Params::Measures(weights)
        }
        Strategy::Cv | Strategy::Ev => Params::None,
    };

    let model = load_model(&args.model).map_err(ingest_failure)?;
    let vectors: LabeledVectors = match (&params, strategy) {
        (Params::CallGraph(depth, weights), _) => {
            fvcg_vectors(&model, *depth, weights).map_err(vectorize_failure)?
        }
        (Params::AccessSequence(weights), _) => {
            let (vectors, diagnostics) =
                fvsa_vectors(&model, weights).map_err(vectorize_failure)?;
            for d in &diagnostics {
                log::warn!("{d}");
            }
            vectors
        }
        (Params::Measures(weights), _) => sa_feature_vectors(&model, weights)
            .map_err(|e| Failure::new(EXIT_INAPPLICABLE, e.to_string()))?,
        (Params::None, Strategy::Cv) => {
            let (vectors, diagnostics) = cv_vectors(&model)
                .map_err(|e| Failure::new(EXIT_INAPPLICABLE, e.to_string()))?;
            for d in &diagnostics {
                log::warn!("{d}");
            }
            vectors
        }
        (Params::None, _) => ev_vectors(&model)
            .map_err(|e| Failure::new(EXIT_INAPPLICABLE, e.to_string()))?,
    };
    if vectors.len() < 2 {
        return Err(Failure::new(EXIT_INAPPLICABLE, "fewer than 2 vectors to cluster"));
    }

    let dendrogram = cluster_vectors(&vectors, args.linkage.into())
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let groups =
        cut(&dendrogram, args.n).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;

    let (decomposition, diagnostics) = match strategy {
        Strategy::Sa | Strategy::Ev => (
            Some(
                entity_partition(&groups, provenance)
                    .expect("cut groups partition the entities"),
            ),
            Vec::new(),
        ),
        Strategy::Cv => convert_class_to_entity(&groups, &model, provenance),
        Strategy::Fvcg | Strategy::Fvsa => {
            convert_functionality_to_entity(&groups, &model, provenance)
        }
    };
    for d in &diagnostics {
        log::warn!("{d}");
    }
    let Some(decomposition) = decomposition else {
        return Err(Failure::new(
            EXIT_INAPPLICABLE,
            "every cluster emptied out during entity conversion",
        ));
    };
    save_decomposition(&decomposition, &args.out).map_err(ingest_failure)?;
    println!("{}", decomposition.cluster_count());
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Evaluation<'a> {
    codebase: &'a str,
    #[serde(flatten)]
    provenance: &'a Provenance,
    cohesion: f64,
    coupling: f64,
    complexity: f64,
    #[serde(rename = "uniformComplexity", skip_serializing_if = "Option::is_none")]
    uniform_complexity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combined: Option<f64>,
}

pub fn evaluate(
    model_path: &Path,
    decomposition_paths: &[PathBuf],
    max_complexity: Option<f64>,
) -> CmdResult {
    let model = load_model(model_path).map_err(ingest_failure)?;
    let entity_set: BTreeSet<&str> = model.entities.iter().map(|e| e.as_str()).collect();

    let mut decompositions: Vec<Decomposition> = Vec::new();
    for path in decomposition_paths {
        let decomposition = load_decomposition(path).map_err(ingest_failure)?;
        if let Some(unknown) = decomposition.entities().find(|e| !entity_set.contains(e)) {
            return Err(Failure::new(
                EXIT_INVALID,
                format!(
                    "decomposition '{}' references entity '{unknown}' not present in model '{}'",
                    path.display(),
                    model.name
                ),
            ));
        }
        decompositions.push(decomposition);
    }

    let mut evaluated = Vec::new();
    for decomposition in &decompositions {
        let (values, diagnostics) = metrics::evaluate(decomposition, &model);
        for d in &diagnostics {
            log::warn!("{d}");
        }
        evaluated.push((decomposition, values));
    }

    // Uniform complexity and the combined metric need a normalization set:
    // either an explicit maximum or more than one decomposition.
    let normalization = max_complexity.or_else(|| {
        (evaluated.len() > 1)
            .then(|| evaluated.iter().map(|(_, v)| v.complexity).fold(0.0, f64::max))
    });

    let mut outputs: Vec<Evaluation> = Vec::with_capacity(evaluated.len());
    for (decomposition, values) in &evaluated {
        let uniform = match normalization {
            Some(max) => Some(
                metrics::uniform_complexity(values.complexity, max)
                    .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?,
            ),
            None => None,
        };
        let combined = uniform
            .map(|u| metrics::combined(values.cohesion, values.coupling, u).expect("metrics in range"));
        outputs.push(Evaluation {
            codebase: &model.name,
            provenance: &decomposition.provenance,
            cohesion: values.cohesion,
            coupling: values.coupling,
            complexity: values.complexity,
            uniform_complexity: uniform,
            combined,
        });
    }

    let text = if outputs.len() == 1 {
        serde_json::to_string_pretty(&outputs[0]).expect("evaluation serializes")
    } else {
        serde_json::to_string_pretty(&outputs).expect("evaluation serializes")
    };
    println!("{text}");
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn sweep_output(model: &CodebaseModel, args: &SweepArgs) -> Result<SweepOutput, Failure> {
    let configs: Vec<SweepConfig> = args
        .strategy
        .strategies()
        .into_iter()
        .map(|strategy| SweepConfig {
            strategy,
            weight_step: args.step,
            depth_range: args.depth_range,
            linkages: args.linkages.iter().map(|l| (*l).into()).collect(),
        })
        .collect();
    let run = || {
        if let [only] = configs.as_slice() {
            run_sweep(model, only)
        } else {
            run_sweeps(model, &configs)
        }
    };
    let output = if args.jobs == 1 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .map_err(|e| Failure::new(EXIT_INVALID, format!("cannot build thread pool: {e}")))?;
        pool.install(run)
    };
    output.map_err(|e| {
        use decomp_core::experiment::ExperimentError;
        match e {
            ExperimentError::StrategyInapplicable { .. } => {
                Failure::new(EXIT_INAPPLICABLE, e.to_string())
            }
            ExperimentError::BadStep(_)
            | ExperimentError::BadDepthRange(_, _)
            | ExperimentError::NoLinkages => Failure::new(EXIT_INVALID, e.to_string()),
            other => Failure::new(EXIT_INVALID, other.to_string()),
        }
    })
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    if args.jobs == 0 {
        return Err(Failure::new(EXIT_INVALID, "--jobs must be at least 1"));
    }
    let model = load_model(&args.model).map_err(ingest_failure)?;
    let output = sweep_output(&model, args)?;

    if output.records.is_empty() {
        for d in &output.diagnostics {
            log::warn!("{d}");
        }
        return Err(Failure::new(EXIT_INAPPLICABLE, "sweep produced no records"));
    }

    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        Failure::new(EXIT_IO, format!("cannot create '{}': {e}", args.out_dir.display()))
    })?;
    let io_failure = |path: &Path| {
        let path = path.to_path_buf();
        move |e: std::io::Error| Failure::new(EXIT_IO, format!("cannot write '{}': {e}", path.display()))
    };

    let records: Vec<MetricRecord> = output.records.iter().map(|r| r.metrics.clone()).collect();
    let csv_path = args.out_dir.join("metrics.csv");
    std::fs::write(&csv_path, render_metrics_csv(&records)).map_err(io_failure(&csv_path))?;

    let jsonl_path = args.out_dir.join("decompositions.jsonl");
    let mut jsonl = Vec::new();
    for record in &output.records {
        serde_json::to_writer(&mut jsonl, &record.decomposition).expect("decomposition serializes");
        jsonl.push(b'\n');
    }
    std::fs::write(&jsonl_path, jsonl).map_err(io_failure(&jsonl_path))?;

    let log_path = args.out_dir.join("diagnostics.log");
    let mut log_text = String::new();
    for d in &output.diagnostics {
        log::warn!("{d}");
        log_text.push_str(&d.to_string());
        log_text.push('\n');
    }
    std::fs::write(&log_path, log_text).map_err(io_failure(&log_path))?;

    println!(
        "wrote {} records for {} to {}",
        output.records.len(),
        model.name,
        args.out_dir.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// compare / regress / summarize
// ---------------------------------------------------------------------------

fn metric_arg(name: &str) -> Result<MetricName, Failure> {
    parse_metric_name(name).map_err(report_failure)
}

/// Labels one CSV per file when several are given, or one sample per
/// strategy within a single file.
fn comparison_samples(paths: &[PathBuf]) -> Result<Vec<(String, Vec<MetricRecord>)>, Failure> {
    if paths.len() >= 2 {
        let mut used: BTreeSet<String> = BTreeSet::new();
        let mut samples = Vec::new();
        for (i, path) in paths.iter().enumerate() {
            let records = read_metrics_csv(path).map_err(report_failure)?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("csv{i}"));
            let label = if used.contains(&stem) { format!("{stem}#{i}") } else { stem };
            used.insert(label.clone());
            samples.push((label, records));
        }
        Ok(samples)
    } else {
        let records = read_metrics_csv(&paths[0]).map_err(report_failure)?;
        let mut by_strategy: Vec<(String, Vec<MetricRecord>)> = Strategy::ALL
            .into_iter()
            .map(|s| (s.to_string(), Vec::new()))
            .collect();
        for record in records {
            let slot = by_strategy
                .iter_mut()
                .find(|(label, _)| *label == record.provenance.strategy.to_string())
                .expect("all strategies are listed");
            slot.1.push(record);
        }
        by_strategy.retain(|(_, records)| !records.is_empty());
        Ok(by_strategy)
    }
}

fn comparison_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("metric,clusterCount,a,b,t,df,p,meanA,meanB,nA,nB,rejectEqualMeans,error\n");
    for entry in &report.comparisons {
        let cluster = entry.cluster_count.map_or(String::new(), |c| c.to_string());
        match (&entry.welch, &entry.error) {
            (Some(w), _) => out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},\n",
                report.metric,
                cluster,
                entry.a,
                entry.b,
                w.t,
                w.df,
                w.p,
                w.mean_a,
                w.mean_b,
                w.n_a,
                w.n_b,
                entry.reject_equal_means.unwrap_or(false),
            )),
            (None, error) => out.push_str(&format!(
                "{},{},{},{},,,,,,,,,{}\n",
                report.metric,
                cluster,
                entry.a,
                entry.b,
                error.as_deref().unwrap_or(""),
            )),
        }
    }
    out
}

pub fn compare(args: &CompareArgs) -> CmdResult {
    let metric = metric_arg(&args.metric)?;
    let samples = comparison_samples(&args.csv)?;
    if samples.len() < 2 {
        return Err(Failure::new(
            EXIT_INVALID,
            "need at least two samples to compare (two CSV files, or one CSV with two strategies)",
        ));
    }
    let report = build_comparison(&samples, metric, args.by_clusters);
    let text = match args.format {
        ReportFormat::Json => render_json(&report),
        ReportFormat::Csv => comparison_csv(&report),
    };
    write_output(args.out.as_deref(), &text)?;
    if report.has_sample_errors() {
        return Err(Failure::new(EXIT_STATS, "some groups were too small to test"));
    }
    Ok(())
}

fn regression_csv(report: &RegressionReport) -> String {
    let mut out =
        String::from("metric,design,omitted,term,coefficient,stdError,t,p,rSquared,fStatistic,fPValue,observations\n");
    let mut push_fit = |design: &str, omitted: &str, fit: &decomp_core::stats::OlsResult, params: &[String]| {
        let mut terms: Vec<(String, &decomp_core::stats::Coefficient)> = Vec::new();
        if let Some(intercept) = &fit.intercept {
            terms.push(("cons".to_string(), intercept));
        }
        for (name, c) in params.iter().zip(&fit.coefficients) {
            terms.push((name.clone(), c));
        }
        for (term, c) in terms {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                report.metric,
                design,
                omitted,
                term,
                c.value,
                c.std_error,
                c.t,
                c.p,
                fit.r_squared,
                fit.f_statistic,
                fit.f_p_value,
                fit.observations,
            ));
        }
    };
    if let Some(full) = &report.full {
        push_fit("full", "", full, &report.parameters);
    }
    if let Some(drop_one) = &report.drop_one {
        for entry in drop_one {
            if let Some(fit) = &entry.result {
                let remaining: Vec<String> = report
                    .parameters
                    .iter()
                    .filter(|p| **p != entry.omitted)
                    .cloned()
                    .collect();
                push_fit("dropOne", &entry.omitted, fit, &remaining);
            }
        }
    }
    out
}

pub fn regress(args: &RegressArgs) -> CmdResult {
    let metric = metric_arg(&args.metric)?;
    let records = read_metrics_csv(&args.csv).map_err(report_failure)?;
    let report = build_regression(&records, &args.params, metric, !args.no_intercept)
        .map_err(report_failure)?;
    let text = match args.format {
        ReportFormat::Json => render_json(&report),
        ReportFormat::Csv => regression_csv(&report),
    };
    write_output(args.out.as_deref(), &text)
}

fn summary_csv(report: &SummaryReport) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = report.group_by.clone();
    header.extend(["count", "min", "q1", "median", "q3", "max", "outliers"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for group in &report.groups {
        let mut row: Vec<String> =
            report.group_by.iter().map(|f| group.group.get(f).cloned().unwrap_or_default()).collect();
        row.push(group.count.to_string());
        for v in [group.min, group.q1, group.median, group.q3, group.max] {
            row.push(format!("{v}"));
        }
        let outliers: Vec<String> = group.outliers.iter().map(|v| format!("{v}")).collect();
        row.push(outliers.join("|"));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn summarize(args: &SummarizeArgs) -> CmdResult {
    let metric = metric_arg(&args.metric)?;
    let mut fields = Vec::new();
    for name in &args.group_by {
        let field = GroupField::parse(name)
            .ok_or_else(|| Failure::new(EXIT_INVALID, format!("unknown column '{name}'")))?;
        fields.push(field);
    }
    let records = read_metrics_csv(&args.csv).map_err(report_failure)?;
    let groups = summarize_records(&records, &fields, metric)
        .map_err(|e| Failure::new(EXIT_STATS, e.to_string()))?;
    let report = SummaryReport {
        metric: metric.as_str().to_string(),
        group_by: fields.iter().map(|f| f.as_str().to_string()).collect(),
        groups,
    };
    let text = match args.format {
        ReportFormat::Json => render_json(&report),
        ReportFormat::Csv => summary_csv(&report),
    };
    write_output(args.out.as_deref(), &text)
}
