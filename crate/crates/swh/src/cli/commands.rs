use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use swh_core::model::mlfn::increasing_windows;
use swh_core::model::{train, TrainSettings};
use swh_core::screening::{
    allocate_value_counts, build_grid, check_capacity, merge_validated, weight_importance, AllocationConfig,
    CandidateDb, CandidateDbHeader, Criterion, CANDIDATE_SCHEMA_VERSION, REFERENCE_COUNTS,
};
use swh_core::split::split;
use swh_core::stats::descriptive_stats;
use swh_core::synthetic::generate_synthetic;
use swh_core::{
    fingerprint_hex, metrics::evaluate, Dataset, DesignRecord, Feature, ModelKind, RegressorModel, Target,
    N_FEATURES,
};

use super::{Cli, Command, DbCommand, EvalArgs, GenDataArgs, PredictArgs, ScreenArgs, ServeArgs, StatsArgs, TrainArgs};
use crate::candidate_io::{candidates_csv, load_db, save_db};
use crate::config::{load_generator_config, load_run_config, RunConfig};
use crate::dataset_io::{load_dataset, save_dataset, write_file};
use crate::error::{Error, Result};
use crate::model_io::{load_model, save_model};
use crate::parallel::{screen_parallel, ParallelConfig};
use crate::report_io::{write_report, EvalSummary};
use crate::serve::{router, ServeModels};

/// Runs one command and returns its summary. `serve` prints its own
/// start-up line and returns `Value::Null` after shutdown.
pub fn run(cli: Cli) -> Result<Value> {
    let cfg = load_run_config(cli.config.as_deref())?;
    match cli.command {
        Command::GenData(a) => gen_data(&cfg, a),
        Command::Stats(a) => stats(&cfg, a),
        Command::Train(a) => train_cmd(&cfg, a),
        Command::Eval(a) => eval_cmd(&cfg, a),
        Command::Predict(a) => predict(a),
        Command::Screen(a) => screen_cmd(&cfg, a),
        Command::Db(DbCommand::Export { db, out }) => db_export(&cfg, db, out),
        Command::Db(DbCommand::Merge {
            db,
            original,
            experiments,
            out,
            db_out,
        }) => db_merge(&cfg, db, original, experiments, out, db_out),
        Command::Serve(a) => serve_cmd(&cfg, a),
    }
}

fn required(flag: Option<PathBuf>, fallback: &Option<PathBuf>, what: &str) -> Result<PathBuf> {
    flag.or_else(|| fallback.clone())
        .ok_or_else(|| Error::Usage(format!("missing {what}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("summary values serialize")
}

fn big(n: u128) -> Value {
    u64::try_from(n).map(Value::from).unwrap_or_else(|_| Value::String(n.to_string()))
}

fn gen_data(cfg: &RunConfig, a: GenDataArgs) -> Result<Value> {
    let out = required(a.out, &cfg.paths.dataset, "--out (or paths.dataset)")?;
    let gen = load_generator_config(a.generator_config.as_deref())?;
    let seed = a.seed.unwrap_or(cfg.seed);
    let ds = generate_synthetic(a.n, seed, &gen)?;
    save_dataset(&out, &ds)?;
    log::info!("wrote {} records to {}", ds.len(), out.display());
    Ok(json!({
        "command": "gen-data",
        "n": ds.len(),
        "seed": seed,
        "out": out,
        "dataset_fingerprint": fingerprint_hex(ds.fingerprint()),
    }))
}

fn load_data(cfg: &RunConfig, flag: Option<PathBuf>) -> Result<Dataset> {
    let path = required(flag, &cfg.paths.dataset, "--data (or paths.dataset)")?;
    load_dataset(&path, &cfg.schema)
}

fn stats(cfg: &RunConfig, a: StatsArgs) -> Result<Value> {
    let ds = load_data(cfg, a.data)?;
    let table = descriptive_stats(&ds)?;
    if let Some(out) = &a.out {
        let mut csv = String::from("name,count,maximum,minimum,range,average,std_dev\n");
        for s in &table {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.name, s.count, s.maximum, s.minimum, s.range, s.average, s.std_dev
            ));
        }
        write_file(out, csv.as_bytes())?;
    }
    Ok(json!({
        "command": "stats",
        "n": ds.len(),
        "dataset_fingerprint": fingerprint_hex(ds.fingerprint()),
        "stats": to_value(&table),
    }))
}

fn settings_from(cfg: &RunConfig, a: &TrainArgs) -> TrainSettings {
    let mut s = cfg.training.clone();
    if let Some(h) = &a.hidden {
        s.mlfn_hidden_sizes = h.clone();
    }
    if let Some(v) = a.epochs {
        s.mlfn_epochs = v;
    }
    if let Some(v) = a.learning_rate {
        s.mlfn_learning_rate = v;
    }
    if let Some(v) = a.momentum {
        s.mlfn_momentum = v;
    }
    if let Some(v) = a.elm_hidden {
        s.elm_hidden_size = v;
    }
    if let Some(v) = a.elm_ridge {
        s.elm_ridge = v;
    }
    s
}

fn report_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let p = prefix.display();
    (PathBuf::from(format!("{p}.csv")), PathBuf::from(format!("{p}.json")))
}

fn train_cmd(cfg: &RunConfig, a: TrainArgs) -> Result<Value> {
    let data = load_data(cfg, a.data.clone())?;
    let fraction = a.split.unwrap_or(cfg.split_fraction);
    let seed = a.seed.unwrap_or(cfg.seed);
    let tolerance = a.tolerance.unwrap_or(cfg.tolerance);
    let settings = settings_from(cfg, &a);
    let (train_set, test_set) = split(&data, fraction, seed)?;

    let trained = train(a.kind, &train_set, a.target, &settings, seed)?;
    for w in &trained.model.training_meta.warnings {
        log::warn!("{w}");
    }
    let report = evaluate(&trained.model, &test_set, tolerance)?;
    let out = a
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-{}.json", a.target.name(), a.kind.name())));
    let fingerprint = save_model(&out, &trained.model)?;
    if let Some(prefix) = &a.report_prefix {
        let (csv, js) = report_paths(prefix);
        write_report(Some(&csv), Some(&js), &report)?;
    }
    log::info!(
        "{} {}: test RMS {:.4}, accuracy {:.2}%",
        a.kind.name(),
        a.target.name(),
        report.rms_error,
        report.prediction_accuracy
    );

    let mut summary = json!({
        "command": "train",
        "model_kind": a.kind,
        "target": a.target,
        "out": out,
        "model_fingerprint": fingerprint,
        "dataset_fingerprint": fingerprint_hex(data.fingerprint()),
        "seed": seed,
        "split": fraction,
        "n_train": train_set.len(),
        "n_test": test_set.len(),
        "hyperparameters": to_value(&trained.model.training_meta.hyperparameters),
        "eval": to_value(&EvalSummary::from(&report)),
        "warnings": trained.model.training_meta.warnings,
    });
    if a.kind == ModelKind::Mlfn {
        summary["final_loss"] = json!(trained.loss_history.last());
        summary["loss_increasing_windows"] = json!(increasing_windows(&trained.loss_history, 1000));
    }
    if let Some(s2) = a.sensitivity_seed {
        let other = train(a.kind, &train_set, a.target, &settings, s2)?;
        let r2 = evaluate(&other.model, &test_set, tolerance)?;
        summary["sensitivity"] = json!({
            "seed": s2,
            "eval": to_value(&EvalSummary::from(&r2)),
            "accuracy_delta_pct": r2.prediction_accuracy - report.prediction_accuracy,
            "rms_delta": r2.rms_error - report.rms_error,
        });
    }
    Ok(summary)
}

fn eval_cmd(cfg: &RunConfig, a: EvalArgs) -> Result<Value> {
    let (model, fingerprint) = load_model(&a.model)?;
    let data = load_data(cfg, a.data)?;
    let data = match a.split {
        Some(f) => split(&data, f, a.seed.unwrap_or(cfg.seed))?.1,
        None => data,
    };
    let report = evaluate(&model, &data, a.tolerance.unwrap_or(cfg.tolerance))?;
    write_report(a.out_csv.as_deref(), a.out_json.as_deref(), &report)?;
    Ok(json!({
        "command": "eval",
        "model_fingerprint": fingerprint,
        "eval": to_value(&EvalSummary::from(&report)),
    }))
}

fn design_record(a: &PredictArgs) -> Result<DesignRecord> {
    let d = &a.design;
    let x = [d.tube_length, d.n_tubes, d.tcd, d.tank_volume, d.collector_area, d.tilt_angle, d.final_temp];
    Ok(DesignRecord::from_features(&x)?)
}

fn predict(a: PredictArgs) -> Result<Value> {
    if a.models.len() > 2 {
        return Err(Error::Usage("give at most two --model files".into()));
    }
    let record = design_record(&a)?;
    let mut loaded: Vec<(RegressorModel, String)> = Vec::new();
    for p in &a.models {
        loaded.push(load_model(p)?);
    }
    if loaded.len() == 2 {
        if loaded[0].0.target == loaded[1].0.target {
            return Err(Error::Usage("both models predict the same target".into()));
        }
        if loaded[0].0.target == Target::Hlc {
            loaded.swap(0, 1);
        }
        let mut it = loaded.into_iter();
        let (hcr, hcr_fingerprint) = it.next().expect("two models");
        let (hlc, hlc_fingerprint) = it.next().expect("two models");
        let models = ServeModels {
            hcr,
            hlc,
            hcr_fingerprint,
            hlc_fingerprint,
        };
        let mut v = to_value(&models.predict(&record)?);
        v["command"] = json!("predict");
        return Ok(v);
    }
    let (model, fingerprint) = &loaded[0];
    Ok(json!({
        "command": "predict",
        "target": model.target,
        "prediction": model.predict(&record)?,
        "model_fingerprint": fingerprint,
    }))
}

fn parse_values(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Usage(format!("cannot parse value list `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).map(|v| v as f64).collect());
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
}

fn parse_counts(s: &str) -> Result<[usize; N_FEATURES]> {
    let bad = || Error::Usage(format!("--counts needs 7 positive integers or `reference`, got `{s}`"));
    let v: Vec<usize> = s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    <[usize; N_FEATURES]>::try_from(v).map_err(|_| bad())
}

fn load_target_model(path: &Path, want: Target) -> Result<(RegressorModel, String)> {
    let (m, fp) = load_model(path)?;
    if m.target != want {
        return Err(Error::Usage(format!(
            "{} predicts {}, expected {}",
            path.display(),
            m.target.name(),
            want.name()
        )));
    }
    Ok((m, fp))
}

fn screen_cmd(cfg: &RunConfig, a: ScreenArgs) -> Result<Value> {
    let sc = &cfg.screening;
    let hcr_path = required(a.hcr_model, &cfg.paths.hcr_model, "--hcr-model (or paths.hcr_model)")?;
    let (hcr, hcr_fp) = load_target_model(&hcr_path, Target::Hcr)?;
    let hlc = match a.hlc_model.or_else(|| cfg.paths.hlc_model.clone()) {
        Some(p) => Some(load_target_model(&p, Target::Hlc)?),
        None => None,
    };

    let bounds: [(f64, f64); N_FEATURES] = match &a.data {
        Some(p) => {
            let table = descriptive_stats(&load_dataset(p, &cfg.schema)?)?;
            Feature::ALL.map(|f| (table[f.index()].minimum, table[f.index()].maximum))
        }
        None => load_generator_config(None)?.features.bounds(),
    };
    let final_temps = match &a.final_temp_values {
        Some(s) => Some(parse_values(s)?),
        None => sc.final_temp_values.clone(),
    };
    let cap = match a.allow_large {
        true => u128::MAX,
        false => a.enumeration_cap.unwrap_or(sc.enumeration_cap),
    };

    let explicit = match a.counts.as_deref() {
        Some("reference") => Some(REFERENCE_COUNTS),
        Some(list) => Some(parse_counts(list)?),
        None => sc.counts,
    };
    let mut overrides = [None; N_FEATURES];
    overrides[Feature::FinalTemp.index()] = match &final_temps {
        Some(t) => Some(t.len().max(1)),
        None => sc.final_temp_count,
    };
    let (counts, importance) = match explicit {
        Some(c) => (c, None),
        None => {
            let imp = weight_importance(&hcr)?;
            let alloc = AllocationConfig {
                value_budget: a.value_budget.unwrap_or(sc.value_budget),
                per_feature_max: a.per_feature_max.or(sc.per_feature_max),
                product_cap: cap,
            };
            (allocate_value_counts(&imp, &alloc, &overrides)?, Some(imp))
        }
    };
    let mut fixed: [Option<Vec<f64>>; N_FEATURES] = Default::default();
    fixed[Feature::FinalTemp.index()] = final_temps;
    let spec = build_grid(&counts, &bounds, &fixed, &Feature::ALL.map(Feature::is_integer))?;
    let total = check_capacity(&spec, cap)?;
    if total > sc.large_run_threshold && !a.allow_large {
        return Err(Error::Usage(format!(
            "grid has {total} combinations, above {}; pass --allow-large to run it",
            sc.large_run_threshold
        )));
    }

    let criterion = match a.threshold.or(sc.threshold) {
        Some(min_hcr) if a.top_k.is_none() => Criterion::Threshold { min_hcr },
        _ => Criterion::TopK {
            k: a.top_k.unwrap_or(sc.top_k),
        },
    };
    let par = ParallelConfig {
        workers: a.workers.unwrap_or(sc.workers),
        chunk_size: a.chunk_size.unwrap_or(sc.chunk_size),
        enumeration_cap: cap,
    };
    log::info!("screening {total} combinations with {} workers", par.workers);
    let found = screen_parallel(&hcr, hlc.as_ref().map(|h| &h.0), &spec, &criterion, &par)?;
    let header = CandidateDbHeader {
        schema_version: CANDIDATE_SCHEMA_VERSION,
        model_fingerprint: hcr_fp,
        hlc_model_fingerprint: hlc.as_ref().map(|h| h.1.clone()),
        criterion,
        grid_spec: spec,
    };
    let db = CandidateDb::new(header, found)?;
    let out = a
        .out
        .or_else(|| cfg.paths.candidate_db.clone())
        .unwrap_or_else(|| PathBuf::from("candidates.jsonl"));
    save_db(&out, &db)?;

    let best = db.candidates.first().map(|c| {
        json!({
            "grid_index": big(c.grid_index),
            "features": Feature::ALL.iter().map(|f| (f.name().to_string(), json!(c.features[f.index()]))).collect::<serde_json::Map<_, _>>(),
            "predicted_hcr": c.predicted_hcr,
            "predicted_hlc": c.predicted_hlc,
        })
    });
    Ok(json!({
        "command": "screen",
        "out": out,
        "total_combinations": big(total),
        "value_counts": db.header.grid_spec.radices(),
        "importance": importance,
        "criterion": to_value(&criterion),
        "n_candidates": db.candidates.len(),
        "best": best,
    }))
}

fn db_export(cfg: &RunConfig, db: Option<PathBuf>, out: PathBuf) -> Result<Value> {
    let path = required(db, &cfg.paths.candidate_db, "--db (or paths.candidate_db)")?;
    let db = load_db(&path)?;
    write_file(&out, candidates_csv(&db).as_bytes())?;
    Ok(json!({ "command": "db export", "out": out, "n_candidates": db.candidates.len() }))
}

fn db_merge(
    cfg: &RunConfig,
    db: Option<PathBuf>,
    original: Option<PathBuf>,
    experiments: PathBuf,
    out: PathBuf,
    db_out: Option<PathBuf>,
) -> Result<Value> {
    let db_path = required(db, &cfg.paths.candidate_db, "--db (or paths.candidate_db)")?;
    let mut db = load_db(&db_path)?;
    let original = load_data(cfg, original)?;
    let experiments = load_dataset(&experiments, &cfg.schema)?;
    let merged = merge_validated(&mut db, &original, &experiments)?;
    save_dataset(&out, &merged)?;
    let db_out = db_out.unwrap_or(db_path);
    save_db(&db_out, &db)?;
    Ok(json!({
        "command": "db merge",
        "out": out,
        "db_out": db_out,
        "n_original": original.len(),
        "n_experiments": experiments.len(),
        "n_merged": merged.len(),
        "dataset_fingerprint": fingerprint_hex(merged.fingerprint()),
        "validations": db.validations.iter().map(|v| json!({
            "grid_index": v.grid_index.map(big),
            "measured_hcr": v.measured_hcr,
            "predicted_hcr": v.predicted_hcr,
            "error_rate_pct": v.error_rate_pct,
        })).collect::<Vec<_>>(),
    }))
}

fn serve_cmd(cfg: &RunConfig, a: ServeArgs) -> Result<Value> {
    let hcr = required(a.hcr_model, &cfg.paths.hcr_model, "--hcr-model (or paths.hcr_model)")?;
    let hlc = required(a.hlc_model, &cfg.paths.hlc_model, "--hlc-model (or paths.hlc_model)")?;
    let models = Arc::new(ServeModels::load(&hcr, &hlc)?);
    let static_dir = a.static_dir.or_else(|| cfg.paths.static_dir.clone());
    let fingerprints = json!({ "hcr": models.hcr_fingerprint, "hlc": models.hlc_fingerprint });
    let app = router(Some(models), static_dir);
    let rt = tokio::runtime::Runtime::new().map_err(|e| Error::Service(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((a.host.as_str(), a.port))
            .await
            .map_err(|e| Error::Service(format!("cannot bind {}:{}: {e}", a.host, a.port)))?;
        let addr = listener.local_addr().map_err(|e| Error::Service(e.to_string()))?;
        println!("{}", json!({ "command": "serve", "address": addr.to_string(), "model_fingerprints": fingerprints }));
        log::info!("listening on http://{addr}");
        crate::serve::run(listener, app).await
    })?;
    Ok(Value::Null)
}

