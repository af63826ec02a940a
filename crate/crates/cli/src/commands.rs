use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use lingctl_core::controls::{self, sample_control_vector, StandardizationStats};
use lingctl_core::dataset::{
    annotate_dataset, build_eval_set, load_dataset, preprocess, split, EvalSetConfig, EvalTask,
    SubsetPolicy,
};
use lingctl_core::eval::{
    radar_bundle, score_rows, score_run, sweep_report, write_csv, ScoredRun, SweepKind, SweepTable,
};
use lingctl_core::lingfeat::Extractor;
use lingctl_core::modelclient::{
    load_ledger, run_batch, transport_from_config, EndpointConfig, ModelClient,
};
use lingctl_core::rng::stream_rng;
use lingctl_core::Features;

use crate::io::{
    create_parent, file_name, read_json, read_jsonl, require_distinct, write_json, write_jsonl,
};
use crate::manifest::Manifest;

/// RNG stream reserved for the holdout split, apart from per-example
/// streams.
const SPLIT_STREAM: u64 = u64::MAX;

/// One line of `extract` output.
#[derive(Serialize, Deserialize)]
pub struct FeatureLine {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Features>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn text_record(value: &Value, position: usize) -> Result<(String, String)> {
    let id = match value.get("id") {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => position.to_string(),
    };
    let text = value
        .get("text")
        .or_else(|| value.get("output"))
        .and_then(Value::as_str)
        .with_context(|| format!("record {} has no string `text` or `output`", position + 1))?;
    Ok((id, text.to_string()))
}

pub fn extract(input: &Path, out: &Path) -> Result<()> {
    require_distinct(input, out)?;
    let values: Vec<Value> = read_jsonl(input)?;
    let records = values
        .iter()
        .enumerate()
        .map(|(i, v)| text_record(v, i))
        .collect::<Result<Vec<_>>>()?;
    let extractor = Extractor::default();
    let lines: Vec<FeatureLine> = records
        .par_iter()
        .map(|(id, text)| match extractor.extract(text) {
            Ok(f) => FeatureLine {
                id: id.clone(),
                features: Some(f),
                error: None,
            },
            Err(e) => FeatureLine {
                id: id.clone(),
                features: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    write_jsonl(out, &lines)?;
    Manifest::new("extract", None, &json!({}), &[input])?.write_next_to(out)?;
    info!("extracted {} texts", lines.len());
    Ok(())
}

pub fn validate(input: &Path, out: Option<&Path>) -> Result<()> {
    let lines: Vec<FeatureLine> = read_jsonl(input)?;
    let rows: Vec<Value> = lines
        .iter()
        .map(|l| match (&l.features, &l.error) {
            (Some(f), _) => {
                let r = controls::validate(f);
                json!({"id": l.id, "valid": r.valid, "violations": r.violation_ids()})
            }
            (None, e) => json!({"id": l.id, "valid": false, "violations": [], "error": e}),
        })
        .collect();
    match out {
        Some(out) => {
            require_distinct(input, out)?;
            write_jsonl(out, &rows)?;
            Manifest::new("validate", None, &json!({}), &[input])?.write_next_to(out)?;
        }
        None => {
            for r in &rows {
                println!("{r}");
            }
        }
    }
    let invalid = rows.iter().filter(|r| r["valid"] == false).count();
    info!("{} vectors, {invalid} invalid", rows.len());
    Ok(())
}

fn valid_vectors(lines: &[FeatureLine]) -> Vec<Features> {
    lines
        .iter()
        .filter_map(|l| l.features)
        .filter(controls::is_valid)
        .collect()
}

pub fn fit_stats(input: &Path, out: &Path) -> Result<()> {
    require_distinct(input, out)?;
    let lines: Vec<FeatureLine> = read_jsonl(input)?;
    let vectors = valid_vectors(&lines);
    if vectors.len() < lines.len() {
        warn!(
            "fitting on {} of {} vectors; the rest are invalid",
            vectors.len(),
            lines.len()
        );
    }
    let stats = StandardizationStats::fit(&vectors, file_name(input))?;
    write_json(out, &stats)?;
    Manifest::new("fit-stats", None, &json!({"count": stats.count}), &[input])?
        .write_next_to(out)?;
    Ok(())
}

fn load_stats(path: &Path) -> Result<StandardizationStats<f64>> {
    let stats: StandardizationStats<f64> = read_json(path)?;
    stats
        .check()
        .with_context(|| format!("invalid stats file {}", path.display()))?;
    Ok(stats)
}

pub struct AnnotateOpts {
    pub input: PathBuf,
    pub stats: Option<PathBuf>,
    pub m: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub dropped: Option<PathBuf>,
    pub holdout: Option<(usize, PathBuf)>,
}

pub fn annotate(o: AnnotateOpts) -> Result<()> {
    require_distinct(&o.input, &o.out)?;
    let mut examples = load_dataset(&o.input, None)?;
    if let Some((n, path)) = &o.holdout {
        let train_n = examples
            .len()
            .checked_sub(*n)
            .with_context(|| format!("cannot hold out {n} of {} examples", examples.len()))?;
        let (train, test) = split(
            &examples,
            train_n,
            *n,
            &mut stream_rng(o.seed, SPLIT_STREAM),
        )?;
        write_jsonl(path, &test)?;
        examples = train;
    }
    let (prepared, dropped) = preprocess(&examples, &Extractor::default());
    let annotated = annotate_dataset(&prepared, o.m, o.seed)?;
    let records: Vec<_> = annotated.iter().map(|a| a.to_record(o.seed, o.m)).collect();
    write_jsonl(&o.out, &records)?;
    if let Some(path) = &o.dropped {
        write_jsonl(path, &dropped)?;
    }
    info!(
        "annotated {} examples, dropped {}",
        records.len(),
        dropped.len()
    );

    let mut inputs: Vec<&Path> = vec![&o.input];
    if let Some(s) = &o.stats {
        inputs.push(s);
    }
    let params = json!({"m": o.m, "holdout": o.holdout.as_ref().map(|h| h.0)});
    Manifest::new("annotate", Some(o.seed), &params, &inputs)?.write_next_to(&o.out)?;
    Ok(())
}

pub struct SampleOpts {
    pub input: PathBuf,
    pub stats: PathBuf,
    pub sigma: f64,
    pub k: usize,
    pub seed: u64,
    pub max_attempts: usize,
    pub out: PathBuf,
}

pub fn sample_controls(o: SampleOpts) -> Result<()> {
    require_distinct(&o.input, &o.out)?;
    let stats = load_stats(&o.stats)?;
    let lines: Vec<FeatureLine> = read_jsonl(&o.input)?;
    let per_line: Vec<Vec<Value>> = lines
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            let Some(reference) = &l.features else {
                warn!("skipping {}: no features", l.id);
                return Vec::new();
            };
            let mut rng = stream_rng(o.seed, i as u64);
            let mut rows = Vec::with_capacity(o.k);
            for k in 0..o.k {
                match sample_control_vector(reference, o.sigma, &stats, &mut rng, o.max_attempts) {
                    Ok(v) => rows.push(json!({"id": l.id, "k": k, "controls": v})),
                    Err(e) => {
                        warn!("skipping {}: {e}", l.id);
                        return Vec::new();
                    }
                }
            }
            rows
        })
        .collect();
    let rows: Vec<Value> = per_line.into_iter().flatten().collect();
    write_jsonl(&o.out, &rows)?;
    let params = json!({"sigma": o.sigma, "k": o.k, "max_attempts": o.max_attempts});
    Manifest::new(
        "sample-controls",
        Some(o.seed),
        &params,
        &[&o.input, &o.stats],
    )?
    .write_next_to(&o.out)?;
    Ok(())
}

pub struct BuildEvalOpts {
    pub input: PathBuf,
    pub stats: PathBuf,
    pub k: usize,
    pub sigma: f64,
    pub m: usize,
    pub n: Option<usize>,
    pub seed: u64,
    pub max_attempts: usize,
    pub out: PathBuf,
    pub dropped: Option<PathBuf>,
    pub skipped: Option<PathBuf>,
}

pub fn build_eval(o: BuildEvalOpts) -> Result<()> {
    require_distinct(&o.input, &o.out)?;
    let stats = load_stats(&o.stats)?;
    let examples = load_dataset(&o.input, None)?;
    let (prepared, dropped) = preprocess(&examples, &Extractor::default());
    let policy = match o.n {
        Some(n) => SubsetPolicy::Exactly(n),
        None => SubsetPolicy::UpTo(o.m),
    };
    let cfg = EvalSetConfig {
        policy,
        k: o.k,
        sigma: o.sigma,
        seed: o.seed,
        max_attempts: o.max_attempts,
    };
    let (tasks, skipped) = build_eval_set(&prepared, &stats, &cfg);
    write_jsonl(&o.out, &tasks)?;
    if let Some(path) = &o.dropped {
        write_jsonl(path, &dropped)?;
    }
    if let Some(path) = &o.skipped {
        write_jsonl(path, &skipped)?;
    }
    info!(
        "{} tasks, {} dropped, {} skipped",
        tasks.len(),
        dropped.len(),
        skipped.len()
    );
    let params = json!({
        "policy": policy,
        "k": o.k,
        "sigma": o.sigma,
        "max_attempts": o.max_attempts,
    });
    Manifest::new("build-eval", Some(o.seed), &params, &[&o.input, &o.stats])?
        .write_next_to(&o.out)?;
    Ok(())
}

pub fn evaluate(tasks_path: &Path, endpoint: &Path, out: &Path, jobs: Option<usize>) -> Result<()> {
    require_distinct(tasks_path, out)?;
    let tasks: Vec<EvalTask> = read_jsonl(tasks_path)?;
    let cfg: EndpointConfig = read_json(endpoint)?;
    let transport = transport_from_config(&cfg)?;
    let client = ModelClient::new(transport, &cfg);
    let parallel = jobs.map_or(cfg.max_parallel, |j| j.min(cfg.max_parallel));
    create_parent(out)?;
    let records = run_batch(&tasks, &client, Some(out), parallel)?;
    let failed = records.iter().filter(|r| !r.is_success()).count();
    if failed > 0 {
        warn!(
            "{failed} of {} requests failed; rerun to retry them",
            records.len()
        );
    }
    Manifest::new("evaluate", None, &cfg, &[tasks_path, endpoint])?.write_next_to(out)?;
    Ok(())
}

/// Parses `NAME=TARGETS,RESPONSES`.
pub fn parse_run(spec: &str) -> Result<(String, PathBuf, PathBuf)> {
    let Some((name, paths)) = spec.split_once('=') else {
        bail!("--run expects NAME=TARGETS,RESPONSES, got `{spec}`");
    };
    let Some((targets, responses)) = paths.split_once(',') else {
        bail!("--run expects NAME=TARGETS,RESPONSES, got `{spec}`");
    };
    if name.is_empty() {
        bail!("--run needs a baseline name");
    }
    Ok((name.to_string(), targets.into(), responses.into()))
}

pub fn report(
    runs: &[(String, PathBuf, PathBuf)],
    sweep: Option<SweepKind>,
    out: &Path,
) -> Result<()> {
    if runs.is_empty() {
        bail!("nothing to report: pass --targets/--responses or --run");
    }
    let extractor = Extractor::default();
    let mut scored: Vec<ScoredRun> = Vec::with_capacity(runs.len());
    let mut inputs: Vec<&Path> = Vec::new();
    for (name, targets, responses) in runs {
        let tasks: Vec<EvalTask> = read_jsonl(targets)?;
        let ledger = load_ledger(responses)?;
        let run = score_run(name, &tasks, &ledger, &extractor)
            .with_context(|| format!("scoring {}", responses.display()))?;
        scored.push(run);
        inputs.push(targets);
        inputs.push(responses);
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let errors: Vec<_> = scored.iter().flat_map(|r| r.errors.iter()).collect();
    write_csv(file(out, "errors.csv")?, &errors)?;
    write_csv(file(out, "scores.csv")?, &score_rows(&scored))?;
    let radar = match sweep {
        None => radar_bundle(&scored),
        Some(kind) => {
            let report = sweep_report(kind, &scored)?;
            match &report.table {
                SweepTable::N(rows) => write_csv(file(out, "sweep_n.csv")?, rows)?,
                SweepTable::Sigma(rows) => write_csv(file(out, "sweep_sigma.csv")?, rows)?,
            }
            report.radar
        }
    };
    write_json(&out.join("radar.json"), &radar)?;

    let names: Vec<&str> = runs.iter().map(|r| r.0.as_str()).collect();
    let params = json!({"baselines": names, "sweep": sweep});
    Manifest::new("report", None, &params, &inputs)?.write_next_to(out)?;
    Ok(())
}

fn file(dir: &Path, name: &str) -> Result<fs::File> {
    let path = dir.join(name);
    fs::File::create(&path).with_context(|| format!("creating {}", path.display()))
}
