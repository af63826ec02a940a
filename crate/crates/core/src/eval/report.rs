//! Scoring response ledgers and building the aggregate tables.
//!
//! Everything here is a pure function of the task and response ledgers, and
//! all iteration is over canonically ordered data, so identical inputs give
//! byte-identical outputs.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{EvalTask, FeatureSource};
use crate::error::EvalError;
use crate::feature::{Feature, FEATURE_COUNT};
use crate::modelclient::CompletionRecord;

use super::score::{l1_error, ErrorRecord, NormScale};

/// z-value of a two-sided 95% normal interval.
const Z95: f64 = 1.96;

/// A response whose text could not be measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionFailure {
    pub baseline: String,
    pub task_id: String,
    pub k: usize,
    pub reason: String,
}

/// The errors of one baseline on one task file.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredRun {
    pub baseline: String,
    /// In (task, k, feature) order.
    pub errors: Vec<ErrorRecord<f64>>,
    pub failures: Vec<ExtractionFailure>,
    /// Subset size of every task, keyed by task id.
    pub subset_sizes: BTreeMap<String, usize>,
    /// Sampling scale of every task, keyed by task id.
    pub sigmas: BTreeMap<String, f64>,
}

/// Measures every response and computes its per-feature errors.
///
/// Every (task, k) pair needs a successful response; otherwise the missing
/// pairs are reported together. Responses the extractor cannot measure
/// (for example empty text) are listed in `failures` and left unscored.
pub fn score_run(
    baseline: &str,
    tasks: &[EvalTask],
    responses: &[CompletionRecord],
    source: &dyn FeatureSource,
) -> Result<ScoredRun, EvalError> {
    let known: HashMap<&str, &EvalTask> = tasks.iter().map(|t| (t.id.as_str(), t)).collect();
    let mut by_key: HashMap<(&str, usize), &str> = HashMap::new();
    for r in responses {
        if !known.contains_key(r.task_id.as_str()) {
            return Err(EvalError::UnknownTask(r.task_id.clone()));
        }
        if let Some(text) = &r.response {
            by_key.insert((r.task_id.as_str(), r.k), text);
        }
    }
    let missing: Vec<(String, usize)> = tasks
        .iter()
        .flat_map(|t| (0..t.controls.len()).map(move |k| (t, k)))
        .filter(|(t, k)| !by_key.contains_key(&(t.id.as_str(), *k)))
        .map(|(t, k)| (t.id.clone(), k))
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::IncompleteLedger(missing));
    }

    let per_task: Vec<(Vec<ErrorRecord<f64>>, Vec<ExtractionFailure>)> = tasks
        .par_iter()
        .map(|t| {
            let mut errors = Vec::new();
            let mut failures = Vec::new();
            for (k, target) in t.controls.iter().enumerate() {
                let text = by_key[&(t.id.as_str(), k)];
                match source.features(text) {
                    Ok(features) => {
                        for &(feature, error) in l1_error(target, &features).entries() {
                            errors.push(ErrorRecord {
                                task_id: t.id.clone(),
                                k,
                                baseline: baseline.to_string(),
                                feature,
                                error,
                            });
                        }
                    }
                    Err(e) => failures.push(ExtractionFailure {
                        baseline: baseline.to_string(),
                        task_id: t.id.clone(),
                        k,
                        reason: e.to_string(),
                    }),
                }
            }
            (errors, failures)
        })
        .collect();

    let mut run = ScoredRun {
        baseline: baseline.to_string(),
        errors: Vec::new(),
        failures: Vec::new(),
        subset_sizes: tasks
            .iter()
            .map(|t| (t.id.clone(), t.subset.len()))
            .collect(),
        sigmas: tasks.iter().map(|t| (t.id.clone(), t.sigma)).collect(),
    };
    for (e, f) in per_task {
        run.errors.extend(e);
        run.failures.extend(f);
    }
    for f in &run.failures {
        warn!(
            "unscored response {} k={} of {}: {}",
            f.task_id, f.k, f.baseline, f.reason
        );
    }
    Ok(run)
}

/// Per-feature min/P95 anchors over a pool of runs.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    scales: [Option<NormScale<f64>>; FEATURE_COUNT],
}

impl Normalization {
    pub fn fit<'a>(runs: impl IntoIterator<Item = &'a ScoredRun>) -> Self {
        let mut pooled: [Vec<f64>; FEATURE_COUNT] = Default::default();
        for run in runs {
            for e in &run.errors {
                pooled[e.feature.index()].push(e.error);
            }
        }
        Self {
            scales: pooled.map(|v| NormScale::fit(&v)),
        }
    }

    pub fn scale(&self, feature: Feature) -> Option<NormScale<f64>> {
        self.scales[feature.index()]
    }

    /// Features whose anchors coincide; their errors normalize to 0 at the
    /// anchor and 1 above it.
    pub fn degenerate(&self) -> Vec<Feature> {
        Feature::ALL
            .into_iter()
            .filter(|&f| self.scale(f).is_some_and(|s| s.is_degenerate()))
            .collect()
    }

    pub fn normalize(&self, record: &ErrorRecord<f64>) -> f64 {
        self.scale(record.feature)
            .expect("normalization fitted on this record")
            .normalize_lenient(record.error)
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Mean normalized error per feature over all runs named `baseline`.
fn feature_scores<'a>(
    runs: impl IntoIterator<Item = &'a ScoredRun>,
    norm: &Normalization,
) -> [Option<f64>; FEATURE_COUNT] {
    let mut acc: [Vec<f64>; FEATURE_COUNT] = Default::default();
    for run in runs {
        for e in &run.errors {
            acc[e.feature.index()].push(norm.normalize(e));
        }
    }
    acc.map(|v| mean(&v))
}

/// Runs grouped by baseline name, in first-appearance order.
fn by_baseline(runs: &[ScoredRun]) -> Vec<(&str, Vec<&ScoredRun>)> {
    let mut out: Vec<(&str, Vec<&ScoredRun>)> = Vec::new();
    for run in runs {
        match out.iter_mut().find(|(b, _)| *b == run.baseline) {
            Some((_, v)) => v.push(run),
            None => out.push((&run.baseline, vec![run])),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarBaseline {
    pub name: String,
    /// One score per feature in id order; `null` if never controlled.
    pub scores: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarNormalization {
    pub min: Vec<Option<f64>>,
    pub p95: Vec<Option<f64>>,
}

/// Plot-ready per-baseline, per-feature scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarBundle {
    pub features: Vec<Feature>,
    pub baselines: Vec<RadarBaseline>,
    pub normalization: RadarNormalization,
    pub degenerate: Vec<Feature>,
    pub extraction_failures: Vec<ExtractionFailure>,
}

impl RadarBundle {
    pub fn score(&self, baseline: &str, feature: Feature) -> Option<f64> {
        self.baselines
            .iter()
            .find(|b| b.name == baseline)
            .and_then(|b| b.scores[feature.index()])
    }
}

/// Scores every baseline against anchors pooled over all of `runs`.
pub fn radar_bundle(runs: &[ScoredRun]) -> RadarBundle {
    let norm = Normalization::fit(runs);
    radar_with(runs, &norm)
}

fn radar_with(runs: &[ScoredRun], norm: &Normalization) -> RadarBundle {
    let baselines = by_baseline(runs)
        .into_iter()
        .map(|(name, group)| RadarBaseline {
            name: name.to_string(),
            scores: feature_scores(group, norm).to_vec(),
        })
        .collect();
    let anchor = |pick: fn(&NormScale<f64>) -> f64| {
        Feature::ALL
            .iter()
            .map(|&f| norm.scale(f).as_ref().map(pick))
            .collect()
    };
    RadarBundle {
        features: Feature::ALL.to_vec(),
        baselines,
        normalization: RadarNormalization {
            min: anchor(|s| s.min),
            p95: anchor(|s| s.p95),
        },
        degenerate: norm.degenerate(),
        extraction_failures: runs
            .iter()
            .flat_map(|r| r.failures.iter().cloned())
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    /// Points are control-subset sizes.
    NSweep,
    /// Points are sampling scales.
    SigmaSweep,
}

/// One row of the n-sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NSweepRow {
    pub baseline: String,
    pub n: usize,
    pub examples: usize,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// One row of the sigma-sweep table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaSweepRow {
    pub baseline: String,
    pub sigma: f64,
    pub feature: Feature,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SweepTable {
    N(Vec<NSweepRow>),
    Sigma(Vec<SigmaSweepRow>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub table: SweepTable,
    pub radar: RadarBundle,
}

/// The sweep point a run was built at: every task must share it.
fn sweep_point(run: &ScoredRun, kind: SweepKind) -> Result<f64, EvalError> {
    let values: Vec<f64> = match kind {
        SweepKind::NSweep => run.subset_sizes.values().map(|&n| n as f64).collect(),
        SweepKind::SigmaSweep => run.sigmas.values().copied().collect(),
    };
    let first = *values.first().ok_or_else(|| EvalError::MixedSweepPoint {
        run: run.baseline.clone(),
        detail: "no tasks".into(),
    })?;
    if let Some(other) = values.iter().find(|&&v| v != first) {
        return Err(EvalError::MixedSweepPoint {
            run: run.baseline.clone(),
            detail: format!("{first} and {other}"),
        });
    }
    Ok(first)
}

/// Mean and normal-approximation 95% interval of per-example means.
fn mean_ci(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, m, m);
    }
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    let half = Z95 * var.sqrt() / n.sqrt();
    (m, m - half, m + half)
}

/// Sweep tables over runs at different points, normalized with anchors
/// pooled over every point and baseline.
///
/// For an n-sweep each task's errors are averaged over its `K` requests and
/// controls, and rows report the mean over tasks with a 95% interval. For a
/// sigma-sweep rows give each feature's mean normalized error per point.
pub fn sweep_report(kind: SweepKind, runs: &[ScoredRun]) -> Result<SweepReport, EvalError> {
    let norm = Normalization::fit(runs);
    let mut points: Vec<(String, f64, &ScoredRun)> = Vec::with_capacity(runs.len());
    for run in runs {
        points.push((run.baseline.clone(), sweep_point(run, kind)?, run));
    }
    let order = |name: &str| runs.iter().position(|r| r.baseline == name).unwrap_or(0);
    points.sort_by(|a, b| {
        order(&a.0)
            .cmp(&order(&b.0))
            .then(a.1.partial_cmp(&b.1).expect("sweep points are finite"))
    });

    let table = match kind {
        SweepKind::NSweep => {
            let mut rows: Vec<NSweepRow> = Vec::new();
            for (baseline, point, run) in &points {
                let mut per_task: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
                for e in &run.errors {
                    per_task
                        .entry(e.task_id.as_str())
                        .or_default()
                        .push(norm.normalize(e));
                }
                let means: Vec<f64> = per_task.values().filter_map(|v| mean(v)).collect();
                if means.is_empty() {
                    continue;
                }
                let (m, lo, hi) = mean_ci(&means);
                let n = *point as usize;
                match rows
                    .iter_mut()
                    .find(|r| &r.baseline == baseline && r.n == n)
                {
                    Some(_) => {
                        return Err(EvalError::MixedSweepPoint {
                            run: baseline.clone(),
                            detail: format!("two runs at n = {n}"),
                        })
                    }
                    None => rows.push(NSweepRow {
                        baseline: baseline.clone(),
                        n,
                        examples: means.len(),
                        mean: m,
                        ci_low: lo,
                        ci_high: hi,
                    }),
                }
            }
            SweepTable::N(rows)
        }
        SweepKind::SigmaSweep => {
            let mut rows = Vec::new();
            for (baseline, sigma, run) in &points {
                for (f, score) in Feature::ALL.iter().zip(feature_scores([*run], &norm)) {
                    if let Some(score) = score {
                        rows.push(SigmaSweepRow {
                            baseline: baseline.clone(),
                            sigma: *sigma,
                            feature: *f,
                            score,
                        });
                    }
                }
            }
            SweepTable::Sigma(rows)
        }
    };
    Ok(SweepReport {
        table,
        radar: radar_with(runs, &norm),
    })
}

/// Per-(baseline, feature) summary row of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRow {
    pub baseline: String,
    pub feature: Feature,
    pub count: usize,
    pub mean_error: f64,
    pub score: f64,
}

pub fn score_rows(runs: &[ScoredRun]) -> Vec<ScoreRow> {
    let norm = Normalization::fit(runs);
    let mut rows = Vec::new();
    for (name, group) in by_baseline(runs) {
        for f in Feature::ALL {
            let raw: Vec<&ErrorRecord<f64>> = group
                .iter()
                .flat_map(|r| r.errors.iter())
                .filter(|e| e.feature == f)
                .collect();
            if raw.is_empty() {
                continue;
            }
            let errors: Vec<f64> = raw.iter().map(|e| e.error).collect();
            let normalized: Vec<f64> = raw.iter().map(|e| norm.normalize(e)).collect();
            rows.push(ScoreRow {
                baseline: name.to_string(),
                feature: f,
                count: raw.len(),
                mean_error: mean(&errors).expect("non-empty"),
                score: mean(&normalized).expect("non-empty"),
            });
        }
    }
    rows
}

/// Writes `rows` as CSV with a header derived from the row type.
pub fn write_csv<W: Write, S: Serialize>(writer: W, rows: &[S]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
