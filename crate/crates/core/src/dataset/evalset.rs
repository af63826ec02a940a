use log::warn;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::controls::{
    project, sample_control_vector, sample_subset, ControlSubset, ControlVector,
    StandardizationStats,
};
use crate::error::{DatasetError, SamplingError};
use crate::feature::FeatureVector;
use crate::rng::stream_rng;

use super::preprocess::PreparedExample;
use super::prompt::{render_prompt, Prompt};

/// Default number of sampled control vectors per test example.
pub const DEFAULT_K: usize = 5;
/// Default perturbation scale in standardized units.
pub const DEFAULT_SIGMA: f64 = 0.1;

/// How the control subset of each evaluation task is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetPolicy {
    /// `n ~ Uniform{1..=m}`, then a uniform subset of size `n`.
    UpTo(usize),
    /// Always exactly `n` controls.
    Exactly(usize),
}

/// One test instruction with `K` sampled targets over a shared subset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalTask {
    pub id: String,
    pub instruction: String,
    #[serde(default)]
    pub input: String,
    pub subset: ControlSubset,
    /// The `K` targets, each projected to `subset`.
    pub controls: Vec<ControlVector<f64>>,
    /// The full valid vectors the targets were projected from.
    pub sampled: Vec<FeatureVector<f64>>,
    /// `f(y)` of the reference output.
    pub reference: FeatureVector<f64>,
    pub sigma: f64,
}

impl EvalTask {
    pub fn prompt(&self, k: usize) -> Prompt {
        render_prompt(&self.instruction, &self.input, &self.controls[k])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedTask {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalSetConfig {
    pub policy: SubsetPolicy,
    pub k: usize,
    pub sigma: f64,
    pub seed: u64,
    pub max_attempts: usize,
}

fn build_task(
    p: &PreparedExample,
    stats: &StandardizationStats<f64>,
    cfg: &EvalSetConfig,
) -> Result<EvalTask, SamplingError> {
    let mut rng = stream_rng(cfg.seed, p.index as u64);
    let subset = match cfg.policy {
        SubsetPolicy::UpTo(m) => sample_subset(m, &mut rng)?,
        SubsetPolicy::Exactly(n) => ControlSubset::sample_exact(n, &mut rng)?,
    };
    let mut sampled = Vec::with_capacity(cfg.k);
    for _ in 0..cfg.k {
        sampled.push(sample_control_vector(
            &p.features,
            cfg.sigma,
            stats,
            &mut rng,
            cfg.max_attempts,
        )?);
    }
    let controls = sampled.iter().map(|v| project(v, &subset)).collect();
    Ok(EvalTask {
        id: p.example.id.clone(),
        instruction: p.example.instruction.clone(),
        input: p.example.input.clone(),
        subset,
        controls,
        sampled,
        reference: p.features,
        sigma: cfg.sigma,
    })
}

/// Builds evaluation tasks; examples whose sampling fails are skipped and
/// reported rather than aborting the run.
pub fn build_eval_set(
    examples: &[PreparedExample],
    stats: &StandardizationStats<f64>,
    cfg: &EvalSetConfig,
) -> (Vec<EvalTask>, Vec<SkippedTask>) {
    let results: Vec<_> = examples
        .par_iter()
        .map(|p| build_task(p, stats, cfg).map_err(|e| (p.example.id.clone(), e)))
        .collect();
    let mut tasks = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(t) => tasks.push(t),
            Err((id, e)) => {
                warn!("skipping example {id}: {e}");
                skipped.push(SkippedTask {
                    id,
                    reason: e.to_string(),
                });
            }
        }
    }
    (tasks, skipped)
}

/// Disjoint uniform train/test split; both halves keep input order.
pub fn split<T: Clone, R: Rng + ?Sized>(
    examples: &[T],
    train_n: usize,
    test_n: usize,
    rng: &mut R,
) -> Result<(Vec<T>, Vec<T>), DatasetError> {
    let requested = train_n + test_n;
    if requested > examples.len() {
        return Err(DatasetError::InsufficientData {
            requested,
            available: examples.len(),
        });
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(rng);
    let mut train_idx = order[..train_n].to_vec();
    let mut test_idx = order[train_n..requested].to_vec();
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |idx: &[usize]| idx.iter().map(|&i| examples[i].clone()).collect();
    Ok((pick(&train_idx), pick(&test_idx)))
}
