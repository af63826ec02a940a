use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::controls::ControlVector;
use crate::error::EvalError;
use crate::feature::{Feature, FeatureVector, FEATURE_COUNT};
use crate::scalar::Scalar;

/// Percentile used as the upper normalization anchor.
pub const NORMALIZATION_PERCENTILE: u32 = 95;

/// `|f_i(response) - target_i|` for every feature in the target.
pub fn l1_error<T: Scalar>(
    target: &ControlVector<T>,
    response: &FeatureVector<T>,
) -> ControlVector<T> {
    ControlVector::from_pairs(
        target
            .entries()
            .iter()
            .map(|&(f, t)| (f, (response[f] - t).abs())),
    )
}

/// One raw error of one baseline on one feature of one (task, k) request.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord<T> {
    pub task_id: String,
    pub k: usize,
    pub baseline: String,
    pub feature: Feature,
    pub error: T,
}

fn cmp<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// The `q`-th percentile (`0..=100`) by linear interpolation between
/// closest ranks. `None` for an empty slice.
pub fn percentile<T: Scalar>(values: &[T], q: u32) -> Option<T> {
    assert!(q <= 100, "percentile {q} out of range");
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(cmp);
    let scaled = (sorted.len() as u64 - 1) * u64::from(q);
    let lo = (scaled / 100) as usize;
    let rem = scaled % 100;
    if rem == 0 {
        return Some(sorted[lo]);
    }
    let frac = T::from_fraction(rem as i128, 100);
    Some(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

/// Min/P95 anchors of one feature's errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormScale<T> {
    pub min: T,
    pub p95: T,
}

impl<T: Scalar> NormScale<T> {
    pub fn fit(errors: &[T]) -> Option<Self> {
        let min = errors.iter().copied().min_by(cmp)?;
        let p95 = percentile(errors, NORMALIZATION_PERCENTILE)?;
        Some(Self { min, p95 })
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.min < self.p95)
    }

    /// `clamp((e - min) / (p95 - min), 0, 1)`.
    pub fn normalize(&self, feature: Feature, e: T) -> Result<T, EvalError> {
        if self.is_degenerate() {
            return Err(EvalError::DegenerateScale(feature));
        }
        let v = (e - self.min) / (self.p95 - self.min);
        Ok(clamp01(v))
    }

    /// Like [`normalize`](Self::normalize), but a degenerate scale maps
    /// errors at or below the anchor to 0 and anything above to 1.
    pub fn normalize_lenient(&self, e: T) -> T {
        if self.is_degenerate() {
            if e <= self.min {
                T::zero()
            } else {
                T::one()
            }
        } else {
            clamp01((e - self.min) / (self.p95 - self.min))
        }
    }
}

fn clamp01<T: Scalar>(v: T) -> T {
    if v < T::zero() {
        T::zero()
    } else if v > T::one() {
        T::one()
    } else {
        v
    }
}

/// Ragged per-feature error rows, one per baseline.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorMatrix<T> {
    baselines: Vec<String>,
    rows: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> Default for ErrorMatrix<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ErrorMatrix<T> {
    pub fn new() -> Self {
        Self {
            baselines: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn baseline_index(&mut self, baseline: &str) -> usize {
        match self.baselines.iter().position(|b| b == baseline) {
            Some(i) => i,
            None => {
                self.baselines.push(baseline.to_string());
                self.rows.push(vec![Vec::new(); FEATURE_COUNT]);
                self.baselines.len() - 1
            }
        }
    }

    /// Adds one raw error. Panics if `e` is negative.
    pub fn push(&mut self, baseline: &str, feature: Feature, e: T) {
        assert!(e >= T::zero(), "L1 errors are non-negative");
        let j = self.baseline_index(baseline);
        self.rows[j][feature.index()].push(e);
    }

    pub fn extend<'a>(&mut self, records: impl IntoIterator<Item = &'a ErrorRecord<T>>) {
        for r in records {
            self.push(&r.baseline, r.feature, r.error);
        }
    }

    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a ErrorRecord<T>>) -> Self {
        let mut m = Self::new();
        m.extend(records);
        m
    }

    /// Baselines in insertion order.
    pub fn baselines(&self) -> &[String] {
        &self.baselines
    }

    pub fn row(&self, feature: Feature, baseline: &str) -> &[T] {
        self.baselines
            .iter()
            .position(|b| b == baseline)
            .map_or(&[][..], |j| &self.rows[j][feature.index()])
    }

    /// Every baseline's errors on `feature`, pooled.
    pub fn pooled(&self, feature: Feature) -> Vec<T> {
        self.rows
            .iter()
            .flat_map(|r| r[feature.index()].iter().copied())
            .collect()
    }

    /// Min and P95 over all baselines; `None` when nobody was scored on
    /// `feature`.
    pub fn scale(&self, feature: Feature) -> Option<NormScale<T>> {
        NormScale::fit(&self.pooled(feature))
    }

    /// The same matrix with every error normalized. Fails on the first
    /// feature that has errors but a degenerate scale.
    pub fn normalize(&self) -> Result<ErrorMatrix<T>, EvalError> {
        let mut rows = self.rows.clone();
        for f in Feature::ALL {
            let Some(scale) = self.scale(f) else { continue };
            for row in rows.iter_mut() {
                for e in row[f.index()].iter_mut() {
                    *e = scale.normalize(f, *e)?;
                }
            }
        }
        Ok(ErrorMatrix {
            baselines: self.baselines.clone(),
            rows,
        })
    }

    /// Mean normalized error of `baseline` on `feature`.
    pub fn baseline_feature_score(&self, feature: Feature, baseline: &str) -> Result<T, EvalError> {
        let row = self.row(feature, baseline);
        if row.is_empty() {
            return Err(EvalError::EmptyRow {
                feature,
                baseline: baseline.to_string(),
            });
        }
        let scale = self.scale(feature).expect("row is non-empty");
        let mut sum = T::zero();
        for &e in row {
            sum = sum + scale.normalize(feature, e)?;
        }
        Ok(sum / T::from_count(row.len() as u64))
    }
}
