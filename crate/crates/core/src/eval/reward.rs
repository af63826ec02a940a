use crate::controls::{ControlSubset, StandardizationStats};
use crate::dataset::FeatureSource;
use crate::error::EvalError;
use crate::feature::{Feature, FeatureVector, FEATURE_COUNT};
use crate::scalar::{FloatScalar, Scalar};

/// Training-set `(min, max)` per feature, the reward's scale.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardStats<T> {
    ranges: [(T, T); FEATURE_COUNT],
}

impl<T: Scalar> RewardStats<T> {
    pub fn new(ranges: [(T, T); FEATURE_COUNT]) -> Self {
        Self { ranges }
    }

    pub fn range(&self, feature: Feature) -> (T, T) {
        self.ranges[feature.index()]
    }
}

impl<T: FloatScalar> RewardStats<T> {
    pub fn from_stats(stats: &StandardizationStats<T>) -> Self {
        Self {
            ranges: Feature::ALL.map(|f| {
                let s = stats.get(f);
                (s.min, s.max)
            }),
        }
    }
}

/// `-(1/|C|) * sum_{i in C} |f_i(response) - f_i(target)| / (M_i - m_i)`.
///
/// Always `<= 0`, and `0` exactly when the two vectors agree on `subset`.
pub fn reinforce_reward<T: Scalar>(
    target: &FeatureVector<T>,
    response: &FeatureVector<T>,
    subset: &ControlSubset,
    stats: &RewardStats<T>,
) -> Result<T, EvalError> {
    if subset.is_empty() {
        return Ok(T::zero());
    }
    let mut total = T::zero();
    for &f in subset.features() {
        let (lo, hi) = stats.range(f);
        if !(hi > lo) {
            return Err(EvalError::DegenerateScale(f));
        }
        total = total + (response[f] - target[f]).abs() / (hi - lo);
    }
    Ok(-(total / T::from_count(subset.len() as u64)))
}

/// [`reinforce_reward`] with the response features extracted from text.
pub fn reinforce_reward_text(
    target: &FeatureVector<f64>,
    response: &str,
    subset: &ControlSubset,
    stats: &RewardStats<f64>,
    source: &dyn FeatureSource,
) -> Result<f64, EvalError> {
    let features = source.features(response)?;
    reinforce_reward(target, &features, subset, stats)
}
