use serde::{Deserialize, Serialize};

use crate::error::StatsError;
use crate::feature::{Feature, FeatureKind, FeatureVector, FEATURE_COUNT};
use crate::scalar::FloatScalar;

/// Location, scale and range of one feature over a fitting corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats<T> {
    #[serde(rename = "name")]
    pub feature: Feature,
    pub mean: T,
    pub std: T,
    pub min: T,
    pub max: T,
}

/// Per-feature standardization parameters and training-set range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats<T> {
    pub features: Vec<FeatureStats<T>>,
    pub count: usize,
    pub source: String,
}

impl<T: FloatScalar> StandardizationStats<T> {
    /// Fits mean, sample standard deviation, minimum and maximum per feature.
    pub fn fit(
        vectors: &[FeatureVector<T>],
        source: impl Into<String>,
    ) -> Result<Self, StatsError> {
        if vectors.len() < 2 {
            return Err(StatsError::TooFewVectors(vectors.len()));
        }
        let n = T::from_usize(vectors.len()).expect("count fits in scalar");
        let features = Feature::ALL
            .iter()
            .map(|&feature| {
                let column = vectors.iter().map(|v| v[feature]);
                let mean = column.clone().sum::<T>() / n;
                let ss: T = column.clone().map(|x| (x - mean) * (x - mean)).sum();
                let std = (ss / (n - T::one())).sqrt();
                let min = column.clone().fold(T::infinity(), T::min);
                let max = column.fold(T::neg_infinity(), T::max);
                if !(std > T::zero()) || !(min < max) {
                    return Err(StatsError::DegenerateFeature(feature));
                }
                Ok(FeatureStats {
                    feature,
                    mean,
                    std,
                    min,
                    max,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            features,
            count: vectors.len(),
            source: source.into(),
        })
    }

    /// Checks a deserialized value: fourteen entries in id order, positive
    /// scales and non-empty ranges.
    pub fn check(&self) -> Result<(), StatsError> {
        if self.features.len() != FEATURE_COUNT
            || self
                .features
                .iter()
                .zip(Feature::ALL)
                .any(|(s, f)| s.feature != f)
        {
            return Err(StatsError::MalformedStats(self.features.len()));
        }
        for s in &self.features {
            if !(s.std > T::zero()) || !(s.min < s.max) {
                return Err(StatsError::DegenerateFeature(s.feature));
            }
        }
        Ok(())
    }

    pub fn get(&self, feature: Feature) -> &FeatureStats<T> {
        &self.features[feature.index()]
    }

    pub fn mean_vector(&self) -> FeatureVector<T> {
        FeatureVector::new(Feature::ALL.map(|f| self.get(f).mean))
    }

    /// `(v - mean) / std` per coordinate.
    pub fn standardize(&self, v: &FeatureVector<T>) -> [T; FEATURE_COUNT] {
        Feature::ALL.map(|f| {
            let s = self.get(f);
            (v[f] - s.mean) / s.std
        })
    }

    /// Inverse of [`standardize`](Self::standardize) with no rounding.
    pub fn destandardize_raw(&self, u: &[T; FEATURE_COUNT]) -> FeatureVector<T> {
        FeatureVector::new(Feature::ALL.map(|f| {
            let s = self.get(f);
            u[f.index()] * s.std + s.mean
        }))
    }

    /// Inverse of [`standardize`](Self::standardize); count features are
    /// rounded to the nearest integer and clamped at zero.
    pub fn destandardize(&self, u: &[T; FEATURE_COUNT]) -> FeatureVector<T> {
        let mut v = self.destandardize_raw(u);
        for f in Feature::ALL {
            if f.kind() == FeatureKind::Integer {
                v[f] = v[f].round().max(T::zero());
            }
        }
        v
    }

    /// Training-set range `M_i - m_i`.
    pub fn range(&self, feature: Feature) -> T {
        let s = self.get(feature);
        s.max - s.min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_with(t_word: f64, other: f64) -> FeatureVector<f64> {
        let mut v = FeatureVector::new([other; FEATURE_COUNT]);
        v[Feature::TWord] = t_word;
        v
    }

    #[test]
    fn two_vector_fit() {
        let s =
            StandardizationStats::fit(&[vec_with(10.0, 1.0), vec_with(20.0, 3.0)], "t").unwrap();
        let w = s.get(Feature::TWord);
        assert_eq!(w.mean, 15.0);
        assert!((w.std - 50f64.sqrt()).abs() < 1e-12);
        assert!((w.std - 7.0710678).abs() < 1e-6);
        assert_eq!((w.min, w.max), (10.0, 20.0));
        assert_eq!(s.count, 2);
        s.check().unwrap();
    }

    #[test]
    fn single_vector_is_rejected() {
        assert_eq!(
            StandardizationStats::fit(&[vec_with(1.0, 1.0)], "t"),
            Err(StatsError::TooFewVectors(1))
        );
    }

    #[test]
    fn constant_column_is_degenerate() {
        let r = StandardizationStats::fit(&[vec_with(1.0, 2.0), vec_with(2.0, 2.0)], "t");
        assert_eq!(r, Err(StatsError::DegenerateFeature(Feature::NNoun)));
    }

    #[test]
    fn standardize_round_trip_and_shift() {
        let s = StandardizationStats::fit(
            &[
                vec_with(10.0, 1.0),
                vec_with(20.0, 3.0),
                vec_with(33.0, 2.5),
            ],
            "t",
        )
        .unwrap();
        assert!(s
            .standardize(&s.mean_vector())
            .iter()
            .all(|z| z.abs() < 1e-12));

        let v = vec_with(17.0, 2.0);
        let mut u = s.standardize(&v);
        assert_eq!(s.destandardize(&u), v);
        u[Feature::Ttr.index()] += 1.0;
        let shifted = s.destandardize_raw(&u);
        let expect = v[Feature::Ttr] + s.get(Feature::Ttr).std;
        assert!((shifted[Feature::Ttr] - expect).abs() < 1e-12);
    }

    #[test]
    fn destandardize_rounds_and_clamps_counts() {
        let s = StandardizationStats::fit(&[vec_with(0.0, 0.0), vec_with(10.0, 1.0)], "t").unwrap();
        let mut u = s.standardize(&vec_with(4.0, 0.5));
        u[Feature::TWord.index()] += 0.04 / s.get(Feature::TWord).std;
        u[Feature::NNoun.index()] = -100.0;
        u[Feature::Ttr.index()] = -100.0;
        let v = s.destandardize(&u);
        assert_eq!(v[Feature::TWord], 4.0);
        assert_eq!(v[Feature::NNoun], 0.0);
        assert!(v[Feature::Ttr] < 0.0, "ratios keep full precision and sign");
    }

    #[test]
    fn json_layout() {
        let s = StandardizationStats::fit(&[vec_with(10.0, 1.0), vec_with(20.0, 3.0)], "corpus")
            .unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["features"][0]["name"], "t_word");
        assert_eq!(json["features"][0]["mean"], 15.0);
        assert_eq!(json["count"], 2);
        assert_eq!(json["source"], "corpus");
        let back: StandardizationStats<f64> = serde_json::from_value(json).unwrap();
        back.check().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn check_rejects_reordered_features() {
        let mut s =
            StandardizationStats::fit(&[vec_with(10.0, 1.0), vec_with(20.0, 3.0)], "c").unwrap();
        s.features.swap(0, 1);
        assert_eq!(s.check(), Err(StatsError::MalformedStats(14)));
    }
}
