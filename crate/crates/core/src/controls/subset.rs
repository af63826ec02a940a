use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::SamplingError;
use crate::feature::{Feature, FeatureVector, FEATURE_COUNT};
use crate::scalar::Scalar;

/// A non-empty set of features, kept in id order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Feature>", into = "Vec<Feature>")]
pub struct ControlSubset {
    features: Vec<Feature>,
}

impl ControlSubset {
    pub fn new(mut features: Vec<Feature>) -> Result<Self, SamplingError> {
        features.sort();
        features.dedup();
        if features.is_empty() {
            return Err(SamplingError::SubsetSize(0));
        }
        Ok(Self { features })
    }

    pub fn all() -> Self {
        Self {
            features: Feature::ALL.to_vec(),
        }
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn contains(&self, feature: Feature) -> bool {
        self.features.binary_search(&feature).is_ok()
    }

    /// A uniformly random subset of exactly `n` features.
    pub fn sample_exact<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, SamplingError> {
        if n == 0 || n > FEATURE_COUNT {
            return Err(SamplingError::SubsetSize(n));
        }
        let picked = index::sample(rng, FEATURE_COUNT, n)
            .into_iter()
            .map(|i| Feature::ALL[i])
            .collect();
        Self::new(picked)
    }
}

impl TryFrom<Vec<Feature>> for ControlSubset {
    type Error = SamplingError;

    fn try_from(features: Vec<Feature>) -> Result<Self, Self::Error> {
        Self::new(features)
    }
}

impl From<ControlSubset> for Vec<Feature> {
    fn from(s: ControlSubset) -> Self {
        s.features
    }
}

/// Draws `n ~ Uniform{1..=m}`, then a uniform size-`n` subset of all features.
pub fn sample_subset<R: Rng + ?Sized>(
    m: usize,
    rng: &mut R,
) -> Result<ControlSubset, SamplingError> {
    if m == 0 || m > FEATURE_COUNT {
        return Err(SamplingError::SubsetSize(m));
    }
    let n = rng.random_range(1..=m);
    ControlSubset::sample_exact(n, rng)
}

/// Feature targets for a subset, in id order.
///
/// Serialized as a JSON object `{name: value}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlVector<T> {
    entries: Vec<(Feature, T)>,
}

impl<T: Scalar> ControlVector<T> {
    /// Builds from arbitrary pairs; sorted by id, last value wins on duplicates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Feature, T)>) -> Self {
        let mut entries: Vec<(Feature, T)> = Vec::new();
        for (f, v) in pairs {
            match entries.iter_mut().find(|(g, _)| *g == f) {
                Some(slot) => slot.1 = v,
                None => entries.push((f, v)),
            }
        }
        entries.sort_by_key(|(f, _)| *f);
        Self { entries }
    }

    pub fn empty() -> Self {
        Self { entries: vec![] }
    }

    pub fn entries(&self) -> &[(Feature, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, feature: Feature) -> Option<T> {
        self.entries
            .iter()
            .find(|(f, _)| *f == feature)
            .map(|(_, v)| *v)
    }

    pub fn subset(&self) -> Option<ControlSubset> {
        ControlSubset::new(self.entries.iter().map(|(f, _)| *f).collect()).ok()
    }
}

/// Selects the features of `subset` from a full vector.
pub fn project<T: Scalar>(v: &FeatureVector<T>, subset: &ControlSubset) -> ControlVector<T> {
    ControlVector {
        entries: subset.features().iter().map(|&f| (f, v[f])).collect(),
    }
}

impl<T: Serialize> Serialize for ControlVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (f, v) in &self.entries {
            map.serialize_entry(f.name(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for ControlVector<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ControlsVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Scalar + Deserialize<'de>> Visitor<'de> for ControlsVisitor<T> {
            type Value = ControlVector<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object of feature targets")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut pairs = Vec::new();
                while let Some((key, value)) = access.next_entry::<String, T>()? {
                    let f: Feature = key.parse().map_err(de::Error::custom)?;
                    pairs.push((f, value));
                }
                Ok(ControlVector::from_pairs(pairs))
            }
        }

        deserializer.deserialize_map(ControlsVisitor(std::marker::PhantomData))
    }
}
