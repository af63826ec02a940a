//! The fourteen linguistic features and the vector type that holds them.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::FeatureError;
use crate::scalar::Scalar;

/// Number of features in a full vector.
pub const FEATURE_COUNT: usize = 14;

/// Largest attainable Flesch reading-ease score, as the exact fraction 6061/50.
pub const FKRE_MAX_FRACTION: (i128, i128) = (6061, 50);

/// Upper bound on `fkre` in `f64`.
pub const FKRE_MAX: f64 = 121.22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureKind {
    /// Non-negative count.
    Integer,
    /// Quotient of two counts.
    Ratio,
    Real,
}

/// A Table-style feature identifier. Declaration order is id order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    TWord,
    NNoun,
    NVerb,
    NAdj,
    TUword,
    NUnoun,
    NUverb,
    NUadj,
    Ttr,
    NounVar,
    VerbVar,
    AdjVar,
    Fkre,
    RtAverage,
}

impl Feature {
    pub const ALL: [Feature; FEATURE_COUNT] = [
        Feature::TWord,
        Feature::NNoun,
        Feature::NVerb,
        Feature::NAdj,
        Feature::TUword,
        Feature::NUnoun,
        Feature::NUverb,
        Feature::NUadj,
        Feature::Ttr,
        Feature::NounVar,
        Feature::VerbVar,
        Feature::AdjVar,
        Feature::Fkre,
        Feature::RtAverage,
    ];

    /// The eight count features.
    pub const COUNTS: [Feature; 8] = [
        Feature::TWord,
        Feature::NNoun,
        Feature::NVerb,
        Feature::NAdj,
        Feature::TUword,
        Feature::NUnoun,
        Feature::NUverb,
        Feature::NUadj,
    ];

    /// Zero-based position in a [`FeatureVector`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based identifier, 1..=14.
    pub fn id(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_id(id: u8) -> Option<Feature> {
        id.checked_sub(1)
            .and_then(|i| Feature::ALL.get(i as usize).copied())
    }

    pub fn from_index(index: usize) -> Option<Feature> {
        Feature::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::TWord => "t_word",
            Feature::NNoun => "n_noun",
            Feature::NVerb => "n_verb",
            Feature::NAdj => "n_adj",
            Feature::TUword => "t_uword",
            Feature::NUnoun => "n_unoun",
            Feature::NUverb => "n_uverb",
            Feature::NUadj => "n_uadj",
            Feature::Ttr => "ttr",
            Feature::NounVar => "noun_var",
            Feature::VerbVar => "verb_var",
            Feature::AdjVar => "adj_var",
            Feature::Fkre => "fkre",
            Feature::RtAverage => "rt_average",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Feature::TWord => "number of words",
            Feature::NNoun => "number of nouns",
            Feature::NVerb => "number of verbs",
            Feature::NAdj => "number of adjectives",
            Feature::TUword => "number of unique words",
            Feature::NUnoun => "number of unique nouns",
            Feature::NUverb => "number of unique verbs",
            Feature::NUadj => "number of unique adjectives",
            Feature::Ttr => "type-token ratio",
            Feature::NounVar => "noun variation",
            Feature::VerbVar => "verb variation",
            Feature::AdjVar => "adjective variation",
            Feature::Fkre => "Flesch-Kincaid reading ease",
            Feature::RtAverage => "average reading time",
        }
    }

    pub fn kind(self) -> FeatureKind {
        match self {
            Feature::TWord
            | Feature::NNoun
            | Feature::NVerb
            | Feature::NAdj
            | Feature::TUword
            | Feature::NUnoun
            | Feature::NUverb
            | Feature::NUadj => FeatureKind::Integer,
            Feature::Ttr | Feature::NounVar | Feature::VerbVar | Feature::AdjVar => {
                FeatureKind::Ratio
            }
            Feature::Fkre | Feature::RtAverage => FeatureKind::Real,
        }
    }

    pub fn is_count(self) -> bool {
        self.kind() == FeatureKind::Integer
    }

    /// Hard `(lower, upper)` bounds, where they exist.
    pub fn hard_bounds(self) -> (Option<f64>, Option<f64>) {
        match self.kind() {
            FeatureKind::Integer => (Some(0.0), None),
            FeatureKind::Ratio => (Some(0.0), Some(1.0)),
            FeatureKind::Real if self == Feature::Fkre => (None, Some(FKRE_MAX)),
            FeatureKind::Real => (Some(0.0), None),
        }
    }

    pub fn spec(self) -> FeatureSpec {
        FeatureSpec {
            id: self.id(),
            name: self.name(),
            description: self.description(),
            kind: self.kind(),
            hard_bounds: self.hard_bounds(),
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| FeatureError::UnknownFeature(s.to_string()))
    }
}

impl Serialize for Feature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Feature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Static description of one feature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureSpec {
    pub id: u8,
    pub name: &'static str,
    pub description: &'static str,
    pub kind: FeatureKind,
    pub hard_bounds: (Option<f64>, Option<f64>),
}

/// Catalogue of all fourteen features in id order.
pub fn feature_specs() -> [FeatureSpec; FEATURE_COUNT] {
    Feature::ALL.map(Feature::spec)
}

/// A full vector of feature values, indexed by [`Feature`].
///
/// Serialized as a JSON object `{name: value}` in id order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureVector<T> {
    values: [T; FEATURE_COUNT],
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(values: [T; FEATURE_COUNT]) -> Self {
        Self { values }
    }

    pub fn zeros() -> Self {
        Self::new([T::zero(); FEATURE_COUNT])
    }

    pub fn values(&self) -> &[T; FEATURE_COUNT] {
        &self.values
    }

    pub fn get(&self, feature: Feature) -> T {
        self.values[feature.index()]
    }

    pub fn set(&mut self, feature: Feature, value: T) {
        self.values[feature.index()] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Feature, T)> + '_ {
        Feature::ALL
            .iter()
            .map(move |&f| (f, self.values[f.index()]))
    }

    /// Builds a vector from a name-keyed map; every feature must be present.
    pub fn from_named<'a, I>(entries: I) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = (&'a str, T)>,
    {
        let mut slots: [Option<T>; FEATURE_COUNT] = [None; FEATURE_COUNT];
        for (name, value) in entries {
            let feature: Feature = name.parse()?;
            slots[feature.index()] = Some(value);
        }
        let mut values = [T::zero(); FEATURE_COUNT];
        for (i, slot) in slots.iter().enumerate() {
            values[i] = slot.ok_or(FeatureError::MissingFeature(Feature::ALL[i]))?;
        }
        Ok(Self::new(values))
    }

    /// Converts every coordinate to another scalar type.
    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> FeatureVector<U> {
        FeatureVector::new(self.values.map(f))
    }

    pub fn to_f64(&self) -> FeatureVector<f64> {
        self.map(Scalar::to_f64_lossy)
    }
}

impl<T> Index<Feature> for FeatureVector<T> {
    type Output = T;

    fn index(&self, feature: Feature) -> &T {
        &self.values[feature.index()]
    }
}

impl<T> IndexMut<Feature> for FeatureVector<T> {
    fn index_mut(&mut self, feature: Feature) -> &mut T {
        &mut self.values[feature.index()]
    }
}

impl<T: Serialize> Serialize for FeatureVector<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(FEATURE_COUNT))?;
        for (feature, value) in Feature::ALL.iter().zip(self.values.iter()) {
            map.serialize_entry(feature.name(), value)?;
        }
        map.end()
    }
}

impl<'de, T> Deserialize<'de> for FeatureVector<T>
where
    T: Scalar + Deserialize<'de>,
{
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VectorVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Scalar + Deserialize<'de>> Visitor<'de> for VectorVisitor<T> {
            type Value = FeatureVector<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object with all fourteen feature values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut entries: BTreeMap<String, T> = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, T>()? {
                    entries.insert(key, value);
                }
                FeatureVector::from_named(entries.iter().map(|(k, v)| (k.as_str(), *v)))
                    .map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_map(VectorVisitor(std::marker::PhantomData))
    }
}
