use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::controls::{validate, Rule};
use crate::error::ExtractError;
use crate::feature::FeatureVector;
use crate::lingfeat::Extractor;

use super::load::DatasetExample;

/// Anything that maps a response text to a full feature vector.
pub trait FeatureSource: Sync {
    fn features(&self, text: &str) -> Result<FeatureVector<f64>, ExtractError>;
}

impl FeatureSource for Extractor {
    fn features(&self, text: &str) -> Result<FeatureVector<f64>, ExtractError> {
        self.extract(text)
    }
}

/// An example that survived preprocessing, with its cached `f(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedExample {
    /// Position in the loaded dataset; also the example's RNG stream id.
    pub index: usize,
    pub example: DatasetExample,
    pub features: FeatureVector<f64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DropReason {
    EmptyText,
    InvalidFeatures(Vec<Rule>),
}

impl DropReason {
    pub fn code(&self) -> String {
        match self {
            DropReason::EmptyText => "empty_text".to_string(),
            DropReason::InvalidFeatures(rules) => {
                let ids: Vec<&str> = rules.iter().map(|r| r.id()).collect();
                format!("invalid_features: {}", ids.join("; "))
            }
        }
    }
}

impl Serialize for DropReason {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code())
    }
}

/// One line of the drop report: `{"id", "reason"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DropRecord {
    pub id: String,
    pub reason: DropReason,
}

/// Extracts `f(y)` for every example and drops those that fail extraction
/// or validation. Both outputs keep input order.
pub fn preprocess<S: FeatureSource + ?Sized>(
    examples: &[DatasetExample],
    source: &S,
) -> (Vec<PreparedExample>, Vec<DropRecord>) {
    let results: Vec<Result<PreparedExample, DropRecord>> = examples
        .par_iter()
        .enumerate()
        .map(|(index, example)| {
            let drop = |reason| DropRecord {
                id: example.id.clone(),
                reason,
            };
            let features = match source.features(&example.output) {
                Ok(f) => f,
                Err(ExtractError::EmptyText) => return Err(drop(DropReason::EmptyText)),
            };
            let report = validate(&features);
            if !report.valid {
                return Err(drop(DropReason::InvalidFeatures(report.violations)));
            }
            Ok(PreparedExample {
                index,
                example: example.clone(),
                features,
            })
        })
        .collect();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for r in results {
        match r {
            Ok(p) => kept.push(p),
            Err(d) => dropped.push(d),
        }
    }
    (kept, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::Feature;

    fn ex(id: &str, output: &str) -> DatasetExample {
        DatasetExample {
            id: id.into(),
            instruction: "Do it.".into(),
            input: String::new(),
            output: output.into(),
        }
    }

    #[test]
    fn empty_output_is_dropped() {
        let (kept, dropped) = preprocess(
            &[ex("a", ""), ex("b", "Fine words here.")],
            &Extractor::default(),
        );
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].index, 1);
        assert_eq!(
            dropped,
            vec![DropRecord {
                id: "a".into(),
                reason: DropReason::EmptyText
            }]
        );
        assert_eq!(
            serde_json::to_string(&dropped[0]).unwrap(),
            r#"{"id":"a","reason":"empty_text"}"#
        );
    }

    struct Broken;

    impl FeatureSource for Broken {
        fn features(&self, text: &str) -> Result<FeatureVector<f64>, ExtractError> {
            let mut v = Extractor::default().extract(text)?;
            v[Feature::Fkre] = 150.0;
            Ok(v)
        }
    }

    #[test]
    fn invalid_vector_is_dropped_with_rule() {
        let (kept, dropped) = preprocess(&[ex("z", "Some text.")], &Broken);
        assert!(kept.is_empty());
        assert_eq!(
            dropped[0].reason,
            DropReason::InvalidFeatures(vec![Rule::FkreBounded])
        );
        assert_eq!(dropped[0].reason.code(), "invalid_features: fkre <= 121.22");
    }

    #[test]
    fn clean_example_keeps_features() {
        let (kept, dropped) = preprocess(&[ex("c", "the cat saw the dog")], &Extractor::default());
        assert!(dropped.is_empty());
        assert_eq!(kept[0].features[Feature::TWord], 5.0);
        assert_eq!(kept[0].example.output, "the cat saw the dog");
    }
}
