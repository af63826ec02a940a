use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::FeatureError;
use crate::feature::{Feature, FeatureVector, FKRE_MAX_FRACTION};
use crate::scalar::Scalar;

/// One consistency rule over a full feature vector, in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    WordsPositive,
    WordsCoverTaggedWords,
    WordsCoverUniqueWords,
    NounsNonNegative,
    NounsCoverUniqueNouns,
    VerbsNonNegative,
    VerbsCoverUniqueVerbs,
    AdjectivesNonNegative,
    AdjectivesCoverUniqueAdjectives,
    UniqueWordsPositive,
    UniqueWordsCoverUniqueTagged,
    UniqueNounsNonNegative,
    UniqueVerbsNonNegative,
    UniqueAdjectivesNonNegative,
    FkreBounded,
}

impl Rule {
    pub const ALL: [Rule; 15] = [
        Rule::WordsPositive,
        Rule::WordsCoverTaggedWords,
        Rule::WordsCoverUniqueWords,
        Rule::NounsNonNegative,
        Rule::NounsCoverUniqueNouns,
        Rule::VerbsNonNegative,
        Rule::VerbsCoverUniqueVerbs,
        Rule::AdjectivesNonNegative,
        Rule::AdjectivesCoverUniqueAdjectives,
        Rule::UniqueWordsPositive,
        Rule::UniqueWordsCoverUniqueTagged,
        Rule::UniqueNounsNonNegative,
        Rule::UniqueVerbsNonNegative,
        Rule::UniqueAdjectivesNonNegative,
        Rule::FkreBounded,
    ];

    /// Machine-readable identifier, the rule written out as an inequality.
    pub fn id(self) -> &'static str {
        match self {
            Rule::WordsPositive => "t_word > 0",
            Rule::WordsCoverTaggedWords => "t_word >= n_noun + n_verb + n_adj",
            Rule::WordsCoverUniqueWords => "t_word >= t_uword",
            Rule::NounsNonNegative => "n_noun >= 0",
            Rule::NounsCoverUniqueNouns => "n_noun >= n_unoun",
            Rule::VerbsNonNegative => "n_verb >= 0",
            Rule::VerbsCoverUniqueVerbs => "n_verb >= n_uverb",
            Rule::AdjectivesNonNegative => "n_adj >= 0",
            Rule::AdjectivesCoverUniqueAdjectives => "n_adj >= n_uadj",
            Rule::UniqueWordsPositive => "t_uword > 0",
            Rule::UniqueWordsCoverUniqueTagged => "t_uword >= n_unoun + n_uverb + n_uadj",
            Rule::UniqueNounsNonNegative => "n_unoun >= 0",
            Rule::UniqueVerbsNonNegative => "n_uverb >= 0",
            Rule::UniqueAdjectivesNonNegative => "n_uadj >= 0",
            Rule::FkreBounded => "fkre <= 121.22",
        }
    }

    pub fn from_id(id: &str) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.id() == id)
    }

    pub fn holds<T: Scalar>(self, v: &FeatureVector<T>) -> bool {
        use Feature::*;
        let zero = T::zero();
        match self {
            Rule::WordsPositive => v[TWord] > zero,
            Rule::WordsCoverTaggedWords => v[TWord] >= v[NNoun] + v[NVerb] + v[NAdj],
            Rule::WordsCoverUniqueWords => v[TWord] >= v[TUword],
            Rule::NounsNonNegative => v[NNoun] >= zero,
            Rule::NounsCoverUniqueNouns => v[NNoun] >= v[NUnoun],
            Rule::VerbsNonNegative => v[NVerb] >= zero,
            Rule::VerbsCoverUniqueVerbs => v[NVerb] >= v[NUverb],
            Rule::AdjectivesNonNegative => v[NAdj] >= zero,
            Rule::AdjectivesCoverUniqueAdjectives => v[NAdj] >= v[NUadj],
            Rule::UniqueWordsPositive => v[TUword] > zero,
            Rule::UniqueWordsCoverUniqueTagged => v[TUword] >= v[NUnoun] + v[NUverb] + v[NUadj],
            Rule::UniqueNounsNonNegative => v[NUnoun] >= zero,
            Rule::UniqueVerbsNonNegative => v[NUverb] >= zero,
            Rule::UniqueAdjectivesNonNegative => v[NUadj] >= zero,
            Rule::FkreBounded => {
                v[Fkre] <= T::from_fraction(FKRE_MAX_FRACTION.0, FKRE_MAX_FRACTION.1)
            }
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub violations: Vec<Rule>,
}

impl ValidityReport {
    pub fn violation_ids(&self) -> Vec<&'static str> {
        self.violations.iter().map(|r| r.id()).collect()
    }
}

/// Checks every rule and reports all that fail, in rule order.
pub fn validate<T: Scalar>(v: &FeatureVector<T>) -> ValidityReport {
    let violations: Vec<Rule> = Rule::ALL.iter().copied().filter(|r| !r.holds(v)).collect();
    ValidityReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// Quick predicate form of [`validate`].
pub fn is_valid<T: Scalar>(v: &FeatureVector<T>) -> bool {
    Rule::ALL.iter().all(|r| r.holds(v))
}

/// Validates a name-keyed vector, failing if any feature is absent.
pub fn validate_named<T: Scalar>(
    entries: &BTreeMap<String, T>,
) -> Result<ValidityReport, FeatureError> {
    let v = FeatureVector::from_named(entries.iter().map(|(k, v)| (k.as_str(), *v)))?;
    Ok(validate(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lingfeat::extract_features;

    fn base() -> FeatureVector<f64> {
        extract_features("The quick brown fox jumps over the lazy dog.").unwrap()
    }

    #[test]
    fn unique_words_exceeding_words() {
        let mut v = base();
        v[Feature::TUword] = v[Feature::TWord] + 1.0;
        let r = validate(&v);
        assert!(!r.valid);
        assert_eq!(r.violation_ids(), vec!["t_word >= t_uword"]);
    }

    #[test]
    fn fkre_above_bound() {
        let mut v = base();
        v[Feature::Fkre] = 130.0;
        let r = validate(&v);
        assert_eq!(r.violations, vec![Rule::FkreBounded]);
        v[Feature::Fkre] = 121.22;
        assert!(validate(&v).valid);
        v[Feature::Fkre] = f64::NAN;
        assert!(!validate(&v).valid);
    }

    #[test]
    fn extractor_output_is_valid() {
        assert!(validate(&base()).valid);
        assert!(validate(&extract_features("Hi.").unwrap()).valid);
    }

    #[test]
    fn reports_every_violation_in_order() {
        let v = FeatureVector::<f64>::zeros();
        let r = validate(&v);
        assert_eq!(
            r.violations,
            vec![Rule::WordsPositive, Rule::UniqueWordsPositive]
        );
        let mut w = base();
        w[Feature::NUadj] = -1.0;
        w[Feature::NNoun] = 100.0;
        assert_eq!(
            validate(&w).violations,
            vec![
                Rule::WordsCoverTaggedWords,
                Rule::UniqueAdjectivesNonNegative
            ]
        );
    }

    #[test]
    fn missing_feature_in_named_input() {
        let mut m: BTreeMap<String, f64> = BTreeMap::new();
        for (f, x) in base().iter() {
            if f != Feature::Fkre {
                m.insert(f.name().to_string(), x);
            }
        }
        assert_eq!(
            validate_named(&m),
            Err(FeatureError::MissingFeature(Feature::Fkre))
        );
        m.insert("fkre".into(), 50.0);
        assert!(validate_named(&m).unwrap().valid);
    }

    #[test]
    fn rule_ids_round_trip() {
        for r in Rule::ALL {
            assert_eq!(Rule::from_id(r.id()), Some(r));
        }
    }
}
