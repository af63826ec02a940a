//! Offline endpoints: a canned responder and a constructive oracle that
//! writes text hitting every requested count exactly.

use crate::controls::ControlVector;
use crate::dataset::{parse_tags, Prompt};
use crate::error::ClientError;
use crate::feature::Feature;

use super::Transport;

/// Answers every prompt with the same text.
#[derive(Clone, Debug)]
pub struct CannedTransport {
    response: String,
}

impl CannedTransport {
    pub fn new(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
        }
    }
}

impl Transport for CannedTransport {
    fn send(&self, _prompt: &Prompt) -> Result<String, ClientError> {
        Ok(self.response.clone())
    }

    fn simulated(&self) -> bool {
        true
    }
}

/// Reads the control tags from the prompt and answers with
/// [`constructive_mock`] text.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConstructiveTransport;

impl Transport for ConstructiveTransport {
    fn send(&self, prompt: &Prompt) -> Result<String, ClientError> {
        constructive_mock(&parse_tags(&prompt.user))
    }

    fn simulated(&self) -> bool {
        true
    }
}

const NOUNS: &[&str] = &[
    "cat", "dog", "tree", "river", "book", "garden", "house", "window", "city", "teacher",
];
const VERBS: &[&str] = &[
    "run", "jump", "write", "build", "explain", "visit", "carry", "teach",
];
const ADJECTIVES: &[&str] = &["big", "small", "happy", "green", "quick", "bright", "calm"];
const OTHERS: &[&str] = &["the", "very", "often", "here", "then", "with", "and", "not"];

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// Invented stem `i`: "vo" followed by two or more consonant-vowel pairs.
fn synthetic_stem(mut i: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut s = String::from("vo");
    for _ in 0..2 {
        let d = i % base;
        s.push(CONSONANTS[d / VOWELS.len()] as char);
        s.push(VOWELS[d % VOWELS.len()] as char);
        i /= base;
    }
    while i > 0 {
        let d = i % base;
        s.push(CONSONANTS[d / VOWELS.len()] as char);
        s.push(VOWELS[d % VOWELS.len()] as char);
        i /= base;
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum WordClass {
    Noun,
    Verb,
    Adjective,
    Other,
}

impl WordClass {
    fn real(self) -> &'static [&'static str] {
        match self {
            WordClass::Noun => NOUNS,
            WordClass::Verb => VERBS,
            WordClass::Adjective => ADJECTIVES,
            WordClass::Other => OTHERS,
        }
    }

    /// Suffix the bundled tagger maps to this class.
    fn suffix(self) -> &'static str {
        match self {
            WordClass::Noun => "ness",
            WordClass::Verb => "ize",
            WordClass::Adjective => "ous",
            WordClass::Other => "ly",
        }
    }

    /// The `i`-th distinct word of this class.
    fn word(self, i: usize) -> String {
        let real = self.real();
        if i < real.len() {
            real[i].to_string()
        } else {
            format!("{}{}", synthetic_stem(i - real.len()), self.suffix())
        }
    }
}

/// `(total, unique)` occurrences for one word class.
type Pair = (u64, u64);

fn unconstructible(msg: impl Into<String>) -> ClientError {
    ClientError::Unconstructible(msg.into())
}

fn count_target(controls: &ControlVector<f64>, f: Feature) -> Result<Option<u64>, ClientError> {
    match controls.get(f) {
        None => Ok(None),
        Some(v) if v >= 0.0 && v.fract() == 0.0 && v.is_finite() => Ok(Some(v as u64)),
        Some(v) => Err(unconstructible(format!(
            "{f} = {v} is not a non-negative integer"
        ))),
    }
}

/// Chooses totals and unique counts for nouns, verbs, adjectives and other
/// words that meet every fixed target.
fn solve(controls: &ControlVector<f64>) -> Result<[Pair; 4], ClientError> {
    let words = count_target(controls, Feature::TWord)?;
    let uniques = count_target(controls, Feature::TUword)?;
    let classes = [
        (Feature::NNoun, Feature::NUnoun),
        (Feature::NVerb, Feature::NUverb),
        (Feature::NAdj, Feature::NUadj),
    ];
    let mut given = [(None, None); 3];
    let mut pairs: [Pair; 3] = [(0, 0); 3];
    for (c, &(total_f, unique_f)) in classes.iter().enumerate() {
        let n = count_target(controls, total_f)?;
        let u = count_target(controls, unique_f)?;
        given[c] = (n, u);
        pairs[c] = match (n, u) {
            (Some(n), Some(u)) => {
                if u > n || (n > 0 && u == 0) {
                    return Err(unconstructible(format!(
                        "{total_f} = {n} with {unique_f} = {u}"
                    )));
                }
                (n, u)
            }
            (Some(n), None) => (n, n.min(1)),
            (None, Some(u)) => (u, u),
            (None, None) => (0, 0),
        };
    }
    if words == Some(0) || uniques == Some(0) {
        return Err(unconstructible("text needs at least one word"));
    }
    let sum_n = |p: &[Pair; 3]| p.iter().map(|x| x.0).sum::<u64>();
    let sum_u = |p: &[Pair; 3]| p.iter().map(|x| x.1).sum::<u64>();

    let other: Pair = match (words, uniques) {
        (None, None) => {
            let o = u64::from(sum_n(&pairs) == 0);
            (o, o)
        }
        (Some(t), None) => {
            let sn = sum_n(&pairs);
            if sn > t {
                return Err(unconstructible(format!(
                    "t_word = {t} below tagged words {sn}"
                )));
            }
            let o = t - sn;
            (o, o.min(1))
        }
        (None, Some(u)) => {
            let su = sum_u(&pairs);
            if su > u {
                return Err(unconstructible(format!(
                    "t_uword = {u} below unique tagged words {su}"
                )));
            }
            (u - su, u - su)
        }
        (Some(t), Some(u)) => {
            if u > t {
                return Err(unconstructible(format!(
                    "t_uword = {u} exceeds t_word = {t}"
                )));
            }
            let (sn, su) = (sum_n(&pairs), sum_u(&pairs));
            if sn > t || su > u {
                return Err(unconstructible("word totals below the tagged counts"));
            }
            let mut o = t - sn;
            let mut uo = u - su;
            // Too many distinct words for the free slots: make more of the
            // tagged words distinct.
            let mut need = uo.saturating_sub(o);
            for c in 0..3 {
                if need == 0 {
                    break;
                }
                if given[c].1.is_none() {
                    let room = pairs[c].0 - pairs[c].1;
                    let add = room.min(need);
                    pairs[c].1 += add;
                    need -= add;
                }
            }
            if need > 0 {
                return Err(unconstructible("unique-word target cannot be met"));
            }
            uo = u - sum_u(&pairs);
            // Leftover words but no distinct word to spend them on: repeat a
            // tagged word whose total is free.
            if o > 0 && uo == 0 {
                let sink = (0..3).find(|&c| given[c].0.is_none() && pairs[c].1 > 0);
                match sink {
                    Some(c) => {
                        pairs[c].0 += o;
                        o = 0;
                    }
                    None => return Err(unconstructible("repeated words have no class to go to")),
                }
            }
            (o, uo)
        }
    };
    Ok([pairs[0], pairs[1], pairs[2], other])
}

/// Writes text whose count features equal every count target in `controls`
/// when measured by the bundled extractor. Non-count targets are ignored.
pub fn constructive_mock(controls: &ControlVector<f64>) -> Result<String, ClientError> {
    let plan = solve(controls)?;
    let classes = [
        WordClass::Noun,
        WordClass::Verb,
        WordClass::Adjective,
        WordClass::Other,
    ];
    let mut words: Vec<String> = Vec::new();
    for (class, &(total, unique)) in classes.iter().zip(plan.iter()) {
        for i in 0..unique {
            words.push(class.word(i as usize));
        }
        for _ in unique..total {
            words.push(class.word(0));
        }
    }
    let mut text = words.join(" ");
    text.push('.');
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lingfeat::{extract_features, Extractor, LexiconTagger, Pos};
    use proptest::prelude::*;

    fn controls(pairs: &[(Feature, f64)]) -> ControlVector<f64> {
        ControlVector::from_pairs(pairs.iter().copied())
    }

    fn assert_satisfied(c: &ControlVector<f64>) {
        let text = constructive_mock(c).unwrap();
        let v = extract_features(&text).unwrap();
        for &(f, target) in c.entries() {
            if f.is_count() {
                assert_eq!(v[f], target, "{f} in {text:?}");
            }
        }
    }

    #[test]
    fn word_count_only() {
        let c = controls(&[(Feature::TWord, 7.0)]);
        assert_satisfied(&c);
        let text = constructive_mock(&c).unwrap();
        assert_eq!(extract_features(&text).unwrap()[Feature::TWord], 7.0);
    }

    #[test]
    fn nouns_with_repeats() {
        assert_satisfied(&controls(&[(Feature::NNoun, 3.0), (Feature::NUnoun, 2.0)]));
    }

    #[test]
    fn impossible_counts() {
        let c = controls(&[(Feature::TUword, 5.0), (Feature::TWord, 3.0)]);
        assert!(matches!(
            constructive_mock(&c),
            Err(ClientError::Unconstructible(_))
        ));
        let c = controls(&[(Feature::NNoun, 2.0), (Feature::NUnoun, 0.0)]);
        assert!(constructive_mock(&c).is_err());
        let c = controls(&[(Feature::TWord, 2.5)]);
        assert!(constructive_mock(&c).is_err());
    }

    #[test]
    fn non_count_targets_are_ignored() {
        assert_satisfied(&controls(&[
            (Feature::TWord, 4.0),
            (Feature::Fkre, 50.0),
            (Feature::Ttr, 0.3),
        ]));
    }

    #[test]
    fn all_eight_counts() {
        assert_satisfied(&controls(&[
            (Feature::TWord, 40.0),
            (Feature::NNoun, 10.0),
            (Feature::NVerb, 6.0),
            (Feature::NAdj, 4.0),
            (Feature::TUword, 25.0),
            (Feature::NUnoun, 7.0),
            (Feature::NUverb, 5.0),
            (Feature::NUadj, 2.0),
        ]));
    }

    #[test]
    fn unique_words_pushed_into_free_classes() {
        // 10 words, 9 distinct, 8 nouns: only one free slot for other words,
        // so the nouns must be mostly distinct.
        assert_satisfied(&controls(&[
            (Feature::TWord, 10.0),
            (Feature::TUword, 9.0),
            (Feature::NNoun, 8.0),
        ]));
        // Spare words with no distinct budget are absorbed by the verbs.
        assert_satisfied(&controls(&[
            (Feature::TWord, 10.0),
            (Feature::TUword, 2.0),
            (Feature::NUnoun, 1.0),
            (Feature::NUverb, 1.0),
        ]));
    }

    #[test]
    fn word_banks_tag_as_intended() {
        let tagger = LexiconTagger::new();
        let mut seen = std::collections::HashSet::new();
        for (class, pos) in [
            (WordClass::Noun, Pos::Noun),
            (WordClass::Verb, Pos::Verb),
            (WordClass::Adjective, Pos::Adjective),
            (WordClass::Other, Pos::Other),
        ] {
            for i in 0..3000 {
                let w = class.word(i);
                assert_eq!(tagger.tag_word(&w), pos, "{w}");
                assert!(seen.insert(w.clone()), "duplicate {w}");
                assert_eq!(crate::lingfeat::tokenize(&w).len(), 1);
            }
        }
    }

    #[test]
    fn transports() {
        let p = crate::dataset::render_prompt("Write.", "", &controls(&[(Feature::TWord, 3.0)]));
        let text = ConstructiveTransport.send(&p).unwrap();
        let v = Extractor::default().extract(&text).unwrap();
        assert_eq!(v[Feature::TWord], 3.0);
        assert_eq!(CannedTransport::new("fixed").send(&p).unwrap(), "fixed");
    }

    /// Counts of a text with the given (unique, extra repeats) per class.
    fn valid_counts() -> impl Strategy<Value = [u64; 8]> {
        (
            proptest::array::uniform3((0u64..10, 0u64..10)),
            (1u64..10, 0u64..10),
        )
            .prop_map(|(tagged, other)| {
                let pair = |(u, r): (u64, u64)| (u + if u > 0 { r } else { 0 }, u);
                let c = tagged.map(pair);
                let o = pair(other);
                let t = c.iter().map(|x| x.0).sum::<u64>() + o.0;
                let u = c.iter().map(|x| x.1).sum::<u64>() + o.1;
                [t, c[0].0, c[1].0, c[2].0, u, c[0].1, c[1].1, c[2].1]
            })
    }

    proptest! {
        #[test]
        fn realizable_subsets_are_satisfied(counts in valid_counts(), mask in 1u8..=255) {
            let pairs: Vec<(Feature, f64)> = Feature::COUNTS
                .iter()
                .zip(counts.iter())
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (&f, &v))| (f, v as f64))
                .collect();
            let c = controls(&pairs);
            let text = constructive_mock(&c).unwrap();
            let v = extract_features(&text).unwrap();
            for &(f, target) in c.entries() {
                prop_assert_eq!(v[f], target);
            }
        }
    }
}
