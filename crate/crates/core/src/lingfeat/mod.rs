//! Text analysis: tokenization, tagging, syllables, sentences and the
//! fourteen-feature extractor.

mod sentence;
mod syllable;
mod tagger;
mod tokenize;

use std::collections::HashMap;

pub use sentence::count_sentences;
pub use syllable::count_syllables;
pub use tagger::{LexiconTagger, PosTagger};
pub use tokenize::{tokenize, Pos, Token, TokenKind};

use crate::error::ExtractError;
use crate::feature::{Feature, FeatureVector};
use crate::scalar::Scalar;

/// Words per minute assumed by `rt_average`.
pub const READING_SPEED_WPM: u64 = 240;

/// Tagged tokens plus the sentence and syllable totals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzedText {
    pub tokens: Vec<Token>,
    pub sentence_count: u32,
    pub syllable_count: u64,
}

impl AnalyzedText {
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.is_word_like())
    }
}

/// Runs `tagger` over freshly tokenized text; convenience for one-off calls.
pub fn tag_pos(mut tokens: Vec<Token>, tagger: &dyn PosTagger) -> Vec<Token> {
    tagger.tag(&mut tokens);
    tokens
}

/// Flesch reading ease, `206.835 - 1.015 (words/sentences) - 84.6 (syllables/words)`.
///
/// Evaluated as a single exact fraction and rounded once, so the one-word,
/// one-sentence, one-syllable case yields exactly the scalar nearest 121.22.
///
/// # Panics
///
/// If any argument is zero.
pub fn compute_fkre<T: Scalar>(t_word: u64, t_sent: u64, t_syll: u64) -> T {
    assert!(
        t_word > 0 && t_sent > 0 && t_syll > 0,
        "compute_fkre needs positive counts, got ({t_word}, {t_sent}, {t_syll})"
    );
    let (w, s, y) = (t_word as i128, t_sent as i128, t_syll as i128);
    let numer = 206_835 * s * w - 1_015 * w * w - 84_600 * y * s;
    let denom = 1_000 * s * w;
    T::from_fraction(numer, denom)
}

/// Feature extractor over a pluggable tagger. Immutable and shareable.
pub struct Extractor {
    tagger: Box<dyn PosTagger>,
}

impl Default for Extractor {
    fn default() -> Self {
        Self::new(Box::new(LexiconTagger::new()))
    }
}

impl std::fmt::Debug for Extractor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Extractor").finish_non_exhaustive()
    }
}

impl Extractor {
    pub fn new(tagger: Box<dyn PosTagger>) -> Self {
        Self { tagger }
    }

    pub fn analyze(&self, text: &str) -> Result<AnalyzedText, ExtractError> {
        let mut tokens = tokenize(text);
        self.tagger.tag(&mut tokens);
        let sentence_count = count_sentences(&tokens)?;
        let syllable_count = tokens
            .iter()
            .filter(|t| t.is_word_like())
            .map(|t| u64::from(t.syllables))
            .sum();
        Ok(AnalyzedText {
            tokens,
            sentence_count,
            syllable_count,
        })
    }

    pub fn extract(&self, text: &str) -> Result<FeatureVector<f64>, ExtractError> {
        self.extract_as(text)
    }

    /// Extracts all fourteen features in the requested scalar type.
    pub fn extract_as<T: Scalar>(&self, text: &str) -> Result<FeatureVector<T>, ExtractError> {
        let analyzed = self.analyze(text)?;
        Ok(features_from_analysis(&analyzed))
    }
}

#[derive(Default)]
struct PosCounts {
    noun: u64,
    verb: u64,
    adj: u64,
}

impl PosCounts {
    fn bump(&mut self, pos: Pos) {
        match pos {
            Pos::Noun => self.noun += 1,
            Pos::Verb => self.verb += 1,
            Pos::Adjective => self.adj += 1,
            Pos::Other => {}
        }
    }
}

fn ratio<T: Scalar>(numer: u64, denom: u64) -> T {
    if denom == 0 {
        T::zero()
    } else {
        T::from_fraction(numer as i128, denom as i128)
    }
}

/// Computes the feature vector from an analysis with at least one word.
///
/// Uniqueness is over lowercased surfaces. Each distinct surface is credited
/// to the first content tag it received, so the unique noun, verb and
/// adjective counts always partition a subset of the unique words even with a
/// context-sensitive tagger.
pub fn features_from_analysis<T: Scalar>(analyzed: &AnalyzedText) -> FeatureVector<T> {
    let mut totals = PosCounts::default();
    let mut t_word = 0u64;
    let mut first_content: HashMap<String, Pos> = HashMap::new();
    for tok in analyzed.words() {
        t_word += 1;
        totals.bump(tok.pos);
        let entry = first_content
            .entry(tok.surface.to_lowercase())
            .or_insert(Pos::Other);
        if *entry == Pos::Other && tok.pos.is_content() {
            *entry = tok.pos;
        }
    }
    let t_uword = first_content.len() as u64;
    let mut uniques = PosCounts::default();
    for &pos in first_content.values() {
        uniques.bump(pos);
    }

    let mut v = FeatureVector::<T>::zeros();
    v[Feature::TWord] = T::from_count(t_word);
    v[Feature::NNoun] = T::from_count(totals.noun);
    v[Feature::NVerb] = T::from_count(totals.verb);
    v[Feature::NAdj] = T::from_count(totals.adj);
    v[Feature::TUword] = T::from_count(t_uword);
    v[Feature::NUnoun] = T::from_count(uniques.noun);
    v[Feature::NUverb] = T::from_count(uniques.verb);
    v[Feature::NUadj] = T::from_count(uniques.adj);
    v[Feature::Ttr] = ratio(t_uword, t_word);
    v[Feature::NounVar] = ratio(uniques.noun, totals.noun);
    v[Feature::VerbVar] = ratio(uniques.verb, totals.verb);
    v[Feature::AdjVar] = ratio(uniques.adj, totals.adj);
    v[Feature::Fkre] = compute_fkre(
        t_word,
        u64::from(analyzed.sentence_count),
        analyzed.syllable_count,
    );
    v[Feature::RtAverage] = ratio(t_word, READING_SPEED_WPM);
    v
}

/// Extracts features with the bundled lexicon tagger.
pub fn extract_features(text: &str) -> Result<FeatureVector<f64>, ExtractError> {
    Extractor::default().extract(text)
}
