//! Part-of-speech tagging over the four-way tag set.

use std::collections::HashMap;
use std::sync::LazyLock;

use super::tokenize::{Pos, Token, TokenKind};

/// Assigns a [`Pos`] to every word token in place.
///
/// Implementations must be deterministic and leave non-word tokens as
/// [`Pos::Other`].
pub trait PosTagger: Send + Sync {
    fn tag(&self, tokens: &mut [Token]);
}

const LEXICON_SOURCE: &str = include_str!("lexicon.txt");

static BUNDLED: LazyLock<HashMap<String, Pos>> = LazyLock::new(|| parse_lexicon(LEXICON_SOURCE));

/// Parses `@section` headed word lists. The first tag given to a word wins.
fn parse_lexicon(source: &str) -> HashMap<String, Pos> {
    let mut map = HashMap::new();
    let mut current = Pos::Other;
    for line in source.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(section) = line.strip_prefix('@') {
            current = match section {
                "noun" => Pos::Noun,
                "verb" => Pos::Verb,
                "adjective" => Pos::Adjective,
                _ => Pos::Other,
            };
            continue;
        }
        for word in line.split_whitespace() {
            map.entry(word.to_string()).or_insert(current);
        }
    }
    map
}

// Longest suffixes first; the first match with a long enough stem wins.
const SUFFIX_RULES: &[(&str, Pos)] = &[
    ("ization", Pos::Noun),
    ("ically", Pos::Other),
    ("ation", Pos::Noun),
    ("ition", Pos::Noun),
    ("ness", Pos::Noun),
    ("ment", Pos::Noun),
    ("ship", Pos::Noun),
    ("hood", Pos::Noun),
    ("ance", Pos::Noun),
    ("ence", Pos::Noun),
    ("able", Pos::Adjective),
    ("ible", Pos::Adjective),
    ("less", Pos::Adjective),
    ("ical", Pos::Adjective),
    ("tion", Pos::Noun),
    ("sion", Pos::Noun),
    ("ity", Pos::Noun),
    ("ism", Pos::Noun),
    ("ist", Pos::Noun),
    ("dom", Pos::Noun),
    ("ous", Pos::Adjective),
    ("ful", Pos::Adjective),
    ("ive", Pos::Adjective),
    ("ish", Pos::Adjective),
    ("ary", Pos::Adjective),
    ("ize", Pos::Verb),
    ("ise", Pos::Verb),
    ("ify", Pos::Verb),
    ("ate", Pos::Verb),
    ("ing", Pos::Verb),
    ("ed", Pos::Verb),
    ("ly", Pos::Other),
    ("al", Pos::Adjective),
    ("ic", Pos::Adjective),
];

const MIN_STEM: usize = 3;

/// Lexicon lookup with regular-inflection stripping, then suffix rules, then
/// a noun default.
///
/// Tagging is a function of the lowercased surface alone, so one word form
/// always receives the same tag within a text.
#[derive(Clone, Debug)]
pub struct LexiconTagger {
    lexicon: &'static HashMap<String, Pos>,
}

impl Default for LexiconTagger {
    fn default() -> Self {
        Self { lexicon: &BUNDLED }
    }
}

impl LexiconTagger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, word: &str) -> Option<Pos> {
        self.lexicon.get(word).copied()
    }

    /// Tag for a single lowercased word form.
    pub fn tag_word(&self, lower: &str) -> Pos {
        if let Some(pos) = self.lookup(lower) {
            return pos;
        }
        if let Some(pos) = self.tag_contraction(lower) {
            return pos;
        }
        if let Some((_, last)) = lower.rsplit_once('-') {
            if !last.is_empty() {
                return self.tag_word(last);
            }
        }
        if let Some(pos) = self.tag_inflected(lower) {
            return pos;
        }
        let chars = lower.chars().count();
        for &(suffix, pos) in SUFFIX_RULES {
            if lower.ends_with(suffix) && chars >= suffix.chars().count() + MIN_STEM {
                return pos;
            }
        }
        Pos::Noun
    }

    fn tag_contraction(&self, lower: &str) -> Option<Pos> {
        let normalized = lower.replace('’', "'");
        if !normalized.contains('\'') {
            return None;
        }
        if normalized.ends_with("n't") {
            return Some(Pos::Other);
        }
        let (base, _) = normalized.split_once('\'')?;
        if base.is_empty() {
            return Some(Pos::Other);
        }
        Some(self.tag_word(base))
    }

    fn tag_inflected(&self, lower: &str) -> Option<Pos> {
        let content = |w: &str| self.lookup(w).filter(|p| p.is_content());
        if let Some(stem) = lower.strip_suffix("ies") {
            if let Some(pos) = content(&format!("{stem}y")) {
                return Some(pos);
            }
        }
        if let Some(stem) = lower.strip_suffix("es") {
            if let Some(pos) = content(stem) {
                return Some(pos);
            }
        }
        if let Some(stem) = lower.strip_suffix('s') {
            if !stem.ends_with('s') {
                if let Some(pos) = content(stem) {
                    return Some(pos);
                }
            }
        }
        for suffix in ["ed", "ing"] {
            if let Some(stem) = lower.strip_suffix(suffix) {
                if stem.is_empty() {
                    continue;
                }
                let mut candidates = vec![stem.to_string(), format!("{stem}e")];
                let b = stem.as_bytes();
                if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                    candidates.push(stem[..stem.len() - 1].to_string());
                }
                if suffix == "ed" {
                    if let Some(s) = stem.strip_suffix('i') {
                        candidates.push(format!("{s}y"));
                    }
                }
                if candidates.iter().any(|c| content(c).is_some()) {
                    return Some(Pos::Verb);
                }
            }
        }
        for suffix in ["er", "est"] {
            if let Some(stem) = lower.strip_suffix(suffix) {
                let b = stem.as_bytes();
                let mut candidates = vec![stem.to_string(), format!("{stem}e")];
                if b.len() >= 2 && b[b.len() - 1] == b[b.len() - 2] {
                    candidates.push(stem[..stem.len() - 1].to_string());
                }
                if let Some(s) = stem.strip_suffix('i') {
                    candidates.push(format!("{s}y"));
                }
                if candidates
                    .iter()
                    .any(|c| content(c) == Some(Pos::Adjective))
                {
                    return Some(Pos::Adjective);
                }
            }
        }
        None
    }
}

impl PosTagger for LexiconTagger {
    fn tag(&self, tokens: &mut [Token]) {
        for token in tokens.iter_mut() {
            token.pos = match token.kind {
                TokenKind::Word => self.tag_word(&token.surface.to_lowercase()),
                _ => Pos::Other,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lingfeat::tokenize::tokenize;

    fn tags(text: &str) -> Vec<Pos> {
        let mut toks = tokenize(text);
        LexiconTagger::new().tag(&mut toks);
        toks.iter().map(|t| t.pos).collect()
    }

    #[test]
    fn lexicon_entries() {
        assert_eq!(tags("cat"), vec![Pos::Noun]);
        assert_eq!(tags("."), vec![Pos::Other]);
    }

    #[test]
    fn hand_annotated_fixture() {
        assert_eq!(
            tags("the quick fox jumps"),
            vec![Pos::Other, Pos::Adjective, Pos::Noun, Pos::Verb]
        );
        assert_eq!(
            tags("the cat saw the dog"),
            vec![Pos::Other, Pos::Noun, Pos::Verb, Pos::Other, Pos::Noun]
        );
    }

    #[test]
    fn inflections_follow_their_stem() {
        let t = LexiconTagger::new();
        assert_eq!(t.tag_word("cats"), Pos::Noun);
        assert_eq!(t.tag_word("stories"), Pos::Noun);
        assert_eq!(t.tag_word("walked"), Pos::Verb);
        assert_eq!(t.tag_word("running"), Pos::Verb);
        assert_eq!(t.tag_word("baking"), Pos::Verb);
        assert_eq!(t.tag_word("studied"), Pos::Verb);
        assert_eq!(t.tag_word("bigger"), Pos::Adjective);
        assert_eq!(t.tag_word("happiest"), Pos::Adjective);
    }

    #[test]
    fn suffix_rules_and_default() {
        let t = LexiconTagger::new();
        assert_eq!(t.tag_word("zorbness"), Pos::Noun);
        assert_eq!(t.tag_word("glorbize"), Pos::Verb);
        assert_eq!(t.tag_word("flimous"), Pos::Adjective);
        assert_eq!(t.tag_word("quickly"), Pos::Other);
        assert_eq!(t.tag_word("xyzzy"), Pos::Noun);
    }

    #[test]
    fn contractions_and_hyphens() {
        let t = LexiconTagger::new();
        assert_eq!(t.tag_word("don't"), Pos::Other);
        assert_eq!(t.tag_word("it's"), Pos::Other);
        assert_eq!(t.tag_word("dog's"), Pos::Noun);
        assert_eq!(t.tag_word("well-known"), Pos::Verb);
        assert_eq!(t.tag_word("long-term"), Pos::Noun);
    }

    #[test]
    fn numbers_and_symbols_are_other() {
        assert_eq!(tags("42 $"), vec![Pos::Other, Pos::Other]);
    }
}
