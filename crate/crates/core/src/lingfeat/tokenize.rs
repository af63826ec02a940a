use serde::{Deserialize, Serialize};

use super::syllable::count_syllables;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Word,
    Punctuation,
    Number,
    Symbol,
}

/// Coarse part of speech; the extractor only distinguishes these four.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Other,
}

impl Pos {
    pub fn is_content(self) -> bool {
        self != Pos::Other
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Byte offset of the token in the source text.
    pub start: usize,
    pub kind: TokenKind,
    pub pos: Pos,
    /// Zero for punctuation and symbols.
    pub syllables: u32,
}

impl Token {
    pub fn end(&self) -> usize {
        self.start + self.surface.len()
    }

    /// Tokens that count towards `t_word`: anything with an alphanumeric character.
    pub fn is_word_like(&self) -> bool {
        matches!(self.kind, TokenKind::Word | TokenKind::Number)
    }
}

const PUNCTUATION: &[char] = &[
    '.', ',', ';', ':', '!', '?', '\'', '"', '(', ')', '[', ']', '{', '}', '-', '/', '\\', '–',
    '—', '…', '«', '»', '“', '”', '‘', '’', '¡', '¿',
];

fn is_connector(c: char, prev: char, next: char) -> bool {
    match c {
        '\'' | '’' | '-' => prev.is_alphanumeric() && next.is_alphanumeric(),
        // "e.g", "U.S", "3.14"
        '.' => {
            (prev.is_alphabetic() && next.is_alphabetic())
                || (prev.is_ascii_digit() && next.is_ascii_digit())
        }
        ',' => prev.is_ascii_digit() && next.is_ascii_digit(),
        _ => false,
    }
}

/// Splits text into word, number, punctuation and symbol tokens.
///
/// Whitespace is dropped; every other byte of the input belongs to exactly
/// one token, so the input can be rebuilt from the token offsets. Part of
/// speech is left as [`Pos::Other`] until a tagger runs.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() {
            let mut j = i + 1;
            while j < chars.len() {
                let cj = chars[j].1;
                if cj.is_alphanumeric() {
                    j += 1;
                } else if j + 1 < chars.len() && is_connector(cj, chars[j - 1].1, chars[j + 1].1) {
                    j += 2;
                } else {
                    break;
                }
            }
            let end = chars.get(j).map_or(text.len(), |&(b, _)| b);
            let surface = &text[start..end];
            let kind = if surface.chars().any(char::is_alphabetic) {
                TokenKind::Word
            } else {
                TokenKind::Number
            };
            let syllables = match kind {
                TokenKind::Word => count_syllables(surface),
                _ => 1,
            };
            tokens.push(Token {
                surface: surface.to_string(),
                start,
                kind,
                pos: Pos::Other,
                syllables,
            });
            i = j;
        } else {
            let end = chars.get(i + 1).map_or(text.len(), |&(b, _)| b);
            let kind = if PUNCTUATION.contains(&c) {
                TokenKind::Punctuation
            } else {
                TokenKind::Symbol
            };
            tokens.push(Token {
                surface: text[start..end].to_string(),
                start,
                kind,
                pos: Pos::Other,
                syllables: 0,
            });
            i += 1;
        }
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<(String, TokenKind)> {
        tokenize(text)
            .into_iter()
            .map(|t| (t.surface, t.kind))
            .collect()
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t").is_empty());
    }

    #[test]
    fn word_then_period() {
        assert_eq!(
            surfaces("Hi."),
            vec![
                ("Hi".into(), TokenKind::Word),
                (".".into(), TokenKind::Punctuation)
            ]
        );
    }

    #[test]
    fn plain_sentence() {
        let toks = tokenize("the cat saw the dog");
        assert_eq!(toks.len(), 5);
        assert!(toks.iter().all(|t| t.kind == TokenKind::Word));
    }

    #[test]
    fn connectors_stay_inside_words() {
        assert_eq!(
            surfaces("don't re-use 3.14 or 1,000, e.g. U.S."),
            vec![
                ("don't".into(), TokenKind::Word),
                ("re-use".into(), TokenKind::Word),
                ("3.14".into(), TokenKind::Number),
                ("or".into(), TokenKind::Word),
                ("1,000".into(), TokenKind::Number),
                (",".into(), TokenKind::Punctuation),
                ("e.g".into(), TokenKind::Word),
                (".".into(), TokenKind::Punctuation),
                ("U.S".into(), TokenKind::Word),
                (".".into(), TokenKind::Punctuation),
            ]
        );
    }

    #[test]
    fn symbols_and_unicode() {
        assert_eq!(
            surfaces("café costs $5 — “ok”"),
            vec![
                ("café".into(), TokenKind::Word),
                ("costs".into(), TokenKind::Word),
                ("$".into(), TokenKind::Symbol),
                ("5".into(), TokenKind::Number),
                ("—".into(), TokenKind::Punctuation),
                ("“".into(), TokenKind::Punctuation),
                ("ok".into(), TokenKind::Word),
                ("”".into(), TokenKind::Punctuation),
            ]
        );
    }

    #[test]
    fn words_have_syllables() {
        for t in tokenize("a strange rhythm, 42 times!") {
            if t.is_word_like() {
                assert!(t.syllables >= 1, "{t:?}");
            } else {
                assert_eq!(t.syllables, 0);
            }
        }
    }

    proptest! {
        #[test]
        fn offsets_rebuild_input(text in "\\PC{0,80}") {
            let tokens = tokenize(&text);
            let mut rebuilt = String::new();
            let mut cursor = 0;
            for t in &tokens {
                prop_assert!(t.start >= cursor);
                let gap = &text[cursor..t.start];
                prop_assert!(gap.chars().all(char::is_whitespace));
                rebuilt.push_str(gap);
                prop_assert_eq!(&text[t.start..t.end()], t.surface.as_str());
                rebuilt.push_str(&t.surface);
                cursor = t.end();
            }
            prop_assert!(text[cursor..].chars().all(char::is_whitespace));
            rebuilt.push_str(&text[cursor..]);
            prop_assert_eq!(rebuilt, text);
        }
    }
}
