use crate::error::ExtractError;

use super::tokenize::{Token, TokenKind};

/// Words that swallow a directly attached period.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g", "i.e", "inc", "ltd",
    "co", "corp", "no", "fig", "approx", "dept", "est", "u.s", "a.m", "p.m",
];

fn is_terminator(tokens: &[Token], i: usize) -> bool {
    let tok = &tokens[i];
    if tok.kind != TokenKind::Punctuation {
        return false;
    }
    match tok.surface.as_str() {
        "!" | "?" | "…" => true,
        "." => match i.checked_sub(1).map(|p| &tokens[p]) {
            Some(prev) if prev.end() == tok.start && prev.kind == TokenKind::Word => {
                !ABBREVIATIONS.contains(&prev.surface.to_lowercase().as_str())
            }
            _ => true,
        },
        _ => false,
    }
}

/// Counts sentences: runs of tokens containing at least one word, closed by
/// `.`, `!` or `?` or by the end of the text.
///
/// Terminators with no word since the previous boundary do not open a new
/// sentence, so the count never exceeds the number of words.
pub fn count_sentences(tokens: &[Token]) -> Result<u32, ExtractError> {
    let mut count = 0u32;
    let mut open = false;
    for (i, tok) in tokens.iter().enumerate() {
        if tok.is_word_like() {
            open = true;
        } else if open && is_terminator(tokens, i) {
            count += 1;
            open = false;
        }
    }
    if open {
        count += 1;
    }
    if count == 0 {
        return Err(ExtractError::EmptyText);
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lingfeat::tokenize::tokenize;

    fn sentences(text: &str) -> Result<u32, ExtractError> {
        count_sentences(&tokenize(text))
    }

    #[test]
    fn basic_counts() {
        assert_eq!(sentences("Hi."), Ok(1));
        assert_eq!(sentences("Hi. Bye."), Ok(2));
        assert_eq!(sentences("no terminator"), Ok(1));
        assert_eq!(sentences("Really?! Yes... ok"), Ok(3));
    }

    #[test]
    fn abbreviations_do_not_split() {
        assert_eq!(
            sentences("Dr. Smith met Mr. Jones, e.g. at 5 p.m. today."),
            Ok(1)
        );
        assert_eq!(sentences("It ends with etc. And more."), Ok(1));
    }

    #[test]
    fn no_words_is_an_error() {
        assert_eq!(sentences(""), Err(ExtractError::EmptyText));
        assert_eq!(sentences("... !?"), Err(ExtractError::EmptyText));
    }
}
