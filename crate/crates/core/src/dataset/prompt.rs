//! Alpaca-layout prompt rendering with a trailing control-tag line.
//!
//! A controlled prompt looks like
//!
//! ```text
//! <preamble + feature glossary>
//!
//! ### Instruction:
//! Write a haiku.
//!
//! ### Input:
//! [t_word: 17] [fkre: 80.50]
//!
//! ### Response:
//! ```

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::controls::ControlVector;
use crate::feature::{Feature, FeatureKind};

/// Bumped whenever the wording or layout below changes.
pub const TEMPLATE_VERSION: &str = "lingctl-alpaca-v1";

const PREAMBLE_WITH_INPUT: &str = "Below is an instruction that describes a task, paired with an input that provides further context. Write a response that appropriately completes the request.";
const PREAMBLE_NO_INPUT: &str =
    "Below is an instruction that describes a task. Write a response that appropriately completes the request.";

const INSTRUCTION_HEADER: &str = "### Instruction:\n";
const INPUT_HEADER: &str = "### Input:\n";
const RESPONSE_HEADER: &str = "### Response:\n";

/// A prompt split into the system part and the user-visible body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub system: String,
    pub user: String,
}

impl Prompt {
    /// Single-string form used in training files.
    pub fn text(&self) -> String {
        format!("{}\n\n{}", self.system, self.user)
    }
}

/// Preamble plus the glossary of all fourteen features.
pub fn control_system_prompt() -> String {
    let mut s = String::from(PREAMBLE_WITH_INPUT);
    s.push_str(
        " The input ends with linguistic controls written as [name: value]. \
         The response must have each listed linguistic property equal to its value. \
         The linguistic properties are:",
    );
    for f in Feature::ALL {
        s.push_str(&format!("\n- {}: {}", f.name(), f.description()));
    }
    s
}

/// Integers without decimals, everything else with exactly two.
pub fn format_value(feature: Feature, value: f64) -> String {
    let s = match feature.kind() {
        FeatureKind::Integer => format!("{}", value.round() as i64),
        _ => format!("{value:.2}"),
    };
    if s == "-0" || s == "-0.00" {
        s[1..].to_string()
    } else {
        s
    }
}

/// `[name: value] [name: value] ...` in feature id order.
pub fn render_tags(controls: &ControlVector<f64>) -> String {
    controls
        .entries()
        .iter()
        .map(|&(f, v)| format!("[{}: {}]", f.name(), format_value(f, v)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders an instruction, optional input and controls.
///
/// With no controls the result is the plain instruction template with no
/// feature glossary.
pub fn render_prompt(instruction: &str, input: &str, controls: &ControlVector<f64>) -> Prompt {
    let mut user = String::new();
    user.push_str(INSTRUCTION_HEADER);
    user.push_str(instruction);
    user.push_str("\n\n");
    let system = if controls.is_empty() {
        if !input.is_empty() {
            user.push_str(INPUT_HEADER);
            user.push_str(input);
            user.push_str("\n\n");
            PREAMBLE_WITH_INPUT.to_string()
        } else {
            PREAMBLE_NO_INPUT.to_string()
        }
    } else {
        user.push_str(INPUT_HEADER);
        if !input.is_empty() {
            user.push_str(input);
            user.push('\n');
        }
        user.push_str(&render_tags(controls));
        user.push_str("\n\n");
        control_system_prompt()
    };
    user.push_str(RESPONSE_HEADER);
    Prompt { system, user }
}

static TAG: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\[([a-z_]+): (-?[0-9]+(?:\.[0-9]+)?)\]$").unwrap());

fn parse_tag_line(line: &str) -> Option<ControlVector<f64>> {
    let mut pairs = Vec::new();
    let mut rest = line;
    loop {
        let close = rest.find(']')?;
        let caps = TAG.captures(&rest[..=close])?;
        let feature: Feature = caps[1].parse().ok()?;
        let value: f64 = caps[2].parse().ok()?;
        if pairs.iter().any(|(f, _)| *f == feature) {
            return None;
        }
        pairs.push((feature, value));
        rest = &rest[close + 1..];
        if rest.is_empty() {
            break;
        }
        rest = rest.strip_prefix(' ')?;
    }
    Some(ControlVector::from_pairs(pairs))
}

/// Recovers the controls from a rendered prompt (either the body or the full
/// text). Returns an empty vector when the input section has no tag line.
pub fn parse_tags(prompt: &str) -> ControlVector<f64> {
    let Some(start) = prompt.rfind(INPUT_HEADER) else {
        return ControlVector::empty();
    };
    let section = &prompt[start + INPUT_HEADER.len()..];
    let section = section
        .rfind(&format!("\n\n{RESPONSE_HEADER}"))
        .map_or(section, |end| &section[..end]);
    section
        .lines()
        .last()
        .and_then(parse_tag_line)
        .unwrap_or_else(ControlVector::empty)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_word_count_tag() {
        let c = ControlVector::from_pairs([(Feature::TWord, 5.0)]);
        let p = render_prompt("Describe a cat.", "", &c);
        assert!(p
            .user
            .contains("### Input:\n[t_word: 5]\n\n### Response:\n"));
        assert_eq!(p.user.matches('[').count(), 1);
    }

    #[test]
    fn real_values_have_two_decimals() {
        let c = ControlVector::from_pairs([(Feature::Fkre, 100.2399), (Feature::Ttr, 0.8)]);
        assert_eq!(render_tags(&c), "[ttr: 0.80] [fkre: 100.24]");
        assert_eq!(format_value(Feature::Fkre, -0.001), "0.00");
        assert_eq!(format_value(Feature::NNoun, 3.0), "3");
    }

    #[test]
    fn empty_controls_give_plain_template() {
        let p = render_prompt("Say hi.", "", &ControlVector::empty());
        assert_eq!(p.system, PREAMBLE_NO_INPUT);
        assert_eq!(p.user, "### Instruction:\nSay hi.\n\n### Response:\n");
        let q = render_prompt("Sum.", "2 and 3", &ControlVector::empty());
        assert_eq!(q.system, PREAMBLE_WITH_INPUT);
        assert_eq!(
            q.user,
            "### Instruction:\nSum.\n\n### Input:\n2 and 3\n\n### Response:\n"
        );
        assert!(parse_tags(&q.text()).is_empty());
    }

    #[test]
    fn system_prompt_lists_every_feature() {
        let s = control_system_prompt();
        for f in Feature::ALL {
            assert!(s.contains(&format!("- {}: {}", f.name(), f.description())));
        }
    }

    #[test]
    fn tags_follow_the_input() {
        let c = ControlVector::from_pairs([(Feature::NVerb, 2.0), (Feature::AdjVar, 0.5)]);
        let p = render_prompt("Rewrite.", "The dog ran.\nIt was fast.", &c);
        assert!(p
            .user
            .contains("It was fast.\n[n_verb: 2] [adj_var: 0.50]\n\n"));
        assert_eq!(parse_tags(&p.text()), c);
        assert_eq!(parse_tags(&p.user), c);
    }

    #[test]
    fn tag_parser_rejects_garbage() {
        assert!(parse_tag_line("[t_word: 5] junk").is_none());
        assert!(parse_tag_line("[nope: 5]").is_none());
        assert!(parse_tag_line("[t_word: 5]  [ttr: 0.50]").is_none());
        assert!(parse_tag_line("[t_word: 5] [t_word: 6]").is_none());
        assert_eq!(
            parse_tag_line("[fkre: -12.50]").unwrap().get(Feature::Fkre),
            Some(-12.5)
        );
    }
}
