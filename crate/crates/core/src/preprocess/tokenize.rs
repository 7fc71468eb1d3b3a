use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// 0-based index within the document's token stream.
    pub position: usize,
}

fn leading_punct() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[\p{P}\p{S}]+").expect("valid regex"))
}

fn trailing_punct() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{P}\p{S}]+$").expect("valid regex"))
}

/// Splits on whitespace, then peels maximal leading and trailing runs of
/// punctuation/symbol characters (general categories P and S) off each chunk
/// as tokens of their own. Interior punctuation such as the apostrophe in
/// `Türkiye'nin` or the hyphen in `bilâ-kayd` stays inside the token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    for surface in split_surfaces(text) {
        tokens.push(Token {
            surface: surface.to_string(),
            position: tokens.len(),
        });
    }
    tokens
}

/// Borrowing variant of [`tokenize`] that yields the surfaces only.
pub fn split_surfaces(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace().flat_map(split_chunk)
}

fn split_chunk(chunk: &str) -> impl Iterator<Item = &str> {
    let lead_end = leading_punct().find(chunk).map_or(0, |m| m.end());
    let rest = &chunk[lead_end..];
    let trail_start = if rest.is_empty() {
        0
    } else {
        trailing_punct().find(rest).map_or(rest.len(), |m| m.start())
    };
    let lead = &chunk[..lead_end];
    let core = &rest[..trail_start];
    let trail = &rest[trail_start..];
    [lead, core, trail].into_iter().filter(|s| !s.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn trailing_period_detached() {
        assert_eq!(surfaces("Hâkimiyet milletindir."), ["Hâkimiyet", "milletindir", "."]);
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn interior_apostrophe_and_hyphen_kept() {
        assert_eq!(surfaces("Türkiye'nin bilâ-kayd"), ["Türkiye'nin", "bilâ-kayd"]);
    }

    #[test]
    fn quotes_and_brackets() {
        assert_eq!(
            surfaces("(1) “Türkiye Hükûmeti” unvanını..."),
            ["(", "1", ")", "“", "Türkiye", "Hükûmeti", "”", "unvanını", "..."]
        );
        assert_eq!(surfaces("--"), ["--"]);
    }

    #[test]
    fn positions_strictly_increase() {
        let toks = tokenize("a, b. c");
        let pos: Vec<usize> = toks.iter().map(|t| t.position).collect();
        assert_eq!(pos, [0, 1, 2, 3, 4]);
    }

    proptest! {
        #[test]
        fn retokenizing_joined_tokens_is_stable(s in "[a-zâîûçğış.,'()\" \\-]{0,60}") {
            let first = surfaces(&s);
            let joined = first.join(" ");
            prop_assert_eq!(surfaces(&joined), first);
        }

        #[test]
        fn tokens_have_no_whitespace(s in "\\PC{0,40}") {
            for t in tokenize(&s) {
                prop_assert!(!t.surface.is_empty());
                prop_assert!(!t.surface.chars().any(char::is_whitespace));
            }
        }
    }
}
