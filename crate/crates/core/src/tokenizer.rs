//! Rule-based, treebank-style tokenization.
//!
//! Text is split on whitespace; punctuation is peeled off both ends of each
//! chunk one character at a time, and standard English contractions are split
//! with a small rule table (`fixtures/contractions.txt`). Detokenization joins
//! with single spaces and attaches punctuation tokens to the previous token.
//!
//! For every token sequence `t` produced by [`tokenize`], and every
//! subsequence `s` of it, `tokenize(&detokenize(&s)) == s`. Word-class
//! removal relies on this: the token count of a corrupted sentence can be
//! recomputed from its text.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const BUNDLED_RULES: &str = include_str!("../fixtures/contractions.txt");

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub form: String,
    pub is_punct: bool,
}

impl Token {
    /// Panics if `form` is empty or contains whitespace.
    pub fn new(form: impl Into<String>) -> Token {
        let form = form.into();
        assert!(
            !form.is_empty() && !form.chars().any(char::is_whitespace),
            "invalid token form {form:?}"
        );
        let is_punct = form.chars().all(is_punct_char);
        Token { form, is_punct }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.form)
    }
}

/// Anything that is neither alphanumeric, whitespace, nor a combining mark.
pub fn is_punct_char(c: char) -> bool {
    !(c.is_alphanumeric() || c.is_whitespace() || ('\u{300}'..='\u{36f}').contains(&c))
}

fn fold(s: &str) -> String {
    s.chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .flat_map(char::to_lowercase)
        .collect()
}

#[derive(Debug, Clone)]
pub struct ContractionRules {
    pub version: u32,
    /// Folded suffix forms such as `n't` or `'s`.
    suffixes: Vec<String>,
    /// Folded whole word and the character lengths of its parts.
    words: Vec<(String, Vec<usize>)>,
}

impl ContractionRules {
    pub fn parse(text: &str) -> Result<ContractionRules> {
        let mut version = None;
        let mut suffixes = Vec::new();
        let mut words = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::MalformedLine {
                line: i + 1,
                message: msg.to_string(),
            };
            if let Some(v) = line.strip_prefix("version ") {
                version = Some(v.trim().parse().map_err(|_| bad("bad version"))?);
                continue;
            }
            let (pattern, parts) = line.split_once("->").ok_or_else(|| bad("expected '->'"))?;
            let pattern = pattern.trim();
            let parts: Vec<&str> = parts.split_whitespace().collect();
            if let Some(suffix) = pattern.strip_prefix('*') {
                if parts != ["*", suffix] {
                    return Err(bad("stem rules must read '*X -> * X'"));
                }
                suffixes.push(fold(suffix));
            } else {
                if parts.concat() != pattern || parts.len() < 2 {
                    return Err(bad("word parts must concatenate to the pattern"));
                }
                let lens = parts.iter().map(|p| p.chars().count()).collect();
                words.push((fold(pattern), lens));
            }
        }
        // longest suffix first so "'ll" is never shadowed by a shorter rule
        suffixes.sort_by_key(|s| std::cmp::Reverse(s.chars().count()));
        Ok(ContractionRules {
            version: version.ok_or_else(|| Error::Validation("contraction rules lack a version".into()))?,
            suffixes,
            words,
        })
    }

    pub fn bundled() -> &'static ContractionRules {
        static RULES: OnceLock<ContractionRules> = OnceLock::new();
        RULES.get_or_init(|| ContractionRules::parse(BUNDLED_RULES).expect("bundled rules parse"))
    }

    fn is_suffix_form(&self, chunk: &str) -> bool {
        let folded = fold(chunk);
        self.suffixes.iter().any(|s| *s == folded)
    }

    fn word_split(&self, chunk: &str) -> Option<Vec<String>> {
        let folded = fold(chunk);
        let (_, lens) = self.words.iter().find(|(w, _)| *w == folded)?;
        let chars: Vec<char> = chunk.chars().collect();
        let mut at = 0;
        Some(
            lens.iter()
                .map(|&n| {
                    let part: String = chars[at..at + n].iter().collect();
                    at += n;
                    part
                })
                .collect(),
        )
    }

    /// Byte index where a matching suffix starts, if the stem is non-empty.
    fn suffix_split(&self, chunk: &str) -> Option<usize> {
        let chars: Vec<(usize, char)> = chunk.char_indices().collect();
        for suffix in &self.suffixes {
            let n = suffix.chars().count();
            if chars.len() <= n {
                continue;
            }
            let start = chars[chars.len() - n].0;
            if fold(&chunk[start..]) == *suffix {
                return Some(start);
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Tokenizer<'a> {
    rules: &'a ContractionRules,
}

impl Default for Tokenizer<'static> {
    fn default() -> Self {
        Tokenizer {
            rules: ContractionRules::bundled(),
        }
    }
}

impl<'a> Tokenizer<'a> {
    pub fn with_rules(rules: &'a ContractionRules) -> Self {
        Tokenizer { rules }
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            self.split_chunk(chunk, &mut out);
        }
        out
    }

    fn split_chunk(&self, chunk: &str, out: &mut Vec<Token>) {
        if chunk.is_empty() {
            return;
        }
        if self.rules.is_suffix_form(chunk) {
            out.push(Token::new(chunk));
            return;
        }
        let last = chunk.chars().next_back().expect("non-empty");
        if is_punct_char(last) {
            let cut = chunk.len() - last.len_utf8();
            self.split_chunk(&chunk[..cut], out);
            out.push(Token::new(&chunk[cut..]));
            return;
        }
        let first = chunk.chars().next().expect("non-empty");
        if is_punct_char(first) {
            let cut = first.len_utf8();
            out.push(Token::new(&chunk[..cut]));
            self.split_chunk(&chunk[cut..], out);
            return;
        }
        if let Some(parts) = self.rules.word_split(chunk) {
            out.extend(parts.into_iter().map(Token::new));
            return;
        }
        if let Some(at) = self.rules.suffix_split(chunk) {
            self.split_chunk(&chunk[..at], out);
            out.push(Token::new(&chunk[at..]));
            return;
        }
        out.push(Token::new(chunk));
    }
}

/// Tokenizes with the bundled contraction rules.
pub fn tokenize(text: &str) -> Vec<Token> {
    Tokenizer::default().tokenize(text)
}

/// Space-joins token forms, attaching punctuation tokens to their left neighbour.
pub fn detokenize<T: AsRef<Token>>(tokens: &[T]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        let t = t.as_ref();
        if i > 0 && !t.is_punct {
            out.push(' ');
        }
        out.push_str(&t.form);
    }
    out
}

impl AsRef<Token> for Token {
    fn as_ref(&self) -> &Token {
        self
    }
}

/// Token count of `text`, as used by all removal accounting.
pub fn token_count(text: &str) -> usize {
    tokenize(text).len()
}
