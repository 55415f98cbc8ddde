//! Vertical `form TAG` files, one token per line, blank line between sentences.
//!
//! A `# id = <key>` comment line names the following sentence; named
//! sentences may be empty, which is how an empty premise is written. Other
//! `#` lines are ignored.

use std::io::Write;
use std::path::Path;

use super::{TaggedSentence, UniversalPos};
use crate::tokenizer::Token;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default)]
pub struct PretaggedOptions {
    /// Convert Penn Treebank / UD tags through the mapping table.
    pub map_foreign: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PretaggedSentence {
    pub id: Option<String>,
    pub sentence: TaggedSentence,
}

pub fn parse_pretagged(text: &str, options: PretaggedOptions) -> Result<Vec<PretaggedSentence>> {
    let mut out = Vec::new();
    let mut id: Option<String> = None;
    let mut tokens: Vec<(Token, UniversalPos)> = Vec::new();

    fn flush(
        out: &mut Vec<PretaggedSentence>,
        id: &mut Option<String>,
        tokens: &mut Vec<(Token, UniversalPos)>,
    ) {
        if id.is_some() || !tokens.is_empty() {
            out.push(PretaggedSentence {
                id: id.take(),
                sentence: TaggedSentence::new(std::mem::take(tokens)),
            });
        }
    }

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut out, &mut id, &mut tokens);
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(key) = comment.trim_start().strip_prefix("id =") {
                flush(&mut out, &mut id, &mut tokens);
                id = Some(key.trim().to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [form, tag] = cols[..] else {
            return Err(Error::MalformedLine {
                line: lineno,
                message: format!("expected 'form TAG', found {} columns", cols.len()),
            });
        };
        let parsed = if options.map_foreign {
            UniversalPos::from_foreign(tag).ok_or_else(|| tag.parse::<UniversalPos>().unwrap_err())
        } else {
            tag.parse::<UniversalPos>()
        };
        let tag = parsed.map_err(|e| match e {
            Error::UnknownTag { tag, hint } => Error::UnknownTag {
                tag,
                hint: format!(" in sentence {} (line {lineno}){hint}", out.len()),
            },
            other => other,
        })?;
        tokens.push((Token::new(form), tag));
    }
    flush(&mut out, &mut id, &mut tokens);
    Ok(out)
}

/// Loads a vertical file with strict universal tags, dropping sentence ids.
pub fn load_pretagged(path: impl AsRef<Path>) -> Result<Vec<TaggedSentence>> {
    Ok(load_pretagged_with(path, PretaggedOptions::default())?
        .into_iter()
        .map(|s| s.sentence)
        .collect())
}

pub fn load_pretagged_with(
    path: impl AsRef<Path>,
    options: PretaggedOptions,
) -> Result<Vec<PretaggedSentence>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pretagged(&text, options)
}

pub fn write_pretagged<W: Write>(w: &mut W, sentences: &[PretaggedSentence]) -> std::io::Result<()> {
    for s in sentences {
        if let Some(id) = &s.id {
            writeln!(w, "# id = {id}")?;
        }
        for (token, tag) in &s.sentence.tokens {
            writeln!(w, "{} {}", token.form, tag)?;
        }
        writeln!(w)?;
    }
    Ok(())
}
