//! Versioned plain-text container for perceptron weights.
//!
//! ```text
//! nli-crashtest-model
//! version 1
//! kind tagger
//! classes ADJ ADP ADV ...
//! meta epochs 5
//! weights 2
//! bias<TAB>NOUN<TAB>0.25
//! w the<TAB>DET<TAB>1.5
//! end
//! ```
//!
//! Weights are written sorted by feature then class with Rust's shortest
//! round-trip float formatting, so equal models serialize to equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::perceptron::Weights;
use crate::{Error, Result};

pub const MAGIC: &str = "nli-crashtest-model";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub kind: String,
    pub classes: Vec<String>,
    pub metadata: BTreeMap<String, String>,
    pub weights: Weights,
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let triples = self.weights.triples();
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "version {FORMAT_VERSION}");
        let _ = writeln!(out, "kind {}", self.kind);
        let _ = writeln!(out, "classes {}", self.classes.join(" "));
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "meta {k} {v}");
        }
        let _ = writeln!(out, "weights {}", triples.len());
        for (feature, class, w) in triples {
            let _ = writeln!(out, "{feature}\t{}\t{w}", self.classes[class]);
        }
        out.push_str("end\n");
        out
    }

    pub fn parse(text: &str) -> Result<ModelFile> {
        let mut lines = Lines::new(text);

        let (off, magic) = lines.next_or_truncated()?;
        if magic != MAGIC {
            return Err(Error::ModelParse {
                offset: off,
                message: format!("not a model file (expected '{MAGIC}' header)"),
            });
        }
        let (off, version) = lines.next_or_truncated()?;
        let version = expect_key(off, version, "version")?;
        if version != FORMAT_VERSION.to_string() {
            return Err(Error::UnsupportedModelVersion {
                found: version.to_string(),
                expected: FORMAT_VERSION,
            });
        }
        let (off, kind) = lines.next_or_truncated()?;
        let kind = expect_key(off, kind, "kind")?.to_string();
        let (off, classes) = lines.next_or_truncated()?;
        let classes: Vec<String> = expect_key(off, classes, "classes")?
            .split_whitespace()
            .map(str::to_string)
            .collect();
        if classes.is_empty() {
            return Err(Error::ModelParse {
                offset: off,
                message: "empty class list".into(),
            });
        }

        let mut metadata = BTreeMap::new();
        let count = loop {
            let (off, line) = lines.next_or_truncated()?;
            if let Some(rest) = line.strip_prefix("meta ") {
                let (k, v) = rest.split_once(' ').unwrap_or((rest, ""));
                metadata.insert(k.to_string(), v.to_string());
            } else {
                let n = expect_key(off, line, "weights")?;
                break n.parse::<usize>().map_err(|_| Error::ModelParse {
                    offset: off,
                    message: format!("bad weight count '{n}'"),
                })?;
            }
        };

        let mut weights = Weights::empty(classes.len());
        for _ in 0..count {
            let (off, line) = lines.next_or_truncated()?;
            let mut cols = line.split('\t');
            let (Some(feature), Some(class), Some(w), None) =
                (cols.next(), cols.next(), cols.next(), cols.next())
            else {
                return Err(Error::ModelParse {
                    offset: off,
                    message: "expected feature<TAB>class<TAB>weight".into(),
                });
            };
            let ci = classes.iter().position(|c| c == class).ok_or_else(|| Error::ModelParse {
                offset: off,
                message: format!("unknown class '{class}'"),
            })?;
            let w: f64 = w.parse().map_err(|_| Error::ModelParse {
                offset: off,
                message: format!("bad weight '{w}'"),
            })?;
            if !w.is_finite() {
                return Err(Error::ModelParse {
                    offset: off,
                    message: "non-finite weight".into(),
                });
            }
            weights.set(feature, ci, w);
        }
        let (off, end) = lines.next_or_truncated()?;
        if end != "end" {
            return Err(Error::ModelParse {
                offset: off,
                message: "expected 'end' after the declared weights".into(),
            });
        }
        Ok(ModelFile {
            kind,
            classes,
            metadata,
            weights,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ModelFile> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ModelFile::parse(&text)
    }
}

fn expect_key<'a>(offset: usize, line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::ModelParse {
            offset,
            message: format!("expected '{key} ...'"),
        })
}

/// Line iterator that tracks the byte offset of each line start.
struct Lines<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { text, pos: 0 }
    }

    fn next_or_truncated(&mut self) -> Result<(usize, &'a str)> {
        if self.pos >= self.text.len() {
            return Err(Error::ModelParse {
                offset: self.text.len(),
                message: "truncated model file".into(),
            });
        }
        let start = self.pos;
        let rest = &self.text[start..];
        let (line, advance) = match rest.find('\n') {
            Some(i) => (&rest[..i], i + 1),
            None => (rest, rest.len()),
        };
        self.pos += advance;
        Ok((start, line.strip_suffix('\r').unwrap_or(line)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ModelFile {
        let mut w = Weights::empty(2);
        w.set("bias", 0, 0.1);
        w.set("w the", 1, -2.5e-7);
        w.set("w x", 0, 1.0 / 3.0);
        ModelFile {
            kind: "test".into(),
            classes: vec!["A".into(), "B".into()],
            metadata: [("seed".to_string(), "1".to_string()), ("note".into(), "two words".into())]
                .into_iter()
                .collect(),
            weights: w,
        }
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = sample();
        let text = m.to_text();
        let back = ModelFile::parse(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = sample().to_text().replace("version 1", "version 7");
        let err = ModelFile::parse(&text).unwrap_err();
        assert!(err.to_string().starts_with("unsupported model version"), "{err}");
    }

    #[test]
    fn truncation_reports_byte_offset() {
        let text = sample().to_text();
        let cut = text.find("w the").unwrap();
        match ModelFile::parse(&text[..cut]).unwrap_err() {
            Error::ModelParse { offset, message } => {
                assert_eq!(offset, cut);
                assert!(message.contains("truncated"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn garbage_weight_is_located() {
        let text = sample().to_text().replace("0.1", "zero");
        let off = text.find("bias").unwrap();
        match ModelFile::parse(&text).unwrap_err() {
            Error::ModelParse { offset, .. } => assert_eq!(offset, off),
            e => panic!("unexpected {e}"),
        }
    }
}
