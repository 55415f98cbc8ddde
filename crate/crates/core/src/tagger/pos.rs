use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Universal part-of-speech tags (the twelve-tag universal tagset).
///
/// Variants are declared in lexicographic name order; the discriminant is the
/// class index used by the tagger, so ties break toward the smaller name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UniversalPos {
    Adj,
    Adp,
    Adv,
    Conj,
    Det,
    Noun,
    Num,
    Pron,
    Prt,
    Punct,
    Verb,
    X,
}

impl UniversalPos {
    pub const ALL: [UniversalPos; 12] = [
        UniversalPos::Adj,
        UniversalPos::Adp,
        UniversalPos::Adv,
        UniversalPos::Conj,
        UniversalPos::Det,
        UniversalPos::Noun,
        UniversalPos::Num,
        UniversalPos::Pron,
        UniversalPos::Prt,
        UniversalPos::Punct,
        UniversalPos::Verb,
        UniversalPos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UniversalPos::Adj => "ADJ",
            UniversalPos::Adp => "ADP",
            UniversalPos::Adv => "ADV",
            UniversalPos::Conj => "CONJ",
            UniversalPos::Det => "DET",
            UniversalPos::Noun => "NOUN",
            UniversalPos::Num => "NUM",
            UniversalPos::Pron => "PRON",
            UniversalPos::Prt => "PRT",
            UniversalPos::Punct => "PUNCT",
            UniversalPos::Verb => "VERB",
            UniversalPos::X => "X",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<UniversalPos> {
        Self::ALL.get(i).copied()
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|t| t.as_str()).collect()
    }

    /// Maps a Penn Treebank or Universal Dependencies tag onto this tagset.
    pub fn from_foreign(tag: &str) -> Option<UniversalPos> {
        use UniversalPos::*;
        let t = match tag {
            "!" | "#" | "$" | "''" | "``" | "(" | ")" | "," | "." | ":" | "?" | "-LRB-" | "-RRB-"
            | "HYPH" | "NFP" => Punct,
            "CC" | "CCONJ" => Conj,
            "CD" => Num,
            "DT" | "EX" | "PDT" | "WDT" => Det,
            "FW" | "LS" | "SYM" | "UH" | "-NONE-" | "INTJ" | "ADD" | "GW" | "XX" | "AFX" => X,
            "IN" | "SCONJ" => Adp,
            "JJ" | "JJR" | "JJS" => Adj,
            "MD" | "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" | "AUX" => Verb,
            "NN" | "NNS" | "NNP" | "NNPS" | "PROPN" => Noun,
            "POS" | "RP" | "TO" | "PART" => Prt,
            "PRP" | "PRP$" | "WP" | "WP$" => Pron,
            "RB" | "RBR" | "RBS" | "WRB" => Adv,
            other => {
                let upper = other.to_ascii_uppercase();
                return UniversalPos::ALL.into_iter().find(|t| t.as_str() == upper);
            }
        };
        Some(t)
    }
}

impl fmt::Display for UniversalPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UniversalPos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let upper = s.trim().to_ascii_uppercase();
        UniversalPos::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == upper)
            .ok_or_else(|| {
                let hint = match UniversalPos::from_foreign(s.trim()) {
                    Some(u) => format!(
                        " (a Penn/UD tag; its universal equivalent is {u}; enable the tag mapping table to convert)"
                    ),
                    None => format!(" (valid tags: {})", UniversalPos::names().join(", ")),
                };
                Error::UnknownTag {
                    tag: s.to_string(),
                    hint,
                }
            })
    }
}

impl Serialize for UniversalPos {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for UniversalPos {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_round_trip() {
        let names = UniversalPos::names();
        let mut sorted = names.clone();
        sorted.sort_unstable();
        assert_eq!(names, sorted);
        for t in UniversalPos::ALL {
            assert_eq!(t.as_str().parse::<UniversalPos>().unwrap(), t);
            assert_eq!(UniversalPos::from_index(t.index()), Some(t));
        }
        assert_eq!("noun".parse::<UniversalPos>().unwrap(), UniversalPos::Noun);
    }

    #[test]
    fn penn_tag_error_suggests_mapping() {
        let err = "NN".parse::<UniversalPos>().unwrap_err().to_string();
        assert!(err.contains("NOUN") && err.contains("mapping"), "{err}");
        assert_eq!(UniversalPos::from_foreign("NN"), Some(UniversalPos::Noun));
        assert_eq!(UniversalPos::from_foreign("PRP$"), Some(UniversalPos::Pron));
        assert_eq!(UniversalPos::from_foreign("PROPN"), Some(UniversalPos::Noun));
        assert_eq!(UniversalPos::from_foreign("VERB"), Some(UniversalPos::Verb));
        assert_eq!(UniversalPos::from_foreign("ZZ"), None);
    }
}
