//! Seeded generator for tagged English-like sentences and NLI pairs.
//!
//! A small phrase-structure grammar over a lexicon of common words plus
//! pseudo-words with regular English morphology. Several words are ambiguous
//! between classes (`walk`, `book`, `that`, `to`, `up`, `'s`, ...), so a tagger
//! has to use context. Used for the bundled tagger corpus and for test
//! fixtures; nothing here is meant to resemble a real corpus distribution.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Dataset, NliLabel, NliPair, Split};
use crate::tagger::{TaggedSentence, UniversalPos};
use crate::tokenizer::detokenize;

use UniversalPos::*;

const LEXICON_SEED: u64 = 0x1e_c5ee_d;

struct Verb {
    base: String,
    third: String,
    past: String,
    ing: String,
}

struct Noun {
    sg: String,
    pl: String,
}

struct Lexicon {
    nouns: Vec<Noun>,
    verbs: Vec<Verb>,
    phrasal: Vec<usize>,
    adjs: Vec<String>,
    advs: Vec<String>,
}

const IRREGULAR_VERBS: &[(&str, &str, &str, &str)] = &[
    ("see", "sees", "saw", "seeing"),
    ("eat", "eats", "ate", "eating"),
    ("run", "runs", "ran", "running"),
    ("take", "takes", "took", "taking"),
    ("give", "gives", "gave", "giving"),
    ("make", "makes", "made", "making"),
    ("find", "finds", "found", "finding"),
    ("hold", "holds", "held", "holding"),
    ("read", "reads", "read", "reading"),
    ("light", "lights", "lit", "lighting"),
    ("bring", "brings", "brought", "bringing"),
];

const REGULAR_VERBS: &[&str] = &[
    "walk", "play", "watch", "like", "love", "work", "open", "carry", "fish", "train", "dance",
    "book", "park", "pick", "turn", "look", "call", "help", "clean", "paint", "visit", "cook",
    "want", "need", "follow", "answer", "move", "push", "pull", "wash", "start", "kick",
];

const PHRASAL: &[&str] = &["pick", "turn", "look", "take", "give", "call", "clean", "bring"];

const NOUNS: &[&str] = &[
    "man", "woman", "dog", "cat", "child", "car", "house", "city", "book", "park", "fish",
    "light", "train", "dance", "walk", "play", "watch", "work", "love", "water", "food", "ball",
    "table", "street", "door", "girl", "boy", "friend", "teacher", "student", "game", "river",
    "garden", "bone", "hat", "bike", "phone", "morning", "day", "year", "shop", "song", "window",
    "box", "bus", "church", "letter", "picture", "field", "horse", "room", "tree", "kitchen",
];

const ADJS: &[&str] = &[
    "big", "small", "red", "happy", "old", "young", "tall", "quick", "fast", "good", "new",
    "long", "green", "quiet", "dark", "warm", "cold", "busy", "little", "short", "bright", "empty",
];

const ADVS: &[&str] = &[
    "quickly", "slowly", "often", "always", "here", "there", "again", "really", "soon", "today",
    "fast", "back", "together", "sometimes", "outside",
];

const DET_SG: &[&str] = &["the", "a", "this", "that", "every", "each", "some", "no", "another"];
const DET_PL: &[&str] = &["the", "these", "those", "some", "no", "many", "all"];
const POSS: &[&str] = &["his", "her", "their", "my", "our", "your"];
const SUBJ_SG: &[&str] = &["he", "she", "it"];
const SUBJ_PL: &[&str] = &["they", "we", "you", "i"];
const OBJ: &[&str] = &["him", "her", "it", "them", "us", "me", "you", "everything", "everyone"];
const ADPS: &[&str] = &[
    "in", "on", "at", "with", "near", "under", "by", "from", "for", "into", "over", "after",
    "about", "like", "to", "behind", "without",
];
const CONJS: &[&str] = &["and", "but", "or"];
const NUMS: &[&str] = &["two", "three", "four", "five", "ten", "6", "12", "20", "100", "1990", "2015", "3.5", "1,000"];
const PARTICLES: &[&str] = &["up", "out", "off", "down"];
const MODALS: &[&str] = &["will", "can", "should", "could", "would", "must"];
const FOREIGN: &[&str] = &["etc", "per", "se", "via", "ad", "hoc"];

/// Words reserved for planted cues; ordinary generation avoids them.
const CUE_WORDS: &[&str] = &["not", "never", "n't", "someone", "something", "probably", "might"];

const ONSETS: &[&str] = &[
    "b", "bl", "br", "d", "dr", "f", "fl", "g", "gr", "k", "l", "m", "n", "p", "pl", "pr", "r",
    "s", "sl", "st", "t", "tr", "v", "z",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou", "ee"];
const CODAS: &[&str] = &["", "", "n", "r", "l", "m", "nt", "st", "ck", "p"];

fn pseudo_stem(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    for _ in 0..rng.gen_range(1..=2) {
        s.push_str(ONSETS.choose(rng).unwrap());
        s.push_str(VOWELS.choose(rng).unwrap());
    }
    s.push_str(CODAS.choose(rng).unwrap());
    s
}

fn ends_consonant_y(w: &str) -> bool {
    let b = w.as_bytes();
    b.len() >= 2 && b[b.len() - 1] == b'y' && !b"aeiou".contains(&b[b.len() - 2])
}

fn regular_verb(base: &str) -> Verb {
    let third = if ends_consonant_y(base) {
        format!("{}ies", &base[..base.len() - 1])
    } else if ["s", "x", "z", "ch", "sh"].iter().any(|e| base.ends_with(e)) {
        format!("{base}es")
    } else {
        format!("{base}s")
    };
    let past = if base.ends_with('e') {
        format!("{base}d")
    } else if ends_consonant_y(base) {
        format!("{}ied", &base[..base.len() - 1])
    } else {
        format!("{base}ed")
    };
    let ing = if base.ends_with('e') && !base.ends_with("ee") {
        format!("{}ing", &base[..base.len() - 1])
    } else {
        format!("{base}ing")
    };
    Verb {
        base: base.into(),
        third,
        past,
        ing,
    }
}

fn plural(sg: &str) -> String {
    match sg {
        "man" => "men".into(),
        "woman" => "women".into(),
        "child" => "children".into(),
        "fish" => "fish".into(),
        _ if ends_consonant_y(sg) => format!("{}ies", &sg[..sg.len() - 1]),
        _ if ["s", "x", "z", "ch", "sh"].iter().any(|e| sg.ends_with(e)) => format!("{sg}es"),
        _ => format!("{sg}s"),
    }
}

impl Lexicon {
    fn build() -> Lexicon {
        let mut rng = ChaCha8Rng::seed_from_u64(LEXICON_SEED);
        let mut reserved: HashSet<String> = [
            DET_SG, DET_PL, POSS, SUBJ_SG, SUBJ_PL, OBJ, ADPS, CONJS, NUMS, PARTICLES, MODALS, FOREIGN, CUE_WORDS,
            NOUNS, ADJS, ADVS, REGULAR_VERBS,
        ]
        .concat()
        .into_iter()
        .map(str::to_string)
        .collect();
        let mut fresh = |rng: &mut ChaCha8Rng, suffixes: &[&str]| loop {
            let w = format!("{}{}", pseudo_stem(rng), suffixes.choose(rng).unwrap());
            if w.len() > 3 && reserved.insert(w.clone()) {
                return w;
            }
        };

        let mut verbs: Vec<Verb> = IRREGULAR_VERBS
            .iter()
            .map(|(b, t, p, i)| Verb {
                base: b.to_string(),
                third: t.to_string(),
                past: p.to_string(),
                ing: i.to_string(),
            })
            .collect();
        verbs.extend(REGULAR_VERBS.iter().map(|b| regular_verb(b)));
        let mut nouns: Vec<Noun> = NOUNS
            .iter()
            .map(|n| Noun {
                sg: n.to_string(),
                pl: plural(n),
            })
            .collect();
        let mut adjs: Vec<String> = ADJS.iter().map(|s| s.to_string()).collect();
        let mut advs: Vec<String> = ADVS.iter().map(|s| s.to_string()).collect();

        for _ in 0..400 {
            let sg = fresh(&mut rng, &["tion", "ness", "ment", "er", "ist", "ity", "ance", "ship", ""]);
            nouns.push(Noun { pl: plural(&sg), sg });
        }
        for _ in 0..200 {
            verbs.push(regular_verb(&fresh(&mut rng, &["ize", "ate", "en", "ify", ""])));
        }
        for _ in 0..150 {
            let adj = fresh(&mut rng, &["ous", "ful", "ive", "al", "ic", "less", "able"]);
            advs.push(format!("{adj}ly"));
            adjs.push(adj);
        }
        let phrasal = PHRASAL
            .iter()
            .map(|p| verbs.iter().position(|v| v.base == *p).expect("phrasal verb in lexicon"))
            .collect();
        Lexicon {
            nouns,
            verbs,
            phrasal,
            adjs,
            advs,
        }
    }
}

/// Skewed index: small indices (the real words) are much more frequent.
fn zipf(rng: &mut ChaCha8Rng, len: usize) -> usize {
    let u: f64 = rng.gen();
    ((u.powf(2.2) * len as f64) as usize).min(len - 1)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tense {
    Present,
    Past,
}

/// A label-indicative cue placed in a generated hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cue {
    /// `not` / `never`, for contradiction.
    Negation,
    /// `someone` / `something`, for entailment.
    Indefinite,
    /// `probably` / `might`, for neutral.
    Hedge,
}

impl Cue {
    pub fn for_label(label: NliLabel) -> Cue {
        match label {
            NliLabel::Contradiction => Cue::Negation,
            NliLabel::Entailment => Cue::Indefinite,
            NliLabel::Neutral => Cue::Hedge,
        }
    }
}

struct Gen<'a> {
    lex: &'a Lexicon,
    rng: ChaCha8Rng,
    out: Vec<(String, UniversalPos)>,
}

impl Gen<'_> {
    fn push(&mut self, w: &str, t: UniversalPos) {
        self.out.push((w.to_string(), t));
    }

    fn pick(&mut self, words: &[&str], t: UniversalPos) {
        let w = *words.choose(&mut self.rng).unwrap();
        self.push(w, t);
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn adj(&mut self) {
        if self.chance(0.1) {
            self.push("very", Adv);
        }
        let i = zipf(&mut self.rng, self.lex.adjs.len());
        let w = self.lex.adjs[i].clone();
        self.push(&w, Adj);
    }

    fn adv(&mut self) {
        let i = zipf(&mut self.rng, self.lex.advs.len());
        let w = self.lex.advs[i].clone();
        self.push(&w, Adv);
    }

    fn noun(&mut self, plural: bool) {
        let i = zipf(&mut self.rng, self.lex.nouns.len());
        let n = &self.lex.nouns[i];
        let w = if plural { n.pl.clone() } else { n.sg.clone() };
        self.push(&w, Noun);
    }

    /// Returns whether the phrase is plural.
    fn np(&mut self, depth: u32, subject: bool) -> bool {
        let r: f64 = self.rng.gen();
        if r < 0.14 {
            let plural = if subject {
                let pl = self.chance(0.5);
                self.pick(if pl { SUBJ_PL } else { SUBJ_SG }, Pron);
                pl
            } else {
                self.pick(OBJ, Pron);
                false
            };
            return plural;
        }
        if r < 0.20 {
            self.pick(NUMS, Num);
            self.noun(true);
            return true;
        }
        let plural = self.chance(0.3);
        if r < 0.27 && !plural {
            self.pick(DET_SG, Det);
            self.noun(false);
            self.push("'s", Prt);
            self.noun(false);
            return false;
        }
        match self.rng.gen_range(0..10) {
            0..=1 => self.pick(POSS, Pron),
            2 if plural => {}
            _ => {
                let dets = if plural { DET_PL } else { DET_SG };
                let d = *dets.choose(&mut self.rng).unwrap();
                let adj_follows = self.chance(0.35);
                self.push(d, Det);
                if adj_follows {
                    self.adj();
                }
            }
        }
        if self.chance(0.1) {
            self.adj();
        }
        self.noun(plural);
        if depth == 0 && self.chance(0.2) {
            self.pp(depth + 1);
        }
        plural
    }

    fn pp(&mut self, depth: u32) {
        self.pick(ADPS, Adp);
        self.np(depth, false);
    }

    fn finite(&mut self, v: usize, plural: bool, tense: Tense) {
        let verb = &self.lex.verbs[v];
        let w = match (tense, plural) {
            (Tense::Past, _) => verb.past.clone(),
            (Tense::Present, false) => verb.third.clone(),
            (Tense::Present, true) => verb.base.clone(),
        };
        self.push(&w, Verb);
    }

    fn base(&mut self, v: usize) {
        let w = self.lex.verbs[v].base.clone();
        self.push(&w, Verb);
    }

    fn verb_index(&mut self) -> usize {
        zipf(&mut self.rng, self.lex.verbs.len())
    }

    fn copula(&mut self, plural: bool, tense: Tense) {
        let w = match (tense, plural) {
            (Tense::Present, false) => "is",
            (Tense::Present, true) => "are",
            (Tense::Past, false) => "was",
            (Tense::Past, true) => "were",
        };
        self.push(w, Verb);
    }

    fn object_tail(&mut self, depth: u32) {
        self.np(depth, false);
        if depth == 0 && self.chance(0.2) {
            self.pp(depth + 1);
        }
    }

    /// Verb phrase. `cue` forces a negation or hedge into the phrase; with
    /// `natural` set, ordinary generation may use negation and modals too.
    fn vp(&mut self, plural: bool, depth: u32, cue: Option<Cue>, natural: bool) {
        let tense = if self.chance(0.5) { Tense::Present } else { Tense::Past };
        match cue {
            Some(Cue::Negation) => {
                if self.chance(0.5) {
                    self.push("never", Adv);
                    let v = self.verb_index();
                    self.finite(v, plural, tense);
                } else {
                    let aux = match (tense, plural) {
                        (Tense::Present, false) => "does",
                        (Tense::Present, true) => "do",
                        (Tense::Past, _) => "did",
                    };
                    self.push(aux, Verb);
                    self.push("not", Adv);
                    let v = self.verb_index();
                    self.base(v);
                }
                self.object_tail(depth);
                return;
            }
            Some(Cue::Hedge) => {
                if self.chance(0.5) {
                    self.push("probably", Adv);
                    let v = self.verb_index();
                    self.finite(v, plural, tense);
                } else {
                    self.push("might", Verb);
                    let v = self.verb_index();
                    self.base(v);
                }
                self.object_tail(depth);
                return;
            }
            _ => {}
        }
        match self.rng.gen_range(0..100) {
            0..=14 => {
                self.copula(plural, tense);
                if natural && self.chance(0.15) {
                    self.push("not", Adv);
                }
                self.adj();
            }
            15..=24 => {
                let m = *MODALS.choose(&mut self.rng).unwrap();
                self.push(m, Verb);
                if natural && self.chance(0.15) {
                    self.push("not", Adv);
                }
                let v = self.verb_index();
                self.base(v);
                self.object_tail(depth);
            }
            25..=54 => {
                if self.chance(0.2) {
                    self.adv();
                }
                let v = self.verb_index();
                self.finite(v, plural, tense);
                self.object_tail(depth);
                if self.chance(0.2) {
                    self.adv();
                }
            }
            55..=64 => {
                let v = self.lex.phrasal[self.rng.gen_range(0..self.lex.phrasal.len())];
                self.finite(v, plural, tense);
                self.pick(PARTICLES, Prt);
                self.np(depth + 1, false);
            }
            65..=72 => {
                let v = self.verb_index();
                self.finite(v, plural, tense);
                self.push("to", Prt);
                let v2 = self.verb_index();
                self.base(v2);
                self.object_tail(depth + 1);
            }
            73..=79 if depth == 0 => {
                let v = self.verb_index();
                self.finite(v, plural, tense);
                self.push("that", Adp);
                self.clause(depth + 1, None, natural);
            }
            80..=86 => {
                let aux = match (tense, plural) {
                    (Tense::Present, false) => "does",
                    (Tense::Present, true) => "do",
                    (Tense::Past, _) => "did",
                };
                self.push(aux, Verb);
                if natural {
                    self.push("n't", Adv);
                } else {
                    self.adv();
                }
                let v = self.verb_index();
                self.base(v);
                self.object_tail(depth);
            }
            87..=93 => {
                self.copula(plural, Tense::Present);
                let v = self.verb_index();
                let w = self.lex.verbs[v].ing.clone();
                self.push(&w, Verb);
                self.object_tail(depth);
            }
            _ => {
                let v = self.verb_index();
                self.finite(v, plural, tense);
                self.adv();
            }
        }
    }

    fn clause(&mut self, depth: u32, cue: Option<Cue>, natural: bool) {
        let someone = cue == Some(Cue::Indefinite) && self.chance(0.5);
        let plural = if someone {
            self.push("someone", Noun);
            false
        } else if natural && self.chance(0.05) {
            self.push("it", Pron);
            self.push("'s", Verb);
            self.adj();
            return;
        } else {
            self.np(depth, true)
        };
        if cue == Some(Cue::Indefinite) && !someone {
            let v = self.verb_index();
            let tense = if self.chance(0.5) { Tense::Present } else { Tense::Past };
            self.finite(v, plural, tense);
            self.push("something", Noun);
            return;
        }
        self.vp(plural, depth, cue, natural);
    }

    fn sentence(&mut self, cue: Option<Cue>, natural: bool) -> TaggedSentence {
        self.out.clear();
        self.clause(0, cue, natural);
        if self.chance(0.15) {
            if self.chance(0.3) {
                self.push(",", Punct);
            }
            self.pick(CONJS, Conj);
            self.clause(1, None, natural);
        }
        if self.chance(0.01) {
            self.push(",", Punct);
            self.pick(FOREIGN, X);
        }
        let end = *[".", ".", ".", ".", "!", "?"].choose(&mut self.rng).unwrap();
        self.push(end, Punct);
        let mut tokens = std::mem::take(&mut self.out);
        capitalize_first(&mut tokens);
        TaggedSentence::from_pairs(&tokens)
    }
}

fn capitalize_first(tokens: &mut [(String, UniversalPos)]) {
    if let Some((w, _)) = tokens.first_mut() {
        let mut c = w.chars();
        if let Some(first) = c.next() {
            *w = first.to_uppercase().chain(c).collect();
        }
    }
    for (w, _) in tokens.iter_mut().skip(1) {
        if w == "i" {
            *w = "I".into();
        }
    }
}

fn lexicon() -> &'static Lexicon {
    static LEX: std::sync::OnceLock<Lexicon> = std::sync::OnceLock::new();
    LEX.get_or_init(Lexicon::build)
}

/// `n` universal-tagged sentences.
pub fn tagged_sentences(n: usize, seed: u64) -> Vec<TaggedSentence> {
    let mut g = Gen {
        lex: lexicon(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        out: Vec::new(),
    };
    (0..n).map(|_| g.sentence(None, true)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    /// Probability that a hypothesis carries the cue of its own label; the
    /// rest carry a cue of another label.
    pub cue_consistency: f64,
    /// Probability that the hypothesis reuses the premise subject.
    pub subject_overlap: f64,
}

impl Default for PairOptions {
    fn default() -> Self {
        PairOptions {
            cue_consistency: 0.95,
            subject_overlap: 0.5,
        }
    }
}

/// NLI pairs with balanced labels and a planted hypothesis cue. Premises and
/// the non-cue part of each hypothesis never contain cue words.
pub fn nli_pairs(name: &str, n: usize, seed: u64, options: PairOptions) -> Dataset {
    let mut g = Gen {
        lex: lexicon(),
        rng: ChaCha8Rng::seed_from_u64(seed),
        out: Vec::new(),
    };
    let pairs = (0..n)
        .map(|i| {
            let label = NliLabel::ALL[g.rng.gen_range(0..3)];
            let premise = g.sentence(None, false);
            let cue_label = if g.chance(options.cue_consistency) {
                label
            } else {
                let others: Vec<NliLabel> = NliLabel::ALL.into_iter().filter(|l| *l != label).collect();
                *others.choose(&mut g.rng).unwrap()
            };
            let mut hypothesis = g.sentence(Some(Cue::for_label(cue_label)), false);
            if g.chance(options.subject_overlap) {
                reuse_subject(&premise, &mut hypothesis);
            }
            let mut pair = NliPair::new(
                format!("{name}-{i:06}"),
                detokenize(&premise.plain_tokens()),
                detokenize(&hypothesis.plain_tokens()),
                label,
            );
            pair.genre = Some("synthetic".into());
            pair
        })
        .collect();
    Dataset::new(name, Split::infer(name), pairs).expect("generated uids are unique")
}

/// Replaces a determiner-noun hypothesis subject with the premise's.
fn reuse_subject(premise: &TaggedSentence, hypothesis: &mut TaggedSentence) {
    let prefix = |s: &TaggedSentence| -> Option<usize> {
        let tags = s.tags();
        (tags.len() >= 2 && tags[0] == Det && tags[1] == Noun).then_some(2)
    };
    if let (Some(p), Some(h)) = (prefix(premise), prefix(hypothesis)) {
        let mut tokens = premise.tokens[..p].to_vec();
        tokens.extend_from_slice(&hypothesis.tokens[h..]);
        hypothesis.tokens = tokens;
    }
}

/// Copy of `dataset` with labels permuted by a seeded shuffle.
pub fn shuffle_labels(dataset: &Dataset, seed: u64) -> Dataset {
    let mut labels: Vec<NliLabel> = dataset.pairs.iter().map(|p| p.label).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pairs = dataset
        .pairs
        .iter()
        .zip(labels)
        .map(|(p, label)| NliPair { label, ..p.clone() })
        .collect();
    Dataset {
        name: format!("{}-shuffled", dataset.name),
        split: dataset.split,
        pairs,
    }
}
