//! Multiclass averaged perceptron over sparse string features.
//!
//! Shared by the POS tagger and the dataset probes. Classes are dense indices
//! `0..n_classes`; callers keep them in lexicographic name order so that the
//! first-maximum rule in [`Weights::predict`] breaks ties by name.

use std::collections::HashMap;

/// One feature occurrence: name and value.
pub type Feature = (String, f64);

#[derive(Debug, Clone)]
struct Row {
    weights: Vec<f64>,
    totals: Vec<f64>,
    stamps: Vec<u64>,
}

impl Row {
    fn new(n: usize) -> Self {
        Row {
            weights: vec![0.0; n],
            totals: vec![0.0; n],
            stamps: vec![0; n],
        }
    }
}

/// Trainer state. Consumed by [`AveragedPerceptron::finish`].
#[derive(Debug, Clone)]
pub struct AveragedPerceptron {
    n_classes: usize,
    rows: HashMap<String, Row>,
    instances: u64,
}

impl AveragedPerceptron {
    pub fn new(n_classes: usize) -> Self {
        assert!(n_classes > 0);
        AveragedPerceptron {
            n_classes,
            rows: HashMap::new(),
            instances: 0,
        }
    }

    pub fn scores(&self, features: &[Feature]) -> Vec<f64> {
        let mut scores = vec![0.0; self.n_classes];
        for (name, value) in features {
            if let Some(row) = self.rows.get(name) {
                for (s, w) in scores.iter_mut().zip(&row.weights) {
                    *s += w * value;
                }
            }
        }
        scores
    }

    pub fn predict(&self, features: &[Feature]) -> usize {
        argmax(&self.scores(features))
    }

    /// Records one training instance and, on a mistake, moves weight from
    /// `guess` to `truth` for every active feature.
    pub fn update(&mut self, truth: usize, guess: usize, features: &[Feature]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        let now = self.instances;
        let n = self.n_classes;
        for (name, value) in features {
            let row = self.rows.entry(name.clone()).or_insert_with(|| Row::new(n));
            for (class, delta) in [(truth, *value), (guess, -*value)] {
                row.totals[class] += (now - row.stamps[class]) as f64 * row.weights[class];
                row.stamps[class] = now;
                row.weights[class] += delta;
            }
        }
    }

    /// Averages every weight over all recorded instances.
    pub fn finish(self) -> Weights {
        let instances = self.instances.max(1) as f64;
        let now = self.instances;
        let mut map = HashMap::with_capacity(self.rows.len());
        for (name, row) in self.rows {
            let averaged: Vec<f64> = (0..self.n_classes)
                .map(|c| {
                    let total = row.totals[c] + (now - row.stamps[c]) as f64 * row.weights[c];
                    total / instances
                })
                .collect();
            if averaged.iter().any(|w| *w != 0.0) {
                map.insert(name, averaged);
            }
        }
        Weights {
            n_classes: self.n_classes,
            map,
        }
    }
}

/// Frozen averaged weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    n_classes: usize,
    map: HashMap<String, Vec<f64>>,
}

impl Weights {
    pub fn empty(n_classes: usize) -> Self {
        Weights {
            n_classes,
            map: HashMap::new(),
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn set(&mut self, feature: &str, class: usize, weight: f64) {
        let n = self.n_classes;
        self.map
            .entry(feature.to_string())
            .or_insert_with(|| vec![0.0; n])[class] = weight;
    }

    pub fn get(&self, feature: &str, class: usize) -> f64 {
        self.map.get(feature).map_or(0.0, |r| r[class])
    }

    pub fn scores(&self, features: &[Feature]) -> Vec<f64> {
        let mut scores = vec![0.0; self.n_classes];
        for (name, value) in features {
            if let Some(row) = self.map.get(name) {
                for (s, w) in scores.iter_mut().zip(row) {
                    *s += w * value;
                }
            }
        }
        scores
    }

    pub fn predict(&self, features: &[Feature]) -> usize {
        argmax(&self.scores(features))
    }

    /// Non-zero `(feature, class, weight)` triples sorted by feature then class.
    pub fn triples(&self) -> Vec<(&str, usize, f64)> {
        let mut keys: Vec<&String> = self.map.keys().collect();
        keys.sort_unstable();
        let mut out = Vec::new();
        for k in keys {
            for (c, w) in self.map[k].iter().enumerate() {
                if *w != 0.0 {
                    out.push((k.as_str(), c, *w));
                }
            }
        }
        out
    }

    pub fn all_finite(&self) -> bool {
        self.map.values().flatten().all(|w| w.is_finite())
    }
}

/// Index of the first maximum.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}
