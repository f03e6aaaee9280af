//! SemEval stance scoring, confusion matrices and k-fold plans.
//!
//! The headline metric is the mean of the Favor and Against F1 scores. None
//! still takes part in the confusion counts (a gold None predicted Favor is a
//! Favor false positive) but its own F1 is left out of the average.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::label::StanceLabel;

/// Counts indexed `[gold][pred]` in canonical class order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ConfusionMatrix(pub [[u64; 3]; 3]);

impl ConfusionMatrix {
    pub fn add(&mut self, gold: StanceLabel, pred: StanceLabel) {
        self.0[gold.index()][pred.index()] += 1;
    }

    pub fn get(&self, gold: StanceLabel, pred: StanceLabel) -> u64 {
        self.0[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn gold_count(&self, class: StanceLabel) -> u64 {
        self.0[class.index()].iter().sum()
    }

    pub fn predicted_count(&self, class: StanceLabel) -> u64 {
        self.0.iter().map(|row| row[class.index()]).sum()
    }

    pub fn true_positives(&self, class: StanceLabel) -> u64 {
        self.get(class, class)
    }

    pub fn precision(&self, class: StanceLabel) -> f64 {
        ratio(self.true_positives(class), self.predicted_count(class))
    }

    pub fn recall(&self, class: StanceLabel) -> f64 {
        ratio(self.true_positives(class), self.gold_count(class))
    }

    /// F1 with the convention that 0/0 terms are 0.
    pub fn f1(&self, class: StanceLabel) -> f64 {
        let p = self.precision(class);
        let r = self.recall(class);
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn scores(&self) -> StanceScores {
        let f_favor = self.f1(StanceLabel::Favor);
        let f_against = self.f1(StanceLabel::Against);
        StanceScores { f_favor, f_against, f_avg: (f_favor + f_against) / 2.0 }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StanceScores {
    pub f_favor: f64,
    pub f_against: f64,
    pub f_avg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicReport {
    pub scores: StanceScores,
    pub confusion: ConfusionMatrix,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_topic: BTreeMap<String, TopicReport>,
    /// Scores over the pooled confusion of all topics.
    pub overall: StanceScores,
    pub confusion: ConfusionMatrix,
}

impl EvalReport {
    /// Polar classes present in gold whose recall is zero, per topic. A
    /// non-empty result means the model collapsed onto the other classes.
    pub fn collapsed_classes(&self) -> Vec<(String, StanceLabel)> {
        let mut out = Vec::new();
        for (topic, rep) in &self.per_topic {
            for class in [StanceLabel::Against, StanceLabel::Favor] {
                if rep.confusion.gold_count(class) > 0 && rep.confusion.true_positives(class) == 0 {
                    out.push((topic.clone(), class));
                }
            }
        }
        out
    }
}

pub fn confusion(gold: &[StanceLabel], pred: &[StanceLabel]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch { left: gold.len(), right: pred.len() });
    }
    let mut m = ConfusionMatrix::default();
    for (&g, &p) in gold.iter().zip(pred) {
        m.add(g, p);
    }
    Ok(m)
}

/// Scores predictions per topic and over all topics pooled.
pub fn score_semeval<S: AsRef<str>>(
    gold: &[StanceLabel],
    pred: &[StanceLabel],
    topics: &[S],
) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch { left: gold.len(), right: pred.len() });
    }
    if gold.len() != topics.len() {
        return Err(Error::LengthMismatch { left: gold.len(), right: topics.len() });
    }
    let mut pooled = ConfusionMatrix::default();
    let mut by_topic: BTreeMap<String, (ConfusionMatrix, usize)> = BTreeMap::new();
    for ((&g, &p), t) in gold.iter().zip(pred).zip(topics) {
        pooled.add(g, p);
        let entry = by_topic.entry(String::from(t.as_ref())).or_default();
        entry.0.add(g, p);
        entry.1 += 1;
    }
    let per_topic = by_topic
        .into_iter()
        .map(|(t, (m, count))| (t, TopicReport { scores: m.scores(), confusion: m, count }))
        .collect();
    Ok(EvalReport { per_topic, overall: pooled.scores(), confusion: pooled })
}

/// Fold assignment for k-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Indices held out in `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| f != fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle of `0..n` followed by round-robin fold assignment.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || n < k {
        return Err(Error::InvalidFolds { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = alloc::vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan { k, assignments })
}
