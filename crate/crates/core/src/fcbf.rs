//! Fast Correlation-Based Filter: keep features whose symmetrical uncertainty
//! with the class reaches a threshold, then walk them in descending order and
//! drop every later feature that an earlier survivor covers as an approximate
//! Markov blanket.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::info_theory::symmetrical_uncertainty;
use crate::preprocess::DiscreteDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature_index: usize,
    pub su_to_class: f64,
}

/// Features sorted by SU to the class, descending; ties by ascending index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedList {
    entries: Vec<FeatureScore>,
}

impl RankedList {
    pub fn from_scores(mut entries: Vec<FeatureScore>) -> Self {
        entries.sort_by(rank_order);
        entries.dedup_by_key(|e| e.feature_index);
        Self { entries }
    }

    /// Keeps the scores at or above `delta`, ranked.
    pub fn above_threshold(scores: &[f64], delta: f64) -> Self {
        Self::from_scores(
            scores
                .iter()
                .enumerate()
                .filter(|(_, &su)| su >= delta)
                .map(|(feature_index, &su_to_class)| FeatureScore {
                    feature_index,
                    su_to_class,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[FeatureScore] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn rank_order(a: &FeatureScore, b: &FeatureScore) -> Ordering {
    b.su_to_class
        .total_cmp(&a.su_to_class)
        .then(a.feature_index.cmp(&b.feature_index))
}

/// One redundancy decision: `removed` was covered by `covered_by`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub removed: usize,
    pub covered_by: usize,
    pub su_pair: f64,
    pub su_to_class: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Selected feature indices in rank order.
    pub selected: Vec<usize>,
    /// SU to the class for each entry of `selected`.
    pub scores: Vec<f64>,
    pub removals: Vec<Removal>,
    pub elapsed_seconds: f64,
}

impl SelectionResult {
    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }
}

/// SU of every feature against the class, in feature order.
pub fn class_scores(data: &DiscreteDataset) -> Vec<f64> {
    let class = data.class_column();
    data.columns()
        .par_iter()
        .map(|c| symmetrical_uncertainty(c, class).expect("columns share the class length"))
        .collect()
}

pub fn relevance_pass(data: &DiscreteDataset, delta: f64) -> RankedList {
    RankedList::above_threshold(&class_scores(data), delta)
}

/// Removes redundant features from `ranked` using `pair_su(p, q)` as the
/// feature-feature SU. Returns the survivors (in rank order) and the removal
/// log.
///
/// For a fixed predominant feature each later candidate's fate depends only on
/// its own pair value, so the candidates are scored in parallel.
pub(crate) fn eliminate_redundant<F>(ranked: &RankedList, pair_su: F) -> (Vec<FeatureScore>, Vec<Removal>)
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let mut alive = ranked.entries.clone();
    let mut removals = Vec::new();
    let mut p = 0;
    while p < alive.len() {
        let predominant = alive[p].feature_index;
        let pair_values: Vec<f64> = alive[p + 1..]
            .par_iter()
            .map(|q| pair_su(predominant, q.feature_index))
            .collect();
        let mut kept = alive[..=p].to_vec();
        for (q, su_pair) in alive[p + 1..].iter().zip(pair_values) {
            if su_pair >= q.su_to_class {
                removals.push(Removal {
                    removed: q.feature_index,
                    covered_by: predominant,
                    su_pair,
                    su_to_class: q.su_to_class,
                });
            } else {
                kept.push(*q);
            }
        }
        alive = kept;
        p += 1;
    }
    (alive, removals)
}

pub fn redundancy_pass(ranked: &RankedList, data: &DiscreteDataset) -> SelectionResult {
    let (kept, removals) = eliminate_redundant(ranked, |p, q| {
        symmetrical_uncertainty(data.column(p), data.column(q)).expect("columns share the dataset length")
    });
    SelectionResult {
        selected: kept.iter().map(|s| s.feature_index).collect(),
        scores: kept.iter().map(|s| s.su_to_class).collect(),
        removals,
        elapsed_seconds: 0.0,
    }
}

pub fn fcbf(data: &DiscreteDataset, delta: f64) -> SelectionResult {
    let start = Instant::now();
    let ranked = relevance_pass(data, delta);
    let mut result = redundancy_pass(&ranked, data);
    result.elapsed_seconds = start.elapsed().as_secs_f64();
    result
}
