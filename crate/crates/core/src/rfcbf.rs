//! Resampled FCBF: every symmetrical-uncertainty estimate is the mean over
//! `sampling_times` Bernoulli row subsamples drawn with probability
//! `sampling_probability`.
//!
//! Randomness is counter-based. Each subsample gets its own ChaCha stream
//! seeded from `(seed, pass, pair, iteration)`, so results do not depend on
//! how work is scheduled across threads.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcbf::{eliminate_redundant, RankedList, SelectionResult};
use crate::info_theory::{symmetrical_uncertainty_on_rows, DiscreteColumn};
use crate::preprocess::DiscreteDataset;

/// Redraws attempted before a degenerate draw falls back to the full data.
pub const MAX_REDRAWS: usize = 100;

const PASS_RELEVANCE: u64 = 1;
const PASS_PAIRWISE: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub delta: f64,
    pub sampling_times: usize,
    pub sampling_probability: f64,
    pub seed: u64,
    pub bins: u32,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            delta: 0.01,
            sampling_times: 20,
            sampling_probability: 0.5,
            seed: 42,
            bins: 10,
        }
    }
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::Parameter(format!("delta {} outside [0, 1]", self.delta)));
        }
        if self.sampling_times == 0 {
            return Err(Error::Parameter("sampling_times must be at least 1".into()));
        }
        if !(self.sampling_probability > 0.0 && self.sampling_probability <= 1.0) {
            return Err(Error::Parameter(format!(
                "sampling_probability {} outside (0, 1]",
                self.sampling_probability
            )));
        }
        if self.bins < 2 {
            return Err(Error::Parameter(format!("bins must be at least 2, got {}", self.bins)));
        }
        Ok(())
    }
}

/// Strictly increasing row indices into a parent dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsample {
    pub row_indices: Vec<usize>,
}

impl Subsample {
    pub fn full(data: &DiscreteDataset) -> Self {
        Self {
            row_indices: (0..data.n_rows()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.row_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_indices.is_empty()
    }
}

fn usable(data: &DiscreteDataset, rows: &[usize]) -> bool {
    if rows.len() < 2 {
        return false;
    }
    let codes = data.class_column().codes();
    let first = codes[rows[0]];
    rows.iter().any(|&r| codes[r] != first)
}

/// Bernoulli row subsample. Draws with fewer than two rows or a single class
/// are redrawn; after [`MAX_REDRAWS`] failures the full dataset is used.
pub fn resample<R: Rng + ?Sized>(data: &DiscreteDataset, probability: f64, rng: &mut R) -> Subsample {
    let full = Subsample::full(data);
    if !usable(data, &full.row_indices) {
        return full;
    }
    for _ in 0..MAX_REDRAWS {
        let rows: Vec<usize> = (0..data.n_rows()).filter(|_| rng.gen_bool(probability)).collect();
        if usable(data, &rows) {
            return Subsample { row_indices: rows };
        }
    }
    full
}

/// A feature or the class column of a [`DiscreteDataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRef {
    Feature(usize),
    Class,
}

impl ColumnRef {
    fn resolve(self, data: &DiscreteDataset) -> Result<&DiscreteColumn> {
        match self {
            ColumnRef::Class => Ok(data.class_column()),
            ColumnRef::Feature(i) if i < data.n_features() => Ok(data.column(i)),
            ColumnRef::Feature(i) => Err(Error::Parameter(format!(
                "feature index {i} out of range for {} features",
                data.n_features()
            ))),
        }
    }
}

fn mean_su(x: &DiscreteColumn, y: &DiscreteColumn, subsamples: &[Subsample]) -> f64 {
    let total: f64 = subsamples
        .iter()
        .map(|s| symmetrical_uncertainty_on_rows(x, y, &s.row_indices))
        .sum();
    total / subsamples.len() as f64
}

/// Mean SU of two columns over `sampling_times` subsamples drawn from `rng`.
pub fn averaged_su<R: Rng + ?Sized>(
    x: ColumnRef,
    y: ColumnRef,
    data: &DiscreteDataset,
    params: &SelectionParams,
    rng: &mut R,
) -> Result<f64> {
    params.validate()?;
    let (x, y) = (x.resolve(data)?, y.resolve(data)?);
    let subsamples: Vec<Subsample> = (0..params.sampling_times)
        .map(|_| resample(data, params.sampling_probability, rng))
        .collect();
    Ok(mean_su(x, y, &subsamples))
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5eed_u64, |acc, &p| mix(acc ^ mix(p)))
}

fn stream(seed: u64, pass: u64, pair: u64, iteration: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(&[seed, pass, pair, iteration as u64]))
}

fn draw_set(data: &DiscreteDataset, params: &SelectionParams, pass: u64, pair: u64) -> Vec<Subsample> {
    (0..params.sampling_times)
        .map(|m| {
            let mut rng = stream(params.seed, pass, pair, m);
            resample(data, params.sampling_probability, &mut rng)
        })
        .collect()
}

/// Averaged SU to the class for every feature, all scored on one shared set
/// of subsamples.
pub fn relevance_scores(data: &DiscreteDataset, params: &SelectionParams) -> Result<Vec<f64>> {
    params.validate()?;
    let subsamples = draw_set(data, params, PASS_RELEVANCE, 0);
    let class = data.class_column();
    Ok(data
        .columns()
        .par_iter()
        .map(|c| mean_su(c, class, &subsamples))
        .collect())
}

/// Averaged SU between two features on a fresh subsample set for that pair.
pub fn pairwise_su(data: &DiscreteDataset, params: &SelectionParams, p: usize, q: usize) -> f64 {
    let pair = (p * data.n_features() + q) as u64;
    let subsamples = draw_set(data, params, PASS_PAIRWISE, pair);
    mean_su(data.column(p), data.column(q), &subsamples)
}

pub fn rfcbf(data: &DiscreteDataset, params: &SelectionParams) -> Result<SelectionResult> {
    let start = Instant::now();
    let scores = relevance_scores(data, params)?;
    let ranked = RankedList::above_threshold(&scores, params.delta);
    let (kept, removals) = eliminate_redundant(&ranked, |p, q| pairwise_su(data, params, p, q));
    Ok(SelectionResult {
        selected: kept.iter().map(|s| s.feature_index).collect(),
        scores: kept.iter().map(|s| s.su_to_class).collect(),
        removals,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcbf::fcbf;
    use crate::info_theory::symmetrical_uncertainty;

    fn synthetic(m: usize, seed: u64) -> DiscreteDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let class: Vec<u32> = (0..m).map(|_| rng.gen_range(0..2)).collect();
        let noisy: Vec<u32> = class
            .iter()
            .map(|&c| if rng.gen_bool(0.8) { c } else { 1 - c })
            .collect();
        let noise: Vec<u32> = (0..m).map(|_| rng.gen_range(0..3)).collect();
        DiscreteDataset::new(
            vec![
                DiscreteColumn::from_codes(noisy).unwrap(),
                DiscreteColumn::new(noise, 3).unwrap(),
            ],
            DiscreteColumn::new(class, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn validates_params() {
        let ok = SelectionParams::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SelectionParams { delta: 1.5, ..ok },
            SelectionParams {
                sampling_times: 0,
                ..ok
            },
            SelectionParams {
                sampling_probability: 0.0,
                ..ok
            },
            SelectionParams {
                sampling_probability: 1.2,
                ..ok
            },
            SelectionParams { bins: 1, ..ok },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Parameter(_))), "{bad:?}");
        }
    }

    #[test]
    fn probability_one_keeps_every_row() {
        let d = synthetic(50, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            assert_eq!(resample(&d, 1.0, &mut rng), Subsample::full(&d));
        }
    }

    #[test]
    fn half_probability_concentrates() {
        let d = synthetic(1000, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = resample(&d, 0.5, &mut rng);
            assert!((400..=600).contains(&s.len()), "{}", s.len());
            assert!(s.row_indices.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn degenerate_draws_fall_back_to_full_data() {
        let d = DiscreteDataset::new(
            vec![DiscreteColumn::from_codes(vec![0, 1]).unwrap()],
            DiscreteColumn::from_codes(vec![0, 1]).unwrap(),
        )
        .unwrap();
        // the only usable draw is both rows, which the fallback also returns
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(resample(&d, 0.05, &mut rng).row_indices, vec![0, 1]);
        }

        let single_class = DiscreteDataset::new(
            vec![DiscreteColumn::from_codes(vec![0, 1, 1]).unwrap()],
            DiscreteColumn::from_codes(vec![0, 0, 0]).unwrap(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(resample(&single_class, 0.5, &mut rng).len(), 3);
    }

    #[test]
    fn single_full_draw_is_plain_su() {
        let d = synthetic(120, 4);
        let params = SelectionParams {
            sampling_times: 1,
            sampling_probability: 1.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let avg = averaged_su(ColumnRef::Feature(0), ColumnRef::Class, &d, &params, &mut rng).unwrap();
        let exact = symmetrical_uncertainty(d.column(0), d.class_column()).unwrap();
        assert_eq!(avg.to_bits(), exact.to_bits());
    }

    #[test]
    fn identical_columns_average_to_one() {
        let d = synthetic(200, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let avg = averaged_su(
            ColumnRef::Feature(0),
            ColumnRef::Feature(0),
            &d,
            &SelectionParams::default(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(avg, 1.0);
    }

    #[test]
    fn average_lies_between_extremes() {
        let d = synthetic(200, 6);
        let params = SelectionParams::default();
        let subsamples = draw_set(&d, &params, PASS_RELEVANCE, 0);
        let per: Vec<f64> = subsamples
            .iter()
            .map(|s| symmetrical_uncertainty_on_rows(d.column(0), d.class_column(), &s.row_indices))
            .collect();
        let avg = relevance_scores(&d, &params).unwrap()[0];
        let lo = per.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = per.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= avg && avg <= hi);
    }

    #[test]
    fn bad_column_reference_is_an_error() {
        let d = synthetic(20, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(averaged_su(
            ColumnRef::Feature(9),
            ColumnRef::Class,
            &d,
            &SelectionParams::default(),
            &mut rng
        )
        .is_err());
    }

    #[test]
    fn degenerate_params_reproduce_fcbf() {
        let d = synthetic(150, 8);
        let params = SelectionParams {
            delta: 0.01,
            sampling_times: 1,
            sampling_probability: 1.0,
            ..Default::default()
        };
        let r = rfcbf(&d, &params).unwrap();
        let f = fcbf(&d, 0.01);
        assert_eq!(r.selected, f.selected);
        assert_eq!(r.scores, f.scores);
    }

    #[test]
    fn seed_determinism() {
        let d = synthetic(300, 9);
        let params = SelectionParams::default();
        let a = rfcbf(&d, &params).unwrap();
        let b = rfcbf(&d, &params).unwrap();
        assert_eq!(a.selected, b.selected);
        assert_eq!(a.scores, b.scores);
        assert_eq!(a.removals, b.removals);
    }
}
