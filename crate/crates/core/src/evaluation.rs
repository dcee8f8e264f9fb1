//! KNN classification, stratified k-fold splitting and the repeated
//! cross-validation pipeline that scores a selection method.
//!
//! Every preprocessing statistic and every selection decision in a fold is
//! derived from that fold's training rows only.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcbf::{fcbf, SelectionResult};
use crate::preprocess::{EqualWidthDiscretizer, KnnImputer, RawDataset, Standardizer};
use crate::rfcbf::{derive_seed, rfcbf, SelectionParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fcbf,
    Rfcbf,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fcbf => "fcbf",
            Method::Rfcbf => "rfcbf",
        }
    }

    pub fn select(
        self,
        data: &crate::preprocess::DiscreteDataset,
        params: &SelectionParams,
    ) -> Result<SelectionResult> {
        match self {
            Method::Fcbf => {
                params.validate()?;
                Ok(fcbf(data, params.delta))
            }
            Method::Rfcbf => rfcbf(data, params),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fcbf" => Ok(Method::Fcbf),
            "rfcbf" => Ok(Method::Rfcbf),
            other => Err(Error::Parameter(format!("unknown method {other:?}"))),
        }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Majority vote over the `k` Euclidean-nearest training rows.
///
/// Distance ties go to the lower training index. Vote ties go to whichever
/// tied class owns the nearest of the `k` neighbours.
pub fn knn_predict(
    train_rows: &[Vec<f64>],
    train_labels: &[usize],
    test_rows: &[Vec<f64>],
    k: usize,
) -> Result<Vec<usize>> {
    if train_rows.len() != train_labels.len() {
        return Err(Error::LengthMismatch {
            left: train_rows.len(),
            right: train_labels.len(),
        });
    }
    if k == 0 || k > train_rows.len() {
        return Err(Error::Parameter(format!("k = {k} must be in 1..={}", train_rows.len())));
    }
    let width = train_rows[0].len();
    if width == 0 {
        return Err(Error::NoFeatures);
    }
    if let Some(r) = train_rows.iter().chain(test_rows).find(|r| r.len() != width) {
        return Err(Error::LengthMismatch {
            left: r.len(),
            right: width,
        });
    }
    let class_count = train_labels.iter().max().map_or(0, |&m| m + 1);

    Ok(test_rows
        .par_iter()
        .map(|row| {
            let mut order: Vec<(f64, usize)> = train_rows
                .iter()
                .enumerate()
                .map(|(i, t)| (squared_distance(row, t), i))
                .collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let neighbours = &order[..k];

            let mut votes = vec![0usize; class_count];
            for &(_, i) in neighbours {
                votes[train_labels[i]] += 1;
            }
            let best = *votes.iter().max().expect("k >= 1");
            neighbours
                .iter()
                .map(|&(_, i)| train_labels[i])
                .find(|&label| votes[label] == best)
                .expect("some neighbour carries the winning label")
        })
        .collect())
}

/// Confusion matrix indexed `[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    matrix: Vec<Vec<u64>>,
}

impl ConfusionCounts {
    /// Binary layout with class 1 as the positive class.
    pub fn binary(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self {
            matrix: vec![vec![tn, fp], vec![fn_, tp]],
        }
    }

    pub fn from_predictions(actual: &[usize], predicted: &[usize], class_count: usize) -> Result<Self> {
        if actual.len() != predicted.len() {
            return Err(Error::LengthMismatch {
                left: actual.len(),
                right: predicted.len(),
            });
        }
        let mut matrix = vec![vec![0u64; class_count]; class_count];
        for (&a, &p) in actual.iter().zip(predicted) {
            if a >= class_count || p >= class_count {
                return Err(Error::Parameter(format!(
                    "label {} out of range for {class_count} classes",
                    a.max(p)
                )));
            }
            matrix[a][p] += 1;
        }
        Ok(Self { matrix })
    }

    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        self.matrix.iter().enumerate().map(|(i, r)| r[i]).sum()
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }
}

/// Correct predictions over all predictions (trace over total).
pub fn accuracy(conf: &ConfusionCounts) -> Result<f64> {
    let total = conf.total();
    if total == 0 {
        return Err(Error::UndefinedAccuracy);
    }
    Ok(conf.correct() as f64 / total as f64)
}

/// Fold index for every row, balancing each class across folds.
///
/// Each class's members are shuffled and the classes are concatenated in
/// label order; position `i` of that sequence goes to fold `i % folds`. Fold
/// sizes therefore differ by at most one, as do per-class counts.
pub fn stratified_kfold<R: Rng + ?Sized>(labels: &[usize], folds: usize, rng: &mut R) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Parameter(format!("folds must be at least 2, got {folds}")));
    }
    if folds > labels.len() {
        return Err(Error::Parameter(format!(
            "folds = {folds} exceeds {} rows",
            labels.len()
        )));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut assignment = vec![0; labels.len()];
    let mut position = 0;
    for members in by_class.values_mut() {
        members.shuffle(rng);
        for &row in members.iter() {
            assignment[row] = position % folds;
            position += 1;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub repeats: usize,
    pub k: usize,
    pub impute_neighbors: usize,
    /// Worker threads for the (repeat, fold) grid; 0 means rayon's default.
    /// Not serialized: it cannot change any result.
    #[serde(skip)]
    pub workers: usize,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            folds: 10,
            repeats: 10,
            k: 5,
            impute_neighbors: 5,
            workers: 0,
        }
    }
}

/// Everything one (repeat, fold) cell produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub selection: SelectionResult,
    /// `None` when the selection was empty.
    pub accuracy: Option<f64>,
}

/// Preprocesses a training/test split with training statistics, selects on
/// the training rows, and scores KNN on the test rows.
pub fn run_fold(
    raw: &RawDataset,
    train_idx: &[usize],
    test_idx: &[usize],
    method: Method,
    params: &SelectionParams,
    options: &CvOptions,
) -> Result<FoldOutcome> {
    let mut train = raw.subset(train_idx);
    let mut test = raw.subset(test_idx);
    if train.has_missing() || test.has_missing() {
        let imputer = KnnImputer::fit(&train, options.impute_neighbors)?;
        train = imputer.transform(&train)?;
        test = imputer.transform(&test)?;
    }
    let scaler = Standardizer::fit(&train)?;
    let train = scaler.transform(&train)?;
    let test = scaler.transform(&test)?;
    let discrete = EqualWidthDiscretizer::fit(&train, params.bins)?.transform(&train)?;

    let selection = method.select(&discrete, params)?;
    if selection.is_empty() {
        return Ok(FoldOutcome {
            selection,
            accuracy: None,
        });
    }

    let project = |d: &RawDataset| -> Result<Vec<Vec<f64>>> {
        Ok(d.dense_rows()?
            .into_iter()
            .map(|r| selection.selected.iter().map(|&j| r[j]).collect())
            .collect())
    };
    let k = options.k.min(train.n_rows());
    let predicted = knn_predict(&project(&train)?, train.labels(), &project(&test)?, k)?;
    let conf = ConfusionCounts::from_predictions(test.labels(), &predicted, raw.class_count())?;
    let acc = accuracy(&conf)?;
    Ok(FoldOutcome {
        selection,
        accuracy: Some(acc),
    })
}

/// Wall-clock selection timings, kept apart from the reproducible fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionTiming {
    pub per_run_fold_seconds: Vec<Vec<f64>>,
    pub mean_selection_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub method_name: String,
    pub params: SelectionParams,
    pub options: CvOptions,
    /// `[repeat][fold]`; `None` marks an NA cell (empty selection).
    pub per_run_fold_accuracy: Vec<Vec<Option<f64>>>,
    pub per_run_fold_selected: Vec<Vec<usize>>,
    /// Mean over populated cells; `None` when every cell is NA.
    pub mean_accuracy: Option<f64>,
    /// Population standard deviation over populated cells.
    pub accuracy_std: Option<f64>,
    pub na_cells: usize,
    /// Mean selected-feature count over populated cells.
    pub mean_selected_count: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<SelectionTiming>,
}

impl CvReport {
    /// JSON of every field except wall-clock timings; identical inputs give
    /// identical bytes.
    pub fn canonical_json(&self) -> Result<String> {
        let mut stripped = self.clone();
        stripped.timing = None;
        Ok(serde_json::to_string_pretty(&stripped)?)
    }

    pub fn populated_accuracies(&self) -> impl Iterator<Item = f64> + '_ {
        self.per_run_fold_accuracy.iter().flatten().filter_map(|a| *a)
    }
}

pub fn mean_and_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

/// Repeated stratified cross-validation of `method` on `raw`.
pub fn evaluate_pipeline(
    raw: &RawDataset,
    method: Method,
    params: &SelectionParams,
    options: &CvOptions,
) -> Result<CvReport> {
    params.validate()?;
    if options.repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }
    if options.k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }

    let assignments = (0..options.repeats)
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[params.seed, 0xf01d, r as u64]));
            stratified_kfold(raw.labels(), options.folds, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let cells: Vec<(usize, usize)> = (0..options.repeats)
        .flat_map(|r| (0..options.folds).map(move |f| (r, f)))
        .collect();
    let run_cell = |&(r, f): &(usize, usize)| -> Result<FoldOutcome> {
        let assignment = &assignments[r];
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..raw.n_rows()).partition(|&i| assignment[i] == f);
        let cell_params = SelectionParams {
            seed: derive_seed(&[params.seed, r as u64, f as u64]),
            ..*params
        };
        run_fold(raw, &train_idx, &test_idx, method, &cell_params, options)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| cells.par_iter().map(run_cell).collect::<Result<Vec<_>>>())?;

    let grid = |get: &dyn Fn(&FoldOutcome) -> f64| -> Vec<Vec<f64>> {
        outcomes
            .chunks(options.folds)
            .map(|row| row.iter().map(get).collect())
            .collect()
    };
    let per_run_fold_accuracy: Vec<Vec<Option<f64>>> = outcomes
        .chunks(options.folds)
        .map(|row| row.iter().map(|o| o.accuracy).collect())
        .collect();
    let per_run_fold_selected: Vec<Vec<usize>> = outcomes
        .chunks(options.folds)
        .map(|row| row.iter().map(|o| o.selection.len()).collect())
        .collect();
    let populated: Vec<f64> = outcomes.iter().filter_map(|o| o.accuracy).collect();
    let counts: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.accuracy.is_some())
        .map(|o| o.selection.len() as f64)
        .collect();
    let seconds = grid(&|o| o.selection.elapsed_seconds);
    let all_seconds: Vec<f64> = seconds.iter().flatten().copied().collect();

    Ok(CvReport {
        method_name: method.name().to_string(),
        params: *params,
        options: *options,
        per_run_fold_accuracy,
        per_run_fold_selected,
        mean_accuracy: mean_and_std(&populated).map(|m| m.0),
        accuracy_std: mean_and_std(&populated).map(|m| m.1),
        na_cells: outcomes.len() - populated.len(),
        mean_selected_count: mean_and_std(&counts).map(|m| m.0),
        timing: Some(SelectionTiming {
            mean_selection_seconds: mean_and_std(&all_seconds).map_or(0.0, |m| m.0),
            per_run_fold_seconds: seconds,
        }),
    })
}
