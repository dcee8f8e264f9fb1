//! Missing-value imputation, z-score standardization and equal-width
//! discretization.
//!
//! Each transform comes in a fitted form (`fit` on training rows, `transform`
//! any rows) so cross-validation can apply training statistics to test folds,
//! plus a one-shot convenience function that fits and transforms the same data.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::info_theory::DiscreteColumn;

/// Numeric feature matrix (row-major, `None` marks a missing cell) with class
/// labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    rows: Vec<Vec<Option<f64>>>,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl RawDataset {
    pub fn new(
        rows: Vec<Vec<Option<f64>>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Dataset("no rows".into()));
        }
        if feature_names.is_empty() {
            return Err(Error::Dataset("no features".into()));
        }
        if labels.len() != rows.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let n = feature_names.len();
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Dataset(format!(
                "row {i} has {} cells, expected {n}",
                rows[i].len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = feature_names.iter().find(|name| !seen.insert(name.as_str())) {
            return Err(Error::Dataset(format!("duplicate feature name {dup:?}")));
        }
        if class_names.is_empty() {
            return Err(Error::Dataset("no classes".into()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Dataset(format!(
                "label {l} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            rows,
            labels,
            feature_names,
            class_names,
        })
    }

    /// Complete dataset with generated feature and class names.
    pub fn from_dense(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let classes = labels.iter().max().map_or(0, |&m| m + 1);
        Self::new(
            rows.into_iter().map(|r| r.into_iter().map(Some).collect()).collect(),
            labels,
            (0..n).map(|j| format!("f{j}")).collect(),
            (0..classes).map(|c| c.to_string()).collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn missing_count(&self) -> usize {
        self.rows.iter().flatten().filter(|c| c.is_none()).count()
    }

    pub fn has_missing(&self) -> bool {
        self.rows.iter().flatten().any(Option::is_none)
    }

    /// Rows selected by index, keeping names and class vocabulary.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Same rows with different labels; used to swap in permuted labels.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        Self::new(
            self.rows.clone(),
            labels,
            self.feature_names.clone(),
            self.class_names.clone(),
        )
    }

    /// Dense copy of the rows; fails if any cell is missing.
    pub fn dense_rows(&self) -> Result<Vec<Vec<f64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|c| c.ok_or(Error::MissingValues)).collect())
            .collect()
    }

    fn with_rows(&self, rows: Vec<Vec<Option<f64>>>) -> Self {
        Self {
            rows,
            labels: self.labels.clone(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }
}

/// Categorical view of a dataset: one code column per feature plus the class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteDataset {
    columns: Vec<DiscreteColumn>,
    class_column: DiscreteColumn,
}

impl DiscreteDataset {
    pub fn new(columns: Vec<DiscreteColumn>, class_column: DiscreteColumn) -> Result<Self> {
        let m = class_column.len();
        if let Some(c) = columns.iter().find(|c| c.len() != m) {
            return Err(Error::LengthMismatch {
                left: c.len(),
                right: m,
            });
        }
        Ok(Self { columns, class_column })
    }

    pub fn n_rows(&self) -> usize {
        self.class_column.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, feature: usize) -> &DiscreteColumn {
        &self.columns[feature]
    }

    pub fn columns(&self) -> &[DiscreteColumn] {
        &self.columns
    }

    pub fn class_column(&self) -> &DiscreteColumn {
        &self.class_column
    }

    /// Appends a feature column; used by tests building synthetic data.
    pub fn push_column(&mut self, column: DiscreteColumn) -> Result<()> {
        if column.len() != self.n_rows() {
            return Err(Error::LengthMismatch {
                left: column.len(),
                right: self.n_rows(),
            });
        }
        self.columns.push(column);
        Ok(())
    }
}

/// KNN imputer: a missing cell takes the mean of that feature over the
/// `n_neighbors` closest donor rows that observe it.
///
/// Distance is Euclidean over the coordinates both rows observe, scaled by
/// `n_features / observed` so rows with fewer shared coordinates are not
/// favoured. Ties go to the lower donor index. A row sharing no observed
/// coordinate with any donor falls back to the donor mean of the feature.
#[derive(Debug, Clone)]
pub struct KnnImputer {
    donors: Vec<Vec<Option<f64>>>,
    n_neighbors: usize,
}

impl KnnImputer {
    pub fn fit(data: &RawDataset, n_neighbors: usize) -> Result<Self> {
        if n_neighbors == 0 {
            return Err(Error::Parameter("n_neighbors must be at least 1".into()));
        }
        if n_neighbors + 1 > data.n_rows() {
            return Err(Error::Parameter(format!(
                "n_neighbors = {n_neighbors} exceeds rows - 1 = {}",
                data.n_rows() - 1
            )));
        }
        for j in 0..data.n_features() {
            if data.rows.iter().all(|r| r[j].is_none()) {
                return Err(Error::UnimputableColumn { feature: j });
            }
        }
        Ok(Self {
            donors: data.rows.clone(),
            n_neighbors,
        })
    }

    pub fn transform(&self, data: &RawDataset) -> Result<RawDataset> {
        let width = self.donors[0].len();
        if data.n_features() != width {
            return Err(Error::LengthMismatch {
                left: data.n_features(),
                right: width,
            });
        }
        let rows = data.rows.iter().map(|row| self.impute_row(row)).collect();
        Ok(data.with_rows(rows))
    }

    fn impute_row(&self, row: &[Option<f64>]) -> Vec<Option<f64>> {
        if row.iter().all(Option::is_some) {
            return row.to_vec();
        }
        let distances: Vec<f64> = self.donors.iter().map(|d| nan_euclidean(row, d)).collect();
        row.iter()
            .enumerate()
            .map(|(j, cell)| cell.or_else(|| Some(self.impute_cell(j, &distances))))
            .collect()
    }

    fn impute_cell(&self, feature: usize, distances: &[f64]) -> f64 {
        let mut candidates: Vec<(f64, usize, f64)> = self
            .donors
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d[feature].map(|v| (distances[i], i, v)))
            .collect();
        let finite: Vec<_> = candidates.iter().copied().filter(|c| c.0.is_finite()).collect();
        if finite.is_empty() {
            return mean(candidates.iter().map(|c| c.2));
        }
        candidates = finite;
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        mean(candidates.iter().take(self.n_neighbors).map(|c| c.2))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn nan_euclidean(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    let mut sq = 0.0;
    let mut shared = 0usize;
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            sq += (x - y) * (x - y);
            shared += 1;
        }
    }
    if shared == 0 {
        return f64::INFINITY;
    }
    (sq * a.len() as f64 / shared as f64).sqrt()
}

/// Fills every missing cell from its nearest neighbours within `data`.
pub fn impute_knn(data: &RawDataset, n_neighbors: usize) -> Result<RawDataset> {
    if !data.has_missing() {
        if n_neighbors == 0 {
            return Err(Error::Parameter("n_neighbors must be at least 1".into()));
        }
        return Ok(data.clone());
    }
    KnnImputer::fit(data, n_neighbors)?.transform(data)
}

/// Per-feature population mean and standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &RawDataset) -> Result<Self> {
        let rows = data.dense_rows()?;
        let m = rows.len() as f64;
        let n = data.n_features();
        let mut means = vec![0.0; n];
        let mut stds = vec![0.0; n];
        for j in 0..n {
            let mu = rows.iter().map(|r| r[j]).sum::<f64>() / m;
            let var = rows.iter().map(|r| (r[j] - mu) * (r[j] - mu)).sum::<f64>() / m;
            means[j] = mu;
            stds[j] = var.sqrt();
        }
        Ok(Self { means, stds })
    }

    /// `(x - mean) / std`; zero-variance features map to 0.
    pub fn transform(&self, data: &RawDataset) -> Result<RawDataset> {
        if data.n_features() != self.means.len() {
            return Err(Error::LengthMismatch {
                left: data.n_features(),
                right: self.means.len(),
            });
        }
        let rows = data
            .dense_rows()?
            .into_iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        if self.stds[j] > 0.0 {
                            Some((x - self.means[j]) / self.stds[j])
                        } else {
                            Some(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(data.with_rows(rows))
    }
}

pub fn standardize(data: &RawDataset) -> Result<(RawDataset, Standardizer)> {
    let scaler = Standardizer::fit(data)?;
    Ok((scaler.transform(data)?, scaler))
}

/// Equal-width binning over each feature's fitted `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualWidthDiscretizer {
    mins: Vec<f64>,
    maxs: Vec<f64>,
    bins: u32,
}

/// Bin positions this close to an integer snap onto it, so that boundary
/// values land in the same bin after an affine rescaling of the feature.
const BOUNDARY_SNAP: f64 = 1e-9;

impl EqualWidthDiscretizer {
    pub fn fit(data: &RawDataset, bins: u32) -> Result<Self> {
        if bins < 2 {
            return Err(Error::Parameter(format!("bins must be at least 2, got {bins}")));
        }
        let rows = data.dense_rows()?;
        let n = data.n_features();
        let mut mins = vec![f64::INFINITY; n];
        let mut maxs = vec![f64::NEG_INFINITY; n];
        for r in &rows {
            for j in 0..n {
                mins[j] = mins[j].min(r[j]);
                maxs[j] = maxs[j].max(r[j]);
            }
        }
        Ok(Self { mins, maxs, bins })
    }

    pub fn bins(&self) -> u32 {
        self.bins
    }

    pub fn code(&self, feature: usize, x: f64) -> u32 {
        let (lo, hi) = (self.mins[feature], self.maxs[feature]);
        if hi <= lo {
            return 0;
        }
        let mut t = f64::from(self.bins) * (x - lo) / (hi - lo);
        let nearest = t.round();
        if (t - nearest).abs() < BOUNDARY_SNAP {
            t = nearest;
        }
        t.floor().clamp(0.0, f64::from(self.bins - 1)) as u32
    }

    pub fn cardinality(&self, feature: usize) -> u32 {
        if self.maxs[feature] > self.mins[feature] {
            self.bins
        } else {
            1
        }
    }

    /// Codes every feature and attaches the labels as the class column.
    pub fn transform(&self, data: &RawDataset) -> Result<DiscreteDataset> {
        if data.n_features() != self.mins.len() {
            return Err(Error::LengthMismatch {
                left: data.n_features(),
                right: self.mins.len(),
            });
        }
        let rows = data.dense_rows()?;
        let columns = (0..data.n_features())
            .map(|j| {
                let codes = rows.iter().map(|r| self.code(j, r[j])).collect();
                DiscreteColumn::new(codes, self.cardinality(j))
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = data.labels.iter().map(|&l| l as u32).collect();
        let class_column = DiscreteColumn::new(labels, data.class_count() as u32)?;
        DiscreteDataset::new(columns, class_column)
    }
}

pub fn discretize(data: &RawDataset, bins: u32) -> Result<DiscreteDataset> {
    EqualWidthDiscretizer::fit(data, bins)?.transform(data)
}
