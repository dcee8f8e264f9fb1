//! Experiment orchestration behind the `select`, `compare` and `bench`
//! subcommands, and the reports they write.

pub mod config;
pub mod loader;
pub mod report;

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{evaluate_pipeline, mean_and_std, Method};
use crate::preprocess::{discretize, impute_knn, standardize, DiscreteDataset, RawDataset};
use crate::rfcbf::{derive_seed, SelectionParams};

pub use config::{ColumnSpec, DatasetSpec, ExperimentConfig, Overrides, SweepSpec};
pub use loader::{load_dataset, ClassColumn};
pub use report::{BenchReport, BenchRow, Cell, CellStatus, ComparisonReport, DatasetRow, RuntimeReport, SweepReport};

/// Imputes (when needed), standardizes and discretizes a whole dataset.
pub fn prepare_full(raw: &RawDataset, bins: u32, impute_neighbors: usize) -> Result<DiscreteDataset> {
    let filled = if raw.has_missing() {
        impute_knn(raw, impute_neighbors)?
    } else {
        raw.clone()
    };
    let (z, _) = standardize(&filled)?;
    discretize(&z, bins)
}

fn load_all(config: &ExperimentConfig) -> Vec<(String, std::result::Result<RawDataset, String>)> {
    config
        .datasets
        .iter()
        .map(|d| {
            let loaded = load_dataset(&d.path, &d.class_column, &d.missing_token).map_err(|e| e.to_string());
            (d.name.clone(), loaded)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFeature {
    pub index: usize,
    pub name: String,
    pub su_to_class: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub dataset: String,
    pub method: Method,
    pub params: SelectionParams,
    pub selected: Vec<SelectedFeature>,
    pub elapsed_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Runs every configured method once on each full dataset.
pub fn run_select(config: &ExperimentConfig) -> Vec<SelectionRecord> {
    let params = config.base_params();
    let mut records = Vec::new();
    for (name, loaded) in load_all(config) {
        let prepared = loaded.and_then(|raw| {
            prepare_full(&raw, params.bins, config.impute_neighbors)
                .map(|d| (raw, d))
                .map_err(|e| e.to_string())
        });
        for &method in &config.methods {
            let mut record = SelectionRecord {
                dataset: name.clone(),
                method,
                params,
                selected: Vec::new(),
                elapsed_seconds: 0.0,
                error: None,
            };
            match &prepared {
                Ok((raw, data)) => match method.select(data, &params) {
                    Ok(result) => {
                        record.elapsed_seconds = result.elapsed_seconds;
                        record.selected = result
                            .selected
                            .iter()
                            .zip(&result.scores)
                            .map(|(&index, &su_to_class)| SelectedFeature {
                                index,
                                name: raw.feature_names()[index].clone(),
                                su_to_class,
                            })
                            .collect();
                    }
                    Err(e) => record.error = Some(e.to_string()),
                },
                Err(e) => record.error = Some(e.clone()),
            }
            records.push(record);
        }
    }
    records
}

/// Cross-validates every (sweep column, dataset) cell. Failures are recorded
/// per cell and the run carries on.
pub fn run_compare(config: &ExperimentConfig) -> (ComparisonReport, RuntimeReport) {
    let datasets = load_all(config);
    let options = config.cv_options();
    let mut sweeps = Vec::new();
    let mut runtimes = Vec::new();
    for sweep in &config.sweeps {
        let columns = config.columns(sweep);
        let mut rows = Vec::new();
        let mut runtime_rows = Vec::new();
        for (name, loaded) in &datasets {
            let mut cells = Vec::new();
            let mut seconds = Vec::new();
            for column in &columns {
                let outcome = match loaded {
                    Ok(raw) => {
                        evaluate_pipeline(raw, column.method, &column.params, &options).map_err(|e| e.to_string())
                    }
                    Err(e) => Err(e.clone()),
                };
                match outcome {
                    Ok(cv) => {
                        seconds.push(cv.timing.as_ref().map(|t| t.mean_selection_seconds));
                        cells.push(Cell::from_cv(&cv));
                    }
                    Err(e) => {
                        seconds.push(None);
                        cells.push(Cell::failed(e));
                    }
                }
            }
            rows.push(DatasetRow::new(name.clone(), cells));
            runtime_rows.push((name.clone(), seconds));
        }
        sweeps.push(SweepReport {
            name: sweep.name.clone(),
            columns: columns.clone(),
            rows,
        });
        runtimes.push(report::RuntimeSweep {
            name: sweep.name.clone(),
            columns: columns.iter().map(|c| c.label.clone()).collect(),
            rows: runtime_rows
                .into_iter()
                .map(|(dataset, seconds)| report::RuntimeRow { dataset, seconds })
                .collect(),
        });
    }
    (
        ComparisonReport {
            seed: config.seed,
            options,
            sweeps,
        },
        RuntimeReport { sweeps: runtimes },
    )
}

/// Selection wall-clock statistics over repeated runs on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTiming {
    pub mean_seconds: f64,
    pub min_seconds: f64,
    pub max_seconds: f64,
    pub mean_selected: f64,
}

/// Times `repeats` selections, each with its own derived seed.
pub fn bench_selection(
    data: &DiscreteDataset,
    method: Method,
    params: &SelectionParams,
    repeats: usize,
) -> Result<BenchTiming> {
    if repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }
    let mut seconds = Vec::with_capacity(repeats);
    let mut selected = Vec::with_capacity(repeats);
    for r in 0..repeats {
        let run_params = SelectionParams {
            seed: derive_seed(&[params.seed, 0xbe7c, r as u64]),
            ..*params
        };
        let result = method.select(data, &run_params)?;
        seconds.push(result.elapsed_seconds);
        selected.push(result.len() as f64);
    }
    Ok(BenchTiming {
        mean_seconds: mean_and_std(&seconds).map_or(0.0, |m| m.0),
        min_seconds: seconds.iter().copied().fold(f64::INFINITY, f64::min),
        max_seconds: seconds.iter().copied().fold(0.0, f64::max),
        mean_selected: mean_and_std(&selected).map_or(0.0, |m| m.0),
    })
}

/// Times selection alone for every (sweep column, dataset) cell on the full
/// preprocessed dataset.
pub fn run_bench(config: &ExperimentConfig) -> BenchReport {
    let datasets = load_all(config);
    let mut prepared: HashMap<(String, u32), std::result::Result<DiscreteDataset, String>> = HashMap::new();
    let mut rows = Vec::new();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers).build();
    for sweep in &config.sweeps {
        for column in config.columns(sweep) {
            for (name, loaded) in &datasets {
                let data = prepared.entry((name.clone(), column.params.bins)).or_insert_with(|| {
                    loaded.clone().and_then(|raw| {
                        prepare_full(&raw, column.params.bins, config.impute_neighbors).map_err(|e| e.to_string())
                    })
                });
                let timing = match (&*data, &pool) {
                    (Ok(d), Ok(pool)) => pool
                        .install(|| bench_selection(d, column.method, &column.params, config.repeats))
                        .map_err(|e| e.to_string()),
                    (Err(e), _) => Err(e.clone()),
                    (_, Err(e)) => Err(e.to_string()),
                };
                rows.push(BenchRow {
                    sweep: sweep.name.clone(),
                    dataset: name.clone(),
                    column: column.label.clone(),
                    method: column.method,
                    params: column.params,
                    timing: timing.as_ref().ok().cloned(),
                    error: timing.err(),
                });
            }
        }
    }
    BenchReport {
        repeats: config.repeats,
        rows,
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
