//! Experiment configuration: a TOML file of global defaults, `[[datasets]]`
//! entries and `[[sweeps]]` grids, plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{CvOptions, Method};
use crate::harness::loader::ClassColumn;
use crate::rfcbf::SelectionParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    #[serde(default)]
    pub class_column: ClassColumn,
    #[serde(default = "default_missing_token")]
    pub missing_token: String,
}

fn default_missing_token() -> String {
    "?".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub name: String,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub delta: Option<Vec<f64>>,
    #[serde(default)]
    pub times: Option<Vec<usize>>,
    #[serde(default)]
    pub prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::folds")]
    pub folds: usize,
    #[serde(default = "defaults::repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "defaults::bins")]
    pub bins: u32,
    #[serde(default = "defaults::k")]
    pub k: usize,
    #[serde(default = "defaults::k")]
    pub impute_neighbors: usize,
    #[serde(default = "defaults::delta")]
    pub delta: f64,
    #[serde(default = "defaults::times")]
    pub times: usize,
    #[serde(default = "defaults::prob")]
    pub prob: f64,
    /// Methods run by `select`.
    #[serde(default = "defaults::methods")]
    pub methods: Vec<Method>,
    #[serde(default = "defaults::out")]
    pub out: PathBuf,
    pub datasets: Vec<DatasetSpec>,
    #[serde(default)]
    pub sweeps: Vec<SweepSpec>,
}

mod defaults {
    use super::*;

    pub fn seed() -> u64 {
        42
    }
    pub fn folds() -> usize {
        10
    }
    pub fn repeats() -> usize {
        10
    }
    pub fn bins() -> u32 {
        10
    }
    pub fn k() -> usize {
        5
    }
    pub fn delta() -> f64 {
        0.01
    }
    pub fn times() -> usize {
        20
    }
    pub fn prob() -> f64 {
        0.5
    }
    pub fn methods() -> Vec<Method> {
        vec![Method::Fcbf, Method::Rfcbf]
    }
    pub fn out() -> PathBuf {
        PathBuf::from("out")
    }
}

/// Command-line values that replace config entries when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub times: Option<usize>,
    pub prob: Option<f64>,
    pub bins: Option<u32>,
    pub seed: Option<u64>,
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

/// One column of a sweep: a method with concrete parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub label: String,
    pub method: Method,
    pub params: SelectionParams,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads `path`, resolves dataset paths against its directory and
    /// validates the result.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for d in &mut config.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.folds {
            self.folds = v;
        }
        if let Some(v) = o.repeats {
            self.repeats = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = o.bins {
            self.bins = v;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.delta {
            self.delta = v;
            self.sweeps.iter_mut().for_each(|s| s.delta = Some(vec![v]));
        }
        if let Some(v) = o.times {
            self.times = v;
            self.sweeps.iter_mut().for_each(|s| s.times = Some(vec![v]));
        }
        if let Some(v) = o.prob {
            self.prob = v;
            self.sweeps.iter_mut().for_each(|s| s.prob = Some(v));
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets configured".into()));
        }
        for d in &self.datasets {
            if !d.path.exists() {
                return Err(Error::Config(format!(
                    "dataset {:?}: {} does not exist",
                    d.name,
                    d.path.display()
                )));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods list is empty".into()));
        }
        for s in &self.sweeps {
            if s.methods.is_empty() {
                return Err(Error::Config(format!("sweep {:?} has no methods", s.name)));
            }
            if s.delta.as_ref().is_some_and(Vec::is_empty) || s.times.as_ref().is_some_and(Vec::is_empty) {
                return Err(Error::Config(format!("sweep {:?} has an empty grid", s.name)));
            }
        }
        self.base_params().validate()?;
        for s in &self.sweeps {
            for c in self.columns(s) {
                c.params.validate()?;
            }
        }
        self.cv_options().validate()
    }

    pub fn base_params(&self) -> SelectionParams {
        SelectionParams {
            delta: self.delta,
            sampling_times: self.times,
            sampling_probability: self.prob,
            seed: self.seed,
            bins: self.bins,
        }
    }

    pub fn cv_options(&self) -> CvOptions {
        CvOptions {
            folds: self.folds,
            repeats: self.repeats,
            k: self.k,
            impute_neighbors: self.impute_neighbors,
            workers: self.workers,
        }
    }

    /// Grid columns of a sweep. FCBF ignores the sampling parameters, so it
    /// contributes one column per threshold.
    pub fn columns(&self, sweep: &SweepSpec) -> Vec<ColumnSpec> {
        let deltas = sweep.delta.clone().unwrap_or_else(|| vec![self.delta]);
        let times = sweep.times.clone().unwrap_or_else(|| vec![self.times]);
        let prob = sweep.prob.unwrap_or(self.prob);
        let mut columns = Vec::new();
        for &method in &sweep.methods {
            for &delta in &deltas {
                let base = SelectionParams {
                    delta,
                    sampling_probability: prob,
                    ..self.base_params()
                };
                match method {
                    Method::Fcbf => columns.push(ColumnSpec {
                        label: format!("fcbf d={delta}"),
                        method,
                        params: SelectionParams {
                            sampling_times: times[0],
                            ..base
                        },
                    }),
                    Method::Rfcbf => {
                        for &t in &times {
                            columns.push(ColumnSpec {
                                label: format!("rfcbf d={delta} T={t}"),
                                method,
                                params: SelectionParams {
                                    sampling_times: t,
                                    ..base
                                },
                            });
                        }
                    }
                }
            }
        }
        columns
    }
}

impl CvOptions {
    pub fn validate(&self) -> Result<()> {
        if self.folds < 2 {
            return Err(Error::Parameter(format!(
                "folds must be at least 2, got {}",
                self.folds
            )));
        }
        if self.repeats == 0 {
            return Err(Error::Parameter("repeats must be at least 1".into()));
        }
        if self.k == 0 || self.impute_neighbors == 0 {
            return Err(Error::Parameter("k and impute_neighbors must be at least 1".into()));
        }
        Ok(())
    }
}
