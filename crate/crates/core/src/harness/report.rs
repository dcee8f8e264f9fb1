//! Machine-readable reports and the plain-text tables rendered from them.
//!
//! `ComparisonReport` holds only values that are reproducible from the seed;
//! wall-clock measurements live in `RuntimeReport` and `BenchReport`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::evaluation::{CvOptions, CvReport, Method};
use crate::harness::config::ColumnSpec;
use crate::rfcbf::SelectionParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    #[serde(flatten)]
    pub status: CellStatus,
    pub mean_accuracy: Option<f64>,
    pub accuracy_std: Option<f64>,
    pub mean_selected_count: Option<f64>,
    pub na_cells: usize,
}

impl Cell {
    pub fn from_cv(cv: &CvReport) -> Self {
        Self {
            status: CellStatus::Ok,
            mean_accuracy: cv.mean_accuracy,
            accuracy_std: cv.accuracy_std,
            mean_selected_count: cv.mean_selected_count,
            na_cells: cv.na_cells,
        }
    }

    pub fn failed(error: String) -> Self {
        Self {
            status: CellStatus::Failed { error },
            mean_accuracy: None,
            accuracy_std: None,
            mean_selected_count: None,
            na_cells: 0,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.status, CellStatus::Failed { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub dataset: String,
    pub cells: Vec<Cell>,
    /// Column with the highest mean accuracy; NA and failed cells never win.
    pub winner: Option<usize>,
}

impl DatasetRow {
    pub fn new(dataset: String, cells: Vec<Cell>) -> Self {
        let winner = best_column(&cells);
        Self { dataset, cells, winner }
    }
}

fn best_column(cells: &[Cell]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in cells.iter().enumerate() {
        if let (CellStatus::Ok, Some(acc)) = (&c.status, c.mean_accuracy) {
            if best.is_none_or(|(_, b)| acc > b) {
                best = Some((i, acc));
            }
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub name: String,
    pub columns: Vec<ColumnSpec>,
    pub rows: Vec<DatasetRow>,
}

impl SweepReport {
    /// Rows won by each column.
    pub fn winner_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.columns.len()];
        for w in self.rows.iter().filter_map(|r| r.winner) {
            counts[w] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub options: CvOptions,
    pub sweeps: Vec<SweepReport>,
}

impl ComparisonReport {
    pub fn failed_cells(&self) -> usize {
        self.sweeps
            .iter()
            .flat_map(|s| &s.rows)
            .flat_map(|r| &r.cells)
            .filter(|c| c.is_failed())
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub dataset: String,
    /// Mean selection seconds per column; `None` for failed cells.
    pub seconds: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeSweep {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<RuntimeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuntimeReport {
    pub sweeps: Vec<RuntimeSweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub sweep: String,
    pub dataset: String,
    pub column: String,
    pub method: Method,
    pub params: SelectionParams,
    pub timing: Option<crate::harness::BenchTiming>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub repeats: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn failed_cells(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }

    pub fn render_table(&self) -> String {
        let header = ["sweep", "dataset", "column", "mean s", "min s", "max s", "selected"]
            .map(String::from)
            .to_vec();
        let body = self
            .rows
            .iter()
            .map(|r| {
                let mut line = vec![r.sweep.clone(), r.dataset.clone(), r.column.clone()];
                match &r.timing {
                    Some(t) => line.extend([
                        format!("{:.4}", t.mean_seconds),
                        format!("{:.4}", t.min_seconds),
                        format!("{:.4}", t.max_seconds),
                        format!("{:.1}", t.mean_selected),
                    ]),
                    None => line.extend(std::iter::repeat_n("ERR".to_string(), 4)),
                }
                line
            })
            .collect::<Vec<_>>();
        let mut out = format!("== selection runtime over {} runs ==\n", self.repeats);
        out.push_str(&align(&header, &body));
        out
    }
}

fn align(header: &[String], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(String::len).collect();
    for row in body {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    for row in std::iter::once(header).chain(body.iter().map(Vec::as_slice)) {
        let mut line = String::new();
        for (i, (cell, w)) in row.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(line, "{cell:<w$}");
            } else {
                let _ = write!(line, "  {cell:>w$}");
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn cell_text(cell: &Cell, value: Option<f64>, fmt: fn(f64) -> String) -> String {
    if cell.is_failed() {
        return "ERR".into();
    }
    value.map_or_else(|| "NA".into(), fmt)
}

/// Accuracy, feature-count and runtime grids for every sweep. The best
/// accuracy in each dataset row is prefixed with `*`.
pub fn render_tables(report: &ComparisonReport, runtime: Option<&RuntimeReport>) -> String {
    let mut out = String::new();
    for (s, sweep) in report.sweeps.iter().enumerate() {
        let mut header = vec!["dataset".to_string()];
        header.extend(sweep.columns.iter().map(|c| c.label.clone()));

        let accuracy: Vec<Vec<String>> = sweep
            .rows
            .iter()
            .map(|row| {
                let mut line = vec![row.dataset.clone()];
                line.extend(row.cells.iter().enumerate().map(|(i, c)| {
                    let text = cell_text(c, c.mean_accuracy, |a| format!("{:.2}", 100.0 * a));
                    if row.winner == Some(i) {
                        format!("*{text}")
                    } else {
                        text
                    }
                }));
                line
            })
            .chain(std::iter::once({
                let mut line = vec!["Winners".to_string()];
                line.extend(sweep.winner_counts().iter().map(usize::to_string));
                line
            }))
            .collect();
        let _ = writeln!(
            out,
            "== {}: mean accuracy (%), {} x {}-fold CV, KNN k={} ==",
            sweep.name, report.options.repeats, report.options.folds, report.options.k
        );
        out.push_str(&align(&header, &accuracy));
        out.push('\n');

        let counts: Vec<Vec<String>> = sweep
            .rows
            .iter()
            .map(|row| {
                let mut line = vec![row.dataset.clone()];
                line.extend(
                    row.cells
                        .iter()
                        .map(|c| cell_text(c, c.mean_selected_count, |n| format!("{n:.1}"))),
                );
                line
            })
            .collect();
        let _ = writeln!(out, "== {}: mean number of selected features ==", sweep.name);
        out.push_str(&align(&header, &counts));
        out.push('\n');

        if let Some(rt) = runtime.and_then(|r| r.sweeps.get(s)) {
            let body: Vec<Vec<String>> = rt
                .rows
                .iter()
                .map(|row| {
                    let mut line = vec![row.dataset.clone()];
                    line.extend(
                        row.seconds
                            .iter()
                            .map(|v| v.map_or_else(|| "ERR".into(), |s| format!("{s:.4}"))),
                    );
                    line
                })
                .collect();
            let _ = writeln!(out, "== {}: mean selection runtime (s) ==", sweep.name);
            out.push_str(&align(&header, &body));
            out.push('\n');
        }
    }
    out
}
