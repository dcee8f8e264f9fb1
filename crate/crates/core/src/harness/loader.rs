//! Delimiter-separated dataset files with a header row.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::RawDataset;

/// Which column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassColumn {
    Index(usize),
    Named(String),
}

impl Default for ClassColumn {
    fn default() -> Self {
        ClassColumn::Named("last".into())
    }
}

impl fmt::Display for ClassColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassColumn::Index(i) => write!(f, "{i}"),
            ClassColumn::Named(s) => f.write_str(s),
        }
    }
}

impl ClassColumn {
    /// `first`, `last`, a zero-based index, or a header name.
    pub fn parse(spec: &str) -> Self {
        match spec.parse::<usize>() {
            Ok(i) => ClassColumn::Index(i),
            Err(_) => ClassColumn::Named(spec.to_string()),
        }
    }

    fn resolve(&self, header: &[String]) -> Option<usize> {
        match self {
            ClassColumn::Index(i) => (*i < header.len()).then_some(*i),
            ClassColumn::Named(name) => match name.as_str() {
                "first" => Some(0),
                "last" => header.len().checked_sub(1),
                _ => header.iter().position(|h| h == name),
            },
        }
    }
}

fn detect_delimiter(header_line: &str) -> u8 {
    b",;\t"
        .iter()
        .copied()
        .max_by_key(|&d| (header_line.bytes().filter(|&b| b == d).count(), d == b','))
        .unwrap_or(b',')
}

pub fn load_dataset(path: &Path, class_column: &ClassColumn, missing_token: &str) -> Result<RawDataset> {
    let text = fs::read_to_string(path)?;
    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let header_line = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| format_err("empty file".into()))?;

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(header_line))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| format_err(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.len() < 2 {
        return Err(format_err("need at least one feature column and a class column".into()));
    }
    if header.iter().all(|h| h.parse::<f64>().is_ok()) {
        return Err(format_err("missing header row".into()));
    }
    let class_idx = class_column
        .resolve(&header)
        .ok_or_else(|| format_err(format!("class column {class_column} not found")))?;

    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != class_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_index: HashMap<String, usize> = HashMap::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();

    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::Parse {
                path: path.to_path_buf(),
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut row = Vec::with_capacity(feature_names.len());
        for (j, cell) in record.iter().enumerate() {
            if j == class_idx {
                let next = class_names.len();
                let label = *class_index.entry(cell.to_string()).or_insert_with(|| {
                    class_names.push(cell.to_string());
                    next
                });
                labels.push(label);
            } else if cell == missing_token {
                row.push(None);
            } else {
                let value = cell.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    column: j + 1,
                    message: format!("non-numeric value {cell:?} in column {:?}", header[j]),
                })?;
                row.push(Some(value));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err("no data rows".into()));
    }
    RawDataset::new(rows, labels, feature_names, class_names).map_err(|e| format_err(e.to_string()))
}
