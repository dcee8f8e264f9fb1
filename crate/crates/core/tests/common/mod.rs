//! Test-only oracles and fixtures, independent of the library's code paths.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfcbf::{symmetrical_uncertainty, DiscreteColumn, DiscreteDataset, RawDataset};

fn plogp_sum(counts: impl Iterator<Item = usize>, n: usize) -> f64 {
    counts
        .map(|c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// Brute-force information quantities from hash-map frequency tables.
pub struct Oracle {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub ig: f64,
    pub su: f64,
}

impl Oracle {
    pub fn new(x: &[u32], y: &[u32]) -> Self {
        let n = x.len();
        let mut fx: HashMap<u32, usize> = HashMap::new();
        let mut fy: HashMap<u32, usize> = HashMap::new();
        let mut fxy: HashMap<(u32, u32), usize> = HashMap::new();
        for (&a, &b) in x.iter().zip(y) {
            *fx.entry(a).or_default() += 1;
            *fy.entry(b).or_default() += 1;
            *fxy.entry((a, b)).or_default() += 1;
        }
        let h_x = plogp_sum(fx.values().copied(), n);
        let h_y = plogp_sum(fy.values().copied(), n);
        let h_xy = plogp_sum(fxy.values().copied(), n);
        // -sum p(x,y) log2 p(x|y)
        let h_x_given_y: f64 = fxy
            .iter()
            .map(|(&(_, b), &c)| {
                let p_xy = c as f64 / n as f64;
                let p_x_given_y = c as f64 / fy[&b] as f64;
                -p_xy * p_x_given_y.log2()
            })
            .sum();
        let ig = (h_x - h_x_given_y).max(0.0);
        let su = if h_x + h_y == 0.0 { 0.0 } else { 2.0 * ig / (h_x + h_y) };
        Self {
            h_x,
            h_y,
            h_xy,
            h_x_given_y,
            ig,
            su,
        }
    }
}

/// Line-by-line transcription of the FCBF pseudocode, operating on a mutable
/// list with first/next-element cursors.
pub fn fcbf_transcription(data: &DiscreteDataset, delta: f64) -> Vec<usize> {
    let su = |a: &DiscreteColumn, b: &DiscreteColumn| symmetrical_uncertainty(a, b).unwrap();
    let mut list: Vec<(usize, f64)> = Vec::new();
    for i in 0..data.n_features() {
        let su_ic = su(data.column(i), data.class_column());
        if su_ic >= delta {
            list.push((i, su_ic));
        }
    }
    list.sort_by_key(|e| e.0);
    list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());

    let mut p_pos = 0;
    while p_pos < list.len() {
        let f_p = list[p_pos].0;
        let mut q_pos = p_pos + 1;
        while q_pos < list.len() {
            let (f_q, su_qc) = list[q_pos];
            let su_pq = su(data.column(f_p), data.column(f_q));
            if su_pq >= su_qc {
                list.remove(q_pos);
            } else {
                q_pos += 1;
            }
        }
        p_pos += 1;
    }
    list.into_iter().map(|e| e.0).collect()
}

/// Random categorical dataset mixing noisy class copies, exact duplicates and
/// pure noise.
pub fn random_discrete(rng: &mut ChaCha8Rng, max_features: usize, max_rows: usize) -> DiscreteDataset {
    let m = rng.gen_range(10..=max_rows);
    let n = rng.gen_range(1..=max_features);
    let classes = rng.gen_range(2..=3u32);
    let class: Vec<u32> = (0..m).map(|_| rng.gen_range(0..classes)).collect();
    let mut columns: Vec<Vec<u32>> = Vec::new();
    for _ in 0..n {
        let card = rng.gen_range(2..=4u32);
        let col: Vec<u32> = match rng.gen_range(0..4) {
            0 if !columns.is_empty() => columns[rng.gen_range(0..columns.len())].clone(),
            1 | 2 => {
                let flip = rng.gen_range(0.0..0.6);
                class
                    .iter()
                    .map(|&c| {
                        if rng.gen_bool(flip) {
                            rng.gen_range(0..card)
                        } else {
                            c % card
                        }
                    })
                    .collect()
            }
            _ => (0..m).map(|_| rng.gen_range(0..card)).collect(),
        };
        columns.push(col);
    }
    DiscreteDataset::new(
        columns
            .into_iter()
            .map(|c| DiscreteColumn::from_codes(c).unwrap())
            .collect(),
        DiscreteColumn::new(class, classes).unwrap(),
    )
    .unwrap()
}

/// Continuous dataset: `informative` features shifted by class plus noise
/// features.
pub fn gaussian_dataset(seed: u64, m: usize, informative: usize, noise: usize, separation: f64) -> RawDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = move || -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let labels: Vec<usize> = (0..m).map(|i| i % 2).collect();
    let rows = labels
        .iter()
        .map(|&c| {
            let shift = if c == 1 { separation } else { 0.0 };
            let mut row: Vec<f64> = (0..informative).map(|_| normal() + shift).collect();
            row.extend((0..noise).map(|_| normal()));
            row
        })
        .collect();
    RawDataset::from_dense(rows, labels).unwrap()
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Writes a dataset as a headered CSV with the class in the last column.
pub fn write_csv(path: &std::path::Path, data: &RawDataset) {
    let mut text = data.feature_names().join(",");
    text.push_str(",class\n");
    for (row, &label) in data.rows().iter().zip(data.labels()) {
        for cell in row {
            match cell {
                Some(v) => text.push_str(&format!("{v},")),
                None => text.push_str("?,"),
            }
        }
        text.push_str(&data.class_names()[label]);
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}
