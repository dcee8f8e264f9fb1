mod common;

use common::gaussian_dataset;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfcbf::evaluation::{run_fold, stratified_kfold};
use rfcbf::{evaluate_pipeline, CvOptions, CvReport, Method, RawDataset, SelectionParams};

fn quick() -> CvOptions {
    CvOptions {
        repeats: 2,
        ..Default::default()
    }
}

#[test]
fn separable_data_scores_perfectly() {
    let raw = gaussian_dataset(1, 200, 2, 0, 40.0);
    for method in [Method::Fcbf, Method::Rfcbf] {
        let report = evaluate_pipeline(&raw, method, &SelectionParams::default(), &quick()).unwrap();
        assert_eq!(report.mean_accuracy, Some(1.0), "{method}");
        assert_eq!(report.na_cells, 0);
    }
}

#[test]
fn empty_selection_everywhere_gives_an_all_na_report() {
    let raw = gaussian_dataset(2, 200, 0, 3, 0.0);
    let params = SelectionParams {
        delta: 0.9,
        ..Default::default()
    };
    let report = evaluate_pipeline(&raw, Method::Fcbf, &params, &quick()).unwrap();
    assert_eq!(report.na_cells, 20);
    assert_eq!(report.mean_accuracy, None);
    assert_eq!(report.mean_selected_count, None);
    assert!(report.per_run_fold_accuracy.iter().flatten().all(Option::is_none));
}

#[test]
fn report_arithmetic_is_consistent() {
    let raw = gaussian_dataset(3, 150, 3, 5, 1.0);
    let report = evaluate_pipeline(&raw, Method::Rfcbf, &SelectionParams::default(), &quick()).unwrap();
    let cells: Vec<f64> = report.populated_accuracies().collect();
    let mean = cells.iter().sum::<f64>() / cells.len() as f64;
    assert!((mean - report.mean_accuracy.unwrap()).abs() < 1e-12);
    assert!(cells.iter().all(|a| (0.0..=1.0).contains(a)));
    assert_eq!(report.per_run_fold_accuracy.len(), 2);
    assert!(report.per_run_fold_accuracy.iter().all(|r| r.len() == 10));
}

#[test]
fn report_survives_a_json_round_trip() {
    let raw = gaussian_dataset(4, 120, 2, 2, 1.5);
    let report = evaluate_pipeline(&raw, Method::Fcbf, &SelectionParams::default(), &quick()).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: CvReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.canonical_json().unwrap(), report.canonical_json().unwrap());
    assert_eq!(back.timing, report.timing);
}

#[test]
fn every_row_is_tested_once_per_repeat() {
    let labels: Vec<usize> = (0..97).map(|i| (i * 5) % 3).collect();
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let folds = stratified_kfold(&labels, 10, &mut rng).unwrap();
        let mut seen = vec![0; labels.len()];
        for f in 0..10 {
            for (i, _) in folds.iter().enumerate().filter(|(_, &a)| a == f) {
                seen[i] += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
        for c in 0..3 {
            let per_fold: Vec<usize> = (0..10)
                .map(|f| (0..labels.len()).filter(|&i| folds[i] == f && labels[i] == c).count())
                .collect();
            assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1);
        }
    }
}

#[test]
fn seed_determinism() {
    let raw = gaussian_dataset(5, 150, 3, 5, 1.0);
    let a = evaluate_pipeline(&raw, Method::Rfcbf, &SelectionParams::default(), &quick()).unwrap();
    let b = evaluate_pipeline(&raw, Method::Rfcbf, &SelectionParams::default(), &quick()).unwrap();
    assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
}

/// Permuting the test rows' labels must not move anything that selection or
/// preprocessing sees.
#[test]
fn test_fold_labels_do_not_leak_into_selection() {
    let mut raw = gaussian_dataset(6, 200, 4, 6, 1.0);
    let mut rows = raw.rows().to_vec();
    for (i, row) in rows.iter_mut().enumerate() {
        if i % 7 == 3 {
            row[i % 10] = None;
        }
    }
    raw = RawDataset::new(
        rows,
        raw.labels().to_vec(),
        raw.feature_names().to_vec(),
        raw.class_names().to_vec(),
    )
    .unwrap();
    let test_idx: Vec<usize> = (0..200).filter(|i| i % 10 == 0).collect();
    let train_idx: Vec<usize> = (0..200).filter(|i| i % 10 != 0).collect();

    let mut labels = raw.labels().to_vec();
    let mut test_labels: Vec<usize> = test_idx.iter().map(|&i| labels[i]).collect();
    test_labels.shuffle(&mut ChaCha8Rng::seed_from_u64(0));
    test_labels.reverse();
    for (&i, &l) in test_idx.iter().zip(&test_labels) {
        labels[i] = 1 - l;
    }
    let canary = raw.with_labels(labels).unwrap();

    for method in [Method::Fcbf, Method::Rfcbf] {
        let params = SelectionParams::default();
        let a = run_fold(&raw, &train_idx, &test_idx, method, &params, &CvOptions::default()).unwrap();
        let b = run_fold(&canary, &train_idx, &test_idx, method, &params, &CvOptions::default()).unwrap();
        assert_eq!(a.selection.selected, b.selection.selected);
        assert_eq!(a.selection.scores, b.selection.scores);
    }
}

#[test]
fn missing_cells_are_handled_inside_folds() {
    let raw = gaussian_dataset(7, 120, 2, 2, 3.0);
    let mut rows = raw.rows().to_vec();
    for (i, row) in rows.iter_mut().enumerate().step_by(5) {
        row[i % 4] = None;
    }
    let raw = RawDataset::new(
        rows,
        raw.labels().to_vec(),
        raw.feature_names().to_vec(),
        raw.class_names().to_vec(),
    )
    .unwrap();
    let report = evaluate_pipeline(&raw, Method::Rfcbf, &SelectionParams::default(), &quick()).unwrap();
    assert!(report.mean_accuracy.unwrap() > 0.8);
}

#[test]
fn invalid_parameters_are_rejected() {
    let raw = gaussian_dataset(8, 30, 1, 1, 1.0);
    let bad = SelectionParams {
        sampling_probability: 0.0,
        ..Default::default()
    };
    assert!(evaluate_pipeline(&raw, Method::Rfcbf, &bad, &quick()).is_err());
    let too_many_folds = CvOptions { folds: 31, ..quick() };
    assert!(evaluate_pipeline(&raw, Method::Fcbf, &SelectionParams::default(), &too_many_folds).is_err());
}
