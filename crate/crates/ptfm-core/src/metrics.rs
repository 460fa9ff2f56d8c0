//! Validation mathematics: RMSE for the regression networks, ROC/AUC for the
//! classifiers, and the symmetric percent difference used to compare
//! estimates against realized schedule executions.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input to {0}")]
    Empty(&'static str),
    #[error("label at index {index} is {value}, expected 0 or 1")]
    BadLabel { index: usize, value: f64 },
    #[error("roc curve requires both classes; missing {missing}")]
    SingleClass { missing: &'static str },
    #[error("{0}")]
    Domain(String),
}

/// Root mean square error in the target's units: sqrt(mean((pred - actual)^2)).
pub fn rmse(predicted: &[f64], actual: &[f64]) -> Result<f64, MetricsError> {
    if predicted.len() != actual.len() {
        return Err(MetricsError::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(MetricsError::Empty("rmse"));
    }
    let n = predicted.len() as f64;
    let sum_sq: f64 = predicted
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum();
    Ok((sum_sq / n).sqrt())
}

/// Binary confusion tallies at a fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ConfusionCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }
}

/// A rate whose denominator may be degenerate (zero); the value is then
/// defined as 0 and flagged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub value: f64,
    pub degenerate: bool,
}

fn check_labels(labels: &[f64]) -> Result<(), MetricsError> {
    for (index, &value) in labels.iter().enumerate() {
        if value != 0.0 && value != 1.0 {
            return Err(MetricsError::BadLabel { index, value });
        }
    }
    Ok(())
}

/// Tally predictions against labels; a sample is predicted positive iff its
/// score is >= the threshold (ties predict positive).
pub fn confusion_at_threshold(
    scores: &[f64],
    labels: &[f64],
    threshold: f64,
) -> Result<ConfusionCounts, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    check_labels(labels)?;
    let mut c = ConfusionCounts::default();
    for (&s, &l) in scores.iter().zip(labels) {
        let predicted_positive = s >= threshold;
        match (predicted_positive, l == 1.0) {
            (true, true) => c.true_positives += 1,
            (true, false) => c.false_positives += 1,
            (false, false) => c.true_negatives += 1,
            (false, true) => c.false_negatives += 1,
        }
    }
    Ok(c)
}

/// True positive rate TP / (TP + FN).
pub fn recall(c: &ConfusionCounts) -> Rate {
    let denom = c.true_positives + c.false_negatives;
    if denom == 0 {
        Rate {
            value: 0.0,
            degenerate: true,
        }
    } else {
        Rate {
            value: c.true_positives as f64 / denom as f64,
            degenerate: false,
        }
    }
}

/// False positive rate FP / (FP + TN).
pub fn fallout(c: &ConfusionCounts) -> Rate {
    let denom = c.false_positives + c.true_negatives;
    if denom == 0 {
        Rate {
            value: 0.0,
            degenerate: true,
        }
    } else {
        Rate {
            value: c.false_positives as f64 / denom as f64,
            degenerate: false,
        }
    }
}

/// An ROC curve as ordered (fallout, recall) points from (0,0) to (1,1),
/// both coordinates nondecreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<(f64, f64)>,
}

/// Sweep a threshold over every distinct score (descending) and emit one
/// (fallout, recall) point per threshold; tied scores move together. The
/// curve is prefixed with (0,0); the final sweep point is always (1,1)
/// because the lowest threshold predicts everything positive.
pub fn roc_curve(scores: &[f64], labels: &[f64]) -> Result<RocCurve, MetricsError> {
    if scores.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if scores.is_empty() {
        return Err(MetricsError::Empty("roc_curve"));
    }
    check_labels(labels)?;
    let positives = labels.iter().filter(|&&l| l == 1.0).count();
    let negatives = labels.len() - positives;
    if positives == 0 {
        return Err(MetricsError::SingleClass {
            missing: "positive",
        });
    }
    if negatives == 0 {
        return Err(MetricsError::SingleClass {
            missing: "negative",
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        // Consume the whole tie group before emitting a point.
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] == 1.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    if *points.last().unwrap() != (1.0, 1.0) {
        points.push((1.0, 1.0));
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve; 1.0 for a perfect ranking, 0.0 for a
/// perfectly inverted one.
pub fn auc(curve: &RocCurve) -> f64 {
    let mut area = 0.0;
    for pair in curve.points.windows(2) {
        let (x1, y1) = pair[0];
        let (x2, y2) = pair[1];
        area += (x2 - x1) * (y1 + y2) * 0.5;
    }
    area
}

/// Symmetric percent difference `100 |a - b| / ((a + b) / 2)`.
pub fn percent_difference(a: f64, b: f64) -> Result<f64, MetricsError> {
    let mean = (a + b) / 2.0;
    if mean == 0.0 {
        return Err(MetricsError::Domain(
            "percent difference undefined when a + b == 0".into(),
        ));
    }
    Ok(100.0 * (a - b).abs() / mean.abs())
}

/// Write a curve as two-column CSV (`fallout,recall`) for external plotting.
pub fn write_roc_csv<W: Write>(curve: &RocCurve, mut out: W) -> std::io::Result<()> {
    writeln!(out, "fallout,recall")?;
    for (x, y) in &curve.points {
        writeln!(out, "{x},{y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    /// Brute-force Mann-Whitney oracle: fraction of (positive, negative)
    /// pairs ranked correctly, ties worth one half.
    fn pairwise_auc(scores: &[f64], labels: &[f64]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            if li != 1.0 {
                continue;
            }
            for (j, &lj) in labels.iter().enumerate() {
                if lj != 0.0 {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn rmse_reference_points() {
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[3.0, 3.0], &[0.0, 0.0]).unwrap(), 3.0);
        let v = rmse(&[1.0, 2.0, 3.0], &[1.0, 2.0, 5.0]).unwrap();
        assert!((v - (4.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rmse_rejects_bad_inputs() {
        assert!(rmse(&[1.0], &[1.0, 2.0]).is_err());
        assert!(rmse(&[], &[]).is_err());
    }

    #[test]
    fn rmse_matches_direct_summation_oracle() {
        let mut rng = SplitMix64::new(8);
        for _ in 0..50 {
            let n = 1 + rng.next_below(100) as usize;
            let a: Vec<f64> = (0..n).map(|_| rng.uniform(-50.0, 50.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.uniform(-50.0, 50.0)).collect();
            let mut acc = 0.0;
            for i in 0..n {
                acc += (a[i] - b[i]).powi(2);
            }
            let expect = (acc / n as f64).sqrt();
            assert!((rmse(&a, &b).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn confusion_reference_cases() {
        let c = confusion_at_threshold(&[0.9, 0.1], &[1.0, 0.0], 0.5).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                true_positives: 1,
                false_positives: 0,
                true_negatives: 1,
                false_negatives: 0
            }
        );

        // Threshold below every score: everything predicted positive.
        let c = confusion_at_threshold(&[0.2, 0.7, 0.5], &[0.0, 1.0, 1.0], 0.0).unwrap();
        assert_eq!(c.true_positives + c.false_positives, 3);
        assert_eq!(c.true_negatives + c.false_negatives, 0);

        // Ties predict positive.
        let c = confusion_at_threshold(&[0.6, 0.6], &[1.0, 0.0], 0.6).unwrap();
        assert_eq!(c.true_positives, 1);
        assert_eq!(c.false_positives, 1);
    }

    #[test]
    fn confusion_rejects_non_binary_labels() {
        let err = confusion_at_threshold(&[0.5], &[0.7], 0.5).unwrap_err();
        assert_eq!(
            err,
            MetricsError::BadLabel {
                index: 0,
                value: 0.7
            }
        );
    }

    #[test]
    fn recall_and_fallout_reference_cases() {
        let c = ConfusionCounts {
            true_positives: 9,
            false_negatives: 1,
            ..Default::default()
        };
        assert_eq!(recall(&c).value, 0.9);
        let c = ConfusionCounts {
            false_positives: 0,
            true_negatives: 10,
            ..Default::default()
        };
        assert_eq!(
            fallout(&c),
            Rate {
                value: 0.0,
                degenerate: false
            }
        );
        let c = ConfusionCounts {
            true_positives: 0,
            false_negatives: 5,
            ..Default::default()
        };
        assert_eq!(recall(&c).value, 0.0);
        // Degenerate denominators are 0 with the flag set.
        let c = ConfusionCounts::default();
        assert!(recall(&c).degenerate);
        assert!(fallout(&c).degenerate);
    }

    #[test]
    fn roc_perfect_classifier_passes_through_corner() {
        let curve = roc_curve(&[0.9, 0.8, 0.2, 0.1], &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(curve.points.contains(&(0.0, 1.0)));
        assert!((auc(&curve) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn roc_uninformative_scores_are_the_diagonal() {
        let curve = roc_curve(&[0.4, 0.4, 0.4, 0.4], &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(curve.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!((auc(&curve) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn roc_hand_swept_instance() {
        // Four samples, thresholds descending at each distinct score.
        let curve = roc_curve(&[0.9, 0.8, 0.4, 0.3], &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            curve.points,
            vec![(0.0, 0.0), (0.0, 0.5), (0.5, 0.5), (0.5, 1.0), (1.0, 1.0)]
        );
    }

    #[test]
    fn roc_single_class_is_rejected_by_name() {
        let err = roc_curve(&[0.1, 0.9], &[1.0, 1.0]).unwrap_err();
        assert_eq!(
            err,
            MetricsError::SingleClass {
                missing: "negative"
            }
        );
        let err = roc_curve(&[0.1, 0.9], &[0.0, 0.0]).unwrap_err();
        assert_eq!(
            err,
            MetricsError::SingleClass {
                missing: "positive"
            }
        );
    }

    #[test]
    fn auc_extremes() {
        let perfect = roc_curve(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert_eq!(auc(&perfect), 1.0);
        let wrong = roc_curve(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert_eq!(auc(&wrong), 0.0);
    }

    #[test]
    fn auc_matches_pairwise_oracle_with_and_without_ties() {
        let mut rng = SplitMix64::new(99);
        for trial in 0..200 {
            let n = 2 + rng.next_below(198) as usize;
            // Half the trials quantize scores to force ties.
            let quantize = trial % 2 == 0;
            let mut scores = Vec::with_capacity(n);
            let mut labels = Vec::with_capacity(n);
            for i in 0..n {
                let s = rng.next_f64();
                scores.push(if quantize { (s * 8.0).floor() / 8.0 } else { s });
                // Guarantee both classes.
                labels.push(if i < 2 {
                    i as f64
                } else {
                    (rng.next_f64() < 0.5) as u8 as f64
                });
            }
            let curve = roc_curve(&scores, &labels).unwrap();
            let expect = pairwise_auc(&scores, &labels);
            assert!(
                (auc(&curve) - expect).abs() < 1e-9,
                "trial {trial}: {} vs {expect}",
                auc(&curve)
            );
        }
    }

    #[test]
    fn roc_coordinates_are_monotone_in_unit_square() {
        let mut rng = SplitMix64::new(4);
        for _ in 0..50 {
            let n = 2 + rng.next_below(60) as usize;
            let scores: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let labels: Vec<f64> = (0..n)
                .map(|i| {
                    if i == 0 {
                        0.0
                    } else {
                        (i == 1 || rng.next_f64() < 0.4) as u8 as f64
                    }
                })
                .collect();
            let curve = roc_curve(&scores, &labels).unwrap();
            assert_eq!(curve.points[0], (0.0, 0.0));
            assert_eq!(*curve.points.last().unwrap(), (1.0, 1.0));
            for pair in curve.points.windows(2) {
                assert!(pair[1].0 >= pair[0].0 && pair[1].1 >= pair[0].1);
                assert!((0.0..=1.0).contains(&pair[1].0) && (0.0..=1.0).contains(&pair[1].1));
            }
        }
    }

    #[test]
    fn percent_difference_reference_values() {
        // Worked-example comparisons of estimates vs. realized values.
        assert!((percent_difference(38.37, 38.00).unwrap() - 0.97).abs() < 0.01);
        assert!((percent_difference(93.61, 104.00).unwrap() - 10.52).abs() < 0.01);
        assert!((percent_difference(8.34, 3.00).unwrap() - 94.18).abs() < 0.01);
    }

    #[test]
    fn percent_difference_domain_error() {
        assert!(percent_difference(1.0, -1.0).is_err());
        assert!(percent_difference(0.0, 0.0).is_err());
    }

    #[test]
    fn roc_csv_has_endpoint_rows() {
        let curve = roc_curve(&[0.9, 0.1], &[1.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_roc_csv(&curve, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "fallout,recall");
        assert_eq!(lines[1], "0,0");
        assert_eq!(*lines.last().unwrap(), "1,1");
    }

    proptest! {
        #[test]
        fn rmse_symmetry_and_nonnegativity(
            pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..50)
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let ab = rmse(&a, &b).unwrap();
            let ba = rmse(&b, &a).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn percent_difference_symmetry(a in 0.01f64..1000.0, b in 0.01f64..1000.0) {
            let ab = percent_difference(a, b).unwrap();
            let ba = percent_difference(b, a).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(ab == 0.0, a == b);
        }

        #[test]
        fn negating_tie_free_scores_flips_auc(seed in 0u64..5000) {
            let mut rng = SplitMix64::new(seed);
            let n = 4 + rng.next_below(60) as usize;
            // Distinct scores by construction: i + jitter < 0.5.
            let scores: Vec<f64> = (0..n).map(|i| i as f64 + rng.next_f64() * 0.4).collect();
            let labels: Vec<f64> =
                (0..n).map(|i| if i == 0 { 0.0 } else if i == 1 { 1.0 } else { (rng.next_f64() < 0.5) as u8 as f64 }).collect();
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let a = auc(&roc_curve(&scores, &labels).unwrap());
            let b = auc(&roc_curve(&neg, &labels).unwrap());
            prop_assert!((a + b - 1.0).abs() < 1e-9);
        }
    }
}
