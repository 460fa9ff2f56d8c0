//! Per-feature z-scoring, fitted on training rows only.

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::linalg::Matrix;

/// Column means and population standard deviations of a training matrix.
/// Constant columns get their deviation floored at 1e-8 so transformed
/// values stay finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

const STD_FLOOR: f64 = 1e-8;

impl Standardizer {
    /// Mean 0 / deviation 1 for every column; transforms are the identity.
    pub fn identity(n_features: usize) -> Self {
        Self {
            means: vec![0.0; n_features],
            stds: vec![1.0; n_features],
        }
    }

    /// Fit on a training matrix (rows = samples). Uses the population
    /// standard deviation, i.e. the divisor is the row count, not rows - 1.
    pub fn fit(train: &Matrix) -> Result<Self, TrainError> {
        if train.rows() < 2 {
            return Err(TrainError::Domain(format!(
                "standardizer needs at least 2 rows, got {}",
                train.rows()
            )));
        }
        let n = train.rows() as f64;
        let cols = train.cols();
        let mut means = vec![0.0; cols];
        for r in 0..train.rows() {
            for (m, v) in means.iter_mut().zip(train.row(r)) {
                *m += v;
            }
        }
        for m in means.iter_mut() {
            *m /= n;
        }
        let mut vars = vec![0.0; cols];
        for r in 0..train.rows() {
            for (c, v) in train.row(r).iter().enumerate() {
                let d = v - means[c];
                vars[c] += d * d;
            }
        }
        let stds = vars.iter().map(|v| (v / n).sqrt().max(STD_FLOOR)).collect();
        Ok(Self { means, stds })
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    /// `(row - means) / stds`, elementwise.
    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>, TrainError> {
        if row.len() != self.means.len() {
            return Err(TrainError::Shape {
                context: "standardizer row",
                expected: self.means.len(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| (v - m) / s)
            .collect())
    }

    pub fn apply_matrix(&self, m: &Matrix) -> Result<Matrix, TrainError> {
        if m.cols() != self.means.len() {
            return Err(TrainError::Shape {
                context: "standardizer matrix",
                expected: self.means.len(),
                actual: m.cols(),
            });
        }
        let mut out = m.clone();
        for r in 0..m.rows() {
            let transformed = self.apply(m.row(r))?;
            for (c, v) in transformed.into_iter().enumerate() {
                out.set(r, c, v);
            }
        }
        Ok(out)
    }

    /// Inverse transform, `row * stds + means`.
    pub fn invert(&self, row: &[f64]) -> Result<Vec<f64>, TrainError> {
        if row.len() != self.means.len() {
            return Err(TrainError::Shape {
                context: "standardizer row",
                expected: self.means.len(),
                actual: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(v, (m, s))| v * s + m)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_computed_column() {
        let m = Matrix::from_rows(vec![vec![0.0], vec![2.0]]).unwrap();
        let s = Standardizer::fit(&m).unwrap();
        assert_eq!(s.means, vec![1.0]);
        assert_eq!(s.stds, vec![1.0]); // population std of {0, 2}
    }

    #[test]
    fn constant_column_gets_floored() {
        let m = Matrix::from_rows(vec![vec![5.0], vec![5.0], vec![5.0]]).unwrap();
        let s = Standardizer::fit(&m).unwrap();
        assert_eq!(s.means, vec![5.0]);
        assert_eq!(s.stds, vec![1e-8]);
    }

    #[test]
    fn transformed_columns_are_zero_mean_unit_std() {
        let m = Matrix::from_fn(200, 3, |r, c| {
            (r as f64 * 0.37 + c as f64).sin() * 10.0 + 4.0
        });
        let s = Standardizer::fit(&m).unwrap();
        let z = s.apply_matrix(&m).unwrap();
        for c in 0..3 {
            let mean: f64 = (0..z.rows()).map(|r| z.get(r, c)).sum::<f64>() / z.rows() as f64;
            let var: f64 = (0..z.rows())
                .map(|r| (z.get(r, c) - mean).powi(2))
                .sum::<f64>()
                / z.rows() as f64;
            assert!(mean.abs() < 1e-9, "column {c} mean {mean}");
            assert!(
                (var.sqrt() - 1.0).abs() < 1e-6,
                "column {c} std {}",
                var.sqrt()
            );
        }
    }

    #[test]
    fn apply_reference_points() {
        let s = Standardizer {
            means: vec![10.0],
            stds: vec![2.0],
        };
        assert_eq!(s.apply(&[14.0]).unwrap(), vec![2.0]);
        assert_eq!(s.apply(&[10.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn round_trip_apply_invert() {
        let s = Standardizer {
            means: vec![3.0, -1.0, 100.0],
            stds: vec![2.0, 0.5, 7.0],
        };
        let row = [1.25, -8.5, 42.0];
        let back = s.invert(&s.apply(&row).unwrap()).unwrap();
        for (a, b) in row.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_single_row_and_bad_lengths() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0]]).unwrap();
        assert!(Standardizer::fit(&m).is_err());
        let s = Standardizer::identity(2);
        assert!(s.apply(&[1.0]).is_err());
    }
}
