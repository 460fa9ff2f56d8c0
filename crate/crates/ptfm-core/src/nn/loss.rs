//! Training losses: Huber for the regression networks, binary cross entropy
//! in the logit domain for the classifiers.

use serde::{Deserialize, Serialize};

use super::activation::{sigmoid, softplus};
use super::NnError;

/// Loss selector carried in training configs and model metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum LossKind {
    Huber { delta: f64 },
    BceWithLogit,
}

impl LossKind {
    pub fn huber_default() -> Self {
        LossKind::Huber { delta: 1.0 }
    }

    /// Scalar loss plus its gradient w.r.t. the prediction vector.
    pub fn evaluate(&self, pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), NnError> {
        match *self {
            LossKind::Huber { delta } => huber_loss_with_delta(pred, target, delta),
            LossKind::BceWithLogit => {
                if pred.len() != 1 || target.len() != 1 {
                    return Err(NnError::Shape {
                        context: "bce prediction",
                        expected: 1,
                        actual: pred.len().max(target.len()),
                    });
                }
                let (loss, g) = bce_loss(pred[0], target[0])?;
                Ok((loss, vec![g]))
            }
        }
    }
}

/// Mean Huber loss over a prediction vector and its exact gradient.
///
/// Per element, with error `e = pred - target`: `0.5 e^2` when `|e| < delta`,
/// else `delta (|e| - 0.5 delta)`; both branches meet at `|e| = delta`. The
/// returned gradient is the clipped error divided by the element count.
pub fn huber_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), NnError> {
    huber_loss_with_delta(pred, target, 1.0)
}

pub fn huber_loss_with_delta(
    pred: &[f64],
    target: &[f64],
    delta: f64,
) -> Result<(f64, Vec<f64>), NnError> {
    if delta <= 0.0 {
        return Err(NnError::Domain(format!(
            "huber delta must be positive, got {delta}"
        )));
    }
    if pred.len() != target.len() {
        return Err(NnError::Shape {
            context: "huber target",
            expected: pred.len(),
            actual: target.len(),
        });
    }
    if pred.is_empty() {
        return Err(NnError::Domain("huber loss of empty vectors".into()));
    }
    let n = pred.len() as f64;
    let mut total = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (&p, &t) in pred.iter().zip(target) {
        let e = p - t;
        if e.abs() < delta {
            total += 0.5 * e * e;
            grad.push(e / n);
        } else {
            total += delta * (e.abs() - 0.5 * delta);
            grad.push(delta * e.signum() / n);
        }
    }
    Ok((total / n, grad))
}

/// Binary cross entropy of a single logit against a {0,1} target, computed in
/// the logit domain: `softplus(-logit)` for a positive target, `softplus(logit)`
/// for a negative one. Gradient is `sigmoid(logit) - target`.
pub fn bce_loss(logit: f64, target: f64) -> Result<(f64, f64), NnError> {
    if target != 0.0 && target != 1.0 {
        return Err(NnError::Domain(format!(
            "bce target must be 0 or 1, got {target}"
        )));
    }
    let loss = if target == 1.0 {
        softplus(-logit)
    } else {
        softplus(logit)
    };
    Ok((loss, sigmoid(logit) - target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huber_zero_error() {
        let (loss, grad) = huber_loss(&[1.0, -2.0, 0.3], &[1.0, -2.0, 0.3]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn huber_quadratic_branch() {
        let (loss, grad) = huber_loss(&[0.5], &[0.0]).unwrap();
        assert!((loss - 0.125).abs() < 1e-15);
        assert!((grad[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn huber_linear_branch() {
        let (loss, grad) = huber_loss(&[2.0], &[0.0]).unwrap();
        assert!((loss - 1.5).abs() < 1e-15);
        assert!((grad[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn huber_branches_agree_at_unit_error() {
        // Continuity of the casework: both forms give 0.5 at |e| = 1.
        let quadratic = 0.5 * 1.0f64 * 1.0;
        let linear = 1.0 - 0.5;
        assert_eq!(quadratic, linear);
        let (loss, _) = huber_loss(&[1.0], &[0.0]).unwrap();
        assert!((loss - 0.5).abs() < 1e-15);
        let (loss_below, _) = huber_loss(&[1.0 - 1e-12], &[0.0]).unwrap();
        assert!((loss - loss_below).abs() < 1e-11);
    }

    #[test]
    fn huber_rejects_mismatch_and_empty() {
        assert!(matches!(
            huber_loss(&[1.0, 2.0], &[1.0]),
            Err(NnError::Shape {
                expected: 2,
                actual: 1,
                ..
            })
        ));
        assert!(huber_loss(&[], &[]).is_err());
    }

    #[test]
    fn huber_gradient_matches_finite_difference() {
        let target = [0.4, -1.3, 2.0, 0.0];
        let pred = [0.9, -3.0, 2.4, 1.2];
        let (_, grad) = huber_loss(&pred, &target).unwrap();
        let h = 1e-6;
        for i in 0..pred.len() {
            let mut up = pred;
            let mut dn = pred;
            up[i] += h;
            dn[i] -= h;
            let (lu, _) = huber_loss(&up, &target).unwrap();
            let (ld, _) = huber_loss(&dn, &target).unwrap();
            let numeric = (lu - ld) / (2.0 * h);
            assert!((numeric - grad[i]).abs() < 1e-8, "component {i}");
        }
    }

    #[test]
    fn bce_reference_points() {
        let (loss, _) = bce_loss(0.0, 1.0).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);

        let (loss, grad) = bce_loss(0.0, 0.0).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((grad - 0.5).abs() < 1e-15);

        let (loss, _) = bce_loss(100.0, 1.0).unwrap();
        assert!(loss < 1e-40);
    }

    #[test]
    fn bce_rejects_non_binary_target() {
        assert!(bce_loss(0.0, 0.5).is_err());
        assert!(bce_loss(0.0, -1.0).is_err());
    }

    #[test]
    fn bce_is_stable_for_extreme_logits() {
        for logit in [-700.0, -50.0, 50.0, 700.0] {
            for target in [0.0, 1.0] {
                let (loss, grad) = bce_loss(logit, target).unwrap();
                assert!(loss.is_finite() && loss >= 0.0);
                assert!(grad.is_finite());
            }
        }
    }

    #[test]
    fn bce_gradient_matches_finite_difference() {
        let h = 1e-6;
        for logit in [-2.0, -0.1, 0.0, 0.7, 3.0] {
            for target in [0.0, 1.0] {
                let (_, grad) = bce_loss(logit, target).unwrap();
                let (lu, _) = bce_loss(logit + h, target).unwrap();
                let (ld, _) = bce_loss(logit - h, target).unwrap();
                let numeric = (lu - ld) / (2.0 * h);
                assert!((numeric - grad).abs() < 1e-8);
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn huber_is_nonnegative_and_zero_only_at_equality(
                pairs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..20)
            ) {
                let pred: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let target: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                let (loss, _) = huber_loss(&pred, &target).unwrap();
                prop_assert!(loss >= 0.0);
                prop_assert_eq!(loss == 0.0, pred == target);
            }

            #[test]
            fn bce_is_nonnegative(logit in -50.0f64..50.0, positive in proptest::bool::ANY) {
                let (loss, _) = bce_loss(logit, positive as u8 as f64).unwrap();
                prop_assert!(loss >= 0.0);
            }
        }
    }
}
