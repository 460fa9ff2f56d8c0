//! Scalar activation functions and their exact first derivatives.
//!
//! Every formulation here is branch-by-sign so no intermediate overflows for
//! |x| <= 700: the exponential is only ever taken of a non-positive argument.

use serde::{Deserialize, Serialize};

/// Logistic sigmoid `1 / (1 + exp(-x))`, strictly inside (0, 1).
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Softplus `ln(1 + exp(x))`, strictly positive.
///
/// For positive x this is computed as `x + ln(1 + exp(-x))` so the result is
/// exact up to rounding even when `exp(x)` would overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(sigmoid(x))`, computed as `-softplus(-x)`; strictly negative.
pub fn log_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// Hidden/output activation selector.
///
/// Regression hidden layers use [`ActivationKind::LogSigmoid`], classifier
/// hidden layers use [`ActivationKind::Softplus`], and network output layers
/// are always [`ActivationKind::Identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Identity,
    Sigmoid,
    LogSigmoid,
    Softplus,
}

impl ActivationKind {
    pub fn value(self, x: f64) -> f64 {
        match self {
            ActivationKind::Identity => x,
            ActivationKind::Sigmoid => sigmoid(x),
            ActivationKind::LogSigmoid => log_sigmoid(x),
            ActivationKind::Softplus => softplus(x),
        }
    }

    /// Exact first derivative at `x`.
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            ActivationKind::Identity => 1.0,
            ActivationKind::Sigmoid => {
                let s = sigmoid(x);
                s * (1.0 - s)
            }
            // d/dx ln(sigmoid(x)) = 1 - sigmoid(x) = sigmoid(-x)
            ActivationKind::LogSigmoid => sigmoid(-x),
            // d/dx ln(1 + exp(x)) = sigmoid(x)
            ActivationKind::Softplus => sigmoid(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Identity => "identity",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::LogSigmoid => "log_sigmoid",
            ActivationKind::Softplus => "softplus",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sigmoid_reference_points() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(100.0) - 1.0).abs() < 1e-12);
        // Direct evaluation of 1/(1+e^-1) to 10 places.
        assert!((sigmoid(1.0) - 0.7310585786).abs() < 1e-9);
    }

    #[test]
    fn softplus_reference_points() {
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(softplus(-100.0) <= 1e-40);
        assert!(softplus(-100.0) > 0.0);
        assert!((softplus(5.0) - 5.0067153484).abs() < 1e-9);
    }

    #[test]
    fn log_sigmoid_reference_points() {
        assert!((log_sigmoid(0.0) + std::f64::consts::LN_2).abs() < 1e-15);
        assert!((log_sigmoid(3.0) - (-0.0485873516)).abs() < 1e-9);
    }

    #[test]
    fn no_overflow_across_the_stated_domain() {
        for x in [-700.0, -500.0, -1.0, 0.0, 1.0, 500.0, 700.0] {
            assert!(sigmoid(x).is_finite());
            assert!(softplus(x).is_finite());
            assert!(log_sigmoid(x).is_finite());
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-6;
        for kind in [
            ActivationKind::Identity,
            ActivationKind::Sigmoid,
            ActivationKind::LogSigmoid,
            ActivationKind::Softplus,
        ] {
            for x in [-3.0, -0.7, 0.0, 0.4, 2.5] {
                let numeric = (kind.value(x + h) - kind.value(x - h)) / (2.0 * h);
                let analytic = kind.derivative(x);
                assert!(
                    (numeric - analytic).abs() < 1e-8,
                    "{:?} at {x}: {numeric} vs {analytic}",
                    kind
                );
            }
        }
    }

    proptest! {
        #[test]
        fn sigmoid_symmetry(x in -700.0f64..700.0) {
            prop_assert!((sigmoid(x) + sigmoid(-x) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn softplus_identity(x in -700.0f64..700.0) {
            prop_assert!((softplus(x) - softplus(-x) - x).abs() < 1e-10);
        }

        #[test]
        fn log_sigmoid_is_negated_softplus(x in -700.0f64..700.0) {
            // Exact by construction.
            prop_assert_eq!(log_sigmoid(x), -softplus(-x));
        }

        #[test]
        fn sigmoid_stays_in_unit_interval(x in -700.0f64..700.0) {
            // Saturates to exactly 0.0 / 1.0 outside roughly +/-37 in f64;
            // strictly interior before that.
            let s = sigmoid(x);
            prop_assert!((0.0..=1.0).contains(&s));
            if x.abs() < 30.0 {
                prop_assert!(s > 0.0 && s < 1.0);
            }
        }
    }
}
