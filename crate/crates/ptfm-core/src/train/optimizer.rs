//! Parameter update rules: the classical delta rule as a baseline and Adam
//! as the default.

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::nn::{Gradients, PerceptronNet};

/// Optimizer selector for [`super::TrainConfig`]. The step size comes from
/// the config's `learning_rate` in both cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizerKind {
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
    DeltaRule,
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam moment accumulators, parameter-shaped.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Gradients,
    pub v: Gradients,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    pub fn new(net: &PerceptronNet, learning_rate: f64) -> Self {
        Self {
            m: Gradients::zeros_like(net),
            v: Gradients::zeros_like(net),
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            learning_rate,
        }
    }

    pub fn with_betas(mut self, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        self.beta1 = beta1;
        self.beta2 = beta2;
        self.epsilon = epsilon;
        self
    }
}

/// One generalized delta-rule step: every parameter moves by
/// `-theta * gradient`.
pub fn delta_rule_step(
    net: &PerceptronNet,
    grads: &Gradients,
    theta: f64,
) -> Result<PerceptronNet, TrainError> {
    if theta <= 0.0 {
        return Err(TrainError::Domain(format!(
            "learning parameter must be positive, got {theta}"
        )));
    }
    let mut next = net.clone();
    for (p, g) in next.w1.as_mut_slice().iter_mut().zip(grads.d_w1.as_slice()) {
        *p -= theta * g;
    }
    for (p, g) in next.b1.iter_mut().zip(&grads.d_b1) {
        *p -= theta * g;
    }
    for (p, g) in next.w2.as_mut_slice().iter_mut().zip(grads.d_w2.as_slice()) {
        *p -= theta * g;
    }
    for (p, g) in next.b2.iter_mut().zip(&grads.d_b2) {
        *p -= theta * g;
    }
    Ok(next)
}

/// One Adam step with bias-corrected moments:
/// m <- b1 m + (1-b1) g, v <- b2 v + (1-b2) g^2,
/// p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps).
pub fn adam_step(
    net: &PerceptronNet,
    grads: &Gradients,
    mut state: AdamState,
) -> (PerceptronNet, AdamState) {
    state.t += 1;
    let bias1 = 1.0 - state.beta1.powi(state.t as i32);
    let bias2 = 1.0 - state.beta2.powi(state.t as i32);
    let (beta1, beta2) = (state.beta1, state.beta2);
    let (lr, eps) = (state.learning_rate, state.epsilon);

    let mut next = net.clone();
    let update = |params: &mut [f64], grads: &[f64], m: &mut [f64], v: &mut [f64]| {
        for i in 0..params.len() {
            let g = grads[i];
            m[i] = beta1 * m[i] + (1.0 - beta1) * g;
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
            let m_hat = m[i] / bias1;
            let v_hat = v[i] / bias2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    };

    update(
        next.w1.as_mut_slice(),
        grads.d_w1.as_slice(),
        state.m.d_w1.as_mut_slice(),
        state.v.d_w1.as_mut_slice(),
    );
    update(
        &mut next.b1,
        &grads.d_b1,
        &mut state.m.d_b1,
        &mut state.v.d_b1,
    );
    update(
        next.w2.as_mut_slice(),
        grads.d_w2.as_slice(),
        state.m.d_w2.as_mut_slice(),
        state.v.d_w2.as_mut_slice(),
    );
    update(
        &mut next.b2,
        &grads.d_b2,
        &mut state.m.d_b2,
        &mut state.v.d_b2,
    );

    (next, state)
}
