use serde::{Deserialize, Serialize};

use crate::model::SinoParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdamConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// Moment buffers mirroring the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: SinoParams,
    pub v: SinoParams,
    pub step: u64,
    pub cfg: AdamConfig,
}

impl AdamState {
    pub fn new(params: &SinoParams, cfg: AdamConfig) -> Self {
        AdamState { m: params.zeros_like(), v: params.zeros_like(), step: 0, cfg }
    }
}

/// Adam update of one flat tensor at (1-based) step `step`.
pub fn adam_update(cfg: &AdamConfig, step: u64, lr: f64, p: &mut [f64], m: &mut [f64], v: &mut [f64], g: &[f64]) {
    let AdamConfig { beta1, beta2, eps } = *cfg;
    let c1 = 1.0 - beta1.powi(step as i32);
    let c2 = 1.0 - beta2.powi(step as i32);
    for i in 0..p.len() {
        let gi = g[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
        let mhat = m[i] / c1;
        let vhat = v[i] / c2;
        p[i] -= lr * mhat / (vhat.sqrt() + eps);
    }
}

/// One bias-corrected Adam update.
pub fn adam_step(state: &mut AdamState, params: &mut SinoParams, grads: &SinoParams, lr: f64) {
    state.step += 1;
    let g = grads.tensors();
    let m = state.m.tensors_mut();
    let v = state.v.tensors_mut();
    let p = params.tensors_mut();
    for (((p, m), v), g) in p.into_iter().zip(m).zip(v).zip(g) {
        adam_update(&state.cfg, state.step, lr, p.data, m.data, v.data, g.data);
    }
}

/// Rescales `grads` so their global norm is at most `max_norm`; returns the
/// norm before clipping.
pub fn clip_grad_norm(grads: &mut SinoParams, max_norm: f64) -> f64 {
    let norm = grads.norm();
    if norm > max_norm && norm > 0.0 {
        grads.scale(max_norm / norm);
        // rounding can leave the norm an ulp above the bound
        while grads.norm() > max_norm {
            grads.scale(1.0 - f64::EPSILON);
        }
    }
    norm
}

/// Cosine one-cycle schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OneCycle {
    /// Fraction of the run spent warming up.
    pub pct_start: f64,
    /// Initial rate is `max_lr / div_factor`.
    pub div_factor: f64,
    /// Final rate is `max_lr / final_div`.
    pub final_div: f64,
}

impl Default for OneCycle {
    fn default() -> Self {
        OneCycle { pct_start: 0.3, div_factor: 25.0, final_div: 1e4 }
    }
}

impl OneCycle {
    pub fn lr(&self, step: usize, total: usize, max_lr: f64) -> f64 {
        let initial = max_lr / self.div_factor;
        let last = max_lr / self.final_div;
        let warm = self.pct_start * total as f64;
        let s = step as f64;
        if s <= warm {
            if warm == 0.0 {
                return max_lr;
            }
            let c = (std::f64::consts::PI * s / warm).cos();
            max_lr - (max_lr - initial) * (1.0 + c) / 2.0
        } else {
            let span = (total as f64 - 1.0 - warm).max(f64::MIN_POSITIVE);
            let t = ((s - warm) / span).min(1.0);
            let c = (std::f64::consts::PI * t).cos();
            last + (max_lr - last) * (1.0 + c) / 2.0
        }
    }
}

/// Learning rate at `step` of `total` under the default one-cycle shape.
pub fn onecycle_lr(step: usize, total: usize, max_lr: f64) -> f64 {
    OneCycle::default().lr(step, total, max_lr)
}
