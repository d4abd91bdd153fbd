use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::optim::{adam_update, AdamConfig, OneCycle};
use crate::error::{Result, SinoError};
use crate::model::{freq_inputs, mlp_backward, mlp_forward, Mlp, ModelConfig};
use crate::spectral::FreqGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub steps: usize,
    pub max_lr: f64,
    pub schedule: OneCycle,
    pub adam: AdamConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            steps: 5000,
            max_lr: 0.1,
            // full-batch and deterministic: a short warm-up and a faster
            // second-moment decay settle much closer to the optimum
            schedule: OneCycle { pct_start: 0.1, ..OneCycle::default() },
            adam: AdamConfig { beta2: 0.99, ..AdamConfig::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Largest `|ψ(k) - target(k)|` over the fitted modes.
    pub max_abs_error: f64,
    pub final_mse: f64,
}

/// Supervised regression of the Freq2Vec MLP onto known multipliers.
///
/// `target[i]` holds the K values for mode `modes[i]`. Targets are
/// normalized by their largest magnitude during the fit and the scale is
/// folded into the output layer afterwards.
pub fn fit_multipliers(
    mlp: &mut Mlp,
    cfg: &ModelConfig,
    freq: &FreqGrid,
    modes: &[usize],
    target: &[Vec<Complex64>],
    fit: &FitConfig,
) -> Result<FitReport> {
    let k = cfg.k;
    if modes.len() != target.len() || target.iter().any(|t| t.len() != k) {
        return Err(SinoError::ShapeMismatch("one target of K values per mode".into()));
    }
    if modes.is_empty() {
        return Err(SinoError::ShapeMismatch("no modes to fit".into()));
    }
    let all = freq_inputs(freq, &cfg.freq_ref());
    let dim = freq.dim();
    let mut inputs = Vec::with_capacity(modes.len() * dim);
    for &m in modes {
        inputs.extend_from_slice(&all[m * dim..(m + 1) * dim]);
    }
    let scale = target.iter().flatten().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let y: Vec<f64> = target.iter().flatten().flat_map(|z| [z.re / scale, z.im / scale]).collect();
    let n = y.len() as f64;

    let mut m1: Vec<Vec<f64>> = Vec::new();
    let mut v1: Vec<Vec<f64>> = Vec::new();
    for l in &mlp.layers {
        m1.push(vec![0.0; l.weight.len()]);
        m1.push(vec![0.0; l.bias.len()]);
    }
    v1.clone_from(&m1);
    let mut final_mse = f64::NAN;
    for step in 0..fit.steps {
        let lr = fit.schedule.lr(step, fit.steps, fit.max_lr);
        let (out, tape) = mlp_forward(mlp, inputs.clone(), modes.len());
        let mut mse = 0.0;
        let d_out: Vec<f64> = out
            .iter()
            .zip(&y)
            .map(|(o, t)| {
                mse += (o - t) * (o - t);
                2.0 * (o - t) / n
            })
            .collect();
        final_mse = mse / n * scale * scale;
        let mut grad = Mlp { layers: mlp.layers.iter().map(|l| crate::model::Dense::zeros(l.n_in, l.n_out)).collect() };
        mlp_backward(mlp, &tape, &d_out, &mut grad);
        for (i, (l, g)) in mlp.layers.iter_mut().zip(&grad.layers).enumerate() {
            adam_update(&fit.adam, step as u64 + 1, lr, &mut l.weight, &mut m1[2 * i], &mut v1[2 * i], &g.weight);
            adam_update(&fit.adam, step as u64 + 1, lr, &mut l.bias, &mut m1[2 * i + 1], &mut v1[2 * i + 1], &g.bias);
        }
    }
    let last = mlp.layers.last_mut().expect("MLP has an output layer");
    last.weight.iter_mut().for_each(|w| *w *= scale);
    last.bias.iter_mut().for_each(|b| *b *= scale);
    let (out, _) = mlp_forward(mlp, inputs, modes.len());
    let max_abs_error = target
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, z)| (out[2 * i] - z.re).abs().max((out[2 * i + 1] - z.im).abs()))
        .fold(0.0, f64::max);
    Ok(FitReport { max_abs_error, final_mse })
}
