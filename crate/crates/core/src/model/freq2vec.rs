use num_complex::Complex64;

use super::config::ModelConfig;
use super::params::{Dense, Mlp, SpectralParams};
use crate::error::{Result, SinoError};
use crate::spectral::FreqGrid;

/// Multipliers `ψ(k)` evaluated on one frequency grid.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    pub k: usize,
    pub modes: usize,
    /// Raw values, `(K, modes)`.
    pub raw: Vec<Complex64>,
    /// Hermitian-symmetrized values actually applied:
    /// `ψ̃(k) = (ψ(k) + conj ψ(-k)) / 2`.
    pub applied: Vec<Complex64>,
}

impl MultiplierTable {
    pub fn from_raw(freq: &FreqGrid, k: usize, raw: Vec<Complex64>) -> Self {
        let modes = freq.len();
        let mut applied = vec![Complex64::default(); raw.len()];
        for j in 0..k {
            let r = &raw[j * modes..(j + 1) * modes];
            for m in 0..modes {
                applied[j * modes + m] = (r[m] + r[freq.mirror(m)].conj()) * 0.5;
            }
        }
        MultiplierTable { k, modes, raw, applied }
    }

    pub fn row(&self, j: usize) -> &[Complex64] {
        &self.applied[j * self.modes..(j + 1) * self.modes]
    }
}

#[inline]
pub(crate) fn act(z: f64) -> f64 {
    if z > 0.0 {
        z * z
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn act_grad(z: f64) -> f64 {
    if z > 0.0 {
        2.0 * z
    } else {
        0.0
    }
}

/// Normalized MLP inputs for every mode, `(modes, dim)`.
pub fn freq_inputs(freq: &FreqGrid, freq_ref: &[f64]) -> Vec<f64> {
    let dim = freq.dim();
    let mut x = Vec::with_capacity(freq.len() * dim);
    for m in 0..freq.len() {
        for (k, r) in freq.index(m).iter().zip(freq_ref) {
            x.push(*k as f64 / r);
        }
    }
    x
}

/// Pre-activations of each layer, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct MlpTape {
    inputs: Vec<f64>,
    pre: Vec<Vec<f64>>,
    batch: usize,
}

fn dense_batch(layer: &Dense, x: &[f64], batch: usize) -> Vec<f64> {
    let (ni, no) = (layer.n_in, layer.n_out);
    let mut y = vec![0.0; batch * no];
    for b in 0..batch {
        let xb = &x[b * ni..(b + 1) * ni];
        let yb = &mut y[b * no..(b + 1) * no];
        for o in 0..no {
            let w = &layer.weight[o * ni..(o + 1) * ni];
            yb[o] = layer.bias[o] + w.iter().zip(xb).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    y
}

/// Runs the MLP on `batch` row-major inputs.
pub fn mlp_forward(mlp: &Mlp, inputs: Vec<f64>, batch: usize) -> (Vec<f64>, MlpTape) {
    let mut pre = Vec::with_capacity(mlp.layers.len());
    let last = mlp.layers.len() - 1;
    let mut h = inputs.clone();
    for (i, layer) in mlp.layers.iter().enumerate() {
        let z = dense_batch(layer, &h, batch);
        h = if i < last { z.iter().map(|&v| act(v)).collect() } else { z.clone() };
        pre.push(z);
    }
    (h, MlpTape { inputs, pre, batch })
}

/// Accumulates parameter gradients given the output cotangent.
pub fn mlp_backward(mlp: &Mlp, tape: &MlpTape, d_out: &[f64], grad: &mut Mlp) {
    let batch = tape.batch;
    let n_layers = mlp.layers.len();
    let mut g = d_out.to_vec();
    for i in (0..n_layers).rev() {
        let layer = &mlp.layers[i];
        let (ni, no) = (layer.n_in, layer.n_out);
        let input: Vec<f64> =
            if i == 0 { tape.inputs.clone() } else { tape.pre[i - 1].iter().map(|&v| act(v)).collect() };
        let gl = &mut grad.layers[i];
        let mut gx = vec![0.0; batch * ni];
        for b in 0..batch {
            let xb = &input[b * ni..(b + 1) * ni];
            let gb = &g[b * no..(b + 1) * no];
            let gxb = &mut gx[b * ni..(b + 1) * ni];
            for o in 0..no {
                let go = gb[o];
                if go == 0.0 {
                    continue;
                }
                gl.bias[o] += go;
                let gw = &mut gl.weight[o * ni..(o + 1) * ni];
                let w = &layer.weight[o * ni..(o + 1) * ni];
                for j in 0..ni {
                    gw[j] += go * xb[j];
                    gxb[j] += go * w[j];
                }
            }
        }
        if i > 0 {
            for (v, z) in gx.iter_mut().zip(&tape.pre[i - 1]) {
                *v *= act_grad(*z);
            }
        }
        g = gx;
    }
}

/// Forward state needed to push table gradients back into parameters.
#[derive(Debug, Clone)]
pub enum SpectralTape {
    Mlp(MlpTape),
    Table,
}

/// Evaluates the multipliers of `params` on `freq`.
///
/// The free-table variant is bound to the configured training grid.
pub fn freq2vec_eval(params: &SpectralParams, cfg: &ModelConfig, freq: &FreqGrid) -> Result<MultiplierTable> {
    freq2vec_eval_taped(params, cfg, freq).map(|(t, _)| t)
}

pub fn freq2vec_eval_taped(
    params: &SpectralParams,
    cfg: &ModelConfig,
    freq: &FreqGrid,
) -> Result<(MultiplierTable, SpectralTape)> {
    let modes = freq.len();
    let k = cfg.k;
    if freq.dim() != cfg.dim() {
        return Err(SinoError::ShapeMismatch(format!("{}-d grid for a {}-d model", freq.dim(), cfg.dim())));
    }
    match params {
        SpectralParams::Freq2Vec(mlp) => {
            let (out, tape) = mlp_forward(mlp, freq_inputs(freq, &cfg.freq_ref()), modes);
            let mut raw = vec![Complex64::default(); k * modes];
            for m in 0..modes {
                for j in 0..k {
                    raw[j * modes + m] = Complex64::new(out[m * 2 * k + 2 * j], out[m * 2 * k + 2 * j + 1]);
                }
            }
            Ok((MultiplierTable::from_raw(freq, k, raw), SpectralTape::Mlp(tape)))
        }
        SpectralParams::Table { modes: tm, values } => {
            if freq.grid().points() != cfg.grid_points.as_slice() || *tm != modes {
                return Err(SinoError::IncompatibleDomain(format!(
                    "free multiplier table is bound to grid {:?}, got {:?}",
                    cfg.grid_points,
                    freq.grid().points()
                )));
            }
            let raw = values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
            Ok((MultiplierTable::from_raw(freq, k, raw), SpectralTape::Table))
        }
    }
}

/// Pushes gradients w.r.t. the applied (symmetrized) table into `grad`.
///
/// `g_applied` holds `∂L/∂Re ψ̃` in the real part and `∂L/∂Im ψ̃` in the
/// imaginary part.
pub fn freq2vec_backward(
    params: &SpectralParams,
    tape: &SpectralTape,
    freq: &FreqGrid,
    k: usize,
    g_applied: &[Complex64],
    grad: &mut SpectralParams,
) {
    let modes = freq.len();
    // through the symmetrization
    let mut g_raw = vec![Complex64::default(); k * modes];
    for j in 0..k {
        let g = &g_applied[j * modes..(j + 1) * modes];
        for m in 0..modes {
            let a = g[m];
            let b = g[freq.mirror(m)];
            g_raw[j * modes + m] = Complex64::new(0.5 * (a.re + b.re), 0.5 * (a.im - b.im));
        }
    }
    match (params, tape, grad) {
        (SpectralParams::Freq2Vec(mlp), SpectralTape::Mlp(t), SpectralParams::Freq2Vec(gm)) => {
            let mut d_out = vec![0.0; modes * 2 * k];
            for m in 0..modes {
                for j in 0..k {
                    let g = g_raw[j * modes + m];
                    d_out[m * 2 * k + 2 * j] = g.re;
                    d_out[m * 2 * k + 2 * j + 1] = g.im;
                }
            }
            mlp_backward(mlp, t, &d_out, gm);
        }
        (SpectralParams::Table { .. }, SpectralTape::Table, SpectralParams::Table { values, .. }) => {
            for (i, g) in g_raw.iter().enumerate() {
                values[2 * i] += g.re;
                values[2 * i + 1] += g.im;
            }
        }
        _ => unreachable!("gradient bundle does not mirror the parameters"),
    }
}
