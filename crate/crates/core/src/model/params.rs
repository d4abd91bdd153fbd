use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ModelConfig;
use crate::error::{Result, SinoError};

/// Dense layer / 1x1 convolution: `y = W x + b`, `W` stored row-major (out x in).
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n_in: usize,
    pub n_out: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Dense { n_in, n_out, weight: vec![0.0; n_in * n_out], bias: vec![0.0; n_out] }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot(n_in: usize, n_out: usize, rng: &mut impl Rng) -> Self {
        let a = (6.0 / (n_in + n_out) as f64).sqrt();
        Dense {
            n_in,
            n_out,
            weight: (0..n_in * n_out).map(|_| rng.random_range(-a..a)).collect(),
            bias: vec![0.0; n_out],
        }
    }

    pub fn w(&self, o: usize, i: usize) -> f64 {
        self.weight[o * self.n_in + i]
    }

    pub fn set_w(&mut self, o: usize, i: usize, v: f64) {
        self.weight[o * self.n_in + i] = v;
    }
}

/// Fully connected network, squared-ReLU between layers, linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Where the per-mode multipliers come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralParams {
    /// Freq2Vec: `ψ(k) = MLP(k / (N/2))`, `2K` real outputs per mode.
    Freq2Vec(Mlp),
    /// Free table on the training grid: `(K, modes, re/im)`.
    Table { modes: usize, values: Vec<f64> },
}

/// Every learnable tensor of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SinoParams {
    pub spectral: SpectralParams,
    pub pi: Vec<Dense>,
    pub linear: Option<Dense>,
    pub out: Dense,
}

/// Borrowed view of one named tensor.
pub struct TensorRef<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [f64],
}

pub struct TensorMut<'a> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a mut Vec<f64>,
}

fn dense_refs<'a>(prefix: &str, d: &'a Dense, out: &mut Vec<TensorRef<'a>>) {
    out.push(TensorRef { name: format!("{prefix}.weight"), shape: vec![d.n_out, d.n_in], data: &d.weight });
    out.push(TensorRef { name: format!("{prefix}.bias"), shape: vec![d.n_out], data: &d.bias });
}

fn dense_muts<'a>(prefix: &str, d: &'a mut Dense, out: &mut Vec<TensorMut<'a>>) {
    let shape = vec![d.n_out, d.n_in];
    out.push(TensorMut { name: format!("{prefix}.weight"), shape, data: &mut d.weight });
    out.push(TensorMut { name: format!("{prefix}.bias"), shape: vec![d.n_out], data: &mut d.bias });
}

impl SinoParams {
    /// Random initialization, deterministic per seed.
    pub fn init(cfg: &ModelConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spectral = if cfg.ablation.no_freq2vec {
            let modes: usize = cfg.grid_points.iter().product();
            let a = (6.0 / (1 + 2 * cfg.k) as f64).sqrt();
            SpectralParams::Table { modes, values: (0..cfg.k * modes * 2).map(|_| rng.random_range(-a..a)).collect() }
        } else {
            let mut widths = vec![cfg.dim()];
            widths.extend(&cfg.mlp_hidden);
            widths.push(2 * cfg.k);
            SpectralParams::Freq2Vec(Mlp {
                layers: widths.windows(2).map(|w| Dense::glorot(w[0], w[1], &mut rng)).collect(),
            })
        };
        let f = cfg.features();
        let pi = (0..cfg.active_factors()).map(|_| Dense::glorot(f, cfg.width, &mut rng)).collect();
        let linear = (!cfg.ablation.no_linear).then(|| Dense::glorot(f, cfg.width, &mut rng));
        let out = Dense::glorot(cfg.out_width(), cfg.c_in, &mut rng);
        Ok(SinoParams { spectral, pi, linear, out })
    }

    /// Same structure, every entry zero.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.data.iter_mut().for_each(|v| *v = 0.0);
        }
        z
    }

    pub fn tensors(&self) -> Vec<TensorRef<'_>> {
        let mut out = Vec::new();
        match &self.spectral {
            SpectralParams::Freq2Vec(mlp) => {
                for (i, l) in mlp.layers.iter().enumerate() {
                    dense_refs(&format!("freq2vec.{i}"), l, &mut out);
                }
            }
            SpectralParams::Table { modes, values } => out.push(TensorRef {
                name: "freq2vec.table".into(),
                shape: vec![values.len() / (2 * modes), *modes, 2],
                data: values,
            }),
        }
        for (p, d) in self.pi.iter().enumerate() {
            dense_refs(&format!("pi.{p}"), d, &mut out);
        }
        if let Some(l) = &self.linear {
            dense_refs("linear", l, &mut out);
        }
        dense_refs("out", &self.out, &mut out);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<TensorMut<'_>> {
        let mut out = Vec::new();
        match &mut self.spectral {
            SpectralParams::Freq2Vec(mlp) => {
                for (i, l) in mlp.layers.iter_mut().enumerate() {
                    dense_muts(&format!("freq2vec.{i}"), l, &mut out);
                }
            }
            SpectralParams::Table { modes, values } => {
                let shape = vec![values.len() / (2 * *modes), *modes, 2];
                out.push(TensorMut { name: "freq2vec.table".into(), shape, data: values })
            }
        }
        for (p, d) in self.pi.iter_mut().enumerate() {
            dense_muts(&format!("pi.{p}"), d, &mut out);
        }
        if let Some(l) = &mut self.linear {
            dense_muts("linear", l, &mut out);
        }
        dense_muts("out", &mut self.out, &mut out);
        out
    }

    pub fn count(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    /// All values concatenated in tensor order.
    pub fn flatten(&self) -> Vec<f64> {
        self.tensors().iter().flat_map(|t| t.data.iter().copied()).collect()
    }

    /// Overwrites all values from a flat vector in tensor order.
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.count() {
            return Err(SinoError::ShapeMismatch(format!("{} values for {} parameters", flat.len(), self.count())));
        }
        let mut at = 0;
        for t in self.tensors_mut() {
            let n = t.data.len();
            t.data.copy_from_slice(&flat[at..at + n]);
            at += n;
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.tensors().iter().flat_map(|t| t.data.iter()).map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, a: f64) {
        for t in self.tensors_mut() {
            t.data.iter_mut().for_each(|v| *v *= a);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    /// Structure check against a config.
    pub fn check(&self, cfg: &ModelConfig) -> Result<()> {
        let expected = SinoParams::init(cfg, 0)?;
        let a: Vec<(String, Vec<usize>)> = self.tensors().into_iter().map(|t| (t.name, t.shape)).collect();
        let b: Vec<(String, Vec<usize>)> = expected.tensors().into_iter().map(|t| (t.name, t.shape)).collect();
        if a != b {
            return Err(SinoError::ShapeMismatch("parameter tensors do not match the model configuration".into()));
        }
        Ok(())
    }
}

/// Exact scalar parameter count for a configuration.
pub fn count_params(cfg: &ModelConfig) -> usize {
    let dense = |i: usize, o: usize| i * o + o;
    let spectral = if cfg.ablation.no_freq2vec {
        cfg.k * cfg.grid_points.iter().product::<usize>() * 2
    } else {
        let mut widths = vec![cfg.dim()];
        widths.extend(&cfg.mlp_hidden);
        widths.push(2 * cfg.k);
        widths.windows(2).map(|w| dense(w[0], w[1])).sum()
    };
    let f = cfg.features();
    let linear = if cfg.ablation.no_linear { 0 } else { dense(f, cfg.width) };
    spectral + cfg.active_factors() * dense(f, cfg.width) + linear + dense(cfg.out_width(), cfg.c_in)
}
