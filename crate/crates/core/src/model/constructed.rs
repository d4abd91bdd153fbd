//! Hand-set parameters that make the model reproduce a known PDE exactly.
//!
//! The squared-ReLU MLP represents `ξ` and `ξ²` without error:
//! `ξ = (σ(ξ + c) - σ(c - ξ)) / 4c` and `ξ² = σ(ξ) + σ(-ξ)` for `|ξ| < c`.
//! Deeper hidden layers carry a value `y` through as the pair
//! `σ(y + C), σ(C - y)`.

use super::config::ModelConfig;
use super::params::{Dense, Mlp, SinoParams, SpectralParams};
use crate::error::{Result, SinoError};
use crate::spectral::GridSpec;

/// Largest `|ξ|` the construction is exact for (4x the training resolution).
pub const XI_BOUND: f64 = 4.0;
const PASS: f64 = 4.0 * XI_BOUND * XI_BOUND;

/// Freq2Vec weights producing the rows `{1, i k_1, .., i k_d, -|k|²}` in
/// physical wavenumbers; rows past `d + 2` are zero.
pub fn derivative_mlp(cfg: &ModelConfig, grid: &GridSpec) -> Result<Mlp> {
    let d = cfg.dim();
    if cfg.k < d + 2 {
        return Err(SinoError::Config(format!("need K >= {} multipliers, got {}", d + 2, cfg.k)));
    }
    if grid.points() != cfg.grid_points.as_slice() {
        return Err(SinoError::Config("construction grid differs from the model's training grid".into()));
    }
    let Some((&first, rest)) = cfg.mlp_hidden.split_first() else {
        return Err(SinoError::Config("construction needs at least one hidden layer".into()));
    };
    if first < 4 * d || rest.iter().any(|&h| h < 4 * d) {
        return Err(SinoError::Config(format!("hidden layers need width >= {}", 4 * d)));
    }
    let c = XI_BOUND;
    // First hidden layer, per axis j: units 4j..4j+4 = σ(ξ+c), σ(c-ξ), σ(ξ), σ(-ξ).
    let mut l1 = Dense::zeros(d, first);
    for j in 0..d {
        l1.set_w(4 * j, j, 1.0);
        l1.bias[4 * j] = c;
        l1.set_w(4 * j + 1, j, -1.0);
        l1.bias[4 * j + 1] = c;
        l1.set_w(4 * j + 2, j, 1.0);
        l1.set_w(4 * j + 3, j, -1.0);
    }
    // Readout of (ξ_j, ξ_j²) from the previous layer's units, as linear
    // coefficients: lin[q] = Σ coef * unit.  q = 2j for ξ_j, 2j+1 for ξ_j².
    let first_readout = |j: usize| -> [Vec<(usize, f64)>; 2] {
        [vec![(4 * j, 1.0 / (4.0 * c)), (4 * j + 1, -1.0 / (4.0 * c))], vec![(4 * j + 2, 1.0), (4 * j + 3, 1.0)]]
    };
    let pass_readout = |j: usize| -> [Vec<(usize, f64)>; 2] {
        let r = |q: usize| vec![(2 * q, 1.0 / (4.0 * PASS)), (2 * q + 1, -1.0 / (4.0 * PASS))];
        [r(2 * j), r(2 * j + 1)]
    };
    let mut layers = vec![l1];
    let mut prev_width = first;
    for (depth, &h) in rest.iter().enumerate() {
        let mut l = Dense::zeros(prev_width, h);
        for j in 0..d {
            let ro = if depth == 0 { first_readout(j) } else { pass_readout(j) };
            for (t, terms) in ro.iter().enumerate() {
                let q = 2 * j + t;
                for &(unit, coef) in terms {
                    l.set_w(2 * q, unit, coef);
                    l.set_w(2 * q + 1, unit, -coef);
                }
                l.bias[2 * q] = PASS;
                l.bias[2 * q + 1] = PASS;
            }
        }
        layers.push(l);
        prev_width = h;
    }
    let mut out = Dense::zeros(prev_width, 2 * cfg.k);
    out.bias[0] = 1.0;
    for j in 0..d {
        let a = 2.0 * std::f64::consts::PI * (grid.points()[j] as f64 / 2.0) / grid.length()[j];
        let ro = if rest.is_empty() { first_readout(j) } else { pass_readout(j) };
        for &(unit, coef) in &ro[0] {
            // imaginary part of row 1 + j
            out.set_w(2 * (1 + j) + 1, unit, out.w(2 * (1 + j) + 1, unit) + a * coef);
        }
        for &(unit, coef) in &ro[1] {
            out.set_w(2 * (d + 1), unit, out.w(2 * (d + 1), unit) - a * a * coef);
        }
    }
    layers.push(out);
    Ok(Mlp { layers })
}

/// Parameters reproducing `u_t = ν Δu - (u·∇)u`.
///
/// Feature layout per velocity component `c`: `c*K + 0` is `u_c`,
/// `c*K + 1 + j` is `∂_j u_c`, `c*K + d + 1` is `Δu_c`. Product channel
/// `c*d + j` is `u_j ∂_j u_c`; channel `d² + c` carries `Δu_c`.
pub fn burgers_params(cfg: &ModelConfig, grid: &GridSpec, nu: f64) -> Result<SinoParams> {
    cfg.validate()?;
    let d = cfg.dim();
    let a = cfg.ablation;
    if a.no_pi || a.no_linear || a.no_freq2vec {
        return Err(SinoError::Config(
            "the exact construction needs the product block, the linear block and Freq2Vec".into(),
        ));
    }
    if cfg.c_in != d {
        return Err(SinoError::Config(format!("Burgers state has {d} channels, config says {}", cfg.c_in)));
    }
    if cfg.width < d * d + d {
        return Err(SinoError::Config(format!("need width >= {}, got {}", d * d + d, cfg.width)));
    }
    let mut p = SinoParams::init(cfg, 0)?;
    p.spectral = SpectralParams::Freq2Vec(derivative_mlp(cfg, grid)?);
    let k = cfg.k;
    let f = cfg.features();
    let w = cfg.width;
    for (idx, layer) in p.pi.iter_mut().enumerate() {
        *layer = Dense::zeros(f, w);
        for c in 0..d {
            for j in 0..d {
                match idx {
                    0 => layer.set_w(c * d + j, j * k, 1.0),
                    1 => layer.set_w(c * d + j, c * k + 1 + j, 1.0),
                    _ => layer.bias[c * d + j] = 1.0,
                }
            }
        }
    }
    let mut lin = Dense::zeros(f, w);
    for c in 0..d {
        lin.set_w(d * d + c, c * k + d + 1, 1.0);
    }
    p.linear = Some(lin);
    let ow = cfg.out_width();
    let nl0 = ow - w;
    let mut out = Dense::zeros(ow, d);
    for c in 0..d {
        out.set_w(c, d * d + c, nu);
        for j in 0..d {
            out.set_w(c, nl0 + c * d + j, -1.0);
        }
    }
    p.out = out;
    Ok(p)
}
