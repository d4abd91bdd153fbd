use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::fft;
use super::field::RealField;
use super::grid::{FreqGrid, GridSpec};
use crate::error::{Result, SinoError};

/// Spectral covariance of a periodic Gaussian random field:
/// `sigma(k) = scale * (4 pi^2 |k|^2 + tau^2)^(-alpha/2)` with `k` the integer
/// frequency index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrfParams {
    pub alpha: f64,
    pub tau: f64,
    pub scale: f64,
}

impl GrfParams {
    /// `scale = tau^(alpha - dim/2)`.
    pub fn with_default_scale(alpha: f64, tau: f64, dim: usize) -> Self {
        GrfParams { alpha, tau, scale: tau.powf(alpha - dim as f64 / 2.0) }
    }

    /// Vorticity initial states.
    pub fn vorticity(dim: usize) -> Self {
        GrfParams::with_default_scale(2.5, 7.0, dim)
    }

    /// Burgers velocity and KSE initial states.
    pub fn smooth_state(dim: usize) -> Self {
        GrfParams::with_default_scale(2.0, 5.0, dim)
    }

    pub fn sigma(&self, index_norm_sq: f64) -> f64 {
        let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
        self.scale * (four_pi_sq * index_norm_sq + self.tau * self.tau).powf(-self.alpha / 2.0)
    }
}

/// Draws one zero-mean periodic Gaussian random field.
///
/// Each physical Fourier mode `a_k` (with `a_{-k} = conj(a_k)`) is complex
/// Gaussian with `E|a_k|^2 = sigma(k)^2`, so amplitudes do not depend on the
/// grid resolution. The mean mode is zero.
pub fn grf_sample(grid: &GridSpec, seed: u64, params: &GrfParams) -> Result<RealField> {
    let dim = grid.dim() as f64;
    if params.alpha <= dim / 2.0 {
        return Err(SinoError::Config(format!("GRF exponent alpha={} must exceed dim/2={}", params.alpha, dim / 2.0)));
    }
    let freq = FreqGrid::new(grid);
    let n = grid.size();
    let total = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::default(); n];
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for m in 1..n {
        let mirror = freq.mirror(m);
        if mirror < m {
            continue;
        }
        let k2: f64 = freq.index(m).iter().map(|&k| (k * k) as f64).sum();
        let sigma = params.sigma(k2) * total;
        let g1: f64 = StandardNormal.sample(&mut rng);
        if mirror == m {
            coeffs[m] = Complex64::new(sigma * g1, 0.0);
        } else {
            let g2: f64 = StandardNormal.sample(&mut rng);
            let a = Complex64::new(g1, g2) * (sigma * half);
            coeffs[m] = a;
            coeffs[mirror] = a.conj();
        }
    }
    let data = fft::inverse_real(&freq, &coeffs, 1);
    RealField::new(grid.clone(), 1, data)
}

/// `channels` independent GRF draws stacked as one field.
pub fn grf_vector(grid: &GridSpec, seed: u64, params: &GrfParams, channels: usize) -> Result<RealField> {
    let mut data = Vec::with_capacity(channels * grid.size());
    for c in 0..channels {
        let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(c as u64);
        data.extend(grf_sample(grid, s, params)?.into_data());
    }
    RealField::new(grid.clone(), channels, data)
}
