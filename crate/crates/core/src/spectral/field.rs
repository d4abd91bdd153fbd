use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Result, SinoError};

/// Multi-channel real field on a periodic grid, channel-major then C order.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    channels: usize,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(grid: GridSpec, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 {
            return Err(SinoError::ShapeMismatch("field needs at least one channel".into()));
        }
        let expected = channels * grid.size();
        if data.len() != expected {
            return Err(SinoError::ShapeMismatch(format!("field data has {} values, expected {expected}", data.len())));
        }
        Ok(RealField { grid, channels, data })
    }

    pub fn zeros(grid: &GridSpec, channels: usize) -> Self {
        RealField { grid: grid.clone(), channels, data: vec![0.0; channels * grid.size()] }
    }

    /// Samples `f(channel, x)` at every grid point.
    pub fn from_fn(grid: &GridSpec, channels: usize, mut f: impl FnMut(usize, &[f64]) -> f64) -> Self {
        let n = grid.size();
        let mut x = vec![0.0; grid.dim()];
        let mut data = Vec::with_capacity(channels * n);
        for c in 0..channels {
            for p in 0..n {
                grid.coords(p, &mut x);
                data.push(f(c, &x));
            }
        }
        RealField { grid: grid.clone(), channels, data }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.grid.size();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.size();
        &mut self.data[c * n..(c + 1) * n]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &RealField) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn rms(&self) -> f64 {
        (self.norm_sq() / self.data.len() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &RealField) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn channel_mean(&self, c: usize) -> f64 {
        let ch = self.channel(c);
        ch.iter().sum::<f64>() / ch.len() as f64
    }

    /// Cyclic shift by `by` cells along `axis`, every channel.
    pub fn cyclic_shift(&self, axis: usize, by: usize) -> RealField {
        let points = self.grid.points();
        let n_axis = points[axis];
        let inner: usize = points[axis + 1..].iter().product();
        let size = self.grid.size();
        let mut out = vec![0.0; self.data.len()];
        for (c_in, c_out) in self.data.chunks_exact(size).zip(out.chunks_exact_mut(size)) {
            for (slab_in, slab_out) in c_in.chunks_exact(n_axis * inner).zip(c_out.chunks_exact_mut(n_axis * inner)) {
                for i in 0..n_axis {
                    let j = (i + by) % n_axis;
                    slab_out[j * inner..(j + 1) * inner].copy_from_slice(&slab_in[i * inner..(i + 1) * inner]);
                }
            }
        }
        RealField { grid: self.grid.clone(), channels: self.channels, data: out }
    }

    /// Concatenates fields on the same grid along the channel axis.
    pub fn stack(parts: &[&RealField]) -> Result<RealField> {
        let first = parts.first().ok_or_else(|| SinoError::ShapeMismatch("nothing to stack".into()))?;
        let mut data = Vec::new();
        let mut channels = 0;
        for p in parts {
            if p.grid != first.grid {
                return Err(SinoError::ShapeMismatch("stacking fields on different grids".into()));
            }
            data.extend_from_slice(&p.data);
            channels += p.channels;
        }
        RealField::new(first.grid.clone(), channels, data)
    }
}

/// Full complex spectrum of a [`RealField`] (or any complex field), same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    channels: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, channels: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != channels * grid.size() {
            return Err(SinoError::ShapeMismatch(format!(
                "spectrum has {} coefficients, expected {}",
                coeffs.len(),
                channels * grid.size()
            )));
        }
        Ok(SpectralField { grid, channels, coeffs })
    }

    pub fn zeros(grid: &GridSpec, channels: usize) -> Self {
        SpectralField { grid: grid.clone(), channels, coeffs: vec![Complex64::default(); channels * grid.size()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        let n = self.grid.size();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.size();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += o * a;
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}
