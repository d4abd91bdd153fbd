use num_complex::Complex64;

use super::fft;
use super::field::{RealField, SpectralField};
use super::grid::{position_of, FreqGrid, GridSpec};
use crate::error::{Result, SinoError};

/// Relative bound on the imaginary residue accepted by [`inverse_transform`].
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Unnormalized forward transform of every channel.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let freq = FreqGrid::new(f.grid());
    let coeffs = fft::forward_real(&freq, f.data(), f.channels());
    SpectralField::new(f.grid().clone(), f.channels(), coeffs).expect("transform preserves shape")
}

/// Inverse transform (divides by `∏N`), rejecting spectra whose inverse has
/// an imaginary part larger than `1e-8` times the field's magnitude.
pub fn inverse_transform(s: &SpectralField) -> Result<RealField> {
    let points = s.grid().points().to_vec();
    let mut work = s.coeffs().to_vec();
    fft::inverse_inplace(&points, &mut work);
    let mut residue: f64 = 0.0;
    let mut magnitude: f64 = 0.0;
    for v in &work {
        residue = residue.max(v.im.abs());
        magnitude = magnitude.max(v.re.abs());
    }
    let bound = HERMITIAN_TOL * magnitude;
    if residue > bound && residue > f64::MIN_POSITIVE {
        return Err(SinoError::HermitianViolation { residue, bound });
    }
    RealField::new(s.grid().clone(), s.channels(), work.into_iter().map(|v| v.re).collect())
}

/// Per-mode multiplier `∏ (i k_i)^{o_i}`; Nyquist modes get 0 along any axis
/// with an odd order.
pub fn derivative_multiplier(freq: &FreqGrid, orders: &[u32]) -> Vec<Complex64> {
    assert_eq!(orders.len(), freq.dim(), "one derivative order per axis");
    (0..freq.len())
        .map(|m| {
            let k = freq.wavenumber(m);
            let mut mult = Complex64::new(1.0, 0.0);
            for (axis, &order) in orders.iter().enumerate() {
                if order == 0 {
                    continue;
                }
                if order % 2 == 1 && freq.is_nyquist(m, axis) {
                    return Complex64::default();
                }
                mult *= Complex64::new(0.0, k[axis]).powu(order);
            }
            mult
        })
        .collect()
}

/// Multiplier of the Laplacian, `-|k|^2`.
pub fn laplacian_multiplier(freq: &FreqGrid) -> Vec<f64> {
    (0..freq.len()).map(|m| -freq.wavenumber_sq(m)).collect()
}

/// Exact spectral derivative with per-axis orders.
pub fn spectral_derivative(s: &SpectralField, orders: &[u32]) -> Result<SpectralField> {
    if orders.len() != s.grid().dim() {
        return Err(SinoError::ShapeMismatch(format!(
            "{} derivative orders for a {}-d grid",
            orders.len(),
            s.grid().dim()
        )));
    }
    let freq = FreqGrid::new(s.grid());
    let mult = derivative_multiplier(&freq, orders);
    apply_spectral_multiplier(s, &mult)
}

/// 1 for modes with `|k|_inf <= floor(2 k_max / 3)`, 0 otherwise.
pub fn two_thirds_mask(freq: &FreqGrid) -> Vec<f64> {
    let cutoff = freq.grid().dealias_cutoff();
    (0..freq.len()).map(|m| if freq.index_inf_norm(m) <= cutoff { 1.0 } else { 0.0 }).collect()
}

/// 1 for modes with `|k|_inf <= cutoff`.
pub fn lowpass_mask(freq: &FreqGrid, cutoff: i64) -> Vec<f64> {
    (0..freq.len()).map(|m| if freq.index_inf_norm(m) <= cutoff { 1.0 } else { 0.0 }).collect()
}

/// Elementwise product of every channel with a per-mode multiplier.
///
/// `m` holds either one multiplier per mode (shared by all channels) or one
/// per coefficient.
pub fn apply_spectral_multiplier(s: &SpectralField, m: &[Complex64]) -> Result<SpectralField> {
    let n = s.grid().size();
    if m.len() != n && m.len() != s.coeffs().len() {
        return Err(SinoError::ShapeMismatch(format!("multiplier has {} entries for {} modes", m.len(), n)));
    }
    let coeffs = s.coeffs().iter().enumerate().map(|(i, c)| c * m[i % m.len()]).collect();
    SpectralField::new(s.grid().clone(), s.channels(), coeffs)
}

/// In-place real mask on every channel of a flat spectrum.
pub fn apply_mask(coeffs: &mut [Complex64], mask: &[f64]) {
    for chunk in coeffs.chunks_exact_mut(mask.len()) {
        for (c, &w) in chunk.iter_mut().zip(mask) {
            if w == 0.0 {
                *c = Complex64::default();
            }
        }
    }
}

/// Low-pass filters real channels in place: transform, mask, inverse.
pub fn filter_real(freq: &FreqGrid, data: &mut [f64], channels: usize, mask: &[f64]) {
    let mut spec = fft::forward_real(freq, data, channels);
    apply_mask(&mut spec, mask);
    let back = fft::inverse_real(freq, &spec, channels);
    data.copy_from_slice(&back);
}

/// Moves a spectrum between resolutions of the same domain.
///
/// Downsampling truncates (target Nyquist modes are zeroed so the result stays
/// Hermitian); upsampling zero-pads, splitting a source Nyquist coefficient
/// evenly between `±N/2`. Coefficients are rescaled for the unnormalized
/// forward convention, so mode amplitudes (and the mean) are preserved.
pub fn resample_spectrum(s: &SpectralField, target: &GridSpec) -> Result<SpectralField> {
    let source = s.grid();
    if !source.same_domain(target) {
        return Err(SinoError::IncompatibleDomain(format!(
            "cannot resample {:?} onto {:?}",
            source.length(),
            target.length()
        )));
    }
    let src_freq = FreqGrid::new(source);
    let tgt_freq = FreqGrid::new(target);
    let dim = source.dim();
    let ratio = target.size() as f64 / source.size() as f64;
    let mut out = SpectralField::zeros(target, s.channels());
    let tp = target.points();
    let sp = source.points();
    for m in 0..src_freq.len() {
        let k = src_freq.index(m);
        // Candidate target positions for this source mode (two when the
        // source index is a Nyquist index that must be split).
        let mut targets: Vec<(usize, f64)> = vec![(0, 1.0)];
        for axis in 0..dim {
            let mut next = Vec::with_capacity(targets.len() * 2);
            let ka = k[axis];
            let src_nyq = ka == -((sp[axis] / 2) as i64);
            let options: Vec<(i64, f64)> =
                if src_nyq && tp[axis] > sp[axis] { vec![(ka, 0.5), (-ka, 0.5)] } else { vec![(ka, 1.0)] };
            for &(flat, w) in &targets {
                for &(kk, ww) in &options {
                    let Some(pos) = position_of(kk, tp[axis]) else { continue };
                    if kk == -((tp[axis] / 2) as i64) && tp[axis] < sp[axis] {
                        continue;
                    }
                    next.push((flat * tp[axis] + pos, w * ww));
                }
            }
            targets = next;
        }
        for (flat, w) in targets {
            for c in 0..s.channels() {
                out.channel_mut(c)[flat] += s.channel(c)[m] * (w * ratio);
            }
        }
    }
    debug_assert_eq!(tgt_freq.len(), target.size());
    Ok(out)
}

/// Spectral resampling of a real field onto another resolution of the same domain.
pub fn spectral_resample(f: &RealField, target: &GridSpec) -> Result<RealField> {
    if f.grid() == target {
        return Ok(f.clone());
    }
    let spec = resample_spectrum(&forward_transform(f), target)?;
    let freq = FreqGrid::new(target);
    let data = fft::inverse_real(&freq, spec.coeffs(), spec.channels());
    RealField::new(target.clone(), f.channels(), data)
}
