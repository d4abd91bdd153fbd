//! Periodic grids, Fourier transforms and spectral operators shared by the
//! reference solvers and the learned model.

pub mod fft;
mod field;
mod grf;
mod grid;
mod ops;

pub use field::{RealField, SpectralField};
pub use grf::{grf_sample, grf_vector, GrfParams};
pub use grid::{position_of, signed_index, FreqGrid, GridSpec};
pub use ops::{
    apply_mask, apply_spectral_multiplier, derivative_multiplier, filter_real, forward_transform, inverse_transform,
    laplacian_multiplier, lowpass_mask, resample_spectrum, spectral_derivative, spectral_resample, two_thirds_mask,
    HERMITIAN_TOL,
};
