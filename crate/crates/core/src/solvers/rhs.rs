//! Pseudo-spectral right-hand sides: derivatives as Fourier multipliers,
//! products in physical space, 2/3-rule de-aliasing of every product.

use num_complex::Complex64;

use super::pde::{Forcing, PdeKind, PdeSpec};
use crate::error::{Result, SinoError};
use crate::spectral::{
    apply_mask, derivative_multiplier, fft, forward_transform, two_thirds_mask, FreqGrid, GridSpec, RealField,
    SpectralField,
};

/// Precomputed multipliers for one PDE on one grid. State is handled as a
/// flat spectrum (channel-major) so the integrator never leaves Fourier space.
#[derive(Debug, Clone)]
pub struct ReferenceRhs {
    spec: PdeSpec,
    freq: FreqGrid,
    mask: Vec<f64>,
    dealias: bool,
    grad: Vec<Vec<Complex64>>,
    linear: Vec<f64>,
    forcing: Option<Vec<Complex64>>,
    biot_savart: Option<[Vec<Complex64>; 2]>,
}

impl ReferenceRhs {
    pub fn new(spec: &PdeSpec, grid: &GridSpec, dealias: bool) -> Result<Self> {
        spec.validate()?;
        if grid.dim() != spec.dim {
            return Err(SinoError::ShapeMismatch(format!("{:?} on a {}-d grid", spec.kind, grid.dim())));
        }
        let freq = FreqGrid::new(grid);
        let dim = grid.dim();
        let grad: Vec<Vec<Complex64>> = (0..dim)
            .map(|axis| {
                let mut orders = vec![0u32; dim];
                orders[axis] = 1;
                derivative_multiplier(&freq, &orders)
            })
            .collect();
        let linear = (0..freq.len())
            .map(|m| {
                let k2 = freq.wavenumber_sq(m);
                match spec.kind {
                    PdeKind::Kse => k2 - k2 * k2,
                    PdeKind::Nse | PdeKind::Burgers | PdeKind::Heat => -spec.nu * k2,
                }
            })
            .collect();
        let forcing = match (spec.kind, spec.forcing) {
            (PdeKind::Nse, f) if f != Forcing::None => Some(forward_transform(&f.field(grid)).into_coeffs()),
            _ => None,
        };
        let biot_savart = (spec.kind == PdeKind::Nse).then(|| biot_savart_multipliers(&freq));
        Ok(ReferenceRhs {
            spec: *spec,
            mask: two_thirds_mask(&freq),
            freq,
            dealias,
            grad,
            linear,
            forcing,
            biot_savart,
        })
    }

    pub fn spec(&self) -> &PdeSpec {
        &self.spec
    }

    pub fn freq(&self) -> &FreqGrid {
        &self.freq
    }

    pub fn channels(&self) -> usize {
        self.spec.channels()
    }

    /// Diagonal linear part, one real multiplier per mode (shared by channels).
    pub fn linear_multiplier(&self) -> &[f64] {
        &self.linear
    }

    fn dealiased(&self, mut products: Vec<Complex64>) -> Vec<Complex64> {
        if self.dealias {
            apply_mask(&mut products, &self.mask);
        }
        products
    }

    /// Nonlinear part (plus forcing) of the right-hand side, in Fourier space.
    pub fn nonlinear_hat(&self, u_hat: &[Complex64]) -> Vec<Complex64> {
        let n = self.freq.len();
        let dim = self.spec.dim;
        match self.spec.kind {
            PdeKind::Kse => {
                let spectra: Vec<Complex64> =
                    self.grad.iter().flat_map(|g| g.iter().zip(u_hat).map(|(a, b)| a * b)).collect();
                let grads = fft::inverse_real(&self.freq, &spectra, dim);
                let mut sq = vec![0.0; n];
                for g in grads.chunks_exact(n) {
                    for (s, v) in sq.iter_mut().zip(g) {
                        *s += v * v;
                    }
                }
                sq.iter_mut().for_each(|v| *v *= -0.5);
                self.dealiased(fft::forward_real(&self.freq, &sq, 1))
            }
            PdeKind::Nse => {
                let [bx, by] = self.biot_savart.as_ref().expect("NSE multipliers");
                let mut spectra = Vec::with_capacity(4 * n);
                for mult in [bx, by, &self.grad[0], &self.grad[1]] {
                    spectra.extend(mult.iter().zip(u_hat).map(|(a, b)| a * b));
                }
                let phys = fft::inverse_real(&self.freq, &spectra, 4);
                let (vel, grad) = phys.split_at(2 * n);
                let conv: Vec<f64> = (0..n).map(|p| -(vel[p] * grad[p] + vel[n + p] * grad[n + p])).collect();
                let mut out = self.dealiased(fft::forward_real(&self.freq, &conv, 1));
                if let Some(f) = &self.forcing {
                    for (o, fv) in out.iter_mut().zip(f) {
                        *o += fv;
                    }
                }
                out
            }
            PdeKind::Burgers => {
                // channels: u_0..u_{d-1}, then ∂_j u_c at d + c*d + j
                let mut spectra = Vec::with_capacity((dim + dim * dim) * n);
                spectra.extend_from_slice(u_hat);
                for c in 0..dim {
                    let uc = &u_hat[c * n..(c + 1) * n];
                    for g in &self.grad {
                        spectra.extend(g.iter().zip(uc).map(|(a, b)| a * b));
                    }
                }
                let phys = fft::inverse_real(&self.freq, &spectra, dim + dim * dim);
                let mut conv = vec![0.0; dim * n];
                for c in 0..dim {
                    let out = &mut conv[c * n..(c + 1) * n];
                    for j in 0..dim {
                        let uj = &phys[j * n..(j + 1) * n];
                        let d = &phys[(dim + c * dim + j) * n..(dim + c * dim + j + 1) * n];
                        for p in 0..n {
                            out[p] -= uj[p] * d[p];
                        }
                    }
                }
                self.dealiased(fft::forward_real(&self.freq, &conv, dim))
            }
            PdeKind::Heat => vec![Complex64::new(0.0, 0.0); u_hat.len()],
        }
    }

    /// Full right-hand side in Fourier space.
    pub fn rhs_hat(&self, u_hat: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.nonlinear_hat(u_hat);
        let n = self.freq.len();
        for (i, (o, u)) in out.iter_mut().zip(u_hat).enumerate() {
            *o += u * self.linear[i % n];
        }
        out
    }

    /// Right-hand side of a physical-space state.
    pub fn eval(&self, u: &RealField) -> Result<RealField> {
        self.spec.check_field(u)?;
        if u.grid() != self.freq.grid() {
            return Err(SinoError::ShapeMismatch("state grid differs from solver grid".into()));
        }
        let u_hat = fft::forward_real(&self.freq, u.data(), u.channels());
        let r = self.rhs_hat(&u_hat);
        RealField::new(u.grid().clone(), u.channels(), fft::inverse_real(&self.freq, &r, u.channels()))
    }
}

/// Velocity multipliers `(i k_y, -i k_x) / |k|²`, zero at `k = 0` and on
/// Nyquist indices of the differentiated axis.
fn biot_savart_multipliers(freq: &FreqGrid) -> [Vec<Complex64>; 2] {
    let dx = derivative_multiplier(freq, &[1, 0]);
    let dy = derivative_multiplier(freq, &[0, 1]);
    let inv_k2: Vec<f64> = (0..freq.len())
        .map(|m| {
            let k2 = freq.wavenumber_sq(m);
            if k2 == 0.0 {
                0.0
            } else {
                1.0 / k2
            }
        })
        .collect();
    let ux = dy.iter().zip(&inv_k2).map(|(d, w)| d * *w).collect();
    let uy = dx.iter().zip(&inv_k2).map(|(d, w)| -d * *w).collect();
    [ux, uy]
}

/// Velocity from vorticity on a 2-d periodic domain.
///
/// Returns `(û_x, û_y)` with `û = i (k_y, -k_x) / |k|² ω̂`, so that
/// `∂_x u_y - ∂_y u_x = ω` (minus its mean) and `∇·u = 0`. The mean flow is zero.
pub fn biot_savart(omega: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    if omega.grid().dim() != 2 || omega.channels() != 1 {
        return Err(SinoError::ShapeMismatch("Biot-Savart needs a single-channel 2-d vorticity".into()));
    }
    let freq = FreqGrid::new(omega.grid());
    let [bx, by] = biot_savart_multipliers(&freq);
    let ux = omega.coeffs().iter().zip(&bx).map(|(w, m)| w * m).collect();
    let uy = omega.coeffs().iter().zip(&by).map(|(w, m)| w * m).collect();
    Ok((SpectralField::new(omega.grid().clone(), 1, ux)?, SpectralField::new(omega.grid().clone(), 1, uy)?))
}

/// `-∇²u - ∇⁴u - 0.5|∇u|²`, the quadratic term de-aliased.
pub fn kse_rhs(u: &RealField) -> Result<RealField> {
    ReferenceRhs::new(&PdeSpec::kse(), u.grid(), true)?.eval(u)
}

/// `ν∇²ω - (u·∇)ω + f`, the convection term de-aliased.
pub fn nse_rhs(omega: &RealField, spec: &PdeSpec) -> Result<RealField> {
    if spec.kind != PdeKind::Nse {
        return Err(SinoError::Config("nse_rhs needs an NSE spec".into()));
    }
    ReferenceRhs::new(spec, omega.grid(), true)?.eval(omega)
}

/// `ν∇²u - (u·∇)u` per component, the products de-aliased.
pub fn burgers_rhs(u: &RealField, spec: &PdeSpec) -> Result<RealField> {
    if spec.kind != PdeKind::Burgers {
        return Err(SinoError::Config("burgers_rhs needs a Burgers spec".into()));
    }
    ReferenceRhs::new(spec, u.grid(), true)?.eval(u)
}
