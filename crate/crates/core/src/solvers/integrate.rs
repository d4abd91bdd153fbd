use num_complex::Complex64;

use super::pde::{Integrator, PdeSpec, SolverConfig};
use super::rhs::ReferenceRhs;
use crate::error::{Result, SinoError};
use crate::spectral::{fft, RealField};

/// Vector-space operations the Runge-Kutta stages need.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn all_finite(&self) -> bool;
}

impl OdeState for RealField {
    fn axpy(&mut self, a: f64, x: &Self) {
        RealField::axpy(self, a, x);
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

impl OdeState for Vec<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += v * a;
        }
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

fn stage<S: OdeState>(k: S, which: usize) -> Result<S> {
    if k.all_finite() {
        Ok(k)
    } else {
        Err(SinoError::non_finite("RK4 stage", format!("k{which}")))
    }
}

/// Classical RK4: `u + dt/6 (k1 + 2k2 + 2k3 + k4)`.
pub fn rk4_step<S, F>(mut rhs: F, u: &S, dt: f64) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    let k1 = stage(rhs(u)?, 1)?;
    let mut s = u.clone();
    s.axpy(0.5 * dt, &k1);
    let k2 = stage(rhs(&s)?, 2)?;
    let mut s = u.clone();
    s.axpy(0.5 * dt, &k2);
    let k3 = stage(rhs(&s)?, 3)?;
    let mut s = u.clone();
    s.axpy(dt, &k3);
    let k4 = stage(rhs(&s)?, 4)?;
    let mut out = u.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    Ok(out)
}

/// Integrating-factor RK4 for `û_t = L û + N(û)` with diagonal real `L`
/// (one entry per mode, shared by all channels).
pub fn if_rk4_step<F>(linear: &[f64], mut nonlinear: F, u: &[Complex64], dt: f64) -> Result<Vec<Complex64>>
where
    F: FnMut(&[Complex64]) -> Vec<Complex64>,
{
    let n = linear.len();
    let half: Vec<f64> = linear.iter().map(|l| (l * dt * 0.5).exp()).collect();
    let e = |i: usize| half[i % n];
    let a = stage(nonlinear(u), 1)?;
    let s2: Vec<Complex64> = (0..u.len()).map(|i| (u[i] + a[i] * (0.5 * dt)) * e(i)).collect();
    let b = stage(nonlinear(&s2), 2)?;
    let s3: Vec<Complex64> = (0..u.len()).map(|i| u[i] * e(i) + b[i] * (0.5 * dt)).collect();
    let c = stage(nonlinear(&s3), 3)?;
    let s4: Vec<Complex64> = (0..u.len()).map(|i| u[i] * (e(i) * e(i)) + c[i] * (dt * e(i))).collect();
    let d = stage(nonlinear(&s4), 4)?;
    Ok((0..u.len())
        .map(|i| {
            let e1 = e(i);
            let e2 = e1 * e1;
            u[i] * e2 + (a[i] * e2 + (b[i] + c[i]) * (2.0 * e1) + d[i]) * (dt / 6.0)
        })
        .collect())
}

/// Integrates from `ic` and returns snapshots at `0, save_dt, 2 save_dt, ..`.
pub fn integrate(spec: &PdeSpec, cfg: &SolverConfig, ic: &RealField) -> Result<Vec<RealField>> {
    integrate_with(spec, cfg, ic, |_, _| {})
}

/// [`integrate`] with a callback invoked after every solver step with the
/// step count and the spectral state.
pub fn integrate_with<F>(spec: &PdeSpec, cfg: &SolverConfig, ic: &RealField, mut on_step: F) -> Result<Vec<RealField>>
where
    F: FnMut(usize, &[Complex64]),
{
    cfg.validate()?;
    spec.check_field(ic)?;
    if !ic.is_finite() {
        return Err(SinoError::non_finite("initial condition", "t=0"));
    }
    let rhs = ReferenceRhs::new(spec, ic.grid(), cfg.dealias)?;
    let freq = rhs.freq().clone();
    let channels = ic.channels();
    let per_save = cfg.steps_per_save()?;
    let n_snap = cfg.snapshot_count();
    let mut state = fft::forward_real(&freq, ic.data(), channels);
    let mut out = Vec::with_capacity(n_snap);
    out.push(ic.clone());
    let mut step = 0usize;
    for _ in 1..n_snap {
        for _ in 0..per_save {
            let next = match cfg.integrator {
                Integrator::Rk4 => rk4_step(|u: &Vec<Complex64>| Ok(rhs.rhs_hat(u)), &state, cfg.dt),
                Integrator::IntegratingFactorRk4 => {
                    if_rk4_step(rhs.linear_multiplier(), |u| rhs.nonlinear_hat(u), &state, cfg.dt)
                }
            };
            step += 1;
            state = next.map_err(|e| match e {
                SinoError::NonFinite { context, .. } => {
                    SinoError::non_finite(context, format!("t={:.6}", step as f64 * cfg.dt))
                }
                other => other,
            })?;
            on_step(step, &state);
        }
        let snap = RealField::new(ic.grid().clone(), channels, fft::inverse_real(&freq, &state, channels))?;
        if !snap.is_finite() {
            return Err(SinoError::non_finite("snapshot", format!("t={:.6}", step as f64 * cfg.dt)));
        }
        out.push(snap);
    }
    Ok(out)
}
