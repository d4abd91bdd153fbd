use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SinoError};
use crate::spectral::{GridSpec, RealField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PdeKind {
    /// `u_t = -∇²u - ∇⁴u - 0.5|∇u|²`
    Kse,
    /// Vorticity form `ω_t = ν∇²ω - (u·∇)ω + f`
    Nse,
    /// `u_t = ν∇²u - (u·∇)u`
    Burgers,
    /// `u_t = ν∇²u`, the linear sanity case.
    Heat,
}

/// Time-independent NSE forcing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Forcing {
    #[default]
    None,
    /// `0.1 cos(8π x₁)`
    F1,
    /// `0.1 √2 sin(2π(x₁ + x₂) + π/4)`
    F2,
}

impl Forcing {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Forcing::None => 0.0,
            Forcing::F1 => 0.1 * (8.0 * PI * x[0]).cos(),
            Forcing::F2 => 0.1 * 2f64.sqrt() * (2.0 * PI * (x[0] + x[1]) + PI / 4.0).sin(),
        }
    }

    pub fn field(&self, grid: &GridSpec) -> RealField {
        RealField::from_fn(grid, 1, |_, x| self.value(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeSpec {
    pub kind: PdeKind,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub forcing: Forcing,
    pub dim: usize,
}

impl PdeSpec {
    pub fn kse() -> Self {
        PdeSpec { kind: PdeKind::Kse, nu: 0.0, forcing: Forcing::None, dim: 2 }
    }

    pub fn nse(nu: f64, forcing: Forcing) -> Self {
        PdeSpec { kind: PdeKind::Nse, nu, forcing, dim: 2 }
    }

    pub fn burgers(dim: usize, nu: f64) -> Self {
        PdeSpec { kind: PdeKind::Burgers, nu, forcing: Forcing::None, dim }
    }

    /// Scalar diffusion on a 2-D or 3-D grid.
    pub fn heat(dim: usize, nu: f64) -> Self {
        PdeSpec { kind: PdeKind::Heat, nu, forcing: Forcing::None, dim }
    }

    /// Number of state channels.
    pub fn channels(&self) -> usize {
        match self.kind {
            PdeKind::Kse | PdeKind::Nse | PdeKind::Heat => 1,
            PdeKind::Burgers => self.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.forcing != Forcing::None && self.kind != PdeKind::Nse {
            return Err(SinoError::Config("forcing is only defined for NSE".into()));
        }
        match self.kind {
            PdeKind::Burgers if !(2..=3).contains(&self.dim) => {
                Err(SinoError::Config(format!("Burgers dimension must be 2 or 3, got {}", self.dim)))
            }
            PdeKind::Kse | PdeKind::Nse if self.dim != 2 => {
                Err(SinoError::Config(format!("{:?} is two-dimensional, got dim={}", self.kind, self.dim)))
            }
            PdeKind::Heat if !(2..=3).contains(&self.dim) => {
                Err(SinoError::Config(format!("heat dimension must be 2 or 3, got {}", self.dim)))
            }
            PdeKind::Nse | PdeKind::Burgers | PdeKind::Heat if !(self.nu > 0.0) => {
                Err(SinoError::Config(format!("viscosity must be positive, got {}", self.nu)))
            }
            _ => Ok(()),
        }
    }

    pub fn check_field(&self, u: &RealField) -> Result<()> {
        if u.grid().dim() != self.dim || u.channels() != self.channels() {
            return Err(SinoError::ShapeMismatch(format!(
                "{:?} expects {} channel(s) on a {}-d grid, got {} on {}-d",
                self.kind,
                self.channels(),
                self.dim,
                u.channels(),
                u.grid().dim()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Rk4,
    /// RK4 on `e^{-Lt}û`, exact for the diagonal linear part.
    IntegratingFactorRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub save_dt: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default)]
    pub integrator: Integrator,
}

fn default_true() -> bool {
    true
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64, save_dt: f64) -> Self {
        SolverConfig { dt, t_end, save_dt, dealias: true, integrator: Integrator::Rk4 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(SinoError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if self.save_dt < self.dt || self.t_end < 0.0 {
            return Err(SinoError::Config(format!(
                "need save_dt >= dt and t_end >= 0 (dt={}, save_dt={}, t_end={})",
                self.dt, self.save_dt, self.t_end
            )));
        }
        self.steps_per_save()?;
        Ok(())
    }

    /// Solver steps between snapshots; `save_dt` must be an integer multiple of `dt`.
    pub fn steps_per_save(&self) -> Result<usize> {
        integer_ratio(self.save_dt, self.dt).ok_or_else(|| {
            SinoError::Config(format!("save_dt={} is not an integer multiple of dt={}", self.save_dt, self.dt))
        })
    }

    /// Snapshot count including the initial state.
    pub fn snapshot_count(&self) -> usize {
        (self.t_end / self.save_dt + 1e-9).floor() as usize + 1
    }
}

/// `a / b` when it is (within rounding) a positive integer.
pub fn integer_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    if n >= 1.0 && (r - n).abs() <= 1e-9 * n {
        Some(n as usize)
    } else {
        None
    }
}
