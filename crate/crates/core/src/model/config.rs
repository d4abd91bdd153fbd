use serde::{Deserialize, Serialize};

use crate::error::{Result, SinoError};
use crate::spectral::GridSpec;

/// Component switches for ablation runs. All off is the full model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Ablation {
    /// Replace the product of factors by one affine map.
    pub no_pi: bool,
    /// Skip the 2/3 low-pass after the nonlinear branch.
    pub no_filter: bool,
    /// Replace the Freq2Vec MLP by a free per-mode table (resolution-bound).
    pub no_freq2vec: bool,
    /// Drop the linear branch.
    pub no_linear: bool,
    /// Forward Euler instead of RK4.
    pub euler_time: bool,
}

impl Ablation {
    /// The five single-component variants, with their display names.
    pub fn variants() -> Vec<(&'static str, Ablation)> {
        let none = Ablation::default();
        vec![
            ("no_pi", Ablation { no_pi: true, ..none }),
            ("no_filter", Ablation { no_filter: true, ..none }),
            ("no_freq2vec", Ablation { no_freq2vec: true, ..none }),
            ("no_linear", Ablation { no_linear: true, ..none }),
            ("euler_time", Ablation { euler_time: true, ..none }),
        ]
    }

    /// Every one of the 32 flag combinations.
    pub fn all_combinations() -> Vec<Ablation> {
        (0u8..32)
            .map(|b| Ablation {
                no_pi: b & 1 != 0,
                no_filter: b & 2 != 0,
                no_freq2vec: b & 4 != 0,
                no_linear: b & 8 != 0,
                euler_time: b & 16 != 0,
            })
            .collect()
    }
}

/// How the linear and nonlinear branches meet the output map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recombine {
    /// `W [lin ; nl] + b`, output map of width `2C`.
    #[default]
    Concat,
    /// `W (lin + nl) + b`, output map of width `C`.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// State channels.
    pub c_in: usize,
    /// Learned multipliers per input channel.
    pub k: usize,
    /// Width `C` of the linear and nonlinear branches.
    pub width: usize,
    /// Number of factors `P` in the product block.
    pub factors: usize,
    pub mlp_hidden: Vec<usize>,
    /// Model time step.
    pub dt_model: f64,
    /// Training-grid resolution. Freq2Vec sees the integer frequency index
    /// divided by half of these counts, on every grid, so a mode keeps its
    /// input when the model runs at another resolution.
    pub grid_points: Vec<usize>,
    #[serde(default)]
    pub ablation: Ablation,
    #[serde(default)]
    pub recombine: Recombine,
}

impl ModelConfig {
    /// Defaults for a given state and training grid: K=8, C=16, P=2, MLP [64, 64].
    pub fn new(c_in: usize, grid: &GridSpec, dt_model: f64) -> Self {
        ModelConfig {
            c_in,
            k: 8,
            width: 16,
            factors: 2,
            mlp_hidden: vec![64, 64],
            dt_model,
            grid_points: grid.points().to_vec(),
            ablation: Ablation::default(),
            recombine: Recombine::Concat,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid_points.len()
    }

    /// SLB output channels, `c_in * K`.
    pub fn features(&self) -> usize {
        self.c_in * self.k
    }

    /// Factors actually used by the nonlinear branch.
    pub fn active_factors(&self) -> usize {
        if self.ablation.no_pi {
            1
        } else {
            self.factors
        }
    }

    /// Input width of the output map.
    pub fn out_width(&self) -> usize {
        match (self.recombine, self.ablation.no_linear) {
            (Recombine::Concat, false) => 2 * self.width,
            _ => self.width,
        }
    }

    /// Freq2Vec normalization per axis (`N_i / 2` of the training grid).
    pub fn freq_ref(&self) -> Vec<f64> {
        self.grid_points.iter().map(|&n| n as f64 / 2.0).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SinoError::Config(m));
        if self.c_in == 0 || self.k == 0 || self.width == 0 {
            return bad(format!("c_in, k and width must be positive (got {}, {}, {})", self.c_in, self.k, self.width));
        }
        if !self.ablation.no_pi && self.factors < 2 {
            return bad(format!("the product block needs P >= 2, got {}", self.factors));
        }
        if !(self.dt_model > 0.0) {
            return bad(format!("dt_model must be positive, got {}", self.dt_model));
        }
        if !(2..=3).contains(&self.grid_points.len()) {
            return bad("grid_points must describe a 2-d or 3-d grid".into());
        }
        if self.mlp_hidden.contains(&0) {
            return bad("hidden layer widths must be positive".into());
        }
        Ok(())
    }
}
