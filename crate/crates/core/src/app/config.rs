use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SinoError};
use crate::io::{canonical_toml, config_hash};
use crate::model::ModelConfig;
use crate::solvers::{Forcing, GenerationPlan, PdeSpec, SolverConfig, Split};
use crate::spectral::{GrfParams, GridSpec};
use crate::train::TrainConfig;

/// Data generation for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub pde: PdeSpec,
    pub solver: SolverConfig,
    /// Simulation grid.
    pub gen_grid: GridSpec,
    /// Grid the snapshots are stored and trained on.
    pub train_grid: GridSpec,
    pub grf: GrfParams,
    #[serde(default)]
    pub ic_cutoff: Option<i64>,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// Longer horizon for the test split (extrapolation beyond `solver.t_end`).
    #[serde(default)]
    pub test_t_end: Option<f64>,
}

impl DataConfig {
    pub fn plan(&self, split: Split) -> GenerationPlan {
        let mut solver = self.solver;
        if let (Split::Test, Some(t)) = (split, self.test_t_end) {
            solver.t_end = t;
        }
        GenerationPlan {
            pde: self.pde,
            solver,
            gen_grid: self.gen_grid.clone(),
            train_grid: self.train_grid.clone(),
            grf: self.grf,
            ic_cutoff: self.ic_cutoff,
        }
    }

    pub fn count(&self, split: Split) -> usize {
        match split {
            Split::Train => self.n_train,
            Split::Val => self.n_val,
            Split::Test => self.n_test,
            Split::Distill => 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Snapshots to roll out (all when unset).
    pub horizon: Option<usize>,
    /// End of the training window in seconds; later snapshots are marked as
    /// extrapolation.
    pub train_horizon: Option<f64>,
    /// Also evaluate on a grid this many times finer.
    pub superres_factor: Option<usize>,
}

/// Grid for `sweep`: either training-set sizes or a width × K grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Non-empty: sweep the number of training trajectories.
    pub n_train: Vec<usize>,
    pub widths: Vec<usize>,
    pub ks: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { n_train: Vec::new(), widths: vec![16, 32], ks: vec![4, 8] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistillConfig {
    pub n_traj: usize,
    /// Snapshot cadence of the synthetic data (a multiple of the model step).
    pub cadence: f64,
    pub t_end: f64,
}

impl Default for DistillConfig {
    fn default() -> Self {
        DistillConfig { n_traj: 4, cadence: 0.05, t_end: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// "E1" … "E7" (optionally "-desk") or "custom".
    pub case: String,
    pub out_dir: PathBuf,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub distill: DistillConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| SinoError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SinoError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        canonical_toml(self)
    }

    /// SHA-256 of the canonical text.
    pub fn hash(&self) -> Result<String> {
        config_hash(self)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.data;
        d.pde.validate()?;
        d.solver.validate()?;
        d.gen_grid.validate()?;
        d.train_grid.validate()?;
        d.plan(Split::Train).validate()?;
        if let Some(t) = d.test_t_end {
            if t < d.solver.t_end {
                return Err(SinoError::Config("test_t_end is shorter than the training horizon".into()));
            }
        }
        self.model.validate()?;
        self.train.validate()?;
        if self.model.grid_points != d.train_grid.points() {
            return Err(SinoError::Config(format!(
                "model grid {:?} differs from the training grid {:?}",
                self.model.grid_points,
                d.train_grid.points()
            )));
        }
        if self.model.c_in != d.pde.channels() {
            return Err(SinoError::Config(format!(
                "model has {} input channel(s), the PDE state {}",
                self.model.c_in,
                d.pde.channels()
            )));
        }
        if (self.model.dt_model - d.solver.save_dt).abs() > 1e-12 * d.solver.save_dt {
            return Err(SinoError::Config(format!(
                "model step {} must equal the snapshot cadence {}",
                self.model.dt_model, d.solver.save_dt
            )));
        }
        if self.eval.superres_factor == Some(0) {
            return Err(SinoError::Config("superres_factor must be at least 1".into()));
        }
        Ok(())
    }

    /// Named preset: "E1" … "E7" at paper scale, "E1-desk" … "E7-desk"
    /// reduced for a desktop CPU.
    pub fn preset(name: &str) -> Result<Self> {
        let upper = name.to_ascii_uppercase();
        let (case, desk) = match upper.strip_suffix("-DESK") {
            Some(c) => (c.to_string(), true),
            None => (upper.clone(), false),
        };
        let cfg = match (case.as_str(), desk) {
            ("E1", false) => kse(108, 54, 1e-4, 1e-3, 5.0, 20_000),
            ("E1", true) => kse(64, 32, 1e-3, 5e-3, 2.0, 2_000),
            ("E2", d) => nse(1e-4, Forcing::F1, d),
            ("E3", d) => nse(1e-5, Forcing::F1, d),
            ("E4", d) => nse(1e-4, Forcing::F2, d),
            ("E5", d) => nse(1e-5, Forcing::F2, d),
            ("E6", false) => burgers(2, 512, 128, 1e-3, 5e-3, 2.0, 20_000, [5, 2, 5]),
            ("E6", true) => burgers(2, 64, 32, 1e-3, 5e-3, 1.0, 2_000, [2, 2, 5]),
            ("E7", false) => burgers(3, 128, 64, 5e-3, 5e-2, 5.0, 5_000, [5, 2, 5]),
            ("E7", true) => burgers(3, 32, 16, 5e-3, 5e-2, 2.0, 500, [2, 2, 3]),
            _ => return Err(SinoError::Config(format!("unknown preset {name:?} (E1…E7, optionally -desk)"))),
        };
        let mut cfg = cfg?;
        cfg.case = if desk { format!("{case}-desk") } else { case.clone() };
        cfg.out_dir = PathBuf::from("runs").join(cfg.case.to_ascii_lowercase());
        if case == "E6" {
            // 2-D Burgers doubles as the zero-shot super-resolution case
            cfg.eval.superres_factor = Some(2);
        }
        if !desk {
            // best setting of the published width × K sensitivity grid
            cfg.model.width = 64;
            cfg.model.k = 8;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    pde: PdeSpec,
    solver: SolverConfig,
    l: f64,
    gen: usize,
    train_n: usize,
    grf: GrfParams,
    counts: [usize; 3],
    iterations: usize,
    max_lr: f64,
) -> Result<ExperimentConfig> {
    let dim = pde.dim;
    let train_grid = GridSpec::cube(dim, train_n, l)?;
    let model = ModelConfig::new(pde.channels(), &train_grid, solver.save_dt);
    let train = TrainConfig { iterations, max_lr, ..TrainConfig::default() };
    Ok(ExperimentConfig {
        case: String::new(),
        out_dir: PathBuf::new(),
        data: DataConfig {
            pde,
            solver,
            gen_grid: GridSpec::cube(dim, gen, l)?,
            train_grid,
            grf,
            ic_cutoff: None,
            n_train: counts[0],
            n_val: counts[1],
            n_test: counts[2],
            test_t_end: None,
        },
        model,
        train,
        eval: EvalConfig::default(),
        sweep: SweepConfig::default(),
        distill: DistillConfig::default(),
    })
}

fn kse(gen: usize, train: usize, dt: f64, save: f64, t_end: f64, iterations: usize) -> Result<ExperimentConfig> {
    assemble(
        PdeSpec::kse(),
        SolverConfig::new(dt, t_end, save),
        12.0 * PI,
        gen,
        train,
        GrfParams::smooth_state(2),
        [2, 2, 5],
        iterations,
        1e-3,
    )
}

fn nse(nu: f64, forcing: Forcing, desk: bool) -> Result<ExperimentConfig> {
    let (gen, train, dt, t_end, test_end, iterations) =
        if desk { (64, 32, 1e-3, 2.0, 3.0, 2_000) } else { (256, 64, 1e-4, 10.0, 15.0, 20_000) };
    let mut cfg = assemble(
        PdeSpec::nse(nu, forcing),
        SolverConfig::new(dt, t_end, 5e-3),
        1.0,
        gen,
        train,
        GrfParams::vorticity(2),
        [5, 2, 5],
        iterations,
        1e-3,
    )?;
    cfg.data.test_t_end = Some(test_end);
    cfg.eval.train_horizon = Some(t_end);
    Ok(cfg)
}

#[allow(clippy::too_many_arguments)]
fn burgers(
    dim: usize,
    gen: usize,
    train: usize,
    dt: f64,
    save: f64,
    t_end: f64,
    iterations: usize,
    counts: [usize; 3],
) -> Result<ExperimentConfig> {
    assemble(
        PdeSpec::burgers(dim, 0.01),
        SolverConfig::new(dt, t_end, save),
        2.0 * PI,
        gen,
        train,
        GrfParams::smooth_state(dim),
        counts,
        iterations,
        1e-2,
    )
}
