use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrate::integrate;
use super::pde::{PdeKind, PdeSpec, SolverConfig};
use crate::error::{Result, SinoError};
use crate::spectral::{
    filter_real, grf_vector, lowpass_mask, spectral_resample, FreqGrid, GrfParams, GridSpec, RealField,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
    /// Teacher-generated synthetic data.
    Distill,
}

impl Split {
    /// Seed namespace of the split: train 0, val 1, test 2.
    pub fn seed(&self) -> u64 {
        match self {
            Split::Train => 0,
            Split::Val => 1,
            Split::Test => 2,
            Split::Distill => 1000,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Distill => "distill",
        }
    }
}

/// SplitMix64 mix of a split seed and a trajectory index.
pub fn derive_seed(split_seed: u64, index: u64) -> u64 {
    let mut z = split_seed.wrapping_mul(0xD1B5_4A32_D192_ED03).wrapping_add(index).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub pde: PdeSpec,
    pub solver: SolverConfig,
    pub split: Split,
    pub seeds: Vec<u64>,
}

/// Trajectories sampled at a fixed cadence on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryDataset {
    pub grid: GridSpec,
    pub channels: usize,
    pub cadence: f64,
    pub trajectories: Vec<Vec<RealField>>,
    pub meta: DatasetMeta,
}

impl TrajectoryDataset {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Snapshots per trajectory (0 for an empty dataset).
    pub fn snapshots(&self) -> usize {
        self.trajectories.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.snapshots();
        for (i, t) in self.trajectories.iter().enumerate() {
            if t.len() != n {
                return Err(SinoError::ShapeMismatch(format!(
                    "trajectory {i} has {} snapshots, expected {n}",
                    t.len()
                )));
            }
            if let Some(bad) = t.iter().find(|s| s.grid() != &self.grid || s.channels() != self.channels) {
                return Err(SinoError::ShapeMismatch(format!(
                    "trajectory {i} has a snapshot on {:?} with {} channel(s)",
                    bad.grid().points(),
                    bad.channels()
                )));
            }
        }
        Ok(())
    }

    /// Keeps every `stride`-th snapshot.
    pub fn subsample(&self, stride: usize) -> TrajectoryDataset {
        let mut out = self.clone();
        out.cadence = self.cadence * stride as f64;
        out.trajectories =
            self.trajectories.iter().map(|t| t.iter().step_by(stride.max(1)).cloned().collect()).collect();
        out
    }

    /// Truncates every trajectory to its first `n` snapshots.
    pub fn truncate(&self, n: usize) -> TrajectoryDataset {
        let mut out = self.clone();
        for t in &mut out.trajectories {
            t.truncate(n);
        }
        out
    }

    /// Spectrally resamples every snapshot onto `grid`.
    pub fn resample(&self, grid: &GridSpec) -> Result<TrajectoryDataset> {
        let mut out = self.clone();
        out.grid = grid.clone();
        out.trajectories = self
            .trajectories
            .iter()
            .map(|t| t.iter().map(|s| spectral_resample(s, grid)).collect())
            .collect::<Result<_>>()?;
        Ok(out)
    }
}

/// Everything needed to simulate trajectories for one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationPlan {
    pub pde: PdeSpec,
    pub solver: SolverConfig,
    /// Simulation grid.
    pub gen_grid: GridSpec,
    /// Grid the snapshots are stored on.
    pub train_grid: GridSpec,
    pub grf: GrfParams,
    /// Optional low-pass (max-norm index) applied to initial conditions.
    #[serde(default)]
    pub ic_cutoff: Option<i64>,
}

impl GenerationPlan {
    pub fn validate(&self) -> Result<()> {
        self.pde.validate()?;
        self.solver.validate()?;
        if !self.gen_grid.same_domain(&self.train_grid) {
            return Err(SinoError::IncompatibleDomain("generation and training grids cover different domains".into()));
        }
        if self.gen_grid.dim() != self.pde.dim {
            return Err(SinoError::Config("grid dimension differs from PDE dimension".into()));
        }
        Ok(())
    }

    /// Initial condition on the generation grid.
    pub fn initial_condition(&self, seed: u64) -> Result<RealField> {
        let mut ic = grf_vector(&self.gen_grid, seed, &self.grf, self.pde.channels())?;
        if let Some(cutoff) = self.ic_cutoff {
            let freq = FreqGrid::new(&self.gen_grid);
            let mask = lowpass_mask(&freq, cutoff);
            let ch = ic.channels();
            filter_real(&freq, ic.data_mut(), ch, &mask);
        }
        if self.pde.kind == PdeKind::Kse {
            debug_assert_eq!(ic.channels(), 1);
        }
        Ok(ic)
    }

    /// Simulates one trajectory and stores it on the training grid.
    pub fn trajectory(&self, seed: u64) -> Result<Vec<RealField>> {
        let ic = self.initial_condition(seed)?;
        let snaps = integrate(&self.pde, &self.solver, &ic).map_err(|e| match e {
            SinoError::NonFinite { context, at } => {
                SinoError::non_finite(format!("{context} (trajectory seed {seed})"), at)
            }
            other => other,
        })?;
        snaps.iter().map(|s| spectral_resample(s, &self.train_grid)).collect()
    }
}

/// Simulates `n_traj` trajectories whose initial-condition seeds derive from
/// the split's seed namespace. Trajectories run in parallel; the result does
/// not depend on scheduling.
pub fn generate_dataset(plan: &GenerationPlan, n_traj: usize, split: Split) -> Result<TrajectoryDataset> {
    generate_dataset_with_seed(plan, n_traj, split, split.seed())
}

pub fn generate_dataset_with_seed(
    plan: &GenerationPlan,
    n_traj: usize,
    split: Split,
    split_seed: u64,
) -> Result<TrajectoryDataset> {
    plan.validate()?;
    let seeds: Vec<u64> = (0..n_traj as u64).map(|i| derive_seed(split_seed, i)).collect();
    let trajectories = seeds.par_iter().map(|&s| plan.trajectory(s)).collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryDataset {
        grid: plan.train_grid.clone(),
        channels: plan.pde.channels(),
        cadence: plan.solver.save_dt,
        trajectories,
        meta: DatasetMeta { pde: plan.pde, solver: plan.solver, split, seeds },
    })
}
