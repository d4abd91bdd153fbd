use rayon::prelude::*;

use super::metrics::pcc;
use crate::error::{Result, SinoError};
use crate::model::{ModelConfig, SinoOperator, SinoParams};
use crate::solvers::TrajectoryDataset;
use crate::spectral::GridSpec;

/// Metrics of one test trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryReport {
    pub index: usize,
    /// Pooled relative ℓ2 over snapshots `1..horizon`; NaN after a failure.
    pub rel_l2: f64,
    /// PCC per snapshot (NaN where a field has zero variance).
    pub pcc: Vec<f64>,
    /// Relative ℓ2 pooled over snapshots `1..=t`, per snapshot (0 at t = 0).
    pub rel_l2_cum: Vec<f64>,
    /// Why the rollout stopped early, if it did.
    pub failure: Option<String>,
}

impl TrajectoryReport {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Seconds between snapshots.
    pub cadence: f64,
    /// Snapshots per trajectory, the initial state included.
    pub horizon: usize,
    /// First snapshot beyond the training window, when one is marked.
    pub extrapolation_from: Option<usize>,
    pub trajectories: Vec<TrajectoryReport>,
    /// Relative ℓ2 pooled over every snapshot and trajectory; NaN when any
    /// rollout failed.
    pub rel_l2: f64,
}

impl EvalReport {
    pub fn times(&self) -> Vec<f64> {
        (0..self.horizon).map(|i| i as f64 * self.cadence).collect()
    }

    /// Marks snapshots after `seconds` as extrapolation.
    pub fn mark_train_horizon(&mut self, seconds: f64) {
        let i = (seconds / self.cadence + 1e-9).floor() as usize + 1;
        self.extrapolation_from = (i < self.horizon).then_some(i);
    }

    /// Trajectory-averaged PCC curve (failed trajectories excluded).
    pub fn mean_pcc(&self) -> Vec<f64> {
        let ok: Vec<_> = self.trajectories.iter().filter(|t| !t.failed()).collect();
        (0..self.horizon).map(|i| ok.iter().map(|t| t.pcc[i]).sum::<f64>() / ok.len() as f64).collect()
    }

    pub fn failures(&self) -> usize {
        self.trajectories.iter().filter(|t| t.failed()).count()
    }
}

/// Rolls the model out from every test initial condition over `horizon`
/// snapshots (all of them when `None`) and scores the rollouts.
///
/// A rollout that goes non-finite is recorded as a failed trajectory rather
/// than aborting the evaluation.
pub fn evaluate_rollout(
    params: &SinoParams,
    cfg: &ModelConfig,
    test: &TrajectoryDataset,
    horizon: Option<usize>,
) -> Result<EvalReport> {
    test.validate()?;
    let available = test.snapshots();
    let horizon = horizon.unwrap_or(available);
    if horizon > available {
        return Err(SinoError::InsufficientLength { needed: horizon, available });
    }
    if !test.is_empty() && (test.cadence - cfg.dt_model).abs() > 1e-9 * cfg.dt_model {
        return Err(SinoError::Config(format!(
            "test cadence {} differs from the model step {}",
            test.cadence, cfg.dt_model
        )));
    }
    let op = SinoOperator::new(params, cfg, &test.grid)?;
    if test.channels != cfg.c_in {
        return Err(SinoError::IncompatibleDomain(format!(
            "{} channel(s) in the test set, model expects {}",
            test.channels, cfg.c_in
        )));
    }
    let trajectories = test
        .trajectories
        .par_iter()
        .enumerate()
        .map(|(index, traj)| score(&op, index, &traj[..horizon]))
        .collect::<Result<Vec<_>>>()?;

    let (mut num, mut den) = (0.0, 0.0);
    for t in &trajectories {
        let d: f64 = test.trajectories[t.index][1..horizon.max(1)].iter().map(|s| s.norm_sq()).sum();
        num += t.rel_l2 * t.rel_l2 * d;
        den += d;
    }
    let rel_l2 = if trajectories.iter().any(|t| t.failed()) {
        f64::NAN
    } else if den > 0.0 {
        (num / den).sqrt()
    } else if trajectories.is_empty() || horizon <= 1 {
        0.0
    } else {
        return Err(SinoError::DegenerateTruth);
    };
    Ok(EvalReport { cadence: test.cadence, horizon, extrapolation_from: None, trajectories, rel_l2 })
}

fn score(op: &SinoOperator, index: usize, truth: &[crate::spectral::RealField]) -> Result<TrajectoryReport> {
    let n = truth.len();
    let mut report = TrajectoryReport {
        index,
        rel_l2: f64::NAN,
        pcc: Vec::with_capacity(n),
        rel_l2_cum: Vec::with_capacity(n),
        failure: None,
    };
    if n == 0 {
        return Ok(report);
    }
    let mut u = truth[0].clone();
    let (mut num, mut den) = (0.0, 0.0);
    for (i, t) in truth.iter().enumerate() {
        if i > 0 {
            match op.step(&u) {
                Ok(next) => u = next,
                Err(SinoError::NonFinite { context, at }) => {
                    report.failure = Some(format!("non-finite {context} at {at}, step {i}"));
                    report.pcc.resize(n, f64::NAN);
                    report.rel_l2_cum.resize(n, f64::NAN);
                    return Ok(report);
                }
                Err(e) => return Err(e),
            }
            for (a, b) in u.data().iter().zip(t.data()) {
                num += (b - a) * (b - a);
                den += b * b;
            }
        }
        report.pcc.push(match pcc(&u, t) {
            Ok(r) => r,
            Err(SinoError::ZeroVariance) => f64::NAN,
            Err(e) => return Err(e),
        });
        report.rel_l2_cum.push(if num == 0.0 { 0.0 } else { (num / den).sqrt() });
    }
    report.rel_l2 = if n == 1 {
        0.0
    } else if den > 0.0 {
        (num / den).sqrt()
    } else {
        return Err(SinoError::DegenerateTruth);
    };
    Ok(report)
}

/// Errors of the same parameters at the training resolution and on a finer
/// grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperResReport {
    pub native: EvalReport,
    pub fine: EvalReport,
}

impl SuperResReport {
    /// Fine-grid error over native error.
    pub fn ratio(&self) -> f64 {
        self.fine.rel_l2 / self.native.rel_l2
    }
}

/// Evaluates on `fine_test` directly and on its spectral restriction to the
/// training grid. The fine grid must be an integer refinement of the
/// training grid over the same domain.
pub fn superres_eval(
    params: &SinoParams,
    cfg: &ModelConfig,
    fine_test: &TrajectoryDataset,
    horizon: Option<usize>,
) -> Result<SuperResReport> {
    let fine_grid = &fine_test.grid;
    let commensurate = fine_grid.dim() == cfg.dim()
        && fine_grid.points().iter().zip(&cfg.grid_points).all(|(&f, &n)| f >= n && f % n == 0);
    if !commensurate {
        return Err(SinoError::IncompatibleDomain(format!(
            "{:?} is not a refinement of the training grid {:?}",
            fine_grid.points(),
            cfg.grid_points
        )));
    }
    let native_grid: GridSpec = fine_grid.with_points(cfg.grid_points.clone())?;
    let native_test = fine_test.resample(&native_grid)?;
    Ok(SuperResReport {
        native: evaluate_rollout(params, cfg, &native_test, horizon)?,
        fine: evaluate_rollout(params, cfg, fine_test, horizon)?,
    })
}
