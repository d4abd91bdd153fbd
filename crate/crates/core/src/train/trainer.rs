use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::curriculum::sample_curriculum;
use super::grad::{backward_from, LossKind};
use super::optim::{adam_step, clip_grad_norm, AdamConfig, AdamState, OneCycle};
use crate::error::{Result, SinoError};
use crate::eval::metrics::relative_l2_trajectory;
use crate::model::{ModelConfig, SinoOperator, SinoParams};
use crate::solvers::{derive_seed, TrajectoryDataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub iterations: usize,
    pub max_lr: f64,
    /// Largest warm-up length.
    pub n1: usize,
    /// Supervised steps per segment.
    pub n2: usize,
    /// Segments per iteration.
    pub batch: usize,
    pub loss: LossKind,
    pub grad_clip: f64,
    pub seed: u64,
    /// Iterations between validation passes.
    pub val_every: usize,
    /// Snapshots per validation trajectory (`None`: all of them).
    pub val_horizon: Option<usize>,
    pub schedule: OneCycle,
    pub adam: AdamConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 20_000,
            max_lr: 1e-3,
            n1: 4,
            n2: 8,
            batch: 1,
            loss: LossKind::Mse,
            grad_clip: 1.0,
            seed: 0,
            val_every: 200,
            val_horizon: None,
            schedule: OneCycle::default(),
            adam: AdamConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SinoError::Config(m.to_string()));
        if self.iterations == 0 {
            return bad("iterations must be at least 1");
        }
        if self.n2 == 0 {
            return bad("n2 must be at least 1");
        }
        if self.batch == 0 || self.val_every == 0 {
            return bad("batch and val_every must be positive");
        }
        if !(self.max_lr > 0.0) || !(self.grad_clip > 0.0) {
            return bad("max_lr and grad_clip must be positive");
        }
        Ok(())
    }
}

/// One line of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    pub lr: f64,
    /// NaN when the iteration failed numerically and was skipped.
    pub train_loss: f64,
    pub val_rel_l2: Option<f64>,
}

/// Everything needed to continue a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainState {
    pub params: SinoParams,
    pub adam: AdamState,
    /// Position of the sampling stream (ChaCha word position).
    pub rng_word_pos: u128,
    /// Iterations completed.
    pub iteration: usize,
    pub best: SinoParams,
    pub best_val: f64,
    pub history: Vec<HistoryRow>,
    pub failures: usize,
}

/// Result of a finished run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Best parameters by validation error (last ones without validation data).
    pub params: SinoParams,
    pub best_val: f64,
    pub history: Vec<HistoryRow>,
    pub state: TrainState,
}

const MAX_FAILURES: usize = 5;

fn sampling_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, 0x5EED))
}

/// Full-horizon relative ℓ2 over a set of trajectories, pooled.
pub fn validation_error(
    params: &SinoParams,
    cfg: &ModelConfig,
    ds: &TrajectoryDataset,
    horizon: Option<usize>,
) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for traj in &ds.trajectories {
        let h = horizon.unwrap_or(traj.len()).min(traj.len());
        if h < 2 {
            continue;
        }
        let op = SinoOperator::new(params, cfg, &ds.grid)?;
        let pred = match op.rollout(&traj[0], h - 1, 1) {
            Ok(p) => p,
            Err(SinoError::NonFinite { .. }) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        };
        let r = relative_l2_trajectory(&pred[1..], &traj[1..h])?;
        let d: f64 = traj[1..h].iter().map(|s| s.norm_sq()).sum();
        num += r * r * d;
        den += d;
    }
    if den == 0.0 {
        return Err(SinoError::DegenerateTruth);
    }
    Ok((num / den).sqrt())
}

pub struct Trainer<'a> {
    train: &'a TrajectoryDataset,
    val: &'a TrajectoryDataset,
    model: ModelConfig,
    cfg: TrainConfig,
    rng: ChaCha8Rng,
    state: TrainState,
}

impl<'a> Trainer<'a> {
    pub fn new(
        train: &'a TrajectoryDataset,
        val: &'a TrajectoryDataset,
        model: ModelConfig,
        cfg: TrainConfig,
    ) -> Result<Self> {
        let params = SinoParams::init(&model, cfg.seed)?;
        let state = TrainState {
            adam: AdamState::new(&params, cfg.adam),
            best: params.clone(),
            params,
            rng_word_pos: 0,
            iteration: 0,
            best_val: f64::INFINITY,
            history: Vec::new(),
            failures: 0,
        };
        Self::resume(train, val, model, cfg, state)
    }

    /// Continues from a saved state.
    pub fn resume(
        train: &'a TrajectoryDataset,
        val: &'a TrajectoryDataset,
        model: ModelConfig,
        cfg: TrainConfig,
        state: TrainState,
    ) -> Result<Self> {
        model.validate()?;
        cfg.validate()?;
        state.params.check(&model)?;
        for ds in [train, val] {
            if ds.is_empty() {
                continue;
            }
            ds.validate()?;
            if ds.grid.points() != model.grid_points.as_slice() || ds.channels != model.c_in {
                return Err(SinoError::IncompatibleDomain(format!(
                    "dataset on {:?} with {} channel(s), model expects {:?} with {}",
                    ds.grid.points(),
                    ds.channels,
                    model.grid_points,
                    model.c_in
                )));
            }
            if (ds.cadence - model.dt_model).abs() > 1e-9 * model.dt_model {
                return Err(SinoError::Config(format!(
                    "dataset cadence {} differs from the model step {}",
                    ds.cadence, model.dt_model
                )));
            }
        }
        if train.is_empty() {
            return Err(SinoError::Config("training set is empty".into()));
        }
        let mut rng = sampling_rng(cfg.seed);
        rng.set_word_pos(state.rng_word_pos);
        Ok(Trainer { train, val, model, cfg, rng, state })
    }

    pub fn state(&self) -> &TrainState {
        &self.state
    }

    pub fn done(&self) -> bool {
        self.state.iteration >= self.cfg.iterations
    }

    /// Loss and gradient of one iteration's batch.
    fn batch_gradient(&mut self) -> Result<(f64, SinoParams)> {
        let p = &self.state.params;
        let op = SinoOperator::new(p, &self.model, &self.train.grid)?;
        let mut loss = 0.0;
        let mut grads: Option<SinoParams> = None;
        let w = 1.0 / self.cfg.batch as f64;
        for _ in 0..self.cfg.batch {
            let s = sample_curriculum(self.train, self.cfg.n1, self.cfg.n2, &mut self.rng)?;
            let mut u = s.state;
            for _ in 0..s.warmup {
                u = op.step(&u)?;
            }
            let (l, g) = backward_from(p, &self.model, &u, &s.segment[1..], self.cfg.loss, w)?;
            loss += l;
            match &mut grads {
                None => grads = Some(g),
                Some(acc) => {
                    for (a, b) in acc.tensors_mut().into_iter().zip(g.tensors()) {
                        a.data.iter_mut().zip(b.data).for_each(|(x, y)| *x += y);
                    }
                }
            }
        }
        Ok((loss, grads.expect("batch is non-empty")))
    }

    /// Runs one iteration (and validation when due).
    pub fn step(&mut self) -> Result<()> {
        let it = self.state.iteration;
        let lr = self.cfg.schedule.lr(it, self.cfg.iterations, self.cfg.max_lr);
        let loss = match self.batch_gradient() {
            Ok((loss, mut grads)) => {
                clip_grad_norm(&mut grads, self.cfg.grad_clip);
                adam_step(&mut self.state.adam, &mut self.state.params, &grads, lr);
                self.state.failures = 0;
                loss
            }
            Err(SinoError::NonFinite { context, at }) => {
                self.state.failures += 1;
                log::warn!("iteration {it}: non-finite values in {context} at {at}; update skipped");
                if self.state.failures > MAX_FAILURES {
                    return Err(SinoError::non_finite(
                        format!("training ({} consecutive failed iterations, last in {context})", self.state.failures),
                        format!("iteration {it}"),
                    ));
                }
                f64::NAN
            }
            Err(e) => return Err(e),
        };
        self.state.iteration += 1;
        let due = self.state.iteration.is_multiple_of(self.cfg.val_every) || self.state.iteration == self.cfg.iterations;
        let mut val = None;
        if due {
            if self.val.is_empty() {
                self.state.best = self.state.params.clone();
            } else {
                let v = validation_error(&self.state.params, &self.model, self.val, self.cfg.val_horizon)?;
                if v < self.state.best_val || self.state.best_val == f64::INFINITY {
                    self.state.best_val = v;
                    self.state.best = self.state.params.clone();
                }
                log::info!("iteration {}: train loss {loss:.3e}, val rel l2 {v:.4e}", self.state.iteration);
                val = Some(v);
            }
        }
        self.state.history.push(HistoryRow { iteration: it, lr, train_loss: loss, val_rel_l2: val });
        self.state.rng_word_pos = self.rng.get_word_pos();
        Ok(())
    }

    /// Runs until `iteration` iterations are complete (capped at the total).
    pub fn run_until(&mut self, iteration: usize) -> Result<()> {
        while self.state.iteration < iteration.min(self.cfg.iterations) {
            self.step()?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<TrainOutcome> {
        self.run_until(self.cfg.iterations)?;
        Ok(TrainOutcome {
            params: self.state.best.clone(),
            best_val: self.state.best_val,
            history: self.state.history.clone(),
            state: self.state,
        })
    }
}

/// Trains from scratch; returns the best-by-validation parameters.
pub fn train(
    train: &TrajectoryDataset,
    val: &TrajectoryDataset,
    model: &ModelConfig,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    Trainer::new(train, val, model.clone(), cfg.clone())?.finish()
}
