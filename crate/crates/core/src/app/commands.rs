use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::data::{read_split, write_split, Manifest};
use crate::error::{Result, SinoError};
use crate::eval::{evaluate_rollout, fmt_f64, report_csv, superres_eval, EvalReport};
use crate::io::{
    atomic_write, canonical_toml, config_hash, params_from_tensors, params_to_tensors, CheckpointContainer, NamedTensor,
};
use crate::model::{Ablation, ModelConfig, SinoOperator, SinoParams};
use crate::solvers::{derive_seed, generate_dataset, integer_ratio, DatasetMeta, Split, TrajectoryDataset};
use crate::spectral::spectral_resample;
use crate::train::{AdamState, HistoryRow, TrainConfig, TrainState, Trainer};

pub fn data_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out_dir.join("data")
}

pub fn train_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out_dir.join("train")
}

/// Writes train/val/test containers (split seeds 0/1/2) and the manifest.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<Manifest> {
    cfg.validate()?;
    let dir = data_dir(cfg);
    let mut files = Vec::new();
    for split in [Split::Train, Split::Val, Split::Test] {
        let n = cfg.data.count(split);
        log::info!("generating {n} {} trajectories", split.name());
        let ds = generate_dataset(&cfg.data.plan(split), n, split)?;
        files.push(write_split(&dir, &ds)?);
    }
    let manifest = Manifest { config_hash: config_hash(&cfg.data)?, files };
    manifest.write(&dir)?;
    Ok(manifest)
}

/// Loads the generated data, generating it first when absent or stale.
pub fn ensure_data(cfg: &ExperimentConfig) -> Result<Manifest> {
    let dir = data_dir(cfg);
    match Manifest::read(&dir) {
        Ok(m) if m.config_hash == config_hash(&cfg.data)? => Ok(m),
        _ => cmd_generate(cfg),
    }
}

/// What a checkpoint's text block records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointEcho {
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub state: StateEcho,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateEcho {
    pub iteration: usize,
    pub adam_step: u64,
    /// Decimal; the word position can exceed TOML's integer range.
    pub rng_word_pos: String,
    pub best_val: f64,
    pub failures: usize,
}

const ADAM_M: &str = "adam_m:";
const ADAM_V: &str = "adam_v:";
const BEST: &str = "best:";
const HISTORY: &str = "history:rows";

fn history_tensor(rows: &[HistoryRow]) -> NamedTensor {
    NamedTensor {
        name: HISTORY.into(),
        dims: vec![rows.len(), 4],
        data: rows
            .iter()
            .flat_map(|r| [r.iteration as f64, r.lr, r.train_loss, r.val_rel_l2.unwrap_or(f64::NAN)])
            .collect(),
    }
}

/// Parameters-only checkpoint (the deliverable model).
pub fn params_checkpoint(
    params: &SinoParams,
    model: &ModelConfig,
    train: &TrainConfig,
    state: &TrainState,
) -> Result<CheckpointContainer> {
    Ok(CheckpointContainer {
        echo: canonical_toml(&echo_of(model, train, state))?,
        tensors: params_to_tensors(params, ""),
    })
}

fn echo_of(model: &ModelConfig, train: &TrainConfig, state: &TrainState) -> CheckpointEcho {
    CheckpointEcho {
        model: model.clone(),
        train: train.clone(),
        state: StateEcho {
            iteration: state.iteration,
            adam_step: state.adam.step,
            rng_word_pos: state.rng_word_pos.to_string(),
            best_val: state.best_val,
            failures: state.failures,
        },
    }
}

/// Everything needed to resume: parameters, Adam moments, best parameters
/// and the history so far.
pub fn state_checkpoint(model: &ModelConfig, train: &TrainConfig, state: &TrainState) -> Result<CheckpointContainer> {
    let mut tensors = params_to_tensors(&state.params, "");
    tensors.extend(params_to_tensors(&state.adam.m, ADAM_M));
    tensors.extend(params_to_tensors(&state.adam.v, ADAM_V));
    tensors.extend(params_to_tensors(&state.best, BEST));
    tensors.push(history_tensor(&state.history));
    Ok(CheckpointContainer { echo: canonical_toml(&echo_of(model, train, state))?, tensors })
}

pub fn parse_echo(ckpt: &CheckpointContainer, path: &Path) -> Result<CheckpointEcho> {
    toml::from_str(&ckpt.echo).map_err(|e| SinoError::format(path, format!("config echo: {e}")))
}

/// Model configuration and parameters from any checkpoint.
pub fn load_model(path: &Path) -> Result<(ModelConfig, SinoParams)> {
    let ckpt = CheckpointContainer::read(path)?;
    let echo = parse_echo(&ckpt, path)?;
    let params = params_from_tensors(&echo.model, &ckpt.tensors, "")?;
    Ok((echo.model, params))
}

/// Training state from a resume checkpoint.
pub fn load_state(path: &Path) -> Result<(CheckpointEcho, TrainState)> {
    let ckpt = CheckpointContainer::read(path)?;
    let echo = parse_echo(&ckpt, path)?;
    let m = &echo.model;
    let params = params_from_tensors(m, &ckpt.tensors, "")?;
    let mut adam = AdamState::new(&params, echo.train.adam);
    adam.m = params_from_tensors(m, &ckpt.tensors, ADAM_M)?;
    adam.v = params_from_tensors(m, &ckpt.tensors, ADAM_V)?;
    adam.step = echo.state.adam_step;
    let best = params_from_tensors(m, &ckpt.tensors, BEST)?;
    let h = ckpt
        .tensor(HISTORY)
        .filter(|t| t.dims.len() == 2 && t.dims[1] == 4)
        .ok_or_else(|| SinoError::format(path, "not a resumable checkpoint (no history)"))?;
    let history = h
        .data
        .chunks_exact(4)
        .map(|r| HistoryRow {
            iteration: r[0] as usize,
            lr: r[1],
            train_loss: r[2],
            val_rel_l2: (!r[3].is_nan()).then_some(r[3]),
        })
        .collect();
    let rng_word_pos = echo.state.rng_word_pos.parse().map_err(|_| SinoError::format(path, "bad rng_word_pos"))?;
    let state = TrainState {
        params,
        adam,
        rng_word_pos,
        iteration: echo.state.iteration,
        best,
        best_val: echo.state.best_val,
        history,
        failures: echo.state.failures,
    };
    Ok((echo, state))
}

pub fn history_csv(rows: &[HistoryRow]) -> String {
    let mut out = String::from("iteration,lr,train_loss,val_rel_l2\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.iteration,
            fmt_f64(r.lr),
            fmt_f64(r.train_loss),
            r.val_rel_l2.map(fmt_f64).unwrap_or_default()
        );
    }
    out
}

/// Outputs of a training run.
#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub best: PathBuf,
    pub last: PathBuf,
    pub history: PathBuf,
    pub best_val: f64,
    pub params: SinoParams,
}

/// Trains on the generated data, writing `last.ckpt` at every validation
/// point, then `best.ckpt` and `history.csv`. With `resume`, continues from
/// `last.ckpt` when it exists.
pub fn cmd_train(cfg: &ExperimentConfig, resume: bool) -> Result<TrainSummary> {
    cfg.validate()?;
    ensure_data(cfg)?;
    let dir = data_dir(cfg);
    let train = read_split(&dir, Split::Train)?;
    let val = read_split(&dir, Split::Val)?;
    train_on(cfg, &train, &val, &train_dir(cfg), resume, None)
}

/// Core of `cmd_train`; `stop_after` interrupts the run after that many
/// iterations (for resume testing).
pub fn train_on(
    cfg: &ExperimentConfig,
    train: &TrajectoryDataset,
    val: &TrajectoryDataset,
    out: &Path,
    resume: bool,
    stop_after: Option<usize>,
) -> Result<TrainSummary> {
    let last = out.join("last.ckpt");
    let best = out.join("best.ckpt");
    let history = out.join("history.csv");
    let mut trainer = if resume && last.exists() {
        let (echo, state) = load_state(&last)?;
        if echo.model != cfg.model || echo.train != cfg.train {
            return Err(SinoError::Config(format!(
                "{} was written for a different model or training configuration",
                last.display()
            )));
        }
        log::info!("resuming at iteration {}", state.iteration);
        Trainer::resume(train, val, cfg.model.clone(), cfg.train.clone(), state)?
    } else {
        Trainer::new(train, val, cfg.model.clone(), cfg.train.clone())?
    };
    let every = cfg.train.val_every;
    let end = stop_after.unwrap_or(cfg.train.iterations).min(cfg.train.iterations);
    while trainer.state().iteration < end {
        let next = ((trainer.state().iteration / every + 1) * every).min(end);
        trainer.run_until(next)?;
        state_checkpoint(&cfg.model, &cfg.train, trainer.state())?.write(&last)?;
    }
    let state = trainer.state().clone();
    atomic_write(&history, history_csv(&state.history).as_bytes())?;
    // the best parameters so far; `last.ckpt` carries the resumable state
    params_checkpoint(&state.best, &cfg.model, &cfg.train, &state)?.write(&best)?;
    Ok(TrainSummary { best, last, history, best_val: state.best_val, params: state.best })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalSummary {
    pub config_hash: String,
    pub checkpoint: String,
    pub rel_l2: f64,
    pub failures: usize,
    pub per_trajectory: Vec<f64>,
    pub extrapolation_from: Option<usize>,
    pub superres_native: Option<f64>,
    pub superres_fine: Option<f64>,
}

/// Full-horizon test evaluation of a checkpoint: `eval/report.csv`,
/// `eval/summary.toml` and, when configured, the super-resolution pair.
pub fn cmd_evaluate(cfg: &ExperimentConfig, checkpoint: &Path) -> Result<(EvalReport, EvalSummary)> {
    cfg.validate()?;
    let (model, params) = load_model(checkpoint)?;
    ensure_data(cfg)?;
    let test = read_split(&data_dir(cfg), Split::Test)?;
    if test.grid.points() != model.grid_points.as_slice() || test.channels != model.c_in {
        return Err(SinoError::IncompatibleDomain(format!(
            "checkpoint model runs on {:?} with {} channel(s); test data is {:?} with {}",
            model.grid_points,
            model.c_in,
            test.grid.points(),
            test.channels
        )));
    }
    let mut report = evaluate_rollout(&params, &model, &test, cfg.eval.horizon)?;
    if let Some(t) = cfg.eval.train_horizon {
        report.mark_train_horizon(t);
    }
    let out = cfg.out_dir.join("eval");
    atomic_write(&out.join("report.csv"), report_csv(&report).as_bytes())?;
    let mut summary = EvalSummary {
        config_hash: cfg.hash()?,
        checkpoint: checkpoint.display().to_string(),
        rel_l2: report.rel_l2,
        failures: report.failures(),
        per_trajectory: report.trajectories.iter().map(|t| t.rel_l2).collect(),
        extrapolation_from: report.extrapolation_from,
        superres_native: None,
        superres_fine: None,
    };
    if let Some(f) = cfg.eval.superres_factor.filter(|&f| f > 1) {
        let fine = fine_test_set(cfg, f)?;
        let sr = superres_eval(&params, &model, &fine, cfg.eval.horizon)?;
        atomic_write(&out.join("superres_native.csv"), report_csv(&sr.native).as_bytes())?;
        atomic_write(&out.join("superres_fine.csv"), report_csv(&sr.fine).as_bytes())?;
        summary.superres_native = Some(sr.native.rel_l2);
        summary.superres_fine = Some(sr.fine.rel_l2);
    }
    atomic_write(&out.join("summary.toml"), canonical_toml(&summary)?.as_bytes())?;
    Ok((report, summary))
}

/// The test split stored on a grid `factor` times finer.
pub fn fine_test_set(cfg: &ExperimentConfig, factor: usize) -> Result<TrajectoryDataset> {
    let mut plan = cfg.data.plan(Split::Test);
    let points = plan.train_grid.points().iter().map(|n| n * factor).collect();
    plan.train_grid = plan.train_grid.with_points(points)?;
    generate_dataset(&plan, cfg.data.n_test, Split::Test)
}

/// One row of the ablation table.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub variant: String,
    /// Test relative ℓ2; NaN when training or rollout went non-finite.
    pub rel_l2: f64,
    pub note: String,
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("variant,rel_l2,note\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.variant, fmt_f64(r.rel_l2), r.note.replace(',', ";"));
    }
    out
}

/// Trains and tests the full model and the five single-component ablations;
/// a failing variant is recorded as NaN and does not stop the others.
pub fn cmd_ablate(cfg: &ExperimentConfig) -> Result<Vec<AblationRow>> {
    cfg.validate()?;
    ensure_data(cfg)?;
    let dir = data_dir(cfg);
    let train = read_split(&dir, Split::Train)?;
    let val = read_split(&dir, Split::Val)?;
    let test = read_split(&dir, Split::Test)?;
    let mut variants = vec![("full", Ablation::default())];
    variants.extend(Ablation::variants());
    let mut rows = Vec::new();
    for (name, flags) in variants {
        let mut c = cfg.clone();
        c.model.ablation = flags;
        log::info!("ablation variant {name}");
        let out = cfg.out_dir.join("ablate").join(name);
        let row = match train_on(&c, &train, &val, &out, false, None)
            .and_then(|t| evaluate_rollout(&t.params, &c.model, &test, cfg.eval.horizon))
        {
            Ok(r) if r.failures() > 0 => AblationRow {
                variant: name.into(),
                rel_l2: f64::NAN,
                note: format!("{} of {} test rollouts went non-finite", r.failures(), r.trajectories.len()),
            },
            Ok(r) => AblationRow { variant: name.into(), rel_l2: r.rel_l2, note: String::new() },
            Err(e @ SinoError::NonFinite { .. }) => {
                AblationRow { variant: name.into(), rel_l2: f64::NAN, note: e.to_string() }
            }
            Err(e) => return Err(e),
        };
        log::info!("{name}: {}", fmt_f64(row.rel_l2));
        rows.push(row);
    }
    atomic_write(&cfg.out_dir.join("ablate").join("table.csv"), ablation_csv(&rows).as_bytes())?;
    Ok(rows)
}

/// Rolls a trained teacher from fresh initial conditions (distillation seed
/// namespace) and writes the snapshots at `cfg.distill.cadence`.
pub fn cmd_distill_generate(cfg: &ExperimentConfig, teacher: &Path, n_traj: usize) -> Result<TrajectoryDataset> {
    cfg.validate()?;
    let (model, params) = load_model(teacher)?;
    let ds = distill_dataset(cfg, &model, &params, n_traj)?;
    let dir = cfg.out_dir.join("distill");
    let entry = write_split(&dir, &ds)?;
    Manifest { config_hash: cfg.hash()?, files: vec![entry] }.write(&dir)?;
    Ok(ds)
}

pub fn distill_dataset(
    cfg: &ExperimentConfig,
    model: &ModelConfig,
    params: &SinoParams,
    n_traj: usize,
) -> Result<TrajectoryDataset> {
    let d = &cfg.distill;
    let stride = integer_ratio(d.cadence, model.dt_model).ok_or_else(|| {
        SinoError::Config(format!(
            "synthetic cadence {} is not an integer multiple of the model step {}",
            d.cadence, model.dt_model
        ))
    })?;
    let steps = integer_ratio(d.t_end, d.cadence).ok_or_else(|| {
        SinoError::Config(format!("t_end {} is not a multiple of the cadence {}", d.t_end, d.cadence))
    })? * stride;
    let plan = cfg.data.plan(Split::Train);
    let grid = plan.train_grid.with_points(model.grid_points.clone())?;
    let op = SinoOperator::new(params, model, &grid)?;
    let split = Split::Distill;
    let mut seeds = Vec::new();
    let mut trajectories = Vec::new();
    for i in 0..n_traj as u64 {
        let seed = derive_seed(split.seed(), i);
        let ic = spectral_resample(&plan.initial_condition(seed)?, &grid)?;
        match op.rollout(&ic, steps, stride) {
            Ok(t) => {
                seeds.push(seed);
                trajectories.push(t);
            }
            Err(SinoError::NonFinite { at, .. }) => {
                log::warn!("teacher rollout {i} (seed {seed}) went non-finite at {at}; skipped");
            }
            Err(e) => return Err(e),
        }
    }
    let mut solver = cfg.data.solver;
    solver.dt = model.dt_model;
    solver.save_dt = d.cadence;
    solver.t_end = d.t_end;
    Ok(TrajectoryDataset {
        grid,
        channels: model.c_in,
        cadence: d.cadence,
        trajectories,
        meta: DatasetMeta { pde: cfg.data.pde, solver, split, seeds },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: usize,
    pub width: usize,
    pub k: usize,
    pub n_train: usize,
    pub config_hash: String,
    /// NaN when the point failed.
    pub rel_l2: f64,
    pub best_val: f64,
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("point,width,k,n_train,config_hash,rel_l2,best_val\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.point,
            r.width,
            r.k,
            r.n_train,
            r.config_hash,
            fmt_f64(r.rel_l2),
            fmt_f64(r.best_val)
        );
    }
    out
}

/// Train + evaluate per grid point, sequentially. With `sweep.n_train` set
/// the training-set size varies (the first n trajectories of one pool);
/// otherwise every width × K pair runs.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    ensure_data(cfg)?;
    let dir = data_dir(cfg);
    let val = read_split(&dir, Split::Val)?;
    let test = read_split(&dir, Split::Test)?;
    let mut points = Vec::new();
    if cfg.sweep.n_train.is_empty() {
        for &w in &cfg.sweep.widths {
            for &k in &cfg.sweep.ks {
                let mut c = cfg.clone();
                c.model.width = w;
                c.model.k = k;
                points.push(c);
            }
        }
    } else {
        for &n in &cfg.sweep.n_train {
            let mut c = cfg.clone();
            c.data.n_train = n;
            points.push(c);
        }
    }
    let pool_size = points.iter().map(|c| c.data.n_train).max().unwrap_or(0);
    let pool = if pool_size == cfg.data.n_train {
        read_split(&dir, Split::Train)?
    } else {
        generate_dataset(&cfg.data.plan(Split::Train), pool_size, Split::Train)?
    };
    let mut rows = Vec::new();
    for (i, c) in points.iter().enumerate() {
        let mut train = pool.clone();
        train.trajectories.truncate(c.data.n_train);
        train.meta.seeds.truncate(c.data.n_train);
        let out = cfg.out_dir.join("sweep").join(format!("point{i}"));
        log::info!("sweep point {i}: width {}, K {}, {} trajectories", c.model.width, c.model.k, c.data.n_train);
        let (rel_l2, best_val) = match train_on(c, &train, &val, &out, false, None)
            .and_then(|t| Ok((evaluate_rollout(&t.params, &c.model, &test, c.eval.horizon)?, t.best_val)))
        {
            Ok((r, b)) => (r.rel_l2, b),
            Err(e) => {
                log::warn!("sweep point {i} failed: {e}");
                (f64::NAN, f64::NAN)
            }
        };
        rows.push(SweepRow {
            point: i,
            width: c.model.width,
            k: c.model.k,
            n_train: c.data.n_train,
            config_hash: c.hash()?,
            rel_l2,
            best_val,
        });
    }
    atomic_write(&cfg.out_dir.join("sweep").join("summary.csv"), sweep_csv(&rows).as_bytes())?;
    Ok(rows)
}
