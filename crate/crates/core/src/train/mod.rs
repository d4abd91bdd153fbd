//! Reverse-mode gradients through model rollouts, Adam, the one-cycle
//! schedule and the warm-up curriculum trainer.

mod curriculum;
mod fit;
mod grad;
mod optim;
mod trainer;

pub use curriculum::{sample_curriculum, CurriculumSample};
pub use fit::{fit_multipliers, FitConfig, FitReport};
pub use grad::{backward, backward_from, loss_from, loss_rollout, LossKind};
pub use optim::{adam_step, adam_update, clip_grad_norm, onecycle_lr, AdamConfig, AdamState, OneCycle};
pub use trainer::{train, validation_error, HistoryRow, TrainConfig, TrainOutcome, TrainState, Trainer};
