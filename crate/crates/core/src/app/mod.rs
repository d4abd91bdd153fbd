//! Experiment configuration, presets and the command implementations behind
//! the `sino` binary.

mod commands;
mod config;
mod data;

pub use commands::{
    ablation_csv, cmd_ablate, cmd_distill_generate, cmd_evaluate, cmd_generate, cmd_sweep, cmd_train, data_dir,
    distill_dataset, ensure_data, fine_test_set, history_csv, load_model, load_state, params_checkpoint, parse_echo,
    state_checkpoint, sweep_csv, train_dir, train_on, AblationRow, CheckpointEcho, EvalSummary, StateEcho, SweepRow,
    TrainSummary,
};
pub use config::{DataConfig, DistillConfig, EvalConfig, ExperimentConfig, SweepConfig};
pub use data::{read_entry, read_split, write_split, Manifest, ManifestEntry, MANIFEST};
