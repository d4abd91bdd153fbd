//! The neural operator: spectral learning block, linear and product blocks,
//! and the RK4 time stepper.

mod config;
pub mod constructed;
mod forward;
mod freq2vec;
mod params;

pub use config::{Ablation, ModelConfig, Recombine};
pub use forward::{dump_features, model_step, pi_block, rhs_eval, rollout, slb_apply, RhsTape, SinoOperator, StepTape};
pub use freq2vec::{
    freq2vec_eval, freq2vec_eval_taped, freq_inputs, mlp_backward, mlp_forward, MlpTape, MultiplierTable, SpectralTape,
};
pub use params::{count_params, Dense, Mlp, SinoParams, SpectralParams, TensorMut, TensorRef};

/// Random parameters for `cfg`, deterministic in `seed`.
pub fn init_params(cfg: &ModelConfig, seed: u64) -> crate::Result<SinoParams> {
    SinoParams::init(cfg, seed)
}
