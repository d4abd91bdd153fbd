//! Pseudo-spectral reference solvers (KSE, vorticity NSE, Burgers) and
//! trajectory dataset generation.

mod dataset;
mod integrate;
mod pde;
mod rhs;

pub use dataset::{
    derive_seed, generate_dataset, generate_dataset_with_seed, DatasetMeta, GenerationPlan, Split, TrajectoryDataset,
};
pub use integrate::{if_rk4_step, integrate, integrate_with, rk4_step, OdeState};
pub use pde::{integer_ratio, Forcing, Integrator, PdeKind, PdeSpec, SolverConfig};
pub use rhs::{biot_savart, burgers_rhs, kse_rhs, nse_rhs, ReferenceRhs};
