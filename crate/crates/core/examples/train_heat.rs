//! Trains a small operator on heat-equation data and prints the validation
//! history.

use std::f64::consts::PI;

use sino::model::ModelConfig;
use sino::solvers::{generate_dataset, GenerationPlan, PdeSpec, SolverConfig, Split};
use sino::spectral::{GrfParams, GridSpec};
use sino::train::{train, TrainConfig};

fn main() -> sino::Result<()> {
    let plan = GenerationPlan {
        pde: PdeSpec::heat(2, 0.05),
        solver: SolverConfig::new(1e-3, 1.0, 1e-2),
        gen_grid: GridSpec::cube(2, 32, 2.0 * PI)?,
        train_grid: GridSpec::cube(2, 16, 2.0 * PI)?,
        grf: GrfParams::smooth_state(2),
        ic_cutoff: None,
    };
    let tr = generate_dataset(&plan, 2, Split::Train)?;
    let va = generate_dataset(&plan, 2, Split::Val)?;
    let model = ModelConfig::new(1, &tr.grid, tr.cadence);
    let cfg = TrainConfig { iterations: 500, max_lr: 1e-2, val_every: 50, ..TrainConfig::default() };
    let out = train(&tr, &va, &model, &cfg)?;
    println!("iteration        lr   train loss   val rel l2");
    for r in out.history.iter().filter(|r| r.val_rel_l2.is_some()) {
        println!("{:>9} {:>9.2e} {:>12.3e} {:>12.3e}", r.iteration, r.lr, r.train_loss, r.val_rel_l2.unwrap());
    }
    println!("best validation rel l2 {:.3e}", out.best_val);
    Ok(())
}
