//! The command pipeline on a tiny custom experiment: generate, train,
//! evaluate, ablate, sweep and distillation data. Run with `RUST_LOG=info`
//! for progress.

use std::f64::consts::PI;

use sino::app::{self, ExperimentConfig};
use sino::model::ModelConfig;
use sino::solvers::SolverConfig;
use sino::spectral::GridSpec;

fn main() -> sino::Result<()> {
    env_logger::init();
    let mut cfg = ExperimentConfig::preset("E6-desk")?;
    cfg.case = "custom".into();
    cfg.out_dir = std::env::temp_dir().join("sino-examples").join("pipeline");
    cfg.data.solver = SolverConfig::new(1e-3, 0.2, 1e-2);
    cfg.data.gen_grid = GridSpec::cube(2, 32, 2.0 * PI)?;
    cfg.data.train_grid = GridSpec::cube(2, 16, 2.0 * PI)?;
    cfg.data.n_test = 2;
    cfg.eval.superres_factor = Some(2);
    cfg.model = ModelConfig::new(2, &cfg.data.train_grid, 1e-2);
    cfg.model.k = 4;
    cfg.model.width = 8;
    cfg.model.mlp_hidden = vec![16];
    cfg.train.iterations = 60;
    cfg.train.val_every = 20;
    cfg.sweep.widths = vec![4, 8];
    cfg.sweep.ks = vec![2, 4];
    cfg.distill.cadence = 2e-2;
    cfg.distill.t_end = 0.2;
    cfg.validate()?;
    println!("config hash {}", cfg.hash()?);

    for f in app::cmd_generate(&cfg)?.files {
        println!("{:<11} {} trajectories, crc {}", f.file, f.trajectories, f.crc32);
    }
    let t = app::cmd_train(&cfg, false)?;
    println!("trained: best val {:.3e} -> {}", t.best_val, t.best.display());
    let (_, s) = app::cmd_evaluate(&cfg, &t.best)?;
    println!("test rel l2 {:.3e}, super-resolution {:?} / {:?}", s.rel_l2, s.superres_native, s.superres_fine);

    print!("{}", app::ablation_csv(&app::cmd_ablate(&cfg)?));
    print!("{}", app::sweep_csv(&app::cmd_sweep(&cfg)?));
    let ds = app::cmd_distill_generate(&cfg, &t.best, 3)?;
    println!("distilled {} trajectories × {} snapshots", ds.len(), ds.snapshots());
    Ok(())
}
