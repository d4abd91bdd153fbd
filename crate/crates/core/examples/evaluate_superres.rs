//! Full-horizon evaluation with per-step metrics, CSV export and a
//! zero-shot 2× super-resolution pass, using the constructed Burgers model.

use std::f64::consts::PI;

use sino::eval::{evaluate_rollout, export_csv, superres_eval};
use sino::model::constructed::burgers_params;
use sino::model::ModelConfig;
use sino::solvers::{generate_dataset, GenerationPlan, PdeSpec, SolverConfig, Split};
use sino::spectral::{GrfParams, GridSpec};

fn main() -> sino::Result<()> {
    let coarse = GridSpec::cube(2, 32, 2.0 * PI)?;
    let mut plan = GenerationPlan {
        pde: PdeSpec::burgers(2, 0.01),
        solver: SolverConfig::new(1e-3, 0.2, 1e-2),
        gen_grid: GridSpec::cube(2, 64, 2.0 * PI)?,
        train_grid: coarse.clone(),
        grf: GrfParams::smooth_state(2),
        ic_cutoff: Some(8),
    };
    let test = generate_dataset(&plan, 2, Split::Test)?;
    plan.train_grid = coarse.with_points(vec![64, 64])?;
    let fine = generate_dataset(&plan, 2, Split::Test)?;

    // one model step per stored snapshot
    let mut cfg = ModelConfig::new(2, &coarse, 1e-2);
    cfg.k = 4;
    cfg.width = 8;
    cfg.mlp_hidden = vec![8];
    let params = burgers_params(&cfg, &coarse, 0.01)?;

    let mut report = evaluate_rollout(&params, &cfg, &test, None)?;
    report.mark_train_horizon(0.1);
    println!("test rel l2 {:.3e} over {} snapshots", report.rel_l2, report.horizon);
    for (t, c) in report.times().iter().zip(report.mean_pcc()).step_by(5) {
        println!("  t={t:.2}  mean PCC {c:.6}");
    }
    let path = std::env::temp_dir().join("sino-examples").join("report.csv");
    export_csv(&report, &path)?;
    println!("wrote {}", path.display());

    let sr = superres_eval(&params, &cfg, &fine, None)?;
    println!(
        "super-resolution: native {:.3e}, 2x grid {:.3e} (ratio {:.2})",
        sr.native.rel_l2,
        sr.fine.rel_l2,
        sr.ratio()
    );
    Ok(())
}
