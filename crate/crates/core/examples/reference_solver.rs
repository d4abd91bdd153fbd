//! Pseudo-spectral reference simulations: Taylor–Green decay, a 2-D Burgers
//! trajectory and a small generated dataset.

use std::f64::consts::PI;

use sino::solvers::*;
use sino::spectral::{GrfParams, GridSpec, RealField};

fn main() -> sino::Result<()> {
    let grid = GridSpec::cube(2, 64, 2.0 * PI)?;
    let nu = 0.1;
    let tg = RealField::from_fn(&grid, 1, |_, x| 2.0 * x[0].sin() * x[1].sin());
    let out = integrate(&PdeSpec::nse(nu, Forcing::None), &SolverConfig::new(1e-3, 1.0, 0.25), &tg)?;
    for (i, w) in out.iter().enumerate() {
        let t = 0.25 * i as f64;
        let mut exact = tg.clone();
        exact.scale((-2.0 * nu * t).exp());
        println!("Taylor–Green t={t:.2}  max |ω|={:.6}  error {:.1e}", w.max_abs(), w.max_abs_diff(&exact));
    }

    let plan = GenerationPlan {
        pde: PdeSpec::burgers(2, 0.01),
        solver: SolverConfig::new(1e-3, 0.5, 0.1),
        gen_grid: grid.clone(),
        train_grid: GridSpec::cube(2, 32, 2.0 * PI)?,
        grf: GrfParams::smooth_state(2),
        ic_cutoff: None,
    };
    let ds = generate_dataset(&plan, 2, Split::Train)?;
    println!(
        "Burgers dataset: {} trajectories × {} snapshots on {:?}, seeds {:?}",
        ds.len(),
        ds.snapshots(),
        ds.grid.points(),
        ds.meta.seeds
    );
    for (i, s) in ds.trajectories[0].iter().enumerate() {
        println!("  t={:.1}  rms {:.4}", 0.1 * i as f64, s.rms());
    }
    Ok(())
}
