//! Hand-set parameters that make the operator compute the 2-D Burgers
//! right-hand side exactly, compared against the reference solver.

use std::f64::consts::PI;

use sino::model::constructed::burgers_params;
use sino::model::{rhs_eval, rollout, ModelConfig};
use sino::solvers::{burgers_rhs, integrate, PdeSpec, SolverConfig};
use sino::spectral::{filter_real, grf_vector, lowpass_mask, FreqGrid, GrfParams, GridSpec};

fn main() -> sino::Result<()> {
    let grid = GridSpec::cube(2, 32, 2.0 * PI)?;
    let mut cfg = ModelConfig::new(2, &grid, 1e-3);
    cfg.k = 4;
    cfg.width = 8;
    cfg.mlp_hidden = vec![8];
    let params = burgers_params(&cfg, &grid, 0.01)?;

    let mut u0 = grf_vector(&grid, 3, &GrfParams::smooth_state(2), 2)?;
    let freq = FreqGrid::new(&grid);
    filter_real(&freq, u0.data_mut(), 2, &lowpass_mask(&freq, 8));

    let spec = PdeSpec::burgers(2, 0.01);
    let truth = burgers_rhs(&u0, &spec)?;
    println!("RHS max error        {:.2e}", rhs_eval(&u0, &params, &cfg)?.max_abs_diff(&truth));

    let reference = integrate(&spec, &SolverConfig::new(1e-3, 0.1, 0.02), &u0)?;
    let model = rollout(&u0, &params, &cfg, 100, 20)?;
    for (i, (m, r)) in model.iter().zip(&reference).enumerate() {
        println!("t={:.2}  relative max error {:.2e}", 0.02 * i as f64, m.max_abs_diff(r) / r.max_abs());
    }
    Ok(())
}
