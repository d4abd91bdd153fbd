//! Fits the Freq2Vec MLP to the Laplacian multiplier −‖ξ‖² (ξ = k/(N/2))
//! over the retained modes of a 64² grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use sino::model::{init_params, ModelConfig, SpectralParams};
use sino::spectral::{FreqGrid, GridSpec};
use sino::train::{fit_multipliers, FitConfig};

fn main() -> sino::Result<()> {
    let grid = GridSpec::cube(2, 64, 2.0 * PI)?;
    let freq = FreqGrid::new(&grid);
    let mut cfg = ModelConfig::new(1, &grid, 0.01);
    cfg.k = 1;
    cfg.mlp_hidden = vec![64];
    let cutoff = grid.dealias_cutoff();
    let modes: Vec<usize> =
        (0..freq.len()).filter(|&m| freq.index_inf_norm(m) <= cutoff && m <= freq.mirror(m)).collect();
    let target: Vec<Vec<Complex64>> = modes
        .iter()
        .map(|&m| {
            let xi2: f64 = freq.index(m).iter().map(|&k| (k as f64 / 32.0).powi(2)).sum();
            vec![Complex64::new(-xi2, 0.0)]
        })
        .collect();
    let SpectralParams::Freq2Vec(mut mlp) = init_params(&cfg, 0)?.spectral else {
        unreachable!("default configuration uses Freq2Vec")
    };
    for steps in [500, 5000] {
        let mut m = mlp.clone();
        let fit = FitConfig { steps, ..FitConfig::default() };
        let r = fit_multipliers(&mut m, &cfg, &freq, &modes, &target, &fit)?;
        println!("{steps:>5} steps: max abs error {:.2e}, mse {:.2e}", r.max_abs_error, r.final_mse);
        if steps == 5000 {
            mlp = m;
        }
    }
    println!("{} modes fitted, {} MLP layers", modes.len(), mlp.layers.len());
    Ok(())
}
