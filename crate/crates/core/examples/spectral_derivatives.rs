//! Exact spectral derivatives, the 2/3 de-aliasing mask and spectral
//! resampling on a periodic grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use sino::spectral::*;

fn main() -> sino::Result<()> {
    let grid = GridSpec::cube(2, 32, 2.0 * PI)?;
    let u = RealField::from_fn(&grid, 1, |_, x| (3.0 * x[0]).sin() * (2.0 * x[1]).cos());
    let uh = forward_transform(&u);

    let ux = inverse_transform(&spectral_derivative(&uh, &[1, 0])?)?;
    let exact = RealField::from_fn(&grid, 1, |_, x| 3.0 * (3.0 * x[0]).cos() * (2.0 * x[1]).cos());
    println!("d/dx error            {:.2e}", ux.max_abs_diff(&exact));

    let freq = FreqGrid::new(&grid);
    let lap: Vec<Complex64> = laplacian_multiplier(&freq).into_iter().map(Complex64::from).collect();
    let lu = inverse_transform(&apply_spectral_multiplier(&uh, &lap)?)?;
    let mut expect = u.clone();
    expect.scale(-13.0);
    println!("laplacian error       {:.2e}", lu.max_abs_diff(&expect));

    // u² has modes up to 6 and 4; the mask keeps |k|∞ ≤ floor(2·16/3)
    let sq: Vec<f64> = u.data().iter().map(|v| v * v).collect();
    let mut spec = fft::forward_real(&freq, &sq, 1);
    apply_mask(&mut spec, &two_thirds_mask(&freq));
    let kept = spec.iter().filter(|z| z.norm() > 1e-12).count();
    println!("dealias cutoff        {} ({kept} nonzero modes after masking)", grid.dealias_cutoff());

    let fine = grid.with_points(vec![64, 64])?;
    let up = spectral_resample(&u, &fine)?;
    let back = spectral_resample(&up, &grid)?;
    println!("32² → 64² → 32²       {:.2e}", back.max_abs_diff(&u));

    let g = grf_sample(&grid, 7, &GrfParams::smooth_state(2))?;
    println!("GRF sample            mean {:.1e}, rms {:.3}", g.channel_mean(0), g.rms());
    Ok(())
}
