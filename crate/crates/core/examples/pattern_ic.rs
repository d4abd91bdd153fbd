//! Out-of-distribution initial conditions from images: procedural star,
//! smiley and letter rasters, or a PGM file given on the command line.

use std::f64::consts::PI;

use sino::eval::{pattern_ic, read_pgm, PatternIC, Raster};
use sino::spectral::GridSpec;

fn main() -> sino::Result<()> {
    let grid = GridSpec::cube(2, 64, 2.0 * PI)?;
    let mut rasters =
        vec![("star", Raster::star(256)), ("smiley", Raster::smiley(256)), ("letters", Raster::letters_ai(256))];
    if let Some(path) = std::env::args().nth(1) {
        rasters.push(("file", read_pgm(path.as_ref())?));
    }
    for (name, raster) in rasters {
        let ic = pattern_ic(&PatternIC { raster, grid: grid.clone(), amplitude: 0.5, cutoff: 8 })?;
        println!("{name:>8}: mean {:+.1e}, rms {:.3}, max {:.3}", ic.channel_mean(0), ic.rms(), ic.max_abs());
        // coarse ASCII preview
        let n = 64;
        for i in (0..n).step_by(8) {
            let row: String = (0..n)
                .step_by(4)
                .map(|j| {
                    let v = ic.data()[i * n + j];
                    if v > 0.4 {
                        '#'
                    } else if v > 0.0 {
                        '+'
                    } else {
                        '.'
                    }
                })
                .collect();
            println!("          {row}");
        }
    }
    Ok(())
}
