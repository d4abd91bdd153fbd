use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, SinoError};
use crate::solvers::derive_seed;
use crate::spectral::{GridSpec, RealField};

/// Grayscale image, row-major from the top row, intensities in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Raster {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(SinoError::ShapeMismatch(format!("{} intensities for a {width}x{height} raster", data.len())));
        }
        Ok(Raster { width, height, data })
    }

    /// Renders `inside(x, y)` over the unit square (y downwards) with
    /// `ss × ss` stratified supersampling per pixel. The samples are jittered
    /// within their strata (deterministically): a fixed lattice would round
    /// every axis-aligned edge the same way and bias stroke widths.
    pub fn render(size: usize, ss: usize, inside: impl Fn(f64, f64) -> bool) -> Self {
        let ss = ss.max(1);
        let jitter = |r: usize, c: usize, i: usize, j: usize, axis: u64| {
            let key = ((((r * size + c) * ss + i) * ss + j) as u64) << 1 | axis;
            (derive_seed(0x5A3D, key) >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut data = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                let mut hit = 0;
                for i in 0..ss {
                    for j in 0..ss {
                        let y = (r as f64 + (i as f64 + jitter(r, c, i, j, 0)) / ss as f64) / size as f64;
                        let x = (c as f64 + (j as f64 + jitter(r, c, i, j, 1)) / ss as f64) / size as f64;
                        hit += inside(x, y) as usize;
                    }
                }
                data.push(hit as f64 / (ss * ss) as f64);
            }
        }
        Raster { width: size, height: size, data }
    }

    /// Five-pointed star.
    pub fn star(size: usize) -> Self {
        let vertices: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let r = if i % 2 == 0 { 0.4 } else { 0.16 };
                let a = std::f64::consts::PI * i as f64 / 5.0;
                (0.5 + r * a.sin(), 0.52 - r * a.cos())
            })
            .collect();
        Self::render(size, 8, |x, y| {
            // even-odd rule
            let mut inside = false;
            for i in 0..vertices.len() {
                let (xa, ya) = vertices[i];
                let (xb, yb) = vertices[(i + 1) % vertices.len()];
                if (ya > y) != (yb > y) && x < xa + (y - ya) / (yb - ya) * (xb - xa) {
                    inside = !inside;
                }
            }
            inside
        })
    }

    /// Face outline with eyes and a smile.
    pub fn smiley(size: usize) -> Self {
        Self::render(size, 8, |x, y| {
            let d = |cx: f64, cy: f64| (x - cx).hypot(y - cy);
            let ring = (0.34..=0.40).contains(&d(0.5, 0.5));
            let eyes = d(0.38, 0.4) < 0.05 || d(0.62, 0.4) < 0.05;
            let m = d(0.5, 0.5);
            let smile = (0.19..=0.24).contains(&m) && y > 0.55;
            ring || eyes || smile
        })
    }

    /// The letters "AI".
    pub fn letters_ai(size: usize) -> Self {
        Self::render(size, 8, |x, y| {
            let w = 0.05;
            let (top, bottom) = (0.25, 0.75);
            if !(top..=bottom).contains(&y) {
                return false;
            }
            let h = (y - top) / (bottom - top);
            // "A": two slanted strokes meeting at the apex, plus a bar
            let (apex, half) = (0.36, 0.17);
            let left = apex - half * h;
            let right = apex + half * h;
            let strokes = (x - left).abs() < w / 2.0 + 0.01 || (x - right).abs() < w / 2.0 + 0.01;
            let bar = (0.58..=0.66).contains(&h) && x > left && x < right;
            // "I": a vertical stroke with serifs
            let stem = (x - 0.72).abs() < w / 2.0 + 0.005;
            let serif = (x - 0.72).abs() < 0.07 && !(0.1..=0.9).contains(&h);
            strokes || bar || stem || serif
        })
    }
}

/// Parses a plain (P2) or binary (P5) portable graymap.
pub fn parse_pgm(bytes: &[u8]) -> std::result::Result<Raster, String> {
    let mut pos = 0;
    let token = |pos: &mut usize| -> std::result::Result<String, String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
            *pos += 1;
        }
        if start == *pos {
            return Err("unexpected end of header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos)?;
    let number = |pos: &mut usize, what: &str| -> std::result::Result<usize, String> {
        token(pos)?.parse::<usize>().map_err(|_| format!("bad {what}"))
    };
    let width = number(&mut pos, "width")?;
    let height = number(&mut pos, "height")?;
    let maxval = number(&mut pos, "maximum value")?;
    if width == 0 || height == 0 {
        return Err("empty raster".into());
    }
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maximum value {maxval} out of range"));
    }
    let n = width * height;
    let scale = maxval as f64;
    let data = match magic.as_str() {
        "P2" => (0..n)
            .map(|_| number(&mut pos, "pixel").map(|v| v.min(maxval) as f64 / scale))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        "P5" => {
            // exactly one whitespace byte separates the header from the pixels
            pos += 1;
            let wide = maxval > 255;
            let need = n * if wide { 2 } else { 1 };
            let px = bytes.get(pos..pos + need).ok_or("truncated pixel data")?;
            if wide {
                px.chunks_exact(2)
                    .map(|b| (u16::from_be_bytes([b[0], b[1]]) as usize).min(maxval) as f64 / scale)
                    .collect()
            } else {
                px.iter().map(|&b| (b as usize).min(maxval) as f64 / scale).collect()
            }
        }
        other => return Err(format!("unsupported magic {other:?}")),
    };
    Ok(Raster { width, height, data })
}

pub fn read_pgm(path: &Path) -> Result<Raster> {
    let bytes = std::fs::read(path).map_err(|e| SinoError::io(path, e))?;
    parse_pgm(&bytes).map_err(|reason| SinoError::format(path, reason))
}

/// Out-of-distribution initial condition built from an image.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternIC {
    pub raster: Raster,
    pub grid: GridSpec,
    /// Target RMS of the output.
    pub amplitude: f64,
    /// Largest retained max-norm mode index.
    pub cutoff: i64,
}

/// Projects the raster onto the grid's Fourier modes with `‖k‖∞ ≤ cutoff`
/// (axis 0 down the rows, axis 1 along the columns), removes the mean and
/// scales to the requested RMS. A uniform raster gives the zero field.
///
/// Pixels are read as cell averages of the underlying image, so the kept
/// coefficients are those of the image itself, not of some interpolant of
/// the pixels. Point sampling at the grid nodes would alias sharp edges into
/// the kept modes, and a bilinear kernel would damp mode k by about
/// sinc³(πk/size); either way the result would depend on the raster
/// resolution.
pub fn pattern_ic(p: &PatternIC) -> Result<RealField> {
    if p.grid.dim() != 2 {
        return Err(SinoError::InvalidGrid("pattern initial conditions are 2-D".into()));
    }
    let r = &p.raster;
    let (n0, n1) = (p.grid.points()[0], p.grid.points()[1]);
    // Nyquist indices (of the grid or the raster) have no conjugate partner
    let k0max = p.cutoff.min(n0 as i64 / 2 - 1).min((r.height as i64 - 1) / 2).max(0);
    let k1max = p.cutoff.min(n1 as i64 / 2 - 1).min((r.width as i64 - 1) / 2).max(0);
    let modes = |m: i64| (-m..=m).collect::<Vec<i64>>();
    let (ks0, ks1) = (modes(k0max), modes(k1max));
    let phase = |k: i64, x: f64| Complex64::from_polar(1.0, -2.0 * PI * k as f64 * x);

    // analysis, one axis at a time
    let mut a = vec![Complex64::new(0.0, 0.0); ks0.len() * r.width];
    for (ki, &k) in ks0.iter().enumerate() {
        for row in 0..r.height {
            let w = phase(k, (row as f64 + 0.5) / r.height as f64);
            let pixels = &r.data[row * r.width..(row + 1) * r.width];
            for (acc, &v) in a[ki * r.width..(ki + 1) * r.width].iter_mut().zip(pixels) {
                *acc += w * v;
            }
        }
    }
    // pixels are cell averages: undo the box filter they imply
    let sinc = |k: i64, size: usize| {
        let x = PI * k as f64 / size as f64;
        if k == 0 {
            1.0
        } else {
            x.sin() / x
        }
    };
    let norm = 1.0 / (r.width * r.height) as f64;
    let mut b = vec![Complex64::new(0.0, 0.0); ks0.len() * ks1.len()];
    for (ki, &k0) in ks0.iter().enumerate() {
        for (kj, &k1) in ks1.iter().enumerate() {
            b[ki * ks1.len() + kj] = (0..r.width)
                .map(|col| a[ki * r.width + col] * phase(k1, (col as f64 + 0.5) / r.width as f64))
                .sum::<Complex64>()
                * norm
                / (sinc(k0, r.height) * sinc(k1, r.width));
        }
    }
    // synthesis on the grid
    let mut data = vec![0.0; n0 * n1];
    for i in 0..n0 {
        let c: Vec<Complex64> = (0..ks1.len())
            .map(|kj| {
                ks0.iter().enumerate().map(|(ki, &k)| b[ki * ks1.len() + kj] * phase(-k, i as f64 / n0 as f64)).sum()
            })
            .collect();
        for j in 0..n1 {
            data[i * n1 + j] = ks1.iter().zip(&c).map(|(&k, ck)| (ck * phase(-k, j as f64 / n1 as f64)).re).sum();
        }
    }
    let mean = data.iter().sum::<f64>() / data.len() as f64;
    data.iter_mut().for_each(|v| *v -= mean);
    let rms = (data.iter().map(|v| v * v).sum::<f64>() / data.len() as f64).sqrt();
    // a flat image leaves only roundoff after the mean is removed
    let scale = if rms > 1e-12 { p.amplitude / rms } else { 0.0 };
    data.iter_mut().for_each(|v| *v *= scale);
    RealField::new(p.grid.clone(), 1, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_binary_graymaps_agree() {
        let plain = b"P2\n# comment\n3 2\n255\n0 128 255\n255 0 64\n";
        let mut binary = b"P5 3 2 255\n".to_vec();
        binary.extend_from_slice(&[0, 128, 255, 255, 0, 64]);
        let a = parse_pgm(plain).unwrap();
        let b = parse_pgm(&binary).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.width, a.height), (3, 2));
        assert_eq!(a.data[2], 1.0);
        let mut wide = b"P5 1 1 1000\n".to_vec();
        wide.extend_from_slice(&500u16.to_be_bytes());
        assert_eq!(parse_pgm(&wide).unwrap().data, vec![0.5]);
        assert!(parse_pgm(b"P5 2 2 255\n\x00").is_err());
        assert!(parse_pgm(b"P6 1 1 255\n\x00\x00\x00").is_err());
    }

    #[test]
    fn procedural_rasters_are_nontrivial() {
        for r in [Raster::star(64), Raster::smiley(64), Raster::letters_ai(64)] {
            let mean = r.data.iter().sum::<f64>() / r.data.len() as f64;
            assert!(mean > 0.02 && mean < 0.6, "coverage {mean}");
            assert!(r.data.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}
