//! N-dimensional complex FFTs over flat C-order buffers.
//!
//! Forward transforms are unnormalized; [`inverse_inplace`] divides by the
//! total point count. Real fields are pushed through the complex transform
//! two at a time (one in the real part, one in the imaginary part).

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::FreqGrid;

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

struct NdPlan {
    points: Vec<usize>,
    axes: Vec<AxisPlan>,
    scratch: RefCell<Vec<Complex64>>,
    lines: RefCell<Vec<Complex64>>,
}

thread_local! {
    static PLANS: RefCell<HashMap<Vec<usize>, Rc<NdPlan>>> = RefCell::new(HashMap::new());
}

fn plan_for(points: &[usize]) -> Rc<NdPlan> {
    PLANS.with(|plans| {
        let mut plans = plans.borrow_mut();
        if let Some(p) = plans.get(points) {
            return p.clone();
        }
        let mut planner = FftPlanner::<f64>::new();
        let axes = points
            .iter()
            .map(|&n| AxisPlan { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
            .collect();
        let plan = Rc::new(NdPlan {
            points: points.to_vec(),
            axes,
            scratch: RefCell::new(Vec::new()),
            lines: RefCell::new(Vec::new()),
        });
        plans.insert(points.to_vec(), plan.clone());
        plan
    })
}

impl NdPlan {
    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let size: usize = self.points.iter().product();
        debug_assert_eq!(data.len() % size, 0);
        for block in data.chunks_exact_mut(size) {
            for axis in (0..self.points.len()).rev() {
                self.run_axis(block, axis, inverse);
            }
        }
    }

    fn run_axis(&self, block: &mut [Complex64], axis: usize, inverse: bool) {
        let plan = &self.axes[axis];
        let fft = if inverse { &plan.inverse } else { &plan.forward };
        let n = self.points[axis];
        let inner: usize = self.points[axis + 1..].iter().product();
        let mut scratch = self.scratch.borrow_mut();
        let need = fft.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::default());
        }
        if inner == 1 {
            fft.process_with_scratch(block, &mut scratch[..need]);
            return;
        }
        // Each outer slab is an n x inner matrix; transform its columns.
        let mut lines = self.lines.borrow_mut();
        if lines.len() < n * inner {
            lines.resize(n * inner, Complex64::default());
        }
        let lines = &mut lines[..n * inner];
        for slab in block.chunks_exact_mut(n * inner) {
            for i in 0..n {
                let row = &slab[i * inner..(i + 1) * inner];
                for (j, v) in row.iter().enumerate() {
                    lines[j * n + i] = *v;
                }
            }
            fft.process_with_scratch(lines, &mut scratch[..need]);
            for i in 0..n {
                let row = &mut slab[i * inner..(i + 1) * inner];
                for (j, v) in row.iter_mut().enumerate() {
                    *v = lines[j * n + i];
                }
            }
        }
    }
}

/// Unnormalized forward transform of every `∏N`-sized block of `data`.
pub fn forward_inplace(points: &[usize], data: &mut [Complex64]) {
    plan_for(points).run(data, false);
}

/// Inverse transform of every block of `data`, divided by `∏N`.
pub fn inverse_inplace(points: &[usize], data: &mut [Complex64]) {
    plan_for(points).run(data, true);
    let scale = 1.0 / points.iter().product::<usize>() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Forward transform of `channels` real fields stored back to back in `real`.
///
/// Returns the full complex spectrum of each channel, in the same layout.
pub fn forward_real(freq: &FreqGrid, real: &[f64], channels: usize) -> Vec<Complex64> {
    let n = freq.len();
    debug_assert_eq!(real.len(), n * channels);
    let points = freq.grid().points();
    let mut out = vec![Complex64::default(); n * channels];
    let mut packed = vec![Complex64::default(); n];
    let mut c = 0;
    while c < channels {
        let a = &real[c * n..(c + 1) * n];
        if c + 1 < channels {
            let b = &real[(c + 1) * n..(c + 2) * n];
            for ((p, &x), &y) in packed.iter_mut().zip(a).zip(b) {
                *p = Complex64::new(x, y);
            }
            forward_inplace(points, &mut packed);
            let (lo, hi) = out[c * n..(c + 2) * n].split_at_mut(n);
            for m in 0..n {
                let z = packed[m];
                let zc = packed[freq.mirror(m)].conj();
                lo[m] = (z + zc) * 0.5;
                // (z - zc) / 2i
                let d = z - zc;
                hi[m] = Complex64::new(d.im * 0.5, -d.re * 0.5);
            }
            c += 2;
        } else {
            for (p, &x) in packed.iter_mut().zip(a) {
                *p = Complex64::new(x, 0.0);
            }
            forward_inplace(points, &mut packed);
            out[c * n..(c + 1) * n].copy_from_slice(&packed);
            c += 1;
        }
    }
    out
}

/// Inverse transform of `channels` Hermitian spectra into real fields.
///
/// The imaginary residue is not checked; callers that cannot guarantee
/// Hermitian input use [`super::inverse_transform`].
pub fn inverse_real(freq: &FreqGrid, spec: &[Complex64], channels: usize) -> Vec<f64> {
    let n = freq.len();
    debug_assert_eq!(spec.len(), n * channels);
    let points = freq.grid().points();
    let mut out = vec![0.0; n * channels];
    let mut packed = vec![Complex64::default(); n];
    let mut c = 0;
    while c < channels {
        let a = &spec[c * n..(c + 1) * n];
        if c + 1 < channels {
            let b = &spec[(c + 1) * n..(c + 2) * n];
            for ((p, &x), &y) in packed.iter_mut().zip(a).zip(b) {
                // x + i y
                *p = Complex64::new(x.re - y.im, x.im + y.re);
            }
            inverse_inplace(points, &mut packed);
            let (lo, hi) = out[c * n..(c + 2) * n].split_at_mut(n);
            for m in 0..n {
                lo[m] = packed[m].re;
                hi[m] = packed[m].im;
            }
            c += 2;
        } else {
            packed.copy_from_slice(a);
            inverse_inplace(points, &mut packed);
            for (o, p) in out[c * n..(c + 1) * n].iter_mut().zip(&packed) {
                *o = p.re;
            }
            c += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn naive_dft(points: &[usize], data: &[Complex64]) -> Vec<Complex64> {
        let grid = GridSpec::new(points.to_vec(), vec![1.0; points.len()]).unwrap();
        let freq = FreqGrid::new(&grid);
        let n = grid.size();
        let mut x = vec![0.0; points.len()];
        (0..n)
            .map(|m| {
                let k = freq.index(m);
                let mut acc = Complex64::default();
                for (p, v) in data.iter().enumerate() {
                    grid.coords(p, &mut x);
                    let phase: f64 =
                        k.iter().zip(&x).map(|(&ki, &xi)| -2.0 * std::f64::consts::PI * ki as f64 * xi).sum();
                    acc += v * Complex64::from_polar(1.0, phase);
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft_in_2d_and_3d() {
        for points in [vec![4usize, 6], vec![4, 4, 6]] {
            let n: usize = points.iter().product();
            let data: Vec<Complex64> =
                (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
            let mut fast = data.clone();
            forward_inplace(&points, &mut fast);
            let slow = naive_dft(&points, &data);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-10, "{a} vs {b}");
            }
            inverse_inplace(&points, &mut fast);
            for (a, b) in fast.iter().zip(&data) {
                assert!((a - b).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn paired_real_transforms_match_single() {
        let grid = GridSpec::cube(2, 8, 1.0).unwrap();
        let freq = FreqGrid::new(&grid);
        let n = grid.size();
        let real: Vec<f64> = (0..3 * n).map(|i| ((i * 7919) % 101) as f64 / 50.0 - 1.0).collect();
        let spec = forward_real(&freq, &real, 3);
        for c in 0..3 {
            let mut single: Vec<Complex64> = real[c * n..(c + 1) * n].iter().map(|&x| Complex64::new(x, 0.0)).collect();
            forward_inplace(grid.points(), &mut single);
            for (a, b) in single.iter().zip(&spec[c * n..(c + 1) * n]) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        let back = inverse_real(&freq, &spec, 3);
        for (a, b) in back.iter().zip(&real) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
