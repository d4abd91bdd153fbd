use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SinoError};

/// Periodic Cartesian grid: per-axis point counts and domain lengths.
///
/// Axis 0 is the slowest-varying index in every flat buffer (C order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    points: Vec<usize>,
    length: Vec<f64>,
}

impl GridSpec {
    pub fn new(points: Vec<usize>, length: Vec<f64>) -> Result<Self> {
        let grid = GridSpec { points, length };
        grid.validate()?;
        Ok(grid)
    }

    /// Square (or cubic) grid with `n` points and length `l` along every axis.
    pub fn cube(dim: usize, n: usize, l: f64) -> Result<Self> {
        GridSpec::new(vec![n; dim], vec![l; dim])
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.points.len();
        if !(2..=3).contains(&dim) {
            return Err(SinoError::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if self.length.len() != dim {
            return Err(SinoError::InvalidGrid(format!("{} lengths for {dim} axes", self.length.len())));
        }
        if let Some(n) = self.points.iter().find(|&&n| n < 4 || n % 2 != 0) {
            return Err(SinoError::InvalidGrid(format!("axis size {n} must be even and at least 4")));
        }
        if let Some(l) = self.length.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(SinoError::InvalidGrid(format!("domain length {l} must be positive")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn length(&self) -> &[f64] {
        &self.length
    }

    /// Total number of grid points.
    pub fn size(&self) -> usize {
        self.points.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.length[axis] / self.points[axis] as f64
    }

    /// Physical coordinates of the point with flat index `flat`.
    pub fn coords(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for axis in (0..self.dim()).rev() {
            let n = self.points[axis];
            out[axis] = (rem % n) as f64 * self.spacing(axis);
            rem /= n;
        }
    }

    /// Same domain, different resolution.
    pub fn with_points(&self, points: Vec<usize>) -> Result<Self> {
        GridSpec::new(points, self.length.clone())
    }

    /// True when `other` covers the same physical domain (resolution may differ).
    pub fn same_domain(&self, other: &GridSpec) -> bool {
        self.dim() == other.dim()
            && self.length.iter().zip(&other.length).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()))
    }

    /// Largest retained index of the 2/3 rule: `floor(2 * k_max / 3)` with
    /// `k_max = min_i N_i / 2`.
    pub fn dealias_cutoff(&self) -> i64 {
        let k_max = self.points.iter().min().copied().unwrap_or(0) / 2;
        (2 * k_max / 3) as i64
    }
}

/// Signed FFT index of position `i` on an axis with `n` points:
/// `[0, 1, .., n/2 - 1, -n/2, .., -1]`.
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Position of signed index `k` on an axis with `n` points, if representable.
pub fn position_of(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k >= -half && k < half {
        Some(if k >= 0 { k as usize } else { (k + n as i64) as usize })
    } else {
        None
    }
}

/// Frequency bookkeeping for a grid: integer indices, angular wavenumbers and
/// the flat position of the mirrored mode `-k`.
#[derive(Debug, Clone)]
pub struct FreqGrid {
    grid: GridSpec,
    index: Vec<i64>,
    wavenumber: Vec<f64>,
    mirror: Vec<usize>,
}

impl FreqGrid {
    pub fn new(grid: &GridSpec) -> Self {
        let dim = grid.dim();
        let size = grid.size();
        let mut index = vec![0i64; size * dim];
        let mut wavenumber = vec![0.0; size * dim];
        let mut mirror = vec![0usize; size];
        let mut pos = vec![0usize; dim];
        for m in 0..size {
            let mut rem = m;
            for axis in (0..dim).rev() {
                pos[axis] = rem % grid.points[axis];
                rem /= grid.points[axis];
            }
            let mut flat_neg = 0usize;
            for axis in 0..dim {
                let n = grid.points[axis];
                let k = signed_index(pos[axis], n);
                index[m * dim + axis] = k;
                wavenumber[m * dim + axis] = 2.0 * PI * k as f64 / grid.length[axis];
                flat_neg = flat_neg * n + (n - pos[axis]) % n;
            }
            mirror[m] = flat_neg;
        }
        FreqGrid { grid: grid.clone(), index, wavenumber, mirror }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.mirror.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mirror.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Integer index vector of mode `m`.
    pub fn index(&self, m: usize) -> &[i64] {
        let d = self.dim();
        &self.index[m * d..(m + 1) * d]
    }

    /// Angular wavenumber vector `2 pi k_i / L_i` of mode `m`.
    pub fn wavenumber(&self, m: usize) -> &[f64] {
        let d = self.dim();
        &self.wavenumber[m * d..(m + 1) * d]
    }

    /// Squared Euclidean norm of the angular wavenumber.
    pub fn wavenumber_sq(&self, m: usize) -> f64 {
        self.wavenumber(m).iter().map(|k| k * k).sum()
    }

    /// Flat position of the mode `-k` (Nyquist indices map onto themselves).
    pub fn mirror(&self, m: usize) -> usize {
        self.mirror[m]
    }

    /// True when index `k_axis` is the Nyquist index `-N/2` of that axis.
    pub fn is_nyquist(&self, m: usize, axis: usize) -> bool {
        self.index(m)[axis] == -((self.grid.points[axis] / 2) as i64)
    }

    /// Max-norm of the integer index.
    pub fn index_inf_norm(&self, m: usize) -> i64 {
        self.index(m).iter().map(|k| k.abs()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(vec![8, 8], vec![1.0, 1.0]).is_ok());
        assert!(GridSpec::new(vec![8, 7], vec![1.0, 1.0]).is_err());
        assert!(GridSpec::new(vec![2, 8], vec![1.0, 1.0]).is_err());
        assert!(GridSpec::new(vec![8, 8], vec![1.0]).is_err());
        assert!(GridSpec::new(vec![8, 8], vec![1.0, 0.0]).is_err());
        assert!(GridSpec::new(vec![8], vec![1.0]).is_err());
    }

    #[test]
    fn index_ordering_matches_fft_layout() {
        let grid = GridSpec::cube(2, 6, 2.0 * PI).unwrap();
        let freq = FreqGrid::new(&grid);
        let along_axis1: Vec<i64> = (0..6).map(|m| freq.index(m)[1]).collect();
        assert_eq!(along_axis1, vec![0, 1, 2, -3, -2, -1]);
        assert_eq!(freq.wavenumber(0), &[0.0, 0.0]);
        for m in 0..freq.len() {
            let neg = freq.mirror(m);
            for axis in 0..2 {
                let k = freq.index(m)[axis];
                let kn = freq.index(neg)[axis];
                if freq.is_nyquist(m, axis) {
                    assert_eq!(kn, k);
                } else {
                    assert_eq!(kn, -k);
                }
            }
        }
    }

    #[test]
    fn cutoff_uses_floor() {
        assert_eq!(GridSpec::cube(2, 64, 1.0).unwrap().dealias_cutoff(), 21);
        assert_eq!(GridSpec::cube(2, 6, 1.0).unwrap().dealias_cutoff(), 2);
        assert_eq!(GridSpec::new(vec![32, 64], vec![1.0, 1.0]).unwrap().dealias_cutoff(), 10);
    }
}
