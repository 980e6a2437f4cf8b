use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// Lines per parallel work item when transforming.
const LINES_PER_TASK: usize = 16;

/// Uniform periodic grid on `[-L/2, L/2)^n` with `N` points per axis.
///
/// Samples are stored row-major with axis 0 slowest. Frequency index `i`
/// maps to wavenumber `k = i` for `i < N/2` and `k = i - N` otherwise, so
/// `k` ranges over `{-N/2, ..., N/2 - 1}` and `xi_k = 2 pi k / L`.
///
/// Cloning is cheap; transform plans and wavenumber tables are shared.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    dim: usize,
    points: usize,
    extent: f64,
    axis_wavenumbers: Vec<f64>,
    magnitudes: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(dim: usize, points: usize, extent: f64) -> Result<Self, SpectralError> {
        if !(1..=3).contains(&dim) {
            return Err(SpectralError::Dimension(dim));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(SpectralError::Points(points));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(SpectralError::Extent(extent));
        }
        let axis_wavenumbers: Vec<f64> = (0..points)
            .map(|i| {
                let k = if i < points / 2 {
                    i as f64
                } else {
                    i as f64 - points as f64
                };
                2.0 * PI * k / extent
            })
            .collect();
        let len = points.pow(dim as u32);
        let mut magnitudes = Vec::with_capacity(len);
        for idx in 0..len {
            let mut sq = 0.0;
            let mut rest = idx;
            for _ in 0..dim {
                let xi = axis_wavenumbers[rest % points];
                sq += xi * xi;
                rest /= points;
            }
            magnitudes.push(sq.sqrt());
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        Ok(Grid {
            inner: Arc::new(GridInner {
                dim,
                points,
                extent,
                axis_wavenumbers,
                magnitudes,
                forward,
                inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Samples per axis.
    pub fn points(&self) -> usize {
        self.inner.points
    }

    /// Physical side length.
    pub fn extent(&self) -> f64 {
        self.inner.extent
    }

    pub fn spacing(&self) -> f64 {
        self.inner.extent / self.inner.points as f64
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.inner.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim() as i32)
    }

    /// Wavenumbers along one axis, in transform order.
    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.inner.axis_wavenumbers
    }

    /// `|xi|` for every frequency sample, in storage order.
    pub fn magnitudes(&self) -> &[f64] {
        &self.inner.magnitudes
    }

    /// Largest resolved wavenumber per axis, `pi N / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.points() as f64 / self.extent()
    }

    /// Per-axis multi-index of a flat storage index.
    pub fn multi_index(&self, idx: usize) -> [usize; 3] {
        let n = self.points();
        let mut out = [0; 3];
        let mut rest = idx;
        for axis in (0..self.dim()).rev() {
            out[axis] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        let n = self.points();
        multi[..self.dim()].iter().fold(0, |acc, &i| acc * n + i)
    }

    /// Physical coordinates of a sample; unused axes are zero.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let h = self.spacing();
        let half = self.extent() / 2.0;
        let multi = self.multi_index(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim() {
            x[axis] = -half + multi[axis] as f64 * h;
        }
        x
    }

    /// Wave vector of a frequency sample; unused axes are zero.
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let multi = self.multi_index(idx);
        let mut xi = [0.0; 3];
        for axis in 0..self.dim() {
            xi[axis] = self.inner.axis_wavenumbers[multi[axis]];
        }
        xi
    }

    /// Unnormalized forward DFT over every axis, in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.forward);
    }

    /// Inverse DFT over every axis scaled by `1 / N^n`, in place.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inner.inverse);
        let scale = 1.0 / self.len() as f64;
        data.par_iter_mut().for_each(|z| *z *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match grid");
        let n = self.points();
        let dim = self.dim();
        let task = n * LINES_PER_TASK;
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                data.par_chunks_mut(task).for_each(|chunk| fft.process(chunk));
                continue;
            }
            // each block holds N lines of length `stride`; transpose so the
            // transformed axis becomes contiguous
            let block = n * stride;
            data.par_chunks_mut(block).for_each(|blk| {
                let mut lines = vec![Complex64::default(); block];
                for j in 0..n {
                    for i in 0..stride {
                        lines[i * n + j] = blk[j * stride + i];
                    }
                }
                lines.par_chunks_mut(task).for_each(|chunk| fft.process(chunk));
                for j in 0..n {
                    for i in 0..stride {
                        blk[j * stride + i] = lines[i * n + j];
                    }
                }
            });
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim() && self.points() == other.points() && self.extent() == other.extent())
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim())
            .field("points", &self.points())
            .field("extent", &self.extent())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(Grid::new(0, 16, 1.0), Err(SpectralError::Dimension(0))));
        assert!(matches!(Grid::new(4, 16, 1.0), Err(SpectralError::Dimension(4))));
        assert!(matches!(Grid::new(1, 4, 1.0), Err(SpectralError::Points(4))));
        assert!(matches!(Grid::new(1, 24, 1.0), Err(SpectralError::Points(24))));
        assert!(matches!(Grid::new(1, 16, 0.0), Err(SpectralError::Extent(_))));
    }

    #[test]
    fn wavenumber_layout() {
        let g = Grid::new(1, 8, 2.0 * PI).unwrap();
        let k: Vec<f64> = g.axis_wavenumbers().to_vec();
        assert_eq!(k, vec![0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]);
    }

    #[test]
    fn magnitude_is_euclidean() {
        let g = Grid::new(3, 8, 2.0 * PI).unwrap();
        let idx = g.flat_index(&[1, 2, 7]);
        assert!((g.magnitudes()[idx] - 6.0_f64.sqrt()).abs() < 1e-14);
        assert_eq!(g.wavevector(idx), [1.0, 2.0, -1.0]);
    }

    #[test]
    fn coords_span_centered_box() {
        let g = Grid::new(2, 8, 4.0).unwrap();
        assert_eq!(g.coords(0), [-2.0, -2.0, 0.0]);
        let last = g.len() - 1;
        assert_eq!(g.coords(last), [1.5, 1.5, 0.0]);
        assert_eq!(g.multi_index(g.flat_index(&[3, 5])), [3, 5, 0]);
    }

    #[test]
    fn multi_axis_transform_matches_direct_dft() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let n = 8;
        let data: Vec<Complex64> = (0..g.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut fast = data.clone();
        g.forward(&mut fast);
        for k0 in 0..n {
            for k1 in 0..n {
                let mut acc = Complex64::default();
                for j0 in 0..n {
                    for j1 in 0..n {
                        let phase = -2.0 * PI * ((k0 * j0 + k1 * j1) as f64) / n as f64;
                        acc += data[j0 * n + j1] * Complex64::from_polar(1.0, phase);
                    }
                }
                assert!((acc - fast[k0 * n + k1]).norm() < 1e-12);
            }
        }
    }
}
