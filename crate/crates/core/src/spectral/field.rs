use std::sync::OnceLock;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{Grid, SpectralError};

/// Complex samples on a [`Grid`] with lazily synchronised physical and
/// frequency views. At least one view is always populated; the other is
/// computed on first access and cached.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    physical: OnceLock<Vec<Complex64>>,
    frequency: OnceLock<Vec<Complex64>>,
}

impl SpectralField {
    pub fn from_physical(grid: &Grid, values: Vec<Complex64>) -> Result<Self, SpectralError> {
        check_len(grid, values.len())?;
        Ok(SpectralField {
            grid: grid.clone(),
            physical: OnceLock::from(values),
            frequency: OnceLock::new(),
        })
    }

    pub fn from_frequency(grid: &Grid, values: Vec<Complex64>) -> Result<Self, SpectralError> {
        check_len(grid, values.len())?;
        Ok(SpectralField {
            grid: grid.clone(),
            physical: OnceLock::new(),
            frequency: OnceLock::from(values),
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let values = vec![Complex64::default(); grid.len()];
        SpectralField {
            grid: grid.clone(),
            physical: OnceLock::from(values.clone()),
            frequency: OnceLock::from(values),
        }
    }

    /// Sample `f(x)` at every grid point.
    pub fn from_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let dim = grid.dim();
        let values: Vec<Complex64> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(&grid.coords(idx)[..dim]))
            .collect();
        SpectralField {
            grid: grid.clone(),
            physical: OnceLock::from(values),
            frequency: OnceLock::new(),
        }
    }

    pub fn from_real_fn<F>(grid: &Grid, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn physical(&self) -> &[Complex64] {
        self.physical.get_or_init(|| {
            let mut data = self.frequency.get().expect("field has no populated view").clone();
            self.grid.inverse(&mut data);
            data
        })
    }

    pub fn frequency(&self) -> &[Complex64] {
        self.frequency.get_or_init(|| {
            let mut data = self.physical.get().expect("field has no populated view").clone();
            self.grid.forward(&mut data);
            data
        })
    }

    pub fn into_physical(self) -> Vec<Complex64> {
        let _ = self.physical();
        self.physical.into_inner().expect("physical view populated")
    }

    pub fn into_frequency(self) -> Vec<Complex64> {
        let _ = self.frequency();
        self.frequency.into_inner().expect("frequency view populated")
    }

    /// Apply `f` pointwise in physical space.
    pub fn map_physical<F>(&self, f: F) -> SpectralField
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let values: Vec<Complex64> = self.physical().par_iter().map(|&z| f(z)).collect();
        SpectralField {
            grid: self.grid.clone(),
            physical: OnceLock::from(values),
            frequency: OnceLock::new(),
        }
    }

    /// Pointwise product in physical space.
    pub fn mul_pointwise(&self, other: &SpectralField) -> Result<SpectralField, SpectralError> {
        self.zip_physical(other, |a, b| a * b)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField, SpectralError> {
        self.combine(other, 1.0, 1.0)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField, SpectralError> {
        self.combine(other, 1.0, -1.0)
    }

    pub fn scale(&self, factor: f64) -> SpectralField {
        let scale = |v: &Vec<Complex64>| v.iter().map(|z| z * factor).collect::<Vec<_>>();
        let physical = self.physical.get().map(scale);
        let frequency = self.frequency.get().map(scale);
        SpectralField {
            grid: self.grid.clone(),
            physical: physical.map(OnceLock::from).unwrap_or_default(),
            frequency: frequency.map(OnceLock::from).unwrap_or_default(),
        }
    }

    /// `a * self + b * other`, computed in whichever view both operands share.
    pub fn combine(&self, other: &SpectralField, a: f64, b: f64) -> Result<SpectralField, SpectralError> {
        self.check_grid(other)?;
        let lin = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(&u, &v)| u * a + v * b).collect()
        };
        if let (Some(x), Some(y)) = (self.frequency.get(), other.frequency.get()) {
            return SpectralField::from_frequency(&self.grid, lin(x, y));
        }
        SpectralField::from_physical(&self.grid, lin(self.physical(), other.physical()))
    }

    fn zip_physical<F>(&self, other: &SpectralField, f: F) -> Result<SpectralField, SpectralError>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Sync,
    {
        self.check_grid(other)?;
        let values = self
            .physical()
            .par_iter()
            .zip(other.physical().par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        SpectralField::from_physical(&self.grid, values)
    }

    pub(crate) fn check_grid(&self, other: &SpectralField) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.physical().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |Im u| / max |u|` in physical space; zero for the zero field.
    pub fn imaginary_residue(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        self.physical().iter().map(|z| z.im.abs()).fold(0.0, f64::max) / max
    }

    /// Drop imaginary parts in physical space.
    pub fn real_part(&self) -> SpectralField {
        self.map_physical(|z| Complex64::new(z.re, 0.0))
    }

    /// Largest magnitude on the outermost layer of cells relative to the
    /// global maximum. Used to detect mass reaching the periodic boundary.
    pub fn boundary_density(&self) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let n = self.grid.points();
        let dim = self.grid.dim();
        let values = self.physical();
        let mut edge: f64 = 0.0;
        for (idx, z) in values.iter().enumerate() {
            let multi = self.grid.multi_index(idx);
            if multi[..dim].iter().any(|&i| i == 0 || i == n - 1) {
                edge = edge.max(z.norm());
            }
        }
        edge / max
    }
}

fn check_len(grid: &Grid, len: usize) -> Result<(), SpectralError> {
    if len != grid.len() {
        return Err(SpectralError::Length {
            expected: grid.len(),
            found: len,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn views_agree_after_round_trip() {
        let g = Grid::new(2, 16, 3.0).unwrap();
        let f = SpectralField::from_real_fn(&g, |x| (x[0] * 2.0).sin() + x[1].cos());
        let spec = f.frequency().to_vec();
        let back = SpectralField::from_frequency(&g, spec).unwrap();
        for (a, b) in back.physical().iter().zip(f.physical()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        assert!(matches!(
            SpectralField::from_physical(&g, vec![Complex64::default(); 7]),
            Err(SpectralError::Length { expected: 8, found: 7 })
        ));
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = SpectralField::zeros(&Grid::new(1, 8, 1.0).unwrap());
        let b = SpectralField::zeros(&Grid::new(1, 16, 1.0).unwrap());
        assert!(matches!(a.add(&b), Err(SpectralError::GridMismatch)));
    }

    #[test]
    fn real_fields_have_hermitian_spectrum() {
        let g = Grid::new(2, 16, 5.0).unwrap();
        let f = SpectralField::from_real_fn(&g, |x| (-x[0] * x[0] - 0.5 * x[1] * x[1]).exp() * (1.0 + x[0]));
        let spec = f.frequency();
        let n = g.points();
        for i in 0..n {
            for j in 0..n {
                let a = spec[g.flat_index(&[i, j])];
                let b = spec[g.flat_index(&[(n - i) % n, (n - j) % n])];
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn combine_uses_frequency_view_when_available() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let a = SpectralField::from_frequency(&g, vec![Complex64::new(1.0, 0.0); 8]).unwrap();
        let b = SpectralField::from_frequency(&g, vec![Complex64::new(2.0, 0.0); 8]).unwrap();
        let c = a.combine(&b, 2.0, -1.0).unwrap();
        assert!(c.frequency().iter().all(|z| z.norm() == 0.0));
    }
}
