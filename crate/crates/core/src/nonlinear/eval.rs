use rayon::prelude::*;

use super::{NonlinearError, NonlinearityKind, NonlinearitySpec, RieszZeroMode};
use crate::spectral::ops::dealias_mask;
use crate::spectral::{Grid, SpectralField};
use crate::Complex64;

/// A nonlinearity bound to one grid, with its symbol tables precomputed.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    spec: NonlinearitySpec,
    grid: Grid,
    riesz: Vec<f64>,
    mask: Option<Vec<bool>>,
}

impl Nonlinearity {
    pub fn new(grid: &Grid, spec: NonlinearitySpec) -> Result<Self, NonlinearError> {
        spec.validate(grid.dim())?;
        let riesz = match spec.kind {
            NonlinearityKind::Power => Vec::new(),
            _ => grid
                .magnitudes()
                .iter()
                .enumerate()
                .map(|(i, &r)| {
                    if i == 0 {
                        match spec.zero_mode {
                            RieszZeroMode::Project => 0.0,
                            RieszZeroMode::Unit => 1.0,
                        }
                    } else {
                        r.powf(-spec.alpha)
                    }
                })
                .collect(),
        };
        let mask = spec.dealias.then(|| dealias_mask(grid));
        Ok(Nonlinearity {
            spec,
            grid: grid.clone(),
            riesz,
            mask,
        })
    }

    pub fn spec(&self) -> &NonlinearitySpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `N(u)`, returned with its frequency view populated.
    pub fn eval(&self, u: &SpectralField) -> SpectralField {
        let input = self.truncate_input(u);
        let order = self.spec.order();
        let out = match self.spec.kind {
            NonlinearityKind::Power => {
                let mut w: Vec<Complex64> = input
                    .par_iter()
                    .map(|z| Complex64::new(z.norm().powf(order), 0.0))
                    .collect();
                self.grid.forward(&mut w);
                w
            }
            NonlinearityKind::Modified => {
                let mut w: Vec<Complex64> = input
                    .par_iter()
                    .map(|z| Complex64::new(z.norm().powf(order), 0.0))
                    .collect();
                self.grid.forward(&mut w);
                w.par_iter_mut().zip(self.riesz.par_iter()).for_each(|(z, &s)| *z *= s);
                w
            }
            NonlinearityKind::Hartree => {
                let (p, q) = (self.spec.p, self.spec.q);
                let mut w: Vec<Complex64> = input
                    .par_iter()
                    .map(|z| Complex64::new(z.norm().powf(q), 0.0))
                    .collect();
                self.grid.forward(&mut w);
                w.par_iter_mut().zip(self.riesz.par_iter()).for_each(|(z, &s)| *z *= s);
                self.grid.inverse(&mut w);
                w.par_iter_mut()
                    .zip(input.par_iter())
                    .for_each(|(z, u)| *z *= powf0(u.norm(), p));
                self.grid.forward(&mut w);
                w
            }
        };
        let out = self.truncate_output(out);
        SpectralField::from_frequency(&self.grid, out).expect("grid sized")
    }

    fn truncate_input<'a>(&self, u: &'a SpectralField) -> std::borrow::Cow<'a, [Complex64]> {
        match &self.mask {
            None => std::borrow::Cow::Borrowed(u.physical()),
            Some(mask) => {
                let mut spec: Vec<Complex64> = u
                    .frequency()
                    .par_iter()
                    .zip(mask.par_iter())
                    .map(|(&z, &keep)| if keep { z } else { Complex64::default() })
                    .collect();
                self.grid.inverse(&mut spec);
                std::borrow::Cow::Owned(spec)
            }
        }
    }

    fn truncate_output(&self, mut out: Vec<Complex64>) -> Vec<Complex64> {
        if let Some(mask) = &self.mask {
            out.par_iter_mut().zip(mask.par_iter()).for_each(|(z, &keep)| {
                if !keep {
                    *z = Complex64::default();
                }
            });
        }
        out
    }
}

/// `x^p` with `0^0 = 1`.
fn powf0(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

fn eval_kind(
    u: &SpectralField,
    spec: &NonlinearitySpec,
    kind: NonlinearityKind,
) -> Result<SpectralField, NonlinearError> {
    if spec.kind != kind {
        return Err(NonlinearError::Kind {
            expected: kind,
            found: spec.kind,
        });
    }
    Ok(Nonlinearity::new(u.grid(), *spec)?.eval(u))
}

/// `I_alpha(|u|^{p+q})`.
pub fn eval_modified(u: &SpectralField, spec: &NonlinearitySpec) -> Result<SpectralField, NonlinearError> {
    eval_kind(u, spec, NonlinearityKind::Modified)
}

/// `|u|^p I_alpha(|u|^q)`.
pub fn eval_hartree(u: &SpectralField, spec: &NonlinearitySpec) -> Result<SpectralField, NonlinearError> {
    eval_kind(u, spec, NonlinearityKind::Hartree)
}

/// `|u|^{p+q}`.
pub fn eval_power(u: &SpectralField, spec: &NonlinearitySpec) -> Result<SpectralField, NonlinearError> {
    eval_kind(u, spec, NonlinearityKind::Power)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Profile;
    use crate::spectral::{lp_norm, riesz_potential};

    fn spec(kind: NonlinearityKind) -> NonlinearitySpec {
        NonlinearitySpec::new(kind, 0.5, 1.5, 1.2)
    }

    fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
        lp_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::new(2, 16, 8.0).unwrap();
        let zero = SpectralField::zeros(&g);
        for kind in [
            NonlinearityKind::Modified,
            NonlinearityKind::Hartree,
            NonlinearityKind::Power,
        ] {
            let out = Nonlinearity::new(&g, spec(kind)).unwrap().eval(&zero);
            assert_eq!(out.max_abs(), 0.0);
        }
    }

    #[test]
    fn modified_is_composition() {
        let g = Grid::new(1, 64, 12.0).unwrap();
        let u = Profile::Gaussian { width: 1.0 }.sample(&g);
        let mut s = spec(NonlinearityKind::Modified);
        s.dealias = false;
        let out = eval_modified(&u, &s).unwrap();
        let power = u.map_physical(|z| Complex64::new(z.norm().powf(2.7), 0.0));
        let expected = riesz_potential(&power, 0.5).unwrap();
        assert!(rel(&out, &expected) < 1e-14);
    }

    #[test]
    fn power_kind_is_pointwise_power() {
        let g = Grid::new(2, 32, 10.0).unwrap();
        let u = Profile::Gaussian { width: 1.5 }.sample(&g);
        let mut s = spec(NonlinearityKind::Power);
        s.dealias = false;
        let out = eval_power(&u, &s).unwrap();
        for (a, z) in out.physical().iter().zip(u.physical()) {
            assert!((a - Complex64::new(z.norm().powf(2.7), 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn hartree_with_p_zero_matches_modified() {
        let g = Grid::new(2, 32, 10.0).unwrap();
        let u = Profile::Gaussian { width: 1.5 }.sample(&g);
        let h = NonlinearitySpec::new(NonlinearityKind::Hartree, 0.7, 0.0, 2.5);
        let m = NonlinearitySpec::new(NonlinearityKind::Modified, 0.7, 0.0, 2.5);
        let a = eval_hartree(&u, &h).unwrap();
        let b = eval_modified(&u, &m).unwrap();
        assert!(rel(&a, &b) < 1e-12);
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let u = SpectralField::zeros(&g);
        assert!(matches!(
            eval_hartree(&u, &spec(NonlinearityKind::Modified)),
            Err(NonlinearError::Kind { .. })
        ));
    }

    #[test]
    fn rejects_bad_alpha() {
        let g = Grid::new(1, 16, 4.0).unwrap();
        let s = NonlinearitySpec::new(NonlinearityKind::Hartree, 1.0, 1.0, 1.0);
        assert!(Nonlinearity::new(&g, s).is_err());
        let s = NonlinearitySpec::new(NonlinearityKind::Power, 1.0, 1.0, 1.0);
        assert!(Nonlinearity::new(&g, s).is_ok());
    }

    fn symmetry_residual(f: &SpectralField) -> f64 {
        let g = f.grid();
        let n = g.points();
        let dim = g.dim();
        let vals = f.physical();
        let max = f.max_abs();
        let mut worst: f64 = 0.0;
        for idx in 0..g.len() {
            let m = g.multi_index(idx);
            // reflection of axis 0 and, when available, the swap of axes 0 and 1
            let mut refl = m;
            refl[0] = (n - m[0]) % n;
            worst = worst.max((vals[idx] - vals[g.flat_index(&refl[..dim])]).norm());
            if dim > 1 {
                let mut swap = m;
                swap.swap(0, 1);
                worst = worst.max((vals[idx] - vals[g.flat_index(&swap[..dim])]).norm());
            }
        }
        worst / max
    }

    #[test]
    fn radial_symmetry_preserved() {
        for dim in [2, 3] {
            let g = Grid::new(dim, 16, 8.0).unwrap();
            let u = Profile::Gaussian { width: 1.2 }.sample(&g);
            for kind in [NonlinearityKind::Modified, NonlinearityKind::Hartree] {
                let out = Nonlinearity::new(&g, spec(kind)).unwrap().eval(&u);
                assert!(symmetry_residual(&out) < 1e-9, "{kind:?} in {dim}d");
            }
        }
    }
}
