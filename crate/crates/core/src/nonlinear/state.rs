use crate::spectral::{frequency_l2_norm, lp_norm, sobolev_seminorm, Grid, SpectralError, SpectralField};

/// `(u, u_t)` at one instant.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub u: SpectralField,
    pub ut: SpectralField,
    pub time: f64,
}

impl StateVector {
    pub fn new(u: SpectralField, ut: SpectralField, time: f64) -> Result<Self, SpectralError> {
        u.check_grid(&ut)?;
        Ok(StateVector { u, ut, time })
    }

    /// State at `t = 0` from `u(0) = u0`, `u_t(0) = u1`.
    pub fn from_data(u0: SpectralField, u1: SpectralField) -> Result<Self, SpectralError> {
        Self::new(u0, u1, 0.0)
    }

    pub fn zeros(grid: &Grid) -> Self {
        StateVector {
            u: SpectralField::zeros(grid),
            ut: SpectralField::zeros(grid),
            time: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.u.grid()
    }

    /// `||u||_2`.
    pub fn l2_norm(&self) -> f64 {
        frequency_l2_norm(&self.u)
    }

    /// `||(|D|^sigma u, u_t)||_2`.
    pub fn energy_norm(&self, sigma: f64) -> f64 {
        let a = sobolev_seminorm(&self.u, sigma);
        let b = frequency_l2_norm(&self.ut);
        (a * a + b * b).sqrt()
    }

    /// `||u||_inf`.
    pub fn sup_norm(&self) -> f64 {
        lp_norm(&self.u, f64::INFINITY).unwrap_or(f64::NAN)
    }

    pub fn is_finite(&self) -> bool {
        self.u
            .frequency()
            .iter()
            .chain(self.ut.frequency())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}
