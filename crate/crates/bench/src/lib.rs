//! Inputs shared by the benchmarks.

use sigmadamp::nonlinear::{NonlinearityKind, NonlinearitySpec};
use sigmadamp::profiles::Profile;
use sigmadamp::{Grid, SpectralField, StateVector};

/// A band-limited field on a `dim`-dimensional grid with `points` per axis.
pub fn field(dim: usize, points: usize) -> SpectralField {
    let grid = Grid::new(dim, points, 32.0).expect("benchmark grid");
    Profile::BandLimited { cutoff: 3.0, seed: 7 }.sample(&grid)
}

/// A state with Gaussian displacement and band-limited velocity.
pub fn state(dim: usize, points: usize) -> StateVector {
    let u1 = field(dim, points);
    let u0 = Profile::Gaussian { width: 2.0 }.sample(u1.grid()).scale(0.1);
    StateVector::from_data(u0, u1.scale(0.1)).expect("same grid")
}

pub fn spec(kind: NonlinearityKind) -> NonlinearitySpec {
    NonlinearitySpec::new(kind, 0.5, 1.5, 1.5)
}
