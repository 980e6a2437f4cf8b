use super::{NonlinearError, Nonlinearity, NonlinearitySpec};
use crate::spectral::{frequency_l2_norm, lp_norm, SpectralField};

/// `||N(u) - N(v)||_2 / (||u - v||_s (||u||_s^{p+q-1} + ||v||_s^{p+q-1}))`
/// with `s = r (p + q)`, `r = 2n / (n + 2 alpha)`.
pub fn lipschitz_probe(u: &SpectralField, v: &SpectralField, spec: &NonlinearitySpec) -> Result<f64, NonlinearError> {
    u.check_grid(v)?;
    let n = u.grid().dim() as f64;
    let s = 2.0 * n / (n + 2.0 * spec.alpha) * spec.order();
    let diff = u.sub(v)?;
    let dist = lp_norm(&diff, s)?;
    if dist == 0.0 {
        return Err(NonlinearError::Coincident);
    }
    let nl = Nonlinearity::new(u.grid(), *spec)?;
    let num = frequency_l2_norm(&nl.eval(u).sub(&nl.eval(v))?);
    let e = spec.order() - 1.0;
    let size = lp_norm(u, s)?.powf(e) + lp_norm(v, s)?.powf(e);
    Ok(num / (dist * size))
}
