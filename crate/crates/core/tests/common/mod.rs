//! Independent reference solvers shared by the integration tests.

#![allow(dead_code)]

use sigmadamp::nonlinear::Nonlinearity;
use sigmadamp::{Complex64, SpectralField};

/// Fundamental solutions of `v'' + a v' + a^2 v = 0` at time `t` by fixed-step
/// RK4, returned as `[K0, K1, dK0, dK1]`.
pub fn ode_kernels(a: f64, t: f64) -> [f64; 4] {
    let h_target = if a > 0.0 { (1e-3 / a).min(1e-3) } else { 1e-3 };
    let steps = ((t / h_target).ceil() as usize).max(1);
    let h = t / steps as f64;
    let rhs = |y: [f64; 2]| [y[1], -a * y[1] - a * a * y[0]];
    let solve = |mut y: [f64; 2]| {
        for _ in 0..steps {
            let k1 = rhs(y);
            let k2 = rhs([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
            let k3 = rhs([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
            let k4 = rhs([y[0] + h * k3[0], y[1] + h * k3[1]]);
            for i in 0..2 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    };
    let y0 = solve([1.0, 0.0]);
    let y1 = solve([0.0, 1.0]);
    [y0[0], y1[0], y0[1], y1[1]]
}

/// Method-of-lines solve of the full semi-linear problem in Fourier space,
/// `U' = V`, `V' = -|xi|^{2 sigma} U - |xi|^sigma V + N(U)^`, by classical
/// RK4 with step `dt`. Returns the spectra of `(u, u_t)` at `horizon`.
pub fn mol_solve(
    nonlinearity: &Nonlinearity,
    sigma: f64,
    u0: &SpectralField,
    u1: &SpectralField,
    horizon: f64,
    dt: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let grid = u0.grid().clone();
    let a: Vec<f64> = grid.magnitudes().iter().map(|r| r.powf(sigma)).collect();
    let rhs = |u: &[Complex64], v: &[Complex64]| -> (Vec<Complex64>, Vec<Complex64>) {
        let field = SpectralField::from_frequency(&grid, u.to_vec()).unwrap();
        let nl = nonlinearity.eval(&field);
        let nl = nl.frequency();
        let dv = (0..u.len())
            .map(|i| -a[i] * a[i] * u[i] - a[i] * v[i] + nl[i])
            .collect();
        (v.to_vec(), dv)
    };
    let axpy = |x: &[Complex64], s: f64, y: &[Complex64]| -> Vec<Complex64> {
        x.iter().zip(y).map(|(a, b)| a + b * s).collect()
    };
    let steps = (horizon / dt).round() as usize;
    let mut u = u0.frequency().to_vec();
    let mut v = u1.frequency().to_vec();
    for _ in 0..steps {
        let (k1u, k1v) = rhs(&u, &v);
        let (k2u, k2v) = rhs(&axpy(&u, dt / 2.0, &k1u), &axpy(&v, dt / 2.0, &k1v));
        let (k3u, k3v) = rhs(&axpy(&u, dt / 2.0, &k2u), &axpy(&v, dt / 2.0, &k2v));
        let (k4u, k4v) = rhs(&axpy(&u, dt, &k3u), &axpy(&v, dt, &k3v));
        for i in 0..u.len() {
            u[i] += (k1u[i] + k2u[i] * 2.0 + k3u[i] * 2.0 + k4u[i]) * (dt / 6.0);
            v[i] += (k1v[i] + k2v[i] * 2.0 + k3v[i] * 2.0 + k4v[i]) * (dt / 6.0);
        }
    }
    (u, v)
}

/// Relative `l^2` distance of two coefficient vectors.
pub fn rel_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
