//! Composite Gauss-Legendre quadrature with panel doubling.

use std::f64::consts::PI;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("quadrature did not converge after {refinements} refinements (last relative change {change:e})")]
    NonConvergence { refinements: usize, change: f64 },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
    #[error("breakpoints must be finite and strictly increasing")]
    Breakpoints,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Newton iteration from the Chebyshev-like initial guess
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Value of `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of a converged composite integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Relative change at the last doubling.
    pub change: f64,
    pub evaluations: usize,
}

/// Composite rule over user panels, bisecting every panel until the
/// relative change drops below `rel_tol`.
#[derive(Debug, Clone)]
pub struct Composite {
    rule: GaussLegendre,
    pub rel_tol: f64,
    /// Absolute floor below which changes count as converged.
    pub abs_tol: f64,
    pub max_refinements: usize,
}

impl Default for Composite {
    fn default() -> Self {
        Composite {
            rule: GaussLegendre::new(16),
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_refinements: 10,
        }
    }
}

impl Composite {
    pub fn new(order: usize, rel_tol: f64) -> Self {
        Composite {
            rule: GaussLegendre::new(order),
            rel_tol,
            ..Default::default()
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, breakpoints: &[f64]) -> Result<Integral, QuadratureError> {
        if breakpoints.len() < 2
            || breakpoints.iter().any(|b| !b.is_finite())
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(QuadratureError::Breakpoints);
        }
        let mut panels: Vec<f64> = breakpoints.to_vec();
        let mut evaluations = 0;
        let mut eval = |panels: &[f64], evaluations: &mut usize| -> Result<f64, QuadratureError> {
            let mut total = 0.0;
            for w in panels.windows(2) {
                let mut bad = None;
                total += self.rule.integrate(
                    |x| {
                        let y = f(x);
                        if !y.is_finite() {
                            bad = Some(x);
                        }
                        y
                    },
                    w[0],
                    w[1],
                );
                *evaluations += self.rule.order();
                if let Some(x) = bad {
                    return Err(QuadratureError::NonFinite(x));
                }
            }
            Ok(total)
        };
        let mut previous = eval(&panels, &mut evaluations)?;
        let mut change = f64::INFINITY;
        for _ in 0..self.max_refinements {
            panels = bisect(&panels);
            let current = eval(&panels, &mut evaluations)?;
            let diff = (current - previous).abs();
            change = if current != 0.0 { diff / current.abs() } else { diff };
            previous = current;
            if change <= self.rel_tol || diff <= self.abs_tol {
                return Ok(Integral {
                    value: current,
                    change,
                    evaluations,
                });
            }
        }
        Err(QuadratureError::NonConvergence {
            refinements: self.max_refinements,
            change,
        })
    }
}

fn bisect(panels: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * panels.len());
    for w in panels.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*panels.last().unwrap());
    out
}

/// Breakpoints `0, s, 2s, 4s, ...` up to and including `end`.
pub fn geometric_breakpoints(start: f64, end: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut x = start;
    while x < end {
        out.push(x);
        x *= 2.0;
    }
    out.push(end);
    out
}
