/// The Lebesgue exponents at which the nonlinearity is estimated:
/// `q1 = m n (p+q) / (n + m alpha)` for the `L^m` part and
/// `q2 = 2 n (p+q) / (n + 2 alpha)` for the `L^2` part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueIndices {
    pub q1: f64,
    pub q2: f64,
}

impl LebesgueIndices {
    /// Gagliardo-Nirenberg exponents `(theta_{q1}, theta_{q2})`.
    pub fn thetas(&self, n: f64, sigma: f64) -> (f64, f64) {
        (gn_theta(n, sigma, self.q1), gn_theta(n, sigma, self.q2))
    }

    /// Whether both exponents lie in `[0, 1]`.
    pub fn interpolation_admissible(&self, n: f64, sigma: f64) -> bool {
        let (a, b) = self.thetas(n, sigma);
        (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b)
    }
}

pub fn lebesgue_indices(n: f64, m: f64, alpha: f64, order: f64) -> LebesgueIndices {
    LebesgueIndices {
        q1: m * n * order / (n + m * alpha),
        q2: 2.0 * n * order / (n + 2.0 * alpha),
    }
}

/// `theta_q = (n/sigma)(1/2 - 1/q)`.
pub fn gn_theta(n: f64, sigma: f64, q: f64) -> f64 {
    n / sigma * (0.5 - 1.0 / q)
}
