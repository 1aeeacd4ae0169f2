//! Gauss rules on `[-1, 1]`.

use serde::{Deserialize, Serialize};

use crate::harmonics::OrthonormalGegenbauer;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITERS: usize = 100;

/// Gauss rule for the weight `(1 - t^2)^{weight_exponent}` on `[-1, 1]`.
/// Nodes are sorted in decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub exact_degree: u32,
    pub weight_exponent: f64,
}

impl LineRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(t_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        crate::sum::compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)))
    }
}

/// `n`-point Gauss-Legendre rule, exact through degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> LineRule {
    gauss_polar(2, n)
}

/// `n`-point Gauss rule for the polar weight `(1 - t^2)^{(d-2)/2}` of `S^d`
/// (Gauss-Gegenbauer with index `(d - 1)/2`; Gauss-Legendre when `d = 2`).
///
/// Nodes are Newton-refined zeros of the degree-`n` orthonormal polynomial,
/// weights come from the Christoffel function `1 / Σ_{k<n} q_k(t)^2`.
pub fn gauss_polar(d: usize, n: usize) -> LineRule {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    assert!(d >= 2, "polar weights exist for S^d with d ≥ 2");
    let family = OrthonormalGegenbauer::for_sphere(d, n as u32);
    let degree = n as u32;
    // Jacobi parameter a = b = (d - 2)/2
    let a = (d as f64 - 2.0) / 2.0;
    let half = n / 2;
    let mut positive = Vec::with_capacity(half);
    for k in 1..=half {
        let theta = (k as f64 + a / 2.0 - 0.25) * std::f64::consts::PI / (n as f64 + a + 0.5);
        let mut t = theta.cos();
        for _ in 0..NEWTON_MAX_ITERS {
            let (q, dq) = family.value_and_derivative(degree, t);
            let step = q / dq;
            t -= step;
            if step.abs() <= NEWTON_TOL {
                break;
            }
        }
        positive.push(t);
    }
    let mut nodes: Vec<f64> = positive.clone();
    if n % 2 == 1 {
        nodes.push(0.0);
    }
    nodes.extend(positive.iter().rev().map(|t| -t));
    for pair in nodes.windows(2) {
        assert!(pair[0] > pair[1], "Gauss nodes failed to separate: {pair:?}");
    }
    let weights = nodes.iter().map(|&t| family.christoffel_sum(degree, t).recip()).collect();
    LineRule { nodes, weights, exact_degree: 2 * degree - 1, weight_exponent: a }
}
