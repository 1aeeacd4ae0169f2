//! Iterated product rules on `S^d`.
//!
//! `S^k` is parameterised as `x = (√(1 - t^2) y, t)` with `y ∈ S^{k-1}`, so
//! `dσ_k = (1 - t^2)^{(k-2)/2} dt dσ_{k-1}`. Each polar level uses the Gauss
//! rule for its weight and the innermost circle `S^1` uses equally spaced
//! azimuths. On `S^2` the nodes are ring-major: all azimuths of the first
//! polar node, then the next ring.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::line::{gauss_polar, LineRule};
use crate::error::{Error, Result};
use crate::harmonics::SpherePoint;
use crate::special::sphere_area;

pub const DEFAULT_MARGIN: u32 = 2;
/// Largest node count a rule may have before construction is refused.
pub const DEFAULT_NODE_BUDGET: usize = 8_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereRule {
    dimension: usize,
    /// Polar rules for `S^d, S^{d-1}, …, S^2`, outermost first.
    levels: Vec<LineRule>,
    n_azimuth: usize,
    exact_degree: u32,
}

/// Product rule on `S^d` exact through `target_degree`, with the default
/// margin and node budget.
pub fn sphere_rule(d: usize, target_degree: u32) -> Result<SphereRule> {
    SphereRule::build(d, target_degree, DEFAULT_MARGIN, DEFAULT_NODE_BUDGET)
}

/// Number of nodes [`SphereRule::build`] would create.
pub fn sphere_rule_size(d: usize, target_degree: u32, margin: u32) -> usize {
    let (n_polar, n_azimuth) = level_sizes(target_degree, margin);
    n_polar.saturating_pow(d as u32 - 1).saturating_mul(n_azimuth)
}

fn level_sizes(target_degree: u32, margin: u32) -> (usize, usize) {
    let n_polar = (target_degree as usize + 2).div_ceil(2) + margin as usize;
    let n_azimuth = target_degree as usize + 1 + margin as usize;
    (n_polar, n_azimuth)
}

impl SphereRule {
    pub fn build(d: usize, target_degree: u32, margin: u32, node_budget: usize) -> Result<Self> {
        if !(2..=5).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        let nodes = sphere_rule_size(d, target_degree, margin);
        if nodes > node_budget {
            return Err(Error::InfeasibleQuadrature {
                what: format!("S^{d} rule of degree {target_degree}"),
                nodes,
                budget: node_budget,
            });
        }
        let (n_polar, n_azimuth) = level_sizes(target_degree, margin);
        let levels: Vec<LineRule> = (2..=d).rev().map(|k| gauss_polar(k, n_polar)).collect();
        let polar_exact = 2 * n_polar as u32 - 1;
        let exact_degree = polar_exact.min(n_azimuth as u32 - 1);
        Ok(Self { dimension: d, levels, n_azimuth, exact_degree })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn exact_degree(&self) -> u32 {
        self.exact_degree
    }

    pub fn levels(&self) -> &[LineRule] {
        &self.levels
    }

    pub fn n_azimuth(&self) -> usize {
        self.n_azimuth
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(LineRule::len).product::<usize>() * self.n_azimuth
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn area(&self) -> f64 {
        sphere_area(self.dimension)
    }

    /// Writes the coordinates of node `index` into `coords` (length `d + 1`)
    /// and returns its weight.
    pub fn node_into(&self, index: usize, coords: &mut [f64]) -> f64 {
        let d = self.dimension;
        debug_assert_eq!(coords.len(), d + 1);
        let k = index % self.n_azimuth;
        let mut rest = index / self.n_azimuth;
        let phi = 2.0 * std::f64::consts::PI * k as f64 / self.n_azimuth as f64;
        let mut weight = 2.0 * std::f64::consts::PI / self.n_azimuth as f64;
        // innermost polar level varies fastest after azimuth
        let mut radius = 1.0;
        let mut polar = vec![0usize; self.levels.len()];
        for (slot, level) in polar.iter_mut().zip(&self.levels).rev() {
            *slot = rest % level.len();
            rest /= level.len();
        }
        for (level_pos, (level, &j)) in self.levels.iter().zip(&polar).enumerate() {
            let t = level.nodes[j];
            weight *= level.weights[j];
            // level_pos 0 is S^d, whose polar cosine is the last coordinate
            coords[d - level_pos] = radius * t;
            radius *= (1.0 - t * t).max(0.0).sqrt();
        }
        coords[0] = radius * phi.cos();
        coords[1] = radius * phi.sin();
        weight
    }

    pub fn node(&self, index: usize) -> (SpherePoint, f64) {
        let mut coords = vec![0.0; self.dimension + 1];
        let w = self.node_into(index, &mut coords);
        (SpherePoint::from_unit_coords(coords), w)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (SpherePoint, f64)> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// `(w_i, f(x_i))` for every node, evaluated in parallel, returned in node
    /// order.
    pub fn map_nodes<T, F>(&self, f: F) -> Vec<(f64, T)>
    where
        T: Send,
        F: Fn(&[f64]) -> T + Sync,
    {
        let d = self.dimension;
        (0..self.len())
            .into_par_iter()
            .map_init(
                || vec![0.0; d + 1],
                |buf, i| {
                    let w = self.node_into(i, buf);
                    (w, f(buf))
                },
            )
            .collect()
    }

    /// `Σ w_i f(x_i)` with compensated summation in node order.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        crate::sum::compensated_sum(self.map_nodes(f).into_iter().map(|(w, v)| w * v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::ln_gamma;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    /// `∫_{S^d} x^α dσ` for a multi-index `α`: zero unless all entries are
    /// even, otherwise `2 ∏ Γ(β_i) / Γ(Σ β_i)` with `β_i = (α_i + 1)/2`.
    fn monomial_integral(alpha: &[u32]) -> f64 {
        if alpha.iter().any(|a| a % 2 == 1) {
            return 0.0;
        }
        let betas: Vec<f64> = alpha.iter().map(|&a| (f64::from(a) + 1.0) / 2.0).collect();
        let ln = betas.iter().map(|&b| ln_gamma(b)).sum::<f64>() - ln_gamma(betas.iter().sum());
        2.0 * ln.exp()
    }

    fn multi_indices(len: usize, max_total: u32) -> Vec<Vec<u32>> {
        if len == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 0..=max_total {
            for mut tail in multi_indices(len - 1, max_total - first) {
                tail.insert(0, first);
                out.push(tail);
            }
        }
        out
    }

    #[test]
    fn areas() {
        for d in 2..=5 {
            let rule = sphere_rule(d, 4).unwrap();
            let total = rule.integrate(|_| 1.0);
            assert_relative_eq!(total, sphere_area(d), max_relative = 1e-10);
        }
        assert_relative_eq!(sphere_rule(2, 0).unwrap().integrate(|_| 1.0), 4.0 * PI, max_relative = 1e-10);
        assert_relative_eq!(sphere_rule(3, 0).unwrap().integrate(|_| 1.0), 2.0 * PI * PI, max_relative = 1e-10);
    }

    #[test]
    fn monomial_battery() {
        for d in 2..=4 {
            let target = if d == 4 { 6 } else { 8 };
            let rule = sphere_rule(d, target).unwrap();
            assert!(rule.exact_degree() >= target);
            let degree = rule.exact_degree();
            for alpha in multi_indices(d + 1, degree) {
                let exact = monomial_integral(&alpha);
                let got = rule.integrate(|x| x.iter().zip(&alpha).map(|(c, &a)| c.powi(a as i32)).product());
                let tol = 1e-10 * exact.abs().max(1e-3);
                assert!((got - exact).abs() <= tol, "d={d} alpha={alpha:?}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn nodes_are_on_sphere_with_positive_weights() {
        let rule = sphere_rule(5, 3).unwrap();
        for (x, w) in rule.nodes() {
            let n: f64 = x.coords().iter().map(|c| c * c).sum();
            assert!((n - 1.0).abs() < 1e-13);
            assert!(w > 0.0);
        }
    }

    #[test]
    fn unsupported_dimension_and_budget() {
        assert_eq!(sphere_rule(6, 2), Err(Error::UnsupportedDimension(6)));
        assert_eq!(sphere_rule(1, 2), Err(Error::UnsupportedDimension(1)));
        assert!(matches!(
            SphereRule::build(5, 400, 2, 1_000_000),
            Err(Error::InfeasibleQuadrature { .. })
        ));
    }

    #[test]
    fn s2_nodes_are_ring_major() {
        let rule = sphere_rule(2, 6).unwrap();
        let na = rule.n_azimuth();
        let (x0, _) = rule.node(0);
        let (x1, _) = rule.node(1);
        let (xr, _) = rule.node(na);
        assert_eq!(x0.coords()[2], x1.coords()[2]);
        assert_ne!(x0.coords()[2], xr.coords()[2]);
        assert_eq!(x0.coords()[2], rule.levels()[0].nodes[0]);
    }
}
