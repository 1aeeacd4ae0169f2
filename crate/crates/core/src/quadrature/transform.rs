//! Synthesis and analysis between `Y_l^m` coefficients and the nodes of an
//! `S^2` product rule: associated Legendre sums per ring, FFT in azimuth.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::sphere::SphereRule;
use crate::error::{Error, Result};
use crate::harmonics::{legendre_column, CoefficientVector};
use crate::sum::NeumaierSum;

/// Transform restricted to a fixed set of degrees.
pub struct S2Transform {
    rule: SphereRule,
    degrees: Vec<u32>,
    max_degree: u32,
    /// Start of degree `degrees[i]` inside each ring's block of `P̄_l^m`.
    offsets: Vec<usize>,
    block_len: usize,
    /// Ring-major table: `table[j * block_len + offsets[i] + m]`.
    table: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for S2Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("S2Transform")
            .field("degrees", &self.degrees)
            .field("rings", &self.n_rings())
            .field("n_azimuth", &self.rule.n_azimuth())
            .finish()
    }
}

impl S2Transform {
    /// `degrees` lists the harmonic degrees that will be synthesised or
    /// projected onto. The rule's azimuth count must resolve orders up to the
    /// largest of them.
    pub fn new(rule: SphereRule, degrees: &[u32]) -> Result<Self> {
        if rule.dimension() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: rule.dimension() });
        }
        let mut degrees = degrees.to_vec();
        degrees.sort_unstable();
        degrees.dedup();
        let max_degree = degrees.last().copied().unwrap_or(0);
        if rule.n_azimuth() <= 2 * max_degree as usize {
            return Err(Error::InfeasibleQuadrature {
                what: format!("azimuthal resolution for degree {max_degree}"),
                nodes: rule.n_azimuth(),
                budget: 2 * max_degree as usize + 1,
            });
        }
        let mut offsets = Vec::with_capacity(degrees.len());
        let mut block_len = 0;
        for &l in &degrees {
            offsets.push(block_len);
            block_len += l as usize + 1;
        }
        let polar = &rule.levels()[0];
        let rings: Vec<Vec<f64>> = polar
            .nodes
            .par_iter()
            .map(|&t| {
                let mut block = vec![0.0; block_len];
                for m in 0..=max_degree {
                    let column = legendre_column(max_degree, m, t);
                    for (i, &l) in degrees.iter().enumerate() {
                        if l >= m {
                            block[offsets[i] + m as usize] = column[(l - m) as usize];
                        }
                    }
                }
                block
            })
            .collect();
        let table = rings.concat();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(rule.n_azimuth());
        let inverse = planner.plan_fft_inverse(rule.n_azimuth());
        Ok(Self { rule, degrees, max_degree, offsets, block_len, table, forward, inverse })
    }

    pub fn rule(&self) -> &SphereRule {
        &self.rule
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n_rings(&self) -> usize {
        self.rule.levels()[0].len()
    }

    pub fn grid_len(&self) -> usize {
        self.n_rings() * self.rule.n_azimuth()
    }

    fn legendre(&self, ring: usize, degree_index: usize, m: u32) -> f64 {
        self.table[ring * self.block_len + self.offsets[degree_index] + m as usize]
    }

    /// Values of `Σ c_{l,m} Y_l^m` at every node, ring-major.
    pub fn synthesize(&self, f: &CoefficientVector) -> Result<Vec<Complex64>> {
        let support = f.support();
        let mut used = Vec::with_capacity(support.len());
        for l in support {
            match self.degrees.binary_search(&l) {
                Ok(i) => used.push((i, l)),
                Err(_) => {
                    return Err(Error::Domain(format!("degree {l} is not covered by this transform")));
                }
            }
        }
        let na = self.rule.n_azimuth();
        let mut grid = vec![Complex64::new(0.0, 0.0); self.grid_len()];
        grid.par_chunks_mut(na).enumerate().for_each(|(j, ring)| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
            for &(i, l) in &used {
                let block = f.block(l);
                let center = l as usize;
                ring[0] += block[center] * self.legendre(j, i, 0);
                for m in 1..=l {
                    let p = self.legendre(j, i, m);
                    let sign = if m % 2 == 0 { p } else { -p };
                    ring[m as usize] += block[center + m as usize] * p;
                    ring[na - m as usize] += block[center - m as usize] * sign;
                }
            }
            self.inverse.process_with_scratch(ring, &mut scratch);
        });
        Ok(grid)
    }

    /// Projection of grid values onto the transform's degrees:
    /// `c_{l,m} = Σ_nodes w h conj(Y_l^m)`.
    pub fn analyze(&self, grid: &[Complex64]) -> CoefficientVector {
        assert_eq!(grid.len(), self.grid_len(), "grid size does not match the rule");
        let na = self.rule.n_azimuth();
        let polar = &self.rule.levels()[0];
        let phi_weight = 2.0 * std::f64::consts::PI / na as f64;
        let per_ring: Vec<Vec<Complex64>> = grid
            .par_chunks(na)
            .enumerate()
            .map(|(j, ring)| {
                let mut spectrum = ring.to_vec();
                let mut scratch = vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
                self.forward.process_with_scratch(&mut spectrum, &mut scratch);
                let w = polar.weights[j] * phi_weight;
                let mut out = Vec::with_capacity(self.degrees.iter().map(|&l| 2 * l as usize + 1).sum());
                for (i, &l) in self.degrees.iter().enumerate() {
                    for m in -(l as i32)..=l as i32 {
                        let am = m.unsigned_abs();
                        let p = self.legendre(j, i, am);
                        let p = if m < 0 && am % 2 == 1 { -p } else { p };
                        out.push(spectrum[m.rem_euclid(na as i32) as usize] * (w * p));
                    }
                }
                out
            })
            .collect();
        let mut result = CoefficientVector::zeros(self.max_degree);
        let mut cursor = 0;
        for &l in &self.degrees {
            let block = result.block_mut(l);
            for (k, slot) in block.iter_mut().enumerate() {
                *slot = per_ring.iter().map(|r| r[cursor + k]).sum();
            }
            cursor += 2 * l as usize + 1;
        }
        result
    }

    /// `Σ_nodes w v` for real grid values, compensated, in node order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.grid_len(), "grid size does not match the rule");
        let na = self.rule.n_azimuth();
        let polar = &self.rule.levels()[0];
        let phi_weight = 2.0 * std::f64::consts::PI / na as f64;
        let mut acc = NeumaierSum::new();
        for (j, ring) in values.chunks(na).enumerate() {
            let w = polar.weights[j] * phi_weight;
            for v in ring {
                acc.add(w * v);
            }
        }
        acc.total()
    }
}
