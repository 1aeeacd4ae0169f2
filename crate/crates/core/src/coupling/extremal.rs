//! Extremal bilinear constant `sup ‖f g‖_2` over unit `f ∈ H_p`, `g ∈ H_q`
//! on `S^2`, by alternating maximisation with multistart.
//!
//! With `g` fixed, `f ↦ f g` is linear and its top singular vector is the top
//! eigenvector of the normal operator `f ↦ P_p(|g|^2 f)`, found by power
//! iteration started from the current `f`. Power steps on a positive
//! semidefinite operator never decrease the Rayleigh quotient `‖f g‖^2`, so
//! each run is monotone and finishes at or above its starting pair.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{random_harmonic_s2, CoefficientVector};
use crate::quadrature::{sphere_rule, S2Transform};
use crate::rng::derive_seed;

/// Largest degree accepted by [`best_bilinear_constant`].
pub const MAX_EXTREMAL_DEGREE: u32 = 64;

const INNER_MAX_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilinearOptions {
    pub starts: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for BilinearOptions {
    fn default() -> Self {
        Self { starts: 8, tol: 1e-10, max_iters: 500, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct BestConstant {
    pub value: f64,
    pub maximizers: (CoefficientVector, CoefficientVector),
    /// False when some run exhausted `max_iters` before meeting `tol`; the
    /// value is still the best found.
    pub converged: bool,
    /// Value after each alternation of the run that produced `value`.
    pub trace: Vec<f64>,
    /// Final value of every run: random starts first, then candidates.
    pub run_values: Vec<f64>,
}

struct ProductOperator {
    transform: S2Transform,
    p: u32,
    q: u32,
}

impl ProductOperator {
    fn new(p: u32, q: u32) -> Result<Self> {
        let rule = sphere_rule(2, 2 * (p + q))?;
        Ok(Self { transform: S2Transform::new(rule, &[p, q])?, p, q })
    }

    fn grid(&self, f: &CoefficientVector) -> Vec<Complex64> {
        self.transform.synthesize(f).expect("degrees covered by construction")
    }

    fn value_sq(&self, fv: &[Complex64], gv: &[Complex64]) -> f64 {
        let sq: Vec<f64> = fv.iter().zip(gv).map(|(a, b)| (a * b).norm_sqr()).collect();
        self.transform.integrate(&sq)
    }

    /// Power iteration for the top eigenvector of `x ↦ P_degree(weight · x)`.
    /// Returns the new unit vector, its grid and the Rayleigh quotient.
    fn top_vector(
        &self,
        degree: u32,
        weight: &[f64],
        start: &CoefficientVector,
        tol: f64,
    ) -> (CoefficientVector, Vec<Complex64>, f64) {
        let mut x = start.clone();
        let mut xv = self.grid(&x);
        let mut rayleigh = rayleigh_quotient(&self.transform, weight, &xv);
        for _ in 0..INNER_MAX_ITERS {
            let applied: Vec<Complex64> = xv.iter().zip(weight).map(|(v, w)| v * w).collect();
            let image = restrict(&self.transform.analyze(&applied), degree);
            let norm = image.norm();
            if norm == 0.0 {
                break;
            }
            let next = image.scaled(Complex64::new(norm.recip(), 0.0));
            let next_v = self.grid(&next);
            let next_rayleigh = rayleigh_quotient(&self.transform, weight, &next_v);
            if next_rayleigh < rayleigh {
                // rounding-level decrease: keep the better vector
                break;
            }
            let done = next_rayleigh - rayleigh <= tol * next_rayleigh;
            x = next;
            xv = next_v;
            rayleigh = next_rayleigh;
            if done {
                break;
            }
        }
        (x, xv, rayleigh)
    }

    fn run(&self, f0: &CoefficientVector, g0: &CoefficientVector, opts: &BilinearOptions) -> Run {
        let mut f = restrict(f0, self.p).normalized();
        let mut g = restrict(g0, self.q).normalized();
        let mut gv = self.grid(&g);
        let mut value = self.value_sq(&self.grid(&f), &gv).sqrt();
        let mut trace = vec![value];
        let mut converged = false;
        for _ in 0..opts.max_iters {
            let g_weight: Vec<f64> = gv.iter().map(Complex64::norm_sqr).collect();
            let (nf, nfv, _) = self.top_vector(self.p, &g_weight, &f, opts.tol);
            let f_weight: Vec<f64> = nfv.iter().map(Complex64::norm_sqr).collect();
            let (ng, ngv, rq) = self.top_vector(self.q, &f_weight, &g, opts.tol);
            let next = rq.max(0.0).sqrt();
            if next < value {
                break;
            }
            let step = next - value;
            f = nf;
            g = ng;
            gv = ngv;
            value = next;
            trace.push(value);
            if step <= opts.tol * value {
                converged = true;
                break;
            }
        }
        if trace.len() > 1 && !converged && trace.len() <= opts.max_iters {
            // stopped on a rounding-level decrease: already at the fixed point
            converged = true;
        }
        Run { value, f, g, trace, converged }
    }
}

struct Run {
    value: f64,
    f: CoefficientVector,
    g: CoefficientVector,
    trace: Vec<f64>,
    converged: bool,
}

fn rayleigh_quotient(transform: &S2Transform, weight: &[f64], xv: &[Complex64]) -> f64 {
    let values: Vec<f64> = xv.iter().zip(weight).map(|(v, w)| v.norm_sqr() * w).collect();
    transform.integrate(&values)
}

/// Degree-`l` block of `v` as its own vector.
fn restrict(v: &CoefficientVector, l: u32) -> CoefficientVector {
    if l > v.max_degree() {
        return CoefficientVector::zeros(l);
    }
    CoefficientVector::from_block(l, v.block(l)).expect("block length matches degree")
}

/// Approximate `sup ‖f g‖_2` over unit `f ∈ H_p`, `g ∈ H_q`.
///
/// Runs `opts.starts` random starts plus one run from each candidate pair.
/// The reported value is at least `‖f g‖_2 / (‖f‖‖g‖)` for every candidate.
pub fn best_bilinear_constant(
    p: u32,
    q: u32,
    opts: &BilinearOptions,
    candidates: &[(CoefficientVector, CoefficientVector)],
) -> Result<BestConstant> {
    for degree in [p, q] {
        if degree > MAX_EXTREMAL_DEGREE {
            return Err(Error::DegreeLimit { degree, limit: MAX_EXTREMAL_DEGREE });
        }
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {} must be positive", opts.tol)));
    }
    for (f, g) in candidates {
        if f.single_degree()? != p || g.single_degree()? != q {
            return Err(Error::Domain(format!("candidate pair is not in H_{p} × H_{q}")));
        }
    }
    let op = ProductOperator::new(p, q)?;
    let mut starts: Vec<(CoefficientVector, CoefficientVector)> = (0..opts.starts as u64)
        .map(|i| {
            (
                random_harmonic_s2(p, derive_seed(opts.seed, &[i, 0])),
                random_harmonic_s2(q, derive_seed(opts.seed, &[i, 1])),
            )
        })
        .collect();
    starts.extend(candidates.iter().cloned());
    if starts.is_empty() {
        return Err(Error::Domain("no starts and no candidates".into()));
    }
    let runs: Vec<Run> = starts.par_iter().map(|(f, g)| op.run(f, g, opts)).collect();
    let converged = runs.iter().all(|r| r.converged);
    let run_values: Vec<f64> = runs.iter().map(|r| r.value).collect();
    // first run attaining the maximum, so ties resolve by start order
    let best = runs
        .into_iter()
        .reduce(|best, r| if r.value > best.value { r } else { best })
        .expect("at least one run");
    Ok(BestConstant {
        value: best.value,
        maximizers: (best.f, best.g),
        converged,
        trace: best.trace,
        run_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::product_expand;
    use crate::harmonics::HarmonicSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn constants_only() {
        let r = best_bilinear_constant(0, 0, &BilinearOptions::default(), &[]).unwrap();
        assert_relative_eq!(r.value, (4.0 * PI).sqrt().recip(), max_relative = 1e-12);
        assert_eq!(r.maximizers.0.single_degree().unwrap(), 0);
        let r = best_bilinear_constant(0, 5, &BilinearOptions { starts: 3, ..Default::default() }, &[]).unwrap();
        assert_relative_eq!(r.value, (4.0 * PI).sqrt().recip(), max_relative = 1e-10);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            best_bilinear_constant(65, 2, &BilinearOptions::default(), &[]),
            Err(Error::DegreeLimit { .. })
        ));
        let bad = (random_harmonic_s2(3, 0), random_harmonic_s2(4, 0));
        assert!(best_bilinear_constant(3, 3, &BilinearOptions::default(), &[bad]).is_err());
    }

    #[test]
    fn monotone_trace_and_dominates_candidates() {
        let p = 6;
        let hw = HarmonicSpec::highest_weight(2, p).coefficients().unwrap();
        let zonal = HarmonicSpec::zonal(2, p).coefficients().unwrap();
        let opts = BilinearOptions { starts: 4, ..Default::default() };
        let r = best_bilinear_constant(p, p, &opts, &[(zonal.clone(), zonal.clone())]).unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1] >= w[0]);
        }
        let zz = product_expand(&zonal, &zonal).unwrap().l2_norm();
        let hh = product_expand(&hw, &hw).unwrap().l2_norm();
        assert!(r.value >= zz);
        assert!(r.value >= hh * (1.0 - 1e-9), "{} vs highest weight {}", r.value, hh);
    }

    #[test]
    fn more_starts_never_lower() {
        let mut last = 0.0;
        for starts in [1usize, 2, 4] {
            let opts = BilinearOptions { starts, max_iters: 50, ..Default::default() };
            let v = best_bilinear_constant(4, 3, &opts, &[]).unwrap().value;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn iteration_budget_is_flagged() {
        let opts = BilinearOptions { starts: 1, max_iters: 1, tol: 1e-15, seed: 3 };
        let r = best_bilinear_constant(5, 5, &opts, &[]).unwrap();
        assert!(!r.converged);
        assert!(r.value > 0.0);
    }
}
