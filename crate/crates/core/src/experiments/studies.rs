//! Headline studies built on the ratio grids.

use serde::{Deserialize, Serialize};

use super::bounds::lambda_bound;
use super::fit::{fit_exponent, FitResult};
use super::grid::{ratio_grid, ExperimentGrid, Family, GridOptions, Method, RatioSample};
use crate::error::{Error, Result};
use crate::harmonics::{random_band_s2, windowed_projector, CoefficientVector, HarmonicSpec, SpectralWindow};
use crate::quadrature::{S2Transform, SphereRule, DEFAULT_MARGIN, DEFAULT_NODE_BUDGET};
use crate::rng::derive_seed;

/// Highest-weight pairs `(n_fixed, m)` on `S^2` for every `m` and every
/// Lebesgue exponent `r ≥ 2`.
pub fn critical_p_scan(n_fixed: u32, m_values: &[u32], r_values: &[f64]) -> Result<ExperimentGrid> {
    let opts = GridOptions::default();
    let pairs: Vec<(u32, u32)> = m_values.iter().map(|&m| (n_fixed, m)).collect();
    let mut grid = ExperimentGrid::new(Vec::new(), opts.seed, opts.margin);
    for &r in r_values {
        if r.is_nan() || r < 2.0 {
            return Err(Error::InvalidExponent(r));
        }
        grid.merge(ratio_grid(2, Family::HighestWeight, Family::HighestWeight, &pairs, r, &opts)?);
    }
    Ok(grid)
}

/// Growth of the ratio in the larger degree at one Lebesgue exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    #[serde(with = "crate::experiments::grid::lebesgue_serde")]
    pub lebesgue_r: f64,
    pub fit: FitResult,
    /// `1/4 - 1/(2r)`.
    pub expected: f64,
}

/// Fits `ratio ∝ m^α` separately for each exponent present in a
/// [`critical_p_scan`] grid.
pub fn critical_exponent_fits(grid: &ExperimentGrid) -> Result<Vec<ExponentFit>> {
    let mut rs: Vec<f64> = grid.samples.iter().map(|s| s.lebesgue_r).collect();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    rs.into_iter()
        .map(|r| {
            let points: Vec<(f64, f64)> = grid
                .samples
                .iter()
                .filter(|s| s.lebesgue_r == r)
                .map(|s| (f64::from(*s.degrees.iter().max().unwrap_or(&0)), s.ratio))
                .collect();
            Ok(ExponentFit { lebesgue_r: r, fit: fit_exponent(&points, false)?, expected: 0.25 - 0.5 / r })
        })
        .collect()
}

/// Fits `ratio ∝ ν^α` with `ν` the smallest degree of each sample.
pub fn fit_min_degree(samples: &[RatioSample], with_loglog: bool) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (f64::from(s.min_degree()), s.ratio)).collect();
    fit_exponent(&points, with_loglog)
}

/// Empirical constant `max ratio / bound` over one range of smallest degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangeConstant {
    pub lo: u32,
    pub hi: u32,
    pub constant: f64,
    pub samples: usize,
}

/// `max ratio / bound` over samples with smallest degree in `[P, 2P]`, for
/// each `P` in `starts`. Ranges without samples are skipped.
pub fn dyadic_constants(grid: &ExperimentGrid, starts: &[u32]) -> Vec<RangeConstant> {
    starts
        .iter()
        .filter_map(|&lo| {
            let hi = 2 * lo;
            let inside: Vec<&RatioSample> =
                grid.samples.iter().filter(|s| (lo..=hi).contains(&s.min_degree())).collect();
            let constant = inside.iter().map(|s| s.constant()).reduce(f64::max)?;
            Some(RangeConstant { lo, hi, constant, samples: inside.len() })
        })
        .collect()
}

/// `max / min` of a list of positive constants.
pub fn spread(values: impl IntoIterator<Item = f64>) -> f64 {
    let (lo, hi) = values.into_iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi / lo
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowedOptions {
    /// Degrees whose frequency is within this many window widths of the
    /// center carry random coefficients.
    pub widths: f64,
    /// Largest admissible degree in a window.
    pub max_degree: u32,
    /// Also measure the zonal and highest-weight eigenspace pairs at the
    /// degrees nearest the centers.
    pub structured: bool,
    pub margin: u32,
    pub node_budget: usize,
}

impl Default for WindowedOptions {
    fn default() -> Self {
        Self { widths: 3.0, max_degree: 512, structured: true, margin: DEFAULT_MARGIN, node_budget: DEFAULT_NODE_BUDGET }
    }
}

/// Evaluates `‖(χ_λ f)(χ_μ g)‖_2` with both windowed factors normalised.
pub struct WindowedProduct {
    windows: (SpectralWindow, SpectralWindow),
    transform: S2Transform,
}

impl WindowedProduct {
    /// Prepares a transform resolving products of functions supported on
    /// `degrees_f` and `degrees_g`.
    pub fn new(
        windows: (SpectralWindow, SpectralWindow),
        degrees_f: &[u32],
        degrees_g: &[u32],
        margin: u32,
        node_budget: usize,
    ) -> Result<Self> {
        let top = |ds: &[u32]| ds.iter().copied().max().unwrap_or(0);
        let rule = SphereRule::build(2, 2 * (top(degrees_f) + top(degrees_g)), margin, node_budget)?;
        let mut degrees = degrees_f.to_vec();
        degrees.extend_from_slice(degrees_g);
        Ok(Self { windows, transform: S2Transform::new(rule, &degrees)? })
    }

    pub fn exactness(&self) -> u32 {
        self.transform.rule().exact_degree()
    }

    pub fn ratio(&self, f: &CoefficientVector, g: &CoefficientVector) -> Result<f64> {
        let wf = windowed_projector(&self.windows.0, f);
        let wg = windowed_projector(&self.windows.1, g);
        if wf.norm() == 0.0 || wg.norm() == 0.0 {
            return Err(Error::Domain("window annihilates the input".into()));
        }
        let vf = self.transform.synthesize(&wf.normalized())?;
        let vg = self.transform.synthesize(&wg.normalized())?;
        let values: Vec<f64> = vf.iter().zip(&vg).map(|(a, b)| (a * b).norm_sqr()).collect();
        Ok(self.transform.integrate(&values).sqrt())
    }
}

fn window_degrees(window: &SpectralWindow, opts: &WindowedOptions) -> Result<Vec<u32>> {
    let degrees = window.degrees_within(opts.widths);
    let top = degrees.iter().copied().max().unwrap_or(0);
    if top > opts.max_degree {
        return Err(Error::WindowBudget { center: window.center(), degree: top, budget: opts.max_degree });
    }
    Ok(degrees)
}

/// Random windowed products on `S^2` with default options.
pub fn windowed_band_experiment(lambda: f64, mu: f64, n_draws: u32, seed: u64) -> Result<ExperimentGrid> {
    windowed_band_experiment_with(lambda, mu, n_draws, seed, &WindowedOptions::default())
}

/// `n_draws` pairs of random functions over the degrees near `λ` and `μ`,
/// windowed, normalised and multiplied; `bound = Λ(2, min(λ, μ))`. Every
/// sample records the degrees nearest the two centers.
///
/// Draw `i` uses seeds `derive_seed(seed, [i, 0])` and `derive_seed(seed, [i, 1])`.
pub fn windowed_band_experiment_with(
    lambda: f64,
    mu: f64,
    n_draws: u32,
    seed: u64,
    opts: &WindowedOptions,
) -> Result<ExperimentGrid> {
    let wf = SpectralWindow::new(lambda)?;
    let wg = SpectralWindow::new(mu)?;
    let degrees_f = window_degrees(&wf, opts)?;
    let degrees_g = window_degrees(&wg, opts)?;
    let (pf, pg) = (wf.nearest_degree(), wg.nearest_degree());
    let mut all_f = degrees_f.clone();
    let mut all_g = degrees_g.clone();
    all_f.push(pf);
    all_g.push(pg);
    let product = WindowedProduct::new((wf, wg), &all_f, &all_g, opts.margin, opts.node_budget)?;
    let bound = lambda_bound(2, lambda.min(mu))?;
    let sample = |families: Vec<Family>, degrees: Vec<u32>, ratio: f64, draw: Option<u32>| RatioSample {
        d: 2,
        families,
        degrees,
        lebesgue_r: 2.0,
        ratio,
        bound,
        integrand_degree: None,
        exactness: Some(product.exactness()),
        method: Method::S2Transform,
        centers: Some(vec![lambda, mu]),
        draw,
    };

    let mut samples = Vec::with_capacity(n_draws as usize + 2);
    for i in 0..n_draws {
        let f = random_band_s2(&degrees_f, derive_seed(seed, &[u64::from(i), 0]));
        let g = random_band_s2(&degrees_g, derive_seed(seed, &[u64::from(i), 1]));
        let ratio = product.ratio(&f, &g)?;
        samples.push(sample(vec![Family::Band, Family::Band], vec![pf, pg], ratio, Some(i)));
    }
    if opts.structured {
        let pairs = [
            (Family::Zonal, HarmonicSpec::zonal(2, pf), HarmonicSpec::zonal(2, pg)),
            (Family::HighestWeight, HarmonicSpec::highest_weight(2, pf), HarmonicSpec::highest_weight(2, pg)),
        ];
        for (family, f, g) in pairs {
            let ratio = product.ratio(&f.coefficients()?, &g.coefficients()?)?;
            samples.push(sample(vec![family, family], vec![pf, pg], ratio, None));
        }
    }
    Ok(ExperimentGrid::new(samples, seed, opts.margin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_scan_shape() {
        let grid = critical_p_scan(2, &[32, 64, 128, 256], &[2.0, 4.0]).unwrap();
        assert_eq!(grid.samples.len(), 8);
        let fits = critical_exponent_fits(&grid).unwrap();
        assert_eq!(fits.len(), 2);
        assert_eq!(fits[0].expected, 0.0);
        assert_eq!(fits[1].expected, 0.125);
        assert!(critical_p_scan(2, &[4], &[1.5]).is_err());
    }

    #[test]
    fn l2_ratio_increases_with_m() {
        let grid = critical_p_scan(2, &[32, 64, 128, 256], &[2.0]).unwrap();
        let ratios: Vec<f64> = grid.samples.iter().map(|s| s.ratio).collect();
        assert!(ratios.windows(2).all(|w| w[1] > w[0]), "{ratios:?}");
    }

    #[test]
    fn dyadic_ranges() {
        let pairs: Vec<(u32, u32)> = [16, 24, 32, 48, 64].iter().map(|&p| (p, p)).collect();
        let grid = ratio_grid(2, Family::HighestWeight, Family::HighestWeight, &pairs, 2.0, &GridOptions::default())
            .unwrap();
        let c = dyadic_constants(&grid, &[16, 32, 128]);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].samples, 3);
        assert_eq!(c[1].samples, 3);
        assert!(spread(c.iter().map(|r| r.constant)) >= 1.0);
    }

    #[test]
    fn window_budget_enforced() {
        let opts = WindowedOptions { max_degree: 20, ..Default::default() };
        assert!(matches!(
            windowed_band_experiment_with(32.0, 8.0, 2, 0, &opts),
            Err(Error::WindowBudget { .. })
        ));
    }

    #[test]
    fn windowed_eigenspace_reduces_to_ratio_grid() {
        let (p, q) = (7, 10);
        let windows = (SpectralWindow::new(6.3).unwrap(), SpectralWindow::new(11.0).unwrap());
        let product = WindowedProduct::new(windows, &[p], &[q], DEFAULT_MARGIN, DEFAULT_NODE_BUDGET).unwrap();
        for family in [Family::Zonal, Family::HighestWeight] {
            let f = family.spec(2, p, 0).unwrap().coefficients().unwrap();
            let g = family.spec(2, q, 0).unwrap().coefficients().unwrap();
            let windowed = product.ratio(&f, &g).unwrap();
            let direct = ratio_grid(2, family, family, &[(p, q)], 2.0, &GridOptions::default()).unwrap();
            assert!((windowed - direct.samples[0].ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn windowed_small_run() {
        let a = windowed_band_experiment(8.0, 12.0, 4, 3).unwrap();
        let b = windowed_band_experiment(8.0, 12.0, 4, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples.len(), 6);
        a.validate().unwrap();
        assert!(a.samples.iter().all(|s| s.ratio.is_finite() && s.ratio >= 0.0));
    }
}
