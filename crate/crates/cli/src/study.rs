//! Study dispatch: configuration in, report out.

use std::f64::consts::PI;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use specprod_core::coupling::{best_bilinear_constant, BilinearOptions};
use specprod_core::experiments::{
    critical_exponent_fits, dyadic_constants, fit_exponent, ratio_grid, spread, trilinear_ratio_grid,
    windowed_band_experiment_with, ExperimentGrid, Family, GridOptions, RatioSample, WindowedOptions,
};
use specprod_core::quadrature::highest_weight_lp;
use specprod_core::rng::derive_seed;
use specprod_core::Error;

use crate::config::{ConfigError, ExperimentConfig, Pairing, Study};
use crate::report::{FitVariable, InvariantCheck, NamedFit, NamedValue, ReportDocument, RuntimeMetadata};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    /// The computation asked for more memory or degree than allowed.
    #[error("budget exceeded: {0}")]
    Budget(Error),
    /// A request the library rejected as malformed.
    #[error("invalid request: {0}")]
    Invalid(Error),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::InfeasibleQuadrature { .. } | Error::WindowBudget { .. } | Error::DegreeLimit { .. } => {
                RunError::Budget(e)
            }
            Error::Domain(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidIndex { .. }
            | Error::UnsupportedDimension(_)
            | Error::InvalidExponent(_)
            | Error::MultiDegreeInput(_)
            | Error::InvalidFamily(_) => RunError::Invalid(e),
            _ => RunError::Numerical(e),
        }
    }
}

impl RunError {
    /// Process exit status: 2 configuration or unusable paths, 3 numerical,
    /// 4 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Invalid(_) | RunError::Io { .. } => 2,
            RunError::Numerical(_) => 3,
            RunError::Budget(_) => 4,
        }
    }
}

/// Growth exponent of `Λ(d, ν)`, ignoring the logarithm at `d = 3`.
pub fn lambda_exponent(d: usize) -> f64 {
    match d {
        2 => 0.25,
        _ => (d as f64 - 2.0).max(1.0) / 2.0,
    }
}

#[derive(Default)]
struct Outcome {
    fits: Vec<NamedFit>,
    constants: Vec<NamedValue>,
    checks: Vec<InvariantCheck>,
}

impl Outcome {
    fn constant(&mut self, label: impl Into<String>, value: f64) {
        self.constants.push(NamedValue { label: label.into(), value });
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(InvariantCheck { name: name.into(), passed, detail });
    }

    /// Fits `ratio` against `variable` when at least three distinct abscissae exist.
    fn fit<'a>(
        &mut self,
        label: impl Into<String>,
        variable: FitVariable,
        samples: impl IntoIterator<Item = &'a RatioSample>,
        with_loglog: bool,
        expected: Option<f64>,
    ) -> Result<(), RunError> {
        let points: Vec<(f64, f64)> =
            samples.into_iter().filter_map(|s| Some((variable.of(s)?, s.ratio))).collect();
        self.fit_points(label, variable, &points, with_loglog, expected)
    }

    fn fit_points(
        &mut self,
        label: impl Into<String>,
        variable: FitVariable,
        points: &[(f64, f64)],
        with_loglog: bool,
        expected: Option<f64>,
    ) -> Result<(), RunError> {
        let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let needed = if with_loglog { 4 } else { 3 };
        if xs.len() < needed || (with_loglog && xs[0] <= 1.0) {
            return Ok(());
        }
        let fit = fit_exponent(points, with_loglog)?;
        self.fits.push(NamedFit { label: label.into(), variable, fit, expected });
        Ok(())
    }

    /// Empirical constants over `[P, 2P]` for `P = 16, 32, …` inside the grid.
    fn dyadic(&mut self, grid: &ExperimentGrid) {
        let top = grid.samples.iter().map(RatioSample::min_degree).max().unwrap_or(0);
        let starts: Vec<u32> = std::iter::successors(Some(16u32), |p| p.checked_mul(2)).take_while(|p| 2 * p <= top).collect();
        let ranges = dyadic_constants(grid, &starts);
        for r in &ranges {
            self.constant(format!("C_emp on min degree [{}, {}]", r.lo, r.hi), r.constant);
        }
        if ranges.len() >= 2 {
            self.constant("C_emp dyadic max/min", spread(ranges.iter().map(|r| r.constant)));
        }
    }
}

fn pairs(c: &ExperimentConfig) -> Vec<(u32, u32)> {
    c.degrees
        .expand()
        .into_iter()
        .map(|p| match c.pairing {
            Pairing::Diagonal => (p, p),
            Pairing::Fixed => (c.fixed_degree, p),
            Pairing::Scaled => (p, c.scale_factor * p),
        })
        .collect()
}

fn triples(c: &ExperimentConfig) -> Vec<(u32, u32, u32)> {
    let s = c.scale_factor;
    let k = c.fixed_degree;
    let degrees = c.degrees.expand();
    match c.pairing {
        Pairing::Diagonal => degrees.into_iter().map(|p| (p, p, p)).collect(),
        Pairing::Fixed => degrees.into_iter().map(|p| (p, k, k)).collect(),
        Pairing::Scaled => {
            let mut out: Vec<(u32, u32, u32)> = degrees.iter().map(|&n| (n, k, s * (n + k))).collect();
            out.extend(degrees.iter().filter(|&&m| m != k).map(|&m| (k, m, s * (k + m))));
            out
        }
    }
}

fn grid_options(c: &ExperimentConfig) -> GridOptions {
    GridOptions { seed: c.seed, margin: c.margin, node_budget: c.node_budget, draws: c.draws.max(1) }
}

/// Runs the configured study. Failed numerical invariants are reported in
/// [`ReportDocument::checks`]; errors are reserved for runs that cannot finish.
pub fn run_study(config: &ExperimentConfig) -> Result<ReportDocument, RunError> {
    config.validate()?;
    let clock = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
    let mut out = Outcome::default();
    let mut grid = match config.study {
        Study::BilinearSharpnessS2 => bilinear_sharpness(config, &mut out)?,
        Study::FrequencyDisappearance => frequency_disappearance(config, &mut out)?,
        Study::ZonalSharpness => zonal_sharpness(config, &mut out)?,
        Study::TrilinearS2 => trilinear(config, &mut out)?,
        Study::CriticalExponent => critical_exponent(config, &mut out)?,
        Study::WindowedProjector => windowed(config, &mut out)?,
        Study::BestConstant => best_constant(config, &mut out)?,
        Study::RatioGrid => generic(config, &mut out)?,
    };
    if let Some(c) = grid.empirical_constant() {
        out.constants.insert(0, NamedValue { label: "C_emp".into(), value: c });
    }
    let validation = grid.validate();
    out.checks.insert(
        0,
        InvariantCheck {
            name: "grid invariants".into(),
            passed: validation.is_ok(),
            detail: match validation {
                Ok(()) => format!("{} samples, ratios finite, bounds positive, rules exact", grid.samples.len()),
                Err(e) => e.to_string(),
            },
        },
    );
    grid.timestamp = started_unix;
    Ok(ReportDocument {
        config: config.clone(),
        grid,
        fits: out.fits,
        constants: out.constants,
        checks: out.checks,
        runtime: RuntimeMetadata {
            version: env!("CARGO_PKG_VERSION").into(),
            started_unix,
            elapsed_seconds: Some(clock.elapsed().as_secs_f64()),
        },
    })
}

fn bilinear_sharpness(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let hw = Family::HighestWeight;
    let grid = ratio_grid(2, hw, hw, &pairs(c), 2.0, &grid_options(c))?;
    out.fit("ratio vs n", FitVariable::MinDegree, &grid.samples, false, Some(lambda_exponent(2)))?;
    out.dyadic(&grid);
    Ok(grid)
}

fn frequency_disappearance(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let hw = Family::HighestWeight;
    let grid = ratio_grid(2, hw, hw, &pairs(c), 2.0, &grid_options(c))?;
    out.fit("ratio vs m", FitVariable::MaxDegree, &grid.samples, false, Some(0.0))?;
    let mut by_m: Vec<(u32, f64)> = grid.samples.iter().map(|s| (s.degrees[1], s.ratio)).collect();
    by_m.sort_by_key(|t| t.0);
    out.constant("max/min ratio", spread(by_m.iter().map(|t| t.1)));
    if c.pairing == Pairing::Fixed {
        let n = c.fixed_degree;
        // m → ∞ limit of ‖e_{n+m}‖ / (‖e_n‖ ‖e_m‖), exact and to leading order
        out.constant(format!("limit 1/‖e_{n}‖"), highest_weight_lp(2, n, 2.0)?.recip());
        out.constant("leading-order limit", (2.0 * PI.powf(1.5)).powf(-0.5) * f64::from(n).powf(0.25));
        let monotone = by_m.windows(2).all(|w| w[0].0 == w[1].0 || w[1].1 >= w[0].1);
        out.check("ratio nondecreasing in m", monotone, format!("{:?}", by_m.iter().map(|t| t.1).collect::<Vec<_>>()));
    }
    Ok(grid)
}

fn zonal_sharpness(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let z = Family::Zonal;
    let grid = ratio_grid(c.dimension, z, z, &pairs(c), 2.0, &grid_options(c))?;
    let expected = Some(lambda_exponent(c.dimension));
    out.fit("ratio vs p", FitVariable::MinDegree, &grid.samples, false, expected)?;
    if c.dimension == 3 {
        out.fit("ratio vs p with log log term", FitVariable::MinDegree, &grid.samples, true, expected)?;
    }
    out.dyadic(&grid);
    Ok(grid)
}

fn trilinear(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let grid = trilinear_ratio_grid(2, [Family::HighestWeight; 3], &triples(c), 2.0, &grid_options(c))?;
    out.fit("ratio vs n·m", FitVariable::TwoSmallestProduct, &grid.samples, false, Some(0.25))?;
    if c.pairing == Pairing::Scaled {
        let k = c.fixed_degree;
        let vary_n = grid.samples.iter().filter(|s| s.degrees[1] == k);
        out.fit("ratio vs n at fixed m", FitVariable::FirstDegree, vary_n, false, Some(0.25))?;
        let vary_m = grid.samples.iter().filter(|s| s.degrees[0] == k);
        out.fit("ratio vs m at fixed n", FitVariable::SecondDegree, vary_m, false, Some(0.25))?;
    }
    Ok(grid)
}

fn critical_exponent(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let hw = Family::HighestWeight;
    let mut grid = ExperimentGrid::new(Vec::new(), c.seed, c.margin);
    for r in &c.lebesgue {
        grid.merge(ratio_grid(2, hw, hw, &pairs(c), r.0, &grid_options(c))?);
    }
    let mut distinct: Vec<u32> = grid.samples.iter().map(|s| s.degrees[1]).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if c.pairing == Pairing::Fixed && distinct.len() >= 3 {
        for f in critical_exponent_fits(&grid)? {
            out.fits.push(NamedFit {
                label: format!("L^{} ratio vs m", crate::config::Exponent(f.lebesgue_r)),
                variable: FitVariable::MaxDegree,
                fit: f.fit,
                expected: Some(f.expected),
            });
        }
    }
    Ok(grid)
}

fn windowed(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let opts = WindowedOptions { margin: c.margin, node_budget: c.node_budget, ..Default::default() };
    let mut centers = c.centers.clone();
    centers.sort_by(f64::total_cmp);
    centers.dedup();
    let mut combos = Vec::new();
    for (i, &a) in centers.iter().enumerate() {
        for &b in &centers[i..] {
            if c.pairing != Pairing::Diagonal || a == b {
                combos.push((a, b));
            }
        }
    }
    let mut grid = ExperimentGrid::new(Vec::new(), c.seed, c.margin);
    for (i, &(a, b)) in combos.iter().enumerate() {
        grid.merge(windowed_band_experiment_with(a, b, c.draws, derive_seed(c.seed, &[i as u64]), &opts)?);
    }
    grid.seed = c.seed;
    let mut per_scale = Vec::new();
    for &scale in &centers {
        let constant = grid
            .samples
            .iter()
            .filter(|s| s.centers.as_ref().is_some_and(|cs| cs.iter().copied().fold(f64::INFINITY, f64::min) == scale))
            .map(RatioSample::constant)
            .reduce(f64::max);
        if let Some(v) = constant {
            out.constant(format!("C_emp at scale {scale}"), v);
            per_scale.push(v);
        }
    }
    if per_scale.len() >= 2 {
        out.constant("C_emp max/min across scales", spread(per_scale));
    }
    out.fit("ratio vs min degree", FitVariable::MinDegree, &grid.samples, false, None)?;
    Ok(grid)
}

fn best_constant(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let opts = BilinearOptions { starts: c.starts, tol: c.tol, max_iters: c.max_iters, seed: c.seed };
    let gopts = grid_options(c);
    let mut grid = ExperimentGrid::new(Vec::new(), c.seed, c.margin);
    let mut best_points = Vec::new();
    for (p, q) in pairs(c) {
        let mut sampled = ratio_grid(2, Family::Random, Family::Random, &[(p, q)], 2.0, &gopts)?;
        for fam in [Family::Zonal, Family::HighestWeight] {
            sampled.merge(ratio_grid(2, fam, fam, &[(p, q)], 2.0, &gopts)?);
        }
        let candidates = [Family::Zonal, Family::HighestWeight]
            .map(|fam| -> Result<_, RunError> {
                Ok((fam.spec(2, p, 0)?.coefficients()?, fam.spec(2, q, 0)?.coefficients()?))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let best = best_bilinear_constant(p, q, &opts, &candidates)?;
        let top = sampled.samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
        out.constant(format!("best constant ({p}, {q})"), best.value);
        out.check(
            &format!("best ({p}, {q}) dominates samples"),
            best.value >= top - 1e-12,
            format!("best {} vs max sampled {} over {} pairs; converged {}", best.value, top, sampled.samples.len(), best.converged),
        );
        best_points.push((f64::from(p.min(q)), best.value));
        grid.merge(sampled);
    }
    out.fit_points("best constant vs degree", FitVariable::Listed, &best_points, false, Some(0.25))?;
    Ok(grid)
}

fn generic(c: &ExperimentConfig, out: &mut Outcome) -> Result<ExperimentGrid, RunError> {
    let opts = grid_options(c);
    let mut grid = ExperimentGrid::new(Vec::new(), c.seed, c.margin);
    for r in &c.lebesgue {
        let g = match c.family_h {
            Some(h) => trilinear_ratio_grid(c.dimension, [c.family_f, c.family_g, h], &triples(c), r.0, &opts)?,
            None => ratio_grid(c.dimension, c.family_f, c.family_g, &pairs(c), r.0, &opts)?,
        };
        let variable = if c.family_h.is_some() { FitVariable::TwoSmallestProduct } else { FitVariable::MinDegree };
        out.fit(format!("L^{} ratio vs {}", r, variable.label()), variable, &g.samples, false, None)?;
        grid.merge(g);
    }
    out.dyadic(&grid);
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes() {
        let budget: RunError = Error::DegreeLimit { degree: 80, limit: 64 }.into();
        assert_eq!(budget.exit_code(), 4);
        let numeric: RunError = Error::InvariantViolation("x".into()).into();
        assert_eq!(numeric.exit_code(), 3);
        let invalid: RunError = Error::InvalidFamily("x".into()).into();
        assert_eq!(invalid.exit_code(), 2);
    }

    #[test]
    fn tuple_builders() {
        let mut c = ExperimentConfig::defaults(Study::TrilinearS2);
        c.degrees = crate::config::DegreeSpec::List(vec![8, 16]);
        assert_eq!(triples(&c), vec![(8, 16, 192), (16, 16, 256), (16, 8, 192)]);
        c.pairing = Pairing::Fixed;
        assert_eq!(triples(&c), vec![(8, 16, 16), (16, 16, 16)]);
        let mut c = ExperimentConfig::defaults(Study::BilinearSharpnessS2);
        c.degrees = crate::config::DegreeSpec::List(vec![2, 3]);
        assert_eq!(pairs(&c), vec![(2, 16), (3, 24)]);
    }

    #[test]
    fn lambda_exponents() {
        assert_eq!(lambda_exponent(2), 0.25);
        assert_eq!(lambda_exponent(3), 0.5);
        assert_eq!(lambda_exponent(4), 1.0);
        assert_eq!(lambda_exponent(5), 1.5);
    }
}
