//! Ratio experiments: measured product norms against the growth factors
//! `Λ(d, ν)` and the trilinear factor, with power-law fits.

mod bounds;
mod fit;
mod grid;
mod studies;

pub use bounds::{lambda_bound, trilinear_bound};
pub use fit::{fit_exponent, FitResult};
pub use grid::{
    product_norm_on_rule, ratio_grid, trilinear_ratio_grid, ExperimentGrid, Family, GridOptions, Method, RatioSample,
};
pub use studies::{
    critical_exponent_fits, critical_p_scan, dyadic_constants, fit_min_degree, spread, windowed_band_experiment,
    windowed_band_experiment_with, ExponentFit, RangeConstant, WindowedOptions, WindowedProduct,
};
