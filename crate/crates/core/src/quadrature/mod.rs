//! Quadrature on `[-1, 1]` and `S^d`, and `L^r` norms built on it.

mod line;
mod norms;
mod sphere;
mod transform;

pub use line::{gauss_legendre, gauss_polar, LineRule};
pub use norms::{
    empirical_sup_rule, highest_weight_lp, lp_norm, zonal_line_norm, zonal_line_norm_with_margin,
    SUP_OVERSAMPLING,
};
pub use sphere::{sphere_rule, sphere_rule_size, SphereRule, DEFAULT_MARGIN, DEFAULT_NODE_BUDGET};
pub use transform::S2Transform;
