//! Exact product algebra on `S^2`.

mod extremal;
mod gaunt;
mod primes;
mod product;
mod wigner;

pub use extremal::{best_bilinear_constant, BestConstant, BilinearOptions, MAX_EXTREMAL_DEGREE};
pub use gaunt::gaunt_coeff;
pub use primes::{ratio_to_f64, PrimePower};
pub use product::{product_expand, ProductExpansion};
pub use wigner::{
    wigner_3j, wigner_3j_exact, wigner_3j_recurrence, wigner_3j_row, TripleIndex, EXACT_MAX_DEGREE,
};
