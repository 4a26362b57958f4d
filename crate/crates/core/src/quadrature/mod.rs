//! Gauss rules, integration over the ordered simplex, Monte Carlo drivers and
//! the identity checks built from them.

mod density;
pub mod mc;
mod rules;
mod simplex;
mod verify;

pub use density::{density_report, DensityReport, HistBin};
pub use rules::{gauss_jacobi_rule, gauss_laguerre_rule, QuadRule};
pub use simplex::{simplex_integrate, Convention, JacobiWeight, MAX_QUADRATURE_M};
pub use verify::{
    mc_integrate_grassmann, verify_bistiefel, verify_theorem1, verify_theorem2, verify_zhang,
};
