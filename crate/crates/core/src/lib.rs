//! Invariant measures on Stiefel and Grassmann manifolds.
//!
//! The crate covers three layers:
//!
//! - [`matcore`] and [`specfun`]: the dense linear algebra and the gamma-family
//!   constants everything else is written in terms of.
//! - [`sampler`] and [`invariants`]: Haar sampling of frames and subspaces, the
//!   polar / bi-spherical / bi-Stiefel coordinate maps, and the reduction of a
//!   subspace to its canonical-angle spectrum relative to the coordinate
//!   subspace `R^l = span{e_{n-l+1}, .., e_n}`.
//! - [`quadrature`]: Gauss-Jacobi rules, integration over the ordered simplex
//!   `1 >= l_1 >= .. >= l_m >= 0` against the Jacobi/Vandermonde measure, Monte
//!   Carlo drivers, and the identity checks that tie the two together.
//!
//! Every Monte Carlo entry point takes an [`McPlan`] (seed + worker count) so
//! that results are reproducible bit-for-bit for a fixed plan.

pub mod error;
pub mod invariants;
pub mod matcore;
pub mod quadrature;
pub mod report;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
pub use invariants::{
    invariance_test, k_ell_action, lift, random_k_ell, spectral_coords, InvariantFn, KEllElement,
    Lifted, SpectralFn, SpectralPoint,
};
pub use matcore::{det, psd_sqrt, qr_decompose, sym_eig, DenseMatrix, SymEigen, SymMatrix};
pub use quadrature::mc::{McAccumulator, McEstimate, McPlan};
pub use quadrature::{
    density_report, gauss_jacobi_rule, gauss_laguerre_rule, mc_integrate_grassmann,
    simplex_integrate, verify_bistiefel, verify_theorem1, verify_theorem2, verify_zhang,
    Convention, DensityReport, JacobiWeight, QuadRule,
};
pub use report::{Params, VerifyReport};
pub use sampler::{
    bispherical_compose, bistiefel_compose, bistiefel_decompose, gaussian_matrix, haar_grassmann,
    haar_stiefel, polar_decompose, sample_matrix_beta, Frame, RngState, Subspace,
};
pub use specfun::{
    cm_constant, log_gamma, siegel_gamma, sphere_area, stiefel_volume, theorem1_constant,
    theorem2_constants, ThmConstants,
};

/// Crate version, echoed into every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
