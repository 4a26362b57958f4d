//! Polar, bi-spherical and bi-Stiefel coordinates, plus the Wishart-ratio
//! construction of the matrix Beta law.

use std::f64::consts::FRAC_PI_2;

use super::{gaussian_matrix, Frame, RngState};
use crate::error::{Error, Result};
use crate::matcore::{check_psd, qr_decompose, sym_eig, DenseMatrix, SymMatrix, PSD_TOL};

const UNIT_TOL: f64 = 1e-9;

/// `x = v · r^{1/2}` with `r = xᵗx` and `v = x · r^{-1/2}`.
pub fn polar_decompose(x: &DenseMatrix) -> Result<(Frame, SymMatrix)> {
    // rank check; the QR factors themselves are not needed
    qr_decompose(x)?;
    let r = x.gram();
    let eig = sym_eig(&r)?;
    if let Some(&smallest) = eig.values.last() {
        if smallest <= 0.0 {
            return Err(Error::RankDeficient {
                pivot: smallest,
                threshold: 0.0,
            });
        }
    }
    let inv_sqrt = eig.reassemble(|l| 1.0 / l.sqrt());
    let v = x.matmul(inv_sqrt.as_dense());
    Ok((Frame::from_trusted(v), r))
}

/// `θ = [u sin ω; w cos ω]` on `S^{n-1}` for `u ∈ S^{n-l-1}`, `w ∈ S^{l-1}`.
pub fn bispherical_compose(u: &[f64], w: &[f64], omega: f64) -> Result<Vec<f64>> {
    if !(0.0..=FRAC_PI_2).contains(&omega) {
        return Err(Error::Domain(format!("omega = {omega} outside [0, π/2]")));
    }
    for (name, vec) in [("u", u), ("w", w)] {
        let norm = vec.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vec.is_empty() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!(
                "{name} is not a unit vector (norm {norm})"
            )));
        }
    }
    let (s, c) = omega.sin_cos();
    Ok(u.iter()
        .map(|x| x * s)
        .chain(w.iter().map(|x| x * c))
        .collect())
}

/// `v = [u1 r^{1/2}; u2 (I - r)^{1/2}]` with `0 <= r <= I`.
pub fn bistiefel_compose(u1: &Frame, u2: &Frame, r: &SymMatrix) -> Result<Frame> {
    let m = r.dim();
    if u1.m() != m || u2.m() != m {
        return Err(Error::DimensionMismatch(format!(
            "frames have {} and {} columns, r is {m}x{m}",
            u1.m(),
            u2.m()
        )));
    }
    let eig = sym_eig(r)?;
    for &l in &eig.values {
        if !(-PSD_TOL..=1.0 + PSD_TOL).contains(&l) {
            return Err(Error::SpectrumOutOfRange { eigenvalue: l });
        }
    }
    let top_factor = eig.reassemble(|l| l.clamp(0.0, 1.0).sqrt());
    let bottom_factor = eig.reassemble(|l| (1.0 - l.clamp(0.0, 1.0)).sqrt());
    let top = u1.matrix().matmul(top_factor.as_dense());
    let bottom = u2.matrix().matmul(bottom_factor.as_dense());
    Frame::new(DenseMatrix::vstack(&top, &bottom))
}

/// Inverse of [`bistiefel_compose`] with the bottom block of `k` rows.
pub fn bistiefel_decompose(v: &Frame, k: usize) -> Result<(Frame, Frame, SymMatrix)> {
    let (n, m) = (v.n(), v.m());
    if k == 0 || k >= n || m > k.min(n - k) {
        return Err(Error::Domain(format!(
            "bi-Stiefel split needs m <= min(k, n - k), got n={n}, m={m}, k={k}"
        )));
    }
    let top = v.matrix().row_block(0, n - k);
    let bottom = v.matrix().row_block(n - k, n);
    let (u1, r) = polar_decompose(&top)?;
    let (u2, _) = polar_decompose(&bottom)?;
    Ok((u1, u2, r))
}

/// Wishart `W_m(dof, I)` drawn as the Gram matrix of a `dof x m` Gaussian.
pub fn sample_wishart(dof: usize, m: usize, rng: &mut RngState) -> SymMatrix {
    gaussian_matrix(dof, m, rng).gram()
}

/// Matrix Beta draw `(A+B)^{-1/2} A (A+B)^{-1/2}` with `A ~ W_m(nu1)`, `B ~ W_m(nu2)`.
///
/// The law is the top-block Gram of a Haar frame in `V_{nu1+nu2, m}` split as
/// `nu1` over `nu2` rows, with density proportional to
/// `|r|^{(nu1-m-1)/2} |I-r|^{(nu2-m-1)/2}`.
pub fn sample_matrix_beta(
    nu1: usize,
    nu2: usize,
    m: usize,
    rng: &mut RngState,
) -> Result<SymMatrix> {
    if m == 0 || nu1 < m || nu2 < m {
        return Err(Error::Domain(format!(
            "matrix Beta needs nu1, nu2 >= m >= 1, got nu1={nu1}, nu2={nu2}, m={m}"
        )));
    }
    let a = sample_wishart(nu1, m, rng);
    let b = sample_wishart(nu2, m, rng);
    let eig = sym_eig(&a.add(&b))?;
    check_psd(&eig)?;
    let inv_sqrt = eig.reassemble(|l| 1.0 / l.sqrt());
    let r = a.congruence(inv_sqrt.as_dense());
    r.spectral_map(|l| l.clamp(0.0, 1.0))
}
