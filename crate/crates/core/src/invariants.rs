//! Canonical-angle coordinates of a subspace relative to `R^l`, the action of
//! `K_l = O(n-l) x O(l)`, and lifting spectral functions back to the Grassmannian.
//!
//! Throughout, `R^l = span{e_{n-l+1}, .., e_n}` (the trailing coordinates) and
//! `Pr_l` is its orthogonal projection.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{sym_eig, DenseMatrix, SymMatrix};
use crate::report::{Params, VerifyReport};
use crate::sampler::{haar_grassmann, haar_orthogonal, RngState, Subspace};

/// Eigenvalues within this distance outside `[0, 1]` are clamped silently.
pub const SPECTRUM_CLAMP_TOL: f64 = 1e-9;

/// A point of `Λ_m = {1 >= l_1 >= .. >= l_m >= 0}`: squared cosines of the
/// canonical angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    lambda: Vec<f64>,
}

impl SpectralPoint {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Domain("spectral point needs m >= 1".into()));
        }
        if lambda.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::Domain(format!("{lambda:?} not inside [0, 1]")));
        }
        if lambda.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("{lambda:?} not sorted descending")));
        }
        Ok(Self { lambda })
    }

    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Canonical angles `ω_j = arccos(sqrt(l_j))`.
    pub fn angles(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| l.sqrt().acos()).collect()
    }
}

/// Spectrum of a PSD contraction, sorted descending and clamped into `[0, 1]`.
fn clamped_spectrum(s: &SymMatrix, keep: usize) -> Result<Vec<f64>> {
    let eig = sym_eig(s)?;
    let mut out = Vec::with_capacity(keep);
    for &l in eig.values.iter().take(keep) {
        if !(-SPECTRUM_CLAMP_TOL..=1.0 + SPECTRUM_CLAMP_TOL).contains(&l) {
            log_out_of_range(l);
        }
        out.push(l.clamp(0.0, 1.0));
    }
    Ok(out)
}

#[cold]
fn log_out_of_range(l: f64) {
    if cfg!(debug_assertions) {
        eprintln!("spectral_coords: raw eigenvalue {l:e} clamped into [0, 1]");
    }
}

fn check_ell(n: usize, ell: usize) -> Result<()> {
    if ell == 0 || ell >= n {
        return Err(Error::Domain(format!(
            "need 1 <= l <= n - 1, got n={n}, l={ell}"
        )));
    }
    Ok(())
}

/// Canonical-angle spectrum of `xi` relative to `R^l`.
///
/// For `i <= l` these are the eigenvalues of `Θᵗ Pr_l Θ` for a frame `Θ` of `xi`;
/// for `i > l`, the eigenvalues of `Ψᵗ Pr_xi Ψ` with `Ψ = [0; I_l]`.
pub fn spectral_coords(xi: &Subspace, ell: usize) -> Result<SpectralPoint> {
    let (n, i) = (xi.n(), xi.i());
    check_ell(n, ell)?;
    let lambda = if i <= ell {
        let theta = xi.frame()?;
        // Θᵗ Pr_l Θ is the Gram of the trailing l rows of Θ
        let r = theta.matrix().row_block(n - ell, n).gram();
        clamped_spectrum(&r, i)?
    } else {
        clamped_spectrum(&xi.projection().trailing_block(ell), ell)?
    };
    SpectralPoint::new(lambda)
}

/// The same spectrum read off `σ_lᵗ Pr_xi σ_l` in both branches, keeping the
/// top `min(i, l)` eigenvalues. Used to cross-check [`spectral_coords`].
pub fn spectral_coords_via_block(xi: &Subspace, ell: usize) -> Result<SpectralPoint> {
    check_ell(xi.n(), ell)?;
    let m = xi.i().min(ell);
    SpectralPoint::new(clamped_spectrum(&xi.projection().trailing_block(ell), m)?)
}

/// `γ = blockdiag(A, B)` with `A ∈ O(n-l)`, `B ∈ O(l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KEllElement {
    block_a: DenseMatrix,
    block_b: DenseMatrix,
}

impl KEllElement {
    pub const ORTHO_TOL: f64 = 1e-10;

    pub fn new(block_a: DenseMatrix, block_b: DenseMatrix) -> Result<Self> {
        for (name, blk) in [("A", &block_a), ("B", &block_b)] {
            if !blk.is_square() {
                return Err(Error::DimensionMismatch(format!(
                    "block {name} is not square"
                )));
            }
            let defect = blk.orthonormality_defect();
            if defect > Self::ORTHO_TOL {
                return Err(Error::Domain(format!(
                    "block {name} not orthogonal (defect {defect:e})"
                )));
            }
        }
        Ok(Self { block_a, block_b })
    }

    pub fn identity(n: usize, ell: usize) -> Self {
        Self {
            block_a: DenseMatrix::identity(n - ell),
            block_b: DenseMatrix::identity(ell),
        }
    }

    pub fn ell(&self) -> usize {
        self.block_b.rows()
    }

    pub fn n(&self) -> usize {
        self.block_a.rows() + self.block_b.rows()
    }

    pub fn block_a(&self) -> &DenseMatrix {
        &self.block_a
    }

    pub fn block_b(&self) -> &DenseMatrix {
        &self.block_b
    }

    pub fn matrix(&self) -> DenseMatrix {
        DenseMatrix::block_diag(&self.block_a, &self.block_b)
    }
}

/// `γ · xi`, i.e. projection `γ Pr_xi γᵗ`.
pub fn k_ell_action(gamma: &KEllElement, xi: &Subspace) -> Result<Subspace> {
    if gamma.n() != xi.n() {
        return Err(Error::DimensionMismatch(format!(
            "K_l element acts on R^{}, subspace lives in R^{}",
            gamma.n(),
            xi.n()
        )));
    }
    Ok(xi.transform(&gamma.matrix()))
}

/// Haar draw on `O(n-l) x O(l)`.
pub fn random_k_ell(n: usize, ell: usize, rng: &mut RngState) -> Result<KEllElement> {
    check_ell(n, ell)?;
    Ok(KEllElement {
        block_a: haar_orthogonal(n - ell, rng),
        block_b: haar_orthogonal(ell, rng),
    })
}

/// A real function on the Grassmannian. Implementations see only the
/// projection, never a frame, so they cannot depend on a basis choice.
pub trait InvariantFn: Sync {
    fn eval(&self, xi: &Subspace) -> f64;
}

impl<F> InvariantFn for F
where
    F: Fn(&Subspace) -> f64 + Sync,
{
    fn eval(&self, xi: &Subspace) -> f64 {
        self(xi)
    }
}

/// Named symmetric functions on `Λ_m`.
///
/// `poly:c0,c1,..` is `Σ_k c_k (Σ_j l_j)^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectralFn {
    One,
    Sum,
    Prod,
    Max,
    Poly(Vec<f64>),
}

impl SpectralFn {
    pub fn eval(&self, lambda: &[f64]) -> f64 {
        match self {
            SpectralFn::One => 1.0,
            SpectralFn::Sum => lambda.iter().sum(),
            SpectralFn::Prod => lambda.iter().product(),
            SpectralFn::Max => lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            SpectralFn::Poly(coeffs) => {
                let s: f64 = lambda.iter().sum();
                coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
            }
        }
    }

    /// The registered names, for help text.
    pub const NAMES: &'static [&'static str] = &["one", "sum", "prod", "max", "poly:<c0,c1,..>"];
}

impl FromStr for SpectralFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Self::One),
            "sum" => Ok(Self::Sum),
            "prod" => Ok(Self::Prod),
            "max" => Ok(Self::Max),
            _ => {
                let Some(list) = s.strip_prefix("poly:") else {
                    return Err(Error::Domain(format!(
                        "unknown f0 '{s}' (expected one of {})",
                        Self::NAMES.join(", ")
                    )));
                };
                let coeffs = list
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Domain(format!("bad poly coefficients '{list}': {e}")))?;
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Domain(format!("bad poly coefficients '{list}'")));
                }
                Ok(Self::Poly(coeffs))
            }
        }
    }
}

impl fmt::Display for SpectralFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralFn::One => f.write_str("one"),
            SpectralFn::Sum => f.write_str("sum"),
            SpectralFn::Prod => f.write_str("prod"),
            SpectralFn::Max => f.write_str("max"),
            SpectralFn::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
        }
    }
}

/// `xi ↦ f0(spectral_coords(xi, l))`.
#[derive(Clone, Debug)]
pub struct Lifted {
    pub f0: SpectralFn,
    pub n: usize,
    pub i: usize,
    pub ell: usize,
}

impl InvariantFn for Lifted {
    fn eval(&self, xi: &Subspace) -> f64 {
        let point =
            spectral_coords(xi, self.ell).expect("lifted function evaluated off its domain");
        self.f0.eval(point.lambda())
    }
}

pub fn lift(f0: SpectralFn, n: usize, i: usize, ell: usize) -> Lifted {
    Lifted { f0, n, i, ell }
}

/// Random search for a violation of `f(γ xi) = f(xi)` over `trials` draws.
///
/// The report carries the largest deviation as `lhs` (against `rhs = 0`) and
/// passes iff it stays below `tol`.
pub fn invariance_test(
    f: &dyn InvariantFn,
    n: usize,
    i: usize,
    ell: usize,
    trials: usize,
    rng: &mut RngState,
    tol: f64,
) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::Domain("invariance_test needs trials >= 1".into()));
    }
    check_ell(n, ell)?;
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let xi = haar_grassmann(n, i, rng)?;
        let gamma = random_k_ell(n, ell, rng)?;
        let moved = k_ell_action(&gamma, &xi)?;
        worst = worst.max((f.eval(&moved) - f.eval(&xi)).abs());
    }
    let params = Params {
        n: Some(n),
        i: Some(i),
        l: Some(ell),
        ..Params::default()
    };
    let mut report =
        VerifyReport::new("invariance", params, worst, 0.0, 0.0).with_seed(rng.seed(), trials);
    report.pass = worst < tol;
    Ok(report)
}

/// `trace(Pr_xi Pr_l)`: a K_l-invariant function written without spectra.
pub fn trace_against_reference(xi: &Subspace, ell: usize) -> f64 {
    xi.projection().trailing_block(ell).trace()
}
