//! Haar sampling of frames and subspaces, and the coordinate maps built on it.

mod coords;
mod rng;

pub use coords::{
    bispherical_compose, bistiefel_compose, bistiefel_decompose, polar_decompose,
    sample_matrix_beta, sample_wishart,
};
pub use rng::RngState;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{qr_decompose, sym_eig, DenseMatrix, SymMatrix};

/// Accepted `max |vᵗv - I|` for frames handed in from outside.
pub const FRAME_TOL: f64 = 1e-9;
/// Accepted `max |P² - P|` and `|tr P - i|` for projections handed in from outside.
pub const PROJECTION_TOL: f64 = 1e-9;

/// An orthonormal `m`-frame in `R^n` (a point of `V_{n,m}`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    matrix: DenseMatrix,
}

impl Frame {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() < matrix.cols() {
            return Err(Error::DimensionMismatch(format!(
                "frame needs n >= m, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.orthonormality_defect();
        if defect > FRAME_TOL {
            return Err(Error::Domain(format!(
                "columns are not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// First `m` coordinate vectors of `R^n`.
    pub fn standard(n: usize, m: usize) -> Self {
        assert!(m >= 1 && m <= n);
        Self {
            matrix: DenseMatrix::from_fn(n, m, |r, c| if r == c { 1.0 } else { 0.0 }),
        }
    }

    /// `σ_m = [0; I_m]`: the last `m` coordinate vectors of `R^n`.
    pub fn trailing(n: usize, m: usize) -> Self {
        assert!(m >= 1 && m <= n);
        let off = n - m;
        Self {
            matrix: DenseMatrix::from_fn(n, m, |r, c| if r == off + c { 1.0 } else { 0.0 }),
        }
    }

    pub(crate) fn from_trusted(matrix: DenseMatrix) -> Self {
        debug_assert!(matrix.orthonormality_defect() < 1e-8);
        Self { matrix }
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn m(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn orthonormality_defect(&self) -> f64 {
        self.matrix.orthonormality_defect()
    }

    /// Left action `γ · v`.
    pub fn left_mul(&self, gamma: &DenseMatrix) -> Self {
        Self::from_trusted(gamma.matmul(&self.matrix))
    }
}

/// An `i`-dimensional subspace of `R^n`, stored as its orthogonal projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    i: usize,
    projection: SymMatrix,
}

impl Subspace {
    pub fn from_frame(frame: &Frame) -> Self {
        Self {
            i: frame.m(),
            projection: frame.matrix().outer_gram(),
        }
    }

    /// Validates idempotency and an integral trace.
    pub fn from_projection(projection: SymMatrix) -> Result<Self> {
        let n = projection.dim();
        let p = projection.as_dense();
        let defect = p.matmul(p).sub(p).max_abs();
        if defect > PROJECTION_TOL {
            return Err(Error::Domain(format!(
                "projection is not idempotent (defect {defect:e})"
            )));
        }
        let tr = projection.trace();
        let i = tr.round();
        if (tr - i).abs() > PROJECTION_TOL || i < 1.0 || i >= n as f64 {
            return Err(Error::Domain(format!(
                "projection trace {tr} is not an integer in 1..{n}"
            )));
        }
        Ok(Self {
            i: i as usize,
            projection,
        })
    }

    /// Span of the coordinate vectors `e_k` for the given 0-based indices.
    pub fn coordinate(n: usize, indices: &[usize]) -> Result<Self> {
        let mut p = DenseMatrix::zeros(n, n);
        for &k in indices {
            if k >= n || p[(k, k)] != 0.0 {
                return Err(Error::Domain(format!("bad coordinate index {k}")));
            }
            p[(k, k)] = 1.0;
        }
        Self::from_projection(SymMatrix::from_dense(p)?)
    }

    pub fn n(&self) -> usize {
        self.projection.dim()
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn projection(&self) -> &SymMatrix {
        &self.projection
    }

    /// An orthonormal basis: the top `i` eigenvectors of the projection.
    pub fn frame(&self) -> Result<Frame> {
        let eig = sym_eig(&self.projection)?;
        let v = &eig.vectors;
        Ok(Frame::from_trusted(DenseMatrix::from_fn(
            self.n(),
            self.i,
            |r, c| v[(r, c)],
        )))
    }

    /// `max |P² - P|`.
    pub fn idempotency_defect(&self) -> f64 {
        let p = self.projection.as_dense();
        p.matmul(p).sub(p).max_abs()
    }

    /// Image under `γ ∈ O(n)`: projection `γ P γᵗ`.
    pub fn transform(&self, gamma: &DenseMatrix) -> Self {
        Self {
            i: self.i,
            projection: self.projection.congruence(gamma),
        }
    }
}

/// `n x m` matrix of independent standard normals.
pub fn gaussian_matrix(n: usize, m: usize, rng: &mut RngState) -> DenseMatrix {
    DenseMatrix::from_fn(n, m, |_, _| rng.normal())
}

/// One Gaussian + QR draw; fails only on a numerically rank-deficient draw.
pub fn try_haar_stiefel(n: usize, m: usize, rng: &mut RngState) -> Result<Frame> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!("need 1 <= m <= n, got n={n}, m={m}")));
    }
    let (q, _) = qr_decompose(&gaussian_matrix(n, m, rng))?;
    Ok(Frame::from_trusted(q))
}

/// Haar-distributed frame in `V_{n,m}`, with the number of rank-deficient redraws.
pub fn haar_stiefel_counted(n: usize, m: usize, rng: &mut RngState) -> (Frame, u64) {
    let mut redraws = 0;
    loop {
        match try_haar_stiefel(n, m, rng) {
            Ok(f) => return (f, redraws),
            Err(Error::RankDeficient { .. }) => redraws += 1,
            Err(e) => panic!("haar_stiefel({n}, {m}): {e}"),
        }
    }
}

/// Haar-distributed frame in `V_{n,m}` (normalized invariant measure).
///
/// # Panics
/// If `m == 0` or `m > n`.
pub fn haar_stiefel(n: usize, m: usize, rng: &mut RngState) -> Frame {
    haar_stiefel_counted(n, m, rng).0
}

/// Haar-distributed orthogonal matrix in `O(n)`.
pub fn haar_orthogonal(n: usize, rng: &mut RngState) -> DenseMatrix {
    haar_stiefel(n, n, rng).into_matrix()
}

/// Uniformly distributed `i`-dimensional subspace of `R^n`.
pub fn haar_grassmann(n: usize, i: usize, rng: &mut RngState) -> Result<Subspace> {
    if i == 0 || i >= n {
        return Err(Error::Domain(format!(
            "haar_grassmann needs 1 <= i <= n - 1, got n={n}, i={i}"
        )));
    }
    Ok(Subspace::from_frame(&haar_stiefel(n, i, rng)))
}
