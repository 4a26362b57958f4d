//! Dense real linear algebra at desk scale.
//!
//! Matrices here never exceed a few dozen rows, so everything is stored dense
//! and row-major with no blocking. The two factorizations are a Householder QR
//! with a positive-diagonal sign convention (which is what makes Gaussian + QR
//! an exact Haar sampler) and a cyclic Jacobi symmetric eigensolver.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative pivot threshold for [`qr_decompose`].
pub const RANK_TOL: f64 = 1e-10;
/// Jacobi sweeps stop once the off-diagonal norm is below this fraction of the
/// Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 50;
/// Eigenvalues of nominally PSD input may dip this far below zero (scaled by
/// `max(1, spectral radius)`) before [`psd_sqrt`] refuses.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix must be non-empty");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// A single column vector.
    pub fn column(values: &[f64]) -> Result<Self> {
        Self::from_row_major(values.len(), 1, values.to_vec())
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| if r == c { values[r] } else { 0.0 })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col_vec(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `selfᵗ · self`, symmetric by construction.
    pub fn gram(&self) -> SymMatrix {
        let m = self.cols;
        let mut g = Self::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let s: f64 = (0..self.rows).map(|r| self[(r, a)] * self[(r, b)]).sum();
                g[(a, b)] = s;
                g[(b, a)] = s;
            }
        }
        SymMatrix(g)
    }

    /// `self · selfᵗ`, symmetric by construction.
    pub fn outer_gram(&self) -> SymMatrix {
        let n = self.rows;
        let mut g = Self::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let s: f64 = self
                    .row(a)
                    .iter()
                    .zip(self.row(b))
                    .map(|(x, y)| x * y)
                    .sum();
                g[(a, b)] = s;
                g[(b, a)] = s;
            }
        }
        SymMatrix(g)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// Rows `start..end` as a new matrix.
    pub fn row_block(&self, start: usize, end: usize) -> Self {
        assert!(start < end && end <= self.rows);
        Self {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Stacks `top` over `bottom`.
    pub fn vstack(top: &Self, bottom: &Self) -> Self {
        assert_eq!(top.cols, bottom.cols, "vstack column mismatch");
        let mut data = top.data.clone();
        data.extend_from_slice(&bottom.data);
        Self {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            data,
        }
    }

    /// Block-diagonal `[a 0; 0 b]`.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let n = a.rows + b.rows;
        let m = a.cols + b.cols;
        Self::from_fn(n, m, |r, c| {
            if r < a.rows && c < a.cols {
                a[(r, c)]
            } else if r >= a.rows && c >= a.cols {
                b[(r - a.rows, c - a.cols)]
            } else {
                0.0
            }
        })
    }

    /// `max |selfᵗ self - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram();
        let m = self.cols;
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g.0[(a, b)] - target).abs());
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{:>12.6e} ", self[(r, c)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A square matrix with exactly symmetric storage.
///
/// Every constructor symmetrizes, so `s[(j, k)] == s[(k, j)]` holds bit-for-bit.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix(DenseMatrix);

impl SymMatrix {
    /// Wraps a square matrix, replacing it by `(a + aᵗ) / 2`.
    pub fn from_dense(a: DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "symmetric matrix must be square, got {}x{}",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut s = a;
        for r in 0..n {
            for c in (r + 1)..n {
                let avg = 0.5 * (s[(r, c)] + s[(c, r)]);
                s[(r, c)] = avg;
                s[(c, r)] = avg;
            }
        }
        Ok(Self(s))
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_dense(DenseMatrix::from_row_major(n, n, data)?)
    }

    pub fn identity(n: usize) -> Self {
        Self(DenseMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DenseMatrix::zeros(n, n))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(DenseMatrix::diag(values))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self(self.0.scale(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.sub(&other.0))
    }

    /// `g · self · gᵗ` for a conforming (not necessarily square) `g`.
    pub fn congruence(&self, g: &DenseMatrix) -> Self {
        let out = g.matmul(&self.0).matmul(&g.transpose());
        Self::from_dense(out).expect("congruence of a square matrix is square")
    }

    /// Trailing principal block `self[n-k.., n-k..]`.
    pub fn trailing_block(&self, k: usize) -> Self {
        let n = self.dim();
        assert!(k >= 1 && k <= n);
        let off = n - k;
        Self(DenseMatrix::from_fn(k, k, |r, c| {
            self.0[(off + r, off + c)]
        }))
    }

    /// `γ · diag(f(λ)) · γᵗ` over the eigendecomposition of `self`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = sym_eig(self)?;
        Ok(eig.reassemble(f))
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sym{:?}", self.0)
    }
}

/// Householder QR with `diag(r_upper) > 0`.
///
/// Returns the thin factors: `q` is `rows x cols` with orthonormal columns and
/// `r_upper` is `cols x cols`.
pub fn qr_decompose(x: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let (n, m) = (x.rows, x.cols);
    if n < m {
        return Err(Error::DimensionMismatch(format!(
            "qr_decompose needs rows >= cols, got {n}x{m}"
        )));
    }
    let max_col_norm = (0..m)
        .map(|c| (0..n).map(|r| x[(r, c)].powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);

    let mut a = x.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(m);
    for k in 0..m {
        let norm = (k..n).map(|r| a[(r, k)].powi(2)).sum::<f64>().sqrt();
        let mut v: Vec<f64> = (k..n).map(|r| a[(r, k)]).collect();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        v.iter_mut().for_each(|t| *t /= vnorm);
        for c in k..m {
            let dot: f64 = v.iter().enumerate().map(|(j, vj)| vj * a[(k + j, c)]).sum();
            for (j, vj) in v.iter().enumerate() {
                a[(k + j, c)] -= 2.0 * vj * dot;
            }
        }
        reflectors.push(v);
    }

    let mut r_upper = DenseMatrix::from_fn(m, m, |r, c| if c >= r { a[(r, c)] } else { 0.0 });
    let threshold = RANK_TOL * max_col_norm;
    for k in 0..m {
        let pivot = r_upper[(k, k)].abs();
        if max_col_norm == 0.0 || pivot < threshold {
            return Err(Error::RankDeficient { pivot, threshold });
        }
    }

    // q = H_0 H_1 .. H_{m-1} [I_m; 0]
    let mut q = DenseMatrix::from_fn(n, m, |r, c| if r == c { 1.0 } else { 0.0 });
    for k in (0..m).rev() {
        let v = &reflectors[k];
        if v.is_empty() {
            continue;
        }
        for c in 0..m {
            let dot: f64 = v.iter().enumerate().map(|(j, vj)| vj * q[(k + j, c)]).sum();
            for (j, vj) in v.iter().enumerate() {
                q[(k + j, c)] -= 2.0 * vj * dot;
            }
        }
    }

    for k in 0..m {
        if r_upper[(k, k)] < 0.0 {
            for c in k..m {
                r_upper[(k, c)] = -r_upper[(k, c)];
            }
            for r in 0..n {
                q[(r, k)] = -q[(r, k)];
            }
        }
    }
    Ok((q, r_upper))
}

/// Eigendecomposition `s = V · diag(values) · Vᵗ`, values sorted descending.
///
/// The eigenvectors are the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymEigen {
    /// Rebuilds `V · diag(f(λ)) · Vᵗ`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = DenseMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let s: f64 = (0..n).map(|k| v[(a, k)] * mapped[k] * v[(b, k)]).sum();
                out[(a, b)] = s;
                out[(b, a)] = s;
            }
        }
        SymMatrix(out)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }
}

/// Cyclic Jacobi eigensolver.
pub fn sym_eig(s: &SymMatrix) -> Result<SymEigen> {
    let n = s.dim();
    let mut a = s.0.clone();
    let mut v = DenseMatrix::identity(n);
    let fro = a.frobenius();
    let target = JACOBI_TOL * fro;

    let off_norm = |a: &DenseMatrix| -> f64 {
        let mut acc = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                acc += 2.0 * a[(r, c)] * a[(r, c)];
            }
        }
        acc.sqrt()
    };

    let mut converged = off_norm(&a) <= target;
    let mut sweep = 0;
    while !converged {
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps: sweep });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
        converged = off_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their Jacobi order
    order.sort_by(|&x, &y| a[(y, y)].total_cmp(&a[(x, x)]));
    let values = order.iter().map(|&k| a[(k, k)]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEigen { values, vectors })
}

/// Symmetric PSD square root; tiny negative eigenvalues are clamped to zero.
pub fn psd_sqrt(s: &SymMatrix) -> Result<SymMatrix> {
    let eig = sym_eig(s)?;
    check_psd(&eig)?;
    Ok(eig.reassemble(|l| l.max(0.0).sqrt()))
}

pub(crate) fn check_psd(eig: &SymEigen) -> Result<()> {
    let tol = PSD_TOL * eig.spectral_radius().max(1.0);
    match eig.values.last() {
        Some(&smallest) if smallest < -tol => Err(Error::NotPsd {
            eigenvalue: smallest,
        }),
        _ => Ok(()),
    }
}

/// Determinant as the product of eigenvalues.
pub fn det(s: &SymMatrix) -> Result<f64> {
    Ok(sym_eig(s)?.values.iter().product())
}
