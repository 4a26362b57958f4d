//! Gamma-family special functions and the constants of the integral formulas.
//!
//! Products of gamma values are accumulated in log space. The exponents
//! `alpha = (n - l - i - 1) / 2` and `beta = (|l - i| - 1) / 2` are formed from
//! integer numerators so half-integers come out exact.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Natural log of Euler's gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || x.is_infinite() {
        return Err(Error::Domain(format!("log_gamma needs x > 0, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// `ln Γ_m(a) = m(m-1)/4 · ln π + Σ_{j<m} ln Γ(a - j/2)`.
pub fn log_siegel_gamma(m: usize, a: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("siegel_gamma needs m >= 1".into()));
    }
    let mut acc = (m * (m - 1)) as f64 / 4.0 * PI.ln();
    for j in 0..m {
        let arg = a - j as f64 / 2.0;
        if arg <= 0.0 {
            return Err(Error::Domain(format!(
                "siegel_gamma({m}, {a}): gamma argument {arg} <= 0"
            )));
        }
        acc += log_gamma(arg)?;
    }
    Ok(acc)
}

/// Siegel (multivariate) gamma function `Γ_m(a)`.
pub fn siegel_gamma(m: usize, a: f64) -> Result<f64> {
    Ok(log_siegel_gamma(m, a)?.exp())
}

/// Area `σ_{n-1} = 2π^{n/2} / Γ(n/2)` of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sphere_area needs n >= 1".into()));
    }
    let h = n as f64 / 2.0;
    Ok((2f64.ln() + h * PI.ln() - log_gamma(h)?).exp())
}

/// Total mass `σ_{n,m} = 2^m π^{nm/2} / Γ_m(n/2)` of the invariant measure on `V_{n,m}`.
pub fn stiefel_volume(n: usize, m: usize) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::Domain(format!(
            "stiefel_volume needs 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    let log = m as f64 * 2f64.ln() + (n * m) as f64 / 2.0 * PI.ln()
        - log_siegel_gamma(m, n as f64 / 2.0)?;
    Ok(log.exp())
}

/// `c_m = π^{(m²+m)/4} / Π_{j=1}^m j·Γ(j/2)`, as printed with the integral formula.
///
/// Note the `Π j = m!` factor: this constant normalizes the eigenvalue measure
/// over the unordered cube `[0,1]^m` (with `|Vandermonde|`). Over the ordered
/// simplex the normalizer is `m! · c_m`; see [`ThmConstants::c_simplex`].
pub fn cm_constant(m: usize) -> Result<f64> {
    Ok(log_cm_constant(m)?.exp())
}

fn log_cm_constant(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("cm_constant needs m >= 1".into()));
    }
    let mut acc = (m * m + m) as f64 / 4.0 * PI.ln();
    for j in 1..=m {
        acc -= (j as f64).ln() + log_gamma(j as f64 / 2.0)?;
    }
    Ok(acc)
}

pub fn log_factorial(m: usize) -> f64 {
    (2..=m).map(|j| (j as f64).ln()).sum()
}

/// A half-integer `num / 2`, kept exact until conversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThmConstants {
    pub n: usize,
    pub i: usize,
    pub ell: usize,
    pub m: usize,
    /// `2·alpha = n - l - i - 1`
    pub alpha2: HalfInt,
    /// `2·beta = |l - i| - 1`
    pub beta2: HalfInt,
    pub alpha: f64,
    pub beta: f64,
    pub c_m: f64,
    /// The constant exactly as printed: `c_m · Γ_m(n/2) / (Γ_m(a/2) Γ_m((n-a)/2))`.
    pub c: f64,
    /// `m! · c`: the normalizer when the eigenvalue measure is integrated over
    /// the ordered simplex `1 >= l_1 >= .. >= l_m >= 0`.
    pub c_simplex: f64,
}

/// Constants of the Grassmannian integral formula for `(n, i, l)` with `i + l <= n`.
pub fn theorem2_constants(n: usize, i: usize, ell: usize) -> Result<ThmConstants> {
    if i == 0 || ell == 0 || i >= n || ell >= n {
        return Err(Error::Domain(format!(
            "need 1 <= i, l <= n - 1, got n={n}, i={i}, l={ell}"
        )));
    }
    if i + ell > n {
        return Err(Error::HypothesisViolated(format!(
            "i + l <= n required, got i={i}, l={ell}, n={n}"
        )));
    }
    let m = i.min(ell);
    let alpha2 = HalfInt(n as i64 - ell as i64 - i as i64 - 1);
    let beta2 = HalfInt((ell as i64 - i as i64).abs() - 1);
    // the smaller of (i, l) sets the Siegel order; the other splits n
    let split = i.max(ell);
    let log_ratio = log_siegel_gamma(m, n as f64 / 2.0)?
        - log_siegel_gamma(m, split as f64 / 2.0)?
        - log_siegel_gamma(m, (n - split) as f64 / 2.0)?;
    let log_cm = log_cm_constant(m)?;
    let c = (log_cm + log_ratio).exp();
    let c_simplex = (log_cm + log_ratio + log_factorial(m)).exp();
    Ok(ThmConstants {
        n,
        i,
        ell,
        m,
        alpha2,
        beta2,
        alpha: alpha2.value(),
        beta: beta2.value(),
        c_m: log_cm.exp(),
        c,
        c_simplex,
    })
}

/// `c = σ_{l-1} σ_{n-l-1}` of the bi-spherical formula on `S^{n-1}`.
pub fn theorem1_constant(n: usize, ell: usize) -> Result<f64> {
    if ell == 0 || ell >= n {
        return Err(Error::Domain(format!(
            "theorem1_constant needs 1 <= l <= n - 1, got n={n}, l={ell}"
        )));
    }
    Ok(sphere_area(ell)? * sphere_area(n - ell)?)
}
