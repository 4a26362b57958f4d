//! Integration over the ordered simplex `1 >= l_1 >= .. >= l_m >= 0` against
//!
//! ```text
//! dν(l) = Π_{j<k} (l_j - l_k) · Π_j l_j^a (1 - l_j)^b dl_j
//! ```
//!
//! For `m = 1` this is a single Gauss-Jacobi rule. For `m >= 2` the cube
//! symmetrization `|V(l)| / m!` has a kink on every diagonal, which caps a
//! tensor Gauss rule at algebraic accuracy. Instead the ordered region is
//! parametrized directly:
//!
//! - `l_j = sin²(φ_j)` turns `l^a (1-l)^b dl` into `2 sin^{2a+1} φ cos^{2b+1} φ dφ`,
//!   which is analytic whenever `2a+1` and `2b+1` are non-negative integers
//!   (true for every measure coming from a Grassmannian);
//! - `φ_1 = (π/2) t_1` and `φ_j = φ_{j-1} t_j` map `[0,1]^m` onto the ordered
//!   angles, and every pure power of a `t_j` (from `φ^{2a+1}`, the Jacobian and
//!   `φ_p²` factored out of each Vandermonde difference) is moved into a
//!   Gauss-Jacobi weight for that level.
//!
//! What remains at each node is a smooth positive factor, so the nested rule
//! converges spectrally on half-integer exponents. For other real exponents the
//! `cos^{2b+1}` corner at `t = (1, .., 1)` limits convergence to algebraic.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rules::{gauss_jacobi_rule, QuadRule};
use crate::error::{Error, Result};

/// Largest `m` handled by deterministic quadrature (`q^m` nodes).
pub const MAX_QUADRATURE_M: usize = 4;

/// Which factor the exponent `alpha` sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `l^alpha (1-l)^beta`
    AsStated,
    /// `l^beta (1-l)^alpha`, i.e. the image under `l ↦ 1 - l`.
    ComplementSwapped,
}

impl Convention {
    /// The pairing consistent with the canonical-angle spectrum (`l = cos² ω`):
    /// the (3,1,1), `f0 = l` check gives 1/3 under this convention and 2/3
    /// under [`Convention::AsStated`].
    pub const DEFAULT: Convention = Convention::ComplementSwapped;

    pub fn name(self) -> &'static str {
        match self {
            Convention::AsStated => "as-stated",
            Convention::ComplementSwapped => "complement-swapped",
        }
    }
}

impl Default for Convention {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-stated" => Ok(Self::AsStated),
            "complement-swapped" => Ok(Self::ComplementSwapped),
            _ => Err(Error::Domain(format!(
                "unknown convention '{s}' (expected as-stated or complement-swapped)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiWeight {
    pub m: usize,
    pub alpha: f64,
    pub beta: f64,
    pub convention: Convention,
}

impl JacobiWeight {
    pub fn new(m: usize, alpha: f64, beta: f64, convention: Convention) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("Jacobi weight needs m >= 1".into()));
        }
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::Domain(format!(
                "Jacobi weight needs alpha, beta > -1, got ({alpha}, {beta})"
            )));
        }
        Ok(Self {
            m,
            alpha,
            beta,
            convention,
        })
    }

    /// Exponents `(on l, on 1 - l)` after applying the convention.
    pub fn exponents(&self) -> (f64, f64) {
        match self.convention {
            Convention::AsStated => (self.alpha, self.beta),
            Convention::ComplementSwapped => (self.beta, self.alpha),
        }
    }

    /// `Π_{j<k} (l_j - l_k) Π_j l_j^a (1 - l_j)^b` at an ordered point.
    pub fn density(&self, lambda: &[f64]) -> f64 {
        let (a, b) = self.exponents();
        let mut d = 1.0;
        for (j, &l) in lambda.iter().enumerate() {
            d *= l.powf(a) * (1.0 - l).powf(b);
            for &lk in &lambda[j + 1..] {
                d *= l - lk;
            }
        }
        d
    }
}

/// `∫_{Λ_m} f0 dν` with `q` nodes per level.
///
/// `f0` receives `l` sorted descending.
pub fn simplex_integrate(f0: &dyn Fn(&[f64]) -> f64, w: &JacobiWeight, q: usize) -> Result<f64> {
    let m = w.m;
    if m > MAX_QUADRATURE_M {
        return Err(Error::Domain(format!(
            "deterministic quadrature supports m <= {MAX_QUADRATURE_M}, got m = {m}"
        )));
    }
    let (a, b) = w.exponents();
    if m == 1 {
        let rule = gauss_jacobi_rule(q, a, b)?;
        return Ok(rule.integrate(|x| f0(&[x])));
    }

    let p = 2.0 * a + 1.0;
    let pb = 2.0 * b + 1.0;
    let mut rules = Vec::with_capacity(m);
    for j in 0..m {
        let r = (m - j) as f64;
        let inner = (m - j - 1) as f64;
        let t_exp = r * p + inner + r * inner;
        let one_minus_exp = if j == 0 { pb } else { 0.0 };
        rules.push(gauss_jacobi_rule(q, t_exp, one_minus_exp)?);
    }
    let mf = m as f64;
    let log_const = mf * 2f64.ln() + (mf + mf * p + mf * (mf - 1.0)) * FRAC_PI_2.ln();

    let mut walker = Walker {
        rules: &rules,
        f0,
        p,
        pb,
        phi: vec![0.0; m],
        lambda: vec![0.0; m],
    };
    let sum = walker.level(0, FRAC_PI_2, 1.0);
    Ok(sum * log_const.exp())
}

struct Walker<'a> {
    rules: &'a [QuadRule],
    f0: &'a dyn Fn(&[f64]) -> f64,
    p: f64,
    pb: f64,
    phi: Vec<f64>,
    lambda: Vec<f64>,
}

impl Walker<'_> {
    fn level(&mut self, j: usize, upper: f64, acc: f64) -> f64 {
        let rule = &self.rules[j];
        let last = j + 1 == self.rules.len();
        let mut total = 0.0;
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let phi = upper * t;
            let (s, c) = phi.sin_cos();
            let mut factor = wt * (s / phi).powf(self.p);
            factor *= if j == 0 {
                // cos(πt/2) = sin(π(1-t)/2); (1-t)^{2b+1} lives in the weight
                ((FRAC_PI_2 * (1.0 - t)).sin() / (1.0 - t)).powf(self.pb)
            } else {
                c.powf(self.pb)
            };
            for &prev in &self.phi[..j] {
                factor *= (prev - phi).sin() * (prev + phi).sin() / (prev * prev);
            }
            self.phi[j] = phi;
            self.lambda[j] = s * s;
            total += if last {
                factor * (self.f0)(&self.lambda)
            } else {
                factor * self.level(j + 1, phi, 1.0)
            };
        }
        acc * total
    }
}
