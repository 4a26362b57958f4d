//! Gauss rules from three-term recurrences (Golub-Welsch).
//!
//! Nodes come from the eigenvalues of the Jacobi matrix and are then polished
//! by Newton steps on the orthonormal polynomial `p_q`; weights are the
//! Christoffel numbers `1 / Σ_{k<q} p_k(x)²`, which are more accurate than the
//! squared first eigenvector components for large `q`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{sym_eig, DenseMatrix, SymMatrix};
use crate::specfun::log_gamma;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Polynomials up to this degree are integrated exactly.
    pub degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_k f(x_k)`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Monic recurrence `P_{k+1} = (x - a_k) P_k - b_k P_{k-1}` with `b_0 = μ0`.
struct Recurrence {
    a: Vec<f64>,
    /// `b[k]` for `k = 0..=q`; `b[0]` is the total mass.
    b: Vec<f64>,
}

impl Recurrence {
    /// Orthonormal `p_q(x)`, its derivative, and `Σ_{k<q} p_k(x)²`.
    fn eval(&self, q: usize, x: f64) -> (f64, f64, f64) {
        let mut p_prev = 0.0;
        let mut d_prev = 0.0;
        let mut p = 1.0 / self.b[0].sqrt();
        let mut d = 0.0;
        let mut christoffel = 0.0;
        for k in 0..q {
            christoffel += p * p;
            let sb_next = self.b[k + 1].sqrt();
            let sb = if k == 0 { 0.0 } else { self.b[k].sqrt() };
            let p_next = ((x - self.a[k]) * p - sb * p_prev) / sb_next;
            let d_next = (p + (x - self.a[k]) * d - sb * d_prev) / sb_next;
            p_prev = p;
            d_prev = d;
            p = p_next;
            d = d_next;
        }
        (p, d, christoffel)
    }

    fn rule(&self, q: usize) -> Result<QuadRule> {
        let jacobi = DenseMatrix::from_fn(q, q, |r, c| {
            if r == c {
                self.a[r]
            } else if r + 1 == c {
                self.b[c].sqrt()
            } else if c + 1 == r {
                self.b[r].sqrt()
            } else {
                0.0
            }
        });
        let eig = sym_eig(&SymMatrix::from_dense(jacobi)?)?;
        let mut nodes = eig.values;
        nodes.reverse();
        let mut weights = Vec::with_capacity(q);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (p, d, _) = self.eval(q, *x);
                if d == 0.0 {
                    break;
                }
                let step = p / d;
                *x -= step;
                if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, _, christoffel) = self.eval(q, *x);
            weights.push(1.0 / christoffel);
        }
        Ok(QuadRule {
            nodes,
            weights,
            degree: 2 * q - 1,
        })
    }
}

/// Gauss-Jacobi rule on `(0, 1)` for the weight `x^alpha (1-x)^beta`.
pub fn gauss_jacobi_rule(q: usize, alpha: f64, beta: f64) -> Result<QuadRule> {
    if q == 0 {
        return Err(Error::Domain("quadrature order must be >= 1".into()));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain(format!(
            "Gauss-Jacobi needs alpha, beta > -1, got ({alpha}, {beta})"
        )));
    }
    // [-1, 1] weight (1-t)^ea (1+t)^eb with x = (1+t)/2
    let (ea, eb) = (beta, alpha);
    let s = ea + eb;
    let mut a = Vec::with_capacity(q);
    let mut b = Vec::with_capacity(q + 1);
    let mu0 =
        (log_gamma(alpha + 1.0)? + log_gamma(beta + 1.0)? - log_gamma(alpha + beta + 2.0)?).exp();
    b.push(mu0);
    for k in 0..q {
        let kf = k as f64;
        let ak = if k == 0 {
            (eb - ea) / (s + 2.0)
        } else {
            (eb * eb - ea * ea) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0))
        };
        a.push(0.5 * (ak + 1.0));
    }
    for k in 1..=q {
        let kf = k as f64;
        let bk = if k == 1 {
            4.0 * (1.0 + ea) * (1.0 + eb) / ((2.0 + s).powi(2) * (3.0 + s))
        } else {
            let t = 2.0 * kf + s;
            4.0 * kf * (kf + ea) * (kf + eb) * (kf + s) / (t * t * (t + 1.0) * (t - 1.0))
        };
        b.push(0.25 * bk);
    }
    Recurrence { a, b }.rule(q)
}

/// Generalized Gauss-Laguerre rule on `(0, ∞)` for the weight `x^gamma e^{-x}`.
pub fn gauss_laguerre_rule(q: usize, gamma: f64) -> Result<QuadRule> {
    if q == 0 {
        return Err(Error::Domain("quadrature order must be >= 1".into()));
    }
    if gamma.is_nan() || gamma <= -1.0 {
        return Err(Error::Domain(format!(
            "Gauss-Laguerre needs gamma > -1, got {gamma}"
        )));
    }
    let a = (0..q).map(|k| 2.0 * k as f64 + 1.0 + gamma).collect();
    let mut b = vec![log_gamma(gamma + 1.0)?.exp()];
    b.extend((1..=q).map(|k| k as f64 * (k as f64 + gamma)));
    Recurrence { a, b }.rule(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// ∫₀¹ x^{p+α} (1-x)^β dx = B(p+α+1, β+1)
    fn beta_moment(p: usize, alpha: f64, beta: f64) -> f64 {
        let a = p as f64 + alpha + 1.0;
        let b = beta + 1.0;
        (log_gamma(a).unwrap() + log_gamma(b).unwrap() - log_gamma(a + b).unwrap()).exp()
    }

    #[test]
    fn midpoint_rule() {
        let r = gauss_jacobi_rule(1, 0.0, 0.0).unwrap();
        assert!((r.nodes[0] - 0.5).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weight_sums() {
        let r = gauss_jacobi_rule(10, 0.0, -0.5).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        let r = gauss_jacobi_rule(1, -0.5, 0.0).unwrap();
        let v = r.integrate(|x| x);
        assert!((v - 2.0 / 3.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gauss_jacobi_rule(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi_rule(0, 0.0, 0.0).is_err());
        assert!(gauss_laguerre_rule(4, -1.5).is_err());
    }

    #[test]
    fn jacobi_exactness_small_orders() {
        for q in [1usize, 2, 5, 9, 16] {
            for &(al, be) in &[(0.0, 0.0), (-0.5, 0.5), (1.5, -0.5), (0.3, 2.7)] {
                let r = gauss_jacobi_rule(q, al, be).unwrap();
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(r.nodes.iter().all(|&x| x > 0.0 && x < 1.0));
                for p in 0..=(2 * q - 1) {
                    let got = r.integrate(|x| x.powi(p as i32));
                    let want = beta_moment(p, al, be);
                    assert!(
                        ((got - want) / want).abs() < 1e-12,
                        "q={q} a={al} b={be} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn laguerre_moments() {
        // ∫ x^p x^γ e^{-x} = Γ(p + γ + 1)
        for &g in &[0.0, -0.5, 0.7] {
            let q = 20;
            let r = gauss_laguerre_rule(q, g).unwrap();
            for p in 0..=(2 * q - 1) {
                let got = r.integrate(|x| x.powi(p as i32));
                let want = log_gamma(p as f64 + g + 1.0).unwrap().exp();
                assert!(((got - want) / want).abs() < 1e-11, "g={g} p={p}");
            }
        }
    }
}
