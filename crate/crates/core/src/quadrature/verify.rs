//! Identity checks. Each returns a [`VerifyReport`] comparing two independent
//! evaluations of the same integral.

use crate::error::{Error, Result};
use crate::invariants::{lift, InvariantFn, SpectralFn};
use crate::matcore::{psd_sqrt, sym_eig, SymMatrix};
use crate::report::{Params, VerifyReport};
use crate::sampler::{
    bistiefel_compose, haar_stiefel_counted, sample_matrix_beta, sample_wishart, Frame, RngState,
    Subspace,
};
use crate::specfun::{
    log_siegel_gamma, siegel_gamma, sphere_area, theorem1_constant, theorem2_constants,
};

use super::mc::{McEstimate, McPlan};
use super::rules::{gauss_jacobi_rule, gauss_laguerre_rule};
use super::simplex::{simplex_integrate, Convention, JacobiWeight};

/// Mean of `f` over the uniform measure on `G_{n,i}`.
pub fn mc_integrate_grassmann(
    f: &dyn InvariantFn,
    n: usize,
    i: usize,
    samples: usize,
    plan: &McPlan,
) -> Result<McEstimate> {
    if i == 0 || i >= n {
        return Err(Error::Domain(format!(
            "need 1 <= i <= n - 1, got n={n}, i={i}"
        )));
    }
    plan.estimate(0, samples, |rng| {
        let (frame, redraws) = haar_stiefel_counted(n, i, rng);
        Ok((f.eval(&Subspace::from_frame(&frame)), redraws))
    })
}

/// `E f0(θᵗ Pr_l θ)` over the unit sphere against its one-dimensional reduction
/// `(c / 2σ_{n-1}) ∫ f0(s) s^{l/2-1} (1-s)^{(n-l)/2-1} ds`.
pub fn verify_theorem1(
    n: usize,
    ell: usize,
    f0: &SpectralFn,
    samples: usize,
    q: usize,
    plan: &McPlan,
) -> Result<VerifyReport> {
    if ell == 0 || ell >= n {
        return Err(Error::HypothesisViolated(format!(
            "need 1 <= l <= n - 1, got n={n}, l={ell}"
        )));
    }
    let lhs = plan.estimate(0, samples, |rng| {
        let (theta, redraws) = haar_stiefel_counted(n, 1, rng);
        let s: f64 = theta.matrix().as_slice()[n - ell..]
            .iter()
            .map(|x| x * x)
            .sum();
        Ok((f0.eval(&[s]), redraws))
    })?;
    let rule = gauss_jacobi_rule(q, ell as f64 / 2.0 - 1.0, (n - ell) as f64 / 2.0 - 1.0)?;
    let scale = theorem1_constant(n, ell)? / (2.0 * sphere_area(n)?);
    let rhs = scale * rule.integrate(|s| f0.eval(&[s]));
    let params = Params {
        n: Some(n),
        l: Some(ell),
        f: Some(f0.to_string()),
        ..Params::default()
    };
    Ok(
        VerifyReport::new("theorem1", params, lhs.mean, rhs, lhs.stderr)
            .with_seed(plan.seed, samples)
            .with_quad_order(q)
            .with_redraws(lhs.redraws),
    )
}

/// `E f0(spectral_coords(ξ, l))` over `G_{n,i}` against `m!·c ∫_{Λ_m} f0 dν`.
#[allow(clippy::too_many_arguments)]
pub fn verify_theorem2(
    n: usize,
    i: usize,
    ell: usize,
    f0: &SpectralFn,
    samples: usize,
    q: usize,
    convention: Convention,
    plan: &McPlan,
) -> Result<VerifyReport> {
    let k = theorem2_constants(n, i, ell)?;
    let lifted = lift(f0.clone(), n, i, ell);
    let lhs = mc_integrate_grassmann(&lifted, n, i, samples, plan)?;
    let w = JacobiWeight::new(k.m, k.alpha, k.beta, convention)?;
    let rhs = k.c_simplex * simplex_integrate(&|l: &[f64]| f0.eval(l), &w, q)?;
    let params = Params {
        n: Some(n),
        i: Some(i),
        l: Some(ell),
        m: Some(k.m),
        f: Some(f0.to_string()),
        ..Params::default()
    };
    Ok(
        VerifyReport::new("theorem2", params, lhs.mean, rhs, lhs.stderr)
            .with_seed(plan.seed, samples)
            .with_quad_order(q)
            .with_convention(convention.name())
            .with_redraws(lhs.redraws),
    )
}

/// Haar frames in `V_{n,m}` against frames assembled from bi-Stiefel
/// coordinates with `r` drawn from the matrix Beta law `(n-k, k)`.
pub fn verify_bistiefel(
    n: usize,
    m: usize,
    k: usize,
    f: &(dyn Fn(&Frame) -> f64 + Sync),
    samples: usize,
    plan: &McPlan,
) -> Result<VerifyReport> {
    if m == 0 || k == 0 || k >= n || m > k.min(n - k) {
        return Err(Error::Domain(format!(
            "bi-Stiefel check needs 1 <= m <= min(k, n - k), got n={n}, m={m}, k={k}"
        )));
    }
    let direct = plan.estimate(0, samples, |rng| {
        let (v, redraws) = haar_stiefel_counted(n, m, rng);
        Ok((f(&v), redraws))
    })?;
    let composed = plan.estimate(1, samples, |rng| {
        let (u1, r1) = haar_stiefel_counted(n - k, m, rng);
        let (u2, r2) = haar_stiefel_counted(k, m, rng);
        let r = sample_matrix_beta(n - k, k, m, rng)?;
        Ok((f(&bistiefel_compose(&u1, &u2, &r)?), r1 + r2))
    })?;
    let stderr = direct.stderr.hypot(composed.stderr);
    let params = Params {
        n: Some(n),
        m: Some(m),
        k: Some(k),
        ..Params::default()
    };
    Ok(
        VerifyReport::new("bistiefel", params, direct.mean, composed.mean, stderr)
            .with_seed(plan.seed, samples)
            .with_redraws(direct.redraws + composed.redraws),
    )
}

/// Both sides of the matrix Beta-Gamma factorization
///
/// ```text
/// ∫∫ F(p1, p2) d_*p1 d_*p2 = ∫_{0<r<I} |I-r|^{-d} d_*r ∫ F(s^{1/2} r s^{1/2}, s^{1/2}(I-r) s^{1/2}) d_*s
/// ```
///
/// with `d = (m+1)/2` and `F = |p1|^a |p2|^b e^{-tr p1 - tr p2}`. Both sides
/// equal `Γ_m(a) Γ_m(b)`. For `m = 1` each side is a tensor Gauss rule; for
/// `m >= 2` each side is an importance-sampled Monte Carlo estimate.
pub fn verify_zhang(
    m: usize,
    a: f64,
    b: f64,
    samples: usize,
    q: usize,
    plan: &McPlan,
) -> Result<VerifyReport> {
    let bound = (m as f64 - 1.0) / 2.0;
    if m == 0 || !(a > bound && b > bound) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "need m >= 1 and a, b > (m-1)/2, got m={m}, a={a}, b={b}"
        )));
    }
    let exact = siegel_gamma(m, a)? * siegel_gamma(m, b)?;
    let params = Params {
        m: Some(m),
        a: Some(a),
        b: Some(b),
        ..Params::default()
    };
    let report = if m == 1 {
        let (lhs, rhs) = zhang_scalar(a, b, q)?;
        VerifyReport::new("zhang", params, lhs, rhs, 0.0).with_quad_order(q)
    } else {
        let (lhs, rhs) = zhang_matrix(m, a, b, samples, plan)?;
        VerifyReport::new(
            "zhang",
            params,
            lhs.mean,
            rhs.mean,
            lhs.stderr.hypot(rhs.stderr),
        )
        .with_seed(plan.seed, samples)
        .with_redraws(lhs.redraws + rhs.redraws)
    };
    Ok(report.with_exact(exact))
}

/// `x^e = x^γ · x^k` with `γ ∈ (-1, 1)` absorbed into a weight and `k` a
/// non-negative integer left in the integrand.
fn split_exponent(e: f64) -> f64 {
    if e >= 0.0 {
        e.fract()
    } else {
        e
    }
}

fn log_f(a: f64, b: f64, logdet1: f64, tr1: f64, logdet2: f64, tr2: f64) -> f64 {
    a * logdet1 + b * logdet2 - tr1 - tr2
}

fn zhang_scalar(a: f64, b: f64, q: usize) -> Result<(f64, f64)> {
    // LHS: ∫∫ F(p1, p2) p1^{-1} p2^{-1} dp1 dp2
    let (ga, gb) = (split_exponent(a - 1.0), split_exponent(b - 1.0));
    let la = gauss_laguerre_rule(q, ga)?;
    let lb = gauss_laguerre_rule(q, gb)?;
    let mut lhs = 0.0;
    for (&p1, &w1) in la.nodes.iter().zip(&la.weights) {
        for (&p2, &w2) in lb.nodes.iter().zip(&lb.weights) {
            let log_integrand = log_f(a, b, p1.ln(), p1, p2.ln(), p2) - p1.ln() - p2.ln();
            let log_weight = ga * p1.ln() - p1 + gb * p2.ln() - p2;
            lhs += w1 * w2 * (log_integrand - log_weight).exp();
        }
    }

    // RHS: ∫_0^1 (1-r)^{-1} r^{-1} dr ∫_0^∞ F(s r, s (1-r)) s^{-1} ds
    let (gr, hr) = (split_exponent(a - 1.0), split_exponent(b - 1.0));
    let gs = split_exponent(a + b - 1.0);
    let jr = gauss_jacobi_rule(q, gr, hr)?;
    let ls = gauss_laguerre_rule(q, gs)?;
    let mut rhs = 0.0;
    for (&r, &wr) in jr.nodes.iter().zip(&jr.weights) {
        let (lr, l1r) = (r.ln(), (1.0 - r).ln());
        for (&s, &ws) in ls.nodes.iter().zip(&ls.weights) {
            let ls_ = s.ln();
            let (p1, p2) = (s * r, s * (1.0 - r));
            let log_integrand = log_f(a, b, ls_ + lr, p1, ls_ + l1r, p2) - l1r - lr - ls_;
            let log_weight = gr * lr + hr * l1r + gs * ls_ - s;
            rhs += wr * ws * (log_integrand - log_weight).exp();
        }
    }
    Ok((lhs, rhs))
}

/// Wishart degrees of freedom matched to an exponent: `ν ≈ 2e`, `ν >= m`.
fn matched_dof(e: f64, m: usize) -> usize {
    ((2.0 * e).round() as usize).max(m)
}

/// `ln` of the `W_m(ν, I)` density against `d_*p`.
fn log_wishart_density(nu: usize, m: usize, logdet: f64, trace: f64) -> Result<f64> {
    let (nu, mf) = (nu as f64, m as f64);
    Ok(
        nu / 2.0 * logdet
            - trace / 2.0
            - nu * mf / 2.0 * 2f64.ln()
            - log_siegel_gamma(m, nu / 2.0)?,
    )
}

/// `(ln|x|, tr x)`, or `None` if `x` is numerically singular.
fn logdet_trace(x: &SymMatrix) -> Result<Option<(f64, f64)>> {
    let eig = sym_eig(x)?;
    if eig.values.iter().any(|&l| l <= 0.0) {
        return Ok(None);
    }
    Ok(Some((eig.values.iter().map(|l| l.ln()).sum(), x.trace())))
}

fn zhang_matrix(
    m: usize,
    a: f64,
    b: f64,
    samples: usize,
    plan: &McPlan,
) -> Result<(McEstimate, McEstimate)> {
    let d = (m as f64 + 1.0) / 2.0;
    let (nu_a, nu_b, nu_s) = (matched_dof(a, m), matched_dof(b, m), matched_dof(a + b, m));
    let log_beta_norm = log_siegel_gamma(m, nu_a as f64 / 2.0)?
        + log_siegel_gamma(m, nu_b as f64 / 2.0)?
        - log_siegel_gamma(m, (nu_a + nu_b) as f64 / 2.0)?;

    let lhs = plan.estimate(0, samples, |rng: &mut RngState| {
        let mut redraws = 0;
        loop {
            let p1 = sample_wishart(nu_a, m, rng);
            let p2 = sample_wishart(nu_b, m, rng);
            let (Some((ld1, t1)), Some((ld2, t2))) = (logdet_trace(&p1)?, logdet_trace(&p2)?)
            else {
                redraws += 1;
                continue;
            };
            let log_value = log_f(a, b, ld1, t1, ld2, t2)
                - log_wishart_density(nu_a, m, ld1, t1)?
                - log_wishart_density(nu_b, m, ld2, t2)?;
            return Ok((log_value.exp(), redraws));
        }
    })?;

    let rhs = plan.estimate(1, samples, |rng: &mut RngState| {
        let mut redraws = 0;
        loop {
            let r = sample_matrix_beta(nu_a, nu_b, m, rng)?;
            let s = sample_wishart(nu_s, m, rng);
            let root = psd_sqrt(&s)?;
            let p1 = r.congruence(root.as_dense());
            let p2 = SymMatrix::identity(m).sub(&r).congruence(root.as_dense());
            let parts = (
                logdet_trace(&r)?,
                logdet_trace(&SymMatrix::identity(m).sub(&r))?,
                logdet_trace(&s)?,
                logdet_trace(&p1)?,
                logdet_trace(&p2)?,
            );
            let (
                Some((ld_r, _)),
                Some((ld_c, _)),
                Some((ld_s, t_s)),
                Some((ld1, t1)),
                Some((ld2, t2)),
            ) = parts
            else {
                redraws += 1;
                continue;
            };
            // r-density against dr
            let log_h = (nu_a as f64 - m as f64 - 1.0) / 2.0 * ld_r
                + (nu_b as f64 - m as f64 - 1.0) / 2.0 * ld_c
                - log_beta_norm;
            let log_value = log_f(a, b, ld1, t1, ld2, t2)
                - d * ld_c
                - d * ld_r
                - log_h
                - log_wishart_density(nu_s, m, ld_s, t_s)?;
            return Ok((log_value.exp(), redraws));
        }
    })?;
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn theorem1_total_mass_is_exact_on_rhs() {
        for (n, ell) in [(2, 1), (3, 1), (4, 2), (7, 3)] {
            let r = verify_theorem1(n, ell, &SpectralFn::One, 100, 16, &McPlan::single(0)).unwrap();
            assert!((r.rhs - 1.0).abs() < 1e-12, "n={n} l={ell}: {}", r.rhs);
            assert_eq!(r.lhs, 1.0);
            assert!(r.pass);
        }
    }

    #[test]
    fn theorem1_rhs_values() {
        let id = SpectralFn::Poly(vec![0.0, 1.0]);
        let r = verify_theorem1(3, 1, &id, 100, 16, &McPlan::single(0)).unwrap();
        assert!((r.rhs - 1.0 / 3.0).abs() < 1e-13);
        let r = verify_theorem1(4, 2, &id, 100, 16, &McPlan::single(0)).unwrap();
        assert!((r.rhs - 0.5).abs() < 1e-13);
    }

    #[test]
    fn theorem2_rhs_under_both_conventions() {
        let plan = McPlan::single(0);
        let r = verify_theorem2(
            3,
            1,
            1,
            &SpectralFn::Sum,
            10,
            64,
            Convention::ComplementSwapped,
            &plan,
        )
        .unwrap();
        assert!((r.rhs - 1.0 / 3.0).abs() < 1e-12);
        let r = verify_theorem2(
            3,
            1,
            1,
            &SpectralFn::Sum,
            10,
            64,
            Convention::AsStated,
            &plan,
        )
        .unwrap();
        assert!((r.rhs - 2.0 / 3.0).abs() < 1e-12);
        let r = verify_theorem2(
            5,
            2,
            2,
            &SpectralFn::Sum,
            10,
            64,
            Convention::ComplementSwapped,
            &plan,
        )
        .unwrap();
        assert!((r.rhs - 0.8).abs() < 1e-12);
        let r = verify_theorem2(
            5,
            2,
            2,
            &SpectralFn::Sum,
            10,
            64,
            Convention::AsStated,
            &plan,
        )
        .unwrap();
        assert!((r.rhs - 1.2).abs() < 1e-12);
    }

    #[test]
    fn theorem2_rejects_hypothesis_violation() {
        let e = verify_theorem2(
            3,
            2,
            2,
            &SpectralFn::One,
            10,
            8,
            Convention::DEFAULT,
            &McPlan::single(0),
        );
        assert!(matches!(e, Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn zhang_scalar_examples() {
        let r = verify_zhang(1, 2.0, 3.0, 0, 64, &McPlan::single(0)).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-10 && (r.rhs - 2.0).abs() < 1e-10);
        assert!(r.pass);
        let r = verify_zhang(1, 1.0, 1.0, 0, 64, &McPlan::single(0)).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        // fractional exponents
        let r = verify_zhang(1, 0.75, 2.4, 0, 64, &McPlan::single(0)).unwrap();
        assert!((r.lhs - r.exact.unwrap()).abs() < 1e-10);
        assert!((r.rhs - r.exact.unwrap()).abs() < 1e-10);
    }

    #[test]
    fn zhang_exact_value_m2() {
        let r = verify_zhang(2, 2.0, 2.0, 2000, 64, &McPlan::single(3)).unwrap();
        assert!((r.exact.unwrap() - PI * PI / 4.0).abs() < 1e-12);
        assert!(verify_zhang(2, 0.5, 2.0, 10, 8, &McPlan::single(0)).is_err());
    }

    #[test]
    fn bistiefel_rejects_bad_split() {
        let f = |_: &Frame| 1.0;
        assert!(verify_bistiefel(5, 3, 2, &f, 10, &McPlan::single(0)).is_err());
        let r = verify_bistiefel(5, 2, 2, &f, 10, &McPlan::single(0)).unwrap();
        assert_eq!((r.lhs, r.rhs, r.stderr), (1.0, 1.0, 0.0));
    }
}
