//! Empirical law of the canonical-angle spectrum of a uniform subspace.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::invariants::spectral_coords;
use crate::sampler::{haar_stiefel_counted, Subspace};
use crate::specfun::theorem2_constants;

use super::mc::McPlan;
use super::simplex::Convention;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    /// One count per eigenvalue `l_1 >= .. >= l_m`.
    pub counts: Vec<u64>,
    /// Bin probability under each convention (`m = 1` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_as_stated: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_complement_swapped: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub n: usize,
    pub i: usize,
    pub l: usize,
    pub m: usize,
    pub samples: usize,
    pub seed: u64,
    pub redraws: u64,
    pub bins: Vec<HistBin>,
    /// Kolmogorov-Smirnov distance to the Beta law under each convention.
    pub ks_as_stated: Option<f64>,
    pub ks_complement_swapped: Option<f64>,
}

impl DensityReport {
    pub fn ks(&self, convention: Convention) -> Option<f64> {
        match convention {
            Convention::AsStated => self.ks_as_stated,
            Convention::ComplementSwapped => self.ks_complement_swapped,
        }
    }
}

/// `sup |F_emp - F|` for sorted data.
fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |d: f64, (k, &x)| {
        let f = cdf(x);
        d.max((k as f64 + 1.0) / n - f).max(f - k as f64 / n)
    })
}

/// Histogram of `spectral_coords` over `samples` uniform subspaces of
/// `G_{n,i}`, with `bins` equal bins on `[0, 1]`. For `m = 1` the sample is
/// also compared with `Beta(α+1, β+1)` and `Beta(β+1, α+1)`.
pub fn density_report(
    n: usize,
    i: usize,
    ell: usize,
    samples: usize,
    bins: usize,
    plan: &McPlan,
) -> Result<DensityReport> {
    if bins == 0 || samples == 0 {
        return Err(Error::Domain(
            "density needs bins >= 1 and samples >= 1".into(),
        ));
    }
    let k = theorem2_constants(n, i, ell)?;
    let m = k.m;
    let parts = plan.fan_out(0, samples, |rng, count| -> Result<(Vec<Vec<f64>>, u64)> {
        let mut out = Vec::with_capacity(count);
        let mut redraws = 0;
        for _ in 0..count {
            let (frame, r) = haar_stiefel_counted(n, i, rng);
            redraws += r;
            out.push(
                spectral_coords(&Subspace::from_frame(&frame), ell)?
                    .lambda()
                    .to_vec(),
            );
        }
        Ok((out, redraws))
    });
    let mut points = Vec::with_capacity(samples);
    let mut redraws = 0;
    for part in parts {
        let (p, r) = part?;
        points.extend(p);
        redraws += r;
    }

    let mut hist = vec![vec![0u64; m]; bins];
    for p in &points {
        for (j, &l) in p.iter().enumerate() {
            let b = ((l * bins as f64) as usize).min(bins - 1);
            hist[b][j] += 1;
        }
    }

    let laws = if m == 1 {
        let a = k.alpha + 1.0;
        let b = k.beta + 1.0;
        let law = |x, y| Beta::new(x, y).map_err(|e| Error::Domain(e.to_string()));
        Some((law(a, b)?, law(b, a)?))
    } else {
        None
    };

    let bins_out = hist
        .into_iter()
        .enumerate()
        .map(|(b, counts)| {
            let lo = b as f64 / bins as f64;
            let hi = (b + 1) as f64 / bins as f64;
            let (ea, ec) = match &laws {
                Some((stated, swapped)) => (
                    Some(stated.cdf(hi) - stated.cdf(lo)),
                    Some(swapped.cdf(hi) - swapped.cdf(lo)),
                ),
                None => (None, None),
            };
            HistBin {
                lo,
                hi,
                counts,
                expected_as_stated: ea,
                expected_complement_swapped: ec,
            }
        })
        .collect();

    let (ks_as_stated, ks_complement_swapped) = match &laws {
        Some((stated, swapped)) => {
            let mut xs: Vec<f64> = points.iter().map(|p| p[0]).collect();
            xs.sort_by(f64::total_cmp);
            (
                Some(ks_distance(&xs, |x| stated.cdf(x))),
                Some(ks_distance(&xs, |x| swapped.cdf(x))),
            )
        }
        None => (None, None),
    };

    Ok(DensityReport {
        n,
        i,
        l: ell,
        m,
        samples,
        seed: plan.seed,
        redraws,
        bins: bins_out,
        ks_as_stated,
        ks_complement_swapped,
    })
}
