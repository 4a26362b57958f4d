//! Browser front end for `grassmann-invariants`.
//!
//! Three operations are exported, each returning a JSON string:
//! [`constants`], [`density`] and [`verify_theorem2`]. Everything runs on one
//! thread, so the same calls work natively (used by the tests) and in wasm.

use grassmann_invariants::{
    density_report, theorem2_constants, verify_theorem2 as verify, Convention, McPlan, SpectralFn,
};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bound on samples per call, to keep the page responsive.
pub const MAX_SAMPLES: usize = 200_000;

fn check_samples(samples: usize) -> Result<(), String> {
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(format!(
            "samples must be in 2..={MAX_SAMPLES}, got {samples}"
        ));
    }
    Ok(())
}

pub fn constants_json(n: usize, i: usize, l: usize) -> Result<String, String> {
    let k = theorem2_constants(n, i, l).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n, "i": i, "l": l, "m": k.m,
        "alpha": k.alpha, "beta": k.beta,
        "c_m": k.c_m, "c": k.c, "c_simplex": k.c_simplex,
    })
    .to_string())
}

pub fn density_json(
    n: usize,
    i: usize,
    l: usize,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<String, String> {
    check_samples(samples)?;
    let r =
        density_report(n, i, l, samples, bins, &McPlan::single(seed)).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

pub fn verify_json(
    n: usize,
    i: usize,
    l: usize,
    f0: &str,
    samples: usize,
    convention: &str,
    seed: u64,
) -> Result<String, String> {
    check_samples(samples)?;
    let f0: SpectralFn = f0
        .parse()
        .map_err(|e: grassmann_invariants::Error| e.to_string())?;
    let convention: Convention = convention
        .parse()
        .map_err(|e: grassmann_invariants::Error| e.to_string())?;
    let r = verify(n, i, l, &f0, samples, 64, convention, &McPlan::single(seed))
        .map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

/// `c`, `α`, `β` and `m` for `(n, i, l)`.
#[wasm_bindgen]
pub fn constants(n: usize, i: usize, l: usize) -> Result<String, JsValue> {
    constants_json(n, i, l).map_err(|e| JsValue::from_str(&e))
}

/// Histogram of the canonical-angle spectrum of `samples` uniform subspaces.
#[wasm_bindgen]
pub fn density(
    n: usize,
    i: usize,
    l: usize,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<String, JsValue> {
    density_json(n, i, l, samples, bins, seed).map_err(|e| JsValue::from_str(&e))
}

/// Monte Carlo mean of `f0` over `G_{n,i}` against the eigenvalue integral.
#[wasm_bindgen]
pub fn verify_theorem2(
    n: usize,
    i: usize,
    l: usize,
    f0: &str,
    samples: usize,
    convention: &str,
    seed: u64,
) -> Result<String, JsValue> {
    verify_json(n, i, l, f0, samples, convention, seed).map_err(|e| JsValue::from_str(&e))
}
