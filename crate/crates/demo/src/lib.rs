//! WebAssembly entry points for the static demo page in `www/`.
//!
//! Every function returns a JSON string, or an error message.

use amalg::linalg::{c, Mat};
use amalg::nc::{count_nc, enumerate_nc};
use amalg::randmat::{band_semicircle_verdict, haar_conjugation_experiment, simulate_band, HaarConfig, VarianceProfile};
use serde_json::json;
use wasm_bindgen::prelude::wasm_bindgen;

/// Partitions are listed only up to this size; counts go further.
pub const LIST_CAP: usize = 8;
/// Keep a single demo request well under a few seconds in the browser.
pub const MAX_BAND_N: usize = 400;
pub const MAX_HAAR_K: usize = 64;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `{n, count, partitions}` with 1-based blocks; `partitions` is null
/// above [`LIST_CAP`].
#[wasm_bindgen]
pub fn nc_partitions(n: usize) -> Result<String, String> {
    let count = count_nc(n).map_err(err)?;
    let partitions = if n <= LIST_CAP {
        let all = enumerate_nc(n).map_err(err)?;
        Some(all.iter().map(|p| p.blocks().to_vec()).collect::<Vec<_>>())
    } else {
        None
    };
    Ok(json!({ "n": n, "count": count, "partitions": partitions }).to_string())
}

/// Named variance profiles on a 64-cell grid.
pub fn profile(name: &str) -> Result<VarianceProfile, String> {
    let f: fn(f64, f64) -> f64 = match name {
        "constant" => |_, _| 1.0,
        "product" => |x, y| 1.0 + (x - 0.5) * (y - 0.5),
        "cosine" => |x, y| 1.0 + (2.0 * std::f64::consts::PI * (x - y)).cos(),
        "sum" => |x, y| x + y,
        "corner" => |x, y| if x < 0.5 && y < 0.5 { 2.0 } else { 0.5 },
        other => return Err(format!("unknown profile {other:?}")),
    };
    VarianceProfile::from_fn(64, f).map_err(err)
}

/// Eigenvalue histogram of Gaussian band matrices with the named profile,
/// with the limit-law verdict: `{simulation, verdict}`.
#[wasm_bindgen]
pub fn band_spectrum(profile_name: &str, n: usize, trials: usize, bins: usize, seed: u64) -> Result<String, String> {
    if n > MAX_BAND_N {
        return Err(format!("n is capped at {MAX_BAND_N} in the demo"));
    }
    let sigma = profile(profile_name)?;
    let simulation = simulate_band(n, &sigma, trials, bins, seed).map_err(err)?;
    let verdict = band_semicircle_verdict(&sigma, 8, 1e-9).map_err(err)?;
    Ok(json!({ "profile": profile_name, "simulation": simulation, "verdict": verdict }).to_string())
}

/// Decay of `‖E_D(u)‖`, `‖E_D(u²)‖` and of the mixed cumulants under
/// block-Haar conjugation, `ks` comma separated.
#[wasm_bindgen]
pub fn haar_decay(d: usize, ks: &str, trials: usize, seed: u64) -> Result<String, String> {
    let ks: Vec<usize> = ks
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("bad k {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if ks.iter().any(|&k| k > MAX_HAAR_K) {
        return Err(format!("k is capped at {MAX_HAAR_K} in the demo"));
    }
    if d == 0 {
        return Err("d must be positive".into());
    }
    let cfg = HaarConfig { d, ks, trials, cumulant_trials: 2, seed, ..HaarConfig::default() };
    // Diagonal 1, -1, 1, ... with 0.5 off the diagonal.
    let b = Mat::from_fn(d, d, |i, j| if i == j { c(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0) } else { c(0.5, 0.0) });
    let report = haar_conjugation_experiment(&cfg, &b).map_err(err)?;
    serde_json::to_string(&report).map_err(err)
}
