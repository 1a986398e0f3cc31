//! Browser bindings for three interactive views:
//!
//! * [`spectrum`]: closed-form spectrum of `3 P_g ∧ I` for chosen pairing
//!   coefficients, checked against direct diagonalization;
//! * [`bound_curves`]: dual-P, B/C and strengthened-B bounds against `n`;
//! * [`interpolated_verdicts`]: condition verdicts along
//!   `λ P_extr + (1−λ)(I − P_extr)/(dim − 1)`.
//!
//! Every export returns a JSON string; the `*_json` functions are the same
//! computations as plain Rust for native use and tests.

use nrep::canonical::{canonical_decompose, DEFAULT_RANK_TOLERANCE};
use nrep::conditions::{self, b_condition, c_condition, dual_p_condition, LambdaMode, DEFAULT_TOL};
use nrep::sampling::{extreme_geminal, interpolated_family};
use nrep::spectral3::{analytic_spectrum3, lambda_max3, verify_against_lift, MAX_NUMERIC_N};
use nrep::{binomial, Complex64, WaveFunction};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `n` accepted by the views.
pub const MAX_N: usize = MAX_NUMERIC_N;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `g ∝ Σ_k ξ_k |2k, 2k+1⟩`, normalized. Zero coefficients are dropped.
pub fn geminal_from_xi(n: usize, xi: &[f64]) -> Result<WaveFunction, String> {
    if !(3..=MAX_N).contains(&n) {
        return Err(format!("n must lie in 3..={MAX_N}"));
    }
    if 2 * xi.len() > n {
        return Err(format!(
            "{} pairs need at least {} orbitals",
            xi.len(),
            2 * xi.len()
        ));
    }
    if xi.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err("pairing coefficients must be finite and nonnegative".into());
    }
    let terms: Vec<([usize; 2], Complex64)> = xi
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(k, &x)| ([2 * k, 2 * k + 1], Complex64::new(x, 0.0)))
        .collect();
    if terms.is_empty() {
        return Err("at least one coefficient must be positive".into());
    }
    let refs: Vec<(&[usize], Complex64)> = terms.iter().map(|(o, c)| (&o[..], *c)).collect();
    WaveFunction::from_terms(n, 2, &refs)
        .and_then(|g| g.normalized())
        .map_err(err)
}

pub fn spectrum_json(n: usize, xi: &[f64]) -> Result<Value, String> {
    let g = geminal_from_xi(n, xi)?;
    let form = canonical_decompose(&g, DEFAULT_RANK_TOLERANCE).map_err(err)?;
    let spectrum = analytic_spectrum3(&form, &g).map_err(err)?;
    let check = verify_against_lift(&g, DEFAULT_RANK_TOLERANCE).map_err(err)?;
    let lambda_max = lambda_max3(&form, n).map_err(err)?;
    let pairs: Vec<Value> = spectrum
        .pair_eigs
        .iter()
        .map(|p| json!({ "pair": p.pair, "xi": form.xi[p.pair], "value": p.value, "multiplicity": 2 }))
        .collect();
    Ok(json!({
        "n": n,
        "dim": binomial(n, 3),
        "xi": form.xi,
        "one_rank": form.one_rank,
        "pairs": pairs,
        "unit_eigenvalues": spectrum.tail_eigs.len(),
        "kernel_dim": spectrum.kernel_dim,
        "generic_kernel_dim": spectrum.generic_kernel_dim(),
        "lambda_max": lambda_max,
        "dual_p_bound": lambda_max / 3.0,
        "numeric_deviation": check.max_deviation(),
    }))
}

pub fn bound_curves_json(n_max: usize) -> Result<Value, String> {
    if !(4..=MAX_N).contains(&n_max) {
        return Err(format!("n_max must lie in 4..={MAX_N}"));
    }
    let mut rows = Vec::new();
    for n in (4..=n_max).step_by(2) {
        let r = conditions::compare_bounds(n).map_err(err)?;
        rows.push(json!({
            "n": n,
            "dual_p": r.dual_p,
            "b_c": r.b,
            "strengthened_b": r.strengthened_b,
            "lambda_min_b": r.lambda_min_b,
        }));
    }
    Ok(Value::Array(rows))
}

pub fn interpolated_verdicts_json(n: usize, steps: usize) -> Result<Value, String> {
    if !n.is_multiple_of(2) || !(4..=MAX_N).contains(&n) {
        return Err(format!("n must be even and lie in 4..={MAX_N}"));
    }
    if !(1..=200).contains(&steps) {
        return Err("steps must lie in 1..=200".into());
    }
    let g = extreme_geminal(n).map_err(err)?;
    let mut rows = Vec::new();
    for k in 0..=steps {
        let lambda = k as f64 / steps as f64;
        let d = interpolated_family(&g, lambda).map_err(err)?;
        let dual = dual_p_condition(&d, &g, 3, LambdaMode::Analytic, DEFAULT_TOL).map_err(err)?;
        let b = b_condition(&d, &g, 3, DEFAULT_TOL).map_err(err)?;
        let c = c_condition(&d, &g, 3, DEFAULT_TOL).map_err(err)?;
        rows.push(json!({
            "lambda": lambda,
            "value": dual.value,
            "dual_p": { "bound": dual.bound, "passed": dual.passed },
            "b": { "bound": b.bound, "passed": b.passed },
            "c": { "bound": c.bound, "passed": c.passed },
            "witness": b.passed && c.passed && !dual.passed,
        }));
    }
    Ok(Value::Array(rows))
}

fn to_js(result: Result<Value, String>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

/// Spectrum of `3 P_g ∧ I` for `g ∝ Σ ξ_k |2k, 2k+1⟩` on `n` orbitals.
#[wasm_bindgen]
pub fn spectrum(n: usize, xi: Vec<f64>) -> Result<String, JsError> {
    to_js(spectrum_json(n, &xi))
}

/// Bound rows for even `n` from 4 to `n_max`.
#[wasm_bindgen]
pub fn bound_curves(n_max: usize) -> Result<String, JsError> {
    to_js(bound_curves_json(n_max))
}

/// Verdicts at `λ = k/steps`, `k = 0..=steps`.
#[wasm_bindgen]
pub fn interpolated_verdicts(n: usize, steps: usize) -> Result<String, JsError> {
    to_js(interpolated_verdicts_json(n, steps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_pairs_give_extreme_spectrum() {
        let v = spectrum_json(4, &[1.0, 1.0]).unwrap();
        assert_eq!(v["kernel_dim"], 0);
        assert!((v["lambda_max"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        assert!(v["numeric_deviation"].as_f64().unwrap() < 1e-10);
    }

    #[test]
    fn single_pair_is_slater() {
        let v = spectrum_json(5, &[2.0]).unwrap();
        assert_eq!(v["pairs"].as_array().unwrap().len(), 0);
        assert_eq!(v["unit_eigenvalues"], 3);
        assert_eq!(v["kernel_dim"], 7);
        assert_eq!(v["lambda_max"], 1.0);
    }

    #[test]
    fn rejects_bad_xi() {
        assert!(spectrum_json(4, &[1.0, 1.0, 1.0]).is_err());
        assert!(spectrum_json(4, &[0.0, 0.0]).is_err());
        assert!(spectrum_json(4, &[-1.0]).is_err());
        assert!(spectrum_json(13, &[1.0]).is_err());
    }

    #[test]
    fn bound_curve_rows() {
        let rows = bound_curves_json(8).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 3);
        for r in rows {
            let n = r["n"].as_f64().unwrap();
            assert!((r["dual_p"].as_f64().unwrap() - (1.0 - 2.0 / n) / 3.0).abs() < 1e-12);
            assert!((r["b_c"].as_f64().unwrap() - 0.5 * (1.0 - 1.0 / n)).abs() < 1e-12);
        }
    }

    #[test]
    fn verdicts_contain_witnesses() {
        let rows = interpolated_verdicts_json(4, 20).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 21);
        let witnesses: Vec<f64> = rows
            .iter()
            .filter(|r| r["witness"] == true)
            .map(|r| r["lambda"].as_f64().unwrap())
            .collect();
        assert!(witnesses.iter().any(|&l| (l - 0.3).abs() < 1e-12));
        assert!(rows[0]["dual_p"]["passed"] == true);
        assert!(rows[20]["b"]["passed"] == false);
        assert!(interpolated_verdicts_json(5, 10).is_err());
    }
}
