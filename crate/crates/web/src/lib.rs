//! Browser bindings: three operations on the built-in Jacobi matrices, each
//! returning a JSON string for the page to plot.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use matmoment::jacobi::fixtures;
use matmoment::jacobi::BlockJacobiMatrix;
use matmoment::matkernel::{ComplexMatrix, C64};
use matmoment::nevanlinna::{stieltjes_invert, ContractionParam, IndeterminateModel, ModelParams, ROOT_TOL};
use matmoment::spectral::gauss_quadrature;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn fixture(name: &str) -> Result<BlockJacobiMatrix, String> {
    fixtures::by_name(name).ok_or_else(|| format!("unknown matrix {name:?}"))
}

fn ind_model() -> Result<IndeterminateModel, String> {
    IndeterminateModel::new(&fixtures::indeterminate(), &ModelParams::default()).map_err(|e| e.to_string())
}

/// Gauss quadrature of the `n`-block truncation: nodes and weight traces.
pub fn quadrature_json(name: &str, n: usize) -> Result<String, String> {
    let q = gauss_quadrature(&fixture(name)?, n).map_err(|e| e.to_string())?;
    let traces: Vec<f64> = q.weights().iter().map(|w| w.as_matrix().trace().re).collect();
    Ok(json!({ "nodes": q.nodes(), "weights": traces }).to_string())
}

/// Smoothed density `(1/π) Im m(x + iη)` of the solution attached to the
/// scalar contraction `v` for the indeterminate example.
pub fn density_json(v_re: f64, v_im: f64, eta: f64, lo: f64, hi: f64, points: usize) -> Result<String, String> {
    if !(lo < hi) || points < 2 {
        return Err("need lo < hi and at least two points".into());
    }
    let model = ind_model()?;
    let v = ContractionParam::Constant(ComplexMatrix::scalar(1, C64::new(v_re, v_im)));
    let grid: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
    let pts = stieltjes_invert(|z| model.transform_from_v(z, &v), &grid, eta).map_err(|e| e.to_string())?;
    if let Some(bad) = pts.iter().find(|p| p.density.is_none()) {
        // surface the first failure instead of drawing a gap
        model.transform_from_v(C64::new(bad.lambda, eta), &v).map_err(|e| e.to_string())?;
    }
    let density: Vec<f64> = pts.iter().map(|p| p.density.as_ref().map_or(f64::NAN, |d| d.as_matrix().trace().re)).collect();
    Ok(json!({ "x": grid, "density": density }).to_string())
}

/// Eigenvalues in `[lo, hi]` of the self-adjoint extension attached to
/// `U = e^{iθ}` for the indeterminate example.
pub fn spectrum_json(theta: f64, lo: f64, hi: f64) -> Result<String, String> {
    let model = ind_model()?;
    let u = ComplexMatrix::scalar(1, C64::from_polar(1.0, theta));
    let roots = model.extension_spectrum(&u, (lo, hi), 2000, ROOT_TOL).map_err(|e| e.to_string())?;
    let lambdas: Vec<f64> = roots.iter().map(|r| r.lambda).collect();
    Ok(json!({ "theta": theta, "roots": lambdas }).to_string())
}

#[wasm_bindgen]
pub fn quadrature(name: &str, n: usize) -> Result<String, JsValue> {
    quadrature_json(name, n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn density(v_re: f64, v_im: f64, eta: f64, lo: f64, hi: f64, points: usize) -> Result<String, JsValue> {
    density_json(v_re, v_im, eta, lo, hi, points).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn spectrum(theta: f64, lo: f64, hi: f64) -> Result<String, JsValue> {
    spectrum_json(theta, lo, hi).map_err(|e| JsValue::from_str(&e))
}
