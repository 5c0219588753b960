//! WebAssembly exports for the static demo page in `www/`.

pub mod api;

use wasm_bindgen::prelude::*;

fn js(e: propci_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// JSON array of method ids.
#[wasm_bindgen(js_name = methodIds)]
pub fn method_ids() -> String {
    api::method_ids().to_string()
}

/// JSON array with one interval per method.
#[wasm_bindgen(js_name = intervalTable)]
pub fn interval_table(x: u32, n: u32, alpha: f64) -> Result<String, JsError> {
    api::interval_table(x.into(), n.into(), alpha)
        .map(|v| v.to_string())
        .map_err(js)
}

#[wasm_bindgen(js_name = errorCurve)]
#[allow(clippy::too_many_arguments)]
pub fn error_curve(
    method: &str,
    regime: &str,
    n: u32,
    alpha: f64,
    or_s: f64,
    lambda_min: f64,
    lambda_max: f64,
    points: u32,
) -> Result<Vec<f64>, JsError> {
    api::error_curve_flat(
        method,
        regime,
        n.into(),
        alpha,
        or_s,
        lambda_min,
        lambda_max,
        points as usize,
    )
    .map_err(js)
}

#[wasm_bindgen(js_name = halfWidthRatioCurve)]
#[allow(clippy::too_many_arguments)]
pub fn half_width_ratio_curve(
    method: &str,
    reference: &str,
    n: u32,
    alpha: f64,
    or_s: f64,
    lambda_min: f64,
    lambda_max: f64,
    points: u32,
) -> Result<Vec<f64>, JsError> {
    api::half_width_ratio_flat(
        method,
        reference,
        n.into(),
        alpha,
        or_s,
        lambda_min,
        lambda_max,
        points as usize,
    )
    .map_err(js)
}
