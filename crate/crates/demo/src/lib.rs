//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The plain functions carry the logic and are tested natively; the
//! `wasm_*` exports only convert errors into JavaScript exceptions.

use ucp_core::analysis::{k_sweep, rho_k_grid, Method};
use ucp_core::geometry::build_layout_capped;
use ucp_core::PotentialSpec;
use wasm_bindgen::prelude::*;

/// Leaf segments beyond this are not drawn.
pub const MAX_DRAWN_SEGMENTS: usize = 20_000;
/// Grid nodes beyond this are refused to keep the page responsive.
pub const MAX_GRID_NODES: usize = 400_000;

#[allow(clippy::too_many_arguments)]
fn spec(n: u32, rho: f64, mu: f64, nu: f64, stages: u32, length: f64, height: f64) -> Result<PotentialSpec, String> {
    let spec = PotentialSpec::new(n as usize, rho, mu, nu, stages as usize, length, height);
    spec.check().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// `T(k)` at `points` uniform k values in `[k_min, k_max]`.
#[allow(clippy::too_many_arguments)]
pub fn transmission_curve(
    n: u32,
    rho: f64,
    mu: f64,
    nu: f64,
    stages: u32,
    length: f64,
    height: f64,
    k_min: f64,
    k_max: f64,
    points: u32,
) -> Result<Vec<f64>, String> {
    let spec = spec(n, rho, mu, nu, stages, length, height)?;
    let table = k_sweep(&spec, k_min, k_max, points as usize, Method::Closed).map_err(|e| e.to_string())?;
    Ok(table.t)
}

/// Segment endpoints flattened as `[start0, end0, start1, end1, …]`.
pub fn layout_segments(n: u32, rho: f64, mu: f64, nu: f64, stages: u32, length: f64) -> Result<Vec<f64>, String> {
    let spec = spec(n, rho, mu, nu, stages, length, 0.0)?;
    let layout = build_layout_capped(&spec, MAX_DRAWN_SEGMENTS).map_err(|e| e.to_string())?;
    Ok(layout.segments.iter().flat_map(|&(a, b)| [a, b]).collect())
}

/// Row-major `T(ρ, k)`; rows whose ρ violates the constraints are NaN.
#[allow(clippy::too_many_arguments)]
pub fn density_grid(
    n: u32,
    mu: f64,
    nu: f64,
    stages: u32,
    length: f64,
    height: f64,
    rho_min: f64,
    rho_max: f64,
    n_rho: u32,
    k_min: f64,
    k_max: f64,
    n_k: u32,
) -> Result<Vec<f64>, String> {
    if n_rho as usize * n_k as usize > MAX_GRID_NODES {
        return Err(format!("grid of {} nodes exceeds {MAX_GRID_NODES}", n_rho as usize * n_k as usize));
    }
    // ρ is a placeholder here; each row substitutes its own value
    let template = PotentialSpec::new(n as usize, rho_max, mu, nu, stages as usize, length, height);
    let grid = rho_k_grid(&template, rho_min, rho_max, n_rho as usize, k_min, k_max, n_k as usize)
        .map_err(|e| e.to_string())?;
    Ok(grid.t)
}

#[wasm_bindgen(js_name = transmissionCurve)]
#[allow(clippy::too_many_arguments)]
pub fn wasm_transmission_curve(
    n: u32,
    rho: f64,
    mu: f64,
    nu: f64,
    stages: u32,
    length: f64,
    height: f64,
    k_min: f64,
    k_max: f64,
    points: u32,
) -> Result<Vec<f64>, JsError> {
    transmission_curve(n, rho, mu, nu, stages, length, height, k_min, k_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = layoutSegments)]
pub fn wasm_layout_segments(n: u32, rho: f64, mu: f64, nu: f64, stages: u32, length: f64) -> Result<Vec<f64>, JsError> {
    layout_segments(n, rho, mu, nu, stages, length).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = densityGrid)]
#[allow(clippy::too_many_arguments)]
pub fn wasm_density_grid(
    n: u32,
    mu: f64,
    nu: f64,
    stages: u32,
    length: f64,
    height: f64,
    rho_min: f64,
    rho_max: f64,
    n_rho: u32,
    k_min: f64,
    k_max: f64,
    n_k: u32,
) -> Result<Vec<f64>, JsError> {
    density_grid(n, mu, nu, stages, length, height, rho_min, rho_max, n_rho, k_min, k_max, n_k)
        .map_err(|e| JsError::new(&e))
}
