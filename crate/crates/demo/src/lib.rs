//! Browser bindings: build or pick a point set and inspect its harmonic
//! residuals, play the estimation game, and map the conditional score of a
//! product-rule POVM over the sphere. Every entry point returns JSON.

use povmquad::polyhedra;
use povmquad::quadrature::{parse_pointset, WeightMode, DEFAULT_TOLERANCE};
use povmquad::{
    certify, povm_from_quadrature, product_rule, run_game, score_by_direction, Direction,
    SphericalQuadrature,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest order accepted from the page; keeps each call well under a second.
pub const MAX_ORDER: usize = 40;
pub const MAX_TRIALS: usize = 2_000_000;

const LEBEDEV: [(usize, &str); 5] = [
    (3, include_str!("../../../grids/lebedev_003.txt")),
    (5, include_str!("../../../grids/lebedev_005.txt")),
    (7, include_str!("../../../grids/lebedev_007.txt")),
    (9, include_str!("../../../grids/lebedev_009.txt")),
    (11, include_str!("../../../grids/lebedev_011.txt")),
];

#[derive(Debug, Serialize)]
pub struct PointView {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub weight: f64,
}

#[derive(Debug, Serialize)]
pub struct RuleView {
    pub label: String,
    pub points: Vec<PointView>,
    /// Residual per degree l = 1..=l_max.
    pub residuals: Vec<f64>,
    pub strength: usize,
    pub tol: f64,
}

fn rule(kind: &str, order: usize) -> Result<SphericalQuadrature, String> {
    Ok(match kind {
        "product" => {
            if order == 0 || order > MAX_ORDER {
                return Err(format!("order must be in 1..={MAX_ORDER}"));
            }
            product_rule(order)
        }
        "antipodal" => polyhedra::antipodal_pair(),
        "tetrahedron" => polyhedra::tetrahedron(),
        "octahedron" => polyhedra::octahedron(),
        "cube" => polyhedra::cube(),
        "icosahedron" => polyhedra::icosahedron(),
        "lebedev" => {
            let (n, text) = LEBEDEV.iter().find(|(n, _)| *n == order).ok_or_else(|| {
                format!("Lebedev orders available: {:?}", LEBEDEV.map(|(n, _)| n))
            })?;
            parse_pointset(text, WeightMode::Explicit, format!("lebedev {n}"))
                .map_err(|e| e.to_string())?
                .quadrature
        }
        other => return Err(format!("unknown rule {other:?}")),
    })
}

pub fn rule_view(kind: &str, order: usize, l_max: usize) -> Result<RuleView, String> {
    let q = rule(kind, order)?;
    let l_max = l_max.clamp(1, MAX_ORDER + 2);
    let report = certify(&q, l_max, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let points = q
        .points()
        .iter()
        .map(|p| {
            let v = p.direction.to_cartesian();
            PointView {
                x: v.x,
                y: v.y,
                z: v.z,
                weight: p.weight,
            }
        })
        .collect();
    Ok(RuleView {
        label: q.label().to_owned(),
        points,
        residuals: report.residual_per_l,
        strength: report.strength,
        tol: report.tol,
    })
}

#[derive(Debug, Serialize)]
pub struct ScoreMap {
    pub copies: usize,
    pub elements: usize,
    pub optimal: f64,
    pub rows: usize,
    pub cols: usize,
    /// Row-major: row i at θ = π(i + ½)/rows, column j at φ = 2π(j + ½)/cols.
    pub scores: Vec<f64>,
}

pub fn score_map(copies: usize, rows: usize, cols: usize) -> Result<ScoreMap, String> {
    if copies == 0 || copies > MAX_ORDER {
        return Err(format!("copies must be in 1..={MAX_ORDER}"));
    }
    let (rows, cols) = (rows.clamp(2, 256), cols.clamp(2, 512));
    let p = povm_from_quadrature(&product_rule(copies), copies).map_err(|e| e.to_string())?;
    let grid: Vec<Direction> = (0..rows)
        .flat_map(|i| {
            (0..cols).map(move |j| {
                let theta = std::f64::consts::PI * (i as f64 + 0.5) / rows as f64;
                let phi = std::f64::consts::TAU * (j as f64 + 0.5) / cols as f64;
                Direction::new(theta, phi)
            })
        })
        .collect();
    Ok(ScoreMap {
        copies,
        elements: p.len(),
        optimal: (copies as f64 + 1.0) / (copies as f64 + 2.0),
        rows,
        cols,
        scores: score_by_direction(&p, &grid),
    })
}

pub fn play_json(copies: usize, trials: usize, seed: u64) -> Result<String, String> {
    if copies == 0 || copies > MAX_ORDER {
        return Err(format!("copies must be in 1..={MAX_ORDER}"));
    }
    if trials == 0 || trials > MAX_TRIALS {
        return Err(format!("trials must be in 1..={MAX_TRIALS}"));
    }
    let p = povm_from_quadrature(&product_rule(copies), copies).map_err(|e| e.to_string())?;
    run_game(&p, trials, seed)
        .and_then(|r| r.to_json())
        .map_err(|e| e.to_string())
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Points and per-degree residuals of a named rule.
#[wasm_bindgen]
pub fn quadrature(kind: &str, order: u32, l_max: u32) -> Result<String, JsError> {
    to_js(rule_view(kind, order as usize, l_max as usize))
}

/// Conditional score of the product-rule POVM on a θ-φ grid.
#[wasm_bindgen(js_name = scoreMap)]
pub fn score_map_js(copies: u32, rows: u32, cols: u32) -> Result<String, JsError> {
    to_js(score_map(copies as usize, rows as usize, cols as usize))
}

/// Monte Carlo estimation game with the product-rule POVM.
#[wasm_bindgen]
pub fn play(copies: u32, trials: u32, seed: u32) -> Result<String, JsError> {
    play_json(copies as usize, trials as usize, seed as u64).map_err(|e| JsError::new(&e))
}
