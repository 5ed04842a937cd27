//! Browser bindings for three operations: the hyperbola scan, the staircase
//! geometry behind it, and the capacity of a hooked rectangle. Each returns
//! a JSON string; the plain functions are usable natively as well.

use bitree_core::capacity::{bitree_capacity, capacity_estimate, CapacityEstimate, QpOptions, Target};
use bitree_core::counterexamples::{
    hyperbola_height, hyperbola_stats, scenario_hyperbola, u_count, ScenarioOptions,
};
use bitree_core::harness::ScanRow;
use bitree_core::Grain;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest N drawn as a staircase.
pub const MAX_STAIRCASE_N: u64 = 4096;
/// Largest grain for the in-browser capacity solve.
pub const MAX_WEB_CAPACITY_GRAIN: u32 = 5;

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Scan rows for a comma-separated list of N.
pub fn scan_json(list: &str, paper_a: bool) -> Result<String, String> {
    let ns = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<u64>().map_err(|_| format!("not an integer: {s:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    if ns.is_empty() {
        return Err("no N given".into());
    }
    let opts = ScenarioOptions {
        paper_a,
        ..Default::default()
    };
    let rows = ns
        .into_iter()
        .map(|n| scenario_hyperbola(n, opts).map(|r| ScanRow::from(&r)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    to_json(&rows)
}

#[derive(Serialize)]
struct Staircase {
    n: u64,
    /// Column heights `h(m)` for `m = 0..=n`.
    heights: Vec<u64>,
    f_a: u64,
    b_a: u64,
    witness_m: u64,
    witness_k: u64,
    u: u64,
}

/// Column heights of the hyperbola staircase with its statistics.
pub fn staircase_json(n: u64) -> Result<String, String> {
    if !(2..=MAX_STAIRCASE_N).contains(&n) {
        return Err(format!("N must lie in 2..={MAX_STAIRCASE_N}"));
    }
    let s = hyperbola_stats(n);
    to_json(&Staircase {
        n,
        heights: (0..=n).map(|m| hyperbola_height(n, m).unwrap_or(0)).collect(),
        f_a: s.f_a,
        b_a: s.b_a,
        witness_m: s.witness.m,
        witness_k: s.witness.k,
        u: u_count(n),
    })
}

#[derive(Serialize)]
struct CapacityView {
    value: f64,
    lower_bound: f64,
    iterations: usize,
    /// `1/((j_h+1)(j_v+1))`, the uniform-on-ancestors bound.
    ancestor_bound: f64,
    /// `1/(j_h·j_v)`; `None` when a side has full length.
    estimate: Option<f64>,
}

/// Capacity of the hooked rectangle with parameters `(m, k)` at grain `n`.
pub fn capacity_json(n: u32, m: u32, k: u32) -> Result<String, String> {
    if n > MAX_WEB_CAPACITY_GRAIN {
        return Err(format!("N must be at most {MAX_WEB_CAPACITY_GRAIN} here"));
    }
    let grain = Grain::new(n).map_err(|e| e.to_string())?;
    let r = grain.hooked(m, k).map_err(|e| e.to_string())?;
    let res = bitree_capacity(&Target::Rect(r), grain, &QpOptions::default()).map_err(|e| e.to_string())?;
    let levels = f64::from((r.h.level + 1) * (r.v.level + 1));
    to_json(&CapacityView {
        value: res.value,
        lower_bound: res.lower_bound,
        iterations: res.iterations,
        ancestor_bound: 1.0 / levels,
        estimate: match capacity_estimate(&r) {
            CapacityEstimate::Finite(_) => Some(1.0 / f64::from(r.h.level * r.v.level)),
            CapacityEstimate::Infinite => None,
        },
    })
}

#[wasm_bindgen]
pub fn scan_hyperbola(list: &str, paper_a: bool) -> Result<String, JsError> {
    scan_json(list, paper_a).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn staircase(n: u32) -> Result<String, JsError> {
    staircase_json(u64::from(n)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hooked_capacity(n: u32, m: u32, k: u32) -> Result<String, JsError> {
    capacity_json(n, m, k).map_err(|e| JsError::new(&e))
}
