//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export simulates one sequence family on the reference noise model at
//! coupling `phi = J t_g` and returns the per-member statistic as a
//! `Float64Array`. Exact probability tables are used throughout.

use std::f64::consts::PI;

use ctxdep::analysis::detectors::{cyclic_fidelities, repetition_series};
use ctxdep::analysis::AnalysisOptions;
use ctxdep::experiment::{
    cyclic_family, evaluate_family, permutation_family, repetition_family, FamilyTables, Sequence, SequenceFamily,
    Shots,
};
use ctxdep::linalg::log_abs_det;
use ctxdep::noise::{GateSpec, NoiseParams, TwoQubitModel};
use wasm_bindgen::prelude::*;

/// Largest family or sequence size accepted from the page.
pub const MAX_SIZE: usize = 2000;

fn tables(phi: f64, family: &SequenceFamily, reference: &Sequence) -> Result<FamilyTables, String> {
    if !phi.is_finite() {
        return Err(format!("phi must be finite, got {phi}"));
    }
    let gates = family.members.iter().flat_map(|s| s.gates.iter().copied());
    let model = TwoQubitModel::new(NoiseParams::reference().with_phi(phi))
        .and_then(|m| m.with_gates(gates))
        .map_err(|e| e.to_string())?;
    evaluate_family(family, reference, &model, Shots::Exact, 0, "demo").map_err(|e| e.to_string())
}

fn check_size(name: &str, value: usize) -> Result<(), String> {
    if value == 0 || value > MAX_SIZE {
        return Err(format!("{name} must lie in 1..={MAX_SIZE}, got {value}"));
    }
    Ok(())
}

/// `log|det P|` for members `k = 1..=n+1` of the `I^n X180^n -> (X180 I)^n` family.
pub fn permutation_values(phi: f64, n: usize) -> Result<Vec<f64>, String> {
    check_size("n", n)?;
    let family = permutation_family(GateSpec::idle(), GateSpec::x(PI), n);
    let ft = tables(phi, &family, &Sequence::empty())?;
    Ok(ft.tables.iter().map(|t| log_abs_det(&t.entries)).collect())
}

/// `F^(r)` for every rotation of `X180 I^idles`, against the empty reference.
pub fn cyclic_values(phi: f64, idles: usize, r: usize) -> Result<Vec<f64>, String> {
    check_size("idles", idles)?;
    if !(1..=4).contains(&r) {
        return Err(format!("power r must lie in 1..=4, got {r}"));
    }
    let mut gates = vec![GateSpec::x(PI)];
    gates.extend(std::iter::repeat_n(GateSpec::idle(), idles));
    let ft = tables(phi, &cyclic_family(&Sequence::new("base", gates)), &Sequence::empty())?;
    ft.tables
        .iter()
        .map(|t| Ok(cyclic_fidelities(&t.entries, &ft.reference.entries).map_err(|e| e.to_string())?[r - 1]))
        .collect()
}

/// `log|det P(block^m)|` for `m = 0, step, 2 step, ..., <= m_max`; `block`
/// uses the gate-token syntax, e.g. `"X180 Y180"` or `"I*2"`.
pub fn repetition_values(phi: f64, block: &str, m_max: u32, step: u32) -> Result<Vec<f64>, String> {
    let block = Sequence::parse("block", block).map_err(|e| e.to_string())?;
    if block.is_empty() {
        return Err("block needs at least one gate".into());
    }
    if step == 0 {
        return Err("step must be positive".into());
    }
    check_size("m_max * block length", m_max as usize * block.len())?;
    let ms: Vec<u32> = (0..=m_max).step_by(step as usize).collect();
    let ft = tables(phi, &repetition_family(&block.gates, &ms), &Sequence::empty())?;
    let series = repetition_series(&ft, None, &AnalysisOptions::default()).map_err(|e| e.to_string())?;
    Ok(series.iter().map(|p| p.value).collect())
}

#[wasm_bindgen]
pub fn permutation_curve(phi: f64, n: usize) -> Result<Vec<f64>, JsError> {
    permutation_values(phi, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cyclic_fidelity_curve(phi: f64, idles: usize, r: usize) -> Result<Vec<f64>, JsError> {
    cyclic_values(phi, idles, r).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn repetition_curve(phi: f64, block: &str, m_max: u32, step: u32) -> Result<Vec<f64>, JsError> {
    repetition_values(phi, block, m_max, step).map_err(|e| JsError::new(&e))
}
