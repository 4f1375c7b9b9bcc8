//! Browser bindings for three tree experiments on the free group of rank 2.
//! Every export returns a JSON string; errors become JavaScript exceptions.

use boundary_rep::counting::{equidistribution_streaming, equidistribution_transfer};
use boundary_rep::rep::tt::DEFAULT_ANNULUS_BUDGET;
use boundary_rep::rep::{coefficient_one, convergence_experiment, matrix_coefficient, SimpleFunction};
use boundary_rep::tree::{parse_cylinder_set, CylinderSet, ReducedWord, TreeModel};
use boundary_rep::{Error, ExactScalar, Result};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest `t` the page may ask for; `|S_t|` grows like `3^t`.
pub const MAX_T: u32 = 11;

fn model() -> TreeModel {
    TreeModel::free(2).expect("rank 2 is valid")
}

fn set(m: &TreeModel, s: &str) -> Result<CylinderSet> {
    parse_cylinder_set(m.rank(), s)
}

fn scalar(x: &ExactScalar) -> Value {
    json!({ "decimal": x.to_decimal_string(17), "exact": x.to_exact_string(), "float": x.to_f64() })
}

fn check_t(t_max: u32) -> Result<()> {
    if !(1..=MAX_T).contains(&t_max) {
        return Err(Error::Domain(format!("t must be in 1..={MAX_T}")));
    }
    Ok(())
}

/// `⟨ρ(γ)χ_U, χ_V⟩`; with both sets whole this is `⟨ρ(γ)1, 1⟩`.
pub fn coefficient_json(gamma: &str, u: &str, v: &str) -> Result<String> {
    let m = model();
    let g: ReducedWord = gamma.parse()?;
    m.check_word(&g)?;
    if g.len() > 16 {
        return Err(Error::Domain("keep |γ| ≤ 16 in the browser".into()));
    }
    let (su, sv) = (set(&m, u)?, set(&m, v)?);
    let value = if su.is_whole() && sv.is_whole() {
        coefficient_one(&m, &g)?
    } else {
        matrix_coefficient(
            &m,
            &g,
            &SimpleFunction::indicator(&su),
            &SimpleFunction::indicator(&sv),
        )?
    };
    Ok(json!({
        "gamma": g.to_string(),
        "length": g.len(),
        "value": scalar(&value),
    })
    .to_string())
}

/// Fraction of `γ ∈ S_t` with `γ⁻¹` heading into `U` and `γ` into `U′`,
/// for `t = 1..=t_max`, next to `ν(U)ν(U′)`.
pub fn equidistribution_json(u: &str, u_prime: &str, t_max: u32) -> Result<String> {
    check_t(t_max)?;
    let m = model();
    let (su, sp) = (set(&m, u)?, set(&m, u_prime)?);
    let mut rows = Vec::new();
    for t in 1..=t_max {
        let e = equidistribution_streaming(&m, &su, &sp, t as f64)?;
        let transfer = equidistribution_transfer(&m, &su, &sp, t as f64)
            .ok()
            .map(|x| x.count == e.count);
        rows.push(json!({
            "t": t,
            "s_t_size": e.s_t_size.to_string(),
            "count": e.count.to_string(),
            "freq": scalar(&e.freq),
            "target": scalar(&e.target),
            "abs_error": scalar(&e.abs_error),
            "transfer_agrees": transfer,
        }));
    }
    Ok(Value::Array(rows).to_string())
}

/// `⟨(ρ∘T_t^{χ_U})χ_V, χ_W⟩` for `t = 2..=t_max` against `ν(U∩W)ν(V)`.
pub fn convergence_json(u: &str, v: &str, w: &str, t_max: u32) -> Result<String> {
    check_t(t_max)?;
    if t_max < 2 {
        return Err(Error::Domain("need t ≥ 2".into()));
    }
    let m = model();
    let ts: Vec<f64> = (2..=t_max).map(f64::from).collect();
    let rows = convergence_experiment(
        &m,
        &set(&m, u)?,
        &set(&m, v)?,
        &set(&m, w)?,
        &ts,
        DEFAULT_ANNULUS_BUDGET,
    )?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "t": r.t,
                "s_t_size": r.s_t_size.to_string(),
                "value": scalar(&r.value),
                "target": scalar(&r.target),
                "abs_error": scalar(&r.abs_error),
            })
        })
        .collect();
    Ok(Value::Array(rows).to_string())
}

fn js(r: Result<String>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[wasm_bindgen]
pub fn coefficient(gamma: &str, u: &str, v: &str) -> std::result::Result<String, JsValue> {
    js(coefficient_json(gamma, u, v))
}

#[wasm_bindgen]
pub fn equidistribution(u: &str, u_prime: &str, t_max: u32) -> std::result::Result<String, JsValue> {
    js(equidistribution_json(u, u_prime, t_max))
}

#[wasm_bindgen]
pub fn convergence(u: &str, v: &str, w: &str, t_max: u32) -> std::result::Result<String, JsValue> {
    js(convergence_json(u, v, w, t_max))
}
