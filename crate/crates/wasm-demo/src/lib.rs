//! Browser bindings. Every export returns a JSON string; the `*_report`
//! functions hold the logic so native tests can call them without a JS host.

use balayage::balayage::{dyadic_balayage, poisson_l1, PoissonBalayage};
use balayage::characterization::{restricted_sup_dyadic, sandwich};
use balayage::constructions::{balayage_measure_from_function, dyadic_counterexample, poisson_staircase};
use balayage::measure::{carleson_constant, Measure};
use balayage::norms::{bmo_estimate_step, bmod_norm_sq, BmoParams};
use balayage::rational::{fmt_q, parse_q, to_f64};
use balayage::{square_function, StepFunction, Window};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_M: u32 = 12;
const MAX_N: u32 = 10;

fn steps(f: &StepFunction) -> Value {
    let pieces: Vec<Value> = f
        .pieces()
        .map(|(l, r, v)| json!([l.to_f64(), r.to_f64(), to_f64(v)]))
        .collect();
    Value::Array(pieces)
}

/// Staircase `μ_m` at scale `h`: Carleson data plus samples of both balayages.
pub fn staircase_report(m: u32, h: &str) -> Result<String, String> {
    if m > MAX_M {
        return Err(format!("m is capped at {MAX_M} in the demo"));
    }
    let h = parse_q(h).map_err(|e| e.to_string())?;
    let mu = poisson_staircase(m, &h).map_err(|e| e.to_string())?;
    let carl = carleson_constant(&mu);
    let p = PoissonBalayage::new(&mu);
    let (lo, hi) = mu.x_hull().expect("staircase is nonempty");
    let (a, b) = (to_f64(&lo) - 2.0 * to_f64(&h), to_f64(&hi) + 2.0 * to_f64(&h));
    let poisson = p.sample(a, b, (b - a) / 400.0);
    let sup = restricted_sup_dyadic(&mu).map_err(|e| e.to_string())?;
    Ok(json!({
        "m": m,
        "h": fmt_q(&h),
        "carl": fmt_q(carl.exact_value().expect("exact")),
        "witness": carl.dyadic_witness().map(|i| i.to_string()),
        "l1": fmt_q(&poisson_l1(&mu)),
        "restricted_sup": sup.value,
        "restricted_witness": sup.witness.to_string(),
        "poisson": poisson,
        "dyadic": steps(&dyadic_balayage(&mu)),
    })
    .to_string())
}

/// Dyadic counterexample `b_N`: `‖b_N‖²_{BMO^d} = N` against the square function.
pub fn counterexample_report(n: u32) -> Result<String, String> {
    if n == 0 || n > MAX_N {
        return Err(format!("N must be in 1..={MAX_N}"));
    }
    let b = dyadic_counterexample(n).map_err(|e| e.to_string())?;
    let s = square_function(&b, Window::covering(&b, 0)).map_err(|e| e.to_string())?.value;
    let mu = balayage_measure_from_function(&b, Window::covering(&b, 0)).map_err(|e| e.to_string())?;
    let bmo = bmo_estimate_step(&s, &BmoParams::default()).map_err(|e| e.to_string())?;
    Ok(json!({
        "n": n,
        "bmod_sq": fmt_q(bmod_norm_sq(&b).exact_value().expect("exact")),
        "carl": fmt_q(carleson_constant(&mu).exact_value().expect("exact")),
        "square_function_bmo": bmo.value,
        "square_function_l2_sq": fmt_q(&s.l2_norm_sq()),
        "b": steps(&b),
        "s": steps(&s),
    })
    .to_string())
}

/// Carleson constant and restricted-balayage sandwich of a measure given as JSON.
pub fn measure_report(measure_json: &str) -> Result<String, String> {
    let mu = Measure::from_json(measure_json).map_err(|e| e.to_string())?;
    let r = sandwich(&mu, false).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn staircase(m: u32, h: &str) -> Result<String, JsError> {
    staircase_report(m, h).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn counterexample(n: u32) -> Result<String, JsError> {
    counterexample_report(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn measure(measure_json: &str) -> Result<String, JsError> {
    measure_report(measure_json).map_err(|e| JsError::new(&e))
}
