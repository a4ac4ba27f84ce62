//! Browser bindings: solve for the cubic structure constants, inspect the
//! differential-operator realization, and evaluate cyclotomic scalars.
//!
//! Every function returns a JSON string with either a `result` or an `error`
//! field.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fracsusy::gradesolve::{solve_structure_constants, Convention, Pin, SolveOptions, Subsystem};
use fracsusy::liealg::{builtin_rep, builtin_sl2, RepName};
use fracsusy::realize::{build_realization, verify_realization};
use fracsusy::scalar::{q_integer, q_pochhammer};
use fracsusy::{CyclotomicConfig, Error, Gen, Scalar};

fn wrap(r: Result<Value, Error>) -> String {
    match r {
        Ok(v) => json!({ "result": v }),
        Err(e) => json!({ "error": e.to_string() }),
    }
    .to_string()
}

pub fn solve_json(rep: &str, n: u32, pin: &str, graded_jacobi_only: bool) -> Result<Value, Error> {
    let cfg = CyclotomicConfig::get(n)?;
    let rep = RepName::parse(rep)?;
    let pin = match pin.trim() {
        "" => None,
        p => Some(Pin::parse(&cfg, p)?),
    };
    let opts = SolveOptions {
        convention: Convention::Cyclic,
        subsystem: if graded_jacobi_only { Subsystem::GradedJacobiOnly } else { Subsystem::Full },
        pin,
    };
    let (_, report) = solve_structure_constants(&builtin_sl2(&cfg), &builtin_rep(&cfg, rep), n as usize, &opts)?;
    Ok(serde_json::to_value(report).expect("report serializes"))
}

/// Solves for `b` with sl(2) and a built-in representation.
#[wasm_bindgen]
pub fn solve(rep: &str, n: u32, pin: &str, graded_jacobi_only: bool) -> String {
    wrap(solve_json(rep, n, pin, graded_jacobi_only))
}

pub fn operator_json(name: &str, m_max: usize) -> Result<Value, Error> {
    let real = build_realization(m_max)?;
    let op = match name {
        "L" => real.l.clone(),
        "D" => real.d_theta.clone(),
        other => {
            let g = Gen::parse(other).ok_or_else(|| Error::UnknownName(other.to_string()))?;
            real.operator(g).ok_or(Error::ForeignGenerator(g))?
        }
    };
    let mut images = Vec::new();
    for m in 0..=m_max {
        for k in 0..real.basis.n {
            let img: Vec<String> = op.image(m, k).into_iter().map(|(l, c)| format!("({c}) {l}")).collect();
            images.push(json!({
                "monomial": real.basis.label(real.basis.index(m, k)),
                "image": if img.is_empty() { "0".to_string() } else { img.join(" + ") },
                "exact": op.window().is_some_and(|w| m <= w),
            }));
        }
    }
    Ok(json!({ "operator": name, "z_shift": op.z_shift(), "images": images }))
}

/// Action of `X1..X3`, `Q1..Q3`, `K`, `L` or `D` on every `z^m θ^k`.
#[wasm_bindgen]
pub fn realization_operator(name: &str, m_max: usize) -> String {
    wrap(operator_json(name, m_max))
}

/// The full relation report of the realization.
#[wasm_bindgen]
pub fn realization_report(m_max: usize) -> String {
    wrap(verify_realization(m_max).map(|r| serde_json::to_value(r).expect("report serializes")))
}

pub fn scalar_json(n: u32, expr: &str) -> Result<Value, Error> {
    let cfg = CyclotomicConfig::get(n)?;
    let x = Scalar::parse(&cfg, expr)?;
    let z = x.to_complex();
    let table: Vec<Value> = (0..=n)
        .map(|k| {
            json!({
                "k": k,
                "q_integer": q_integer(&cfg, k).to_string(),
                "q_pochhammer": q_pochhammer(&cfg, k).to_string(),
            })
        })
        .collect();
    Ok(json!({
        "canonical": x.to_string(),
        "inverse": x.inv().ok().map(|i| i.to_string()),
        "numeric": [z.re, z.im],
        "table": table,
    }))
}

/// Canonical form, inverse and numeric value of a literal such as
/// `(1 - q)*(1 - q^2)`, with the `[k]_q` and `(q;q)_k` table for this `n`.
#[wasm_bindgen]
pub fn scalar(n: u32, expr: &str) -> String {
    wrap(scalar_json(n, expr))
}
