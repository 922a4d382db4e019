//! Closed-form reference trajectories and escape conditions.
//!
//! Deliberately self-contained: nothing here calls into the model or dynamics code.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub formula_id: &'static str,
    pub inputs: Vec<(&'static str, f64)>,
    pub value: f64,
}

/// Free Gaussian packet: `X(t) = sqrt(1 + t^2) (X0 + V0 atan t)`.
pub fn free_gaussian_trajectory(x0: f64, v0: f64, t: f64) -> f64 {
    (1.0 + t * t).sqrt() * (x0 + v0 * t.atan())
}

/// Escape of a free-packet trajectory from the unit-`sigma(t)` bulk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeVerdict {
    pub escapes: bool,
    /// Time after which `X(t) / sigma(t) > 1`.
    pub crossing_time: Option<f64>,
}

/// Escapes iff `V0 > 2 (1 - X0) / pi`, crossing at `tan((1 - X0) / V0)`.
/// Defined for `0 <= X0 < 1`, `V0 > 0`.
pub fn free_gaussian_escape(x0: f64, v0: f64) -> Result<EscapeVerdict> {
    if !((0.0..1.0).contains(&x0) && v0 > 0.0) {
        return Err(Error::Domain(format!(
            "escape criterion needs 0 <= X0 < 1 and V0 > 0, got X0 = {x0}, V0 = {v0}"
        )));
    }
    let escapes = v0 > 2.0 * (1.0 - x0) / std::f64::consts::PI;
    Ok(EscapeVerdict {
        escapes,
        crossing_time: escapes.then(|| ((1.0 - x0) / v0).tan()),
    })
}

/// Coherent state: `X(t) = X0 + V0 t + a (cos t - 1)`.
pub fn coherent_trajectory(x0: f64, v0: f64, a: f64, t: f64) -> f64 {
    x0 + v0 * t + a * (t.cos() - 1.0)
}

/// Named evaluation for table output.
pub fn evaluate(formula_id: &str, inputs: &[f64]) -> Result<OracleResult> {
    let need = |n: usize| {
        if inputs.len() == n {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{formula_id} takes {n} inputs, got {}",
                inputs.len()
            )))
        }
    };
    let (id, names, value): (&'static str, &[&'static str], f64) = match formula_id {
        "free_gaussian_trajectory" => {
            need(3)?;
            (
                "free_gaussian_trajectory",
                &["X0", "V0", "t"],
                free_gaussian_trajectory(inputs[0], inputs[1], inputs[2]),
            )
        }
        "free_gaussian_escape" => {
            need(2)?;
            let v = free_gaussian_escape(inputs[0], inputs[1])?;
            (
                "free_gaussian_escape",
                &["X0", "V0"],
                v.crossing_time.unwrap_or(f64::INFINITY),
            )
        }
        "coherent_trajectory" => {
            need(4)?;
            (
                "coherent_trajectory",
                &["X0", "V0", "a", "t"],
                coherent_trajectory(inputs[0], inputs[1], inputs[2], inputs[3]),
            )
        }
        other => return Err(Error::Domain(format!("unknown oracle {other}"))),
    };
    Ok(OracleResult {
        formula_id: id,
        inputs: names.iter().copied().zip(inputs.iter().copied()).collect(),
        value,
    })
}
