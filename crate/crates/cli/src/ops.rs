//! Operator lists for `spectral-error`.
//!
//! `--ops` takes either comma-separated built-in labels
//! (`central,one-sided,average-difference,fourier-spectral`, or the short
//! forms `cd2,od2,ad,ps`) or JSON: one stencil object, or a list mixing
//! labels and stencil objects. A value ending in `.json` is read as a file.
//!
//! Stencil object:
//!
//! ```json
//! { "label": "fwd", "difference": [[0, -1], [1, 1]], "derivative_order": 1,
//!   "average": [[0, 0.5], [1, 0.5]] }
//! ```
//!
//! `difference` lists `(offset, coefficient)` pairs in grid units; they are
//! scaled by `Δx^-derivative_order` (default 1). `average` is unscaled and
//! defaults to the identity.

use mixedderiv_core::spectral::{ClosedFormKind, LabeledPair};
use mixedderiv_core::{CirculantOperator, OperatorPair, PeriodicGrid};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StencilSpec {
    pub label: String,
    pub difference: Vec<(i64, f64)>,
    #[serde(default = "first_order")]
    pub derivative_order: i32,
    #[serde(default)]
    pub average: Option<Vec<(i64, f64)>>,
}

fn first_order() -> i32 {
    1
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpSpec {
    Builtin(ClosedFormKind),
    Stencil(StencilSpec),
}

pub const DEFAULT_OPS: [ClosedFormKind; 4] =
    [ClosedFormKind::Cd2, ClosedFormKind::Od2, ClosedFormKind::Ad, ClosedFormKind::Ps];

fn builtin(label: &str) -> Result<OpSpec, String> {
    label.trim().parse::<ClosedFormKind>().map(OpSpec::Builtin).map_err(|e| e.to_string())
}

fn from_json(v: &Value) -> Result<OpSpec, String> {
    match v {
        Value::String(s) => builtin(s),
        Value::Object(_) => StencilSpec::deserialize(v).map(OpSpec::Stencil).map_err(|e| format!("stencil: {e}")),
        _ => Err(format!("expected a label or stencil object, got {v}")),
    }
}

pub fn parse(spec: &str) -> Result<Vec<OpSpec>, String> {
    let text = if spec.trim_end().ends_with(".json") {
        std::fs::read_to_string(spec.trim()).map_err(|e| format!("{spec}: {e}"))?
    } else {
        spec.to_string()
    };
    let trimmed = text.trim();
    let ops = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        match serde_json::from_str::<Value>(trimmed).map_err(|e| e.to_string())? {
            Value::Array(items) => items.iter().map(from_json).collect::<Result<Vec<_>, _>>()?,
            other => vec![from_json(&other)?],
        }
    } else {
        trimmed.split(',').filter(|s| !s.trim().is_empty()).map(builtin).collect::<Result<Vec<_>, _>>()?
    };
    if ops.is_empty() {
        return Err("operator list is empty".into());
    }
    Ok(ops)
}

impl OpSpec {
    pub fn build(&self, grid: PeriodicGrid) -> Result<LabeledPair, String> {
        match self {
            OpSpec::Builtin(kind) => Ok(LabeledPair::builtin(*kind, grid)),
            OpSpec::Stencil(s) => {
                if s.label.is_empty() || s.label.contains(',') {
                    return Err(format!("stencil label `{}` must be non-empty without commas", s.label));
                }
                let scale = grid.dx().powi(-s.derivative_order);
                let scaled: Vec<(i64, f64)> = s.difference.iter().map(|&(j, c)| (j, c * scale)).collect();
                let d = CirculantOperator::from_stencil(grid, &scaled);
                if !d.is_difference() {
                    return Err(format!("stencil `{}`: coefficients must sum to zero", s.label));
                }
                let m = match &s.average {
                    Some(a) => CirculantOperator::from_stencil(grid, a),
                    None => CirculantOperator::from_stencil(grid, &[(0, 1.0)]),
                };
                let pair = OperatorPair::new(d, m).map_err(|e| format!("stencil `{}`: {e}", s.label))?;
                Ok(LabeledPair { label: s.label.clone(), pair, closed_form: None })
            }
        }
    }
}
