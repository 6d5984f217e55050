//! Run configuration files.
//!
//! A config is one JSON document:
//!
//! ```json
//! {
//!   "equation": { "id": "sine_gordon", "params": {}, "pair": null },
//!   "grid": { "K": 64 },
//!   "time": { "T_final": 1.0, "dt": 0.001 },
//!   "method": "implicit_midpoint",
//!   "initial_data": { "generator": "projected_kink", "params": {}, "project": true },
//!   "monitors": ["F_d", "H_d"],
//!   "output": { "stride": 10 }
//! }
//! ```
//!
//! Required: `equation.id`, `grid.K`, `time.T_final`, `time.dt`,
//! `initial_data.generator`. `equation.pair` is `null` (the equation's own
//! pair), an operator name such as `"average_difference"` or
//! `"fourier_spectral_diff"`, or `{"compact": {"a":…, "b":…, "c":…,
//! "alpha":…, "beta":…}}`. Omitted monitors default to every monitor the
//! equation offers.

use std::fmt;
use std::path::Path;

use mixedderiv_core::equations::{lookup, InitialData, Params};
use mixedderiv_core::integrators::{available_monitors, Method, SimulationConfig};
use mixedderiv_core::{PairKind, StandardKind};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted field path, or `line:column` for syntax errors.
    pub location: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(location: &str, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError { location: location.to_string(), message: message.into() })
}

const SECTIONS: [&str; 7] = ["equation", "grid", "time", "method", "initial_data", "monitors", "output"];

pub fn load(path: &Path) -> Result<SimulationConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .or_else(|e| err(&path.display().to_string(), format!("cannot read config: {e}")))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<SimulationConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    from_value(&value)
}

fn object<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    v.as_object().map_or_else(|| err(at, "expected an object"), Ok)
}

fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], at: &str) -> Result<(), ConfigError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => err(&join(at, k), "unknown field"),
        None => Ok(()),
    }
}

fn join(at: &str, key: &str) -> String {
    if at.is_empty() {
        key.to_string()
    } else {
        format!("{at}.{key}")
    }
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value, ConfigError> {
    match map.get(key) {
        Some(Value::Null) | None => err(&join(at, key), "missing required field"),
        Some(v) => Ok(v),
    }
}

fn number(v: &Value, at: &str) -> Result<f64, ConfigError> {
    v.as_f64().map_or_else(|| err(at, "expected a number"), Ok)
}

fn count(v: &Value, at: &str) -> Result<usize, ConfigError> {
    match v.as_u64() {
        Some(n) => Ok(n as usize),
        None => err(at, "expected a non-negative integer"),
    }
}

fn string<'a>(v: &'a Value, at: &str) -> Result<&'a str, ConfigError> {
    v.as_str().map_or_else(|| err(at, "expected a string"), Ok)
}

fn params(v: Option<&Value>, at: &str) -> Result<Params, ConfigError> {
    let Some(v) = v.filter(|v| !v.is_null()) else {
        return Ok(Params::new());
    };
    object(v, at)?.iter().map(|(k, x)| Ok((k.clone(), number(x, &join(at, k))?))).collect()
}

fn pair(v: Option<&Value>) -> Result<Option<PairKind>, ConfigError> {
    const AT: &str = "equation.pair";
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) if s == "average_difference" => Ok(Some(PairKind::AverageDifference)),
        Some(Value::String(s)) => {
            s.parse::<StandardKind>().map(|k| Some(PairKind::Plain(k))).or_else(|e| err(AT, e.to_string()))
        }
        Some(Value::Object(m)) => {
            reject_unknown(m, &["compact"], AT)?;
            let at = "equation.pair.compact";
            let c = object(required(m, "compact", AT)?, at)?;
            reject_unknown(c, &["a", "b", "c", "alpha", "beta"], at)?;
            let get = |k: &str| c.get(k).map_or(Ok(0.0), |v| number(v, &join(at, k)));
            Ok(Some(PairKind::Compact {
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
                alpha: get("alpha")?,
                beta: get("beta")?,
            }))
        }
        Some(_) => err(AT, "expected null, an operator name or a compact object"),
    }
}

pub fn from_value(value: &Value) -> Result<SimulationConfig, ConfigError> {
    let root = object(value, "config")?;
    reject_unknown(root, &SECTIONS, "")?;

    let eq = object(required(root, "equation", "")?, "equation")?;
    reject_unknown(eq, &["id", "params", "pair"], "equation")?;
    let id = string(required(eq, "id", "equation")?, "equation.id")?;
    let entry = lookup(id).or_else(|e| err("equation.id", e.to_string()))?;
    let eq_params = entry
        .resolve_params(&params(eq.get("params"), "equation.params")?)
        .or_else(|e| err("equation.params", e.to_string()))?;
    let pair = pair(eq.get("pair"))?;

    let grid = object(required(root, "grid", "")?, "grid")?;
    reject_unknown(grid, &["K"], "grid")?;
    let nodes = count(required(grid, "K", "grid")?, "grid.K")?;

    let time = object(required(root, "time", "")?, "time")?;
    reject_unknown(time, &["T_final", "dt"], "time")?;
    let t_final = number(required(time, "T_final", "time")?, "time.T_final")?;
    let dt = number(required(time, "dt", "time")?, "time.dt")?;

    let method = match root.get("method") {
        None | Some(Value::Null) => Method::ImplicitMidpoint,
        Some(v) => string(v, "method")?.parse().or_else(|e: mixedderiv_core::Error| err("method", e.to_string()))?,
    };

    let init = object(required(root, "initial_data", "")?, "initial_data")?;
    reject_unknown(init, &["generator", "params", "project"], "initial_data")?;
    let generator = string(required(init, "generator", "initial_data")?, "initial_data.generator")?;
    let (initial_data, implied) =
        InitialData::from_params(generator, &params(init.get("params"), "initial_data.params")?)
            .or_else(|e| err("initial_data", e.to_string()))?;
    let project = match init.get("project") {
        None | Some(Value::Null) => implied,
        Some(Value::Bool(b)) => *b || implied,
        Some(_) => return err("initial_data.project", "expected a boolean"),
    };

    let output_stride = match root.get("output") {
        None | Some(Value::Null) => 1,
        Some(v) => {
            let out = object(v, "output")?;
            reject_unknown(out, &["stride"], "output")?;
            out.get("stride").map_or(Ok(1), |s| count(s, "output.stride"))?
        }
    };

    let mut config = SimulationConfig {
        equation: id.to_string(),
        params: eq_params,
        pair,
        nodes,
        t_final,
        dt,
        method,
        initial_data,
        project,
        monitors: Vec::new(),
        output_stride,
    };
    config.validate().or_else(|e| match e {
        mixedderiv_core::Error::InvalidParameter { name, reason } => err(&name, reason),
        other => err("config", other.to_string()),
    })?;
    let equation = config.build_equation().or_else(|e| err("equation", e.to_string()))?;
    let offered = available_monitors(&equation);
    config.monitors = match root.get("monitors") {
        None | Some(Value::Null) => offered,
        Some(Value::Array(items)) => {
            let mut names = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let at = format!("monitors[{i}]");
                let name = string(item, &at)?;
                if !offered.iter().any(|m| m == name) {
                    return err(&at, format!("unknown monitor `{name}` (available: {})", offered.join(", ")));
                }
                names.push(name.to_string());
            }
            names
        }
        Some(_) => return err("monitors", "expected a list of monitor names"),
    };
    Ok(config)
}

pub fn generator_name(data: &InitialData) -> &'static str {
    match data {
        InitialData::Zero => "zero",
        InitialData::Constant { .. } => "constant",
        InitialData::Sine { .. } => "sine",
        InitialData::Cosine { .. } => "cosine",
        InitialData::Kink => "kink",
        InitialData::Alternating { .. } => "alternating",
    }
}

fn pair_value(pair: &Option<PairKind>) -> Value {
    match pair {
        None => Value::Null,
        Some(PairKind::Compact { a, b, c, alpha, beta }) => {
            json!({ "compact": { "a": a, "b": b, "c": c, "alpha": alpha, "beta": beta } })
        }
        Some(other) => Value::String(other.name()),
    }
}

/// Fully resolved config as JSON; `from_value(&to_value(c)) == c`.
pub fn to_value(config: &SimulationConfig) -> Value {
    json!({
        "equation": { "id": config.equation, "params": config.params, "pair": pair_value(&config.pair) },
        "grid": { "K": config.nodes },
        "time": { "T_final": config.t_final, "dt": config.dt },
        "method": config.method.name(),
        "initial_data": {
            "generator": generator_name(&config.initial_data),
            "params": config.initial_data.params(),
            "project": config.project,
        },
        "monitors": config.monitors,
        "output": { "stride": config.output_stride },
    })
}
