//! Command implementations for the `mixedderiv` binary. Each returns the
//! process exit code.

pub mod config;
pub mod ops;
pub mod output;
pub mod verify;

use std::path::{Path, PathBuf};
use std::time::Instant;

use mixedderiv_core::equations::catalog;
use mixedderiv_core::integrators::{simulate, Status};
use mixedderiv_core::spectral::{build_error_curve, closed_form_error, ClosedFormKind};
use mixedderiv_core::PeriodicGrid;
use serde::Serialize;
use serde_json::Value;

use output::{write_atomic, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct StatusRecord {
    pub name: &'static str,
    /// Time of the last accepted state when the run stopped early.
    pub t: Option<f64>,
    /// Next-level constraint value at the abort, for degenerate runs.
    pub ladder_probe: Option<f64>,
    pub message: Option<String>,
}

impl From<&Status> for StatusRecord {
    fn from(s: &Status) -> Self {
        match s {
            Status::Completed => Self { name: s.name(), t: None, ladder_probe: None, message: None },
            Status::DegenerateAbort { t, ladder } => {
                Self { name: s.name(), t: Some(*t), ladder_probe: Some(*ladder), message: None }
            }
            Status::SolverFailure { t, message } => {
                Self { name: s.name(), t: Some(*t), ladder_probe: None, message: Some(message.clone()) }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Value,
    pub status: StatusRecord,
    pub steps_taken: usize,
    pub runtime_seconds: f64,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn cmd_simulate(config_path: &Path, out_dir: &Path) -> i32 {
    let config = match config::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config {}: {e}", config_path.display());
            return EXIT_USAGE;
        }
    };
    if let Err(e) = std::fs::create_dir_all(out_dir) {
        eprintln!("error: cannot create {}: {e}", out_dir.display());
        return EXIT_USAGE;
    }
    let start = Instant::now();
    let record = match simulate(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: config {}: {e}", config_path.display());
            return EXIT_USAGE;
        }
    };
    let runtime = start.elapsed().as_secs_f64();
    for w in &record.warnings {
        eprintln!("warning: {w}");
    }

    let mut states = Table::new(std::iter::once("t".to_string()).chain((0..config.nodes).map(|k| format!("u_{k}"))));
    for (t, u) in record.times.iter().zip(&record.states) {
        states.row(std::iter::once(*t).chain(u.values().iter().copied()));
    }
    let mut monitors =
        Table::new(std::iter::once("t".to_string()).chain(record.monitors.iter().map(|(n, _)| n.clone())));
    for (i, t) in record.times.iter().enumerate() {
        monitors.row(std::iter::once(*t).chain(record.monitors.iter().map(|(_, v)| v[i])));
    }
    let states_path = out_dir.join("states.csv");
    let monitors_path = out_dir.join("monitors.csv");
    let manifest_path = out_dir.join("manifest.json");
    let manifest = Manifest {
        tool: "mixedderiv",
        version: VERSION,
        config: config::to_value(&config),
        status: StatusRecord::from(&record.status),
        steps_taken: record.steps_taken,
        runtime_seconds: runtime,
        warnings: record.warnings.clone(),
        outputs: [&states_path, &monitors_path].iter().map(|p| p.display().to_string()).collect(),
    };
    let written = states
        .write(&states_path)
        .and_then(|_| monitors.write(&monitors_path))
        .and_then(|_| write_json(&manifest_path, &manifest));
    if let Err(e) = written {
        eprintln!("error: writing outputs to {}: {e}", out_dir.display());
        return EXIT_USAGE;
    }
    println!(
        "{}: {} after {} steps ({runtime:.3}s), outputs in {}",
        config.equation,
        record.status.name(),
        record.steps_taken,
        out_dir.display()
    );
    match record.status {
        Status::Completed => EXIT_OK,
        Status::DegenerateAbort { ladder, .. } => {
            eprintln!("degenerate constraint at the initial state; next-level constraint F_1 = {ladder:e}");
            EXIT_DEGENERATE
        }
        Status::SolverFailure { ref message, .. } => {
            eprintln!("solver failure: {message}");
            EXIT_SOLVER
        }
    }
}

/// Path of the closed-form companion table: `<stem>_closed_form.csv`.
pub fn closed_form_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "spectral_error".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_closed_form.csv"))
}

pub fn cmd_spectral_error(ops_spec: Option<&str>, out: &Path, nodes: usize, samples: usize) -> i32 {
    let specs = match ops_spec {
        None => ops::DEFAULT_OPS.map(ops::OpSpec::Builtin).to_vec(),
        Some(s) => match ops::parse(s) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: --ops: {e}");
                return EXIT_USAGE;
            }
        },
    };
    let grid = match PeriodicGrid::new(nodes) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: --nodes: {e}");
            return EXIT_USAGE;
        }
    };
    let pairs = match specs.iter().map(|s| s.build(grid)).collect::<Result<Vec<_>, _>>() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --ops: {e}");
            return EXIT_USAGE;
        }
    };
    for (i, p) in pairs.iter().enumerate() {
        if pairs[..i].iter().any(|q| q.label == p.label) {
            eprintln!("error: --ops: duplicate label `{}`", p.label);
            return EXIT_USAGE;
        }
    }
    let curve = match build_error_curve(&pairs, nodes, samples) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut table = Table::new(
        ["mode", "omega_tilde"].into_iter().map(String::from).chain(curve.series.iter().map(|(l, _)| l.clone())),
    );
    for (i, (&m, &w)) in curve.modes.iter().zip(&curve.omega_tilde).enumerate() {
        table.row([m as f64, w].into_iter().chain(curve.series.iter().map(|(_, v)| v[i])));
    }
    let mut closed = Table::new(
        ["mode", "omega_tilde"]
            .into_iter()
            .map(String::from)
            .chain(ClosedFormKind::ALL.iter().map(|k| k.label().to_string())),
    );
    for (&m, &w) in curve.modes.iter().zip(&curve.omega_tilde) {
        let values: Vec<f64> =
            ClosedFormKind::ALL.iter().map(|&k| closed_form_error(k, w).unwrap_or(f64::NAN)).collect();
        closed.row([m as f64, w].into_iter().chain(values));
    }
    let companion = closed_form_path(out);
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: cannot create {}: {e}", dir.display());
            return EXIT_USAGE;
        }
    }
    if let Err(e) = table.write(out).and_then(|_| closed.write(&companion)) {
        eprintln!("error: writing {}: {e}", out.display());
        return EXIT_USAGE;
    }
    for (label, d) in &curve.max_discrepancy {
        println!("{label}: max |symbol route - closed form| = {d:.3e}");
    }
    println!("wrote {} and {}", out.display(), companion.display());
    EXIT_OK
}

pub fn cmd_verify(suite: &str, out: &Path) -> i32 {
    let suites = match verify::selection(suite) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let seed = match verify::seed_from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = verify::run(suite, &suites, seed);
    for c in &report.checks {
        println!(
            "{} {:<14} {:<70} {:>10.3e} <= {:<8.1e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.value,
            c.tolerance
        );
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed (seed {seed})", report.checks.len());
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        let _ = std::fs::create_dir_all(dir);
    }
    if let Err(e) = write_json(out, &report) {
        eprintln!("error: writing {}: {e}", out.display());
        return EXIT_USAGE;
    }
    if report.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn list_equations() -> String {
    let mut s = String::new();
    for e in catalog() {
        let params = if e.default_params.is_empty() {
            "none".to_string()
        } else {
            e.default_params.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(", ")
        };
        s.push_str(&format!(
            "{}\n  equation:     {}\n  params:       {params}\n  behavior:     {}\n  initial data: {}\n",
            e.id,
            e.pde,
            e.expected_behavior,
            e.reference_initial_data.join(", ")
        ));
    }
    s
}

pub fn cmd_list_equations() -> i32 {
    print!("{}", list_equations());
    EXIT_OK
}
