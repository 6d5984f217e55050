//! Time stepping for reduced vector fields, simulation records with monitors,
//! and spatial self-convergence studies.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use crate::circulant::{OperatorPair, PairKind};
use crate::equations::{conditional_warning, lookup, project_constraint, InitialData, Params};
use crate::error::{Error, Result};
use crate::grid::{inner, mean, GridFunction, PeriodicGrid};
use crate::reformulate::{correction_constant, discrete_constraint, reduce, EquationDef, VectorField};

pub const MIDPOINT_MAX_ITERATIONS: usize = 100;
/// Iterations after which the fixed-point update is damped by 1/2.
pub const MIDPOINT_DAMPING_AFTER: usize = 20;

fn axpy(u: &GridFunction, a: f64, k: &GridFunction) -> GridFunction {
    u.zip_map(k, |x, y| x + a * y)
}

/// Classical four-stage Runge–Kutta step.
pub fn rk4_step<F: VectorField + ?Sized>(field: &F, u: &GridFunction, dt: f64) -> Result<GridFunction> {
    let k1 = field.eval(u)?;
    let k2 = field.eval(&axpy(u, dt / 2.0, &k1))?;
    let k3 = field.eval(&axpy(u, dt / 2.0, &k2))?;
    let k4 = field.eval(&axpy(u, dt, &k3))?;
    let values = (0..u.len()).map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    GridFunction::new(u.grid(), values).map_err(|_| Error::NonFiniteState)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointSolve {
    pub state: GridFunction,
    pub iterations: usize,
    pub residual: f64,
}

/// Implicit midpoint `u⁺ = u + dt F((u + u⁺)/2)`, solved by fixed-point
/// iteration from `u⁺ = u` to `‖residual‖∞ ≤ 1e-12 (1 + ‖u‖∞)`.
pub fn implicit_midpoint_solve<F: VectorField + ?Sized>(field: &F, u: &GridFunction, dt: f64) -> Result<MidpointSolve> {
    let tol = 1e-12 * (1.0 + u.max_abs());
    let mut v = u.clone();
    let mut residual = f64::INFINITY;
    for iteration in 1..=MIDPOINT_MAX_ITERATIONS {
        let mid = u.zip_map(&v, |a, b| 0.5 * (a + b));
        let next = axpy(u, dt, &field.eval(&mid)?);
        if !next.is_finite() {
            // the iteration diverged; dt is too large for the contraction
            return Err(Error::NoConvergence { iterations: iteration, residual: f64::INFINITY });
        }
        residual = (&next - &v).max_abs();
        if residual <= tol {
            return Ok(MidpointSolve { state: next, iterations: iteration, residual });
        }
        v = if iteration > MIDPOINT_DAMPING_AFTER { v.zip_map(&next, |a, b| 0.5 * (a + b)) } else { next };
    }
    Err(Error::NoConvergence { iterations: MIDPOINT_MAX_ITERATIONS, residual })
}

pub fn implicit_midpoint_step<F: VectorField + ?Sized>(field: &F, u: &GridFunction, dt: f64) -> Result<GridFunction> {
    implicit_midpoint_solve(field, u, dt).map(|s| s.state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    ImplicitMidpoint,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::ImplicitMidpoint => "implicit_midpoint",
        }
    }

    pub fn step<F: VectorField + ?Sized>(self, field: &F, u: &GridFunction, dt: f64) -> Result<GridFunction> {
        match self {
            Method::Rk4 => rk4_step(field, u, dt),
            Method::ImplicitMidpoint => implicit_midpoint_step(field, u, dt),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(Method::Rk4),
            "implicit_midpoint" => Ok(Method::ImplicitMidpoint),
            _ => Err(Error::Unknown { what: "method", name: s.to_string() }),
        }
    }
}

/// Monitors available for every equation; conserved functionals add more.
pub const BASE_MONITORS: [&str; 4] = ["F_d", "C_d", "L2", "mean"];

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub equation: String,
    pub params: Params,
    /// Overrides the equation's default generalized inverse.
    pub pair: Option<PairKind>,
    pub nodes: usize,
    pub t_final: f64,
    pub dt: f64,
    pub method: Method,
    pub initial_data: InitialData,
    /// Shift the initial data so that `F_d(u₀) = 0`.
    pub project: bool,
    pub monitors: Vec<String>,
    pub output_stride: usize,
}

impl SimulationConfig {
    pub fn new(equation: impl Into<String>, nodes: usize, t_final: f64, dt: f64, initial_data: InitialData) -> Self {
        Self {
            equation: equation.into(),
            params: Params::new(),
            pair: None,
            nodes,
            t_final,
            dt,
            method: Method::ImplicitMidpoint,
            initial_data,
            project: false,
            monitors: BASE_MONITORS.iter().map(|s| s.to_string()).collect(),
            output_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: &str| Err(Error::InvalidParameter { name: name.into(), reason: reason.into() });
        if self.nodes < 4 {
            return bad("grid.K", "must be at least 4");
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("time.dt", "must be positive and finite");
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return bad("time.T_final", "must be finite and at least dt");
        }
        if self.output_stride == 0 {
            return bad("output.stride", "must be positive");
        }
        lookup(&self.equation)?.resolve_params(&self.params)?;
        Ok(())
    }

    /// The equation on this grid, with the pair override applied.
    pub fn build_equation(&self) -> Result<EquationDef> {
        let grid = PeriodicGrid::new(self.nodes)?;
        let eq = lookup(&self.equation)?.build(grid, &self.params)?;
        match &self.pair {
            Some(kind) => eq.with_pair(OperatorPair::from_kind(kind, grid)?),
            None => Ok(eq),
        }
    }

    /// Number of steps; the last step is shortened to land on `T_final`.
    pub fn steps(&self) -> usize {
        let n = libm::ceil(self.t_final / self.dt - 1e-9) as usize;
        n.max(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Completed,
    DegenerateAbort { t: f64, ladder: f64 },
    SolverFailure { t: f64, message: String },
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::DegenerateAbort { .. } => "degenerate_abort",
            Status::SolverFailure { .. } => "solver_failure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRecord {
    pub times: Vec<f64>,
    pub states: Vec<GridFunction>,
    /// One sample per recorded state, in the configured order.
    pub monitors: Vec<(String, Vec<f64>)>,
    pub status: Status,
    pub warnings: Vec<String>,
    pub steps_taken: usize,
}

impl SimulationRecord {
    pub fn monitor(&self, name: &str) -> Option<&[f64]> {
        self.monitors.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

enum Monitor<'a> {
    Constraint,
    Correction,
    L2,
    Mean,
    Conserved(&'a crate::reformulate::Functional),
}

fn resolve_monitors<'a>(eq: &'a EquationDef, names: &[String]) -> Result<Vec<Monitor<'a>>> {
    names
        .iter()
        .map(|n| {
            Ok(match n.as_str() {
                "F_d" => Monitor::Constraint,
                "C_d" => Monitor::Correction,
                "L2" => Monitor::L2,
                "mean" => Monitor::Mean,
                other => Monitor::Conserved(
                    eq.conserved()
                        .iter()
                        .find(|f| f.name == other)
                        .ok_or_else(|| Error::Unknown { what: "monitor", name: other.to_string() })?,
                ),
            })
        })
        .collect()
}

fn evaluate(m: &Monitor<'_>, eq: &EquationDef, u: &GridFunction) -> f64 {
    match m {
        Monitor::Constraint => discrete_constraint(eq, u).unwrap_or(f64::NAN),
        // undefined on degenerate states
        Monitor::Correction => correction_constant(eq, u).unwrap_or(f64::NAN),
        Monitor::L2 => libm::sqrt(inner(u, u).unwrap_or(f64::NAN)),
        Monitor::Mean => mean(u),
        Monitor::Conserved(f) => (f.value)(u),
    }
}

/// Monitor names accepted for an equation.
pub fn available_monitors(eq: &EquationDef) -> Vec<String> {
    BASE_MONITORS.iter().map(|s| s.to_string()).chain(eq.conserved().iter().map(|f| f.name.clone())).collect()
}

/// Runs a configured simulation. Configuration problems are errors; failures
/// during integration are reported through [`SimulationRecord::status`].
pub fn simulate(config: &SimulationConfig) -> Result<SimulationRecord> {
    config.validate()?;
    let eq = config.build_equation()?;
    let monitors = resolve_monitors(&eq, &config.monitors)?;
    let grid = eq.grid();
    let mut u = config.initial_data.sample(grid)?;
    if config.project {
        u = project_constraint(&eq, &u)?;
    }
    let mut warnings = Vec::new();
    let f0 = discrete_constraint(&eq, &u)?;
    if libm::fabs(f0) > 1e-8 {
        warnings.push(format!("initial data violates the discrete constraint: F_d = {f0:.3e}"));
    }
    warnings.extend(conditional_warning(&eq, &u));

    let ode = reduce(&eq);
    let mut record = SimulationRecord {
        times: Vec::new(),
        states: Vec::new(),
        monitors: config.monitors.iter().map(|n| (n.clone(), Vec::new())).collect(),
        status: Status::Completed,
        warnings,
        steps_taken: 0,
    };
    let push = |record: &mut SimulationRecord, t: f64, u: &GridFunction| {
        for (slot, m) in record.monitors.iter_mut().zip(&monitors) {
            slot.1.push(evaluate(m, &eq, u));
        }
        record.times.push(t);
        record.states.push(u.clone());
    };
    push(&mut record, 0.0, &u);

    let n = config.steps();
    let mut t = 0.0;
    for step in 1..=n {
        let t_next = if step == n { config.t_final } else { step as f64 * config.dt };
        match config.method.step(&ode, &u, t_next - t) {
            Ok(next) => u = next,
            Err(Error::DegenerateConstraint { ladder, .. }) => {
                record.status = Status::DegenerateAbort { t, ladder };
                return Ok(record);
            }
            Err(e) => {
                record.status = Status::SolverFailure { t, message: e.to_string() };
                return Ok(record);
            }
        }
        t = t_next;
        record.steps_taken = step;
        if step % config.output_stride == 0 || step == n {
            push(&mut record, t, &u);
        }
    }
    Ok(record)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub nodes: Vec<usize>,
    /// Max-norm error at shared nodes against the reference run.
    pub errors: Vec<f64>,
    pub reference_nodes: usize,
    /// Least-squares slope of `-log(error)` against `log(K)`; `None` if an error is zero.
    pub order: Option<f64>,
    /// Some error is at round-off level, so the fitted order is not meaningful.
    pub roundoff_limited: bool,
}

fn final_state(config: &SimulationConfig) -> Result<GridFunction> {
    let mut c = config.clone();
    c.output_stride = usize::MAX;
    c.monitors.clear();
    let record = simulate(&c)?;
    match record.status {
        Status::Completed => Ok(record.states.last().cloned().expect("final state recorded")),
        other => Err(Error::Invalid(format!("run with K = {} ended with {}", c.nodes, other.name()))),
    }
}

/// Self-convergence in `K` at fixed `T_final` and `dt`.
pub fn spatial_convergence(base: &SimulationConfig, nodes: &[usize], reference: usize) -> Result<ConvergenceStudy> {
    if nodes.is_empty() {
        return Err(Error::Invalid("no grid sizes given".into()));
    }
    if let Some(&k) = nodes.iter().find(|&&k| k == 0 || !reference.is_multiple_of(k)) {
        return Err(Error::InvalidParameter {
            name: "K".into(),
            reason: format!("reference {reference} is not a multiple of {k}"),
        });
    }
    let run = |k: usize| {
        let mut c = base.clone();
        c.nodes = k;
        final_state(&c)
    };
    let reference_state = run(reference)?;
    let mut errors = Vec::with_capacity(nodes.len());
    for &k in nodes {
        let u = run(k)?;
        let stride = reference / k;
        let err = (0..k).fold(0.0f64, |m, i| m.max(libm::fabs(u[i] - reference_state[i * stride])));
        errors.push(err);
    }
    let floor = 1e-11 * reference_state.max_abs().max(1.0);
    let roundoff_limited = errors.iter().any(|&e| e <= floor);
    let order = if nodes.len() >= 2 && errors.iter().all(|&e| e > 0.0) {
        let xs: Vec<f64> = nodes.iter().map(|&k| libm::log(k as f64)).collect();
        let ys: Vec<f64> = errors.iter().map(|&e| libm::log(e)).collect();
        Some(-least_squares_slope(&xs, &ys))
    } else {
        None
    };
    Ok(ConvergenceStudy { nodes: nodes.to_vec(), errors, reference_nodes: reference, order, roundoff_limited })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
