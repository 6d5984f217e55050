//! Catalog of concrete equations and reference initial data.
//!
//! Nonlinear terms use second-order central differences `δ` and pointwise
//! products. Every `u·u_x`-type flux is written in the skew form
//! `S(u) = (δ(u²) + u δu)/3`, which sums to zero and satisfies `u·S(u) = 0`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::TAU;

use crate::circulant::{CirculantOperator, OperatorPair, StandardKind};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, PeriodicGrid};
use crate::reformulate::{discrete_constraint, EquationDef, Functional};

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedBehavior {
    Regular,
    Degenerate,
    /// Solvable while the stated quantity stays away from zero.
    Conditional(&'static str),
}

impl core::fmt::Display for ExpectedBehavior {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExpectedBehavior::Regular => f.write_str("regular"),
            ExpectedBehavior::Degenerate => f.write_str("degenerate"),
            ExpectedBehavior::Conditional(c) => write!(f, "conditional({c})"),
        }
    }
}

pub struct CatalogEntry {
    pub id: &'static str,
    /// Continuous equation in plain text.
    pub pde: &'static str,
    pub default_params: &'static [(&'static str, f64)],
    pub reference_initial_data: &'static [&'static str],
    pub expected_behavior: ExpectedBehavior,
    builder: fn(PeriodicGrid, &Params) -> Result<EquationDef>,
}

impl CatalogEntry {
    /// Builds the equation, filling in defaults and rejecting unknown parameters.
    pub fn build(&self, grid: PeriodicGrid, params: &Params) -> Result<EquationDef> {
        let resolved = self.resolve_params(params)?;
        (self.builder)(grid, &resolved)
    }

    pub fn resolve_params(&self, params: &Params) -> Result<Params> {
        for key in params.keys() {
            if !self.default_params.iter().any(|(n, _)| n == key) {
                return Err(Error::Unknown { what: "parameter", name: format!("{}.{key}", self.id) });
            }
        }
        Ok(self.default_params.iter().map(|&(n, v)| (n.to_string(), params.get(n).copied().unwrap_or(v))).collect())
    }
}

impl core::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("CatalogEntry").field("id", &self.id).finish_non_exhaustive()
    }
}

static CATALOG: [CatalogEntry; 9] = [
    CatalogEntry {
        id: "degenerate_cubic",
        pde: "u_tx = u_x^3 / 3",
        default_params: &[],
        reference_initial_data: &["sine"],
        expected_behavior: ExpectedBehavior::Degenerate,
        builder: |g, _| Ok(build_degenerate_cubic(g)),
    },
    CatalogEntry {
        id: "linear_kg",
        pde: "u_tx = u",
        default_params: &[],
        reference_initial_data: &["sine", "cosine"],
        expected_behavior: ExpectedBehavior::Regular,
        builder: |g, _| Ok(build_linear_kg(g)),
    },
    CatalogEntry {
        id: "modified_hunter_saxton",
        pde: "(u_t + (u^2/2)_x + (gamma/6) u_x^3)_x = u + u_x^2/2",
        default_params: &[("gamma", 1.0)],
        reference_initial_data: &["sine"],
        expected_behavior: ExpectedBehavior::Regular,
        builder: |g, p| Ok(build_modified_hunter_saxton(g, p["gamma"])),
    },
    CatalogEntry {
        id: "modified_short_pulse",
        pde: "u_tx = u + u (u^2)_xx / 2",
        default_params: &[],
        reference_initial_data: &["sine"],
        expected_behavior: ExpectedBehavior::Conditional("2π - Δx Σ (δ⁺u)² ≠ 0"),
        builder: |g, _| Ok(build_modified_short_pulse(g)),
    },
    CatalogEntry {
        id: "nonlinear_kg_quadratic",
        pde: "u_tx = u + u^2",
        default_params: &[],
        reference_initial_data: &["sine"],
        expected_behavior: ExpectedBehavior::Conditional("2π + 2Δx Σ u ≠ 0"),
        builder: |g, _| Ok(build_nonlinear_kg_quadratic(g)),
    },
    CatalogEntry {
        id: "ostrovsky_fd",
        pde: "(u_t - u u_x + beta u_xxx)_x = gamma u   [central differences, average-difference inverse]",
        default_params: &[("beta", 0.1), ("gamma", 1.0)],
        reference_initial_data: &["cosine"],
        expected_behavior: ExpectedBehavior::Regular,
        builder: |g, p| build_ostrovsky(g, OstrovskyVariant::Fd, p["beta"], p["gamma"]),
    },
    CatalogEntry {
        id: "ostrovsky_ps",
        pde: "(u_t - u u_x + beta u_xxx)_x = gamma u   [Fourier-spectral]",
        default_params: &[("beta", 0.1), ("gamma", 1.0)],
        reference_initial_data: &["cosine"],
        expected_behavior: ExpectedBehavior::Regular,
        builder: |g, p| build_ostrovsky(g, OstrovskyVariant::Ps, p["beta"], p["gamma"]),
    },
    CatalogEntry {
        id: "reduced_ostrovsky",
        pde: "(u_t + u u_x)_x = gamma u",
        default_params: &[("gamma", 1.0)],
        reference_initial_data: &["cosine"],
        expected_behavior: ExpectedBehavior::Regular,
        builder: |g, p| build_reduced_ostrovsky(g, p["gamma"]),
    },
    CatalogEntry {
        id: "sine_gordon",
        pde: "u_tx = sin u",
        default_params: &[],
        reference_initial_data: &["projected_kink", "alternating"],
        expected_behavior: ExpectedBehavior::Regular,
        builder: |g, _| Ok(build_sine_gordon(g)),
    },
];

/// All entries, sorted by id.
pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn lookup(id: &str) -> Result<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id).ok_or_else(|| Error::Unknown { what: "equation", name: id.to_string() })
}

fn central(g: PeriodicGrid) -> CirculantOperator {
    CirculantOperator::standard(StandardKind::CentralDiff, g)
}

/// `(δ(u²) + u δu)/3`.
pub fn skew_flux(d: &CirculantOperator, u: &GridFunction) -> GridFunction {
    let sq = d.act(&u.map(|v| v * v));
    let du = d.act(u);
    GridFunction::from_raw(
        u.grid(),
        sq.values().iter().zip(du.values()).zip(u.values()).map(|((a, b), v)| (a + v * b) / 3.0).collect(),
    )
}

fn norm2() -> Functional {
    Functional::new("norm2", |u| u.grid().dx() * u.dot(u), |u| u * (2.0 * u.grid().dx()))
}

fn unit_grad(u: &GridFunction) -> GridFunction {
    GridFunction::constant(u.grid(), 1.0)
}

/// `u_tx = sin u` with the average-difference pair. Conserves `H_d = Δx Σ cos u`.
pub fn build_sine_gordon(grid: PeriodicGrid) -> EquationDef {
    EquationDef::new("sine_gordon", OperatorPair::average_difference(grid), |u| u.map(libm::sin), |u| u.map(libm::cos))
        .with_conserved(Functional::new(
            "H_d",
            |u| u.grid().dx() * u.map(libm::cos).sum(),
            |u| u.map(|v| -u.grid().dx() * libm::sin(v)),
        ))
}

pub fn build_linear_kg(grid: PeriodicGrid) -> EquationDef {
    EquationDef::new("linear_kg", OperatorPair::average_difference(grid), |u| u.clone(), unit_grad)
        .with_conserved(norm2())
}

fn require_nonzero(name: &str, value: f64) -> Result<()> {
    if value == 0.0 || !value.is_finite() {
        return Err(Error::InvalidParameter { name: name.into(), reason: "must be finite and nonzero".into() });
    }
    Ok(())
}

fn require_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter { name: name.into(), reason: "must be finite".into() });
    }
    Ok(())
}

/// `(u_t + u u_x)_x = γu`: `ḡ = S(u)`, `f̄ = γu`.
pub fn build_reduced_ostrovsky(grid: PeriodicGrid, gamma: f64) -> Result<EquationDef> {
    require_nonzero("gamma", gamma)?;
    let d = central(grid);
    Ok(EquationDef::new(
        "reduced_ostrovsky",
        OperatorPair::average_difference(grid),
        move |u| u * gamma,
        move |u| GridFunction::constant(u.grid(), gamma),
    )
    .with_g_bar(move |u| skew_flux(&d, u))
    .with_param("gamma", gamma)
    .with_conserved(norm2()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OstrovskyVariant {
    /// Central differences with the average-difference inverse.
    Fd,
    /// Fourier-spectral differences with the spectral pseudoinverse.
    Ps,
}

impl core::str::FromStr for OstrovskyVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(Self::Fd),
            "ps" => Ok(Self::Ps),
            _ => Err(Error::Unknown { what: "Ostrovsky variant", name: s.to_string() }),
        }
    }
}

/// Norm-preserving Ostrovsky schemes
/// `u' = S(u) - β δ³u + γ A u` with `(δ, δ³, A)` either
/// (central, `central_diff3`, average-difference inverse) or
/// (spectral, spectral³, spectral pseudoinverse).
pub fn build_ostrovsky(grid: PeriodicGrid, variant: OstrovskyVariant, beta: f64, gamma: f64) -> Result<EquationDef> {
    require_finite("beta", beta)?;
    require_nonzero("gamma", gamma)?;
    let (name, d, d3, pair) = match variant {
        OstrovskyVariant::Fd => (
            "ostrovsky_fd",
            central(grid),
            CirculantOperator::standard(StandardKind::CentralDiff3, grid),
            OperatorPair::average_difference(grid),
        ),
        OstrovskyVariant::Ps => {
            let d = CirculantOperator::standard(StandardKind::FourierSpectralDiff, grid);
            let d3 = d.compose(&d)?.compose(&d)?;
            ("ostrovsky_ps", d.clone(), d3, OperatorPair::plain(d))
        }
    };
    Ok(EquationDef::new(name, pair, move |u| u * gamma, move |u| GridFunction::constant(u.grid(), gamma))
        .with_g_bar(move |u| {
            let s = skew_flux(&d, u);
            let t = d3.act(u);
            s.zip_map(&t, |a, b| -a + beta * b)
        })
        .with_param("beta", beta)
        .with_param("gamma", gamma)
        .with_conserved(norm2()))
}

/// `ḡ = S(u) + (γ/6)(δu)³`, `f̄ = u + (δu)²/2`, exact gradient `1 - δ(δu)`.
pub fn build_modified_hunter_saxton(grid: PeriodicGrid, gamma: f64) -> EquationDef {
    let (d1, d2, d3) = (central(grid), central(grid), central(grid));
    EquationDef::new(
        "modified_hunter_saxton",
        OperatorPair::average_difference(grid),
        move |u| {
            let du = d1.act(u);
            u.zip_map(&du, |v, w| v + 0.5 * w * w)
        },
        move |u| d2.act(&d2.act(u)).map(|v| 1.0 - v),
    )
    .with_g_bar(move |u| {
        let du = d3.act(u);
        skew_flux(&d3, u).zip_map(&du, |s, w| s + gamma / 6.0 * w * w * w)
    })
    .with_param("gamma", gamma)
}

/// `f̄ = u + u δ²(u²)/2` with the three-point second difference.
pub fn build_modified_short_pulse(grid: PeriodicGrid) -> EquationDef {
    let d2 = CirculantOperator::standard(StandardKind::CentralDiff2, grid);
    let d2g = d2.clone();
    EquationDef::new(
        "modified_short_pulse",
        OperatorPair::average_difference(grid),
        move |u| {
            let s = d2.act(&u.map(|v| v * v));
            u.zip_map(&s, |v, w| v + 0.5 * v * w)
        },
        move |u| {
            let s = d2g.act(&u.map(|v| v * v));
            let t = d2g.act(u);
            let values = (0..u.len()).map(|k| 1.0 + 0.5 * s[k] + u[k] * t[k]).collect();
            GridFunction::from_raw(u.grid(), values)
        },
    )
}

/// `Δx ∇·1 = 2π - Δx Σ (δ⁺u)²` for the modified short pulse equation.
pub fn short_pulse_condition(u: &GridFunction) -> f64 {
    let d = CirculantOperator::standard(StandardKind::ForwardDiff, u.grid());
    let du = d.act(u);
    TAU - u.grid().dx() * du.dot(&du)
}

pub fn build_nonlinear_kg_quadratic(grid: PeriodicGrid) -> EquationDef {
    EquationDef::new(
        "nonlinear_kg_quadratic",
        OperatorPair::average_difference(grid),
        |u| u.map(|v| v + v * v),
        |u| u.map(|v| 1.0 + 2.0 * v),
    )
}

/// `f̄ = (δu)³/3`; its gradient `-δ((δu)²)` always sums to zero.
pub fn build_degenerate_cubic(grid: PeriodicGrid) -> EquationDef {
    let (d1, d2) = (central(grid), central(grid));
    EquationDef::new(
        "degenerate_cubic",
        OperatorPair::average_difference(grid),
        move |u| d1.act(u).map(|w| w * w * w / 3.0),
        move |u| -&d2.act(&d2.act(u).map(|w| w * w)),
    )
}

/// Warning text when a conditional equation starts close to its singular set.
pub fn conditional_warning(eq: &EquationDef, u0: &GridFunction) -> Option<String> {
    let quantity = match eq.name() {
        "modified_short_pulse" => short_pulse_condition(u0),
        "nonlinear_kg_quadratic" => TAU + 2.0 * u0.grid().dx() * u0.sum(),
        _ => return None,
    };
    (libm::fabs(quantity) < 0.05 * TAU)
        .then(|| format!("{}: solvability quantity {quantity:.3e} is close to zero at the initial state", eq.name()))
}

/// Named initial-condition generators.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    Constant {
        value: f64,
    },
    Sine {
        amplitude: f64,
        mode: i64,
        phase: f64,
    },
    Cosine {
        amplitude: f64,
        mode: i64,
        phase: f64,
    },
    /// `4 atan(exp(sin x))`.
    Kink,
    /// `±amplitude` on even/odd nodes.
    Alternating {
        amplitude: f64,
    },
}

const GENERATORS: [(&str, &[(&str, f64)]); 7] = [
    ("alternating", &[("amplitude", 0.5)]),
    ("constant", &[("value", 0.0)]),
    ("cosine", &[("amplitude", 1.0), ("mode", 1.0), ("phase", 0.0)]),
    ("kink", &[]),
    ("projected_kink", &[]),
    ("sine", &[("amplitude", 1.0), ("mode", 1.0), ("phase", 0.0)]),
    ("zero", &[]),
];

pub fn generator_names() -> impl Iterator<Item = &'static str> {
    GENERATORS.iter().map(|(n, _)| *n)
}

impl InitialData {
    /// Parses a generator id and parameters. Returns the generator and
    /// whether it implies constraint projection (`projected_kink`).
    pub fn from_params(name: &str, params: &Params) -> Result<(Self, bool)> {
        let (_, defaults) = GENERATORS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Unknown { what: "initial data generator", name: name.to_string() })?;
        for key in params.keys() {
            if !defaults.iter().any(|(n, _)| n == key) {
                return Err(Error::Unknown { what: "parameter", name: format!("initial_data.{key}") });
            }
        }
        let get = |k: &str| -> Result<f64> {
            let v = params.get(k).copied().unwrap_or_else(|| defaults.iter().find(|(n, _)| *n == k).unwrap().1);
            require_finite(k, v)?;
            Ok(v)
        };
        let mode = || -> Result<i64> {
            let m = get("mode")?;
            if libm::trunc(m) != m {
                return Err(Error::InvalidParameter { name: "mode".into(), reason: "must be an integer".into() });
            }
            Ok(m as i64)
        };
        let data = match name {
            "zero" => InitialData::Zero,
            "constant" => InitialData::Constant { value: get("value")? },
            "sine" => InitialData::Sine { amplitude: get("amplitude")?, mode: mode()?, phase: get("phase")? },
            "cosine" => InitialData::Cosine { amplitude: get("amplitude")?, mode: mode()?, phase: get("phase")? },
            "kink" | "projected_kink" => InitialData::Kink,
            "alternating" => InitialData::Alternating { amplitude: get("amplitude")? },
            _ => unreachable!(),
        };
        Ok((data, name == "projected_kink"))
    }

    /// Fully resolved parameters, for echoing.
    pub fn params(&self) -> Params {
        let mut p = Params::new();
        match *self {
            InitialData::Zero | InitialData::Kink => {}
            InitialData::Constant { value } => {
                p.insert("value".into(), value);
            }
            InitialData::Sine { amplitude, mode, phase } | InitialData::Cosine { amplitude, mode, phase } => {
                p.insert("amplitude".into(), amplitude);
                p.insert("mode".into(), mode as f64);
                p.insert("phase".into(), phase);
            }
            InitialData::Alternating { amplitude } => {
                p.insert("amplitude".into(), amplitude);
            }
        }
        p
    }

    pub fn sample(&self, grid: PeriodicGrid) -> Result<GridFunction> {
        match *self {
            InitialData::Zero => Ok(GridFunction::zeros(grid)),
            InitialData::Constant { value } => Ok(GridFunction::constant(grid, value)),
            InitialData::Sine { amplitude, mode, phase } => {
                GridFunction::from_fn(grid, |x| amplitude * libm::sin(mode as f64 * x + phase))
            }
            InitialData::Cosine { amplitude, mode, phase } => {
                GridFunction::from_fn(grid, |x| amplitude * libm::cos(mode as f64 * x + phase))
            }
            InitialData::Kink => GridFunction::from_fn(grid, |x| 4.0 * libm::atan(libm::exp(libm::sin(x)))),
            InitialData::Alternating { amplitude } => GridFunction::new(
                grid,
                (0..grid.len()).map(|k| if k % 2 == 0 { amplitude } else { -amplitude }).collect(),
            ),
        }
    }
}

/// Shifts `u` by the constant of smallest magnitude that makes `F_d(u + s) = 0`.
///
/// Sign changes of `s ↦ F_d(u + s)` are located on a uniform scan and refined
/// by bisection.
pub fn project_constraint(eq: &EquationDef, u: &GridFunction) -> Result<GridFunction> {
    let f = |s: f64| discrete_constraint(eq, &u.map(|v| v + s));
    let scale = u.grid().dx() * eq.f_bar(u).l1().max(1.0);
    let tol = 1e-12 * scale;
    if libm::fabs(f(0.0)?) <= tol {
        return Ok(u.clone());
    }
    let radius = core::f64::consts::PI.max(2.0 * (u.max_abs() + 1.0));
    let n = 400;
    let nodes: Vec<f64> = (0..=n).map(|i| -radius + 2.0 * radius * i as f64 / n as f64).collect();
    let values = nodes.iter().map(|&s| f(s)).collect::<Result<Vec<f64>>>()?;

    let mut best: Option<f64> = None;
    let mut consider = |s: f64| {
        if best.is_none_or(|b| libm::fabs(s) < libm::fabs(b)) {
            best = Some(s);
        }
    };
    for i in 0..n {
        let (a, b) = (nodes[i], nodes[i + 1]);
        let (fa, fb) = (values[i], values[i + 1]);
        if fa == 0.0 {
            consider(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            consider(bisect(&f, a, b, fa)?);
        }
    }
    if values[n] == 0.0 {
        consider(nodes[n]);
    }
    let s = best.ok_or_else(|| Error::Invalid(format!("{}: no constant shift satisfies the constraint", eq.name())))?;
    let out = u.map(|v| v + s);
    let residual = discrete_constraint(eq, &out)?;
    if libm::fabs(residual) > tol {
        return Err(Error::Invalid(format!("{}: constraint projection stalled at residual {residual:e}", eq.name())));
    }
    Ok(out)
}

fn bisect(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64> {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let (ra, rb) = (libm::fabs(f(a)?), libm::fabs(f(b)?));
    Ok(if ra <= rb { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reformulate::{correction_constant, reduce};

    fn small(x: f64, tol: f64) -> bool {
        libm::fabs(x) <= tol
    }

    #[test]
    fn catalog_is_sorted_and_complete() {
        let ids: Vec<&str> = catalog().iter().map(|e| e.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
        assert_eq!(ids.len(), 9);
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn unknown_parameters_are_rejected() {
        let g = PeriodicGrid::new(8).unwrap();
        let mut p = Params::new();
        p.insert("delta".into(), 1.0);
        assert!(lookup("sine_gordon").unwrap().build(g, &p).is_err());
        let mut p = Params::new();
        p.insert("gamma".into(), 0.0);
        assert!(matches!(lookup("reduced_ostrovsky").unwrap().build(g, &p), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn sine_gordon_reference_values() {
        let g = PeriodicGrid::new(64).unwrap();
        let eq = build_sine_gordon(g);
        let z = GridFunction::zeros(g);
        assert!(libm::fabs((eq.conserved()[0].value)(&z) - TAU) < 1e-12);
        let alt = InitialData::Alternating { amplitude: 0.7 }.sample(g).unwrap();
        assert!(libm::fabs(discrete_constraint(&eq, &alt).unwrap()) < 1e-14);
    }

    #[test]
    fn projected_kink_satisfies_the_constraint() {
        let g = PeriodicGrid::new(64).unwrap();
        let eq = build_sine_gordon(g);
        let u = InitialData::Kink.sample(g).unwrap();
        let p = project_constraint(&eq, &u).unwrap();
        assert!(libm::fabs(discrete_constraint(&eq, &p).unwrap()) < 1e-12);
        let shift = p[0] - u[0];
        assert!(libm::fabs(shift) < core::f64::consts::PI);
    }

    #[test]
    fn projection_of_linear_constraint_removes_the_mean() {
        let g = PeriodicGrid::new(16).unwrap();
        let eq = build_linear_kg(g);
        let u = GridFunction::from_fn(g, |x| 3.0 + libm::sin(x)).unwrap();
        let p = project_constraint(&eq, &u).unwrap();
        assert!(small(crate::grid::mean(&p), 1e-12));
    }

    #[test]
    fn linear_constraints_have_no_correction() {
        let g = PeriodicGrid::new(32).unwrap();
        let u =
            crate::grid::project_zero_mean(&GridFunction::from_fn(g, |x| libm::sin(x) + libm::cos(3.0 * x)).unwrap());
        for eq in [
            build_linear_kg(g),
            build_reduced_ostrovsky(g, 1.0).unwrap(),
            build_ostrovsky(g, OstrovskyVariant::Fd, 0.3, 2.0).unwrap(),
            build_ostrovsky(g, OstrovskyVariant::Ps, 0.3, 2.0).unwrap(),
        ] {
            assert!(small(correction_constant(&eq, &u).unwrap(), 1e-13), "{}", eq.name());
        }
    }

    #[test]
    fn short_pulse_gradient_sum_identity() {
        let g = PeriodicGrid::new(64).unwrap();
        let eq = build_modified_short_pulse(g);
        let z = GridFunction::zeros(g);
        assert!(small(g.dx() * eq.f_bar_grad(&z).sum() - TAU, 1e-12));
        let u = GridFunction::from_fn(g, |x| 0.1 * libm::sin(x) + 0.05 * libm::cos(4.0 * x)).unwrap();
        assert!(small(g.dx() * eq.f_bar_grad(&u).sum() - short_pulse_condition(&u), 1e-10));
    }

    #[test]
    fn hunter_saxton_gradient_sum_is_two_pi() {
        let g = PeriodicGrid::new(40).unwrap();
        let eq = build_modified_hunter_saxton(g, 0.7);
        let u = GridFunction::from_fn(g, |x| libm::sin(x) + 0.4 * libm::cos(2.0 * x)).unwrap();
        assert!(small(g.dx() * eq.f_bar_grad(&u).sum() - TAU, 1e-12));
        assert_eq!(reduce(&eq).rhs(&GridFunction::zeros(g)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn conditional_warnings() {
        let g = PeriodicGrid::new(64).unwrap();
        let kg = build_nonlinear_kg_quadratic(g);
        assert!(conditional_warning(&kg, &GridFunction::zeros(g)).is_none());
        assert!(conditional_warning(&kg, &GridFunction::constant(g, -0.5)).is_some());
        let sg = build_sine_gordon(g);
        assert!(conditional_warning(&sg, &GridFunction::zeros(g)).is_none());
    }

    #[test]
    fn generator_parsing() {
        let mut p = Params::new();
        p.insert("mode".into(), 2.0);
        let (d, proj) = InitialData::from_params("sine", &p).unwrap();
        assert_eq!(d, InitialData::Sine { amplitude: 1.0, mode: 2, phase: 0.0 });
        assert!(!proj);
        assert!(InitialData::from_params("projected_kink", &Params::new()).unwrap().1);
        p.insert("mode".into(), 1.5);
        assert!(InitialData::from_params("sine", &p).is_err());
        assert!(InitialData::from_params("gaussian", &Params::new()).is_err());
        assert_eq!(generator_names().count(), GENERATORS.len());
    }
}
