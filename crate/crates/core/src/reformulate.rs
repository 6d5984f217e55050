//! Reduction of the semi-discrete differential form
//!
//! ```text
//! D(u' + ḡ(u)) + (∂g)‾(u) = M f̄(u)
//! ```
//!
//! to the explicit ODE
//!
//! ```text
//! u' = -ḡ(u) - D†(∂g)‾(u) + D†M f̄(u) + C_d(u) 1,
//! ```
//!
//! where `C_d` keeps `F_d(u) = Δx Σ f̄_k(u)` constant along the flow.
//! Writing `b(u) = ḡ + D†(∂g)‾ - D†M f̄` and `∇ = ∂(Σ f̄)/∂u`, the correction is
//! `C_d = ∇·b / ∇·1`. When `∇·1` vanishes the reduction is degenerate and
//! the next constraint `F₁ = Δx ∇·b` is reported instead.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::circulant::{CirculantOperator, OperatorPair, StandardKind};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, PeriodicGrid};

/// Relative threshold on `|∇·1| / ‖∇‖₁` below which the constraint is degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

pub type StateMap = Box<dyn Fn(&GridFunction) -> GridFunction + Send + Sync>;
pub type ScalarMap = Box<dyn Fn(&GridFunction) -> f64 + Send + Sync>;

/// A named scalar functional with its gradient `∂Φ/∂u_k` (plain partials,
/// so that `dΦ/dt = ∇Φ · u'`).
pub struct Functional {
    pub name: String,
    pub value: ScalarMap,
    pub gradient: StateMap,
}

impl Functional {
    pub fn new(
        name: impl Into<String>,
        value: impl Fn(&GridFunction) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), value: Box::new(value), gradient: Box::new(gradient) }
    }

    /// Time derivative of the functional along `udot`.
    pub fn rate(&self, u: &GridFunction, udot: &GridFunction) -> f64 {
        (self.gradient)(u).dot(udot)
    }
}

impl core::fmt::Debug for Functional {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Functional").field("name", &self.name).finish_non_exhaustive()
    }
}

/// A semi-discrete equation `D(u' + ḡ) + (∂g)‾ = M f̄` with its constraint gradient.
pub struct EquationDef {
    name: String,
    params: BTreeMap<String, f64>,
    pair: OperatorPair,
    g_bar: Option<StateMap>,
    dxg_bar: Option<StateMap>,
    f_bar: StateMap,
    f_bar_grad: StateMap,
    conserved: Vec<Functional>,
}

impl core::fmt::Debug for EquationDef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EquationDef")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("nodes", &self.grid().len())
            .field("conserved", &self.conserved)
            .finish_non_exhaustive()
    }
}

impl EquationDef {
    /// `f_bar_grad` must return the vector `∂(Σ_j f̄_j)/∂u_k`.
    pub fn new(
        name: impl Into<String>,
        pair: OperatorPair,
        f_bar: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static,
        f_bar_grad: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            pair,
            g_bar: None,
            dxg_bar: None,
            f_bar: Box::new(f_bar),
            f_bar_grad: Box::new(f_bar_grad),
            conserved: Vec::new(),
        }
    }

    pub fn with_g_bar(mut self, g: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static) -> Self {
        self.g_bar = Some(Box::new(g));
        self
    }

    /// Flux already in differentiated form; its values must sum to zero.
    pub fn with_dxg_bar(mut self, g: impl Fn(&GridFunction) -> GridFunction + Send + Sync + 'static) -> Self {
        self.dxg_bar = Some(Box::new(g));
        self
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn with_conserved(mut self, functional: Functional) -> Self {
        self.conserved.push(functional);
        self
    }

    /// Replaces the generalized inverse; the grid must not change.
    pub fn with_pair(mut self, pair: OperatorPair) -> Result<Self> {
        self.grid().check_same(&pair.grid())?;
        self.pair = pair;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn grid(&self) -> PeriodicGrid {
        self.pair.grid()
    }

    pub fn pair(&self) -> &OperatorPair {
        &self.pair
    }

    pub fn conserved(&self) -> &[Functional] {
        &self.conserved
    }

    pub fn has_dxg_bar(&self) -> bool {
        self.dxg_bar.is_some()
    }

    pub fn g_bar(&self, u: &GridFunction) -> GridFunction {
        match &self.g_bar {
            Some(g) => g(u),
            None => GridFunction::zeros(u.grid()),
        }
    }

    pub fn dxg_bar(&self, u: &GridFunction) -> Option<GridFunction> {
        self.dxg_bar.as_ref().map(|g| g(u))
    }

    pub fn f_bar(&self, u: &GridFunction) -> GridFunction {
        (self.f_bar)(u)
    }

    pub fn f_bar_grad(&self, u: &GridFunction) -> GridFunction {
        (self.f_bar_grad)(u)
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        self.grid().check_same(&u.grid())
    }

    /// `b(u) = ḡ + D†(∂g)‾ - D†M f̄`, so that `u' = -b + C_d 1`.
    fn base(&self, u: &GridFunction) -> GridFunction {
        let mut b = &self.g_bar(u) - &self.pair.pseudo_act(&self.f_bar(u));
        if let Some(dxg) = self.dxg_bar(u) {
            let inv = self.pair.pseudo_apply_difference(&dxg).expect("grid checked");
            b = &b + &inv;
        }
        b
    }
}

/// `F_d(u) = Δx Σ_k f̄_k(u)`.
pub fn discrete_constraint(eq: &EquationDef, u: &GridFunction) -> Result<f64> {
    eq.check(u)?;
    Ok(u.grid().dx() * eq.f_bar(u).sum())
}

struct Correction {
    value: f64,
    base: GridFunction,
}

fn correction(eq: &EquationDef, u: &GridFunction) -> Result<Correction> {
    eq.check(u)?;
    let grad = eq.f_bar_grad(u);
    let base = eq.base(u);
    let projection = grad.sum();
    let tolerance = DEGENERACY_TOLERANCE * grad.l1();
    if libm::fabs(projection) <= tolerance {
        return Err(Error::DegenerateConstraint { projection, tolerance, ladder: u.grid().dx() * grad.dot(&base) });
    }
    Ok(Correction { value: grad.dot(&base) / projection, base })
}

/// The constant `C_d(u) = ∇·b / ∇·1`.
pub fn correction_constant(eq: &EquationDef, u: &GridFunction) -> Result<f64> {
    correction(eq, u).map(|c| c.value)
}

/// Next-level constraint `F₁(u) = Δx ∇·(ḡ + D†(∂g)‾ - D†M f̄)`.
///
/// Diagnostic only: meaningful when the reduction is degenerate.
pub fn ladder_probe(eq: &EquationDef, u: &GridFunction) -> Result<f64> {
    eq.check(u)?;
    Ok(u.grid().dx() * eq.f_bar_grad(u).dot(&eq.base(u)))
}

/// `D(u' + ḡ) + (∂g)‾ - M f̄`; zero iff `udot` solves the differential form.
pub fn differential_residual(eq: &EquationDef, u: &GridFunction, udot: &GridFunction) -> Result<GridFunction> {
    eq.check(u)?;
    eq.check(udot)?;
    let pair = eq.pair();
    let mut r = &pair.difference().act(&(udot + &eq.g_bar(u))) - &pair.average().act(&eq.f_bar(u));
    if let Some(dxg) = eq.dxg_bar(u) {
        r = &r + &dxg;
    }
    Ok(r)
}

/// A right-hand side `u' = F(u)` on a fixed grid.
pub trait VectorField {
    fn grid(&self) -> PeriodicGrid;
    fn eval(&self, u: &GridFunction) -> Result<GridFunction>;
}

/// The explicit ODE obtained from an [`EquationDef`].
///
/// `C_d` is recomputed on every evaluation; the most recent value is kept in
/// an unsynchronized cell for logging only.
#[derive(Debug)]
pub struct ReducedOde<'a> {
    equation: &'a EquationDef,
    last_correction: Cell<f64>,
}

impl Clone for ReducedOde<'_> {
    fn clone(&self) -> Self {
        Self { equation: self.equation, last_correction: Cell::new(self.last_correction.get()) }
    }
}

pub fn reduce(eq: &EquationDef) -> ReducedOde<'_> {
    ReducedOde { equation: eq, last_correction: Cell::new(0.0) }
}

impl<'a> ReducedOde<'a> {
    pub fn equation(&self) -> &'a EquationDef {
        self.equation
    }

    pub fn last_correction(&self) -> f64 {
        self.last_correction.get()
    }

    /// Fails with [`Error::DegenerateConstraint`] when `∇·1` vanishes.
    pub fn rhs(&self, u: &GridFunction) -> Result<GridFunction> {
        let Correction { value, base } = correction(self.equation, u)?;
        self.last_correction.set(value);
        Ok(base.map(|b| value - b))
    }
}

impl VectorField for ReducedOde<'_> {
    fn grid(&self) -> PeriodicGrid {
        self.equation.grid()
    }

    fn eval(&self, u: &GridFunction) -> Result<GridFunction> {
        self.rhs(u)
    }
}

/// Sine-Gordon integral form with the constraint denominator frozen at `H₀`:
///
/// ```text
/// u' = A sin u - (C̃(u)/H₀) 1,   C̃(u) = Δx Σ cos u_k (A sin u)_k,
/// ```
///
/// with `A` the Fourier-spectral pseudoinverse.
#[derive(Debug, Clone)]
pub struct FrozenSineGordon {
    h0: f64,
    inverse: OperatorPair,
}

impl FrozenSineGordon {
    pub fn new(grid: PeriodicGrid, h0: f64) -> Result<Self> {
        if h0 == 0.0 || !h0.is_finite() {
            return Err(Error::InvalidParameter { name: "H0".into(), reason: "must be finite and nonzero".into() });
        }
        let d = CirculantOperator::standard(StandardKind::FourierSpectralDiff, grid);
        Ok(Self { h0, inverse: OperatorPair::plain(d) })
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    /// `C̃_d(u) = Δx Σ cos u_k (A sin u)_k`.
    pub fn c_tilde(&self, u: &GridFunction) -> Result<f64> {
        let a_sin = self.inverse.pseudo_apply(&u.map(libm::sin))?;
        Ok(u.grid().dx() * u.map(libm::cos).dot(&a_sin))
    }
}

impl VectorField for FrozenSineGordon {
    fn grid(&self) -> PeriodicGrid {
        self.inverse.grid()
    }

    fn eval(&self, u: &GridFunction) -> Result<GridFunction> {
        let a_sin = self.inverse.pseudo_apply(&u.map(libm::sin))?;
        let c = u.grid().dx() * u.map(libm::cos).dot(&a_sin) / self.h0;
        Ok(a_sin.map(|v| v - c))
    }
}

pub fn frozen_sg_rhs(u: &GridFunction, h0: f64) -> Result<GridFunction> {
    FrozenSineGordon::new(u.grid(), h0)?.eval(u)
}
