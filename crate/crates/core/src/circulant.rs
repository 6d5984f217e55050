//! Circulant difference and average operators on the periodic grid.
//!
//! Every operator here is diagonalized by the discrete exponentials
//! `u^ω_k = exp(iωkΔx)`, with eigenvalue (symbol)
//!
//! ```text
//! λ_ω = Σ_j c_j exp(iωjΔx),    (D u)_k = Σ_j c_j u_{k+j}.
//! ```
//!
//! Pseudoinverses are applied mode by mode: symbols below
//! `1e-12 · max|λ|` are treated as exact zeros and mapped to zero, which is the
//! Moore–Penrose inverse of a normal matrix.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft;
use crate::grid::{GridFunction, PeriodicGrid};

/// Relative threshold below which a symbol counts as zero.
pub const SYMBOL_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Built-in explicit operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StandardKind {
    /// `(u_{k+1} - u_k)/Δx`
    ForwardDiff,
    /// `(u_k - u_{k-1})/Δx`
    BackwardDiff,
    /// `(u_{k+1} - u_{k-1})/(2Δx)`
    CentralDiff,
    /// `(-u_{k+2} + 4u_{k+1} - 3u_k)/(2Δx)`
    OneSided2Diff,
    /// `(u_{k+2} - 2u_{k+1} + 2u_{k-1} - u_{k-2})/(2Δx³)`
    CentralDiff3,
    /// `(u_{k+1} - 2u_k + u_{k-1})/Δx²`
    CentralDiff2,
    /// `(u_k + u_{k+1})/2`
    ForwardAvg,
    Identity,
    /// Symbol `iω` on `|ω| < K/2`, zero at the Nyquist mode of even `K`.
    FourierSpectralDiff,
}

impl StandardKind {
    pub const ALL: [StandardKind; 9] = [
        StandardKind::ForwardDiff,
        StandardKind::BackwardDiff,
        StandardKind::CentralDiff,
        StandardKind::OneSided2Diff,
        StandardKind::CentralDiff3,
        StandardKind::CentralDiff2,
        StandardKind::ForwardAvg,
        StandardKind::Identity,
        StandardKind::FourierSpectralDiff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StandardKind::ForwardDiff => "forward_diff",
            StandardKind::BackwardDiff => "backward_diff",
            StandardKind::CentralDiff => "central_diff",
            StandardKind::OneSided2Diff => "onesided2_diff",
            StandardKind::CentralDiff3 => "central_diff3",
            StandardKind::CentralDiff2 => "central_diff2",
            StandardKind::ForwardAvg => "forward_avg",
            StandardKind::Identity => "identity",
            StandardKind::FourierSpectralDiff => "fourier_spectral_diff",
        }
    }

    /// Stencil in units of `Δx^0`; see [`StandardKind::order`] for the scaling.
    fn unit_stencil(self) -> Option<Vec<(i64, f64)>> {
        let s = match self {
            StandardKind::ForwardDiff => vec![(0, -1.0), (1, 1.0)],
            StandardKind::BackwardDiff => vec![(-1, -1.0), (0, 1.0)],
            StandardKind::CentralDiff => vec![(-1, -0.5), (1, 0.5)],
            StandardKind::OneSided2Diff => vec![(0, -1.5), (1, 2.0), (2, -0.5)],
            StandardKind::CentralDiff3 => vec![(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
            StandardKind::CentralDiff2 => vec![(-1, 1.0), (0, -2.0), (1, 1.0)],
            StandardKind::ForwardAvg => vec![(0, 0.5), (1, 0.5)],
            StandardKind::Identity => vec![(0, 1.0)],
            StandardKind::FourierSpectralDiff => return None,
        };
        Some(s)
    }

    /// Power of `1/Δx` carried by the stencil.
    fn order(self) -> i32 {
        match self {
            StandardKind::CentralDiff3 => 3,
            StandardKind::CentralDiff2 => 2,
            StandardKind::ForwardAvg | StandardKind::Identity => 0,
            _ => 1,
        }
    }
}

impl FromStr for StandardKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StandardKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Unknown { what: "operator kind", name: s.to_string() })
    }
}

/// A circulant operator with its cached symbol.
#[derive(Debug, Clone)]
pub struct CirculantOperator {
    grid: PeriodicGrid,
    /// `None` for operators defined only through their symbol.
    stencil: Option<Vec<(i64, f64)>>,
    symbol: Vec<Complex64>,
    fft: Fft,
}

impl CirculantOperator {
    /// Operator `(Du)_k = Σ_j c_j u_{k+j}`; repeated offsets are summed.
    pub fn from_stencil(grid: PeriodicGrid, stencil: &[(i64, f64)]) -> Self {
        let mut merged: Vec<(i64, f64)> = Vec::with_capacity(stencil.len());
        for &(j, c) in stencil {
            match merged.iter_mut().find(|(o, _)| *o == j) {
                Some(entry) => entry.1 += c,
                None => merged.push((j, c)),
            }
        }
        merged.sort_by_key(|&(j, _)| j);
        let k = grid.len();
        let dx = grid.dx();
        let symbol = (0..k)
            .map(|w| {
                merged
                    .iter()
                    .map(|&(j, c)| {
                        // reduce ωj mod K before scaling so large offsets stay exact
                        let phase = (w as i64 * j).rem_euclid(k as i64) as f64 * dx;
                        Complex64::new(c * libm::cos(phase), c * libm::sin(phase))
                    })
                    .sum()
            })
            .collect();
        Self { grid, stencil: Some(merged), symbol, fft: Fft::new(k) }
    }

    /// Operator given directly by its symbol `λ_0, …, λ_{K-1}`.
    ///
    /// The symbol must be Hermitian (`λ_{K-ω} = conj λ_ω`) for the operator
    /// to map real vectors to real vectors.
    pub fn from_symbol(grid: PeriodicGrid, symbol: Vec<Complex64>) -> Result<Self> {
        if symbol.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), got: symbol.len() });
        }
        let k = grid.len();
        let scale = symbol.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for w in 0..k {
            let mirror = symbol[(k - w) % k].conj();
            if (symbol[w] - mirror).norm() > 1e-12 * scale.max(1.0) {
                return Err(Error::Invalid("operator symbol is not Hermitian; the operator would not be real".into()));
            }
        }
        Ok(Self { grid, stencil: None, symbol, fft: Fft::new(k) })
    }

    pub fn standard(kind: StandardKind, grid: PeriodicGrid) -> Self {
        match kind.unit_stencil() {
            Some(unit) => {
                let scale = libm::pow(grid.dx(), -(kind.order() as f64));
                let stencil: Vec<(i64, f64)> = unit.into_iter().map(|(j, c)| (j, c * scale)).collect();
                Self::from_stencil(grid, &stencil)
            }
            None => Self::fourier_spectral(grid),
        }
    }

    fn fourier_spectral(grid: PeriodicGrid) -> Self {
        let k = grid.len();
        let symbol =
            (0..k).map(|w| if 2 * w == k { ZERO } else { Complex64::new(0.0, aliased_mode(w, k) as f64) }).collect();
        Self { grid, stencil: None, symbol, fft: Fft::new(k) }
    }

    /// Composition `self ∘ other` (symbols multiply).
    pub fn compose(&self, other: &CirculantOperator) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        if let (Some(a), Some(b)) = (&self.stencil, &other.stencil) {
            let mut s = Vec::with_capacity(a.len() * b.len());
            for &(i, ci) in a {
                for &(j, cj) in b {
                    s.push((i + j, ci * cj));
                }
            }
            return Ok(Self::from_stencil(self.grid, &s));
        }
        let symbol = self.symbol.iter().zip(&other.symbol).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid, stencil: None, symbol, fft: self.fft.clone() })
    }

    #[inline]
    pub fn grid(&self) -> PeriodicGrid {
        self.grid
    }

    pub fn stencil(&self) -> Option<&[(i64, f64)]> {
        self.stencil.as_deref()
    }

    /// `λ_ω`, K-periodic in `ω`.
    pub fn symbol(&self, omega: i64) -> Complex64 {
        self.symbol[self.grid.wrap(omega)]
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn max_symbol(&self) -> f64 {
        self.symbol.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// True when the operator annihilates constants (`λ_0 = 0`).
    pub fn is_difference(&self) -> bool {
        self.symbol[0].norm() <= SYMBOL_TOLERANCE * self.max_symbol()
    }

    /// Number of modes whose symbol counts as nonzero.
    pub fn rank(&self) -> usize {
        let tol = SYMBOL_TOLERANCE * self.max_symbol();
        self.symbol.iter().filter(|z| z.norm() > tol).count()
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&u.grid())?;
        Ok(GridFunction::from_raw(self.grid, self.apply_slice(u.values())))
    }

    /// Unchecked [`apply`](Self::apply) for callers that own the grid; panics
    /// on length mismatch.
    pub(crate) fn act(&self, u: &GridFunction) -> GridFunction {
        assert_eq!(u.len(), self.grid.len(), "grid mismatch");
        GridFunction::from_raw(self.grid, self.apply_slice(u.values()))
    }

    pub(crate) fn apply_slice(&self, u: &[f64]) -> Vec<f64> {
        let k = u.len() as i64;
        match &self.stencil {
            Some(stencil) => {
                (0..k).map(|i| stencil.iter().map(|&(j, c)| c * u[(i + j).rem_euclid(k) as usize]).sum()).collect()
            }
            None => self.apply_symbol(&self.symbol, u),
        }
    }

    fn apply_symbol(&self, symbol: &[Complex64], u: &[f64]) -> Vec<f64> {
        let mut spec = self.fft.spectrum(u);
        for (s, l) in spec.iter_mut().zip(symbol) {
            *s *= l;
        }
        self.fft.synthesize_real(spec)
    }

    /// Moore–Penrose pseudoinverse applied to `v`.
    pub fn pseudo_apply(&self, v: &GridFunction) -> Result<GridFunction> {
        self.grid.check_same(&v.grid())?;
        let inv = invert_symbol(&self.symbol, |_| Complex64::new(1.0, 0.0));
        Ok(GridFunction::from_raw(self.grid, self.apply_symbol(&inv, v.values())))
    }

    /// Row-major `K × K` matrix.
    pub fn dense(&self) -> Vec<f64> {
        dense_from(self.grid.len(), |u| self.apply_slice(u))
    }
}

/// Signed representative of mode `w` in `(-K/2, K/2]`.
pub(crate) fn aliased_mode(w: usize, k: usize) -> i64 {
    if 2 * w <= k {
        w as i64
    } else {
        w as i64 - k as i64
    }
}

fn invert_symbol(lambda: &[Complex64], numerator: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
    let scale = lambda.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let tol = SYMBOL_TOLERANCE * scale;
    lambda.iter().enumerate().map(|(w, l)| if l.norm() > tol { numerator(w) / l } else { ZERO }).collect()
}

fn dense_from(k: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let mut m = vec![0.0; k * k];
    let mut e = vec![0.0; k];
    for col in 0..k {
        e[col] = 1.0;
        let column = apply(&e);
        e[col] = 0.0;
        for (row, v) in column.into_iter().enumerate() {
            m[row * k + col] = v;
        }
    }
    m
}

/// Which implicit (or plain) operator a pair realizes.
#[derive(Debug, Clone, PartialEq)]
pub enum PairKind {
    /// `δ⁺ U = μ⁺ u`.
    AverageDifference,
    /// `δ^{a,b,c} U = μ^{α,β} u`.
    Compact { a: f64, b: f64, c: f64, alpha: f64, beta: f64 },
    /// A single explicit operator, average side the identity.
    Plain(StandardKind),
}

impl PairKind {
    pub fn name(&self) -> String {
        match self {
            PairKind::AverageDifference => "average_difference".into(),
            PairKind::Compact { .. } => "compact".into(),
            PairKind::Plain(k) => k.name().into(),
        }
    }
}

/// A (difference, average) pair `D U = M u` with the eigenvalues
/// `ν_ω = μ̂_ω / λ_ω` of `D†M` (zero wherever `λ_ω` vanishes).
#[derive(Debug, Clone)]
pub struct OperatorPair {
    difference: CirculantOperator,
    average: CirculantOperator,
    inverse_symbol: Vec<Complex64>,
    difference_inverse: Vec<Complex64>,
}

impl OperatorPair {
    pub fn new(difference: CirculantOperator, average: CirculantOperator) -> Result<Self> {
        difference.grid.check_same(&average.grid)?;
        let inverse_symbol = invert_symbol(&difference.symbol, |w| average.symbol[w]);
        let difference_inverse = invert_symbol(&difference.symbol, |_| Complex64::new(1.0, 0.0));
        Ok(Self { difference, average, inverse_symbol, difference_inverse })
    }

    pub fn plain(op: CirculantOperator) -> Self {
        let identity = CirculantOperator::standard(StandardKind::Identity, op.grid);
        Self::new(op, identity).expect("same grid")
    }

    pub fn average_difference(grid: PeriodicGrid) -> Self {
        Self::new(
            CirculantOperator::standard(StandardKind::ForwardDiff, grid),
            CirculantOperator::standard(StandardKind::ForwardAvg, grid),
        )
        .expect("same grid")
    }

    /// Compact pair with
    /// `12Δx·δU_k = 2c(U_{k+3}-U_{k-3}) + 3b(U_{k+2}-U_{k-2}) + 6a(U_{k+1}-U_{k-1})`
    /// and `μu_k = β(u_{k+2}+u_{k-2}) + α(u_{k+1}+u_{k-1}) + u_k`.
    pub fn compact(grid: PeriodicGrid, a: f64, b: f64, c: f64, alpha: f64, beta: f64) -> Result<Self> {
        let h = 12.0 * grid.dx();
        let d = CirculantOperator::from_stencil(
            grid,
            &[
                (3, 2.0 * c / h),
                (2, 3.0 * b / h),
                (1, 6.0 * a / h),
                (-1, -6.0 * a / h),
                (-2, -3.0 * b / h),
                (-3, -2.0 * c / h),
            ],
        );
        let m = CirculantOperator::from_stencil(grid, &[(2, beta), (1, alpha), (0, 1.0), (-1, alpha), (-2, beta)]);
        let d_tol = SYMBOL_TOLERANCE * d.max_symbol();
        let m_tol = SYMBOL_TOLERANCE * m.max_symbol().max(1.0);
        for (w, (l, mu)) in d.symbol.iter().zip(&m.symbol).enumerate() {
            if l.norm() > d_tol && mu.norm() <= m_tol {
                return Err(Error::CompactMaskSingular { mode: w });
            }
        }
        Self::new(d, m)
    }

    pub fn from_kind(kind: &PairKind, grid: PeriodicGrid) -> Result<Self> {
        match *kind {
            PairKind::AverageDifference => Ok(Self::average_difference(grid)),
            PairKind::Compact { a, b, c, alpha, beta } => Self::compact(grid, a, b, c, alpha, beta),
            PairKind::Plain(k) => Ok(Self::plain(CirculantOperator::standard(k, grid))),
        }
    }

    #[inline]
    pub fn grid(&self) -> PeriodicGrid {
        self.difference.grid
    }

    pub fn difference(&self) -> &CirculantOperator {
        &self.difference
    }

    pub fn average(&self) -> &CirculantOperator {
        &self.average
    }

    /// `ν_ω`, K-periodic in `ω`.
    pub fn symbol(&self, omega: i64) -> Complex64 {
        self.inverse_symbol[self.grid().wrap(omega)]
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.inverse_symbol
    }

    /// True when mode `ω` lies in the range of the difference side.
    pub fn in_range(&self, omega: i64) -> bool {
        let tol = SYMBOL_TOLERANCE * self.difference.max_symbol();
        self.difference.symbol(omega).norm() > tol
    }

    /// Generalized inverse of the pair, `D†(M v)`.
    pub fn pseudo_apply(&self, v: &GridFunction) -> Result<GridFunction> {
        self.grid().check_same(&v.grid())?;
        Ok(GridFunction::from_raw(self.grid(), self.pseudo_slice(v.values())))
    }

    pub(crate) fn pseudo_act(&self, v: &GridFunction) -> GridFunction {
        assert_eq!(v.len(), self.grid().len(), "grid mismatch");
        GridFunction::from_raw(self.grid(), self.pseudo_slice(v.values()))
    }

    pub(crate) fn pseudo_slice(&self, v: &[f64]) -> Vec<f64> {
        self.difference.apply_symbol(&self.inverse_symbol, v)
    }

    /// `D† v`, without the average side.
    pub fn pseudo_apply_difference(&self, v: &GridFunction) -> Result<GridFunction> {
        self.grid().check_same(&v.grid())?;
        let out = self.difference.apply_symbol(&self.difference_inverse, v.values());
        Ok(GridFunction::from_raw(self.grid(), out))
    }

    /// Row-major matrix of `D†M`.
    pub fn pseudo_dense(&self) -> Vec<f64> {
        dense_from(self.grid().len(), |v| self.pseudo_slice(v))
    }
}

/// Zero-mean tolerance used by [`trap_antiderivative`]: `1e-10 · ‖v‖∞ · K`.
pub fn zero_mean_tolerance(v: &GridFunction) -> f64 {
    1e-10 * v.max_abs() * v.len() as f64
}

/// Cumulative trapezoidal antiderivative minus its discrete mean:
///
/// ```text
/// w_k = (v_0/2 + Σ_{i=1}^{k-1} v_i + v_k/2) Δx - (1/2π) Σ_{i=1}^{K} w'_i Δx
/// ```
///
/// for `k = 1..K` with `v_0 = v_K`; index `K` is stored at `0`. For zero-mean
/// `v` it satisfies `δ⁺ w = μ⁺ v` exactly.
pub fn trap_antiderivative(v: &GridFunction) -> Result<GridFunction> {
    let m = crate::grid::mean(v);
    let tolerance = zero_mean_tolerance(v);
    if libm::fabs(m) > tolerance {
        return Err(Error::NotZeroMean { mean: m, tolerance });
    }
    let k = v.len();
    let dx = v.grid().dx();
    let x = v.values();
    let first = x[0];
    // cumulative[i-1] = v_0/2 + Σ_{j=1}^{i-1} v_j + v_i/2 for i = 1..K
    let mut cumulative = Vec::with_capacity(k);
    let mut running = 0.0;
    for &vi in x[1..].iter().chain(core::iter::once(&first)) {
        cumulative.push(first / 2.0 + running + vi / 2.0);
        running += vi;
    }
    let correction = cumulative.iter().sum::<f64>() * dx * dx / (2.0 * PI);
    let mut out = vec![0.0; k];
    for (i, c) in cumulative.iter().enumerate() {
        out[(i + 1) % k] = c * dx - correction;
    }
    Ok(GridFunction::from_raw(v.grid(), out))
}
