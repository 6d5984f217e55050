//! Modified-wavenumber error analysis.
//!
//! For the mode `u^ω_k = exp(iωkΔx)` the band integral
//! `I_k(ω) = ∫_{x_{k-1}}^{x_k} exp(iωx) dx` is compared with its discrete
//! counterpart `Ī_k(ω) = (A u^ω)_k - (A u^ω)_{k-1}`, where `A` is the pair's
//! generalized inverse with eigenvalue `ν_ω`. Their ratio is `iν_ω ω` for every
//! `k`, giving the relative error `e(ω̃) = |iν_ω ω - 1|` at `ω̃ = ωΔx`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::str::FromStr;

use num_complex::Complex64;

use crate::circulant::{CirculantOperator, OperatorPair, StandardKind};
use crate::error::{Error, Result};
use crate::grid::PeriodicGrid;

pub const EXCLUSION_RADIUS: f64 = 0.05;
pub const DEFAULT_NODES: usize = 512;
pub const DEFAULT_SAMPLES: usize = 200;
pub const MIN_SAMPLES: usize = 16;

fn phase(omega: f64, k: f64, dx: f64) -> Complex64 {
    let t = omega * (k - 0.5) * dx;
    Complex64::new(libm::cos(t), libm::sin(t))
}

/// `I_k(ω) = (2/ω) exp(iω(k-½)Δx) sin(ωΔx/2)`; the constant mode gives `Δx`.
pub fn exact_band_integral(omega: i64, k: i64, dx: f64) -> Complex64 {
    if omega == 0 {
        return Complex64::new(dx, 0.0);
    }
    let w = omega as f64;
    phase(w, k as f64, dx) * (2.0 / w * libm::sin(w * dx / 2.0))
}

/// `Ī_k(ω) = 2iν_ω exp(iω(k-½)Δx) sin(ωΔx/2)`.
pub fn approx_band_integral(pair: &OperatorPair, omega: i64, k: i64) -> Result<Complex64> {
    if !pair.in_range(omega) {
        return Err(Error::ModeOutOfRange { mode: omega });
    }
    let dx = pair.grid().dx();
    let w = omega as f64;
    let nu = pair.symbol(omega);
    Ok(Complex64::new(0.0, 2.0) * nu * phase(w, k as f64, dx) * libm::sin(w * dx / 2.0))
}

/// `e(ω̃) = |iν_ω ω - 1|` with `ω` taken as given (not aliased).
pub fn relative_error(pair: &OperatorPair, omega: i64) -> Result<f64> {
    if !pair.in_range(omega) {
        return Err(Error::ModeOutOfRange { mode: omega });
    }
    let z = Complex64::new(0.0, omega as f64) * pair.symbol(omega);
    Ok((z - 1.0).norm())
}

/// Operators with a closed-form relative error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClosedFormKind {
    /// Central difference.
    Cd2,
    /// Second-order one-sided difference.
    Od2,
    /// Average-difference pair.
    Ad,
    /// Fourier-spectral difference.
    Ps,
}

impl ClosedFormKind {
    pub const ALL: [ClosedFormKind; 4] =
        [ClosedFormKind::Cd2, ClosedFormKind::Od2, ClosedFormKind::Ad, ClosedFormKind::Ps];

    pub fn label(self) -> &'static str {
        match self {
            ClosedFormKind::Cd2 => "cd2",
            ClosedFormKind::Od2 => "od2",
            ClosedFormKind::Ad => "ad",
            ClosedFormKind::Ps => "ps",
        }
    }

    pub fn pair(self, grid: PeriodicGrid) -> OperatorPair {
        let plain = |k| OperatorPair::plain(CirculantOperator::standard(k, grid));
        match self {
            ClosedFormKind::Cd2 => plain(StandardKind::CentralDiff),
            ClosedFormKind::Od2 => plain(StandardKind::OneSided2Diff),
            ClosedFormKind::Ad => OperatorPair::average_difference(grid),
            ClosedFormKind::Ps => plain(StandardKind::FourierSpectralDiff),
        }
    }
}

impl FromStr for ClosedFormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cd2" | "central" | "central_diff" => Ok(Self::Cd2),
            "od2" | "one-sided" | "onesided2_diff" => Ok(Self::Od2),
            "ad" | "average-difference" | "average_difference" => Ok(Self::Ad),
            "ps" | "fourier-spectral" | "fourier_spectral_diff" => Ok(Self::Ps),
            _ => Err(Error::Unknown { what: "closed-form kind", name: s.to_string() }),
        }
    }
}

fn near_multiple_of_pi(w: f64) -> bool {
    let n = libm::round(w / PI);
    libm::fabs(w - n * PI) <= 1e-12 * libm::fabs(w).max(1.0)
}

/// Closed-form relative error at the scaled wave number `ω̃`.
///
/// The Fourier-spectral branch above Nyquist uses the aliased symbol
/// `i(ω - K)`: on `((2n+1)π, (2n+2)π)` the error is `2(n+1)π / (2(n+1)π - ω̃)`.
pub fn closed_form_error(kind: ClosedFormKind, w: f64) -> Result<f64> {
    if !w.is_finite() || near_multiple_of_pi(w) {
        return Err(Error::PoleAtMultipleOfPi(w));
    }
    let e = match kind {
        ClosedFormKind::Cd2 => libm::fabs(w / libm::sin(w) - 1.0),
        ClosedFormKind::Od2 => {
            let e1 = Complex64::new(libm::cos(w), libm::sin(w));
            let denom = -3.0 + 4.0 * e1 - e1 * e1;
            (Complex64::new(0.0, 2.0 * w) / denom - 1.0).norm()
        }
        ClosedFormKind::Ad => libm::fabs(w / (2.0 * libm::tan(w / 2.0)) - 1.0),
        ClosedFormKind::Ps => {
            let n = libm::floor(w / (2.0 * PI));
            let two_n_pi = 2.0 * n * PI;
            if w - two_n_pi < PI {
                libm::fabs(two_n_pi / (w - two_n_pi))
            } else {
                let upper = two_n_pi + 2.0 * PI;
                libm::fabs(upper / (upper - w))
            }
        }
    };
    Ok(e)
}

/// A pair to tabulate, with the closed form it should reproduce, if any.
#[derive(Debug, Clone)]
pub struct LabeledPair {
    pub label: String,
    pub pair: OperatorPair,
    pub closed_form: Option<ClosedFormKind>,
}

impl LabeledPair {
    pub fn builtin(kind: ClosedFormKind, grid: PeriodicGrid) -> Self {
        Self { label: kind.label().to_string(), pair: kind.pair(grid), closed_form: Some(kind) }
    }
}

/// Sampled relative errors, one series per label.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub nodes: usize,
    pub exclusion_radius: f64,
    pub modes: Vec<i64>,
    pub omega_tilde: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    /// Max `|symbol route - closed form|` for labels with a closed form.
    pub max_discrepancy: Vec<(String, f64)>,
}

impl ErrorCurve {
    pub fn series(&self, label: &str) -> Option<&[f64]> {
        self.series.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }

    /// Closed-form values on the same samples, for labels that have one.
    pub fn closed_form_table(&self, pairs: &[LabeledPair]) -> Result<Vec<(String, Vec<f64>)>> {
        pairs
            .iter()
            .filter_map(|p| p.closed_form.map(|k| (p.label.clone(), k)))
            .map(|(label, kind)| {
                let values =
                    self.omega_tilde.iter().map(|&w| closed_form_error(kind, w)).collect::<Result<Vec<_>>>()?;
                Ok((label, values))
            })
            .collect()
    }
}

/// Integer modes of a `K`-node grid whose `ω̃` lies at least `radius` away
/// from `{0, π, 2π}`, thinned evenly to `samples` points.
pub fn sample_modes(nodes: usize, samples: usize, radius: f64) -> Result<Vec<i64>> {
    let dx = 2.0 * PI / nodes as f64;
    let eligible: Vec<i64> = (1..nodes as i64)
        .filter(|&w| {
            let t = w as f64 * dx;
            (0..=2).all(|n| libm::fabs(t - n as f64 * PI) >= radius)
        })
        .collect();
    if samples < MIN_SAMPLES || samples > eligible.len() {
        return Err(Error::InvalidParameter {
            name: "samples".into(),
            reason: alloc::format!("must lie in {MIN_SAMPLES}..={} for K = {nodes}", eligible.len()),
        });
    }
    let last = eligible.len() - 1;
    Ok((0..samples).map(|i| eligible[(i * last + (samples - 1) / 2) / (samples - 1)]).collect())
}

pub fn build_error_curve(pairs: &[LabeledPair], nodes: usize, samples: usize) -> Result<ErrorCurve> {
    if pairs.is_empty() {
        return Err(Error::Invalid("no operators to tabulate".into()));
    }
    for p in pairs {
        if p.pair.grid().len() != nodes {
            return Err(Error::GridMismatch { left: nodes, right: p.pair.grid().len() });
        }
    }
    let modes = sample_modes(nodes, samples, EXCLUSION_RADIUS)?;
    let dx = 2.0 * PI / nodes as f64;
    let omega_tilde: Vec<f64> = modes.iter().map(|&w| w as f64 * dx).collect();
    let mut series = Vec::with_capacity(pairs.len());
    let mut max_discrepancy = Vec::new();
    for p in pairs {
        let values = modes.iter().map(|&w| relative_error(&p.pair, w)).collect::<Result<Vec<f64>>>()?;
        if let Some(kind) = p.closed_form {
            let mut worst = 0.0f64;
            for (&w, &e) in omega_tilde.iter().zip(&values) {
                worst = worst.max(libm::fabs(e - closed_form_error(kind, w)?));
            }
            max_discrepancy.push((p.label.clone(), worst));
        }
        series.push((p.label.clone(), values));
    }
    Ok(ErrorCurve { nodes, exclusion_radius: EXCLUSION_RADIUS, modes, omega_tilde, series, max_discrepancy })
}
