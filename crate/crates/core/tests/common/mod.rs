#![allow(dead_code)]

use mixedderiv_core::equations::project_constraint;
use mixedderiv_core::{EquationDef, GridFunction, PeriodicGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn grid(k: usize) -> PeriodicGrid {
    PeriodicGrid::new(k).unwrap()
}

/// Random trigonometric polynomial of degree `modes` with coefficients
/// decaying like `1/m`, scaled by `amplitude`, plus an offset.
pub fn smooth(rng: &mut impl Rng, g: PeriodicGrid, modes: usize, amplitude: f64, offset: f64) -> GridFunction {
    let coeffs: Vec<(f64, f64, f64)> =
        (1..=modes).map(|m| (m as f64, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    GridFunction::from_fn(g, |x| {
        offset + amplitude * coeffs.iter().map(|&(m, a, b)| (a * (m * x).cos() + b * (m * x).sin()) / m).sum::<f64>()
    })
    .unwrap()
}

pub fn rough(rng: &mut impl Rng, g: PeriodicGrid, amplitude: f64) -> GridFunction {
    GridFunction::new(g, (0..g.len()).map(|_| amplitude * rng.random_range(-1.0..1.0)).collect()).unwrap()
}

pub fn zero_mean(u: &GridFunction) -> GridFunction {
    mixedderiv_core::grid::project_zero_mean(u)
}

/// Random smooth state shifted onto the discrete constraint.
pub fn on_constraint(rng: &mut impl Rng, eq: &EquationDef, modes: usize, amplitude: f64) -> GridFunction {
    let u = smooth(rng, eq.grid(), modes, amplitude, 0.0);
    project_constraint(eq, &u).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
