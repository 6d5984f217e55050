//! Kernel for evolutionary PDEs with a mixed derivative,
//!
//! ```text
//! (u_t + g(u))_x = f(u),   x in R / 2πZ,
//! ```
//!
//! discretized on a uniform periodic grid. The outer derivative is singular on
//! periodic functions, so the semi-discrete system `D(u' + g) = M f` is a DAE.
//! This crate reduces it to the explicit ODE
//!
//! ```text
//! u' = -g + D†M f + C_d(u) 1
//! ```
//!
//! where `D†` is the Moore–Penrose pseudoinverse of the circulant difference
//! and `C_d` is fixed by keeping the discrete constraint `Σ f_k Δx = 0` flat.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the CLI and the
//! randomized verification suites live in the `mixedderiv` crate.
#![no_std]

extern crate alloc;

pub mod circulant;
pub mod equations;
mod error;
mod fft;
pub mod grid;
pub mod integrators;
pub mod reformulate;
pub mod spectral;

pub use circulant::{CirculantOperator, OperatorPair, PairKind, StandardKind};
pub use error::{Error, Result};
pub use grid::{GridFunction, PeriodicGrid};

pub use reformulate::{EquationDef, ReducedOde, VectorField};
