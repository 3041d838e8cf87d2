//! Boundary amplitudes and survival probabilities for one-dimensional diffusion
//! and Schrödinger dynamics with an imaginary (killing) delta potential at the
//! origin.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; IO, CSV and the command line live in the companion
//! `deltasink-cli` crate.
//!
//! Layout:
//!
//! - [`model`]: parameter bundles, time grids and result containers.
//! - [`specfun`]: `erfcx`, the Faddeeva function and a fixed-branch square root.
//! - [`propagators`]: free Green's functions, forcing terms and Abel kernels.
//! - [`volterra`]: product-trapezoidal solver for Abel-kernel Volterra equations.
//! - [`closedform`]: Laplace-inverse closed forms, asymptotics and plane-wave scattering.
//! - [`survival`]: survival curves, power-law tail fits and the vanishing-time estimate.
//! - [`oracle`]: Crank–Nicolson grid solvers used as an independent check.
#![no_std]
// `!(x > 0.0)` deliberately rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod closedform;
pub mod error;
pub mod model;
pub mod oracle;
pub mod propagators;
pub mod quad;
pub mod specfun;
pub mod survival;
pub mod tridiag;
pub mod volterra;

pub use error::{Error, Result};
pub use model::{
    map_quantum_to_diffusion, AmplitudeSeries, DiffusionParams, EffectiveComplexParams, QuantumParams, SeriesKind,
    SurvivalCurve, TimeGrid,
};
pub use num_complex::Complex64;
