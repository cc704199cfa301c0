//! Scale functions of space-time changed spectrally negative processes.
//!
//! The crate is `no_std` (it needs `alloc`). It provides:
//!
//! - [`levy`]: rational Laplace exponents and their right inverse `Φ`.
//! - [`scale`]: closed-form `q`-scale functions as exponential sums.
//! - [`volterra`]: a product-trapezoid march for second-kind Volterra
//!   equations with difference kernels.
//! - [`change`]: the space-time change `(h_S, h_T, h_D)`, the self-similar
//!   and branching specialisations, exit ratios and resolvent densities.
//! - [`mc`]: a single-path Euler kernel used as a Monte Carlo oracle.
#![no_std]
extern crate alloc;

pub mod change;
pub mod error;
pub mod levy;
pub mod mc;
mod poly;
pub mod scale;
pub mod volterra;

pub use change::{
    DensityKind, HsMap, HtMap, ModelKind, ModelSpec, Prediction, RefDensity, SpaceTimeChange,
};
pub use error::{Error, Result};
pub use levy::LevySpec;
pub use scale::{ScaleFunction, ScaleTerm};
pub use volterra::{Grid, ScaleTable, VolterraProblem};
