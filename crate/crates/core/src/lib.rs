//! Numerical harmonic analysis on two model graded Lie groups: anisotropic
//! `R^n` and the first Heisenberg group.
//!
//! The crate is `no_std` (with `alloc`). It provides positive Rockland
//! operators (exact Fourier symbols on periodic grids, a finite-difference
//! sub-Laplacian on truncated Heisenberg boxes), their functional calculus,
//! dyadic Littlewood-Paley blocks, Besov and Sobolev norms, and the drivers
//! for scaling-law and boundedness experiments built on top of them.
//!
//! Enable the `std` feature for faster dense linear algebra kernels.

#![no_std]
// Negated comparisons reject NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

mod error;
pub mod besov;
pub mod calculus;
pub mod chebyshev;
pub mod family;
pub mod fft;
pub mod grid;
pub mod inequalities;
pub mod interpolation;
pub mod multipliers;
pub mod group;
pub mod partition;
pub mod regression;
pub mod rockland;
pub mod sparse;

pub use error::{Error, Result};

pub use num_complex::Complex64;

pub use besov::{BesovParams, NormReport};
pub use calculus::{Method, ScalarMultiplier};
pub use grid::{BoundaryMode, Grid, SampledFunction};
pub use group::{GroupKind, GroupSpec};
pub use partition::{DyadicPartition, Smoothness};
pub use rockland::{EigDecomp, RocklandOp};
