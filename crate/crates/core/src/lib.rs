//! Lattice Dirac dynamics, its second-order reduction, and the Clebsch fluid
//! reading of the two-spinor field.
//!
//! Every numerical type is generic over [`Real`] (`f32` or `f64`); the
//! Clifford matrices are also available over exact `Complex<i64>`. The
//! aliases below fix the scalar to `f64` for everyday use.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clifford;
pub mod diagnostics;
pub mod dirac;
mod error;
pub mod fluid;
pub mod initial;
pub mod jet;
pub mod lattice;
mod params;
pub mod reduction;
mod scalar;
pub mod spinor;

pub use error::{Error, Result};
pub use params::{PhysParams, Tolerances};
pub use scalar::Real;

pub type Grid64 = lattice::Grid<f64>;
pub type GridSpec64 = lattice::GridSpec<f64>;
pub type ComplexField64 = lattice::ComplexField<f64>;
pub type FourVector64 = lattice::FourVector<f64>;
pub type PhysParams64 = PhysParams<f64>;
pub type DiracState64 = dirac::DiracState<f64>;
pub type DiracSolver64 = dirac::DiracSolver<f64>;
pub type ReducedSolver64 = reduction::ReducedSolver<f64>;
pub type FluidState64 = fluid::FluidState<f64>;

pub type Grid32 = lattice::Grid<f32>;
pub type ComplexField32 = lattice::ComplexField<f32>;
pub type PhysParams32 = PhysParams<f32>;
pub type DiracState32 = dirac::DiracState<f32>;
pub type DiracSolver32 = dirac::DiracSolver<f32>;
pub type FluidState32 = fluid::FluidState<f32>;

/// Exact Gaussian-integer Dirac matrices.
pub type ExactMatrix4 = clifford::Matrix4<i64>;

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
