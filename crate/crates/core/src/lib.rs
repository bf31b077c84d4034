//! Numerical toolkit for parabolic character varieties of free groups.
//!
//! The groups covered are `SL(2,C)` and `SL(3,C)` with maximal compact
//! subgroups `SU(2)` and `SU(3)`. The crate provides:
//!
//! - [`matrix_core`]: small dense complex matrices, Hermitian calculus, polar
//!   decomposition, Haar sampling and centralizers.
//! - [`retraction`]: the polar retraction `g = k exp(p) -> k exp(tp)` and its
//!   extension to tuples with components on fixed conjugacy orbits.
//! - [`kempf_ness`]: the Kempf-Ness function of the `(prod G_i) x G` action on
//!   `G^m x G^n`, its gradient at the identity and a descent flow.
//! - [`trace_coords`]: trace coordinates for `SL(2)` and `SL(3)` tuples and the
//!   relations among them.
//! - [`boundary_maps`]: boundary maps of punctured surfaces, the parabolic
//!   boundary map and dimension estimates.
//! - [`generic_reduction`]: reduction of parabolic quotients with a regular
//!   component to torus quotients.
//! - [`cli`]: the batch front end behind the `charvar` binary.

pub mod boundary_maps;
pub mod cli;
pub mod error;
pub mod generic_reduction;
pub mod kempf_ness;
pub mod matrix_core;
pub mod retraction;
pub mod trace_coords;

pub use error::{Error, Result};
pub use matrix_core::{
    ComplexMatrix, GroupElement, HermitianDirection, LieAlgebraBasis, UnitaryElement, C64,
};
