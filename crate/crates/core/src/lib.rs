//! Numerical laboratory for Banach function space inequalities on a periodic grid.
//!
//! The crate discretizes functions on the torus `[-L, L)^n` (`n` = 1 or 2) and
//! provides:
//!
//! * [`grid`]: uniform grids, midpoint quadrature and a unitary Fourier transform
//!   with the `(2π)^{-n/2}` normalization;
//! * [`spaces`]: Lebesgue, Lorentz and Morrey norms together with sampled checks of
//!   the lattice, Fatou and local integrability axioms;
//! * [`operators`]: translations, convolution, Hardy–Littlewood maximal operators,
//!   Fourier multipliers, the heat semigroup and the Young-inequality experiments;
//! * [`besov`]: Littlewood–Paley families and homogeneous Besov norms over a space `X`;
//! * [`maxreg`]: an exact-in-time Duhamel solver and the maximal regularity checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod besov;
pub mod error;
pub mod generate;
pub mod grid;
pub mod maxreg;
pub mod operators;
pub mod report;
pub mod spaces;
pub mod timegrid;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, Spectrum};
pub use report::{Aggregate, CaseRow, ExperimentReport};
pub use spaces::SpaceSpec;
pub use timegrid::{HalfLineFunction, TimeGrid};
