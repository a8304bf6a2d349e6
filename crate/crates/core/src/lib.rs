//! One-dimensional Dirac equation with a position-dependent mass and a
//! position-dependent Fermi velocity, solved for the Morse system.
//!
//! The crate is split along the physics:
//!
//! - [`model`]: parameters, profile functions `W(x)`, `v_f(x)`, `m(x)`, the
//!   von Roos effective potential and the SUSY partner potentials.
//! - [`transform`]: grids, sampled fields and the coordinate maps
//!   `x <-> t`, `y(x)`, `xi(t)` and the rescaling `psi = Phi / sqrt(v_f)`.
//! - [`polys`]: associated Laguerre polynomials with a real upper index.
//! - [`morse`]: closed-form spectrum and spinor components.
//! - [`numerics`]: finite-difference Hamiltonians, a Sturm-bisection
//!   tridiagonal eigensolver, quadrature and ladder operators.
//! - [`verify`]: cross-checks between the closed forms and the numerics,
//!   collected into a [`verify::VerificationReport`].
//!
//! Units are natural: `hbar = 1` and the constancy product `m v_f^2 = 1/2`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod morse;
pub mod numerics;
pub mod polys;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use model::{AmbiguityParams, MorseParams, ProfileSample};
pub use morse::{MorseLevel, Normalization, Provenance, Spectrum};
pub use transform::{Coordinate, Grid, MappedField, ScalarField};

pub use verify::{Check, CheckKind, GridSpec, Suite, VerificationReport};
