//! Vector-field guided constraint-following control for uncertain
//! mechanical systems.
//!
//! The crate is `no_std` with `alloc`. Everything here is pure numerics:
//! desired paths and the guiding vector field, the servo constraint built
//! from it, two plants (a PVTOL aircraft and a 3-link manipulator), the
//! nominal and adaptive robust controllers, a fixed-step integrator, and
//! post-processing of the error signals. File formats and the command line
//! live in the `vfcfc-cli` crate.

#![no_std]
// `!(x > 0.0)` is how parameter checks reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod analysis;
pub mod certify;
pub mod constraint;
pub mod control;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod plants;
pub mod presets;
pub mod sim;
pub mod vectorfield;

pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};
