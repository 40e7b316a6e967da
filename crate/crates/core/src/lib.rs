//! Finite-element workbench for time-harmonic scattering with Padé-type
//! absorbing boundary conditions.

pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod meshing;
pub mod pade;
pub mod pml;
pub mod rays;

pub use error::{Error, ErrorCategory, Result};
